"""Batch solver kernels for compiled models.

A compiled model is a set of flat int64 arrays: for every variable its
semantic parents, their mixed-radix strides, and a lookup table from the
encoded parent values to the index of the output value.  A batch row is
one (context, intervention) pair; ``iv[b, v] >= 0`` pins variable ``v``.

``HARMCALC_BACKEND=numpy`` selects the pure-numpy path even when numba
is importable.  Both paths must return identical arrays.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None


def solve_batch_numpy(order, parent_ptr, parent_idx, parent_stride, table_ptr, tables, init, iv):
    out = np.where(iv >= 0, iv, init)
    for v in order:
        lo, hi = parent_ptr[v], parent_ptr[v + 1]
        if hi > lo:
            code = out[:, parent_idx[lo:hi]] @ parent_stride[lo:hi]
        else:
            code = 0
        vals = tables[table_ptr[v] + code]
        pinned = iv[:, v]
        out[:, v] = np.where(pinned >= 0, pinned, vals)
    return out


if numba is not None:

    @numba.njit(cache=True, nogil=True)
    def solve_batch_numba(order, parent_ptr, parent_idx, parent_stride, table_ptr, tables, init, iv):
        n_rows, n_vars = init.shape
        out = np.empty_like(init)
        for b in range(n_rows):
            for v in range(n_vars):
                out[b, v] = iv[b, v] if iv[b, v] >= 0 else init[b, v]
            for k in range(order.shape[0]):
                v = order[k]
                if iv[b, v] >= 0:
                    continue
                code = 0
                for j in range(parent_ptr[v], parent_ptr[v + 1]):
                    code += out[b, parent_idx[j]] * parent_stride[j]
                out[b, v] = tables[table_ptr[v] + code]
        return out

else:  # pragma: no cover
    solve_batch_numba = None


def backend() -> str:
    if solve_batch_numba is None:
        return "numpy"
    return "numpy" if os.environ.get("HARMCALC_BACKEND", "numba").lower() == "numpy" else "numba"


def solve_batch(order, parent_ptr, parent_idx, parent_stride, table_ptr, tables, init, iv):
    fn = solve_batch_numba if backend() == "numba" else solve_batch_numpy
    return fn(order, parent_ptr, parent_idx, parent_stride, table_ptr, tables, init, iv)
