"""Integer-table form of a causal model for batched evaluation."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from . import _kernels
from .atoms import Value, atom_key
from .scm import CausalModel, check_context, check_valid


@dataclass(frozen=True, eq=False)
class CompiledModel:
    model: CausalModel
    sizes: np.ndarray
    order: np.ndarray
    parent_ptr: np.ndarray
    parent_idx: np.ndarray
    parent_stride: np.ndarray
    table_ptr: np.ndarray
    tables: np.ndarray
    value_index: tuple  # per variable: {atom_key: index}

    @property
    def n_vars(self) -> int:
        return len(self.sizes)

    def idx(self, name: str) -> int:
        return self.model.position[name]

    def code(self, name: str, value: Value) -> int:
        i = self.model.position[name]
        return self.value_index[i][atom_key(value)]

    def value(self, var: int, code: int) -> Value:
        return self.model.variables[var].values[code]

    def encode_contexts(self, contexts: Sequence[Mapping[str, Value]]) -> np.ndarray:
        init = np.zeros((len(contexts), self.n_vars), dtype=np.int64)
        for r, ctx in enumerate(contexts):
            check_context(self.model, ctx)
            for name in self.model.exogenous:
                init[r, self.idx(name)] = self.code(name, ctx[name])
        return init

    def encode_intervention(self, iv: Mapping[str, Value]) -> np.ndarray:
        row = np.full(self.n_vars, -1, dtype=np.int64)
        for name, value in iv.items():
            row[self.idx(name)] = self.code(name, value)
        return row

    def solve(self, init: np.ndarray, iv: np.ndarray) -> np.ndarray:
        """Solve every row; ``init`` carries the context codes, ``iv`` the pins."""
        init = np.ascontiguousarray(init, dtype=np.int64)
        iv = np.ascontiguousarray(np.broadcast_to(iv, init.shape), dtype=np.int64)
        return _kernels.solve_batch(self.order, self.parent_ptr, self.parent_idx, self.parent_stride,
                                    self.table_ptr, self.tables, init, iv)

    def decode(self, row) -> dict:
        return {v.name: v.values[int(c)] for v, c in zip(self.model.variables, row)}


def compile_model(model: CausalModel) -> CompiledModel:
    check_valid(model)
    pos = model.position
    sizes = np.array([len(v.values) for v in model.variables], dtype=np.int64)
    value_index = tuple({atom_key(x): i for i, x in enumerate(v.values)} for v in model.variables)
    parent_ptr = [0]
    parent_idx, parent_stride, table_ptr, tables = [], [], [0], []
    for v in model.variables:
        if v.exogenous:
            parent_ptr.append(parent_ptr[-1])
            table_ptr.append(table_ptr[-1])
            continue
        eq = model.equations[v.name]
        parents = model.parents[v.name]
        stride = 1
        strides = []
        for p in reversed(parents):
            strides.append(stride)
            stride *= len(model.by_name[p].values)
        strides.reverse()
        # non-semantic inputs sit at a fixed placeholder; they cannot change the output
        env = {n: model.by_name[n].values[0] for n in eq.inputs}
        mine = value_index[pos[v.name]]
        for combo in itertools.product(*(model.by_name[p].values for p in parents)):
            env.update(zip(parents, combo))
            tables.append(mine[atom_key(eq.evaluate(env))])
        parent_idx.extend(pos[p] for p in parents)
        parent_stride.extend(strides)
        parent_ptr.append(len(parent_idx))
        table_ptr.append(len(tables))
    order = np.array([pos[n] for n in model.order], dtype=np.int64)
    as_i64 = lambda xs: np.asarray(xs, dtype=np.int64)
    return CompiledModel(model, sizes, order, as_i64(parent_ptr), as_i64(parent_idx),
                         as_i64(parent_stride), as_i64(table_ptr), as_i64(tables), value_index)
