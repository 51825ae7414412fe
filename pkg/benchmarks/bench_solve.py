"""Compare the numba and numpy batch solvers.

    python3 benchmarks/bench_solve.py [--rows N] [--repeat R]

Solves the bundled norcross-c scenario (52 variables) and a random
12-variable model over N rows of random interventions, then times one
end-to-end harm search per backend.
"""
import argparse
import os
import random
import time
import timeit

import numpy as np

from harmcalc import _kernels, scenario
from harmcalc.compiled import compile_model
from harmcalc.scm import enumerate_contexts
from harmcalc.testing import random_model


def _batch(cm, model, rows, rng):
    contexts = enumerate_contexts(model)
    init = cm.encode_contexts([contexts[i % len(contexts)] for i in range(rows)])
    iv = np.full_like(init, -1)
    # pin one random endogenous variable in half of the rows
    endo = [i for i, v in enumerate(model.variables) if not v.exogenous]
    for r in range(0, rows, 2):
        v = rng.choice(endo)
        iv[r, v] = rng.randrange(int(cm.sizes[v]))
    return init, iv


def bench_kernels(label, model, rows, repeat, rng):
    cm = compile_model(model)
    init, iv = _batch(cm, model, rows, rng)
    args = (cm.order, cm.parent_ptr, cm.parent_idx, cm.parent_stride, cm.table_ptr, cm.tables, init, iv)
    _kernels.solve_batch_numba(*args)  # compile outside the timing
    assert np.array_equal(_kernels.solve_batch_numba(*args), _kernels.solve_batch_numpy(*args))
    for name, fn in (("numba", _kernels.solve_batch_numba), ("numpy", _kernels.solve_batch_numpy)):
        best = min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))
        print(f"{label:<22} {name:<6} {rows:>8} rows  {best * 1e3:9.2f} ms  {rows / best / 1e6:7.2f} Mrows/s")


def bench_end_to_end(repeat):
    from harmcalc.uncertainty import expected_harm

    sc = scenario.load("treatments")
    um, dist = sc.agent(), sc.distribution
    for name in ("numba", "numpy"):
        os.environ["HARMCALC_BACKEND"] = name
        expected_harm(um, dist, {"T": "t2"})
        best = min(timeit.repeat(lambda: expected_harm(um, dist, {"T": "t2"}), number=1, repeat=repeat))
        print(f"{'treatments EH(t2)':<22} {name:<6} {'':>8}       {best * 1e3:9.2f} ms")
    os.environ.pop("HARMCALC_BACKEND", None)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--rows", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = random.Random(0)
    start = time.perf_counter()
    bench_kernels("norcross-c", scenario.load("norcross-c").model, args.rows, args.repeat, rng)
    big = random_model(rng, max_endogenous=12, max_range=3, max_exogenous=2, max_parents=3)
    bench_kernels("random (12 endogenous)", big, args.rows, args.repeat, rng)
    bench_end_to_end(args.repeat)
    print(f"total {time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
