"""Compare the compiled and numpy tableau kernels on the same LPs.

    python benchmarks/bench_simplex.py [--repeat 3] [--sizes 40,80,160]

Each program is solved once per backend and repeat; the table lists the best
wall time, the pivot count and the largest objective disagreement.
"""

from __future__ import annotations

import argparse
import importlib
import time
from contextlib import contextmanager

import numpy as np

from simsmooth import lp as lp_mod
from simsmooth.lp import LinearProgram, lp_solve
from simsmooth.smoother import SubsetFamily
from simsmooth.oracle import build_smoother_lp
from simsmooth.worstcase import ALL_ACTIVE, WorstCaseParams, build_worst_case

BACKENDS = {"python": "simsmooth._core._tableau_py", "compiled": "simsmooth._core._tableau"}


@contextmanager
def backend(name: str):
    mod = importlib.import_module(BACKENDS[name])
    saved = lp_mod.pivot, lp_mod.entering_bland, lp_mod.leaving_bland
    lp_mod.pivot, lp_mod.entering_bland, lp_mod.leaving_bland = mod.pivot, mod.entering_bland, mod.leaving_bland
    try:
        yield
    finally:
        lp_mod.pivot, lp_mod.entering_bland, lp_mod.leaving_bland = saved


def random_lp(size: int, seed: int) -> LinearProgram:
    rng = np.random.default_rng(seed)
    A = rng.uniform(0, 1, (size, size))
    b = np.ones(size)
    c = -rng.uniform(0.5, 1, size)
    return LinearProgram(c, A, b)


def cases(sizes):
    for s in sizes:
        yield f"dense {s}x{s}", random_lp(s, s)
    for n in (4, 5):
        model = build_smoother_lp(build_worst_case(WorstCaseParams(n)), SubsetFamily(ALL_ACTIVE, 0.3))
        m, k = model.lp.shape
        yield f"worst case n={n} ({m}x{k})", model.lp


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--sizes", default="40,80,160")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    available = []
    for name, path in BACKENDS.items():
        try:
            importlib.import_module(path)
            available.append(name)
        except ImportError:
            print(f"backend {name!r} unavailable")

    print(f"{'program':<32}{'backend':<10}{'best s':>10}{'pivots':>8}{'speedup':>9}{'|dobj|':>10}")
    for label, prog in cases(sizes):
        results = {}
        for name in available:
            best = float("inf")
            with backend(name):
                for _ in range(args.repeat):
                    t0 = time.perf_counter()
                    res = lp_solve(prog)
                    best = min(best, time.perf_counter() - t0)
            results[name] = (best, res)
        base = results.get("python", next(iter(results.values())))
        for name, (best, res) in results.items():
            speed = base[0] / best
            diff = abs(res.objective - base[1].objective)
            print(f"{label:<32}{name:<10}{best:>10.4f}{res.iterations:>8}{speed:>9.2f}{diff:>10.1e}")


if __name__ == "__main__":
    main()
