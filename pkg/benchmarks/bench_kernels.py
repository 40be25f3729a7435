"""Compare the compiled kernels against the pure-Python fallback.

Run with ``python benchmarks/bench_kernels.py``. Both backends are imported
directly, so the ``PFGROUPS_PURE`` switch does not matter here.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from pfgroups._ext import kernels_slow
from pfgroups.finite import symmetric_group
from pfgroups.mekler import all_alpha_vectors, cycle_graph, petersen_graph
from pfgroups.slfamily import sl2_level

try:
    from pfgroups._ext import kernels_fast
except ImportError:  # extension not built
    kernels_fast = None


def timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases():
    g = sl2_level(3, 2).group  # order 648
    gens = g.generating_set()
    cols = g.gen_cols(gens)
    swapped = g.gen_cols(gens[::-1])
    yield "closure SL2(Z/9)", lambda k: k.closure(cols, g.identity)
    yield "cayley_bfs SL2(Z/9)", lambda k: k.cayley_bfs(cols, g.identity)
    s5 = symmetric_group(5)
    s5cols = s5.gen_cols(s5.generating_set())
    yield "closure S5", lambda k: k.closure(s5cols, s5.identity)
    # generators against swapped generators: a large subgroup of G x G
    yield "pair_closure in SL2(Z/9)^2", lambda k: k.pair_closure(
        cols, g.identity, swapped, g.identity, False)
    rng = np.random.default_rng(1)
    mat = rng.integers(0, 5, size=(40, 30))
    yield "rref_mod_p 40x30 over F_5", lambda k: k.rref_mod_p(mat, 5)
    for name, A in (("C5 p=5", cycle_graph(5)), ("Petersen p=3", petersen_graph())):
        p = 5 if A.n == 5 else 3
        alphas = all_alpha_vectors(A.n, p)
        if A.n == 10:
            alphas = alphas[:5000]
        ne = np.array(A.nonedges, dtype=np.int64)
        yield f"centralizer_keys {name} ({len(alphas)} vectors)", (
            lambda k, a=alphas, ne=ne, p=p: k.centralizer_keys(a, ne, p))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"{'kernel':48s} {'python':>10s} {'cython':>10s} {'speedup':>8s}")
    for name, fn in cases():
        slow = timeit(lambda: fn(kernels_slow), args.repeat)
        if kernels_fast is None:
            print(f"{name:48s} {slow:10.4f} {'-':>10s} {'-':>8s}")
            continue
        fast = timeit(lambda: fn(kernels_fast), args.repeat)
        print(f"{name:48s} {slow:10.4f} {fast:10.4f} {slow / fast:7.1f}x")


if __name__ == "__main__":
    main()
