"""Compare the compiled and pure-Python maximal clique kernels.

    python benchmarks/bench_kernels.py [--repeat 5] [--m 2 4 6 8]

Graphs are the wire-incomparability graphs used for cut enumeration on
sprinkled unit squares at l = 1/m, plus a few random graphs.
"""
import argparse
import timeit

import numpy as np

from optensor.causet import MINKOWSKI, Rectangle, sprinkle
from optensor.kernels import _pure

try:
    from optensor.kernels import _ckernels
except ImportError:
    _ckernels = None


def incomparability(m, seed):
    cs = sprinkle(MINKOWSKI, Rectangle(), 1.0 / m, seed=seed)
    w = cs.wire_order()
    inc = ~(w | w.T)
    np.fill_diagonal(inc, False)
    return inc


def random_graph(n, p, seed):
    a = np.random.default_rng(seed).random((n, n)) < p
    a = np.triu(a, 1)
    return a | a.T


def best(fn, adj, repeat):
    return min(timeit.repeat(lambda: fn(adj), number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--m", type=int, nargs="+", default=[2, 4, 6, 8])
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the pure kernel is timed")

    cases = [(f"sprinkle m={m}", incomparability(m, seed=m)) for m in args.m]
    cases += [(f"random n={n} p={p}", random_graph(n, p, 1)) for n, p in ((40, 0.3), (80, 0.2))]
    print(f"{'graph':<22}{'nodes':>6}{'cliques':>9}{'pure ms':>10}{'cython ms':>11}{'speedup':>9}")
    for name, adj in cases:
        cliques = _pure.maximal_cliques(adj)
        t_pure = best(_pure.maximal_cliques, adj, args.repeat)
        if _ckernels is not None:
            assert _ckernels.maximal_cliques(adj) == cliques
            t_c = best(_ckernels.maximal_cliques, adj, args.repeat)
            tail = f"{1e3 * t_c:>11.2f}{t_pure / t_c:>8.1f}x"
        else:
            tail = f"{'-':>11}{'-':>9}"
        print(f"{name:<22}{len(adj):>6}{len(cliques):>9}{1e3 * t_pure:>10.2f}{tail}")


if __name__ == "__main__":
    main()
