"""Pure-Python kernels; reference behaviour for the compiled versions."""
from __future__ import annotations

import numpy as np


def maximal_cliques(adj) -> list[tuple[int, ...]]:
    """All maximal cliques of an undirected graph (Bron-Kerbosch with pivoting).

    ``adj`` is a symmetric boolean matrix with a false diagonal.  Cliques are
    returned as ascending tuples in discovery order.
    """
    adj = np.asarray(adj, dtype=bool)
    n = adj.shape[0]
    nbr = [0] * n
    for i in range(n):
        m = 0
        for j in np.flatnonzero(adj[i]):
            if j != i:
                m |= 1 << int(j)
        nbr[i] = m
    out: list[tuple[int, ...]] = []
    if n == 0:
        return out

    def bits(m):
        while m:
            low = m & -m
            yield low.bit_length() - 1
            m ^= low

    def bk(r, p, x):
        if not p and not x:
            out.append(tuple(sorted(r)))
            return
        best, bestc = -1, -1
        for u in bits(p | x):
            c = bin(p & nbr[u]).count("1")
            if c > bestc:
                best, bestc = u, c
        for v in bits(p & ~nbr[best]):
            bk(r + [v], p & nbr[v], x & nbr[v])
            p &= ~(1 << v)
            x |= 1 << v

    bk([], (1 << n) - 1, 0)
    return out


def covering_relation(order) -> np.ndarray:
    """Links of a strict order: ``i < j`` with nothing strictly between."""
    r = np.asarray(order, dtype=bool)
    ri = r.astype(np.int64)
    return r & ~((ri @ ri) > 0)
