# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: bitset Bron-Kerbosch for maximal cliques."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport uint64_t
from libc.stdlib cimport free, malloc

cnp.import_array()

cdef extern from *:
    int __builtin_popcountll(unsigned long long) nogil
    int __builtin_ctzll(unsigned long long) nogil


cdef void _bk(uint64_t* adj, int nw, uint64_t* p, uint64_t* x, int* r, int rlen, list out):
    cdef int w, k, b, u, v, c, best = -1, bestc = -1
    cdef uint64_t cand
    cdef uint64_t* np_ = NULL
    cdef uint64_t* nx = NULL
    cdef bint empty = True
    for w in range(nw):
        if p[w] or x[w]:
            empty = False
            break
    if empty:
        out.append(tuple(sorted([r[k] for k in range(rlen)])))
        return
    for w in range(nw):
        cand = p[w] | x[w]
        while cand:
            b = __builtin_ctzll(cand)
            cand &= cand - 1
            u = w * 64 + b
            c = 0
            for k in range(nw):
                c += __builtin_popcountll(p[k] & adj[u * nw + k])
            if c > bestc:
                bestc = c
                best = u
    np_ = <uint64_t*> malloc(2 * nw * sizeof(uint64_t))
    nx = np_ + nw
    try:
        for w in range(nw):
            cand = p[w] & ~adj[best * nw + w]
            while cand:
                b = __builtin_ctzll(cand)
                cand &= cand - 1
                v = w * 64 + b
                for k in range(nw):
                    np_[k] = p[k] & adj[v * nw + k]
                    nx[k] = x[k] & adj[v * nw + k]
                r[rlen] = v
                _bk(adj, nw, np_, nx, r, rlen + 1, out)
                p[w] &= ~((<uint64_t> 1) << b)
                x[w] |= (<uint64_t> 1) << b
    finally:
        free(np_)


def maximal_cliques(adj):
    """All maximal cliques of an undirected graph given as a boolean matrix."""
    cdef cnp.ndarray[cnp.uint8_t, ndim=2, cast=True] a = np.ascontiguousarray(adj, dtype=bool)
    cdef int n = a.shape[0]
    cdef int nw = (n + 63) // 64
    cdef int i, j
    cdef list out = []
    if n == 0:
        return out
    cdef uint64_t* bits = <uint64_t*> malloc((n + 2) * nw * sizeof(uint64_t))
    cdef int* r = <int*> malloc((n + 1) * sizeof(int))
    cdef uint64_t* p = bits + n * nw
    cdef uint64_t* x = p + nw
    try:
        for i in range(n * nw + 2 * nw):
            bits[i] = 0
        for i in range(n):
            for j in range(n):
                if i != j and a[i, j]:
                    bits[i * nw + j // 64] |= (<uint64_t> 1) << (j % 64)
        for j in range(n):
            p[j // 64] |= (<uint64_t> 1) << (j % 64)
        _bk(bits, nw, p, x, r, 0, out)
    finally:
        free(bits)
        free(r)
    return out
