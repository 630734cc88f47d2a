"""Causal sets in 1+1D Minkowski space and their foliations.

Points are ``(t, x)`` pairs.  The wires of a causal set are its links (covering
relations); an isolated point contributes one degenerate wire of its own.
Wire ``u`` precedes wire ``w`` when ``head(u) <= tail(w)``.  A cut is a maximal
antichain of wires and a foliation is a maximal chain of cuts.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import NoFoliation, TooSparse
from .kernels import covering_relation, maximal_cliques

NULL_SLACK = 1e-12


def _const_tau(t, x):
    return np.ones_like(t), np.zeros_like(t)


@dataclass(frozen=True)
class SpacetimeBackground:
    """Flat metric ``diag(+1, -1)`` with a time-direction field ``tau(t, x)``."""

    tau: Callable = _const_tau

    def tau_at(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(points)
        tt, tx = self.tau(points[:, 0], points[:, 1])
        return np.stack([np.broadcast_to(tt, len(points)), np.broadcast_to(tx, len(points))], 1)

    def validate(self, points: np.ndarray) -> None:
        tau = self.tau_at(points)
        if np.any(tau[:, 0] ** 2 - tau[:, 1] ** 2 <= 0):
            raise ValueError("time direction field must be strictly timelike")

    def precedes(self, p: np.ndarray, q: np.ndarray) -> np.ndarray:
        """Boolean matrix ``out[i, j]``: ``q[j]`` lies in the forward cone of ``p[i]``."""
        p, q = np.atleast_2d(p), np.atleast_2d(q)
        dt = q[None, :, 0] - p[:, None, 0]
        dx = q[None, :, 1] - p[:, None, 1]
        causal = dt * dt - dx * dx >= -NULL_SLACK
        tau = self.tau_at(p)
        forward = tau[:, None, 0] * dt - tau[:, None, 1] * dx > NULL_SLACK
        return causal & forward


MINKOWSKI = SpacetimeBackground()


def tau_gauge_equivalent(tau1: Callable, tau2: Callable, points) -> bool:
    """Whether two time-direction fields point into the same cone at every point."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a = SpacetimeBackground(tau1).tau_at(pts)
    b = SpacetimeBackground(tau2).tau_at(pts)
    return bool(np.all(a[:, 0] * b[:, 0] - a[:, 1] * b[:, 1] > 0))


@dataclass(frozen=True)
class Rectangle:
    t0: float = 0.0
    t1: float = 1.0
    x0: float = 0.0
    x1: float = 1.0

    @property
    def area(self) -> float:
        return (self.t1 - self.t0) * (self.x1 - self.x0)


@dataclass(frozen=True, eq=False)
class CausalSet:
    points: np.ndarray
    order: np.ndarray

    @property
    def size(self) -> int:
        return len(self.points)

    @property
    def links(self) -> np.ndarray:
        return covering_relation(self.order)

    def wires(self) -> list[tuple[int, int]]:
        links = self.links
        ws = [(int(i), int(j)) for i, j in zip(*np.nonzero(links))]
        related = self.order.any(0) | self.order.any(1)
        ws += [(i, i) for i in range(self.size) if not related[i]]
        return sorted(ws)

    def wire_order(self, wires=None) -> np.ndarray:
        wires = self.wires() if wires is None else wires
        if not wires:
            return np.zeros((0, 0), dtype=bool)
        tails = np.array([w[0] for w in wires])
        heads = np.array([w[1] for w in wires])
        le = self.order | np.eye(self.size, dtype=bool)
        return le[heads][:, tails] & ~np.eye(len(wires), dtype=bool)

    def is_partial_order(self) -> bool:
        r = self.order
        if np.any(np.diag(r)) or np.any(r & r.T):
            return False
        ri = r.astype(np.int64)
        return not np.any(((ri @ ri) > 0) & ~r)


def causal_set(points, bg: SpacetimeBackground = MINKOWSKI) -> CausalSet:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(pts):
        bg.validate(pts)
    order = bg.precedes(pts, pts)
    np.fill_diagonal(order, False)
    return CausalSet(pts, order)


def grid_points(region: Rectangle, l: float) -> np.ndarray:
    nt = int(np.floor((region.t1 - region.t0) / l + 1e-9))
    nx = int(np.floor((region.x1 - region.x0) / l + 1e-9))
    if nt < 1 or nx < 1:
        return np.zeros((0, 2))
    ot = region.t0 + ((region.t1 - region.t0) - nt * l) / 2 + l / 2
    ox = region.x0 + ((region.x1 - region.x0) - nx * l) / 2 + l / 2
    t = ot + l * np.arange(nt)
    x = ox + l * np.arange(nx)
    return np.array([(a, b) for a in t for b in x])


def sprinkle(bg: SpacetimeBackground, region: Rectangle, l: float, seed=None,
             mode: str = "sprinkle", rng=None) -> CausalSet:
    """Poisson sprinkling at density ``1/l**2`` (or a regular grid of spacing ``l``)."""
    if l <= 0:
        raise ValueError("characteristic length must be positive")
    if mode == "grid":
        pts = grid_points(region, l)
    elif mode == "sprinkle":
        rng = np.random.default_rng(seed) if rng is None else rng
        n = rng.poisson(region.area / l ** 2)
        u = rng.random((n, 2))
        pts = np.column_stack([region.t0 + u[:, 0] * (region.t1 - region.t0),
                               region.x0 + u[:, 1] * (region.x1 - region.x0)])
        pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if len(pts) == 0:
        raise TooSparse(f"no points for l={l} in {region}")
    return causal_set(pts, bg)


# -- cuts and foliations --------------------------------------------------

@dataclass(frozen=True)
class CutLattice:
    """Maximal antichains of wires, topologically sorted, with covers."""

    causet: CausalSet
    wires: tuple[tuple[int, int], ...]
    cuts: tuple[tuple[int, ...], ...]
    covers: tuple[tuple[int, ...], ...]


def cut_lattice(cs: CausalSet) -> CutLattice:
    wires = cs.wires()
    if not wires:
        raise NoFoliation("causal set has no wires")
    w = cs.wire_order(wires)
    inc = ~(w | w.T)
    np.fill_diagonal(inc, False)
    cuts = maximal_cliques(inc)
    c = len(cuts)
    m = np.zeros((c, len(wires)), dtype=np.float32)
    for k, cut in enumerate(cuts):
        m[k, list(cut)] = 1
    # prec[Y, X]: some wire of Y precedes some wire of X
    prec = ((m @ w.astype(np.float32)) @ m.T) > 0
    le = ~prec.T
    np.fill_diagonal(le, False)
    below = le.sum(0)
    order = np.lexsort((np.arange(c), below))
    cuts = [cuts[i] for i in order]
    le = le[np.ix_(order, order)]
    ups = [int.from_bytes(np.packbits(le[i], bitorder="little").tobytes(), "little")
           for i in range(c)]
    covers = []
    for i in range(c):
        up = ups[i]
        reached = 0
        cand = up
        mine = []
        while cand:
            low = cand & -cand
            j = low.bit_length() - 1
            mine.append(j)
            reached |= ups[j]
            cand = up & ~reached & ~((low << 1) - 1)
        covers.append(tuple(mine))
    return CutLattice(cs, tuple(wires), tuple(tuple(x) for x in cuts), tuple(covers))


def maximal_chains(lat: CutLattice, limit: int | None = None) -> list[tuple[int, ...]]:
    """Every maximal chain of cuts, as sequences of cut indices (earliest first)."""
    has_lower = set(j for cs in lat.covers for j in cs)
    sources = [i for i in range(len(lat.cuts)) if i not in has_lower]
    out: list[tuple[int, ...]] = []

    def walk(path):
        if limit is not None and len(out) >= limit:
            return
        nxt = lat.covers[path[-1]]
        if not nxt:
            out.append(tuple(path))
            return
        for j in nxt:
            walk(path + [j])

    for s in sources:
        walk([s])
    return out


@dataclass(frozen=True)
class Foliation:
    """Time-ordered cuts (earliest first) and the wire partitions they induce.

    ``partitions[k]`` is the set of operator wire ids lying to the future of
    kept cut ``k``; it is empty when no operator is attached.
    """

    cuts: tuple[tuple[int, ...], ...]
    partitions: tuple[frozenset, ...] = ()

    @property
    def N(self) -> int:
        return len(self.partitions) if self.partitions else len(self.cuts)


def _future_ids(cs: CausalSet, heads: Sequence[int], positions: Mapping[int, tuple],
                bg: SpacetimeBackground) -> frozenset:
    if not positions:
        return frozenset()
    ids = list(positions)
    q = np.array([positions[i] for i in ids], dtype=float)
    hpts = cs.points[list(heads)]
    reach = bg.precedes(hpts, q) | (np.abs(hpts[:, None, :] - q[None]).max(-1) < NULL_SLACK)
    hit = reach.any(0)
    return frozenset(i for i, h in zip(ids, hit) if h)


def _collapse(seq):
    out = []
    for p in seq:
        if not out or out[-1] != p:
            out.append(p)
    return out


def generate_foliations(cs: CausalSet, positions: Mapping[int, tuple] | None = None,
                        inputs: Iterable[int] = (), bg: SpacetimeBackground = MINKOWSKI,
                        chain_limit: int | None = None) -> list[Foliation]:
    """Foliations of a causal set, one representative per intersection pattern.

    Without ``positions`` the pattern is the sequence of cuts itself.  With
    ``positions`` (operator wire id -> spacetime point) each cut is mapped to
    the set of wires in the causal future of its heads; a lower boundary cut
    with every wire in the future is prepended, cuts with nothing in the
    future are dropped, repeats are merged, and the foliation is truncated so
    that its first cut is the last one whose past holds only ``inputs``.
    """
    lat = cut_lattice(cs)
    if not lat.cuts:
        raise NoFoliation("no cuts")
    if not positions:
        chains = maximal_chains(lat, chain_limit)
        if not chains:
            raise NoFoliation("no maximal chain of cuts")
        return [Foliation(tuple(lat.cuts[i] for i in ch)) for ch in chains]

    inputs = frozenset(inputs)
    everything = frozenset(positions)
    part = [_future_ids(cs, [lat.wires[w][1] for w in cut], positions, bg) for cut in lat.cuts]
    # suffix patterns per cut, memoised; patterns are tuples of distinct partitions
    memo: dict[int, set] = {}

    def suffixes(i):
        if i in memo:
            return memo[i]
        own = part[i]
        res = set()
        kids = lat.covers[i]
        if not kids:
            res.add((own,) if own else ())
        for j in kids:
            for s in suffixes(j):
                res.add((own,) + s if own and (not s or s[0] != own) else s)
        memo[i] = res
        return res

    has_lower = set(j for c in lat.covers for j in c)
    sources = [i for i in range(len(lat.cuts)) if i not in has_lower]
    patterns: set = set()
    for s in sources:
        for suf in suffixes(s):
            seq = _collapse([everything] + list(suf))
            keep = 0
            for k, fut in enumerate(seq):
                if (everything - fut) <= inputs:
                    keep = k
            patterns.add(tuple(seq[keep:]))
    ordered = sorted(patterns, key=lambda p: (len(p), [sorted(x) for x in p]))
    return [Foliation((), p) for p in ordered]
