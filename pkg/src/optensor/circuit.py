"""Operations, fragments and circuits, and their contraction.

A link joins an output wire of one node to an input wire of another (or of
the same node).  Contracting a link identifies the output's ket index with
the input's bra index and vice versa, so for two single-wire operators the
result is ``Tr(A @ B)``.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidWiring, NonRealScalar, PhysicalityViolation
from .tensor import (DEFAULT_TOL, OperatorTensor, Tolerances, Wire, operator_from_json,
                     operator_to_json)


@dataclass(frozen=True)
class Operation:
    """Bookkeeping record of a laboratory operation and its operator."""

    name: str
    setting: object
    outcomes: frozenset
    operator: OperatorTensor

    def __post_init__(self):
        if not self.outcomes:
            raise ValueError(f"operation {self.name} has an empty outcome set")

    @property
    def inputs(self):
        return self.operator.inputs

    @property
    def outputs(self):
        return self.operator.outputs


@dataclass(frozen=True)
class CompleteSet:
    members: tuple[Operation, ...]
    all_outcomes: frozenset

    def __post_init__(self):
        seen: set = set()
        settings = {repr(m.setting) for m in self.members}
        if len(settings) > 1:
            raise ValueError("complete set members must share one setting")
        sigs = {tuple(sorted((w.id, w.orientation, w.type) for w in m.operator.wires))
                for m in self.members}
        if len(sigs) > 1:
            raise ValueError("complete set members must share one wire signature")
        for m in self.members:
            if seen & m.outcomes:
                raise ValueError("complete set outcome sets must be disjoint")
            seen |= m.outcomes
        if seen != set(self.all_outcomes):
            raise ValueError("complete set outcome sets must exhaust all outcomes")

    @property
    def operators(self) -> list[OperatorTensor]:
        return [m.operator for m in self.members]


@dataclass(frozen=True)
class Link:
    node_a: int
    wire_a: int
    node_b: int
    wire_b: int


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    wire_id: int
    message: str

    def __str__(self):
        return f"{self.kind} on id {self.wire_id}: {self.message}"


@dataclass(frozen=True)
class Fragment:
    nodes: tuple[OperatorTensor, ...]
    links: tuple[Link, ...]
    # id -> number of occurrences, only recorded for fragments built from ids
    id_usage: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_ids(cls, nodes: Sequence[OperatorTensor]) -> "Fragment":
        """Link every pair of wires on different nodes that share an id."""
        nodes = tuple(nodes)
        where: dict[int, list[int]] = {}
        for n, op in enumerate(nodes):
            for w in op.wires:
                where.setdefault(w.id, []).append(n)
        links = []
        for wid, ns in where.items():
            if len(ns) == 2:
                links.append(Link(ns[0], wid, ns[1], wid))
        return cls(nodes, tuple(links), {k: len(v) for k, v in where.items()})

    @classmethod
    def from_links(cls, nodes, links) -> "Fragment":
        return cls(tuple(nodes), tuple(Link(*map(int, l)) for l in links))

    def open_wires(self) -> list[tuple[int, Wire]]:
        linked = set()
        for l in self.links:
            linked.add((l.node_a, l.wire_a))
            linked.add((l.node_b, l.wire_b))
        return [(n, w) for n, op in enumerate(self.nodes) for w in op.wires
                if (n, w.id) not in linked]

    @property
    def is_circuit(self) -> bool:
        return not self.open_wires()


def validate_wiring(f: Fragment) -> list[Diagnostic]:
    """Return wiring problems; an empty list means the fragment is well formed."""
    diags = []
    for wid, count in sorted(f.id_usage.items()):
        if count > 2:
            diags.append(Diagnostic("multiplicity", wid, f"id used {count} times"))
    used: Counter = Counter()
    for l in f.links:
        ends = []
        for node, wid in ((l.node_a, l.wire_a), (l.node_b, l.wire_b)):
            if not 0 <= node < len(f.nodes):
                diags.append(Diagnostic("unknown-node", wid, f"node {node} does not exist"))
                break
            try:
                ends.append(f.nodes[node].wire(wid))
            except Exception:
                diags.append(Diagnostic("unknown-wire", wid, f"node {node} has no wire {wid}"))
                break
            used[(node, wid)] += 1
        if len(ends) != 2:
            continue
        a, b = ends
        if a.orientation == b.orientation:
            diags.append(Diagnostic("orientation", l.wire_a,
                                    f"link joins two {a.orientation}puts ({a}, {b})"))
        if a.type != b.type:
            diags.append(Diagnostic("type", l.wire_a,
                                    f"{a.type.name}/{a.dim} linked to {b.type.name}/{b.dim}"))
    for (node, wid), count in sorted(used.items()):
        if count > 1:
            diags.append(Diagnostic("multiplicity", wid, f"wire on node {node} in {count} links"))
    open_ids = Counter(w.id for _, w in f.open_wires())
    for wid, count in sorted(open_ids.items()):
        if count > 1:
            diags.append(Diagnostic("open-collision", wid, "open wires share an id"))
    return diags


class _Group:
    """Partially contracted tensor: axes are kets of ``slots`` then their bras."""

    __slots__ = ("array", "slots", "wires")

    def __init__(self, array, slots, wires):
        self.array = array
        self.slots = slots
        self.wires = wires

    @property
    def dim(self) -> int:
        return int(np.prod([w.dim for w in self.wires], dtype=np.int64)) if self.wires else 1


def _contract_groups(groups: list[_Group], links: list[tuple]) -> _Group:
    """Contract one einsum over ``groups`` resolving the given slot links."""
    label: dict = {}
    nxt = 0
    for g in groups:
        for s in g.slots:
            label[("k", s)] = nxt
            label[("b", s)] = nxt + 1
            nxt += 2
    # union of labels: ket(u) == bra(v), bra(u) == ket(v)
    parent = list(range(nxt))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    gone = set()
    for u, v in links:
        parent[find(label[("k", u)])] = find(label[("b", v)])
        parent[find(label[("b", u)])] = find(label[("k", v)])
        gone.add(u)
        gone.add(v)
    operands = []
    slots, wires = [], []
    for g in groups:
        ls = [find(label[("k", s)]) for s in g.slots] + [find(label[("b", s)]) for s in g.slots]
        operands.extend([g.array, ls])
        for s, w in zip(g.slots, g.wires):
            if s not in gone:
                slots.append(s)
                wires.append(w)
    out = [find(label[("k", s)]) for s in slots] + [find(label[("b", s)]) for s in slots]
    # compact labels: einsum sublists want small ints
    remap = {}
    for i in range(1, len(operands), 2):
        operands[i] = [remap.setdefault(x, len(remap)) for x in operands[i]]
    out = [remap[x] for x in out]
    arr = np.einsum(*operands, out, optimize=len(groups) > 1)
    return _Group(arr, slots, wires)


def contract(f: Fragment, order: Sequence[int] | None = None,
             tol: Tolerances = DEFAULT_TOL):
    """Contract a fragment.

    Closed circuits give a real float; fragments give an OperatorTensor on the
    open wires (ordered by node, then by the node's own wire order).  ``order``
    optionally fixes the node merge sequence; the default is greedy by
    smallest intermediate dimension.
    """
    diags = validate_wiring(f)
    if diags:
        raise InvalidWiring(diags)
    groups: dict[int, _Group] = {}
    owner: dict = {}
    pending: list[tuple] = []
    for n, op in enumerate(f.nodes):
        slots = [(n, w.id) for w in op.wires]
        groups[n] = _Group(op.as_array(), slots, list(op.wires))
        for s in slots:
            owner[s] = n
    for l in f.links:
        pending.append(((l.node_a, l.wire_a), (l.node_b, l.wire_b)))

    def links_between(a, b):
        return [p for p in pending if {owner[p[0]], owner[p[1]]} == {a, b}]

    def merge(a, b):
        nonlocal pending
        ls = links_between(a, b)
        g = _contract_groups([groups[a], groups[b]], ls)
        pending = [p for p in pending if p not in ls]
        for s in groups[b].slots:
            owner[s] = a
        del groups[b]
        groups[a] = g

    # self links first (outputs fed back into the same node)
    for n in list(groups):
        ls = [p for p in pending if owner[p[0]] == owner[p[1]] == n]
        if ls:
            groups[n] = _contract_groups([groups[n]], ls)
            pending = [p for p in pending if p not in ls]

    if order is not None:
        order = list(order)
        if sorted(order) != list(range(len(f.nodes))):
            raise ValueError("order must be a permutation of node indices")
        acc = order[0]
        for n in order[1:]:
            merge(acc, n)
    while len(groups) > 1:
        best = None
        keys = sorted(groups)
        for i, a in enumerate(keys):
            for b in keys[i + 1:]:
                ls = links_between(a, b)
                if not ls:
                    continue
                gone = {s for p in ls for s in p}
                size = 1
                for g in (groups[a], groups[b]):
                    for s, w in zip(g.slots, g.wires):
                        if s not in gone:
                            size *= w.dim
                if best is None or size < best[0]:
                    best = (size, a, b)
        if best is None:
            a, b = keys[0], keys[1]
        else:
            _, a, b = best
        merge(a, b)
    (g,) = groups.values()
    if not g.slots:
        value = complex(g.array.reshape(()))
        if abs(value.imag) > tol.eq * max(1.0, abs(value.real)):
            raise NonRealScalar(f"closed circuit evaluated to {value}")
        return float(value.real)
    pos = {(n, w.id): (n, k) for n, op in enumerate(f.nodes) for k, w in enumerate(op.wires)}
    perm = sorted(range(len(g.slots)), key=lambda i: pos[g.slots[i]])
    k = len(perm)
    arr = g.array.transpose(perm + [p + k for p in perm])
    wires = [g.wires[p] for p in perm]
    return OperatorTensor(wires, arr.reshape(g.dim, g.dim), tol=tol, check=False)


def circuit_probability(f: Fragment, tol: Tolerances = DEFAULT_TOL,
                        check_nodes: bool = True) -> float:
    """Probability of a closed circuit of physical operators, clamped to [0, 1]."""
    from .physicality import check_physical

    if not f.is_circuit:
        raise InvalidWiring([Diagnostic("open", w.id, "circuit has open wires")
                             for _, w in f.open_wires()])
    if check_nodes:
        for n, op in enumerate(f.nodes):
            v = check_physical(op, tol)
            if not v.physical:
                raise PhysicalityViolation(f"node {n} is not physical: {v}")
    p = contract(f, tol=tol)
    slack = tol.eq * max(1, len(f.nodes))
    if p < -slack or p > 1 + slack:
        raise PhysicalityViolation(f"circuit probability {p} outside [0, 1]")
    return min(1.0, max(0.0, p))


# -- JSON ---------------------------------------------------------------

def fragment_from_json(data: dict, base_dir=None, tol: Tolerances = DEFAULT_TOL) -> Fragment:
    """``{"nodes": [operator | "path.json"], "links": [[a, ida, b, idb], ...]}``.

    Without a ``links`` key, wires are linked by shared id.
    """
    import os

    nodes = []
    for ref in data["nodes"]:
        if isinstance(ref, str):
            path = ref if base_dir is None else os.path.join(base_dir, ref)
            with open(path, encoding="utf-8") as fh:
                ref = json.load(fh)
        nodes.append(operator_from_json(ref, tol))
    if "links" not in data:
        return Fragment.from_ids(nodes)
    return Fragment.from_links(nodes, data["links"])


def fragment_to_json(f: Fragment) -> dict:
    return {
        "nodes": [operator_to_json(op) for op in f.nodes],
        "links": [[l.node_a, l.wire_a, l.node_b, l.wire_b] for l in f.links],
    }


def contract_dense(f: Fragment, tol: Tolerances = DEFAULT_TOL, max_dim: int = 4096):
    """Reference contraction: ``Tr_linked[(A_1 x ... x A_n) S]`` with ``S`` a swap per link.

    Slow and memory hungry, but shares no code with :func:`contract`.
    """
    diags = validate_wiring(f)
    if diags:
        raise InvalidWiring(diags)
    slots = [(n, w) for n, op in enumerate(f.nodes) for w in op.wires]
    dims = [w.dim for _, w in slots]
    total = int(np.prod(dims)) if dims else 1
    if total > max_dim:
        raise ValueError(f"dense contraction of dimension {total} exceeds {max_dim}")
    big = np.ones((1, 1), dtype=np.complex128)
    for op in f.nodes:
        big = np.kron(big, op.matrix)
    where = {(n, w.id): k for k, (n, w) in enumerate(slots)}
    # permutation of tensor factors realised by all the link swaps
    perm = list(range(len(slots)))
    for l in f.links:
        a, b = where[(l.node_a, l.wire_a)], where[(l.node_b, l.wire_b)]
        perm[a], perm[b] = perm[b], perm[a]
    eye = np.eye(total).reshape(dims + dims)
    k = len(dims)
    swap = eye.transpose(list(range(k)) + [k + p for p in perm]).reshape(total, total)
    prod = (big @ swap).reshape(dims + dims)
    linked = sorted({where[(l.node_a, l.wire_a)] for l in f.links}
                    | {where[(l.node_b, l.wire_b)] for l in f.links})
    for i in sorted(linked, reverse=True):
        prod = np.trace(prod, axis1=i, axis2=i + prod.ndim // 2)
    open_slots = [s for i, s in enumerate(slots) if i not in linked]
    if not open_slots:
        value = complex(np.asarray(prod).reshape(()))
        if abs(value.imag) > tol.eq * max(1.0, abs(value.real)):
            raise NonRealScalar(f"closed circuit evaluated to {value}")
        return float(value.real)
    d = int(np.prod([w.dim for _, w in open_slots]))
    return OperatorTensor([w for _, w in open_slots], prod.reshape(d, d), tol=tol, check=False)
