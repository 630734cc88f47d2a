"""Brickwork qubit lattice, regions and typing surfaces.

Qubits sit on ``width`` columns and move through ``height`` layers.  In layer
``t`` the vertex ``(t, j)`` acts on columns ``x, x + 1`` with
``x = 2 j + (t mod 2)``; a column with no partner in a layer idles, so its wire
runs on into the next layer.  Each vertex carries a complete set of two-in,
two-out qubit operations.

Wire ids are positive integers, one per wire segment between vertices.  The
spacetime embedding places layer boundary ``b`` at time ``b * dt`` and column
``c`` at ``(c + 0.5) * dx`` with ``dx <= dt`` so that the lattice's own causal
cone stays inside the light cone.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .circuit import CompleteSet, Fragment, Operation, contract
from .errors import BadRegion
from .physicality import from_channel
from .samplers import random_unitary
from .tensor import (DEFAULT_TOL, IN, OUT, OperatorTensor, Tolerances, Wire, WireType,
                     operator_from_json, operator_to_json, tensor_product)

QUBIT = WireType("q", 2)

Vertex = tuple[int, int]


def vertex_columns(v: Vertex) -> tuple[int, int]:
    t, j = v
    x = 2 * j + (t % 2)
    return x, x + 1


def lattice_vertices(width: int, height: int) -> list[Vertex]:
    out = []
    for t in range(height):
        j = 0
        while vertex_columns((t, j))[1] < width:
            out.append((t, j))
            j += 1
    return out


@dataclass(frozen=True)
class _Geometry:
    # per vertex: (input ids, output ids) in column order
    ports: dict
    # id -> (column, first boundary, last boundary)
    segments: dict


def _geometry(width: int, height: int) -> _Geometry:
    seg = [[0] * (height + 1) for _ in range(width)]
    nxt = 1
    span = {}
    for c in range(width):
        seg[c][0] = nxt
        span[nxt] = [c, 0, 0]
        nxt += 1
    ports = {}
    for t in range(height):
        active = set()
        for v in lattice_vertices(width, height):
            if v[0] != t:
                continue
            a, b = vertex_columns(v)
            active |= {a, b}
            ins = (seg[a][t], seg[b][t])
            for c in (a, b):
                seg[c][t + 1] = nxt
                span[nxt] = [c, t + 1, t + 1]
                nxt += 1
            ports[v] = (ins, (seg[a][t + 1], seg[b][t + 1]))
        for c in range(width):
            if c not in active:
                seg[c][t + 1] = seg[c][t]
                span[seg[c][t]][2] = t + 1
    return _Geometry(ports, {k: tuple(v) for k, v in span.items()})


def lattice_ports(width: int, height: int) -> dict:
    """Vertex -> (input ids, output ids), both in column order."""
    return dict(_geometry(width, height).ports)


@dataclass(frozen=True)
class LatticeSpec:
    width: int
    height: int
    operations: Mapping[Vertex, CompleteSet]
    L: float = 1.0

    def __post_init__(self):
        if self.width < 2 or self.height < 1:
            raise ValueError("lattice needs width >= 2 and height >= 1")
        geo = _geometry(self.width, self.height)
        missing = set(geo.ports) - set(self.operations)
        if missing:
            raise ValueError(f"no operations for vertices {sorted(missing)}")
        for v, cs in self.operations.items():
            if v not in geo.ports:
                raise ValueError(f"vertex {v} is not on the lattice")
            ins, outs = geo.ports[v]
            for op in cs.operators:
                got_in = sorted(w.id for w in op.inputs)
                got_out = sorted(w.id for w in op.outputs)
                if got_in != sorted(ins) or got_out != sorted(outs):
                    raise ValueError(f"vertex {v} operator wires {got_in}->{got_out}, "
                                     f"expected {list(ins)}->{list(outs)}")
        object.__setattr__(self, "_geo", geo)

    @property
    def vertices(self) -> list[Vertex]:
        return sorted(self._geo.ports)

    def ports(self, v: Vertex) -> tuple[tuple[int, int], tuple[int, int]]:
        return self._geo.ports[v]

    @property
    def dt(self) -> float:
        return self.L / self.height

    @property
    def dx(self) -> float:
        return min(self.L / self.width, self.dt)

    def vertex_position(self, v: Vertex) -> tuple[float, float]:
        a, _ = vertex_columns(v)
        return ((v[0] + 0.5) * self.dt, (a + 1.0) * self.dx)

    def wire_position(self, wid: int, orientation: str) -> tuple[float, float]:
        """Where a wire meets a region: its late end as an input, its early end as an output."""
        c, b0, b1 = self._geo.segments[wid]
        b = b1 if orientation == IN else b0
        return (b * self.dt, (c + 0.5) * self.dx)


@dataclass(frozen=True)
class RegionSpec:
    vertices: frozenset

    def __init__(self, vertices: Iterable[Vertex]):
        object.__setattr__(self, "vertices", frozenset(tuple(v) for v in vertices))

    @classmethod
    def full(cls, lat: LatticeSpec) -> "RegionSpec":
        return cls(lat.vertices)


@dataclass(frozen=True)
class TypingSurface:
    """Oriented wires crossing a region boundary: ``+1`` for outputs, ``-1`` for inputs."""

    elements: frozenset
    positions: Mapping[int, tuple[float, float]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        ids = [i for i, _ in self.elements]
        if len(ids) != len(set(ids)):
            raise ValueError("each element carries exactly one direction")
        if any(d not in (1, -1) for _, d in self.elements):
            raise ValueError("directions are +1 or -1")

    @property
    def plus(self) -> frozenset:
        return frozenset(i for i, d in self.elements if d == 1)

    @property
    def minus(self) -> frozenset:
        return frozenset(i for i, d in self.elements if d == -1)

    def reversed(self) -> "TypingSurface":
        return TypingSurface(frozenset((i, -d) for i, d in self.elements), self.positions)

    def __or__(self, other: "TypingSurface") -> "TypingSurface":
        return TypingSurface(self.elements | other.elements,
                             {**self.positions, **other.positions})


def composite_surface(c: TypingSurface, a: TypingSurface, b: TypingSurface) -> TypingSurface:
    return c | a.reversed() | b.reversed()


def _check_region(lat: LatticeSpec, reg: RegionSpec) -> list[Vertex]:
    if not reg.vertices:
        raise BadRegion("region is empty")
    bad = reg.vertices - set(lat.vertices)
    if bad:
        raise BadRegion(f"vertices {sorted(bad)} are not on the lattice")
    # causal convexity: no path leaves the region and comes back
    producer = {}
    for v in lat.vertices:
        for w in lat.ports(v)[1]:
            producer[w] = v
    succ = {v: [] for v in lat.vertices}
    for v in lat.vertices:
        for w in lat.ports(v)[0]:
            if w in producer:
                succ[producer[w]].append(v)
    reach_out = set()
    stack = [u for v in reg.vertices for u in succ[v] if u not in reg.vertices]
    while stack:
        u = stack.pop()
        if u in reach_out:
            continue
        reach_out.add(u)
        if u in reg.vertices:
            raise BadRegion(f"region is not causally convex at vertex {u}")
        stack.extend(succ[u])
    return sorted(reg.vertices)


def region_surface(lat: LatticeSpec, reg: RegionSpec) -> TypingSurface:
    verts = _check_region(lat, reg)
    ins, outs = set(), set()
    for v in verts:
        i, o = lat.ports(v)
        ins |= set(i)
        outs |= set(o)
    elements = {(w, -1) for w in ins - outs} | {(w, 1) for w in outs - ins}
    pos = {w: lat.wire_position(w, IN if d == -1 else OUT) for w, d in elements}
    return TypingSurface(frozenset(elements), pos)


def build_region_operator(lat: LatticeSpec, reg: RegionSpec,
                          outcomes: Mapping[Vertex, int] | None = None,
                          tol: Tolerances = DEFAULT_TOL) -> OperatorTensor:
    """Contract the operators of a region over its interior wires.

    ``outcomes`` picks a member of each vertex's complete set; vertices left
    out contribute the sum over the set (the coarse-grained operation).
    Open wires come out ordered outputs first, then inputs, each by id.
    """
    verts = _check_region(lat, reg)
    outcomes = outcomes or {}
    nodes = []
    for v in verts:
        cs = lat.operations[v]
        if v in outcomes:
            nodes.append(cs.members[outcomes[v]].operator)
        else:
            ops = cs.operators
            acc = ops[0]
            for op in ops[1:]:
                acc = acc + op.reorder(acc.ids)
            nodes.append(acc)
    if len(nodes) == 1:
        a = nodes[0]
    else:
        a = contract(Fragment.from_ids(nodes), tol=tol)
    order = sorted(w.id for w in a.outputs) + sorted(w.id for w in a.inputs)
    return a.reorder(order)


# -- constructors -------------------------------------------------------

def channel_set(kraus, ins, outs, name: str = "u") -> CompleteSet:
    op = from_channel(kraus, inputs=list(ins), outputs=list(outs))
    return CompleteSet((Operation(name, None, frozenset({0}), op),), frozenset({0}))


def instrument_set(kraus_sets, ins, outs, name: str = "m") -> CompleteSet:
    members = tuple(Operation(name, None, frozenset({k}),
                              from_channel(ks, inputs=list(ins), outputs=list(outs)))
                    for k, ks in enumerate(kraus_sets))
    return CompleteSet(members, frozenset(range(len(members))))


def unitary_lattice(width: int, height: int, rng=None, L: float = 1.0) -> LatticeSpec:
    """Random two-qubit unitaries at every vertex (identity gates if ``rng`` is None)."""
    geo = _geometry(width, height)
    ops = {}
    for v, (ins, outs) in sorted(geo.ports.items()):
        u = np.eye(4) if rng is None else random_unitary(4, rng)
        ops[v] = channel_set(u, ins, outs)
    return LatticeSpec(width, height, ops, L)


def identity_lattice(width: int, height: int, L: float = 1.0) -> LatticeSpec:
    return unitary_lattice(width, height, None, L)


def signaling_toy(s: float, out_id: int, in_id: int) -> OperatorTensor:
    """``(I + s Z x Z) / 2`` on an output ``out_id`` and input ``in_id``.

    The output's statistics depend on what is fed into the input, so when the
    output lies in the input's past the operator signals backwards in time.
    """
    z = np.diag([1.0, -1.0])
    m = (np.eye(4) + s * np.kron(z, z)) / 2
    return OperatorTensor([Wire(QUBIT, out_id, OUT), Wire(QUBIT, in_id, IN)], m)


def inject(a: OperatorTensor, extra: OperatorTensor) -> OperatorTensor:
    out = tensor_product(a, extra)
    order = sorted(w.id for w in out.outputs) + sorted(w.id for w in out.inputs)
    return out.reorder(order)


# -- JSON -----------------------------------------------------------------

def lattice_to_json(lat: LatticeSpec) -> dict:
    verts = []
    for v in lat.vertices:
        cs = lat.operations[v]
        verts.append({"t": v[0], "j": v[1],
                      "operators": [operator_to_json(op) for op in cs.operators]})
    return {"width": lat.width, "height": lat.height, "L": lat.L, "vertices": verts}


def lattice_from_json(data: dict, base_dir=None, tol: Tolerances = DEFAULT_TOL) -> LatticeSpec:
    """Lattice dimensions plus, per vertex, operators given inline or as file paths.

    ``"default": "identity"`` fills vertices that are not listed with identity gates.
    """
    width, height = int(data["width"]), int(data["height"])
    L = float(data.get("L", 1.0))
    geo = _geometry(width, height)
    ops = {}
    for entry in data.get("vertices", []):
        v = (int(entry["t"]), int(entry["j"]))
        members = []
        for k, ref in enumerate(entry["operators"]):
            if isinstance(ref, str):
                path = ref if base_dir is None else os.path.join(base_dir, ref)
                with open(path, encoding="utf-8") as fh:
                    ref = json.load(fh)
            members.append(Operation(f"v{v[0]}_{v[1]}", None, frozenset({k}),
                                     operator_from_json(ref, tol)))
        ops[v] = CompleteSet(tuple(members), frozenset(range(len(members))))
    if data.get("default") == "identity":
        for v, (ins, outs) in geo.ports.items():
            if v not in ops:
                ops[v] = channel_set(np.eye(4), ins, outs)
    return LatticeSpec(width, height, ops, L)


def region_from_json(data: dict | None, lat: LatticeSpec) -> RegionSpec:
    if not data or data.get("vertices") in (None, "all"):
        return RegionSpec.full(lat)
    return RegionSpec([tuple(v) for v in data["vertices"]])
