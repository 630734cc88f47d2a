"""Lattice regions with and without a fixed preparation, and their probability tables."""
from __future__ import annotations

import itertools

import numpy as np

from oracles import Register, product_state
from samplers_ref import kraus, unitary
from optensor.causaloid import ProbabilityTable
from optensor.circuit import Fragment, contract
from optensor.lattice import (LatticeSpec, RegionSpec, build_region_operator, channel_set,
                              instrument_set, lattice_ports, vertex_columns)
from optensor.physicality import from_effect, from_state

PLUS = np.full((2, 2), 0.5)
PLUS_I = np.array([[0.5, -0.5j], [0.5j, 0.5]])
TOMOGRAPHIC = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), PLUS, PLUS_I]


def _replace_legs(ks, legs, sigma):
    """Precompose two-qubit Kraus operators with discard-and-prepare ``sigma`` on ``legs``."""
    if not legs:
        return list(ks)
    vals, vecs = np.linalg.eigh(sigma)
    pre = []
    for a in range(2):
        for j in range(2):
            r = np.sqrt(max(vals[a], 0.0)) * np.outer(vecs[:, a], np.eye(2)[j])
            pre.append(r)
    singles = [np.eye(2)[None]] * 2
    for leg in legs:
        singles[leg] = np.array(pre)
    out = []
    for k in ks:
        for r0 in singles[0]:
            for r1 in singles[1]:
                out.append(k @ np.kron(r0, r1))
    return out


class HeraldCase:
    def __init__(self, rng, fixed: bool):
        self.width = int(rng.integers(2, 4))
        self.height = int(rng.integers(1, 3))
        self.ports = lattice_ports(self.width, self.height)
        verts = sorted(self.ports)
        produced = {w for _, o in self.ports.values() for w in o}
        self.meter = verts[int(rng.integers(len(verts)))]
        self.kraus = {}
        for v in verts:
            ins = self.ports[v][0]
            legs = [k for k, w in enumerate(ins) if w not in produced] if fixed else []
            sigma = np.diag([1.0, 0.0]) if rng.random() < 0.5 else _rand_state(rng)
            if v == self.meter:
                sets = []
                for _ in range(2):
                    ks = kraus(4, rng, 2)
                    sets.append([_replace_legs([k], legs, sigma) for k in ks])
                self.kraus[v] = sets
            else:
                self.kraus[v] = _replace_legs([unitary(4, rng)], legs, sigma)
        self.inputs = sorted({w for i, _ in self.ports.values() for w in i} - produced)
        self.outputs = sorted(produced - {w for i, _ in self.ports.values() for w in i})

    def lattice(self, setting: int) -> LatticeSpec:
        ops = {}
        for v, (ins, outs) in self.ports.items():
            if v == self.meter:
                ops[v] = instrument_set(self.kraus[v][setting], ins, outs)
            else:
                ops[v] = channel_set(np.array(self.kraus[v]), ins, outs)
        return LatticeSpec(self.width, self.height, ops)

    def columns(self):
        return list(itertools.product(range(len(TOMOGRAPHIC)), repeat=len(self.inputs)))

    def table(self) -> ProbabilityTable:
        rows, vals = [], []
        cols = self.columns()
        for s in range(2):
            lat = self.lattice(s)
            reg = RegionSpec.full(lat)
            ops = [build_region_operator(lat, reg, {self.meter: o}) for o in range(2)]
            block = []
            for a in ops:
                block.append([self._prob(a, col) for col in cols])
            for o in range(2):
                rows.append(f"{o}|{s}")
                vals.append(block[o])
            rows.append(f"*|{s}")
            vals.append(list(np.sum(block, axis=0)))
        labels = tuple("c" + "".join(map(str, c)) + "|x" for c in cols)
        return ProbabilityTable(tuple(rows), labels, np.array(vals))

    def _prob(self, a, col) -> float:
        nodes = [a]
        for w, k in zip(self.inputs, col):
            nodes.append(from_state(TOMOGRAPHIC[k], outputs=[w]))
        for w in self.outputs:
            nodes.append(from_effect(np.eye(2), inputs=[w]))
        return contract(Fragment.from_ids(nodes))

    def oracle(self, setting: int, outcome, col) -> float:
        """Probability from a direct Schrodinger-picture simulation of the columns."""
        states = [np.eye(2) / 2] * self.width
        wire_col = {}
        for v, (ins, _) in self.ports.items():
            a, b = vertex_columns(v)
            wire_col[ins[0]], wire_col[ins[1]] = a, b
        for w, k in zip(self.inputs, col):
            states[wire_col[w]] = TOMOGRAPHIC[k]
        reg = Register(product_state(states))
        for v in sorted(self.ports):
            ks = self.kraus[v]
            if v == self.meter:
                ks = [k for o in (range(2) if outcome is None else [outcome])
                      for k in ks[setting][o]]
            reg.apply(ks, vertex_columns(v))
        return reg.probability()


def _rand_state(rng):
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    r = g @ g.conj().T
    return r / np.trace(r).real
