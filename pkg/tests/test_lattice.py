import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import Register, product_state
from samplers_ref import density, kraus, povm_element
from optensor.circuit import Fragment, contract
from optensor.errors import BadRegion
from optensor.lattice import (LatticeSpec, RegionSpec, TypingSurface, build_region_operator,
                              composite_surface, identity_lattice, instrument_set, lattice_from_json,
                              lattice_ports, lattice_to_json, lattice_vertices, region_from_json,
                              region_surface, signaling_toy, unitary_lattice, vertex_columns)
from optensor.physicality import check_complete_set, check_physical, from_channel, from_effect, from_state
from optensor.tensor import IN, OUT


def column_wires(lat, boundary):
    """Wire ids in column order crossing the first (``0``) or last layer boundary."""
    ports = lattice_ports(lat.width, lat.height)
    ins = {}
    outs = {}
    for v, (i, o) in ports.items():
        for c, w in zip(vertex_columns(v), i):
            ins.setdefault(c, (v[0], w))
            if v[0] < ins[c][0]:
                ins[c] = (v[0], w)
        for c, w in zip(vertex_columns(v), o):
            if c not in outs or v[0] > outs[c][0]:
                outs[c] = (v[0], w)
    table = ins if boundary == 0 else outs
    return [table[c][1] for c in range(lat.width)]


def random_instrument_lattice(width, height, rng):
    """Two-outcome instruments everywhere, plus the Kraus data for the oracle."""
    ops, data = {}, {}
    for v, (ins, outs) in lattice_ports(width, height).items():
        ks = kraus(4, rng, 3)
        data[v] = [ks[:1], ks[1:]]
        ops[v] = instrument_set([np.array(b) for b in data[v]], ins, outs)
    return LatticeSpec(width, height, ops), data


def test_vertex_layout():
    assert lattice_vertices(4, 2) == [(0, 0), (0, 1), (1, 0)]
    assert vertex_columns((1, 0)) == (1, 2)
    ports = lattice_ports(4, 2)
    # the middle vertex of layer 1 reads the outputs of both layer-0 vertices
    assert set(ports[(1, 0)][0]) <= set(ports[(0, 0)][1]) | set(ports[(0, 1)][1])


def test_single_vertex_unchanged():
    lat = unitary_lattice(4, 2, np.random.default_rng(0))
    v = (0, 1)
    got = build_region_operator(lat, RegionSpec([v]))
    want = lat.operations[v].operators[0].reorder(got.ids)
    assert np.array_equal(got.matrix, want.matrix)


def test_identity_block_is_identity_channel():
    lat = identity_lattice(4, 2)
    a = build_region_operator(lat, RegionSpec.full(lat))
    ins, outs = column_wires(lat, 0), column_wires(lat, 1)
    want = from_channel(np.eye(16), inputs=ins, outputs=outs).reorder(a.ids)
    assert np.max(np.abs(a.matrix - want.matrix)) <= 1e-12


def test_random_region_closure_matches_oracle():
    rng = np.random.default_rng(1)
    lat, ks = random_instrument_lattice(4, 3, rng)
    outcome = {v: int(rng.integers(2)) for v in lat.vertices}
    a = build_region_operator(lat, RegionSpec.full(lat), outcome)
    rhos = [density(2, rng) for _ in range(4)]
    e = povm_element(16, rng)
    ins, outs = column_wires(lat, 0), column_wires(lat, 1)
    nodes = [a] + [from_state(r, outputs=[w]) for r, w in zip(rhos, ins)]
    nodes.append(from_effect(e, inputs=outs))
    p = contract(Fragment.from_ids(nodes))

    reg = Register(product_state(rhos))
    for v in sorted(lat.vertices):
        reg.apply(ks[v][outcome[v]], list(vertex_columns(v)))
    assert abs(p - reg.prob(e, range(4))) <= 1e-9


def test_six_qubit_closed_circuit():
    rng = np.random.default_rng(2)
    width, height = 6, 3
    lat, ks = random_instrument_lattice(width, height, rng)
    outcome = {v: int(rng.integers(2)) for v in lat.vertices}
    ins, outs = column_wires(lat, 0), column_wires(lat, 1)
    rhos = [density(2, rng) for _ in range(width)]
    es = [povm_element(2, rng) for _ in range(width)]
    nodes = [lat.operations[v].members[outcome[v]].operator for v in lat.vertices]
    nodes += [from_state(r, outputs=[w]) for r, w in zip(rhos, ins)]
    nodes += [from_effect(e, inputs=[w]) for e, w in zip(es, outs)]
    p = contract(Fragment.from_ids(nodes))

    reg = Register(product_state(rhos))
    for v in sorted(lat.vertices):
        reg.apply(ks[v][outcome[v]], list(vertex_columns(v)))
    e = product_state(es)
    assert abs(p - reg.prob(e, range(width))) <= 1e-9


def test_non_convex_region_rejected():
    lat = identity_lattice(4, 3)
    with pytest.raises(BadRegion):
        build_region_operator(lat, RegionSpec([(0, 0), (2, 0)]))
    with pytest.raises(BadRegion):
        build_region_operator(lat, RegionSpec([]))
    with pytest.raises(BadRegion):
        build_region_operator(lat, RegionSpec([(9, 9)]))


def test_region_surface_signs():
    lat = identity_lattice(4, 2)
    s = region_surface(lat, RegionSpec.full(lat))
    assert s.minus == set(column_wires(lat, 0))
    assert s.plus == set(column_wires(lat, 1))
    # inputs sit at their late end, outputs at their early end; the idle edge
    # columns of layer 1 start one boundary before the middle pair
    assert all(s.positions[w][0] == 0.0 for w in s.minus)
    times = sorted(s.positions[w][0] for w in s.plus)
    assert times == pytest.approx([0.5, 0.5, 1.0, 1.0])
    assert all(s.positions[w] == lat.wire_position(w, OUT) for w in s.plus)


def test_typing_surface_algebra():
    a = TypingSurface(frozenset({(1, 1), (2, -1)}))
    b = TypingSurface(frozenset({(3, 1)}))
    c = TypingSurface(frozenset({(4, -1)}))
    assert a.reversed().reversed() == a
    assert a.reversed().plus == a.minus
    assert composite_surface(c, a, b).elements == frozenset({(4, -1), (1, -1), (2, 1), (3, -1)})
    with pytest.raises(ValueError):
        TypingSurface(frozenset({(1, 1), (1, -1)}))


def test_json_round_trip(tmp_path):
    lat = unitary_lattice(4, 2, np.random.default_rng(3))
    data = json.loads(json.dumps(lattice_to_json(lat)))
    back = lattice_from_json(data)
    a = build_region_operator(lat, RegionSpec.full(lat))
    b = build_region_operator(back, region_from_json({"vertices": "all"}, back))
    assert np.max(np.abs(a.matrix - b.reorder(a.ids).matrix)) <= 1e-12
    # operators may also live in separate files, with identity gates elsewhere
    (tmp_path / "u.json").write_text(json.dumps(data["vertices"][0]["operators"][0]))
    ref = {"width": 4, "height": 2, "default": "identity",
           "vertices": [{"t": 0, "j": 0, "operators": ["u.json"]}]}
    part = lattice_from_json(ref, base_dir=tmp_path)
    assert np.array_equal(part.operations[(0, 0)].operators[0].matrix,
                          lat.operations[(0, 0)].operators[0].matrix)


def test_wrong_vertex_wires_rejected():
    lat = identity_lattice(4, 2)
    ops = dict(lat.operations)
    ops[(0, 0)], ops[(0, 1)] = ops[(0, 1)], ops[(0, 0)]
    with pytest.raises(ValueError):
        LatticeSpec(4, 2, ops)


def test_signaling_toy_alone_is_a_channel():
    # on its own it is a dephasing channel from the input to the output; it only
    # signals backwards once the output is placed in the input's past
    t = signaling_toy(1.0, 1, 2)
    assert check_physical(t).physical
    assert [w.orientation for w in t.wires] == [OUT, IN]


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(2, 4), st.integers(1, 3))
def test_region_operators_are_physical_and_complete(seed, width, height):
    rng = np.random.default_rng(seed)
    lat, _ = random_instrument_lattice(width, height, rng)
    reg = RegionSpec.full(lat)
    for v in lat.vertices:
        assert check_complete_set(lat.operations[v].operators)
    a = build_region_operator(lat, reg, {v: int(rng.integers(2)) for v in lat.vertices})
    assert check_physical(a).physical
    # summing every vertex over its complete set gives a deterministic channel
    assert check_physical(build_region_operator(lat, reg)).physical
