import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import brute_foliations
from optensor.causet import (MINKOWSKI, CausalSet, Rectangle, SpacetimeBackground, causal_set,
                             cut_lattice, generate_foliations, sprinkle, tau_gauge_equivalent)
from optensor.errors import NoFoliation, TooSparse

UNIT = Rectangle()


def test_grid_four_points():
    cs = sprinkle(MINKOWSKI, UNIT, 0.5, mode="grid")
    assert cs.size == 4
    # points (0.25, 0.25), (0.25, 0.75), (0.75, 0.25), (0.75, 0.75): the separations
    # from the early pair to the late pair are null or timelike, the rest spacelike
    want = np.zeros((4, 4), dtype=bool)
    want[0, 2] = want[0, 3] = want[1, 2] = want[1, 3] = True
    assert np.array_equal(cs.order, want)


def test_empty_region_is_too_sparse():
    with pytest.raises(TooSparse):
        sprinkle(MINKOWSKI, Rectangle(0, 0.1, 0, 0.1), 1.0, mode="grid")
    with pytest.raises(ValueError):
        sprinkle(MINKOWSKI, UNIT, 0.0)


def test_two_chain_one_foliation():
    cs = causal_set([(0.0, 0.0), (1.0, 0.0)])
    assert cs.wires() == [(0, 1)]
    fols = generate_foliations(cs)
    assert len(fols) == 1 and fols[0].N == 1


def test_two_antichain_cut_holds_both():
    cs = causal_set([(0.0, 0.0), (0.0, 1.0)])
    fols = generate_foliations(cs)
    assert [f.cuts for f in fols] == [((0, 1),)]


def _diamond():
    return causal_set([(0.0, 0.0), (1.0, -0.5), (1.0, 0.5), (2.0, 0.0)])


def test_diamond_matches_brute_force():
    cs = _diamond()
    wires = cs.wires()
    lat = cut_lattice(cs)
    brute = brute_foliations(cs.wire_order(wires))
    got = {tuple(frozenset(c) for c in f.cuts) for f in generate_foliations(cs)}
    assert got == set(brute)
    assert len(got) == 2
    assert {frozenset(c) for c in lat.cuts} == {c for f in brute for c in f}


def test_no_points_no_foliation():
    with pytest.raises(NoFoliation):
        generate_foliations(CausalSet(np.zeros((0, 2)), np.zeros((0, 0), dtype=bool)))


def test_poisson_count():
    l = 0.1
    mean = UNIT.area / l ** 2
    counts = [sprinkle(MINKOWSKI, UNIT, l, seed=s).size for s in range(100)]
    # the sample mean of 100 Poisson draws has standard deviation sqrt(mean / 100)
    assert abs(np.mean(counts) - mean) <= 3 * np.sqrt(mean / 100)


def test_sprinkle_is_deterministic():
    a = sprinkle(MINKOWSKI, UNIT, 0.2, seed=11)
    b = sprinkle(MINKOWSKI, UNIT, 0.2, seed=11)
    assert np.array_equal(a.points, b.points) and np.array_equal(a.order, b.order)


def test_gauge_examples():
    tau = lambda t, x: (np.ones_like(t), 0.3 * np.ones_like(t))
    pts = np.random.default_rng(0).random((20, 2))
    assert tau_gauge_equivalent(tau, lambda t, x: tuple(2 * v for v in tau(t, x)), pts)
    assert not tau_gauge_equivalent(tau, lambda t, x: tuple(-v for v in tau(t, x)), pts)


def test_spacelike_tau_rejected():
    bg = SpacetimeBackground(lambda t, x: (np.ones_like(t), 2 * np.ones_like(t)))
    with pytest.raises(ValueError):
        causal_set([(0.0, 0.0)], bg)


def test_chain_length_grows_with_density():
    means = []
    for m in (1, 2, 3, 4):
        lengths = []
        for seed in range(6):
            try:
                cs = sprinkle(MINKOWSKI, UNIT, 1.0 / m, seed=seed)
            except TooSparse:
                continue
            lengths += [f.N for f in generate_foliations(cs, chain_limit=200)]
        means.append(np.mean(lengths))
    assert all(b >= a for a, b in zip(means, means[1:]))


seeds = st.integers(0, 2 ** 31)


@settings(max_examples=60, deadline=None)
@given(seeds, st.floats(0.15, 0.5))
def test_sprinkle_is_partial_order(seed, l):
    try:
        cs = sprinkle(MINKOWSKI, UNIT, l, seed=seed)
    except TooSparse:
        return
    assert cs.is_partial_order()


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_same_cone_perturbation_keeps_order(seed):
    rng = np.random.default_rng(seed)
    a, b = rng.uniform(-0.45, 0.45, size=2)

    def tau(t, x):
        # unit time component with |spatial part| < 1 keeps the field timelike
        return np.ones_like(t), a * np.sin(3 * t) + b * np.cos(2 * x)

    pts = sprinkle(MINKOWSKI, UNIT, 0.2, seed=seed).points
    assert tau_gauge_equivalent(MINKOWSKI.tau, tau, pts)
    assert np.array_equal(causal_set(pts).order, causal_set(pts, SpacetimeBackground(tau)).order)


@settings(max_examples=40, deadline=None)
@given(seeds, st.floats(0.25, 0.6))
def test_every_wire_lies_on_some_cut(seed, l):
    try:
        cs = sprinkle(MINKOWSKI, UNIT, l, seed=seed)
    except TooSparse:
        return
    lat = cut_lattice(cs)
    covered = set().union(*map(set, lat.cuts))
    assert covered == set(range(len(lat.wires)))
    # and each maximal chain of cuts visits every wire
    for f in generate_foliations(cs, chain_limit=50):
        assert set().union(*map(set, f.cuts)) == covered
