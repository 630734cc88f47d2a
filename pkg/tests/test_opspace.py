import numpy as np
from hypothesis import given, settings, strategies as st

from optensor.opspace import (FieldSample, OpRegion, compute_gamma, gamma_to_json, random_sample,
                              region_outcome, sample_from_csv)


def test_constant_field_is_one_point():
    f = FieldSample({p: (0.5, 1.0) for p in "abcd"})
    assert compute_gamma(f) == {(0.5, 1.0)}


def test_two_distinct_points():
    f = FieldSample({"a": (0.0,), "b": (1.0,)})
    assert len(compute_gamma(f)) == 2


def test_rounding_merges_noise():
    f = FieldSample({"a": (0.1 + 0.2,), "b": (0.3,), "c": (-0.0,), "d": (0.0,)})
    assert compute_gamma(f) == {(0.3,), (0.0,)}


def test_region_extremes():
    g = compute_gamma(random_sample(np.random.default_rng(0), 30, 2))
    assert region_outcome(g, OpRegion.everything()) == g
    assert region_outcome(g, OpRegion.empty()) == frozenset()


def test_unit_box_matches_filter():
    rng = np.random.default_rng(1)
    g = compute_gamma(FieldSample({i: tuple(rng.uniform(-1, 2, 3)) for i in range(50)}))
    box = OpRegion((0, 0, 0), (1, 1, 1))
    want = {s for s in g if all(0 <= x <= 1 for x in s)}
    assert region_outcome(g, box) == want


def test_csv_and_json():
    f = sample_from_csv("id,s1,s2\np,0.25,1\nq,0.5,2\n")
    assert compute_gamma(f) == {(0.25, 1.0), (0.5, 2.0)}
    assert gamma_to_json(compute_gamma(f)) == [[0.25, 1.0], [0.5, 2.0]]


def test_relabel_needs_bijection():
    f = FieldSample({"a": (0.0,), "b": (1.0,)})
    try:
        f.relabel({"a": "x", "b": "x"})
    except ValueError:
        pass
    else:
        raise AssertionError("non-injective relabelling accepted")


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 31), st.integers(1, 40), st.integers(1, 4))
def test_gamma_invariant_under_relabelling(seed, n, k):
    rng = np.random.default_rng(seed)
    f = random_sample(rng, n, k)
    perm = rng.permutation(n)
    g = f.relabel({f"p{i}": f"q{perm[i]}" for i in range(n)})
    assert compute_gamma(g) == compute_gamma(f)
    assert len(compute_gamma(f)) <= n


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2 ** 31))
def test_partition_reconstitutes_gamma(seed):
    rng = np.random.default_rng(seed)
    g = compute_gamma(random_sample(rng, 25, 2))
    cut = float(rng.choice([0.25, 0.5, 0.75]))
    left = region_outcome(g, OpRegion(predicate=lambda s: s[0] < cut))
    right = region_outcome(g, OpRegion(predicate=lambda s: s[0] >= cut))
    assert left | right == g and not (left & right)
