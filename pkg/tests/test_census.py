from __future__ import annotations

from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahndefect.census import (
    DIVISIBLE_HULL,
    VALUE_GROUP,
    BoundContext,
    BoundQuery,
    MissingParameter,
    Target,
    bound_value,
    brute_force_distances,
    check_bounds,
    ndd_census,
    same_buckets,
    sample_polynomials,
)
from hahndefect.cli import load_config
from hahndefect.cuts import PrincipalMinus, equal_mod
from hahndefect.fields import FieldDescriptor
from hahndefect.hahn import HahnSeries, Polynomial, artin_schreier_root
from hahndefect.ordgroup import DivisibleHull, GroupElement

G = GroupElement.of
CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def theta_target(p, rhs="t^(-1)", rank=1):
    K = FieldDescriptor.perfect_hull(p, rank)
    return K, Target(f"theta[{rhs}]", artin_schreier_root(K.element(rhs)), p)


def synthetic(name):
    cfg = load_config(CONFIGS / "synthetic.toml")
    return cfg["fields"][name]


def X(F, *coeffs):
    return Polynomial(tuple(HahnSeries.constant(F, c) if isinstance(c, int) else c for c in coeffs))


def test_bound_value_examples():
    assert bound_value(BoundQuery("MT1", trdeg=2)) == 4
    assert bound_value(BoundQuery("nonhens-general", m=1, degree=2, p=2)) == 1
    assert bound_value(BoundQuery("ndd_i", r=1, m=0, i=3)) == 1
    assert bound_value(BoundQuery("r+m", r=1, m=0)) == 1
    assert bound_value(BoundQuery("nddtow", m=2, e=1)) == 2
    assert bound_value(BoundQuery("two_r", r=3)) == 6
    assert bound_value(BoundQuery("idegp")) == 1


def test_bound_query_validation():
    with pytest.raises(MissingParameter):
        bound_value(BoundQuery("r+m", r=1))
    with pytest.raises(ValueError):
        BoundQuery("r+m", r=-1, m=0)
    with pytest.raises(ValueError):
        BoundQuery("no-such-bound")


def test_census_p3_one_bucket():
    K, t = theta_target(3)
    polys = sample_polynomials(K, 50, 2, seed=1)
    assert len(polys) == 50
    rep = ndd_census([t], K, polys, VALUE_GROUP)
    assert rep.ndd_lower == 1


def test_defectless_pair_has_no_buckets():
    L0 = FieldDescriptor.laurent(2, 0)
    t = Target("sqrt-t", FieldDescriptor.laurent(2, 1).element("t^(1/2)"), 2)
    rep = ndd_census([t], L0, sample_polynomials(L0, 10, 1), VALUE_GROUP)
    assert rep.ndd_lower == 0


def test_synthetic_tower_at_most_two_buckets():
    K = synthetic("tower")
    rep = ndd_census(["a1", "a2", "a1a2"], K, modulus=DIVISIBLE_HULL)
    assert rep.ndd_lower <= 2
    rep = check_bounds(rep, BoundContext(m_ext=2, e=1, theorems=("nddtow",)))
    assert rep.verdict("nddtow") == "respected"


def test_brute_force_examples():
    K, t = theta_target(3)
    F = K.field
    sq = brute_force_distances([t], K, [X(F, 0, 0, 1)], 12)
    assert sq[0].cut == PrincipalMinus(G(Fraction(-1, 3)))
    unit = brute_force_distances([t], K, [X(F, 0, 1), X(F, 0, 5)], 12, VALUE_GROUP)
    assert len(unit) == 1 and unit[0].count == 2
    tx = Polynomial((HahnSeries.zero(F), HahnSeries.monomial(F, G(1))))
    shifted = brute_force_distances([t], K, [tx], 12)
    assert shifted[0].cut == PrincipalMinus(G(1))
    assert equal_mod(shifted[0].cut, unit[0].cut, K.value_group())


def test_check_bounds_examples():
    K, t = theta_target(3)
    rep = ndd_census([t], K, sample_polynomials(K, 20, 2), DIVISIBLE_HULL)
    ctx = BoundContext(r=1, m_field=0, i=1, degree=3, p=3, perfect_hull_in_completion=True,
                       theorems=("r+m", "ndd_i", "r+1", "two_r", "idegp"))
    rep = check_bounds(rep, ctx)
    assert all(b.verdict == "respected" for b in rep.bounds)
    gated = check_bounds(rep, BoundContext(r=1, perfect_hull_in_completion=False, theorems=("r+1",)))
    assert gated.verdict("r+1") == "inapplicable"
    pooled = check_bounds(rep, BoundContext(m_ext=1, e=1, extensions=2, theorems=("nddtow",)))
    assert pooled.verdict("nddtow") == "inapplicable"
    vg = check_bounds(ndd_census([t], K, sample_polynomials(K, 5, 2), VALUE_GROUP),
                      BoundContext(r=1, m_field=0, i=1, theorems=("ndd_i",)))
    assert vg.verdict("ndd_i") == "inapplicable"


def test_violation_names_witnesses():
    K = synthetic("bounded")
    rep = ndd_census(["s1", "s2", "s3", "s4"], K, modulus=DIVISIBLE_HULL)
    rep = check_bounds(rep, BoundContext(r=0, m_field=0, i=0, theorems=("ndd_i",)))
    assert rep.verdict("ndd_i") == "violated"
    assert "s1" in rep.bounds[0].note


def test_bounded_runs_respect_ndd_i():
    K = synthetic("bounded")
    for i in (1, 2, 3):
        rep = ndd_census(["s1", "s2", "s3", "s4"], K, modulus=DIVISIBLE_HULL, max_degree_exp=i)
        rep = check_bounds(rep, BoundContext(r=2, m_field=1, i=i, theorems=("ndd_i",)))
        assert rep.verdict("ndd_i") == "respected"


def test_buckets_pairwise_distinct():
    K, t = theta_target(2, "t^(-1,0)", 2)
    _, t2 = theta_target(2, "t^(0,-1)", 2)
    for modulus in (VALUE_GROUP, DIVISIBLE_HULL):
        rep = ndd_census([t, t2], K, sample_polynomials(K, 6, 1), modulus)
        mod = K.value_group() if modulus == VALUE_GROUP else DivisibleHull(2)
        for i, a in enumerate(rep.buckets):
            for b in rep.buckets[i + 1:]:
                assert not equal_mod(a.cut, b.cut, mod)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_oracle_equivalence(seed, p):
    K, t = theta_target(p, "t^(-1) + t^(-2)" if p == 3 else "t^(-1) + t^(-3)")
    polys = sample_polynomials(K, 8, p - 1, seed=seed)
    transport = ndd_census([t], K, polys, VALUE_GROUP).buckets
    direct = brute_force_distances([t], K, polys, 14)
    assert same_buckets(transport, direct)


@settings(max_examples=8, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_hull_count_at_most_value_group_count(seed):
    K, t = theta_target(2, "t^(-1,0)", 2)
    _, t2 = theta_target(2, "t^(0,-1)", 2)
    polys = sample_polynomials(K, 5, 1, seed=seed)
    vg = ndd_census([t, t2], K, polys, VALUE_GROUP)
    dh = ndd_census([t, t2], K, polys, DIVISIBLE_HULL)
    assert dh.ndd_lower <= vg.ndd_lower


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 6), st.integers(1, 6))
def test_enumeration_monotonicity(seed, n1, extra):
    K, t = theta_target(2, "t^(-1,0)", 2)
    _, t2 = theta_target(2, "t^(0,-1)", 2)
    polys = sample_polynomials(K, n1 + extra, 1, seed=seed)
    small = ndd_census([t, t2], K, polys[:n1], DIVISIBLE_HULL)
    big = ndd_census([t, t2], K, polys, DIVISIBLE_HULL)
    assert big.ndd_lower >= small.ndd_lower
    mod = DivisibleHull(2)
    reps = [b.cut for b in big.buckets]
    for b in small.buckets:
        assert sum(equal_mod(b.cut, c, mod) for c in reps) == 1


@settings(max_examples=6, deadline=None)
@given(st.integers(0, 10 ** 6), st.sampled_from([(2, "t^(-1)"), (3, "t^(-1)"), (3, "t^(-1) + t^(-2)"), (5, "t^(-1)")]))
def test_degree_below_p_uniformity(seed, case):
    p, rhs = case
    K, t = theta_target(p, rhs)
    rep = ndd_census([t], K, sample_polynomials(K, 10, p - 1, seed=seed), VALUE_GROUP)
    assert rep.ndd_lower == 1


def test_sample_polynomials_deterministic():
    K = FieldDescriptor.perfect_hull(3)
    a = sample_polynomials(K, 12, 2, seed=4)
    b = sample_polynomials(K, 12, 2, seed=4)
    assert [str(f) for f in a] == [str(f) for f in b]
    assert all(1 <= f.degree <= 2 for f in a)
    assert len({str(f) for f in a}) == 12
