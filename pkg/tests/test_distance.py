from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahndefect.census import direct_cut
from hahndefect.cuts import (
    EdgeMinus,
    Infinity,
    PrincipalMinus,
    PrincipalPlus,
    Unresolved,
    compare_cuts,
    is_resolved,
    shift_cut,
)
from hahndefect.distance import (
    NO,
    UNKNOWN,
    YES,
    CounterWitness,
    DistanceReport,
    ImmediacyWitness,
    UnresolvedBase,
    distance_of,
    is_weakly_immediate,
    strong_immediacy_witness,
    transport_distance,
    value_set,
)
from hahndefect.fields import BudgetExhausted, FieldDescriptor
from hahndefect.gf import gf
from hahndefect.hahn import HahnSeries, Polynomial, artin_schreier_root
from hahndefect.ordgroup import ConvexSubgroup, GroupElement, Ordering
from strategies import closed_series

G = GroupElement.of


def theta(p, rank=1, rhs="t^(-1)"):
    return artin_schreier_root(FieldDescriptor.perfect_hull(p, rank).element(rhs))


def poly(F, *coeffs):
    return Polynomial(tuple(HahnSeries.constant(F, c) if isinstance(c, int) else c for c in coeffs))


PH2, PH3 = FieldDescriptor.perfect_hull(2), FieldDescriptor.perfect_hull(3)
L0 = FieldDescriptor.laurent(2, 0)


def test_value_set_examples():
    r = value_set(theta(2), PH2, 5)
    assert r.value_prefix == tuple(G(Fraction(-1, 2 ** i)) for i in range(1, 6))
    assert r.weakly_immediate == UNKNOWN
    r = value_set(L0.element("t^(1/2)"), L0, 5)
    assert r.value_prefix == (G(Fraction(1, 2)),) and r.weakly_immediate == NO
    r = value_set(L0.element("t^(-1) + t"), L0, 5)
    assert r.value_prefix[-1] is None and r.weakly_immediate == NO


def test_distance_examples():
    assert distance_of(theta(2), PH2, 8).cut == PrincipalMinus(G(0))
    r = distance_of(theta(2, 2, "t^(-1,0)"), FieldDescriptor.perfect_hull(2, 2), 8)
    assert r.cut == EdgeMinus(ConvexSubgroup(2, 1), G(0, 0))
    assert distance_of(L0.element("t^(1/2)"), L0, 8).cut == PrincipalPlus(G(Fraction(1, 2)))
    assert distance_of(L0.element("t^(3)"), L0, 8).cut == Infinity(1)


def test_weak_immediacy_examples():
    assert is_weakly_immediate(theta(2), PH2, 8) == YES
    assert is_weakly_immediate(L0.element("t^(1/2)"), L0, 8) == NO
    assert is_weakly_immediate(L0.element("t^(-2) + 1"), L0, 8) == NO


def test_report_invariants():
    with pytest.raises(ValueError):
        DistanceReport("a", "K", (G(1), G(0)), PrincipalPlus(G(1)), NO, 2)
    r = distance_of(theta(3), PH3, 6)
    assert r.weakly_immediate == YES and not isinstance(r.cut, PrincipalPlus)


def test_lazy_series_without_certificate_is_unresolved():
    # the square streams its terms but carries no closed-form tail
    sq = theta(3) * theta(3)
    assert not sq.is_closed
    r = distance_of(sq, PH3, 6)
    assert isinstance(r.cut, Unresolved) and r.weakly_immediate == UNKNOWN
    assert len(r.value_prefix) == 6


def test_witness_examples():
    F = gf(3)
    w = strong_immediacy_witness(theta(3), PH3, poly(F, 0, 0, 1), 10)
    assert isinstance(w, ImmediacyWitness)
    assert w.gamma == G(Fraction(-1, 9))
    assert w.fixed_values[1] == G(Fraction(-1, 3))
    w = strong_immediacy_witness(theta(3), PH3, poly(F, 2), 10)
    assert w.gamma == G(Fraction(-1, 3))
    w = strong_immediacy_witness(theta(2), PH2, poly(gf(2), 0, 1), 10)
    assert w.fixed_values[1] == G(0)


def test_witness_needs_approximants():
    with pytest.raises(BudgetExhausted):
        strong_immediacy_witness(theta(3), PH3, poly(gf(3), 0, 1), 1)


def test_counter_witness_when_values_move():
    # f(c_n) = c_n - t^(-3) has value -3, inf, -2, -2 along the truncations
    K = FieldDescriptor.laurent(3, 0)
    a = K.element("t^(-3) + t^(-2) + t^(-1) + 1")
    f = Polynomial((K.element("2*t^(-3)"), HahnSeries.constant(K.field, 1)))
    w = strong_immediacy_witness(a, K, f, 6)
    assert isinstance(w, CounterWitness)
    assert [vals[0] for _, vals in w.history] == [G(-3), None, G(-2), G(-2)]


def test_transport_examples():
    F = gf(3)
    base = distance_of(theta(3), PH3, 12)
    f = poly(F, 0, 0, 1)
    tr = transport_distance(f, base, strong_immediacy_witness(theta(3), PH3, f, 12), 3)
    assert tr.h == 1 and tr.cut == PrincipalMinus(G(Fraction(-1, 3)))
    assert tr.cut == direct_cut(theta(3) * theta(3), PH3, 12)
    c = HahnSeries.monomial(F, G(2), 2)
    lin = Polynomial((HahnSeries.zero(F), c))
    tr = transport_distance(lin, base, strong_immediacy_witness(theta(3), PH3, lin, 12), 3)
    assert tr.cut == shift_cut(base.cut, G(2))
    aff = poly(F, 1, 1)
    tr = transport_distance(aff, base, strong_immediacy_witness(theta(3), PH3, aff, 12), 3)
    assert tr.cut == base.cut


def test_transport_p2_square_uses_h_equal_p():
    f = poly(gf(2), 0, 0, 1)
    base = distance_of(theta(2), PH2, 12)
    tr = transport_distance(f, base, strong_immediacy_witness(theta(2), PH2, f, 12), 2)
    assert tr.h == 2 and tr.cut == PrincipalMinus(G(0))


def test_transport_needs_resolved_base():
    f = poly(gf(2), 0, 1)
    base = value_set(theta(2), PH2, 4)
    w = strong_immediacy_witness(theta(2), PH2, f, 8)
    with pytest.raises(UnresolvedBase):
        transport_distance(f, base, w, 2)


fields = st.sampled_from([FieldDescriptor.laurent(3, 0), FieldDescriptor.laurent(3, 1), PH3])
monomial_exps = st.builds(Fraction, st.integers(-6, 6), st.sampled_from([1, 3, 9]))


@given(closed_series(3), st.integers(4, 10), st.integers(1, 6), fields)
def test_monotone_refinement(a, b1, extra, K):
    r1, r2 = distance_of(a, K, b1), distance_of(a, K, b1 + extra)
    fin1 = [g for g in r1.value_prefix if g is not None]
    fin2 = [g for g in r2.value_prefix if g is not None]
    assert fin2[: len(fin1)] == fin1
    if is_resolved(r1.cut):
        assert r2.cut == r1.cut


@given(closed_series(3))
def test_distance_monotone_in_nested_fields(a):
    chain = [FieldDescriptor.laurent(3, 0), FieldDescriptor.laurent(3, 1), PH3]
    cuts = [distance_of(a, K, 12).cut for K in chain]
    for lo, hi in zip(cuts, cuts[1:]):
        assert compare_cuts(lo, hi) is not Ordering.GREATER


@settings(max_examples=50)
@given(closed_series(3), monomial_exps, st.integers(1, 2), fields)
def test_shift_law(a, e, coeff, K):
    c = HahnSeries.monomial(a.field, G(e), coeff)
    if not K.term_in(G(e), coeff):
        return
    lhs = distance_of(c * a, K, 12).cut
    rhs = shift_cut(distance_of(a, K, 12).cut, G(e))
    assert lhs == rhs
