from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hahndefect.fields import (
    FieldDescriptor,
    FieldKind,
    SyntheticElement,
    SyntheticScript,
    Undecidable,
    best_approx,
    contains,
    frobenius_basis,
    insep_defect_exponent,
    metadata_conflicts,
    p_degree,
)
from hahndefect.hahn import HahnSeries, TruncationUnbounded, artin_schreier_root, frobenius_root
from hahndefect.ordgroup import CoordKind, GroupElement, OrderedGroupSpec
from strategies import closed_series

G = GroupElement.of
PH2 = FieldDescriptor.perfect_hull(2)
L0 = FieldDescriptor.laurent(2, 0)
L1 = FieldDescriptor.laurent(2, 1)


def theta2():
    return artin_schreier_root(PH2.element("t^(-1)"))


def synthetic_field(m=1):
    script = SyntheticScript.from_mapping({
        "members": ["c0"],
        "elements": [{"label": "x", "cut": "-1/2-", "degree": 2}],
        "approximations": [
            {"element": "x", "target": "-1", "achieved": "-1"},
            {"element": "x", "target": "-3/4", "achieved": "-3/4"},
        ],
        "eta": [{"element": "x", "label": "y", "value": "-1/2", "purely_inseparable": True, "degree": 2}],
    }, 1)
    return FieldDescriptor.synthetic(2, script, declared_m=m, declared_k=1)


def test_contains_examples():
    assert not contains(PH2.element("t^(1/2)"), L0)
    assert contains(PH2.element("t^(-1/2) + t^(-1/4)"), PH2)
    assert not contains(PH2.element("t^(-1/4)"), L1)
    assert contains(PH2.element("t^(-1/2)"), L1)


def test_contains_closed_tails():
    th = theta2()
    assert not contains(th, PH2)  # unbounded denominators
    assert not contains(th, L1)
    full = FieldDescriptor.full_restricted(OrderedGroupSpec.uniform(2, CoordKind.P_POWER))
    assert contains(th, full)


def test_contains_coefficient_subfield():
    F4 = FieldDescriptor.laurent(2, 0, coeff_degree=2, base_coeff_degree=1)
    assert contains(F4.element("t"), F4)
    assert not contains(F4.element("2*t"), F4)


def test_best_approx_examples():
    th = theta2()
    ap = best_approx(th, PH2, G(Fraction(-1, 100)))
    assert ap.c == HahnSeries.from_terms(PH2.field, 1, th.first_terms(6))
    assert ap.achieved == G(Fraction(-1, 128)) and not ap.attained_max
    ap = best_approx(th, L0, G(Fraction(-1, 100)))
    assert ap.c.is_zero() and ap.achieved == G(Fraction(-1, 2)) and ap.attained_max
    a = PH2.element("t^(-1) + t^(3)")
    ap = best_approx(a, L0, G(10))
    assert ap.c == a and ap.achieved is None and ap.attained_max


def test_best_approx_scripted():
    K = synthetic_field()
    ap = best_approx(SyntheticElement("x"), K, G(Fraction(-7, 8)))
    assert ap.achieved == G(-1)


def test_p_degree_examples():
    assert p_degree(L0) == 1
    assert p_degree(PH2) == 0
    assert p_degree(FieldDescriptor.full_restricted(OrderedGroupSpec.uniform(2, CoordKind.INTEGERS, 2))) == 2


def test_frobenius_basis_is_a_p_basis():
    basis = frobenius_basis(L0)
    assert basis == [G(0), G(1)]
    full = FieldDescriptor.full_restricted(OrderedGroupSpec.uniform(3, CoordKind.INTEGERS, 2))
    assert len(frobenius_basis(full)) == 3 ** p_degree(full)


def test_insep_defect_exponent_examples():
    assert insep_defect_exponent(PH2).m == 0
    assert insep_defect_exponent(L0).m == 0
    assert insep_defect_exponent(synthetic_field(1)).m == 1
    script = SyntheticScript.from_mapping({}, 1)
    with pytest.raises(Undecidable):
        insep_defect_exponent(FieldDescriptor.synthetic(2, script))


def test_metadata_conflicts():
    assert metadata_conflicts(FieldDescriptor.laurent(2, 0, declared_k=1, declared_m=0)) == []
    assert metadata_conflicts(FieldDescriptor.laurent(2, 0, declared_m=1)) != []


def test_synthetic_membership():
    K = synthetic_field()
    assert contains(SyntheticElement("c0"), K)
    assert not contains(SyntheticElement("x"), K)


fields = st.sampled_from([L0, L1, PH2])
caps = st.builds(Fraction, st.integers(-8, 8), st.integers(1, 8)).map(G)


@given(closed_series(2), fields, caps)
def test_truncation_closedness(x, K, cap):
    if not contains(x, K):
        return
    assert contains(x.terms_below(cap), K)


@settings(max_examples=60)
@given(closed_series(2), fields, caps, caps)
def test_monotone_targets(a, K, g1, g2):
    lo, hi = sorted([g1, g2])
    try:
        x, y = best_approx(a, K, lo), best_approx(a, K, hi)
    except TruncationUnbounded:
        return
    if x.achieved is None:
        assert y.achieved is None
    elif y.achieved is not None:
        assert x.achieved <= y.achieved


@settings(max_examples=60)
@given(closed_series(2), fields, caps, st.lists(st.tuples(st.integers(-8, 8), st.integers(0, 1)), max_size=3))
def test_best_approx_optimality(a, K, target, noise):
    try:
        ap = best_approx(a, K, target)
    except TruncationUnbounded:
        return
    # any other element of K: the returned truncation plus K-monomials
    other = ap.c
    for n, lvl in noise:
        e = G(Fraction(n, 2 ** (lvl * K.level if K.kind is FieldKind.LAURENT else lvl)))
        other = other + HahnSeries.monomial(a.field, e, 1)
    if not contains(other, K):
        return
    v = (a - other).valuation()
    if ap.attained_max and ap.achieved is not None:
        assert v is not None and v <= ap.achieved


@given(closed_series(2, tails=False))
def test_perfect_hull_closed_under_frobenius_root(x):
    if contains(x, PH2):
        assert contains(frobenius_root(x), PH2)
