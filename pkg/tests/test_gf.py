from __future__ import annotations

import pytest

from hahndefect.gf import gf


@pytest.mark.parametrize("p,d", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (2, 3)])
def test_field_axioms(p, d):
    F = gf(p, d)
    xs = list(F.elements())
    assert len(xs) == p ** d
    for x in xs:
        assert F.add(x, F.neg(x)) == 0
        if x:
            assert F.mul(x, F.inv(x)) == 1
        assert F.frob_inv(F.frob(x)) == x
    for x in xs[:6]:
        for y in xs[:6]:
            for z in xs[:4]:
                assert F.mul(x, F.add(y, z)) == F.add(F.mul(x, y), F.mul(x, z))


def test_frobenius_is_a_bijection():
    F = gf(2, 2)
    assert sorted(F.frob(x) for x in F.elements()) == list(F.elements())


def test_subfields_of_f4():
    F = gf(2, 2)
    assert [x for x in F.elements() if F.in_subfield(x, 1)] == [0, 1]
    assert F.subfield_degree([1]) == 1
    assert F.subfield_degree([2]) == 2


def test_artin_schreier_solve():
    F = gf(2)
    assert F.artin_schreier_solve(0) == 0
    assert F.artin_schreier_solve(1) is None
    F4 = gf(2, 2)
    r = F4.artin_schreier_solve(1)
    assert r is not None and F4.sub(F4.pow(r, 2), r) == 1


def test_rejects_non_prime():
    with pytest.raises(ValueError):
        gf(4)
