"""The value set v(a - K), the distance cut dist(a, K) and its transport through polynomials.

Cuts are only ever claimed with a certificate: an attained maximum (a first
term of a outside K), the limit of a closed-form tail that K cannot absorb,
or membership of a in K.  Anything else is reported as Unresolved.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cuts import (
    Cut,
    Infinity,
    PrincipalPlus,
    Unresolved,
    in_lower,
    is_resolved,
    scale_cut,
    shift_cut,
)
from .fields import (
    BudgetExhausted,
    FieldDescriptor,
    FieldKind,
    SyntheticElement,
    barrier,
    first_outside,
)
from .hahn import HahnSeries, Polynomial, hasse_taylor_series, render_series
from .ordgroup import GroupElement

YES = "yes"
NO = "no"
UNKNOWN = "unknown-at-budget"


class UnresolvedBase(Exception):
    pass


@dataclass(frozen=True)
class DistanceReport:
    element: str
    field: str
    value_prefix: tuple  # GroupElement entries; None stands for infinity
    cut: Cut
    weakly_immediate: str
    budget_used: int

    def __post_init__(self):
        finite = [g for g in self.value_prefix if g is not None]
        for x, y in zip(finite, finite[1:]):
            if not x < y:
                raise ValueError("value prefix must be strictly increasing")

    @property
    def max_value(self) -> GroupElement | None:
        return self.value_prefix[-1] if self.value_prefix else None

    def to_json(self) -> dict:
        from .cuts import render_cut
        return {
            "element": self.element,
            "field": self.field,
            "prefix": ["inf" if g is None else str(g) for g in self.value_prefix],
            "cut": render_cut(self.cut),
            "weakly_immediate": self.weakly_immediate,
            "budget": self.budget_used,
        }


def describe(a) -> str:
    if isinstance(a, SyntheticElement):
        return a.label
    if a.is_closed:
        return render_series(a)
    return repr(a)


def _stream_prefix(a: HahnSeries, K: FieldDescriptor, budget: int):
    """Values v(a - c) for c running through the K-truncations of a.

    Returns (prefix, outside) where ``outside`` is the exponent of the first
    term not in K (the attained maximum) if it was reached.
    """
    prefix: list = []
    for t in a.iter_terms():
        if len(prefix) >= budget:
            return prefix, None, False
        prefix.append(t.exp)
        if not K.term_in(t.exp, t.coeff):
            return prefix, t.exp, True
    # the stream ended: either the support is finite or the lazy cap budget ran out
    done = a.is_closed or a.has_finite_support()
    return prefix, None, done


def value_set(a, K: FieldDescriptor, budget: int) -> DistanceReport:
    """The first ``budget`` values of v(a - K) along successively better approximants."""
    if K.kind is FieldKind.SYNTHETIC:
        return _scripted_report(a, K, budget)
    prefix, outside, done = _stream_prefix(a, K, budget)
    if outside is not None:
        return DistanceReport(describe(a), K.label, tuple(prefix), PrincipalPlus(outside), NO, len(prefix))
    if done:
        return DistanceReport(describe(a), K.label, tuple(prefix) + (None,), Infinity(a.rank), NO, len(prefix))
    return DistanceReport(describe(a), K.label, tuple(prefix), Unresolved(tuple(prefix), budget), UNKNOWN,
                          len(prefix))


def distance_of(a, K: FieldDescriptor, budget: int) -> DistanceReport:
    """dist(a, K) with its value prefix; closed forms are decided exactly."""
    if K.kind is FieldKind.SYNTHETIC:
        return _scripted_report(a, K, budget)
    if not a.is_closed:
        return value_set(a, K, budget)
    star = first_outside(a, K)
    wall = barrier(a, K)
    prefix, _, _ = _stream_prefix(a, K, budget)
    if star is not None and (wall is None or in_lower(star, wall)):
        vals = [g for g in prefix if g < star] + [star]
        return DistanceReport(describe(a), K.label, tuple(vals), PrincipalPlus(star), NO, len(prefix))
    if wall is not None:
        return DistanceReport(describe(a), K.label, tuple(prefix), wall, YES, len(prefix))
    return DistanceReport(describe(a), K.label, tuple(prefix) + (None,), Infinity(a.rank), NO, len(prefix))


def _scripted_report(a, K: FieldDescriptor, budget: int) -> DistanceReport:
    if not isinstance(a, SyntheticElement):
        raise TypeError("synthetic fields only answer for scripted elements")
    rows = K.script.approximations.get(a.label, ())[:budget]
    prefix = tuple(r.achieved for r in rows)
    if any(r.attained for r in rows):
        last = prefix[-1]
        cut = Infinity(K.rank) if last is None else PrincipalPlus(last)
        return DistanceReport(a.label, K.label, prefix, cut, NO, len(rows))
    elem = K.script.elements.get(a.label)
    if elem is not None and is_resolved(elem.cut) and not isinstance(elem.cut, (PrincipalPlus, Infinity)):
        return DistanceReport(a.label, K.label, prefix, elem.cut, YES, len(rows))
    finite = tuple(g for g in prefix if g is not None)
    return DistanceReport(a.label, K.label, prefix, Unresolved(finite, budget), UNKNOWN, len(rows))


def is_weakly_immediate(a, K: FieldDescriptor, budget: int) -> str:
    return distance_of(a, K, budget).weakly_immediate


# -- strong immediacy and transport ----------------------------------------------

@dataclass(frozen=True)
class ImmediacyWitness:
    """gamma and the values v(f_i(c)) that stay fixed once v(a - c) >= gamma."""

    gamma: GroupElement
    fixed_values: tuple  # v(f_i(c)) for i = 0..deg f; None = infinity
    samples: tuple  # (v(a - c), values) for every tested approximant c
    status: str = "witnessed"


@dataclass(frozen=True)
class CounterWitness:
    """The values v(f_i(c)) never settled over the tested approximants."""

    history: tuple


def _approximants(a: HahnSeries, budget: int):
    """Pairs (c_n, v(a - c_n)) with c_n the sum of the first n terms of a."""
    terms = a.first_terms(budget + 1)
    out = []
    for n in range(min(budget, len(terms)) + 1):
        c = HahnSeries.from_terms(a.field, a.rank, terms[:n])
        gap = terms[n].exp if n < len(terms) else None
        out.append((c, gap))
    return out


def strong_immediacy_witness(a: HahnSeries, K: FieldDescriptor, f: Polynomial, budget: int,
                             min_witnesses: int = 3):
    """Find gamma beyond which every v(f_i(c)) is fixed, over the truncations c of a."""
    approx = [(c, gap) for c, gap in _approximants(a, budget)
              if all(K.term_in(t.exp, t.coeff) for t in c.iter_terms())]
    history = []
    for c, gap in approx:
        if gap is None:
            break  # c = a: not a proper approximant
        vals = tuple(s.valuation() for s in hasse_taylor_series(f, c))
        history.append((gap, vals))
    if len(history) < min_witnesses:
        raise BudgetExhausted(f"only {len(history)} approximants available, need {min_witnesses}")
    n0 = len(history) - 1
    while n0 > 0 and history[n0 - 1][1] == history[-1][1]:
        n0 -= 1
    if len(history) - n0 < min_witnesses:
        return CounterWitness(tuple(history))
    return ImmediacyWitness(history[n0][0], history[-1][1], tuple(history[n0:]))


@dataclass(frozen=True)
class Transport:
    h: int
    shift: GroupElement | None
    cut: Cut


def _log_p(h: int, p: int) -> int:
    s = 0
    while h % p == 0:
        h //= p
        s += 1
    if h != 1:
        raise ValueError("stabilization index is not a power of p")
    return s


def transport_distance(f: Polynomial, base: DistanceReport, witness: ImmediacyWitness, p: int) -> Transport:
    """dist(f(a), K) = v f_h(c) + h * dist(a, K) for the stabilized index h."""
    if not is_resolved(base.cut):
        raise UnresolvedBase(f"base distance of {base.element} is unresolved")
    rank = witness.gamma.rank
    if f.degree == 0:
        return Transport(1, None, Infinity(rank))
    choices = set()
    for gap, vals in witness.samples[-2:]:
        best = None
        for i in range(1, f.degree + 1):
            if vals[i] is None:
                continue
            total = vals[i] + gap.scale(i)
            if best is None or total < best[0]:
                best = (total, i)
        choices.add(best[1])
    if len(choices) != 1:
        raise ValueError("the minimizing Taylor index did not stabilize over the witnesses")
    h = choices.pop()
    if f.degree < p:
        h = 1
    s = _log_p(h, p)
    shift = witness.fixed_values[h]
    return Transport(h, shift, shift_cut(scale_cut(base.cut, s, p), shift))


__all__ = [
    "DistanceReport", "ImmediacyWitness", "CounterWitness", "Transport", "UnresolvedBase",
    "value_set", "distance_of", "is_weakly_immediate", "strong_immediacy_witness",
    "transport_distance", "describe", "YES", "NO", "UNKNOWN",
]
