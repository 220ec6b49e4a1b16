"""Base fields K inside the ambient Hahn field.

Non-synthetic descriptors are truncation-closed: a series lies in K iff each
of its terms does and (for the Laurent and perfect-hull kinds) its support
has bounded p-power denominators.  For such K the best approximation of any
a is a truncation of a, so ``v(a - K)`` is computable from the support of a.
Synthetic descriptors answer from a scripted table instead.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import gcd

from .cuts import Cut, min_cut, parse_cut
from .gf import FiniteField, gf
from .hahn import SHRINK, FrobeniusTail, HahnSeries, Term, TruncationUnbounded
from .ordgroup import CoordKind, GroupElement, OrderedGroupSpec, p_adic_valuation, parse_element


class Undecidable(Exception):
    pass


class BudgetExhausted(Exception):
    pass


class FieldKind(enum.Enum):
    LAURENT = "laurent"
    PERFECT_HULL = "perfect-hull"
    FULL_RESTRICTED = "full-restricted"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True)
class SyntheticElement:
    """An element of a synthetic field, known only through its script entries."""

    label: str


@dataclass(frozen=True)
class ScriptedApprox:
    target: GroupElement
    achieved: GroupElement | None  # None = infinity
    attained: bool = False


@dataclass(frozen=True)
class ScriptedEta:
    label: str
    value: GroupElement  # v(theta - eta)
    purely_inseparable: bool = True
    degree: int = 0


@dataclass(frozen=True)
class ScriptedElement:
    label: str
    cut: Cut
    degree: int = 0
    degree_exp: int = 1
    ramification: int = 1
    inertia: int = 1


@dataclass(frozen=True)
class SyntheticScript:
    approximations: dict = dc_field(default_factory=dict)  # label -> tuple[ScriptedApprox]
    elements: dict = dc_field(default_factory=dict)  # label -> ScriptedElement
    eta: dict = dc_field(default_factory=dict)  # theta label -> ScriptedEta
    members: frozenset = frozenset()

    @classmethod
    def from_mapping(cls, data: dict, rank: int) -> "SyntheticScript":
        approx: dict[str, list] = {}
        for row in data.get("approximations", []):
            achieved = row.get("achieved", "inf")
            approx.setdefault(row["element"], []).append(ScriptedApprox(
                parse_element(str(row["target"]), rank),
                None if achieved == "inf" else parse_element(str(achieved), rank),
                bool(row.get("attained", False))))
        elements = {}
        for row in data.get("elements", []):
            elements[row["label"]] = ScriptedElement(
                row["label"], parse_cut(row["cut"], rank), int(row.get("degree", 0)),
                int(row.get("degree_exp", 1)), int(row.get("ramification", 1)), int(row.get("inertia", 1)))
        eta = {}
        for row in data.get("eta", []):
            eta[row["element"]] = ScriptedEta(row["label"], parse_element(str(row["value"]), rank),
                                              bool(row.get("purely_inseparable", True)), int(row.get("degree", 0)))
        return cls({k: tuple(sorted(v, key=lambda a: a.target)) for k, v in approx.items()},
                   elements, eta, frozenset(data.get("members", [])))


@dataclass(frozen=True)
class FieldDescriptor:
    kind: FieldKind
    p: int
    rank: int = 1
    level: int = 0
    coeff_degree: int = 1
    base_coeff_degree: int = 1
    subgroup: OrderedGroupSpec | None = None
    declared_m: int | None = None
    declared_k: int | None = None
    perfect_hull_in_completion: bool | None = None
    script: SyntheticScript | None = None
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "kind", FieldKind(self.kind))
        if self.coeff_degree % self.base_coeff_degree:
            raise ValueError("the base residue field must be a subfield of the coefficient field")
        if self.kind is FieldKind.FULL_RESTRICTED and self.subgroup is None:
            raise ValueError("full-restricted fields need a subgroup descriptor")
        if self.kind is FieldKind.SYNTHETIC and self.script is None:
            object.__setattr__(self, "script", SyntheticScript())

    @classmethod
    def laurent(cls, p: int, level: int = 0, rank: int = 1, **kw) -> "FieldDescriptor":
        kw.setdefault("perfect_hull_in_completion", False)
        return cls(FieldKind.LAURENT, p, rank, level, **kw)

    @classmethod
    def perfect_hull(cls, p: int, rank: int = 1, **kw) -> "FieldDescriptor":
        kw.setdefault("perfect_hull_in_completion", True)
        return cls(FieldKind.PERFECT_HULL, p, rank, **kw)

    @classmethod
    def full_restricted(cls, subgroup: OrderedGroupSpec, **kw) -> "FieldDescriptor":
        return cls(FieldKind.FULL_RESTRICTED, subgroup.prime, subgroup.rank, subgroup=subgroup, **kw)

    @classmethod
    def synthetic(cls, p: int, script: SyntheticScript, rank: int = 1, **kw) -> "FieldDescriptor":
        return cls(FieldKind.SYNTHETIC, p, rank, script=script, **kw)

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        if self.kind is FieldKind.LAURENT:
            return f"laurent(p={self.p},level={self.level},rank={self.rank})"
        return f"{self.kind.value}(p={self.p},rank={self.rank})"

    @property
    def field(self) -> FiniteField:
        return gf(self.p, self.coeff_degree)

    def value_group(self) -> OrderedGroupSpec:
        if self.kind is FieldKind.LAURENT:
            return OrderedGroupSpec.uniform(self.p, CoordKind.INTEGERS, self.rank, self.level)
        if self.kind is FieldKind.PERFECT_HULL:
            return OrderedGroupSpec.uniform(self.p, CoordKind.P_POWER, self.rank)
        if self.kind is FieldKind.FULL_RESTRICTED:
            return self.subgroup
        return OrderedGroupSpec.uniform(self.p, CoordKind.P_POWER, self.rank)

    def term_in(self, exp: GroupElement, coeff: int) -> bool:
        return self.value_group().contains(exp) and self.field.in_subfield(coeff, self.base_coeff_degree)

    def element(self, text: str) -> HahnSeries:
        from .hahn import parse_series
        return parse_series(text, self.field, self.rank)


def _require_concrete(K: FieldDescriptor) -> None:
    if K.kind is FieldKind.SYNTHETIC:
        raise Undecidable("synthetic fields answer only through their script")


# -- membership -------------------------------------------------------------------

def _multiplicative_order(p: int, m: int) -> int:
    if m <= 1:
        return 1
    k, x = 1, p % m
    while x != 1:
        x = x * p % m
        k += 1
    return k


def _tail_scan_end(t: FrobeniusTail, K: FieldDescriptor, a: HahnSeries) -> int:
    """An index past which the tail's membership pattern is periodic and uncorrected."""
    p = K.p
    bound = t.start
    nonp = 1
    for b, s in zip(t.base.coords, t.shift.coords):
        if b == 0:
            continue
        vb = p_adic_valuation(b, p)
        vs = p_adic_valuation(s, p) if s else 0
        bound = max(bound, t.start + abs(vb) + abs(vs) + abs(K.level) + 2)
        den = b.denominator
        while den % p == 0:
            den //= p
        nonp = nonp * den // gcd(nonp, den)
    for e in a.finite_part:
        i = t.index_of(e)
        if i is not None:
            bound = max(bound, i + 1)
    period = K.field.d * _multiplicative_order(p, nonp)
    return bound + period


def first_outside(a: HahnSeries, K: FieldDescriptor) -> GroupElement | None:
    """Smallest exponent of an actual term of a that does not lie in K."""
    _require_concrete(K)
    if not a.is_closed:
        raise TruncationUnbounded("first_outside needs a closed-form series")
    best = None
    for e in sorted(a.finite_part):
        c = a.coeff_at(e)
        if c and not K.term_in(e, c):
            best = e
            break
    for t in a.tails:
        for i in range(t.start, _tail_scan_end(t, K, a) + 1):
            e = t.exponent(i)
            if best is not None and not e < best:
                break
            c = a.coeff_at(e)
            if c and not K.term_in(e, c):
                best = e
                break
    return best


def barrier(a: HahnSeries, K: FieldDescriptor) -> Cut | None:
    """Smallest cut beyond which no truncation of a can lie in K.

    Shrinking tails have unbounded p-power denominators, which the Laurent
    and perfect-hull kinds forbid in a single element.
    """
    _require_concrete(K)
    if K.kind is FieldKind.FULL_RESTRICTED or not a.is_closed:
        return None
    limits = [t.limit() for t in a.tails if t.direction == SHRINK]
    return min_cut(*limits) if limits else None


def contains(x, K: FieldDescriptor) -> bool:
    """Membership of a finite term list, a closed-form series, or a synthetic label."""
    if isinstance(x, SyntheticElement):
        return x.label in K.script.members
    _require_concrete(K)
    if isinstance(x, HahnSeries):
        if not x.is_closed:
            if not x.has_finite_support():
                raise Undecidable("membership of an opaque infinite series is not decidable")
            return all(K.term_in(t.exp, t.coeff) for t in x.iter_terms())
        return first_outside(x, K) is None and barrier(x, K) is None
    return all(K.term_in(t.exp, t.coeff) for t in x)


# -- best approximation -----------------------------------------------------------

@dataclass(frozen=True)
class Approximation:
    c: HahnSeries | SyntheticElement
    achieved: GroupElement | None  # None = infinity
    attained_max: bool


def best_approx(a, K: FieldDescriptor, target: GroupElement) -> Approximation:
    """The longest truncation of a lying in K, looked at up to ``target``."""
    if K.kind is FieldKind.SYNTHETIC:
        return _scripted_approx(a, K, target)
    F = a.field
    if a.is_closed:
        star = first_outside(a, K)
        if star is not None and star < target:
            return Approximation(a.truncate(star), star, True)
        c = a.truncate(target)
        rest = a - c
        achieved = rest.valuation()
        if achieved is None:
            return Approximation(c, None, True)
        return Approximation(c, achieved, star is not None and achieved == star)
    kept: list[Term] = []
    for t in a.iter_terms():
        if not K.term_in(t.exp, t.coeff):
            return Approximation(HahnSeries.from_terms(F, a.rank, kept), t.exp, True)
        if not t.exp < target:
            return Approximation(HahnSeries.from_terms(F, a.rank, kept), t.exp, False)
        kept.append(t)
    if a.has_finite_support():
        return Approximation(HahnSeries.from_terms(F, a.rank, kept), None, True)
    raise BudgetExhausted("the term stream ended before reaching the target")


def _scripted_approx(a, K: FieldDescriptor, target: GroupElement) -> Approximation:
    if not isinstance(a, SyntheticElement):
        raise Undecidable("synthetic fields approximate only scripted elements")
    rows = [r for r in K.script.approximations.get(a.label, ()) if r.target <= target]
    if not rows:
        raise BudgetExhausted(f"no scripted approximation of {a.label} up to {target}")
    r = rows[-1]
    return Approximation(SyntheticElement(f"{a.label}@{r.target}"), r.achieved, r.attained)


# -- p-degree and the inseparable defect exponent ---------------------------------------

def p_degree(K: FieldDescriptor) -> int:
    """k with [K^{1/p} : K] = p^k; the finite residue field is perfect and adds nothing."""
    if K.kind is FieldKind.SYNTHETIC:
        if K.declared_k is None:
            raise Undecidable("synthetic field without declared_k")
        return K.declared_k
    if K.kind is FieldKind.PERFECT_HULL:
        return 0
    return sum(1 for kind in K.value_group().kinds if kind is CoordKind.INTEGERS)


@dataclass(frozen=True)
class DefectExponent:
    m: int
    rule: str


def insep_defect_exponent(K: FieldDescriptor) -> DefectExponent:
    if K.kind is FieldKind.PERFECT_HULL:
        return DefectExponent(0, "perfect field: K^(1/p) = K")
    if K.kind in (FieldKind.LAURENT, FieldKind.FULL_RESTRICTED):
        k = p_degree(K)
        # (v K^(1/p) : vK) = |vK / p vK| = p^k = [K^(1/p) : K], so K^(1/p)|K is defectless
        return DefectExponent(0, f"value-group index p^{k} equals [K^(1/p):K] = p^{k}")
    if K.declared_m is not None:
        return DefectExponent(K.declared_m, "declared")
    raise Undecidable(f"no rule computes m for {K.label} and none is declared")


def metadata_conflicts(K: FieldDescriptor) -> list[str]:
    """Declared metadata that disagrees with the computing rules."""
    out = []
    if K.kind is FieldKind.SYNTHETIC:
        return out
    if K.declared_k is not None and K.declared_k != p_degree(K):
        out.append(f"declared_k={K.declared_k} but p_degree={p_degree(K)}")
    m = insep_defect_exponent(K).m
    if K.declared_m is not None and K.declared_m != m:
        out.append(f"declared_m={K.declared_m} but rule gives {m}")
    return out


def frobenius_basis(K: FieldDescriptor) -> list[GroupElement]:
    """Exponents of monomials forming a p-basis of K over K^p (value-group part)."""
    _require_concrete(K)
    G = K.value_group()
    scale = Fraction(K.p) ** (-K.level) if K.kind is FieldKind.LAURENT else Fraction(1)
    out = [GroupElement.zero(K.rank)]
    for idx, kind in enumerate(G.kinds):
        if kind is not CoordKind.INTEGERS:
            continue
        out = [g + GroupElement.unit(K.rank, idx, scale * j) for g in out for j in range(K.p)]
    return out
