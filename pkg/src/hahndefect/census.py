"""Counting distances modulo vK or its divisible hull, and checking the counts against bounds.

Two independent routes produce the buckets: the transport route pushes
dist(a, K) through the Taylor data of each sampled polynomial, and the
brute-force route evaluates f(a) as a series and reads its distance off the
term stream.  A census only ever gives a lower bound for the true count.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from math import factorial

from .cuts import (
    Cut,
    PrincipalPlus,
    Unresolved,
    edge_minus,
    equal_mod,
    is_resolved,
    render_cut,
)
from .distance import (
    YES,
    ImmediacyWitness,
    distance_of,
    strong_immediacy_witness,
    transport_distance,
)
from .fields import FieldDescriptor, FieldKind
from .hahn import HahnSeries, Polynomial, TruncationUnbounded
from .ordgroup import ConvexSubgroup, DivisibleHull, GroupElement, OrderedGroupSpec

VALUE_GROUP = "value-group"
DIVISIBLE_HULL = "divisible-hull"

THEOREMS = ("nddtow", "nonhens-general", "nonhens-normal", "r+m", "r+k", "MT1",
            "ndd_i", "r+1", "two_r", "idegp")

# bounds on counts modulo the divisible hull only
_HULL_ONLY = {"ndd_i", "r+1", "two_r"}
_NEEDS_COMPLETION_FLAG = {"r+1", "two_r"}
# bounds on the classes of a single extension L|K
_PER_EXTENSION = {"nddtow", "nonhens-general", "nonhens-normal", "idegp"}


class MissingParameter(ValueError):
    pass


class UnresolvedDistance(Exception):
    pass


# -- bound arithmetic --------------------------------------------------------------------

@dataclass(frozen=True)
class BoundQuery:
    theorem: str
    r: int | None = None
    m: int | None = None
    k: int | None = None
    i: int | None = None
    e: int | None = None
    degree: int | None = None
    trdeg: int | None = None
    p: int | None = None

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise ValueError(f"unknown theorem id {self.theorem!r}")
        for name in ("r", "m", "k", "i", "e", "degree", "trdeg", "p"):
            v = getattr(self, name)
            if v is not None and v < 0:
                raise ValueError(f"parameter {name} must be nonnegative")


_REQUIRED = {
    "nddtow": ("m", "e"),
    "nonhens-general": ("m", "degree", "p"),
    "nonhens-normal": ("m", "e"),
    "r+m": ("r", "m"),
    "r+k": ("r", "k"),
    "MT1": ("trdeg",),
    "ndd_i": ("r", "i", "m"),
    "r+1": ("r",),
    "two_r": ("r",),
    "idegp": (),
}


def bound_value(q: BoundQuery) -> int:
    """The numeric value of the bound; fractional bounds are rounded down (counts are integers)."""
    for name in _REQUIRED[q.theorem]:
        if getattr(q, name) is None:
            raise MissingParameter(f"{q.theorem} needs parameter {name}")
    t = q.theorem
    if t in ("nddtow", "nonhens-normal"):
        return q.m * q.e
    if t == "nonhens-general":
        return int(Fraction(q.m * factorial(q.degree), q.p ** q.m))
    if t == "r+m":
        return q.r + q.m
    if t == "r+k":
        return q.r + q.k
    if t == "MT1":
        return 2 * q.trdeg
    if t == "ndd_i":
        return q.r + q.i * q.m
    if t == "r+1":
        return q.r + 1
    if t == "two_r":
        return 2 * q.r
    return 1


@dataclass(frozen=True)
class BoundContext:
    """Parameters of a census.

    ``m_field`` is the exponent of the defect of K^(1/p)|K; ``m_ext`` is the
    exponent of the defect of the extension being counted.  The two enter
    different bounds.
    """

    r: int | None = None
    m_field: int | None = None
    m_ext: int | None = None
    k: int | None = None
    i: int | None = None
    e: int | None = None
    degree: int | None = None
    trdeg: int | None = None
    p: int | None = None
    perfect_hull_in_completion: bool | None = None
    normal: bool = False
    extensions: int = 1  # how many extensions L|K the census pools
    theorems: tuple = THEOREMS

    def query(self, theorem: str) -> BoundQuery:
        m = self.m_field if theorem in ("r+m", "ndd_i") else self.m_ext
        return BoundQuery(theorem, self.r, m, self.k, self.i, self.e, self.degree, self.trdeg, self.p)


@dataclass(frozen=True)
class BoundResult:
    theorem: str
    value: int | None
    verdict: str  # respected | violated | inapplicable
    note: str = ""

    def to_json(self) -> dict:
        return {"theorem": self.theorem, "value": self.value, "verdict": self.verdict, "note": self.note}


# -- reports ------------------------------------------------------------------------------

@dataclass(frozen=True)
class Bucket:
    cut: Cut
    witnesses: tuple
    count: int

    def to_json(self) -> dict:
        return {"cut": render_cut(self.cut), "witnesses": list(self.witnesses), "count": self.count}


@dataclass(frozen=True)
class CensusReport:
    extension: str
    modulus: str
    enumeration: dict
    buckets: tuple
    bounds: tuple = ()

    @property
    def ndd_lower(self) -> int:
        return len(self.buckets)

    def verdict(self, theorem: str) -> str | None:
        for b in self.bounds:
            if b.theorem == theorem:
                return b.verdict
        return None

    def to_json(self) -> dict:
        return {
            "extension": self.extension,
            "modulus": self.modulus,
            "enumeration": dict(self.enumeration),
            "buckets": [b.to_json() for b in self.buckets],
            "ndd_lower": self.ndd_lower,
            "bounds": [b.to_json() for b in self.bounds],
        }


def _modulus(K: FieldDescriptor, modulus: str) -> OrderedGroupSpec | DivisibleHull:
    if modulus == VALUE_GROUP:
        return K.value_group()
    if modulus == DIVISIBLE_HULL:
        return DivisibleHull(K.rank)
    raise ValueError(f"unknown modulus {modulus!r}")


MAX_WITNESSES = 5


def bucketize(items, K: FieldDescriptor, modulus: str) -> tuple:
    """Group (cut, witness) pairs into equal_mod classes, ordered by representative rendering."""
    mod = _modulus(K, modulus)
    reps: list[list] = []  # [cut, witnesses, count]
    for cut, witness in items:
        if not is_resolved(cut):
            raise UnresolvedDistance(f"distance of {witness} is unresolved: {render_cut(cut)}")
        for entry in reps:
            if equal_mod(entry[0], cut, mod):
                if len(entry[1]) < MAX_WITNESSES:
                    entry[1].append(witness)
                entry[2] += 1
                break
        else:
            reps.append([cut, [witness], 1])
    reps.sort(key=lambda r: render_cut(r[0]))
    return tuple(Bucket(c, tuple(w), n) for c, w, n in reps)


# -- polynomial samples -------------------------------------------------------------------

def sample_polynomials(K: FieldDescriptor, count: int, max_degree: int, seed: int = 0,
                       exponent_range: int = 2) -> list[Polynomial]:
    """Nonconstant polynomials with monomial coefficients u*t^q, q integral, u a unit of Kv.

    Distinct samples are returned in draw order; the draw is seeded.
    """
    F = K.field
    rng = random.Random(seed)
    units = [x for x in range(1, F.q) if F.in_subfield(x, K.base_coeff_degree)]
    seen = set()
    out = []
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        deg = rng.randint(1, max_degree)
        coeffs = []
        for j in range(deg + 1):
            if j < deg and rng.random() < 0.3:
                coeffs.append(None)
                continue
            q = tuple(Fraction(rng.randint(-exponent_range, exponent_range)) for _ in range(K.rank))
            coeffs.append((q, rng.choice(units)))
        key = tuple(coeffs)
        if key in seen:
            continue
        seen.add(key)
        out.append(Polynomial(tuple(
            HahnSeries.zero(F, K.rank) if c is None else HahnSeries.monomial(F, GroupElement(c[0]), c[1])
            for c in coeffs)))
    return out


# -- the two counting routes ----------------------------------------------------------------

@dataclass(frozen=True)
class Target:
    """An element a generating the extension K(a) whose distances are counted."""

    label: str
    element: HahnSeries
    degree: int


def transport_cuts(target: Target, K: FieldDescriptor, polys, budget: int) -> list:
    base = distance_of(target.element, K, budget)
    if base.weakly_immediate != YES:
        return []
    out = []
    for f in polys:
        w = strong_immediacy_witness(target.element, K, f, budget)
        if not isinstance(w, ImmediacyWitness):
            raise UnresolvedDistance(f"no stable Taylor values for {f}")
        out.append((transport_distance(f, base, w, K.p).cut, f"{target.label}: {f}"))
    return out


def _geometric_limit(seq: list[GroupElement], p: int, run: int) -> Cut | None:
    if len(seq) < run + 2:
        return None
    gaps = [y - x for x, y in zip(seq, seq[1:])]
    tail = gaps[-(run + 1):]
    if any(g.scale(Fraction(1, p)) != h for g, h in zip(tail, tail[1:])):
        return None
    last = tail[-1]
    alpha = seq[-1] + last.scale(Fraction(1, p - 1))
    r = alpha.rank
    lvl = last.leading_index()
    return edge_minus(ConvexSubgroup(r, r - lvl - 1), alpha)


def recognize_limit(prefix: list[GroupElement], p: int, run: int = 3, max_stride: int = 3) -> Cut | None:
    """Read a lower-edge cut off a value sequence whose gaps shrink by exactly 1/p.

    Several interleaved sequences are split by taking every k-th value; all of
    them must point at the same cut.  This is an empirical pattern match, used
    only as an independent oracle.
    """
    for k in range(1, max_stride + 1):
        found = {_geometric_limit(prefix[j::k], p, run) for j in range(k)}
        if len(found) == 1 and None not in found:
            return found.pop()
    return None


def direct_cut(x: HahnSeries, K: FieldDescriptor, budget: int) -> Cut:
    """dist(x, K) from the term stream of x alone."""
    prefix = []
    for t in x.iter_terms():
        if not K.term_in(t.exp, t.coeff):
            return PrincipalPlus(t.exp)
        prefix.append(t.exp)
        if len(prefix) >= budget:
            break
    cut = recognize_limit(prefix, K.p)
    if cut is None:
        return Unresolved(tuple(prefix), budget)
    return cut


def brute_force_distances(targets, K: FieldDescriptor, polys, budget: int,
                          modulus: str = VALUE_GROUP) -> tuple:
    """Buckets from direct evaluation of f(a), bypassing the Taylor transport."""
    targets = [targets] if isinstance(targets, Target) else list(targets)
    items = []
    for target in targets:
        if distance_of(target.element, K, budget).weakly_immediate != YES:
            continue
        for f in polys:
            try:
                cut = direct_cut(f.evaluate(target.element), K, budget)
            except TruncationUnbounded as exc:
                raise UnresolvedDistance(str(exc)) from exc
            items.append((cut, f"{target.label}: {f}"))
    return bucketize(items, K, modulus)


def same_buckets(xs, ys) -> bool:
    """Identical bucket structure: same representatives, counts and witnesses."""
    return [b.to_json() for b in xs] == [b.to_json() for b in ys]


def ndd_census(targets, K: FieldDescriptor, polys=None, modulus: str = VALUE_GROUP, budget: int = 12,
               enumeration: dict | None = None, max_degree_exp: int | None = None,
               name: str = "") -> CensusReport:
    """Distance classes of the elements f(a) for every target a and sampled f.

    For synthetic fields the targets are labels of scripted elements and the
    scripted cuts are bucketed directly; ``max_degree_exp`` keeps only
    elements of degree at most p^i.
    """
    if K.kind is FieldKind.SYNTHETIC:
        items = []
        for label in targets:
            elem = K.script.elements[label]
            if max_degree_exp is not None and elem.degree_exp > max_degree_exp:
                continue
            items.append((elem.cut, label))
        buckets = bucketize(items, K, modulus)
        ext = name or f"{K.label}: " + ", ".join(targets)
    else:
        items = []
        for t in targets:
            if max_degree_exp is not None and t.degree > K.p ** max_degree_exp:
                continue
            items.extend(transport_cuts(t, K, polys, budget))
        buckets = bucketize(items, K, modulus)
        ext = name or f"{K.label}: " + ", ".join(t.label for t in targets)
    enum = {"budget": budget}
    if enumeration:
        enum.update(enumeration)
    return CensusReport(ext, modulus, enum, buckets)


def check_bounds(report: CensusReport, ctx: BoundContext) -> CensusReport:
    """Attach a verdict for every requested theorem, gated on its hypotheses."""
    results = []
    for theorem in ctx.theorems:
        if theorem in _HULL_ONLY and report.modulus != DIVISIBLE_HULL:
            results.append(BoundResult(theorem, None, "inapplicable", "bounds classes modulo the divisible hull"))
            continue
        if theorem in _NEEDS_COMPLETION_FLAG and not ctx.perfect_hull_in_completion:
            results.append(BoundResult(theorem, None, "inapplicable", "perfect hull not known to lie in the completion"))
            continue
        if theorem in _PER_EXTENSION and ctx.extensions != 1:
            results.append(BoundResult(theorem, None, "inapplicable", "the census pools several extensions"))
            continue
        if theorem == "nonhens-normal" and not ctx.normal:
            results.append(BoundResult(theorem, None, "inapplicable", "extension not declared normal"))
            continue
        if theorem == "idegp" and (ctx.degree is None or ctx.p is None or ctx.degree != ctx.p):
            results.append(BoundResult(theorem, None, "inapplicable", "needs an extension of prime degree p"))
            continue
        try:
            value = bound_value(ctx.query(theorem))
        except MissingParameter as exc:
            results.append(BoundResult(theorem, None, "inapplicable", str(exc)))
            continue
        if report.ndd_lower <= value:
            results.append(BoundResult(theorem, value, "respected"))
        else:
            witnesses = "; ".join(b.witnesses[0] for b in report.buckets)
            results.append(BoundResult(theorem, value, "violated", f"distinct classes: {witnesses}"))
    return replace(report, bounds=tuple(results))
