"""Artin-Schreier extensions, defect certificates and the defect classification."""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd

from .cuts import classify_edge, in_lower, is_resolved, render_cut
from .distance import DistanceReport, describe, distance_of
from .fields import (
    BudgetExhausted,
    FieldDescriptor,
    FieldKind,
    SyntheticElement,
    Undecidable,
    contains,
)
from .hahn import HahnSeries, artin_schreier_root, render_series
from .ordgroup import CoordKind, GroupElement, coset_order, subgroup_index

TRIVIAL = "trivial"
DEFECTLESS = "defectless-nontrivial"
DEPENDENT = "dependent-defect"
INDEPENDENT = "independent-defect"
UNRESOLVED = "unresolved"


class InconsistentSamples(Exception):
    pass


@dataclass(frozen=True)
class ASExtensionRecord:
    base: FieldDescriptor
    rhs: HahnSeries | None
    generator: HahnSeries | SyntheticElement
    degree: int
    classification: str = UNRESOLVED
    distance: DistanceReport | None = None
    eta: object = None  # the dependence witness, when found
    eta_value: GroupElement | None = None
    certificate: "DefectCertificate | None" = None

    def to_json(self) -> dict:
        out = {
            "field": self.base.label,
            "rhs": "" if self.rhs is None else render_series(self.rhs),
            "generator": describe(self.generator),
            "degree": self.degree,
            "classification": self.classification,
        }
        if self.distance is not None:
            out["distance"] = render_cut(self.distance.cut)
        if self.eta is not None:
            out["eta"] = describe(self.eta)
            out["eta_value"] = str(self.eta_value)
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def as_extension(b: HahnSeries, K: FieldDescriptor) -> ASExtensionRecord:
    """K(theta) with theta^p - theta = b; degree 1 exactly when theta already lies in K."""
    if not contains(b, K):
        raise ValueError(f"right-hand side {render_series(b)} is not in {K.label}")
    theta = artin_schreier_root(b)
    degree = 1 if contains(theta, K) else K.p
    return ASExtensionRecord(K, b, theta, degree, TRIVIAL if degree == 1 else UNRESOLVED)


def scripted_extension(label: str, K: FieldDescriptor) -> ASExtensionRecord:
    """An extension generated by a scripted element of a synthetic field."""
    elem = K.script.elements.get(label)
    degree = elem.degree if elem is not None and elem.degree else K.p
    return ASExtensionRecord(K, None, SyntheticElement(label), degree)


# -- defect certificates -----------------------------------------------------------

@dataclass(frozen=True)
class DefectCertificate:
    degree: int
    e: int
    f: int
    g: int
    d: int
    evidence: tuple  # (sample description, value, residue) triples that raised e or f
    sampled: int = 0

    def __post_init__(self):
        if self.degree != self.d * self.e * self.f * self.g:
            raise InconsistentSamples("fundamental equality violated")

    def to_json(self) -> dict:
        return {
            "degree": self.degree, "e": self.e, "f": self.f, "g": self.g, "d": self.d,
            "sampled": self.sampled, "evidence": [list(x) for x in self.evidence],
        }


def _sample_exponent(rng: random.Random, K: FieldDescriptor) -> GroupElement:
    G = K.value_group()
    coords = []
    for kind in G.kinds:
        n = rng.randint(-3, 3)
        if kind is CoordKind.INTEGERS:
            coords.append(Fraction(n, K.p ** G.level))
        elif kind is CoordKind.P_POWER:
            coords.append(Fraction(n, K.p ** rng.randint(0, 2)))
        else:
            coords.append(Fraction(n, rng.randint(1, 4)))
    return GroupElement(tuple(coords))


def _sample_coefficient(rng: random.Random, K: FieldDescriptor) -> HahnSeries:
    F = K.field
    if rng.random() < 0.2:
        return HahnSeries.zero(F, K.rank)
    units = [x for x in range(1, F.q) if F.in_subfield(x, K.base_coeff_degree)]
    return HahnSeries.monomial(F, _sample_exponent(rng, K), rng.choice(units))


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def defect_certificate(K: FieldDescriptor, a, degree: int, samples: int = 100, seed: int = 0) -> DefectCertificate:
    """Estimate e and f of K(a)|K from sampled elements sum c_k a^k, then d = n / (e f)."""
    if isinstance(a, SyntheticElement):
        elem = K.script.elements.get(a.label)
        if elem is None:
            raise Undecidable(f"no scripted data for {a.label}")
        e, f = elem.ramification, elem.inertia
        return _finish(degree, e, f, (("script", a.label, ""),), K.p)
    F = K.field
    G = K.value_group()
    rng = random.Random(seed)
    powers = [HahnSeries.constant(F, 1, K.rank)]
    for _ in range(1, degree):
        powers.append(powers[-1] * a)
    values: list[GroupElement] = []
    residues: list[int] = []
    evidence = []
    e_now, f_now = 1, 1
    for s in range(samples):
        cs = [_sample_coefficient(rng, K) for _ in range(degree)]
        x = HahnSeries.zero(F, K.rank)
        for c, pw in zip(cs, powers):
            if not (c.is_closed and c.is_zero()):
                x = x + c * pw
        lead = x.first_terms(1)
        if not lead:
            continue
        v, c0 = lead[0]
        order = coset_order(v, G)
        if order is None:
            raise Undecidable(f"sampled value {v} has infinite order modulo the value group")
        values.append(v)
        residues.append(F.pow(c0, order))
        e_new = subgroup_index(values, G)
        k = F.subfield_degree(residues)
        f_new = (k * K.base_coeff_degree // gcd(k, K.base_coeff_degree)) // K.base_coeff_degree
        if (e_new, f_new) != (e_now, f_now):
            desc = " + ".join(f"({render_series(c)})*a^{j}" for j, c in enumerate(cs)
                              if not (c.is_closed and c.is_zero()))
            evidence.append((f"sample {s}: {desc}", str(v), str(residues[-1])))
            e_now, f_now = e_new, f_new
    return _finish(degree, e_now, f_now, tuple(evidence), K.p, len(values))


def _finish(degree: int, e: int, f: int, evidence: tuple, p: int, sampled: int = 0) -> DefectCertificate:
    if degree % (e * f):
        raise InconsistentSamples(f"e*f = {e * f} does not divide the degree {degree}")
    d = degree // (e * f)
    if not _is_p_power(d, p):
        raise InconsistentSamples(f"defect {d} is not a power of {p}")
    return DefectCertificate(degree, e, f, 1, d, evidence, sampled)


# -- classification ------------------------------------------------------------------

def _eta_candidates(theta: HahnSeries, K: FieldDescriptor, budget: int):
    """p-th roots of finite K-truncations of theta^p = theta + b, not lying in K."""
    target = theta.frobenius_power()
    terms = target.first_terms(budget)
    for n in range(1, len(terms) + 1):
        c = HahnSeries.from_terms(theta.field, theta.rank, terms[:n])
        if not contains(c, K):
            break
        eta = c.frobenius_root()
        if not contains(eta, K):
            yield eta


def find_dependence(rec: ASExtensionRecord, dist: DistanceReport, budget: int):
    """An eta in K^(1/p) with v(theta - eta) beyond every computed v(theta - c)."""
    K = rec.base
    if isinstance(rec.generator, SyntheticElement):
        eta = K.script.eta.get(rec.generator.label)
        if eta is None or not eta.purely_inseparable:
            return None
        if all(g is not None and g < eta.value for g in dist.value_prefix):
            return SyntheticElement(eta.label), eta.value
        return None
    if K.kind is FieldKind.PERFECT_HULL:
        return None  # K^(1/p) = K
    for eta in _eta_candidates(rec.generator, K, budget):
        v = (rec.generator - eta).valuation()
        if v is None:
            continue
        if is_resolved(dist.cut) and not in_lower(v, dist.cut):
            return eta, v
    return None


def classify_as(rec: ASExtensionRecord, budget: int = 16, samples: int = 100, seed: int = 0) -> ASExtensionRecord:
    """Fill in the classification: trivial, defectless, dependent, independent or unresolved."""
    if rec.degree == 1:
        return replace(rec, classification=TRIVIAL)
    cert = defect_certificate(rec.base, rec.generator, rec.degree, samples, seed)
    rec = replace(rec, certificate=cert)
    if cert.d == 1:
        return replace(rec, classification=DEFECTLESS)
    try:
        dist = distance_of(rec.generator, rec.base, budget)
    except BudgetExhausted:
        return replace(rec, classification=UNRESOLVED)
    dep = find_dependence(rec, dist, budget)
    if dep is not None:
        return replace(rec, classification=DEPENDENT, distance=dist, eta=dep[0], eta_value=dep[1])
    if is_resolved(dist.cut):
        edge = classify_edge(dist.cut)
        if edge is not None and edge.side == "lower":
            return replace(rec, classification=INDEPENDENT, distance=dist)
    return replace(rec, classification=UNRESOLVED, distance=dist)
