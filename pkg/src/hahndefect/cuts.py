"""Symbolic cuts in the divisible hull Q^r.

A cut is stored by a finite tag, never as a set.  Every resolved cut has a
lower set of the form ``{x : x[:k] < a[:k]}`` or ``{x : x[:k] <= a[:k]}``,
which gives a single sort key (see :func:`cut_key`) and makes inclusion and
membership decidable.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .ordgroup import (
    ConvexSubgroup,
    DivisibleHull,
    GroupElement,
    OrderedGroupSpec,
    Ordering,
    RankMismatch,
    parse_element,
)


class IndeterminateCut(Exception):
    """Raised when a comparison involves an Unresolved cut."""


@dataclass(frozen=True)
class PrincipalPlus:
    gamma: GroupElement

    @property
    def rank(self) -> int:
        return self.gamma.rank


@dataclass(frozen=True)
class PrincipalMinus:
    gamma: GroupElement

    @property
    def rank(self) -> int:
        return self.gamma.rank


@dataclass(frozen=True)
class EdgeMinus:
    H: ConvexSubgroup
    alpha: GroupElement

    @property
    def rank(self) -> int:
        return self.alpha.rank


@dataclass(frozen=True)
class EdgePlus:
    H: ConvexSubgroup
    alpha: GroupElement

    @property
    def rank(self) -> int:
        return self.alpha.rank


@dataclass(frozen=True)
class Infinity:
    rank: int


@dataclass(frozen=True)
class Unresolved:
    prefix: tuple[GroupElement, ...]
    budget: int

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        for a, b in zip(self.prefix, self.prefix[1:]):
            if not a < b:
                raise ValueError("unresolved prefix must be strictly increasing")

    @property
    def rank(self) -> int:
        return self.prefix[0].rank if self.prefix else 0


Cut = Union[PrincipalPlus, PrincipalMinus, EdgeMinus, EdgePlus, Infinity, Unresolved]
ResolvedCut = Union[PrincipalPlus, PrincipalMinus, EdgeMinus, EdgePlus, Infinity]


def edge_minus(H: ConvexSubgroup, alpha: GroupElement) -> Cut:
    """Lower edge of alpha + H, normalized."""
    if H.rank != alpha.rank:
        raise RankMismatch("subgroup and element ranks differ")
    if H.is_trivial:
        return PrincipalMinus(alpha)
    if not H.is_proper:
        raise ValueError("the lower edge of the whole group is the empty cut")
    return EdgeMinus(H, alpha)


def edge_plus(H: ConvexSubgroup, alpha: GroupElement) -> Cut:
    """Upper edge of alpha + H, normalized."""
    if H.rank != alpha.rank:
        raise RankMismatch("subgroup and element ranks differ")
    if H.is_trivial:
        return PrincipalPlus(alpha)
    if not H.is_proper:
        return Infinity(alpha.rank)
    return EdgePlus(H, alpha)


def is_resolved(c: Cut) -> bool:
    return not isinstance(c, Unresolved)


def _require_resolved(*cs: Cut) -> None:
    for c in cs:
        if isinstance(c, Unresolved):
            raise IndeterminateCut(f"cut {render_cut(c)} is unresolved")


def cut_key(c: ResolvedCut) -> tuple:
    """Sort key of length r+1; the lower set is {x : (x, 0) < key}."""
    r = c.rank
    if isinstance(c, Infinity):
        return (math.inf,) * (r + 1)
    if isinstance(c, PrincipalMinus):
        return c.gamma.coords + (-math.inf,)
    if isinstance(c, PrincipalPlus):
        return c.gamma.coords + (math.inf,)
    k = c.H.fixed
    fill = -math.inf if isinstance(c, EdgeMinus) else math.inf
    return c.alpha.coords[:k] + (fill,) * (r + 1 - k)


def in_lower(x: GroupElement, c: Cut) -> bool:
    """True iff x lies in the lower cut set of c."""
    _require_resolved(c)
    if x.rank != c.rank:
        raise RankMismatch("element and cut ranks differ")
    return x.coords + (Fraction(0),) < cut_key(c)


def compare_cuts(c1: Cut, c2: Cut) -> Ordering:
    """Order cuts by inclusion of their lower sets."""
    _require_resolved(c1, c2)
    if c1.rank != c2.rank:
        raise RankMismatch("cut ranks differ")
    k1, k2 = cut_key(c1), cut_key(c2)
    if k1 < k2:
        return Ordering.LESS
    if k1 > k2:
        return Ordering.GREATER
    return Ordering.EQUAL


def min_cut(*cs: Cut) -> Cut:
    best = cs[0]
    for c in cs[1:]:
        if compare_cuts(c, best) is Ordering.LESS:
            best = c
    return best


def shift_cut(c: Cut, alpha: GroupElement) -> Cut:
    """Translate every element of the lower set by alpha."""
    if isinstance(c, Unresolved):
        return Unresolved(tuple(g + alpha for g in c.prefix), c.budget)
    if c.rank != alpha.rank:
        raise RankMismatch("cut and shift ranks differ")
    if isinstance(c, Infinity):
        return c
    if isinstance(c, PrincipalMinus):
        return PrincipalMinus(c.gamma + alpha)
    if isinstance(c, PrincipalPlus):
        return PrincipalPlus(c.gamma + alpha)
    return type(c)(c.H, c.alpha + alpha)


def scale_by(c: Cut, factor) -> Cut:
    """Multiply the lower set by a positive rational factor."""
    f = Fraction(factor)
    if f <= 0:
        raise ValueError("scaling factor must be positive")
    if isinstance(c, Unresolved):
        return Unresolved(tuple(g.scale(f) for g in c.prefix), c.budget)
    if isinstance(c, Infinity):
        return c
    if isinstance(c, PrincipalMinus):
        return PrincipalMinus(c.gamma.scale(f))
    if isinstance(c, PrincipalPlus):
        return PrincipalPlus(c.gamma.scale(f))
    # H is divisible, so f*H = H
    return type(c)(c.H, c.alpha.scale(f))


def scale_cut(c: Cut, s: int, p: int) -> Cut:
    if s < 0:
        raise ValueError("exponent s must be a natural number")
    return scale_by(c, Fraction(p) ** s)


@dataclass(frozen=True)
class EdgeInfo:
    H: ConvexSubgroup
    alpha: GroupElement
    side: str  # "lower" | "upper"


def classify_edge(c: Cut) -> EdgeInfo | None:
    _require_resolved(c)
    if isinstance(c, Infinity):
        return None
    if isinstance(c, PrincipalMinus):
        return EdgeInfo(ConvexSubgroup(c.rank, 0), c.gamma, "lower")
    if isinstance(c, PrincipalPlus):
        return EdgeInfo(ConvexSubgroup(c.rank, 0), c.gamma, "upper")
    return EdgeInfo(c.H, c.alpha, "lower" if isinstance(c, EdgeMinus) else "upper")


def equal_mod(c1: Cut, c2: Cut, modulus: OrderedGroupSpec | DivisibleHull) -> bool:
    """True iff c2 is a translate of c1 by an element of the modulus."""
    _require_resolved(c1, c2)
    if c1.rank != c2.rank:
        raise RankMismatch("cut ranks differ")
    if isinstance(c1, Infinity) or isinstance(c2, Infinity):
        return isinstance(c1, Infinity) and isinstance(c2, Infinity)
    e1, e2 = classify_edge(c1), classify_edge(c2)
    if e1.side != e2.side or e1.H != e2.H:
        return False
    return modulus.contains_mod(e2.alpha - e1.alpha, e1.H)


# -- text grammar -----------------------------------------------------------

def _render_point(g: GroupElement) -> str:
    return str(g)


def render_cut(c: Cut) -> str:
    if isinstance(c, Infinity):
        return "inf"
    if isinstance(c, PrincipalMinus):
        return f"{_render_point(c.gamma)}-"
    if isinstance(c, PrincipalPlus):
        return f"{_render_point(c.gamma)}+"
    if isinstance(c, EdgeMinus):
        return f"edge-({c.H.free_levels})@{_render_point(c.alpha)}"
    if isinstance(c, EdgePlus):
        return f"edge+({c.H.free_levels})@{_render_point(c.alpha)}"
    body = ";".join(_render_point(g) for g in c.prefix)
    return f"unresolved[{body}|{c.budget}]"


_EDGE = re.compile(r"^edge([+-])\((\d+)\)@(.+)$")
_UNRES = re.compile(r"^unresolved\[(.*)\|(\d+)\]$")


def parse_cut(text: str, rank: int | None = None) -> Cut:
    s = text.strip().replace(" ", "")
    if s == "inf":
        if rank is None:
            raise ValueError("rank is needed to parse 'inf'")
        return Infinity(rank)
    m = _EDGE.match(s)
    if m:
        alpha = parse_element(m.group(3), rank)
        H = ConvexSubgroup(alpha.rank, int(m.group(2)))
        return edge_minus(H, alpha) if m.group(1) == "-" else edge_plus(H, alpha)
    m = _UNRES.match(s)
    if m:
        body = m.group(1)
        prefix = tuple(parse_element(t, rank) for t in body.split(";")) if body else ()
        return Unresolved(prefix, int(m.group(2)))
    if s.endswith("-"):
        return PrincipalMinus(parse_element(s[:-1], rank))
    if s.endswith("+"):
        return PrincipalPlus(parse_element(s[:-1], rank))
    raise ValueError(f"cannot parse cut {text!r}")


def cofinal_caps(c: ResolvedCut, p: int = 2):
    """Yield an increasing sequence of points cofinal in the lower set of c.

    Used to enumerate a series term by term when only its safe cap is known.
    """
    r = c.rank
    n = 0
    while True:
        eps = Fraction(1, p ** n)
        big = Fraction(p ** n)
        if isinstance(c, Infinity):
            yield GroupElement.unit(r, 0, big)
        elif isinstance(c, PrincipalMinus):
            yield c.gamma - GroupElement.unit(r, r - 1, eps)
        elif isinstance(c, PrincipalPlus):
            yield c.gamma
            return
        elif isinstance(c, EdgeMinus):
            yield c.alpha - GroupElement.unit(r, c.H.fixed - 1, eps)
        else:
            yield c.alpha + GroupElement.unit(r, c.H.fixed, big)
        n += 1
