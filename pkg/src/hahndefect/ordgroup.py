"""Finite-rank lexicographically ordered subgroups of Q^r.

Every value group handled by the package is a lexicographic product of
subgroups of the rationals.  Elements of a group and of its divisible hull
share one representation, :class:`GroupElement`; subgroup membership is a
predicate supplied by :class:`OrderedGroupSpec`, :class:`DivisibleHull` and
:class:`ConvexSubgroup`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union


class RankMismatch(ValueError):
    pass


class Ordering(enum.IntEnum):
    LESS = -1
    EQUAL = 0
    GREATER = 1


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted; use Fraction or str")
    return Fraction(x)


@dataclass(frozen=True, order=True)
class GroupElement:
    """A point of the rank-r lexicographic group Q^r.

    Ordering is lexicographic with the leftmost coordinate most significant,
    which is exactly the tuple order on ``coords``.
    """

    coords: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(_frac(c) for c in self.coords))
        if not self.coords:
            raise ValueError("a group element needs at least one coordinate")

    @classmethod
    def _raw(cls, coords: tuple) -> "GroupElement":
        # internal fast path: coords are already a tuple of Fractions
        g = object.__new__(cls)
        object.__setattr__(g, "coords", coords)
        return g

    def __hash__(self) -> int:
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash(self.coords)
            object.__setattr__(self, "_hash", h)
        return h

    @classmethod
    def of(cls, *coords) -> "GroupElement":
        return cls(tuple(coords))

    @classmethod
    def zero(cls, rank: int) -> "GroupElement":
        return cls((Fraction(0),) * rank)

    @classmethod
    def unit(cls, rank: int, index: int, scale=1) -> "GroupElement":
        cs = [Fraction(0)] * rank
        cs[index] = _frac(scale)
        return cls(tuple(cs))

    @property
    def rank(self) -> int:
        return len(self.coords)

    def _check(self, other: "GroupElement") -> None:
        if self.rank != other.rank:
            raise RankMismatch(f"rank {self.rank} vs rank {other.rank}")

    def __add__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement._raw(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "GroupElement") -> "GroupElement":
        self._check(other)
        return GroupElement._raw(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GroupElement":
        return GroupElement._raw(tuple(-a for a in self.coords))

    def scale(self, factor) -> "GroupElement":
        f = _frac(factor)
        return GroupElement._raw(tuple(a * f for a in self.coords))

    def __mul__(self, factor) -> "GroupElement":
        if isinstance(factor, GroupElement):
            return NotImplemented
        return self.scale(factor)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def leading_index(self) -> int | None:
        """Index of the first nonzero coordinate, or None for zero."""
        for i, c in enumerate(self.coords):
            if c != 0:
                return i
        return None

    def sign(self) -> int:
        i = self.leading_index()
        if i is None:
            return 0
        return 1 if self.coords[i] > 0 else -1

    def __str__(self) -> str:
        if self.rank == 1:
            return str(self.coords[0])
        return "(" + ",".join(str(c) for c in self.coords) + ")"

    __repr__ = __str__


def parse_element(text: str, rank: int | None = None) -> GroupElement:
    """Parse ``-1/3`` or ``(0,1/2)`` into a group element."""
    s = text.strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    parts = [p.strip() for p in s.split(",")]
    g = GroupElement(tuple(Fraction(p) for p in parts))
    if rank is not None and g.rank != rank:
        raise RankMismatch(f"expected rank {rank}, got {g.rank} from {text!r}")
    return g


def compare(x: GroupElement, y: GroupElement) -> Ordering:
    x._check(y)
    if x.coords < y.coords:
        return Ordering.LESS
    if x.coords > y.coords:
        return Ordering.GREATER
    return Ordering.EQUAL


class CoordKind(enum.Enum):
    INTEGERS = "integers"  # p^(-level) Z
    P_POWER = "p-power"  # Z[1/p]
    RATIONALS = "rationals"


def p_adic_valuation(x: Fraction, p: int) -> int | None:
    """v_p(x) for nonzero rational x; None for x == 0."""
    if x == 0:
        return None
    v = 0
    n, d = x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def coord_member(x: Fraction, kind: CoordKind, p: int, level: int = 0) -> bool:
    if kind is CoordKind.RATIONALS:
        return True
    if kind is CoordKind.P_POWER:
        return _is_p_power(x.denominator, p)
    # INTEGERS scaled by p^(-level)
    return (x * Fraction(p) ** level).denominator == 1


@dataclass(frozen=True)
class ConvexSubgroup:
    """Elements whose first ``rank - free_levels`` coordinates vanish."""

    rank: int
    free_levels: int

    def __post_init__(self):
        if not 0 <= self.free_levels <= self.rank:
            raise ValueError(f"free_levels must lie in [0, {self.rank}]")

    @property
    def fixed(self) -> int:
        """Number of leading coordinates forced to zero."""
        return self.rank - self.free_levels

    @property
    def is_trivial(self) -> bool:
        return self.free_levels == 0

    @property
    def is_proper(self) -> bool:
        return self.free_levels < self.rank

    def contains(self, x: GroupElement) -> bool:
        if x.rank != self.rank:
            raise RankMismatch(f"rank {x.rank} vs subgroup of rank {self.rank}")
        return all(c == 0 for c in x.coords[: self.fixed])

    def __str__(self) -> str:
        return f"H{self.free_levels}"


@dataclass(frozen=True)
class DivisibleHull:
    rank: int

    def contains(self, x: GroupElement) -> bool:
        if x.rank != self.rank:
            raise RankMismatch(f"rank {x.rank} vs divisible hull of rank {self.rank}")
        return True

    def contains_mod(self, x: GroupElement, H: ConvexSubgroup) -> bool:
        return self.contains(x)


@dataclass(frozen=True)
class OrderedGroupSpec:
    """A lexicographic product of subgroups of Q, one descriptor per coordinate.

    ``level`` rescales every INTEGERS coordinate to p^(-level) Z.
    """

    prime: int
    kinds: tuple[CoordKind, ...]
    level: int = 0

    def __post_init__(self):
        if not self.kinds:
            raise ValueError("rank must be at least 1")
        object.__setattr__(self, "kinds", tuple(CoordKind(k) for k in self.kinds))

    @classmethod
    def uniform(cls, prime: int, kind: CoordKind, rank: int = 1, level: int = 0) -> "OrderedGroupSpec":
        return cls(prime, (kind,) * rank, level)

    @property
    def rank(self) -> int:
        return len(self.kinds)

    def hull(self) -> DivisibleHull:
        return DivisibleHull(self.rank)

    def contains(self, x: GroupElement) -> bool:
        if x.rank != self.rank:
            raise RankMismatch(f"rank {x.rank} vs group of rank {self.rank}")
        return all(coord_member(c, k, self.prime, self.level) for c, k in zip(x.coords, self.kinds))

    def contains_mod(self, x: GroupElement, H: ConvexSubgroup) -> bool:
        """Membership in the subgroup ``self + H``."""
        if x.rank != self.rank:
            raise RankMismatch(f"rank {x.rank} vs group of rank {self.rank}")
        return all(
            coord_member(c, k, self.prime, self.level)
            for c, k in list(zip(x.coords, self.kinds))[: H.fixed]
        )


Modulus = Union[OrderedGroupSpec, DivisibleHull, ConvexSubgroup]


def member(x: GroupElement, modulus: Modulus) -> bool:
    return modulus.contains(x)


def convex_subgroups(spec: OrderedGroupSpec | DivisibleHull) -> list[ConvexSubgroup]:
    """All proper convex subgroups of the divisible hull, smallest first."""
    return [ConvexSubgroup(spec.rank, j) for j in range(spec.rank)]


def rank_of(spec: OrderedGroupSpec | DivisibleHull) -> int:
    return len(convex_subgroups(spec))


def coset_order(x: GroupElement, spec: OrderedGroupSpec) -> int | None:
    """Order of x in the torsion group Q^r / spec, or None if x has infinite order."""
    n = 1
    for c, k in zip(x.coords, spec.kinds):
        if k is CoordKind.RATIONALS:
            continue
        den = c.denominator
        if k is CoordKind.INTEGERS:
            den = (c * Fraction(spec.prime) ** spec.level).denominator
        else:
            while den % spec.prime == 0:
                den //= spec.prime
        n = n * den // _gcd(n, den)
    return n


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def subgroup_index(values: Iterable[GroupElement], spec: OrderedGroupSpec) -> int:
    """Index (spec + <values> : spec) computed by closing the finite quotient."""
    gens = [v for v in values if not spec.contains(v)]
    seen: set[tuple] = {_reduce(GroupElement.zero(spec.rank), spec)}
    frontier = list(seen)
    reduced_gens = list({_reduce(g, spec) for g in gens})
    while frontier:
        nxt = []
        for r in frontier:
            for g in reduced_gens:
                s = _reduce(GroupElement(tuple(a + b for a, b in zip(r, g))), spec)
                if s not in seen:
                    seen.add(s)
                    nxt.append(s)
        frontier = nxt
    return len(seen)


def _reduce(x: GroupElement, spec: OrderedGroupSpec) -> tuple:
    """Canonical representative of x modulo spec, as a coordinate tuple."""
    out = []
    p = spec.prime
    for c, k in zip(x.coords, spec.kinds):
        if k is CoordKind.RATIONALS:
            out.append(Fraction(0))
        elif k is CoordKind.INTEGERS:
            scale = Fraction(p) ** spec.level
            y = c * scale
            out.append((y - (y.numerator // y.denominator)) / scale)
        else:
            # strip the p-part of the denominator, then reduce mod 1
            d = c.denominator
            pk = 1
            while d % p == 0:
                d //= p
                pk *= p
            num = c.numerator * pow(pk, -1, d) % d if d > 1 else 0
            out.append(Fraction(num, d))
    return tuple(out)
