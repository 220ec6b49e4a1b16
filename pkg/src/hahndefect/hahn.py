"""Hahn series over F_{p^d} with exponents in Q^r.

Two representations share the :class:`HahnSeries` type:

* closed form -- a finite part plus finitely many Frobenius tails.  A tail is
  the sequence of terms ``coeff_i * t^(shift + base * p^(-i))`` (shrinking) or
  ``coeff_i * t^(shift + base * p^i)`` (growing) for ``i >= start``, where
  ``coeff_i`` depends only on ``i mod d``.  Artin-Schreier roots of finite
  right-hand sides, their Frobenius roots, sums and monomial multiples all
  stay closed, which is what lets distances be certified exactly.
* lazy -- an opaque truncation function plus a safe cap.  Products,
  inverses and polynomial values end up here and are only ever materialized
  as finite truncations.

The safe cap is a cut: a truncation below ``cap`` is finite exactly when
``cap`` lies in the lower set of the safe cap.
"""

from __future__ import annotations

import heapq
import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Iterator, NamedTuple

from .cuts import (
    Cut,
    Infinity,
    cofinal_caps,
    cut_key,
    edge_minus,
    edge_plus,
    in_lower,
    min_cut,
    render_cut,
    scale_by,
    shift_cut,
)
from .gf import FiniteField
from .ordgroup import ConvexSubgroup, GroupElement, p_adic_valuation, parse_element


class TruncationUnbounded(ArithmeticError):
    pass


class DivisionByZero(ZeroDivisionError):
    pass


class ResidueNotSplit(ValueError):
    pass


class UnsupportedInput(ValueError):
    pass


class Term(NamedTuple):
    exp: GroupElement
    coeff: int


SHRINK = "shrink"
GROW = "grow"


@dataclass(frozen=True)
class FrobeniusTail:
    shift: GroupElement
    base: GroupElement
    direction: str
    start: int
    coeffs: tuple[int, ...]
    p: int

    @property
    def key(self) -> tuple:
        return (self.shift, self.base, self.direction)

    def exponent(self, i: int) -> GroupElement:
        step = Fraction(self.p) ** (-i if self.direction == SHRINK else i)
        return self.shift + self.base.scale(step)

    def coeff(self, i: int) -> int:
        return self.coeffs[i % len(self.coeffs)]

    def limit(self) -> Cut:
        """Cut generated by the tail's exponents (their supremum)."""
        r = self.base.rank
        k = self.base.leading_index()
        if self.direction == SHRINK:
            return edge_minus(ConvexSubgroup(r, r - k - 1), self.shift)
        return edge_plus(ConvexSubgroup(r, r - k), self.shift)

    def index_of(self, e: GroupElement) -> int | None:
        """Index i >= start with exponent(i) == e, if any."""
        diff = e - self.shift
        k = self.base.leading_index()
        lam = diff.coords[k] / self.base.coords[k]
        if lam <= 0 or diff != self.base.scale(lam):
            return None
        m = p_adic_valuation(lam, self.p)
        if lam != Fraction(self.p) ** m:
            return None
        i = -m if self.direction == SHRINK else m
        return i if i >= self.start else None

    def terms(self) -> Iterator[Term]:
        i = self.start
        while True:
            c = self.coeff(i)
            if c:
                yield Term(self.exponent(i), c)
            i += 1


def make_tail(F: FiniteField, shift: GroupElement, gamma: GroupElement, direction: str,
              start: int, coeffs) -> FrobeniusTail | None:
    """Build a tail in canonical form; returns None if all coefficients vanish.

    ``coeffs`` is either one coefficient (applied through Frobenius, i.e. the
    i-th coefficient is frob^(-i)(c) when shrinking and frob^i(c) when growing)
    or an explicit table indexed by ``i mod d``.
    """
    p, d = F.p, F.d
    if direction not in (SHRINK, GROW):
        raise ValueError(f"unknown tail direction {direction!r}")
    if isinstance(coeffs, int):
        c = F.coerce(coeffs)
        sgn = -1 if direction == SHRINK else 1
        table = tuple(F.frob_pow(c, sgn * r) for r in range(d))
    else:
        table = tuple(F.coerce(c) for c in coeffs)
        if len(table) != d:
            raise ValueError(f"coefficient table must have length {d}")
    if not any(table):
        return None
    sign = gamma.sign()
    if direction == SHRINK and sign >= 0:
        raise UnsupportedInput("a shrinking tail needs a negative base exponent")
    if direction == GROW and sign <= 0:
        raise UnsupportedInput("a growing tail needs a positive base exponent")
    k = gamma.leading_index()
    v = p_adic_valuation(gamma.coords[k], p)
    base = gamma.scale(Fraction(p) ** (-v))
    if direction == SHRINK:
        start, table = start - v, tuple(table[(r + v) % d] for r in range(d))
    else:
        start, table = start + v, tuple(table[(r - v) % d] for r in range(d))
    return FrobeniusTail(shift, base, direction, start, table, p)


@dataclass(frozen=True)
class _Lazy:
    fn: Callable[[GroupElement], list]
    safe_cap: Cut
    sup: GroupElement | None  # strict upper bound of a finite support
    desc: str


class HahnSeries:
    """An element of the Hahn field F_q((t^{Q^r}))."""

    def __init__(self, field: FiniteField, rank: int, finite=None, tails: Iterable[FrobeniusTail] = (),
                 _lazy: _Lazy | None = None):
        self.field = field
        self.rank = rank
        self._lazy = _lazy
        acc: dict[GroupElement, int] = {}
        if finite:
            items = finite.items() if isinstance(finite, dict) else finite
            for e, c in items:
                if e.rank != rank:
                    raise ValueError("exponent rank does not match series rank")
                acc[e] = field.add(acc.get(e, 0), field.coerce(c))
        self._finite = {e: c for e, c in acc.items() if c}
        self.tails = tuple(t for t in tails if t is not None)
        if self.tails:
            self._merge_tails()

    # -- constructors ----------------------------------------------------------

    @classmethod
    def zero(cls, field: FiniteField, rank: int = 1) -> "HahnSeries":
        return cls(field, rank)

    @classmethod
    def monomial(cls, field: FiniteField, exp: GroupElement, coeff: int = 1) -> "HahnSeries":
        return cls(field, exp.rank, {exp: coeff})

    @classmethod
    def constant(cls, field: FiniteField, c: int, rank: int = 1) -> "HahnSeries":
        return cls(field, rank, {GroupElement.zero(rank): c})

    @classmethod
    def from_terms(cls, field: FiniteField, rank: int, terms: Iterable[Term]) -> "HahnSeries":
        return cls(field, rank, [(t.exp, t.coeff) for t in terms])

    @classmethod
    def lazy(cls, field: FiniteField, rank: int, fn, safe_cap: Cut, sup=None, desc="lazy") -> "HahnSeries":
        return cls(field, rank, _lazy=_Lazy(fn, safe_cap, sup, desc))

    def _merge_tails(self) -> None:
        F = self.field
        groups: dict[tuple, list[FrobeniusTail]] = {}
        for t in self.tails:
            groups.setdefault(t.key, []).append(t)
        merged = []
        for ts in groups.values():
            s = min(t.start for t in ts)
            table = [0] * F.d
            for t in ts:
                for i in range(s, t.start):
                    # extending t down to s adds these terms; compensate in the finite part
                    e = t.exponent(i)
                    self._finite[e] = F.sub(self._finite.get(e, 0), t.coeff(i))
                for r in range(F.d):
                    table[r] = F.add(table[r], t.coeffs[r])
            if any(table):
                merged.append(FrobeniusTail(ts[0].shift, ts[0].base, ts[0].direction, s, tuple(table), F.p))
        self._finite = {e: c for e, c in self._finite.items() if c}
        self.tails = tuple(sorted(merged, key=lambda t: (cut_key(t.limit()), str(t.base), t.direction)))

    # -- basic structure -------------------------------------------------------

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def is_closed(self) -> bool:
        return self._lazy is None

    @property
    def finite_part(self) -> dict[GroupElement, int]:
        return dict(self._finite)

    def has_finite_support(self) -> bool:
        if self._lazy is not None:
            return self._lazy.sup is not None
        return not self.tails

    def support_sup(self) -> GroupElement | None:
        """A strict upper bound for the support when it is finite."""
        if self._lazy is not None:
            return self._lazy.sup
        if self.tails:
            return None
        if not self._finite:
            return GroupElement.zero(self.rank)
        return max(self._finite) + GroupElement.unit(self.rank, 0, 1)

    def safe_cap(self) -> Cut:
        if self._lazy is not None:
            return self._lazy.safe_cap
        if not self.tails:
            return Infinity(self.rank)
        return min_cut(*(t.limit() for t in self.tails))

    def coeff_at(self, e: GroupElement) -> int:
        """Exact coefficient of t^e (closed forms only)."""
        self._require_closed()
        F = self.field
        c = self._finite.get(e, 0)
        for t in self.tails:
            i = t.index_of(e)
            if i is not None:
                c = F.add(c, t.coeff(i))
        return c

    def _require_closed(self) -> None:
        if self._lazy is not None:
            raise UnsupportedInput(f"operation needs a closed-form series, got {self._lazy.desc}")

    # -- truncation and streams ------------------------------------------------

    def terms_below(self, cap: GroupElement) -> list[Term]:
        safe = self.safe_cap()
        if not in_lower(cap, safe):
            raise TruncationUnbounded(
                f"infinitely many terms below {cap} (safe cap {render_cut(safe)})")
        if self._lazy is not None:
            return list(self._lazy.fn(cap))
        F = self.field
        acc = {e: c for e, c in self._finite.items() if e < cap}
        for t in self.tails:
            i = t.start
            while True:
                e = t.exponent(i)
                if not e < cap:
                    break
                c = t.coeff(i)
                if c:
                    acc[e] = F.add(acc.get(e, 0), c)
                i += 1
        return [Term(e, acc[e]) for e in sorted(acc) if acc[e]]

    def truncate(self, cap: GroupElement) -> "HahnSeries":
        return HahnSeries.from_terms(self.field, self.rank, self.terms_below(cap))

    def iter_terms(self, max_rounds: int = 48) -> Iterator[Term]:
        """Terms in increasing order (the first omega of them).

        For lazy series without a finite support bound the stream is built from
        truncations at caps cofinal in the safe cap; ``max_rounds`` bounds how
        many caps are tried before the stream stops.
        """
        if self._lazy is None:
            yield from self._iter_closed()
            return
        sup = self._lazy.sup
        if sup is not None:
            yield from self._lazy.fn(sup)
            return
        last = None
        for n, cap in enumerate(cofinal_caps(self._lazy.safe_cap, self.p)):
            if n >= max_rounds:
                return
            for t in self._lazy.fn(cap):
                if last is None or t.exp > last:
                    last = t.exp
                    yield t

    def _iter_closed(self) -> Iterator[Term]:
        F = self.field
        streams = [iter(sorted(self._finite.items()))] + [t.terms() for t in self.tails]
        heap = []
        for sid, s in enumerate(streams):
            nxt = next(s, None)
            if nxt is not None:
                heap.append((nxt[0], sid, nxt[1]))
        heapq.heapify(heap)
        while heap:
            e, sid, c = heapq.heappop(heap)
            nxt = next(streams[sid], None)
            if nxt is not None:
                heapq.heappush(heap, (nxt[0], sid, nxt[1]))
            while heap and heap[0][0] == e:
                _, sid2, c2 = heapq.heappop(heap)
                c = F.add(c, c2)
                nxt = next(streams[sid2], None)
                if nxt is not None:
                    heapq.heappush(heap, (nxt[0], sid2, nxt[1]))
            if c:
                yield Term(e, c)

    def first_terms(self, n: int) -> list[Term]:
        out = []
        for t in self.iter_terms():
            if len(out) >= n:
                break
            out.append(t)
        return out

    def valuation(self) -> GroupElement | None:
        """Exponent of the first term; None stands for the value of zero."""
        for t in self.iter_terms():
            return t.exp
        return None

    def leading_coeff(self) -> int:
        for t in self.iter_terms():
            return t.coeff
        return 0

    def is_zero(self) -> bool:
        self._require_closed()
        return not self._finite and not self.tails

    # -- arithmetic --------------------------------------------------------------

    def _coerce_other(self, other) -> "HahnSeries":
        if isinstance(other, HahnSeries):
            if other.field != self.field or other.rank != self.rank:
                raise ValueError("series live in different Hahn fields")
            return other
        if isinstance(other, int):
            return HahnSeries.constant(self.field, self.field.scalar(other), self.rank)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return other
        if self.is_closed and other.is_closed:
            fin = list(self._finite.items()) + list(other._finite.items())
            return HahnSeries(self.field, self.rank, fin, self.tails + other.tails)
        x, y = self, other
        sup = None
        if x.support_sup() is not None and y.support_sup() is not None:
            sup = max(x.support_sup(), y.support_sup())
        return HahnSeries.lazy(self.field, self.rank, lambda cap: _add_terms(x, y, cap),
                               min_cut(x.safe_cap(), y.safe_cap()), sup, "sum")

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        if self.is_closed:
            tails = [FrobeniusTail(t.shift, t.base, t.direction, t.start,
                                   tuple(F.neg(c) for c in t.coeffs), t.p) for t in self.tails]
            return HahnSeries(F, self.rank, {e: F.neg(c) for e, c in self._finite.items()}, tails)
        x = self
        return HahnSeries.lazy(F, self.rank, lambda cap: [Term(t.exp, F.neg(t.coeff)) for t in x.terms_below(cap)],
                               x.safe_cap(), x.support_sup(), "negation")

    def __sub__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def mul_monomial(self, exp: GroupElement, coeff: int = 1) -> "HahnSeries":
        F = self.field
        coeff = F.coerce(coeff)
        if coeff == 0:
            return HahnSeries.zero(F, self.rank)
        if self.is_closed:
            fin = {e + exp: F.mul(c, coeff) for e, c in self._finite.items()}
            tails = [FrobeniusTail(t.shift + exp, t.base, t.direction, t.start,
                                   tuple(F.mul(c, coeff) for c in t.coeffs), t.p) for t in self.tails]
            return HahnSeries(F, self.rank, fin, tails)
        x = self
        sup = x.support_sup()
        return HahnSeries.lazy(
            F, self.rank,
            lambda cap: [Term(t.exp + exp, F.mul(t.coeff, coeff)) for t in x.terms_below(cap - exp)],
            shift_cut(x.safe_cap(), exp), None if sup is None else sup + exp, "monomial multiple")

    def _as_monomial(self):
        if self.is_closed and not self.tails and len(self._finite) == 1:
            (e, c), = self._finite.items()
            return e, c
        return None

    def __mul__(self, other):
        other = self._coerce_other(other)
        if other is NotImplemented:
            return other
        mono = other._as_monomial()
        if mono is not None:
            return self.mul_monomial(*mono)
        mono = self._as_monomial()
        if mono is not None:
            return other.mul_monomial(*mono)
        if self.is_closed and other.is_closed and not self.tails and not other.tails:
            terms = _convolve(self.field, list(self._finite.items()), list(other._finite.items()), None)
            return HahnSeries(self.field, self.rank, terms)
        x, y = self, other
        vx, vy = x.valuation(), y.valuation()
        if vx is None or vy is None:
            return HahnSeries.zero(self.field, self.rank)
        safe = min_cut(shift_cut(x.safe_cap(), vy), shift_cut(y.safe_cap(), vx))
        sup = None
        if x.support_sup() is not None and y.support_sup() is not None:
            sup = x.support_sup() + y.support_sup()
        return HahnSeries.lazy(self.field, self.rank, lambda cap: _mul_terms(x, y, cap, vx, vy),
                               safe, sup, "product")

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "HahnSeries":
        if n < 0:
            return self.inverse() ** (-n)
        out = HahnSeries.constant(self.field, 1, self.rank)
        for _ in range(n):
            out = out * self
        return out

    def inverse(self) -> "HahnSeries":
        x = self
        lead = x.valuation()
        if lead is None:
            raise DivisionByZero("inverse of the zero series")
        F = self.field
        c = x.leading_coeff()
        u = x.mul_monomial(-lead, F.inv(c)) - 1
        vu = u.valuation()
        safe_u = u.safe_cap()
        if vu is not None:
            k = vu.leading_index()
            safe_u = min_cut(safe_u, edge_plus(ConvexSubgroup(self.rank, self.rank - k), GroupElement.zero(self.rank)))
        return HahnSeries.lazy(F, self.rank, lambda cap: _invert_terms(x, cap), shift_cut(safe_u, -lead),
                               None, "inverse")

    def frobenius_power(self) -> "HahnSeries":
        """x^p, computed termwise (Frobenius is additive in characteristic p)."""
        F = self.field
        p, d = F.p, F.d
        if self.is_closed:
            fin = {e.scale(p): F.frob(c) for e, c in self._finite.items()}
            tails = []
            for t in self.tails:
                if t.direction == GROW:
                    table = tuple(F.frob(t.coeffs[(r - 1) % d]) for r in range(d))
                    tails.append(FrobeniusTail(t.shift.scale(p), t.base, GROW, t.start + 1, table, p))
                else:
                    table = tuple(F.frob(t.coeffs[(r + 1) % d]) for r in range(d))
                    tails.append(FrobeniusTail(t.shift.scale(p), t.base, SHRINK, t.start - 1, table, p))
            return HahnSeries(F, self.rank, fin, tails)
        x = self
        sup = x.support_sup()
        return HahnSeries.lazy(
            F, self.rank,
            lambda cap: [Term(t.exp.scale(p), F.frob(t.coeff)) for t in x.terms_below(cap.scale(Fraction(1, p)))],
            scale_by(x.safe_cap(), p), None if sup is None else sup.scale(p), "frobenius power")

    def frobenius_root(self) -> "HahnSeries":
        F = self.field
        p, d = F.p, F.d
        inv_p = Fraction(1, p)
        if self.is_closed:
            fin = {e.scale(inv_p): F.frob_inv(c) for e, c in self._finite.items()}
            tails = []
            for t in self.tails:
                if t.direction == SHRINK:
                    table = tuple(F.frob_inv(t.coeffs[(r - 1) % d]) for r in range(d))
                    tails.append(FrobeniusTail(t.shift.scale(inv_p), t.base, SHRINK, t.start + 1, table, p))
                else:
                    table = tuple(F.frob_inv(t.coeffs[(r + 1) % d]) for r in range(d))
                    tails.append(FrobeniusTail(t.shift.scale(inv_p), t.base, GROW, t.start - 1, table, p))
            return HahnSeries(F, self.rank, fin, tails)
        x = self
        sup = x.support_sup()
        return HahnSeries.lazy(
            F, self.rank,
            lambda cap: [Term(t.exp.scale(inv_p), F.frob_inv(t.coeff)) for t in x.terms_below(cap.scale(p))],
            scale_by(x.safe_cap(), inv_p), None if sup is None else sup.scale(inv_p), "frobenius root")

    # -- comparison and text -----------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, HahnSeries):
            return NotImplemented
        if other.field != self.field or other.rank != self.rank:
            return False
        if not (self.is_closed and other.is_closed):
            raise UnsupportedInput("equality is only decidable between closed-form series")
        return (self - other).is_zero()

    __hash__ = None

    def __str__(self) -> str:
        return render_series(self)

    def __repr__(self) -> str:
        if self._lazy is not None:
            return f"HahnSeries(<{self._lazy.desc}>)"
        return f"HahnSeries({render_series(self)!r})"


# -- truncated arithmetic -------------------------------------------------------

def _convolve(F: FiniteField, xs, ys, cap) -> list:
    acc: dict[GroupElement, int] = {}
    for ex, cx in xs:
        for ey, cy in ys:
            e = ex + ey
            if cap is not None and not e < cap:
                continue
            acc[e] = F.add(acc.get(e, 0), F.mul(cx, cy))
    return [Term(e, acc[e]) for e in sorted(acc) if acc[e]]


def _add_terms(x: HahnSeries, y: HahnSeries, cap: GroupElement) -> list[Term]:
    F = x.field
    acc: dict[GroupElement, int] = {}
    for t in list(x.terms_below(cap)) + list(y.terms_below(cap)):
        acc[t.exp] = F.add(acc.get(t.exp, 0), t.coeff)
    return [Term(e, acc[e]) for e in sorted(acc) if acc[e]]


def _mul_terms(x: HahnSeries, y: HahnSeries, cap: GroupElement, vx=None, vy=None) -> list[Term]:
    vx = x.valuation() if vx is None else vx
    vy = y.valuation() if vy is None else vy
    if vx is None or vy is None:
        return []
    xs = x.terms_below(cap - vy)
    ys = y.terms_below(cap - vx)
    return _convolve(x.field, xs, ys, cap)


def _powers_needed(vu: GroupElement, cap: GroupElement) -> int:
    """Smallest N with N * vu >= cap (vu > 0); raises if no such N exists."""
    if cap.sign() <= 0:
        return 0
    k, kc = vu.leading_index(), cap.leading_index()
    if k > kc:
        raise TruncationUnbounded("geometric series has infinitely many terms below the cap")
    n = 1
    while vu.scale(n) < cap:
        n *= 2
    return n


def _invert_terms(x: HahnSeries, cap: GroupElement) -> list[Term]:
    F = x.field
    lead = x.valuation()
    if lead is None:
        raise DivisionByZero("inverse of the zero series")
    c_inv = F.inv(x.leading_coeff())
    inner_cap = cap + lead
    u = (x.mul_monomial(-lead, c_inv) - 1)
    one = [Term(GroupElement.zero(x.rank), 1)]
    if not GroupElement.zero(x.rank) < inner_cap:
        return []
    us = u.terms_below(inner_cap)
    if not us:
        total = one
    else:
        _powers_needed(us[0].exp, inner_cap)
        neg_u = [(t.exp, F.neg(t.coeff)) for t in us]
        acc = {t.exp: t.coeff for t in one}
        power = [(t.exp, t.coeff) for t in one]
        while True:
            power = _convolve(F, power, neg_u, inner_cap)
            if not power:
                break
            for e, cc in power:
                acc[e] = F.add(acc.get(e, 0), cc)
        total = [Term(e, acc[e]) for e in sorted(acc) if acc[e]]
    return [Term(t.exp - lead, F.mul(t.coeff, c_inv)) for t in total if t.exp - lead < cap]


def arith(op: str, x: HahnSeries, y: HahnSeries | None = None, *, cap: GroupElement) -> list[Term]:
    """Exact terms below ``cap`` of x+y, -x, x*y or 1/x."""
    if op == "add":
        return _add_terms(x, y, cap)
    if op == "negate":
        return [Term(t.exp, x.field.neg(t.coeff)) for t in x.terms_below(cap)]
    if op == "mul":
        return _mul_terms(x, y, cap)
    if op == "invert":
        return _invert_terms(x, cap)
    raise ValueError(f"unknown operation {op!r}")


def valuation(x: HahnSeries) -> GroupElement | None:
    return x.valuation()


def terms_below(x: HahnSeries, cap: GroupElement) -> list[Term]:
    return x.terms_below(cap)


def frobenius_root(x: HahnSeries) -> HahnSeries:
    return x.frobenius_root()


# -- Artin-Schreier roots --------------------------------------------------------

def artin_schreier_root(b: HahnSeries) -> HahnSeries:
    """The canonical root of X^p - X = b for finitely supported b.

    Negative-exponent terms contribute sum_{i>=1} (c t^g)^(1/p^i), positive ones
    -sum_{i>=0} (c t^g)^(p^i), and the constant term is solved in the
    coefficient field (smallest element code among the p solutions).
    """
    if not b.has_finite_support() or not b.is_closed:
        raise UnsupportedInput("artin_schreier_root needs a finitely supported right-hand side")
    F = b.field
    zero = GroupElement.zero(b.rank)
    tails = []
    theta0 = 0
    for e, c in sorted(b.finite_part.items()):
        s = e.sign()
        if s < 0:
            tails.append(make_tail(F, zero, e, SHRINK, 1, c))
        elif s > 0:
            tails.append(make_tail(F, zero, e, GROW, 0, F.neg(c)))
        else:
            root = F.artin_schreier_solve(c)
            if root is None:
                raise ResidueNotSplit(f"y^p - y = {c} has no solution in {F}")
            theta0 = root
    return HahnSeries(F, b.rank, {zero: theta0} if theta0 else {}, tails)


def artin_schreier_operator(x: HahnSeries) -> HahnSeries:
    """x^p - x."""
    return x.frobenius_power() - x


# -- polynomials -------------------------------------------------------------------

@dataclass(frozen=True)
class Polynomial:
    """f = sum coeffs[k] X^k with coefficients in the Hahn field."""

    coeffs: tuple

    def __post_init__(self):
        cs = tuple(self.coeffs)
        while len(cs) > 1 and cs[-1].is_closed and cs[-1].is_zero():
            cs = cs[:-1]
        if not cs:
            raise ValueError("a polynomial needs at least one coefficient")
        object.__setattr__(self, "coeffs", cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def field(self) -> FiniteField:
        return self.coeffs[0].field

    def evaluate(self, a: HahnSeries) -> HahnSeries:
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * a + c
        return acc

    def __str__(self) -> str:
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_closed and c.is_zero():
                continue
            mono = "" if k == 0 else ("X" if k == 1 else f"X^{k}")
            parts.append(f"({render_series(c)})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) if parts else "0"


def hasse_taylor_series(f: Polynomial, c: HahnSeries) -> list[HahnSeries]:
    """The Hasse derivatives f_i(c), i = 0..deg f, i.e. f(c+Y) = sum f_i(c) Y^i."""
    F = f.field
    n = f.degree
    powers = [HahnSeries.constant(F, 1, c.rank)]
    for _ in range(n):
        powers.append(powers[-1] * c)
    out = []
    for i in range(n + 1):
        acc = HahnSeries.zero(F, c.rank)
        for k in range(i, n + 1):
            b = F.scalar(comb(k, i))
            if b:
                acc = acc + f.coeffs[k] * powers[k - i] * b
        out.append(acc)
    return out


def hasse_taylor(f: Polynomial, c: HahnSeries, cap: GroupElement) -> list[list[Term]]:
    return [s.terms_below(cap) for s in hasse_taylor_series(f, c)]


# -- text grammar --------------------------------------------------------------------

def _render_exp(e: GroupElement) -> str:
    return f"({e})" if e.rank == 1 else str(e)


def render_series(x: HahnSeries) -> str:
    if not x.is_closed:
        raise UnsupportedInput("only closed-form series have a literal rendering")
    parts = []
    for e, c in sorted(x.finite_part.items()):
        if e.is_zero():
            parts.append(str(c))
        else:
            parts.append(("" if c == 1 else f"{c}*") + f"t^{_render_exp(e)}")
    for t in x.tails:
        coeff = str(t.coeffs[0]) if len(t.coeffs) == 1 else "[" + ";".join(map(str, t.coeffs)) + "]"
        parts.append(f"frobtail(gamma={t.base},dir={t.direction},coeff={coeff},"
                     f"start={t.start},shift={t.shift},table=1)")
    return " + ".join(parts) if parts else "0"


def _split_top(s: str) -> list[str]:
    """Split a series literal on top-level + and binary -."""
    out, depth, cur = [], 0, ""
    prev = ""
    for ch in s:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if depth == 0 and ch == "+":
            out.append(cur)
            cur, prev = "", ""
            continue
        if depth == 0 and ch == "-" and prev and prev not in "(^,=*[;":
            out.append(cur)
            cur, prev = "-", "-"
            continue
        cur += ch
        if not ch.isspace():
            prev = ch
    out.append(cur)
    return [p.strip() for p in out if p.strip()]


_TAIL = re.compile(r"^frobtail\((.*)\)$")


def _parse_tail(body: str, F: FiniteField, rank: int, mult: int) -> FrobeniusTail | None:
    kw = {}
    depth, cur = 0, ""
    for ch in body + ",":
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
        if ch == "," and depth == 0:
            k, _, v = cur.partition("=")
            kw[k.strip()] = v.strip()
            cur = ""
        else:
            cur += ch
    direction = {"shrink": SHRINK, "shrinking": SHRINK, "grow": GROW, "growing": GROW}[kw.get("dir", "shrink")]
    gamma = parse_element(kw["gamma"], rank)
    start = int(kw.get("start", 1 if direction == SHRINK else 0))
    shift = parse_element(kw["shift"], rank) if "shift" in kw else GroupElement.zero(rank)
    raw = kw.get("coeff", "1")
    if raw.startswith("["):
        coeffs = [F.mul(F.coerce(int(v)), mult) for v in raw[1:-1].split(";")]
    else:
        c = F.mul(F.coerce(int(raw)), mult)
        coeffs = c if kw.get("table") != "1" else [c]
    return make_tail(F, shift, gamma, direction, start, coeffs)


def parse_series(text: str, field: FiniteField, rank: int = 1) -> HahnSeries:
    """Parse literals such as ``t^(-1) + 2*t^(1/2) + frobtail(gamma=-1, dir=shrink, coeff=1)``."""
    s = text.strip()
    if s in ("", "0"):
        return HahnSeries.zero(field, rank)
    finite: list[tuple[GroupElement, int]] = []
    tails = []
    for part in _split_top(s):
        sign = 1
        if part.startswith("-"):
            sign, part = -1, part[1:].strip()
        coeff = 1
        if "*" in part and not part.startswith("frobtail"):
            head, _, part = part.partition("*")
            coeff = int(head)
        mult = field.mul(field.coerce(coeff) if field.d > 1 else coeff % field.p, field.scalar(sign))
        m = _TAIL.match(part)
        if m:
            tails.append(_parse_tail(m.group(1), field, rank, mult))
            continue
        if part.startswith("t"):
            if part == "t":
                e = GroupElement.unit(rank, rank - 1, 1)
            else:
                if not part.startswith("t^"):
                    raise ValueError(f"cannot parse term {part!r}")
                e = parse_element(part[2:], rank)
            finite.append((e, mult))
        else:
            c = int(part)
            finite.append((GroupElement.zero(rank), field.mul(field.coerce(c) if field.d > 1 else c % field.p,
                                                              field.mul(field.coerce(coeff) if field.d > 1 else coeff % field.p,
                                                                        field.scalar(sign)))))
    return HahnSeries(field, rank, finite, tails)
