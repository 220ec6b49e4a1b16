"""Small finite fields F_{p^d} with table-driven arithmetic.

Elements are ints in ``range(p**d)``; the base-p digits are the coefficients
of a polynomial in x reduced modulo a fixed monic irreducible of degree d
(the first one in lexicographic order).  Fields are cached per (p, d).
"""

from __future__ import annotations

from functools import lru_cache
from itertools import product


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def _poly_mulmod(a: list[int], b: list[int], modpoly: list[int], p: int) -> list[int]:
    d = len(modpoly) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] = (prod[i + j] + x * y) % p
    # reduce by the monic modulus, highest degree first
    for k in range(len(prod) - 1, d - 1, -1):
        c = prod[k]
        if c:
            for j in range(d + 1):
                prod[k - d + j] = (prod[k - d + j] - c * modpoly[j]) % p
    out = prod[:d] + [0] * max(0, d - len(prod))
    return out


def _is_irreducible(poly: list[int], p: int) -> bool:
    """Irreducibility test by trial division over all monic polys of degree <= d/2."""
    d = len(poly) - 1
    for deg in range(1, d // 2 + 1):
        for tail in product(range(p), repeat=deg):
            divisor = list(tail) + [1]
            rem = list(poly)
            for k in range(d, deg - 1, -1):
                c = rem[k]
                if c:
                    for j in range(deg + 1):
                        rem[k - deg + j] = (rem[k - deg + j] - c * divisor[j]) % p
            if not any(rem[:deg]):
                return False
    return True


class FiniteField:
    def __init__(self, p: int, d: int = 1):
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        if d < 1:
            raise ValueError("extension degree must be positive")
        self.p = p
        self.d = d
        self.q = p ** d
        if d == 1:
            self.modulus = [0, 1]
        else:
            for tail in product(range(p), repeat=d):
                cand = list(tail) + [1]
                if cand[0] and _is_irreducible(cand, p):
                    self.modulus = cand
                    break
        self._digits = [self._to_digits(x) for x in range(self.q)]
        q = self.q
        self._add = [[self._from_digits([(a + b) % p for a, b in zip(self._digits[x], self._digits[y])])
                      for y in range(q)] for x in range(q)]
        self._mul = [[self._from_digits(_poly_mulmod(self._digits[x], self._digits[y], self.modulus, p))
                      for y in range(q)] for x in range(q)]
        self._neg = [self._from_digits([(-a) % p for a in self._digits[x]]) for x in range(q)]
        self._inv = [0] * q
        for x in range(1, q):
            for y in range(1, q):
                if self._mul[x][y] == 1:
                    self._inv[x] = y
                    break
        self._frob = [self.pow(x, p) for x in range(q)]
        self._frob_inv = [0] * q
        for x in range(q):
            self._frob_inv[self._frob[x]] = x

    def _to_digits(self, x: int) -> list[int]:
        out = []
        for _ in range(self.d):
            out.append(x % self.p)
            x //= self.p
        return out

    def _from_digits(self, ds: list[int]) -> int:
        x = 0
        for c in reversed(ds):
            x = x * self.p + c
        return x

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.d})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FiniteField) and (self.p, self.d) == (other.p, other.d)

    def __hash__(self) -> int:
        return hash((self.p, self.d))

    def elements(self) -> range:
        return range(self.q)

    def coerce(self, x: int) -> int:
        """Map an integer literal into the field; plain ints are read mod p for d = 1."""
        if self.d == 1:
            return x % self.p
        if not 0 <= x < self.q:
            raise ValueError(f"{x} is not an element code of {self}")
        return x

    def add(self, x: int, y: int) -> int:
        return self._add[x][y]

    def sub(self, x: int, y: int) -> int:
        return self._add[x][self._neg[y]]

    def neg(self, x: int) -> int:
        return self._neg[x]

    def mul(self, x: int, y: int) -> int:
        return self._mul[x][y]

    def inv(self, x: int) -> int:
        if x == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        return self._inv[x]

    def pow(self, x: int, n: int) -> int:
        if n < 0:
            return self.pow(self.inv(x), -n)
        r = 1
        b = x
        while n:
            if n & 1:
                r = self._mul[r][b]
            b = self._mul[b][b]
            n >>= 1
        return r

    def scalar(self, n: int) -> int:
        """Image of the integer n under Z -> F."""
        return n % self.p

    def frob(self, x: int) -> int:
        return self._frob[x]

    def frob_inv(self, x: int) -> int:
        return self._frob_inv[x]

    def frob_pow(self, x: int, k: int) -> int:
        """Apply Frobenius k times (k may be negative)."""
        k %= self.d
        for _ in range(k):
            x = self._frob[x]
        return x

    def in_subfield(self, x: int, e: int) -> bool:
        """True iff x lies in F_{p^e}; e must divide d."""
        return self.frob_pow(x, e) == x

    def subfield_degree(self, xs) -> int:
        """Smallest e | d with every x in F_{p^e}."""
        for e in range(1, self.d + 1):
            if self.d % e == 0 and all(self.in_subfield(x, e) for x in xs):
                return e
        return self.d

    def artin_schreier_solve(self, b: int) -> int | None:
        """Smallest code y with y^p - y = b, or None if the residue does not split."""
        for y in range(self.q):
            if self.sub(self._frob[y], y) == b:
                return y
        return None


@lru_cache(maxsize=None)
def gf(p: int, d: int = 1) -> FiniteField:
    return FiniteField(p, d)
