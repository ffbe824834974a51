"""Exact scalars: the cyclotomic field Q(zeta_N) and the root group mu_N.

Elements of Q(zeta_N) are stored as integer coefficient vectors over the power
basis 1, X, ..., X^(phi(N)-1) modulo the cyclotomic polynomial Phi_N, with a
single positive common denominator.  Roots of unity are stored additively as
exponents mod N (``RootExp``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

__all__ = [
    "RootExp",
    "CycloNum",
    "cyclotomic_poly",
    "embed",
    "zero",
    "one",
]


def _poly_divmod(num: list, den: list) -> tuple[list, list]:
    # coefficient lists, lowest degree first; den is monic
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    dd = len(den) - 1
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            q[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    r = num[:dd] if dd > 0 else [0]
    return q, r


@lru_cache(maxsize=None)
def cyclotomic_poly(N: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_N, lowest degree first."""
    if N < 1:
        raise ValueError("N must be positive")
    poly = [-1] + [0] * (N - 1) + [1]
    for d in range(1, N):
        if N % d == 0:
            poly, r = _poly_divmod(poly, list(cyclotomic_poly(d)))
            assert not any(r)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return tuple(poly)


@lru_cache(maxsize=None)
def _context(N: int):
    phi = cyclotomic_poly(N)
    deg = len(phi) - 1
    # X^k mod Phi_N for 0 <= k < max(N, 2*deg - 1)
    top = max(N, 2 * deg - 1)
    red = []
    cur = [0] * deg
    cur[0] = 1
    for _ in range(top):
        red.append(tuple(cur))
        lead = cur[-1]
        cur = [0] + cur[:-1]
        if lead:
            for j in range(deg):
                cur[j] -= lead * phi[j]
    return deg, tuple(red)


Number = Union[int, Fraction, "CycloNum"]


class CycloNum:
    """An element of Q(zeta_N) in canonical form.

    ``nums / den`` are the power-basis coefficients; ``den > 0`` and
    ``gcd(*nums, den) == 1``.  Instances are immutable and hashable.
    """

    __slots__ = ("N", "nums", "den", "_hash")

    def __init__(self, N: int, nums: Iterable[int], den: int = 1, _normalized: bool = False):
        nums = tuple(nums)
        deg = _context(N)[0]
        if len(nums) != deg:
            raise ValueError(f"expected {deg} coefficients for N={N}, got {len(nums)}")
        if not _normalized:
            if den == 0:
                raise ZeroDivisionError("zero denominator")
            if den < 0:
                den = -den
                nums = tuple(-a for a in nums)
            g = math.gcd(den, *nums)
            if g > 1:
                den //= g
                nums = tuple(a // g for a in nums)
        self.N = N
        self.nums = nums
        self.den = den
        self._hash = None

    # -- construction -------------------------------------------------
    @classmethod
    def from_rational(cls, N: int, q: Union[int, Fraction]) -> "CycloNum":
        q = Fraction(q)
        deg = _context(N)[0]
        return cls(N, (q.numerator,) + (0,) * (deg - 1), q.denominator)

    @classmethod
    def from_coeffs(cls, N: int, coeffs: Iterable[Union[int, Fraction]]) -> "CycloNum":
        coeffs = [Fraction(c) for c in coeffs]
        den = 1
        for c in coeffs:
            den = den * c.denominator // math.gcd(den, c.denominator)
        return cls(N, [int(c * den) for c in coeffs], den)

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(a, self.den) for a in self.nums)

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return not any(self.nums)

    def is_one(self) -> bool:
        return self.den == 1 and self.nums[0] == 1 and not any(self.nums[1:])

    def is_rational(self) -> bool:
        return not any(self.nums[1:])

    def __bool__(self) -> bool:
        return any(self.nums)

    def __eq__(self, other) -> bool:
        if isinstance(other, CycloNum):
            return self.N == other.N and self.den == other.den and self.nums == other.nums
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and Fraction(self.nums[0], self.den) == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.N, self.nums, self.den))
        return self._hash

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "CycloNum":
        if isinstance(other, CycloNum):
            if other.N != self.N:
                raise ValueError(f"mixed cyclotomic orders {self.N} and {other.N}")
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNum.from_rational(self.N, other)
        raise TypeError(f"cannot combine CycloNum with {type(other).__name__}")

    def __add__(self, other) -> "CycloNum":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return CycloNum(self.N, [a + b for a, b in zip(self.nums, o.nums)], self.den)
        return CycloNum(
            self.N,
            [a * o.den + b * self.den for a, b in zip(self.nums, o.nums)],
            self.den * o.den,
        )

    __radd__ = __add__

    def __neg__(self) -> "CycloNum":
        return CycloNum(self.N, [-a for a in self.nums], self.den, _normalized=True)

    def __sub__(self, other) -> "CycloNum":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other) -> "CycloNum":
        return (-self) + other

    def __mul__(self, other) -> "CycloNum":
        if isinstance(other, int):
            return CycloNum(self.N, [a * other for a in self.nums], self.den)
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        deg, red = _context(self.N)
        a, b = self.nums, o.nums
        if deg == 1:
            return CycloNum(self.N, (a[0] * b[0],), self.den * o.den)
        if o.is_rational():
            c = b[0]
            return CycloNum(self.N, [x * c for x in a], self.den * o.den)
        if self.is_rational():
            c = a[0]
            return CycloNum(self.N, [x * c for x in b], self.den * o.den)
        prod = [0] * (2 * deg - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        prod[i + j] += x * y
        out = list(prod[:deg])
        for k in range(deg, 2 * deg - 1):
            c = prod[k]
            if c:
                r = red[k]
                for j in range(deg):
                    out[j] += c * r[j]
        return CycloNum(self.N, out, self.den * o.den)

    __rmul__ = __mul__

    def inv(self) -> "CycloNum":
        """Multiplicative inverse via the extended Euclidean algorithm with Phi_N."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(zeta_N)")
        deg = _context(self.N)[0]
        if self.is_rational():
            return CycloNum(self.N, (self.den,) + (0,) * (deg - 1), self.nums[0])
        # extended gcd in Q[X]: find u with u*a = 1 mod phi
        phi = [Fraction(c) for c in cyclotomic_poly(self.N)]
        a = [Fraction(c, self.den) for c in self.nums]
        r0, r1 = _trim(phi), _trim(a)
        s0, s1 = [Fraction(0)], [Fraction(1)]
        while len(r1) > 1 or r1[0] != 0:
            q, r = _qdivmod(r0, r1)
            r0, r1 = r1, r
            s0, s1 = s1, _trim(_psub(s0, _pmul(q, s1)))
        # r0 is a nonzero constant since Phi_N is irreducible
        c = r0[0]
        u = [x / c for x in s0]
        _, u = _qdivmod(u, phi)
        u = u + [Fraction(0)] * (deg - len(u))
        return CycloNum.from_coeffs(self.N, u[:deg])

    def __truediv__(self, other) -> "CycloNum":
        try:
            o = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other) -> "CycloNum":
        return self._coerce(other) * self.inv()

    def __pow__(self, k: int) -> "CycloNum":
        if k < 0:
            return self.inv() ** (-k)
        result = CycloNum.from_rational(self.N, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- display / io -------------------------------------------------
    def __repr__(self) -> str:
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
                if mono and c == 1:
                    terms.append(mono)
                elif mono and c == -1:
                    terms.append("-" + mono)
                else:
                    terms.append(f"{c}{'*' + mono if mono else ''}")
        body = " + ".join(terms) if terms else "0"
        return f"CycloNum[{self.N}]({body})"

    def to_json(self) -> dict:
        return {"N": self.N, "coeffs": [[c.numerator, c.denominator] for c in self.coeffs]}

    @classmethod
    def from_json(cls, data: dict) -> "CycloNum":
        return cls.from_coeffs(int(data["N"]), [Fraction(n, d) for n, d in data["coeffs"]])


def _trim(p):
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p or [Fraction(0)]


def _psub(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _qdivmod(num, den):
    num = _trim(num)
    den = _trim(den)
    if len(num) < len(den):
        return [Fraction(0)], num
    num = list(num)
    q = [Fraction(0)] * (len(num) - len(den) + 1)
    lead = den[-1]
    dd = len(den) - 1
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i] / lead
        if c:
            q[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    return _trim(q), _trim(num[:dd] if dd else [Fraction(0)])


@lru_cache(maxsize=None)
def zero(N: int) -> CycloNum:
    return CycloNum.from_rational(N, 0)


@lru_cache(maxsize=None)
def one(N: int) -> CycloNum:
    return CycloNum.from_rational(N, 1)


@lru_cache(maxsize=65536)
def _embed(n: int, N: int) -> CycloNum:
    deg, red = _context(N)
    return CycloNum(N, red[n % N], 1, _normalized=True)


@dataclass(frozen=True)
class RootExp:
    """The root of unity zeta_N^n, kept as its exponent."""

    n: int
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be positive")
        object.__setattr__(self, "n", self.n % self.N)

    def __mul__(self, other: "RootExp") -> "RootExp":
        if self.N != other.N:
            raise ValueError("mixed root orders")
        return RootExp(self.n + other.n, self.N)

    def inverse(self) -> "RootExp":
        return RootExp(-self.n, self.N)

    def order(self) -> int:
        return self.N // math.gcd(self.n, self.N)

    def lift(self, M: int) -> "RootExp":
        """Same root of unity viewed in mu_M, for N dividing M."""
        if M % self.N:
            raise ValueError(f"{self.N} does not divide {M}")
        return RootExp(self.n * (M // self.N), M)

    def to_json(self) -> dict:
        return {"n": self.n, "N": self.N}

    @classmethod
    def from_json(cls, data: dict) -> "RootExp":
        return cls(int(data["n"]), int(data["N"]))


def embed(r: Union[RootExp, int], N: int | None = None) -> CycloNum:
    """zeta_N^n as an element of Q(zeta_N)."""
    if isinstance(r, RootExp):
        return _embed(r.n, r.N)
    if N is None:
        raise TypeError("embed(int) needs N")
    return _embed(r % N, N)
