"""Exact arithmetic in real quadratic fields.

Numbers are stored as ``(p + q*sqrt(d)) / r`` with integer ``p, q, r`` and a
square-free ``d``.  Rationals are the ``q == 0`` case (``d`` is normalised to 1).
Mixing two irrationals from different fields raises ``ValueError``.
"""
from __future__ import annotations

import contextlib
import math
import re
from fractions import Fraction
from numbers import Rational

from mpmath import iv, mp, mpf

DEFAULT_PRECISION = 128


def squarefree_part(n: int) -> tuple[int, int]:
    """Return ``(s, f)`` with ``n == s * f**2`` and ``s`` square-free."""
    if n <= 0:
        raise ValueError("radicand must be positive")
    s, f = 1, 1
    m = n
    k = 2
    while k * k <= m:
        while m % (k * k) == 0:
            m //= k * k
            f *= k
        k += 1
    s = m
    return s, f


@contextlib.contextmanager
def interval_precision(bits: int = DEFAULT_PRECISION):
    old = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = old


class QuadraticIrrational:
    __slots__ = ("p", "q", "r", "d")

    def __init__(self, p: int, q: int = 0, r: int = 1, d: int = 1):
        if r == 0:
            raise ZeroDivisionError("denominator r must be nonzero")
        if q != 0:
            s, f = squarefree_part(d)
            q *= f
            d = s
            if d == 1:
                p, q = p + q, 0
        if q == 0:
            d = 1
        if r < 0:
            p, q, r = -p, -q, -r
        g = math.gcd(math.gcd(p, q), r)
        if g > 1:
            p, q, r = p // g, q // g, r // g
        self.p, self.q, self.r, self.d = p, q, r, d

    # construction helpers -------------------------------------------------
    @classmethod
    def sqrt(cls, n) -> "QuadraticIrrational":
        n = Fraction(n)
        if n < 0:
            raise ValueError("negative radicand")
        # sqrt(a/b) = sqrt(a*b)/b
        return cls(0, 1, n.denominator, n.numerator * n.denominator) if n else cls(0)

    @classmethod
    def from_rational(cls, x) -> "QuadraticIrrational":
        x = Fraction(x)
        return cls(x.numerator, 0, x.denominator)

    # predicates -----------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.q == 0

    def as_fraction(self) -> Fraction:
        if self.q:
            raise ValueError(f"{self} is irrational")
        return Fraction(self.p, self.r)

    @property
    def rational_part(self) -> Fraction:
        return Fraction(self.p, self.r)

    @property
    def irrational_coefficient(self) -> Fraction:
        """Coefficient ``e`` in ``x = c + e*sqrt(d)``."""
        return Fraction(self.q, self.r)

    def conjugate(self) -> "QuadraticIrrational":
        return QuadraticIrrational(self.p, -self.q, self.r, self.d)

    def norm(self) -> Fraction:
        return Fraction(self.p * self.p - self.q * self.q * self.d, self.r * self.r)

    # arithmetic -----------------------------------------------------------
    def _field(self, other: "QuadraticIrrational") -> int:
        if self.q and other.q and self.d != other.d:
            raise ValueError(f"cannot mix Q(sqrt({self.d})) and Q(sqrt({other.d}))")
        return self.d if self.q else other.d

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        d = self._field(other)
        return QuadraticIrrational(
            self.p * other.r + other.p * self.r, self.q * other.r + other.q * self.r, self.r * other.r, d
        )

    __radd__ = __add__

    def __neg__(self):
        return QuadraticIrrational(-self.p, -self.q, self.r, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        d = self._field(other)
        return QuadraticIrrational(
            self.p * other.p + self.q * other.q * d,
            self.p * other.q + self.q * other.p,
            self.r * other.r,
            d,
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadraticIrrational":
        # r / (p + q sqrt d) = r (p - q sqrt d) / (p^2 - q^2 d)
        den = self.p * self.p - self.q * self.q * self.d
        if den == 0:
            raise ZeroDivisionError("division by zero")
        return QuadraticIrrational(self.r * self.p, -self.r * self.q, den, self.d)

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other * self.inverse()

    def __abs__(self):
        return -self if self.sign() < 0 else self

    # order ------------------------------------------------------------------
    def sign(self) -> int:
        p, q = self.p, self.q
        if q == 0:
            return (p > 0) - (p < 0)
        if p >= 0 and q > 0:
            return 1
        if p <= 0 and q < 0:
            return -1
        # opposite signs: compare p^2 with q^2 d
        lhs, rhs = p * p, q * q * self.d
        if p > 0:
            return 1 if lhs > rhs else -1
        return 1 if rhs > lhs else -1

    def _cmp(self, other) -> int:
        other = _coerce(other)
        if other is NotImplemented:
            raise TypeError(f"cannot compare with {type(other)}")
        return (self - other).sign()

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return (self.p, self.q, self.r, self.d) == (other.p, other.q, other.r, other.d)

    def __hash__(self):
        if self.q == 0:
            return hash(Fraction(self.p, self.r))
        return hash((self.p, self.q, self.r, self.d))

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __bool__(self):
        return self.p != 0 or self.q != 0

    # rounding ---------------------------------------------------------------
    def __floor__(self) -> int:
        if self.q == 0:
            return self.p // self.r
        s = math.isqrt(self.q * self.q * self.d)
        fl = s if self.q > 0 else -s - 1  # floor(q*sqrt(d)), never an integer
        return (self.p + fl) // self.r

    def __ceil__(self) -> int:
        f = math.floor(self)
        return f if self.q == 0 and f * self.r == self.p else f + 1

    def frac(self) -> "QuadraticIrrational":
        return self - math.floor(self)

    def dist_to_int(self) -> "QuadraticIrrational":
        f = self.frac()
        g = 1 - f
        return f if f <= g else g

    # conversions ---------------------------------------------------------
    def to_mpf(self, bits: int = DEFAULT_PRECISION):
        with mp.workprec(bits + 32):
            return (mpf(self.p) + mpf(self.q) * mp.sqrt(self.d)) / self.r

    def __float__(self):
        return float(self.to_mpf(80))

    def to_interval(self, bits: int = DEFAULT_PRECISION):
        with interval_precision(bits):
            return (iv.mpf(self.p) + iv.mpf(self.q) * iv.sqrt(self.d)) / self.r

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "r": self.r, "d": self.d}

    @classmethod
    def from_json(cls, obj: dict) -> "QuadraticIrrational":
        return cls(int(obj["p"]), int(obj["q"]), int(obj["r"]), int(obj["d"]))

    def __repr__(self):
        return f"QuadraticIrrational({self.p}, {self.q}, {self.r}, {self.d})"

    def __str__(self):
        if self.q == 0:
            return str(Fraction(self.p, self.r))
        body = f"{self.p}{'+' if self.q >= 0 else '-'}{abs(self.q)}*sqrt({self.d})"
        return f"({body})/{self.r}" if self.r != 1 else f"({body})"


def _coerce(x):
    if isinstance(x, QuadraticIrrational):
        return x
    if isinstance(x, (int, Rational)):
        x = Fraction(x)
        return QuadraticIrrational(x.numerator, 0, x.denominator)
    return NotImplemented


def exact(x) -> QuadraticIrrational:
    """Coerce ints, Fractions, strings and JSON dicts to ``QuadraticIrrational``."""
    if isinstance(x, QuadraticIrrational):
        return x
    if isinstance(x, dict):
        return QuadraticIrrational.from_json(x)
    if isinstance(x, str):
        return parse_exact(x)
    if isinstance(x, float):
        raise TypeError("floats are not exact; pass a Fraction or a string like '3/7'")
    y = _coerce(x)
    if y is NotImplemented:
        raise TypeError(f"cannot interpret {x!r} as an exact number")
    return y


_QI_RE = re.compile(
    r"^\(\s*(?P<p>[+-]?\d+)\s*(?P<sign>[+-])\s*(?:(?P<q>\d+)\s*\*\s*)?sqrt\s*\(?\s*(?P<d>\d+)\s*\)?\s*\)\s*(?:/\s*(?P<r>[+-]?\d+))?$"
)


def parse_exact(text: str) -> QuadraticIrrational:
    """Parse ``p/q`` or ``(p+q*sqrt d)/r`` (also ``sqrt(d)`` with parentheses)."""
    t = text.strip()
    m = _QI_RE.match(t)
    if m:
        q = int(m["q"] or 1) * (1 if m["sign"] == "+" else -1)
        return QuadraticIrrational(int(m["p"]), q, int(m["r"] or 1), int(m["d"]))
    try:
        return exact(Fraction(t))
    except ValueError:
        raise ValueError(f"cannot parse exact number {text!r}") from None


def format_exact(x: QuadraticIrrational) -> str:
    """Inverse of :func:`parse_exact`."""
    x = exact(x)
    if x.is_rational:
        return str(x.as_fraction())
    sign = "+" if x.q >= 0 else "-"
    return f"({x.p}{sign}{abs(x.q)}*sqrt({x.d}))/{x.r}"


def decimal_string(x, bits: int = DEFAULT_PRECISION) -> str:
    digits = int(bits * 0.30103)
    v = exact(x).to_mpf(bits)
    with mp.workprec(bits + 32):
        return mp.nstr(v, digits)


GOLDEN_CONJ = QuadraticIrrational(-1, 1, 2, 5)  # (sqrt5 - 1)/2
SILVER_CONJ = QuadraticIrrational(-1, 1, 1, 2)  # sqrt2 - 1
