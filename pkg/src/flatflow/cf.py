"""Continued fractions, badly approximable rotations and rotation-pair certificates."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .quadratic import DEFAULT_PRECISION, QuadraticIrrational, decimal_string, exact

# Orbit screening evaluates frac(k*alpha + c) in float64 after splitting alpha
# into 26-bit integer chunks; the absolute error on the circle stays below this.
SCREEN_EPS = 2.0 ** -44
MAX_SCREEN_K = 2 ** 27


class RationalRotation(ValueError):
    """Raised when an operation requires an irrational rotation number."""


@dataclass(frozen=True)
class ContinuedFraction:
    preperiod: tuple[int, ...]
    period: tuple[int, ...] = ()
    # square-free radicand of the value when known; saves factoring large discriminants
    radicand: Optional[int] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(int(a) for a in self.preperiod))
        object.__setattr__(self, "period", tuple(int(a) for a in self.period))
        if not self.preperiod and not self.period:
            raise ValueError("empty continued fraction")
        terms = self.preperiod + self.period
        if any(a < 1 for a in terms[1:]):
            raise ValueError("partial quotients after a0 must be >= 1")
        if not self.preperiod and self.period[0] < 1:
            raise ValueError("a purely periodic expansion needs a0 >= 1")

    @property
    def is_rational(self) -> bool:
        return not self.period

    def term(self, i: int) -> int:
        n = len(self.preperiod)
        if i < n:
            return self.preperiod[i]
        if not self.period:
            raise IndexError(i)
        return self.period[(i - n) % len(self.period)]

    def terms(self, n: int) -> list[int]:
        if self.is_rational:
            return list(self.preperiod[:n])
        return [self.term(i) for i in range(n)]

    def __str__(self):
        head = list(self.preperiod) or [self.period[0]]
        s = f"[{head[0]}; " + ", ".join(map(str, head[1:]))
        if self.period:
            per = self.period if self.preperiod else self.period[1:] + self.period[:1]
            s += ("; " if len(head) > 1 else "") + "(" + ", ".join(map(str, per)) + ")*"
        return s.rstrip(", ") + "]"


@dataclass
class Convergents:
    fractions: list[Fraction]
    exhausted: bool = False  # rational CF ran out before n terms

    def __iter__(self):
        return iter(self.fractions)

    def __len__(self):
        return len(self.fractions)

    def __getitem__(self, i):
        return self.fractions[i]


def _convergent_pairs(terms: Sequence[int]):
    h0, h1 = 1, 0
    k0, k1 = 0, 1
    for a in terms:
        h0, h1 = a * h0 + h1, h0
        k0, k1 = a * k0 + k1, k0
        yield h0, k0


def cf_convergents(cf: ContinuedFraction, n: int) -> Convergents:
    if n < 1:
        raise ValueError("n must be >= 1")
    terms = cf.terms(n)
    out = [Fraction(p, q) for p, q in _convergent_pairs(terms)]
    return Convergents(out, exhausted=len(out) < n)


def cf_value(cf: ContinuedFraction) -> QuadraticIrrational:
    """Exact value; the period is resolved through its fixed-point quadratic."""
    if cf.is_rational:
        p, q = list(_convergent_pairs(cf.preperiod))[-1]
        return QuadraticIrrational(p, 0, q)
    # omega = [b0; b1, ..., b_{m-1}, omega] = (h*omega + h')/(k*omega + k')
    pairs = [(1, 0)] + list(_convergent_pairs(cf.period))
    (h, k), (hp, kp) = pairs[-1], pairs[-2]
    # k omega^2 + (k' - h) omega - h' = 0, positive root
    b = kp - h
    disc = b * b + 4 * k * hp
    d = cf.radicand
    if d is not None and disc % d == 0 and math.isqrt(disc // d) ** 2 == disc // d:
        omega = QuadraticIrrational(-b, math.isqrt(disc // d), 2 * k, d)
    else:
        omega = QuadraticIrrational(-b, 1, 2 * k, disc)
    if not cf.preperiod:
        return omega
    pairs = [(1, 0)] + list(_convergent_pairs(cf.preperiod))
    (H, K), (Hp, Kp) = pairs[-1], pairs[-2]
    return (H * omega + Hp) / (K * omega + Kp)


def cf_expand(x, max_terms: int = 10_000) -> ContinuedFraction:
    """Continued fraction of a rational or quadratic irrational (period detected exactly)."""
    x = exact(x)
    if x.is_rational:
        fr = x.as_fraction()
        terms = []
        num, den = fr.numerator, fr.denominator
        while den:
            a, rem = divmod(num, den)
            terms.append(a)
            num, den = den, rem
        return ContinuedFraction(tuple(terms))
    # write x = (P + sqrt(D)) / Q with Q | D - P^2
    p, q, r, d = x.p, x.q, x.r, x.d
    if q < 0:
        p, q, r = -p, -q, -r
    D = q * q * d
    P, Q = p, r
    if (D - P * P) % Q:
        P, Q, D = P * abs(Q), Q * abs(Q), D * Q * Q
    seen: dict[tuple[int, int], int] = {}
    terms: list[int] = []
    s = math.isqrt(D)
    for _ in range(max_terms):
        key = (P, Q)
        if key in seen:
            i = seen[key]
            return ContinuedFraction(tuple(terms[:i]), tuple(terms[i:]), radicand=x.d)
        seen[key] = len(terms)
        # floor((P + sqrt D)/Q), sqrt D irrational
        a = (P + s) // Q if Q > 0 else (P + s + 1) // Q
        terms.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    raise RuntimeError("period not found within max_terms")


def golden_tail(prefix: Sequence[int]) -> ContinuedFraction:
    """CF with the given prefix followed by all 1's."""
    prefix = tuple(prefix)
    return ContinuedFraction(prefix, (1,), radicand=5)


# ---------------------------------------------------------------------------
# orbit screening


def _split_chunks(x: QuadraticIrrational):
    """x mod 1 = A1/2^26 + A2/2^52 + lo with integer chunks and a tiny float remainder."""
    f = x.frac()
    t1 = f * (1 << 26)
    a1 = math.floor(t1)
    t2 = (t1 - a1) * (1 << 26)
    a2 = math.floor(t2)
    lo = float((t2 - a2) / (1 << 52))
    return a1, a2, lo


def orbit_positions(alpha, offset, ks: np.ndarray) -> np.ndarray:
    """Float approximations of frac(k*alpha + offset), absolute error < SCREEN_EPS."""
    alpha, offset = exact(alpha), exact(offset)
    ks = np.asarray(ks, dtype=np.int64)
    if ks.size and int(np.abs(ks).max()) >= MAX_SCREEN_K:
        raise ValueError(f"screening supports |k| < {MAX_SCREEN_K}")
    a1, a2, lo = _split_chunks(alpha)
    c1, c2, clo = _split_chunks(offset)
    m26, m52 = np.int64(1 << 26), np.int64(1 << 52)
    part1 = np.mod(ks * a1 + c1, m26).astype(np.float64) / float(1 << 26)
    part2 = np.mod(ks * a2 + c2, m52).astype(np.float64) / float(1 << 52)
    return np.mod(part1 + part2 + ks.astype(np.float64) * lo + clo, 1.0)


def _screen(alpha, offset, ks: np.ndarray):
    z = orbit_positions(alpha, offset, ks)
    dist = np.minimum(z, 1.0 - z)
    kf = np.abs(ks).astype(np.float64)
    vals = kf * dist
    err = kf * SCREEN_EPS
    return vals, err


def _exact_product(alpha, offset, k: int) -> QuadraticIrrational:
    return abs(k) * (offset + k * alpha).dist_to_int()


def _require_irrational(alpha: QuadraticIrrational):
    if alpha.is_rational:
        raise RationalRotation(f"rotation number {alpha} is rational; the orbit is periodic")


def _exact_min(alpha, offset, ks: np.ndarray):
    """Exact minimum of |k|*||k*alpha + offset|| over ks via float screening."""
    vals, err = _screen(alpha, offset, ks)
    upper = float(np.min(vals + err))
    cand = ks[vals - err <= upper]
    best_k, best_v = None, None
    for k in cand.tolist():
        v = _exact_product(alpha, offset, k)
        if best_v is None or v < best_v or (v == best_v and k < best_k):
            best_k, best_v = k, v
    return best_k, best_v


@dataclass
class BadApproxResult:
    value: QuadraticIrrational
    k: int
    K: int
    N: int = 1

    def __float__(self):
        return float(self.value)


def bad_approx_constant(alpha, K: int, N: Optional[int] = None) -> BadApproxResult:
    """Exact ``min_{N<=k<=K} k*||k*alpha||`` and the k attaining it.

    The tail start ``N`` defaults to ``isqrt(K)`` so that the value approximates
    the liminf rather than the small-k transient (for the golden ratio the
    transient minimum is ``1*||alpha|| = 0.38...``).  Pass ``N=1`` for the plain
    minimum.
    """
    alpha = exact(alpha)
    _require_irrational(alpha)
    if K < 1:
        raise ValueError("K must be >= 1")
    if N is None:
        N = max(1, math.isqrt(K))
    if not 1 <= N <= K:
        raise ValueError("need 1 <= N <= K")
    ks = np.arange(N, K + 1, dtype=np.int64)
    k, v = _exact_min(alpha, QuadraticIrrational(0), ks)
    return BadApproxResult(v, k, K, N)


def convergent_constants(alpha, K: int) -> list[tuple[int, QuadraticIrrational]]:
    """q*||q*alpha|| along convergent denominators q <= K, from the CF of alpha."""
    alpha = exact(alpha)
    _require_irrational(alpha)
    cf = cf_expand(alpha)
    out = []
    for p, q in _convergent_pairs(cf.terms(200)):
        if q > K:
            break
        e = abs(q * alpha - p)
        # the zeroth convergent can miss the nearest integer
        out.append((q, q * (1 - e if e > Fraction(1, 2) else e)))
    return out


def orbit_hit_index(alpha, x, y) -> Optional[int]:
    """The unique k != 0 with x + k*alpha = y mod 1, if any (alpha irrational)."""
    alpha, x, y = exact(alpha), exact(x), exact(y)
    _require_irrational(alpha)
    diff = y - x
    if diff.q and diff.d != alpha.d:
        return None
    e, b = diff.irrational_coefficient, alpha.irrational_coefficient
    k = e / b
    if k.denominator != 1 or k == 0:
        return None
    k = int(k)
    return k if (x + k * alpha - y).is_rational and (x + k * alpha - y).as_fraction().denominator == 1 else None


@dataclass
class RotationPairCertificate:
    alpha: QuadraticIrrational
    x: QuadraticIrrational
    y: QuadraticIrrational
    B: QuadraticIrrational
    N: int
    K: int
    verified: bool
    witness_k: Optional[int]
    witness_value: Optional[QuadraticIrrational]
    orbit_hit: bool = False
    precision_bits: int = DEFAULT_PRECISION
    two_sided: bool = False

    @property
    def witness(self):
        return (self.witness_k, self.witness_value)

    def to_json(self) -> dict:
        wv = self.witness_value
        return {
            "alpha": self.alpha.to_json(),
            "x": self.x.to_json(),
            "y": self.y.to_json(),
            "B": self.B.to_json(),
            "N": self.N,
            "K": self.K,
            "verified": self.verified,
            "witness_k": self.witness_k,
            "witness_value": None if wv is None else wv.to_json(),
            "witness_decimal": None if wv is None else decimal_string(wv, self.precision_bits),
            "orbit_hit": self.orbit_hit,
            "two_sided": self.two_sided,
            "precision_bits": self.precision_bits,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RotationPairCertificate":
        wv = obj.get("witness_value")
        return cls(
            alpha=exact(obj["alpha"]),
            x=exact(obj["x"]),
            y=exact(obj["y"]),
            B=exact(obj["B"]),
            N=int(obj["N"]),
            K=int(obj["K"]),
            verified=bool(obj["verified"]),
            witness_k=obj.get("witness_k"),
            witness_value=None if wv is None else exact(wv),
            orbit_hit=bool(obj.get("orbit_hit", False)),
            precision_bits=int(obj.get("precision_bits", DEFAULT_PRECISION)),
            two_sided=bool(obj.get("two_sided", False)),
        )

    def recheck_witness(self) -> bool:
        """Recompute the witness value exactly; consistency with the verdict."""
        if self.witness_k is None:
            return not self.verified
        offset = (self.x - self.y).frac()
        v = _exact_product(self.alpha, offset, self.witness_k)
        if self.orbit_hit:
            return v == 0 and not self.verified
        return v == self.witness_value and (v >= self.B) == self.verified


def certify_rotation_pair(alpha, x, y, B, N: int, K: int, *, two_sided: bool = False,
                          precision_bits: int = DEFAULT_PRECISION) -> RotationPairCertificate:
    """Check ``k*d(R^k x, y) >= B`` for ``N <= k <= K`` and no orbit hit for ``1 <= k <= K``.

    With ``two_sided`` the negative iterates ``-K..-N`` are checked as well, which is
    what makes the pair condition symmetric in ``x`` and ``y``.
    """
    alpha = exact(alpha)
    _require_irrational(alpha)
    x, y, B = exact(x).frac(), exact(y).frac(), exact(B)
    if B <= 0:
        raise ValueError("B must be positive")
    if not 1 <= N <= K:
        raise ValueError("need 1 <= N <= K")
    hit = orbit_hit_index(alpha, x, y)
    in_range = hit is not None and (1 <= hit <= K or (two_sided and -K <= hit <= -1))
    if in_range:
        return RotationPairCertificate(alpha, x, y, B, N, K, False, hit, QuadraticIrrational(0),
                                       orbit_hit=True, precision_bits=precision_bits, two_sided=two_sided)
    ks = np.arange(N, K + 1, dtype=np.int64)
    if two_sided:
        ks = np.concatenate([ks, -ks])
    offset = (x - y).frac()
    k, v = _exact_min(alpha, offset, ks)
    return RotationPairCertificate(alpha, x, y, B, N, K, v >= B, k, v,
                                   precision_bits=precision_bits, two_sided=two_sided)


def pair_product(alpha, x, y, k: int) -> QuadraticIrrational:
    """Exact ``|k| * d(R^k x, y)`` on the unit circle."""
    return _exact_product(exact(alpha), (exact(x) - exact(y)).frac(), k)


def limit_constants(cf: ContinuedFraction) -> list[QuadraticIrrational]:
    """Exact limits of q_k*|q_k*theta - p_k| along each phase of the period.

    Uses q|q*theta - p| = 1/([a_{k+1}; a_{k+2}, ...] + [0; a_k, ..., a_1]); for an
    eventually periodic expansion both tails converge to purely periodic values.
    """
    if cf.is_rational:
        raise RationalRotation("rational expansion has no limit constants")
    per = cf.period
    m = len(per)
    out = []
    for j in range(m):
        fwd = per[j:] + per[:j]
        # a_k, a_{k-1}, ...: the period read backwards from just before phase j
        back = tuple(per[(j - 1 - i) % m] for i in range(m))
        omega = cf_value(ContinuedFraction((), fwd, cf.radicand))
        tail = cf_value(ContinuedFraction((), back, cf.radicand))
        out.append(1 / (omega + 1 / tail))
    return out
