"""Flat tori: lattice reduction, the diagonal flow g_t and eventual thickness.

Convention: ``g_t = diag(e^{t/2}, e^{-t/2})`` in the frame where the torus's
designated vertical direction points up.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from mpmath import iv, mp, mpf
from mpmath.ctx_iv import ivmpf

from .cf import ContinuedFraction, _convergent_pairs, cf_expand, limit_constants
from .quadratic import DEFAULT_PRECISION, QuadraticIrrational, exact, interval_precision

Vec = tuple


class DegenerateLattice(ValueError):
    pass


def _is_interval(x) -> bool:
    return isinstance(x, ivmpf)


def _mid(x) -> float:
    if _is_interval(x):
        return float(x.mid)
    return float(x)


def dot(u: Vec, v: Vec):
    return u[0] * v[0] + u[1] * v[1]


def cross(u: Vec, v: Vec):
    return u[0] * v[1] - u[1] * v[0]


def norm_sq(u: Vec):
    return dot(u, u)


def _exact_vec(v) -> Vec:
    return (exact(v[0]), exact(v[1]))


def _round_exact(x: QuadraticIrrational) -> int:
    return math.floor(x + Fraction(1, 2))


def gauss_reduce(b1: Vec, b2: Vec) -> tuple[Vec, Vec]:
    """Lagrange-Gauss reduction: first vector shortest, |b1.b2| <= |b1|^2/2."""
    exact_mode = not (_is_interval(b1[0]) or _is_interval(b2[0]))
    if exact_mode:
        if cross(b1, b2) == 0:
            raise DegenerateLattice("basis vectors are parallel")
    u, v = b1, b2
    nu, nv = norm_sq(u), norm_sq(v)
    lt = (lambda a, b: a < b) if exact_mode else (lambda a, b: _mid(a) < _mid(b))
    if lt(nv, nu):
        u, v, nu, nv = v, u, nv, nu
    for _ in range(10_000):
        m = _round_exact(dot(u, v) / nu) if exact_mode else round(_mid(dot(u, v)) / _mid(nu))
        if m:
            v = (v[0] - m * u[0], v[1] - m * u[1])
            nv = norm_sq(v)
        if not lt(nv, nu):
            return u, v
        u, v, nu, nv = v, u, nv, nu
    raise RuntimeError("Gauss reduction did not terminate")


@dataclass(frozen=True)
class Lattice:
    """Rank-2 lattice in R^2; the stored basis is Gauss-reduced."""

    basis: tuple[Vec, Vec]

    def __init__(self, b1, b2, *, reduce: bool = True):
        if not (_is_interval(b1[0]) or _is_interval(b2[0])):
            b1, b2 = _exact_vec(b1), _exact_vec(b2)
        basis = gauss_reduce(b1, b2) if reduce else (b1, b2)
        object.__setattr__(self, "basis", basis)

    @property
    def is_exact(self) -> bool:
        return not _is_interval(self.basis[0][0])

    @property
    def determinant(self):
        return cross(*self.basis)

    @property
    def covolume(self):
        return abs(self.determinant)

    def vectors(self, box: int) -> Iterable[Vec]:
        e1, e2 = self.basis
        for m, n in itertools.product(range(-box, box + 1), repeat=2):
            if m or n:
                yield (m * e1[0] + n * e2[0], m * e1[1] + n * e2[1])

    def float_basis(self) -> np.ndarray:
        return np.array([[_mid(c) for c in v] for v in self.basis])

    def to_json(self) -> list:
        if self.is_exact:
            return [[c.to_json() for c in v] for v in self.basis]
        return [[[str(c.a), str(c.b)] for c in v] for v in self.basis]


@dataclass
class SystoleResult:
    basis: tuple[Vec, Vec]
    systole_sq: object  # exact when the lattice is exact, an interval otherwise
    certified: bool = True

    @property
    def systole(self) -> float:
        return math.sqrt(_mid(self.systole_sq))

    def exact_systole(self) -> Optional[QuadraticIrrational]:
        """The systole itself when it lies in the coordinate field."""
        s = self.systole_sq
        if _is_interval(s) or not s.is_rational:
            return None
        fr = s.as_fraction()
        rn, rd = math.isqrt(fr.numerator), math.isqrt(fr.denominator)
        if rn * rn == fr.numerator and rd * rd == fr.denominator:
            return exact(Fraction(rn, rd))
        return QuadraticIrrational.sqrt(fr)


def reduce_and_systole(lattice: Lattice) -> SystoleResult:
    u, v = lattice.basis
    if lattice.is_exact:
        return SystoleResult((u, v), norm_sq(u))
    nu, nv, uv = norm_sq(u), norm_sq(v), dot(u, v)
    # reducedness verified in interval arithmetic certifies that u is shortest
    ok = bool((nu <= nv) is True and (abs(uv) * 2 <= nu) is True)
    return SystoleResult((u, v), nu, certified=ok)


def brute_force_systole_sq(lattice: Lattice, box: int = 5):
    return min(norm_sq(w) for w in lattice.vectors(box))


@dataclass(frozen=True)
class FlatTorus:
    """A flat torus R^2 / lattice with a designated vertical direction.

    ``vertical`` is a nonzero exact vector; ``FlatTorus.with_slope`` builds it
    from a slope ``s`` meaning the direction ``(s, 1)`` (``s = None`` means the
    horizontal direction ``(1, 0)``).
    """

    lattice: Lattice
    vertical: Vec = (QuadraticIrrational(0), QuadraticIrrational(1))
    area_normalized: bool = True

    @classmethod
    def with_slope(cls, lattice: Lattice, slope) -> "FlatTorus":
        vert = (exact(1), exact(0)) if slope is None else (exact(slope), exact(1))
        return cls(lattice, vert)

    @classmethod
    def standard(cls, slope=0) -> "FlatTorus":
        return cls.with_slope(Lattice((1, 0), (0, 1)), slope)

    @property
    def is_standard_frame(self) -> bool:
        v = self.vertical
        return not _is_interval(v[0]) and v[0] == 0 and v[1] > 0

    def frame_components(self, v: Vec):
        """Scaled (horizontal, vertical) components (cross(v,u), v.u) and |u|^2."""
        u = self.vertical
        return cross(v, u), dot(v, u), norm_sq(u)

    def ha_product(self, v: Vec):
        """Exact h*a for v in this torus's frame (sign included)."""
        H, A, s2 = self.frame_components(v)
        return H * A / s2


def _interval(x, bits):
    if _is_interval(x):
        return x
    return exact(x).to_interval(bits)


def apply_gt(torus: FlatTorus, t=None, *, stretch=None, bits: int = DEFAULT_PRECISION) -> FlatTorus:
    """g_t applied to ``torus``.  Pass ``stretch = e^{t/2}`` (exact) to stay exact."""
    if (t is None) == (stretch is None):
        raise ValueError("give exactly one of t or stretch")
    e1, e2 = torus.lattice.basis
    if stretch is not None and torus.is_standard_frame and torus.lattice.is_exact:
        s = exact(stretch)
        if s <= 0:
            raise ValueError("stretch must be positive")
        new = [(v[0] * s, v[1] / s) for v in (e1, e2)]
        return FlatTorus(Lattice(*new), torus.vertical)
    with interval_precision(bits):
        if stretch is not None:
            s = _interval(stretch, bits)
        else:
            s = iv.exp(iv.mpf(t) / 2)
        u = tuple(_interval(c, bits) for c in torus.vertical)
        nu = iv.sqrt(u[0] * u[0] + u[1] * u[1])
        new = []
        for v in (e1, e2):
            vi = tuple(_interval(c, bits) for c in v)
            H = (vi[0] * u[1] - vi[1] * u[0]) / nu
            A = (vi[0] * u[0] + vi[1] * u[1]) / nu
            new.append((H * s, A / s))
        lat = Lattice(*new)
    return FlatTorus(lat, (iv.mpf(0), iv.mpf(1)))


@dataclass
class GtMinimum:
    value_sq: QuadraticIrrational  # exact 2|h*a|
    t: float  # +inf / -inf when the infimum is not attained

    @property
    def value(self) -> float:
        return math.sqrt(float(self.value_sq))

    @property
    def attained(self) -> bool:
        return math.isfinite(self.t)


def min_gt_length(v: Vec) -> GtMinimum:
    """min over t of |g_t v| for v = (h, a): sqrt(2|h a|) at t = ln|a/h|."""
    h, a = exact(v[0]), exact(v[1])
    if not h and not a:
        raise ValueError("zero vector")
    if not h:
        return GtMinimum(exact(0), math.inf)
    if not a:
        return GtMinimum(exact(0), -math.inf)
    ratio = abs(a / h)
    with mp.workprec(80):
        t = float(mp.log(ratio.to_mpf(80)))
    return GtMinimum(2 * abs(h * a), t)


def gt_length(v: Sequence[float], t: float) -> float:
    return math.hypot(math.exp(t / 2) * v[0], math.exp(-t / 2) * v[1])


@dataclass
class NotEventuallyThick:
    """The vertical direction is rational: a closed vertical curve shrinks under g_t."""

    closed_vector: Vec

    def to_json(self) -> dict:
        return {"eventually_thick": False, "closed_vector": [c.to_json() for c in self.closed_vector]}


@dataclass
class ThicknessBound:
    epsilon_sq: QuadraticIrrational  # min of 2|h a| over the checked convergent vectors
    argmin_index: int
    K: int
    limit_sq: Optional[QuadraticIrrational]  # exact liminf of 2|h a| (eventually periodic slopes)
    profile_sq: list  # running minimum per convergent index

    @property
    def epsilon(self) -> float:
        return math.sqrt(float(self.epsilon_sq))

    @property
    def limit(self) -> Optional[float]:
        return None if self.limit_sq is None else math.sqrt(float(self.limit_sq))

    def to_json(self) -> dict:
        return {
            "eventually_thick": True,
            "K": self.K,
            "epsilon_sq": self.epsilon_sq.to_json(),
            "epsilon": repr(self.epsilon),
            "argmin_index": self.argmin_index,
            "limit_sq": None if self.limit_sq is None else self.limit_sq.to_json(),
            "limit": None if self.limit is None else repr(self.limit),
        }


def direction_coordinates(torus: FlatTorus):
    """Coordinates (c1, c2) of the vertical direction in the lattice basis."""
    (a, b), (c, d) = torus.lattice.basis
    ux, uy = torus.vertical
    det = a * d - b * c
    # u = c1*e1 + c2*e2
    c1 = (ux * d - uy * c) / det
    c2 = (a * uy - b * ux) / det
    return c1, c2


def eventual_thickness(torus: FlatTorus, K: int = 40, cf: Optional[ContinuedFraction] = None):
    """Thickness bound from convergent vectors of the vertical slope (indices < K).

    ``cf`` may be passed to supply the expansion of the slope coordinate directly
    (used for slopes whose expansion is known but very long).
    """
    if not torus.lattice.is_exact:
        raise ValueError("eventual_thickness needs an exact lattice")
    e1, e2 = torus.lattice.basis
    c1, c2 = direction_coordinates(torus)
    if not c2:
        c1, c2, e1, e2 = c2, c1, e2, e1
    theta = c1 / c2
    if theta.is_rational:
        fr = theta.as_fraction()
        p, q = fr.numerator, fr.denominator
        return NotEventuallyThick((p * e1[0] + q * e2[0], p * e1[1] + q * e2[1]))
    if cf is None:
        cf = cf_expand(theta)
    best, best_i, profile = None, -1, []
    for i, (p, q) in enumerate(_convergent_pairs(cf.terms(K))):
        v = (p * e1[0] + q * e2[0], p * e1[1] + q * e2[1])
        val = 2 * abs(torus.ha_product(v))
        if best is None or val < best:
            best, best_i = val, i
        profile.append(best)
    D = abs(torus.lattice.determinant)
    limit = 2 * D * min(limit_constants(cf))
    return ThicknessBound(best, best_i, K, limit, profile)


def systole_profile(torus: FlatTorus, ts: Sequence[float], box: int = 6) -> np.ndarray:
    """Float systole of g_t(torus) at each t (brute force over a coefficient box, after reduction)."""
    e1, e2 = torus.lattice.basis
    u = np.array([_mid(c) for c in torus.vertical])
    nu = np.linalg.norm(u)
    frame = []
    for v in (e1, e2):
        vf = np.array([_mid(c) for c in v])
        frame.append(((vf[0] * u[1] - vf[1] * u[0]) / nu, (vf @ u) / nu))
    frame = np.array(frame)
    ts = np.asarray(ts, dtype=float)
    out = np.empty(ts.size)
    coeffs = np.array([(m, n) for m in range(-box, box + 1) for n in range(-box, box + 1) if m or n], dtype=float)
    for i, t in enumerate(ts):
        b = frame * np.array([math.exp(t / 2), math.exp(-t / 2)])
        # re-reduce in floats so the box search stays valid for long times
        r1, r2 = _float_gauss(b[0], b[1])
        vecs = coeffs @ np.array([r1, r2])
        out[i] = np.sqrt(np.min(np.einsum("ij,ij->i", vecs, vecs)))
    return out


def _float_gauss(u: np.ndarray, v: np.ndarray):
    if u @ u > v @ v:
        u, v = v, u
    for _ in range(1000):
        m = round((u @ v) / (u @ u))
        v = v - m * u
        if v @ v >= u @ u:
            return u, v
        u, v = v, u
    return u, v


def write_profile_csv(path, ts: Sequence[float], values: Sequence[float]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "systole"])
        for t, s in zip(ts, values):
            w.writerow([repr(float(t)), repr(float(s))])
