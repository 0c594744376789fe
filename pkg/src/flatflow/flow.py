"""Straight-line flows on flat tori and certificates for badly approximable pairs.

A flow runs at unit speed along the torus's vertical vector ``u``.  For a
displacement ``w`` we write ``a`` for its component along ``u`` (a time) and
``h`` for the perpendicular component; both are ``(cross or dot)/|u|`` of exact
quantities, so every comparison is reduced to exact field arithmetic or to
128-bit interval evaluation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from mpmath import iv

from .cf import RotationPairCertificate, certify_rotation_pair
from .quadratic import DEFAULT_PRECISION, QuadraticIrrational, exact, interval_precision
from .torus import FlatTorus, Lattice, cross, dot, norm_sq

Vec = tuple


def _vec(v) -> Vec:
    return (exact(v[0]), exact(v[1]))


def _ext_gcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _ext_gcd(b, a % b)
    return g, y, x - (a // b) * y


@dataclass(frozen=True)
class LinearFlow:
    """Unit-speed flow along ``torus.vertical``.

    The normalising rotation taking the flow direction to (0, 1) is recorded as
    the exact vector ``u`` together with ``|u|^2``; it is never applied to
    coordinates, only used through dot and cross products.
    """

    torus: FlatTorus

    @classmethod
    def on_lattice(cls, b1, b2, direction) -> "LinearFlow":
        return cls(FlatTorus(Lattice(b1, b2), _vec(direction)))

    @property
    def u(self) -> Vec:
        return self.torus.vertical

    @property
    def speed_sq(self) -> QuadraticIrrational:
        return norm_sq(self.u)

    @property
    def lattice(self) -> Lattice:
        return self.torus.lattice

    def components(self, w: Vec):
        """Exact (H, A) = (cross(w,u), dot(w,u)); true components are H/|u|, A/|u|."""
        return cross(w, self.u), dot(w, self.u)

    def is_minimal(self) -> bool:
        (a, b), (c, d) = self.lattice.basis
        ux, uy = self.u
        det = a * d - b * c
        c1 = (ux * d - uy * c) / det
        c2 = (a * uy - b * ux) / det
        if not c2:
            return False
        return not (c1 / c2).is_rational

    def point_at(self, p: Vec, t) -> tuple[float, float]:
        """Float position of F^t p (unreduced)."""
        s = math.sqrt(float(self.speed_sq))
        return (float(p[0]) + t * float(self.u[0]) / s, float(p[1]) + t * float(self.u[1]) / s)

    def to_json(self) -> dict:
        return {"lattice": self.lattice.to_json(), "direction": [c.to_json() for c in self.u]}


@dataclass(frozen=True)
class Transversal:
    """Closed geodesic through ``base`` along the primitive lattice vector ``vector``."""

    base: Vec
    vector: Vec

    def __post_init__(self):
        object.__setattr__(self, "base", _vec(self.base))
        object.__setattr__(self, "vector", _vec(self.vector))

    @property
    def length_sq(self):
        return norm_sq(self.vector)

    @property
    def length(self) -> float:
        return math.sqrt(float(self.length_sq))


class ParallelTransversal(ValueError):
    pass


@dataclass
class ReturnSystem:
    rotation_number: QuadraticIrrational
    return_time_sq: QuadraticIrrational  # exact square of the (constant) return time
    transversal_length_sq: QuadraticIrrational
    covolume: QuadraticIrrational
    periodic: bool
    c1: QuadraticIrrational = field(repr=False)
    c2: QuadraticIrrational = field(repr=False)
    complement: Vec = field(repr=False)  # w2 with det(w, w2) = covolume sign-matched

    @property
    def T0(self) -> float:
        return math.sqrt(float(self.return_time_sq))

    @property
    def T1(self) -> float:
        # a closed transversal has a single return time
        return self.T0

    @property
    def C(self) -> float:
        """Smallest C with 1/(C|g|) <= T0 <= T1 <= C/|g| after normalising area to 1."""
        g = math.sqrt(float(self.transversal_length_sq)) / math.sqrt(float(self.covolume))
        area_scale = math.sqrt(float(self.covolume))
        t0, t1 = self.T0 / area_scale, self.T1 / area_scale
        return max(t1 * g, 1.0 / (t0 * g))

    @property
    def transfer_factor(self) -> QuadraticIrrational:
        """T0 times the width of the transversal seen across the flow; equals the covolume."""
        return self.covolume

    def to_json(self) -> dict:
        return {
            "rotation_number": self.rotation_number.to_json(),
            "T0": repr(self.T0),
            "T1": repr(self.T1),
            "T0_sq": self.return_time_sq.to_json(),
            "transversal_length_sq": self.transversal_length_sq.to_json(),
            "C": repr(self.C),
            "periodic": self.periodic,
        }


def _lattice_coords(lattice: Lattice, v: Vec):
    (a, b), (c, d) = lattice.basis
    det = a * d - b * c
    return (v[0] * d - v[1] * c) / det, (a * v[1] - b * v[0]) / det


def first_return_system(flow: LinearFlow, transversal: Transversal) -> ReturnSystem:
    lat = flow.lattice
    w = transversal.vector
    m, n = _lattice_coords(lat, w)
    if not (m.is_rational and n.is_rational and m.as_fraction().denominator == 1 and n.as_fraction().denominator == 1):
        raise ValueError("transversal vector is not a lattice vector")
    m, n = int(m.as_fraction()), int(n.as_fraction())
    g, x, y = _ext_gcd(m, n)
    if g != 1:
        raise ValueError("transversal vector is not primitive")
    # m*x + n*y = 1, so w2 = -y*e1 + x*e2 satisfies det_coords(w, w2) = 1
    e1, e2 = lat.basis
    w2 = (-y * e1[0] + x * e2[0], -y * e1[1] + x * e2[1])
    u = flow.u
    dw = cross(w, w2)
    c2 = cross(w, u) / dw
    c1 = cross(u, w2) / dw
    if not c2:
        raise ParallelTransversal("transversal is parallel to the flow")
    xi = (c1 / abs(c2)).frac()
    T_sq = flow.speed_sq / (c2 * c2)
    return ReturnSystem(xi, T_sq, transversal.length_sq, abs(dw), xi.is_rational, c1, c2, w2)


def transversal_hit(flow: LinearFlow, transversal: Transversal, rs: ReturnSystem, p: Vec):
    """First s > 0 (in units of |u|) with F^s p on the transversal, and the hit coordinate in [0,1)."""
    w, w2 = transversal.vector, rs.complement
    d = (p[0] - transversal.base[0], p[1] - transversal.base[1])
    dw = cross(w, w2)
    sigma = cross(d, w2) / dw
    mu = cross(w, d) / dw
    if rs.c2 > 0:
        dmu = math.floor(mu) + 1 - mu
    else:
        dmu = mu - (math.ceil(mu) - 1)
    tau = dmu / abs(rs.c2)  # flow parameter in units of u
    x = (sigma + rs.c1 * tau).frac()
    return tau, x


@dataclass
class FlowPairCertificate:
    p: Vec
    q: Vec
    B: QuadraticIrrational
    N: QuadraticIrrational
    T: QuadraticIrrational
    verified: bool
    orbit_hit: bool
    witness: Optional[Vec]
    witness_a: Optional[float]
    witness_h: Optional[float]
    witness_min: Optional[float]  # min over t in [N, T] of t*|w - t*u| for the witness
    min_ah: Optional[float]  # smallest a*|h| among enumerated vectors with a in [N, T]
    floor_threshold: QuadraticIrrational = None
    enumerated: int = 0
    lattice: list = None
    direction: list = None
    precision_bits: int = DEFAULT_PRECISION

    def to_json(self) -> dict:
        return {
            "p": [c.to_json() for c in self.p],
            "q": [c.to_json() for c in self.q],
            "B": self.B.to_json(),
            "window": [self.N.to_json(), self.T.to_json()],
            "verified": self.verified,
            "orbit_hit": self.orbit_hit,
            "witness": None if self.witness is None else [c.to_json() for c in self.witness],
            "witness_a": None if self.witness_a is None else repr(self.witness_a),
            "witness_h": None if self.witness_h is None else repr(self.witness_h),
            "witness_min": None if self.witness_min is None else repr(self.witness_min),
            "min_ah": None if self.min_ah is None else repr(self.min_ah),
            "floor_threshold": self.floor_threshold.to_json(),
            "enumerated": self.enumerated,
            "lattice": self.lattice,
            "direction": self.direction,
            "precision_bits": self.precision_bits,
        }


def near_displacements(flow: LinearFlow, p: Vec, q: Vec, a_lo, a_hi, h_bound):
    """All w in (q - p) + lattice with a(w) in [a_lo, a_hi] and |h(w)| <= h_bound.

    Returned as ``(w, H, A)`` with exact ``H = cross(w,u)``, ``A = dot(w,u)``.  The
    search is a float scan over a padded parallelogram; membership is decided
    exactly.
    """
    u = flow.u
    s2 = flow.speed_sq
    s = math.sqrt(float(s2))
    e1, e2 = flow.lattice.basis
    d0 = (exact(q[0]) - exact(p[0]), exact(q[1]) - exact(p[1]))

    def comps(v):
        return float(cross(v, u)) / s, float(dot(v, u)) / s

    h1, a1 = comps(e1)
    h2, a2 = comps(e2)
    h0, a0 = comps(d0)
    det = h1 * a2 - h2 * a1
    lo_a, hi_a, hb = float(a_lo), float(a_hi), float(h_bound)
    # corners of the (h, a) box in (m, n) coordinates
    corners = []
    for hh in (-hb, hb):
        for aa in (lo_a, hi_a):
            dh, da = hh - h0, aa - a0
            corners.append(((dh * a2 - da * h2) / det, (h1 * da - a1 * dh) / det))
    ms = [c[0] for c in corners]
    ns = [c[1] for c in corners]
    m_rng = (math.floor(min(ms)) - 1, math.ceil(max(ms)) + 1)
    n_rng = (math.floor(min(ns)) - 1, math.ceil(max(ns)) + 1)
    swap = (m_rng[1] - m_rng[0]) > (n_rng[1] - n_rng[0])
    out = []
    tol = 1e-9 * (1 + abs(hi_a) + abs(lo_a))
    outer = n_rng if swap else m_rng
    for i in range(outer[0], outer[1] + 1):
        # fixed outer index; inner index from |h| <= hb
        if swap:
            hc, ac, hi_coef = h0 + i * h2, a0 + i * a2, h1
        else:
            hc, ac, hi_coef = h0 + i * h1, a0 + i * a1, h2
        if abs(hi_coef) < 1e-300:
            continue
        j1, j2 = (-hb - hc) / hi_coef, (hb - hc) / hi_coef
        for j in range(math.floor(min(j1, j2)) - 1, math.ceil(max(j1, j2)) + 2):
            m, n = (j, i) if swap else (i, j)
            hf = h0 + m * h1 + n * h2
            af = a0 + m * a1 + n * a2
            if abs(hf) > hb + tol or af < lo_a - tol or af > hi_a + tol:
                continue
            w = (d0[0] + m * e1[0] + n * e2[0], d0[1] + m * e1[1] + n * e2[1])
            H, A = cross(w, u), dot(w, u)
            # exact: a in [a_lo, a_hi] <=> A/s in range; |h| <= h_bound <=> H^2 <= hb^2 s^2
            hbx = exact(h_bound)
            if H * H > hbx * hbx * s2:
                continue
            if not _in_time_range(A, s2, a_lo, a_hi):
                continue
            out.append((w, H, A))
    return out


def _in_time_range(A, s2, lo, hi) -> bool:
    """lo <= A/|u| <= hi, exactly."""
    lo, hi = exact(lo), exact(hi)

    def ge(x):  # A/s >= x
        if x <= 0:
            return A >= 0 or A * A <= x * x * s2
        return A >= 0 and A * A >= x * x * s2

    def le(x):  # A/s <= x
        if x >= 0:
            return A <= 0 or A * A <= x * x * s2
        return A <= 0 and A * A >= x * x * s2

    return ge(lo) and le(hi)


def _window_min_sq(H, A, s2, N, T, bits):
    """Interval enclosure of min_{t in [N,T]} t^2 ((a-t)^2 + h^2) for one displacement."""
    with interval_precision(bits):
        s = iv.sqrt(s2.to_interval(bits))
        a = A.to_interval(bits) / s
        h = H.to_interval(bits) / s
        Ni, Ti = exact(N).to_interval(bits), exact(T).to_interval(bits)

        def f(t):
            return t * t * ((a - t) ** 2 + h * h)

        vals = [f(Ni), f(Ti)]
        disc = a * a - 8 * h * h
        if disc.b > 0:
            disc = iv.mpf([max(disc.a, 0), disc.b])
            tp = (3 * a + iv.sqrt(disc)) / 4
            if tp.b >= Ni.a and tp.a <= Ti.b:
                tp = iv.mpf([max(tp.a, Ni.a), min(tp.b, Ti.b)])
                vals.append(f(tp))
        lo = min(v.a for v in vals)
        return lo, float(min(v.mid for v in vals))


def certify_flow_pair(flow: LinearFlow, p, q, B, N, T, *, bits: int = DEFAULT_PRECISION) -> FlowPairCertificate:
    """Certify ``t * d(F^t p, q) >= B`` for all ``t`` in ``[N, T]`` and no orbit hit in ``(0, T]``.

    Any displacement with ``|h| >= B/N`` or whose time is at least ``B/N`` away
    from ``t`` already gives ``t*d >= B``; the remaining displacements form a
    finite set that is enumerated and checked in interval arithmetic.
    """
    p, q = _vec(p), _vec(q)
    B, N, T = exact(B), exact(N), exact(T)
    if B <= 0:
        raise ValueError("B must be positive")
    if not 0 < N <= T:
        raise ValueError("need 0 < N <= T")
    R = B / N
    s2 = flow.speed_sq
    cands = near_displacements(flow, p, q, 0, T + R, R)
    B_sq_iv = (B * B).to_interval(bits)
    verified, hit = True, False
    witness = None
    best_val, best_ah = None, None
    count = 0
    for w, H, A in cands:
        if A <= 0:
            continue
        if not H:
            if _in_time_range(A, s2, 0, T):
                hit = True
                verified = False
                witness, best_val = w, 0.0
                break
            continue
        if not _in_time_range(A, s2, N - R, T + R):
            continue
        count += 1
        lo, mid = _window_min_sq(H, A, s2, N, T, bits)
        ah = float(abs(H * A / s2))
        if _in_time_range(A, s2, N, T) and (best_ah is None or ah < best_ah):
            best_ah = ah
        if lo < B_sq_iv.b:
            # interval lower bound does not clear B^2: refuse to certify
            with interval_precision(bits):
                if not (lo >= B_sq_iv.b):
                    verified = False
        if best_val is None or mid < best_val:
            best_val, witness = mid, w
    wa = wh = wmin = None
    if witness is not None:
        H, A = flow.components(witness)
        s = math.sqrt(float(s2))
        wa, wh = float(A) / s, float(H) / s
        wmin = 0.0 if hit else math.sqrt(max(best_val, 0.0))
    return FlowPairCertificate(
        p, q, B, N, T, verified, hit, witness, wa, wh, wmin, best_ah,
        floor_threshold=R, enumerated=count, lattice=flow.lattice.to_json(),
        direction=[c.to_json() for c in flow.u], precision_bits=bits,
    )


def simulated_distance(flow: LinearFlow, p, q, t: float, box: int = 2) -> float:
    """Float d(F^t p, q) by direct simulation (independent of the enumeration)."""
    x, y = flow.point_at(p, t)
    e = flow.lattice.float_basis()
    dx, dy = float(q[0]) - x, float(q[1]) - y
    # reduce the displacement into a fundamental domain, then search nearby translates
    det = e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]
    m = (dx * e[1, 1] - dy * e[1, 0]) / det
    n = (e[0, 0] * dy - e[0, 1] * dx) / det
    m0, n0 = math.floor(m), math.floor(n)
    best = math.inf
    for i in range(m0 - box, m0 + box + 2):
        for j in range(n0 - box, n0 + box + 2):
            vx = dx - i * e[0, 0] - j * e[1, 0]
            vy = dy - i * e[0, 1] - j * e[1, 1]
            best = min(best, math.hypot(vx, vy))
    return best


# ---------------------------------------------------------------------------


@dataclass
class TransferReport:
    accepted: bool
    reason: Optional[str]
    B_rotation: QuadraticIrrational
    B_prime: QuadraticIrrational
    bound: QuadraticIrrational  # B * T0 * (transversal width across the flow)
    T0: float
    rotation_certificate: Optional[RotationPairCertificate]
    flow_certificate: Optional[FlowPairCertificate]

    @property
    def verified(self) -> bool:
        return self.accepted and self.flow_certificate is not None and self.flow_certificate.verified

    @property
    def margin(self) -> Optional[float]:
        fc = self.flow_certificate
        if fc is None or fc.witness_min is None:
            return None
        return fc.witness_min / float(self.B_prime)

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "reason": self.reason,
            "B_rotation": self.B_rotation.to_json(),
            "B_prime": self.B_prime.to_json(),
            "bound": self.bound.to_json(),
            "T0": repr(self.T0),
            "margin": None if self.margin is None else repr(self.margin),
            "rotation_certificate": None if self.rotation_certificate is None else self.rotation_certificate.to_json(),
            "flow_certificate": None if self.flow_certificate is None else self.flow_certificate.to_json(),
        }


class TransferRejected(ValueError):
    pass


def rotation_points(flow: LinearFlow, transversal: Transversal, p, q):
    """Return system and the transversal coordinates of the first hits of p and q."""
    rs = first_return_system(flow, transversal)
    _, x = transversal_hit(flow, transversal, rs, _vec(p))
    _, y = transversal_hit(flow, transversal, rs, _vec(q))
    return rs, x, y


def sublemma_transfer(flow: LinearFlow, transversal: Transversal, p, q,
                      rotation_cert: RotationPairCertificate, B_prime, N, T) -> TransferReport:
    """Turn a rotation-level certificate for the transversal hits of (p, q) into a flow certificate.

    The flow constant may be anything below ``B * T0 * w`` where ``w`` is the width
    of the transversal measured across the flow; for a transversal perpendicular
    to the flow of unit length this is the familiar ``B * T0``.
    """
    B_prime = exact(B_prime)
    rs, x, y = rotation_points(flow, transversal, p, q)
    B = rotation_cert.B
    bound = B * rs.transfer_factor
    base = dict(B_rotation=B, B_prime=B_prime, bound=bound, T0=rs.T0, rotation_certificate=rotation_cert)
    if rotation_cert.alpha != rs.rotation_number or rotation_cert.x != x or rotation_cert.y != y:
        raise ValueError("rotation certificate does not belong to the transversal hits of (p, q)")
    if rotation_cert.orbit_hit:
        return TransferReport(False, "orbit-hit", flow_certificate=None, **base)
    if not rotation_cert.verified:
        return TransferReport(False, "rotation-unverified", flow_certificate=None, **base)
    if B_prime >= bound:
        raise TransferRejected(f"B' = {float(B_prime)} is not below B*T0 = {float(bound)}")
    needed = float(exact(T)) / rs.T0 + 3
    if rotation_cert.K < needed:
        raise ValueError(f"rotation horizon K={rotation_cert.K} does not cover the flow window (needs {needed:.0f})")
    fc = certify_flow_pair(flow, p, q, B_prime, N, T)
    return TransferReport(True, None if fc.verified else "flow-unverified", flow_certificate=fc, **base)


@dataclass
class TranslateReport:
    certificate: FlowPairCertificate
    shift: QuadraticIrrational  # window shift (a rational upper bound of ell*|u|)
    checked_vectors: int
    max_excess_loss: float  # max over vectors of observed loss - e^{-t*/2} * ell (should be <= 0)

    def to_json(self) -> dict:
        return {
            "certificate": self.certificate.to_json(),
            "shift": self.shift.to_json(),
            "checked_vectors": self.checked_vectors,
            "max_excess_loss": repr(self.max_excess_loss),
        }


def vertical_translate_stability(flow: LinearFlow, p, q, ell, cert: FlowPairCertificate,
                                 B_prime=None) -> TranslateReport:
    """Certify (p, q + ell*u) from a certificate for (p, q) and compare losses per vector.

    ``ell`` is measured in units of the direction vector ``u``; the geometric
    shift length is ``ell*|u|``.  For each near-approach displacement ``g`` of the
    new pair, the old displacement is ``g`` minus the vertical shift, and the
    loss ``|g_t old| - |g_t new|`` at the critical time ``t*`` of ``old`` is
    compared with ``e^{-t*/2} * ell*|u|``.
    """
    ell = exact(ell)
    if ell < 0:
        raise ValueError("ell must be >= 0")
    p, q = _vec(p), _vec(q)
    if not ell:
        return TranslateReport(cert, exact(0), 0, 0.0)
    B_prime = cert.B if B_prime is None else exact(B_prime)
    u = flow.u
    s = math.sqrt(float(flow.speed_sq))
    phys = float(ell) * s
    shift = exact(Fraction(math.ceil(phys * 1_000_000) + 1, 1_000_000))
    q2 = (q[0] + ell * u[0], q[1] + ell * u[1])
    new = certify_flow_pair(flow, p, q2, B_prime, cert.N + shift, cert.T + shift)
    worst = -math.inf
    vecs = near_displacements(flow, p, q2, cert.N + shift, cert.T + shift, new.floor_threshold)
    for w, H, A in vecs:
        h_new, a_new = float(H) / s, float(A) / s
        a_old = a_new - phys
        if h_new == 0 or a_old <= 0:
            continue
        t_star = math.log(abs(a_old / h_new))
        old_len = math.hypot(math.exp(t_star / 2) * h_new, math.exp(-t_star / 2) * a_old)
        new_len = math.hypot(math.exp(t_star / 2) * h_new, math.exp(-t_star / 2) * a_new)
        loss = old_len - new_len
        worst = max(worst, loss - math.exp(-t_star / 2) * phys)
    return TranslateReport(new, shift, len(vecs), worst if vecs else 0.0)
