"""Torus-good certificates for marked origamis and strong-thickness checks.

The base of every origami is the square torus with a chosen vertical slope.
A configuration is certified when the base is eventually thick and every
ordered pair of projected marked points is badly approximable for the
vertical flow on the requested window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .flow import FlowPairCertificate, LinearFlow, certify_flow_pair
from .origami import ClosedGeodesic, Endpoint, MarkedPoint, Origami, SaddleConnection, check_marked, \
    closed_geodesics, enumerate_saddle_connections
from .quadratic import QuadraticIrrational, exact, format_exact
from .torus import FlatTorus, Lattice, NotEventuallyThick, eventual_thickness


def base_torus(slope) -> FlatTorus:
    return FlatTorus.with_slope(Lattice((1, 0), (0, 1)), slope)


@dataclass
class PairResult:
    i: int
    j: int
    certificate: FlowPairCertificate

    def to_json(self) -> dict:
        return {"i": self.i + 1, "j": self.j + 1, "certificate": self.certificate.to_json()}


@dataclass
class TorusGoodCertificate:
    origami: Origami
    slope: Optional[QuadraticIrrational]
    marked: list
    epsilon: QuadraticIrrational
    B: QuadraticIrrational
    K: int
    N: QuadraticIrrational
    T: QuadraticIrrational
    verified: bool
    thickness: object  # ThicknessBound or NotEventuallyThick
    pairs: list = field(default_factory=list)
    failing_pair: Optional[tuple] = None
    reason: Optional[str] = None

    @property
    def flow(self) -> LinearFlow:
        return LinearFlow(base_torus(self.slope))

    def to_json(self) -> dict:
        return {
            "origami": self.origami.to_json(),
            "genus": self.origami.genus,
            "regular": self.origami.regular,
            "slope": None if self.slope is None else format_exact(self.slope),
            "marked": [m.to_json() for m in self.marked],
            "epsilon": format_exact(self.epsilon),
            "B": format_exact(self.B),
            "horizons": {"K": self.K, "N": format_exact(self.N), "T": format_exact(self.T)},
            "verified": self.verified,
            "reason": self.reason,
            "failing_pair": None if self.failing_pair is None else [k + 1 for k in self.failing_pair],
            "thickness": self.thickness.to_json(),
            "pairs": [p.to_json() for p in self.pairs],
        }


def certify_torus_good(origami: Origami, slope, marked: Sequence[MarkedPoint], epsilon, B, *,
                       K: int = 40, N=10, T=1000) -> TorusGoodCertificate:
    """Check the base thickness and all ordered marked-point pairs on the base torus."""
    check_marked(origami, marked)
    slope = None if slope is None else exact(slope)
    epsilon, B, N, T = exact(epsilon), exact(B), exact(N), exact(T)
    torus = base_torus(slope)
    th = eventual_thickness(torus, K=K)
    reason, failing = None, None
    ok = True
    if isinstance(th, NotEventuallyThick):
        ok, reason = False, "base-not-eventually-thick"
    elif th.epsilon_sq < epsilon * epsilon:
        ok, reason = False, "base-thickness-below-epsilon"
    flow = LinearFlow(torus)
    pairs = []
    for i, mi in enumerate(marked):
        for j, mj in enumerate(marked):
            if i == j:
                continue
            cert = certify_flow_pair(flow, mi.base, mj.base, B, N, T)
            pairs.append(PairResult(i, j, cert))
            if not cert.verified and failing is None:
                failing = (i, j)
                if ok:
                    ok = False
                    reason = "orbit-hit" if cert.orbit_hit else "pair-not-badly-approximable"
    return TorusGoodCertificate(origami, slope, list(marked), epsilon, B, K, N, T, ok, th, pairs, failing, reason)


# ---------------------------------------------------------------------------


@dataclass
class ObjectFloor:
    kind: str  # "connection" or "closed"
    vector: tuple
    h: float
    a: float
    floor_sq: QuadraticIrrational  # exact 2|h*a|
    grid_min: float  # min over the t-grid of |g_t v|

    @property
    def floor(self) -> float:
        return math.sqrt(float(self.floor_sq))


@dataclass
class StrongThicknessReport:
    L: QuadraticIrrational
    delta_sq: Optional[QuadraticIrrational]
    n_connections: int
    n_checked_connections: int
    n_closed: int
    sqrt_b_violations: list  # connections with floor < sqrt(B)
    sharp_floor_violations: list  # connections with floor < sqrt(2B)
    grid_violations: int  # objects whose grid minimum undercuts the analytic floor
    closed_lengths_match: bool
    min_closed_floor_sq: Optional[QuadraticIrrational]
    min_connection_floor_sq: Optional[QuadraticIrrational]
    objects: list = field(repr=False, default_factory=list)

    @property
    def delta(self) -> Optional[float]:
        return None if self.delta_sq is None else math.sqrt(float(self.delta_sq))

    @property
    def ok(self) -> bool:
        return (not self.sqrt_b_violations and not self.grid_violations and self.closed_lengths_match
                and self.delta_sq is not None and self.delta_sq > 0)

    def to_json(self) -> dict:
        def opt(x):
            return None if x is None else format_exact(x)

        return {
            "L": format_exact(self.L),
            "delta_sq": opt(self.delta_sq),
            "delta": None if self.delta is None else repr(self.delta),
            "connections": self.n_connections,
            "checked_connections": self.n_checked_connections,
            "closed_curves": self.n_closed,
            "sqrt_b_violations": len(self.sqrt_b_violations),
            "sharp_floor_violations": len(self.sharp_floor_violations),
            "grid_violations": self.grid_violations,
            "closed_lengths_match": self.closed_lengths_match,
            "min_closed_floor_sq": opt(self.min_closed_floor_sq),
            "min_connection_floor_sq": opt(self.min_connection_floor_sq),
            "ok": self.ok,
        }


def _grid_min(h: float, a: float, ts: np.ndarray) -> float:
    return float(np.min(np.sqrt(np.exp(ts) * h * h + np.exp(-ts) * a * a)))


def strong_thickness_profile(cert: TorusGoodCertificate, ts: Sequence[float], L, *,
                             tol: float = 1e-9) -> StrongThicknessReport:
    """Analytic floors for marked-to-marked connections and closed curves up to length ``L``.

    Connections are checked when they join distinct marked points and their
    vertical part is at least the window start ``N``; for those the pair
    certificates force ``2|h*a| >= 2B``.  Closed curves use the same floor
    against the base thickness.
    """
    if not cert.verified:
        raise ValueError("strong thickness needs a verified torus-good certificate")
    L = exact(L)
    ts = np.asarray(ts, dtype=float)
    flow = cert.flow
    s2 = flow.speed_sq
    s = math.sqrt(float(s2))
    o = cert.origami
    eps = [Endpoint("marked", i) for i in range(len(cert.marked))]
    conns: list[SaddleConnection] = enumerate_saddle_connections(o, eps, eps, L, cert.marked)
    objects, sqrt_b_bad, sharp_bad = [], [], []
    grid_bad = 0
    min_conn = None
    n_checked = 0
    B = cert.B
    for c in conns:
        if c.start.index == c.end.index:
            continue
        H, A = flow.components(c.displacement)
        if A * A < cert.N * cert.N * s2 or A < 0:
            continue
        n_checked += 1
        floor_sq = 2 * abs(H * A) / s2
        h, a = float(H) / s, float(A) / s
        gm = _grid_min(h, a, ts)
        obj = ObjectFloor("connection", c.displacement, h, a, floor_sq, gm)
        objects.append(obj)
        if gm < obj.floor - tol:
            grid_bad += 1
        if floor_sq < B:
            sqrt_b_bad.append(c)
        if floor_sq < 2 * B:
            sharp_bad.append(c)
        if min_conn is None or floor_sq < min_conn:
            min_conn = floor_sq
    closed: list[ClosedGeodesic] = closed_geodesics(o, L)
    match = True
    min_closed = None
    for g in closed:
        if g.length_sq != g.base_length_sq:
            match = False
        v = (exact(g.displacement[0]), exact(g.displacement[1]))
        H, A = flow.components(v)
        floor_sq = 2 * abs(H * A) / s2
        h, a = float(H) / s, float(A) / s
        gm = _grid_min(h, a, ts)
        objects.append(ObjectFloor("closed", v, h, a, floor_sq, gm))
        if floor_sq and gm < math.sqrt(float(floor_sq)) - tol:
            grid_bad += 1
        if min_closed is None or floor_sq < min_closed:
            min_closed = floor_sq
    cands = [x for x in (min_conn, min_closed) if x is not None]
    delta = min(cands) if cands else None
    return StrongThicknessReport(L, delta, len(conns), n_checked, len(closed), sqrt_b_bad, sharp_bad, grid_bad,
                                 match, min_closed, min_conn, objects)
