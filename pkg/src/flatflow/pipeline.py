"""Experiment kinds, the end-to-end torus-good construction, and report verification.

Every runner takes a validated parameter dict and returns a payload of plain
JSON data plus a status.  Payloads never contain timings, so two runs of the
same config and seed serialise to the same bytes.
"""
from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Optional

import numpy as np

from . import __version__
from .cf import RotationPairCertificate, certify_rotation_pair, cf_expand, cf_value, golden_tail
from .flow import LinearFlow, Transversal, _lattice_coords, _window_min_sq, certify_flow_pair, rotation_points, sublemma_transfer
from .origami import MarkedPoint, l_origami, parse_origami_text, torus_origami, wollmilchsau
from .quadratic import DEFAULT_PRECISION, GOLDEN_CONJ, SILVER_CONJ, QuadraticIrrational, exact, format_exact
from .schmidt import (AdversarialBob, AvoidanceAlice, Ball, GameState, MidpointStrategy, RandomLegalBob,
                      certify_transcript, play_game, validate_move)
from .torus import FlatTorus, Lattice, NotEventuallyThick, eventual_thickness, systole_profile, write_profile_csv
from .torusgood import base_torus, certify_torus_good, strong_thickness_profile
from .traintrack import (cf_from_kind_log, enumerate_Tn, parse_track, punctured_torus_track,
                         punctured_torus_weights, splitting_sequence)

KINDS = ("rotation-cert", "game-playout", "thickness-profile", "flow-cert", "torus-good",
         "strong-thickness", "split-sequence", "tn-enum")

VERIFIED, UNVERIFIED, BUDGET, STAGE_FAILED = "verified", "unverified", "budget-exceeded", "stage-failed"


class ConfigError(ValueError):
    pass


_ALIASES = {
    "golden": GOLDEN_CONJ,
    "phi": GOLDEN_CONJ + 1,
    "silver": SILVER_CONJ,
}


def num(x) -> QuadraticIrrational:
    """Exact number from config: int, "p/q", "(p+q*sqrt(d))/r" or an alias (golden, phi, silver)."""
    if isinstance(x, str) and x.strip().lower() in _ALIASES:
        return _ALIASES[x.strip().lower()]
    try:
        return exact(x)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"not an exact number: {x!r} ({exc})") from None


def vec(v) -> tuple:
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ConfigError(f"expected a pair of exact numbers, got {v!r}")
    return (num(v[0]), num(v[1]))


# ---------------------------------------------------------------------------
# schemas: key -> default (REQUIRED marks mandatory keys)

REQUIRED = object()

_TORUS_GOOD = {
    "origami": "wollmilchsau", "slope": "golden", "marked": None, "n_points": 2, "epsilon": "9/10",
    "B": None, "K": 40, "N": 10, "T": 1000, "rounds": 40, "ratio": "1/4", "tilt": True, "tilt_terms": 6,
    "flow_back": 0, "bob": "random",
}

SCHEMAS: dict[str, dict[str, Any]] = {
    "rotation-cert": {"alpha": REQUIRED, "x": 0, "y": 0, "B": REQUIRED, "K": 100_000, "N": None,
                      "two_sided": False},
    "game-playout": {"alpha": "golden", "anchors": [0], "ratio": "1/4", "rounds": 40, "bob": "midpoint",
                     "games": 1, "B": None, "two_sided": False, "H": 4, "cap": 1 << 16},
    "thickness-profile": {"lattice": [[1, 0], [0, 1]], "slope": REQUIRED, "K": 40, "t_max": 10,
                          "t_step": "1/100", "csv": True},
    "flow-cert": {"lattice": [[1, 0], [0, 1]], "direction": REQUIRED, "p": REQUIRED, "q": REQUIRED,
                  "B": REQUIRED, "N": 10, "T": 1000},
    "torus-good": dict(_TORUS_GOOD),
    "strong-thickness": dict(_TORUS_GOOD, L=50, t_max=10, t_step="1/1000"),
    "split-sequence": {"track": "punctured-torus", "weights": REQUIRED, "steps": 20, "cf_terms": None},
    "tn-enum": {"track": "punctured-torus", "n": 3, "weights": None, "budget": 20_000},
}


def validate_config(kind: str, params: dict) -> dict:
    if kind not in SCHEMAS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    if not isinstance(params, dict):
        raise ConfigError("parameters must be a JSON object")
    schema = SCHEMAS[kind]
    unknown = sorted(set(params) - set(schema))
    if unknown:
        raise ConfigError(f"unknown parameters for {kind}: {unknown}")
    out = {}
    for key, default in schema.items():
        if key in params:
            out[key] = params[key]
        elif default is REQUIRED:
            raise ConfigError(f"missing required parameter {key!r} for {kind}")
        else:
            out[key] = default
    for key in ("K", "rounds", "games", "steps", "n", "budget", "H", "cap", "tilt_terms", "n_points"):
        if key in out and out[key] is not None and (not isinstance(out[key], int) or out[key] < 0):
            raise ConfigError(f"{key} must be a nonnegative integer")
    return out


# ---------------------------------------------------------------------------
# helpers


def _status(ok: bool) -> str:
    return VERIFIED if ok else UNVERIFIED


def _rotation_json(c: RotationPairCertificate) -> dict:
    return dict(c.to_json(), type="rotation-pair")


def _flow_json(c) -> dict:
    return dict(c.to_json(), type="flow-pair")


def _bob(name: str, alpha, anchors, two_sided=False):
    if name == "midpoint":
        return MidpointStrategy()
    if name == "random":
        return RandomLegalBob()
    if name == "adversarial":
        return AdversarialBob(alpha, anchors, two_sided=two_sided)
    raise ConfigError(f"unknown Bob strategy {name!r}")


def _origami(spec):
    named = {"wollmilchsau": wollmilchsau, "l": l_origami, "torus": torus_origami}
    if isinstance(spec, str) and spec.lower() in named:
        return named[spec.lower()](), []
    if isinstance(spec, str):
        path = Path(spec)
        if not path.exists():
            raise ConfigError(f"origami file {spec!r} not found")
        return parse_origami_text(path.read_text())
    if isinstance(spec, dict):
        text = f"{spec['n']}\n{spec['sigma_h']}\n{spec['sigma_v']}\n"
        return parse_origami_text(text)
    raise ConfigError(f"bad origami spec {spec!r}")


def _track(spec):
    if spec == "punctured-torus":
        return punctured_torus_track()
    if isinstance(spec, str) and Path(spec).exists():
        return parse_track(Path(spec).read_text())
    if isinstance(spec, str) and "switch" in spec:
        return parse_track(spec)
    raise ConfigError(f"bad track spec {spec!r}")


def _weights(track, spec) -> dict:
    if isinstance(spec, (list, tuple)) and len(spec) == 2 and set(track.branches) == {"x", "y", "b"}:
        return punctured_torus_weights(num(spec[0]), num(spec[1]))
    if isinstance(spec, dict):
        return {k: num(v) for k, v in spec.items()}
    raise ConfigError("weights must be a {branch: value} map (or [x, y] for the punctured torus)")


# ---------------------------------------------------------------------------
# runners


def run_rotation_cert(p: dict, seed: int, bits: int, out: Optional[Path]):
    alpha, x, y, B = num(p["alpha"]), num(p["x"]), num(p["y"]), num(p["B"])
    K = p["K"]
    N = p["N"] if p["N"] is not None else max(1, math.isqrt(K))
    c = certify_rotation_pair(alpha, x, y, B, N, K, two_sided=p["two_sided"], precision_bits=bits)
    return {"certificate": _rotation_json(c)}, _status(c.verified)


def run_game_playout(p: dict, seed: int, bits: int, out: Optional[Path]):
    alpha = num(p["alpha"])
    anchors = [num(a) for a in p["anchors"]]
    r = Fraction(str(p["ratio"]))
    alice = AvoidanceAlice(alpha, anchors, r, r, H=p["H"], max_horizon=p["cap"], two_sided=p["two_sided"])
    B = alice.declared_constant if p["B"] is None else num(p["B"])
    games = []
    ok = True
    for g in range(p["games"]):
        bob = _bob(p["bob"], alpha, anchors, p["two_sided"])
        tr = play_game(Ball(Fraction(1, 2), Fraction(1, 2)), alice, bob, p["rounds"], seed=seed + g)
        certs = certify_transcript(tr, alpha, anchors, B, H=p["H"], cap=p["cap"], two_sided=p["two_sided"])
        ok = ok and all(c.verified for c in certs)
        tj = tr.to_json()
        tj["certifications"] = [_rotation_json(c) for c in certs]
        games.append(dict(tj, type="transcript"))
    payload = {"declared_constant": str(alice.declared_constant), "B": format_exact(exact(B)), "games": games}
    return payload, _status(ok)


def _t_grid(t_max, t_step) -> np.ndarray:
    step = float(Fraction(str(t_step)))
    n = int(round(float(Fraction(str(t_max))) / step))
    return np.arange(n + 1) * step


def run_thickness_profile(p: dict, seed: int, bits: int, out: Optional[Path]):
    b1, b2 = vec(p["lattice"][0]), vec(p["lattice"][1])
    lat = Lattice(b1, b2)
    slope = None if p["slope"] is None else num(p["slope"])
    torus = FlatTorus.with_slope(lat, slope)
    th = eventual_thickness(torus, K=p["K"])
    payload = {"thickness": dict(th.to_json(), type="thickness", lattice=lat.to_json(),
                                 slope=None if slope is None else format_exact(slope))}
    if p["csv"]:
        ts = _t_grid(p["t_max"], p["t_step"])
        prof = systole_profile(torus, ts)
        payload["profile_min"] = repr(float(np.min(prof)))
        if out is not None:
            write_profile_csv(out / "thickness-profile.csv", ts, prof)
            payload["csv"] = "thickness-profile.csv"
    return payload, _status(not isinstance(th, NotEventuallyThick))


def run_flow_cert(p: dict, seed: int, bits: int, out: Optional[Path]):
    b1, b2 = vec(p["lattice"][0]), vec(p["lattice"][1])
    flow = LinearFlow.on_lattice(b1, b2, vec(p["direction"]))
    c = certify_flow_pair(flow, vec(p["p"]), vec(p["q"]), num(p["B"]), num(p["N"]), num(p["T"]), bits=bits)
    return {"certificate": _flow_json(c)}, _status(c.verified)


def _torus_good_direct(p: dict, bits: int):
    o, file_marked = _origami(p["origami"])
    marked = file_marked or [MarkedPoint(int(m[0]) - 1, num(m[1]), num(m[2])) for m in (p["marked"] or [])]
    slope = None if p["slope"] is None else num(p["slope"])
    B = num(p["B"])
    return certify_torus_good(o, slope, marked, num(p["epsilon"]), B, K=p["K"], N=num(p["N"]), T=num(p["T"]))


@dataclass
class Stage:
    name: str
    ok: bool
    data: dict = field(default_factory=dict)


def tilted_slope(slope: QuadraticIrrational, terms: int) -> QuadraticIrrational:
    """A nearby slope whose fractional part has an all-ones continued-fraction tail."""
    fl = math.floor(slope)
    frac = slope - fl
    prefix = [0] if not frac else cf_expand(frac, max_terms=terms + 1).terms(terms + 1)
    prefix = (prefix + [1] * (terms + 1))[: terms + 1]
    return fl + cf_value(golden_tail(prefix))


def pipeline_torus_good_end_to_end(p: dict, seed: int = 0, bits: int = DEFAULT_PRECISION):
    """Transversal, all-ones rotation, game points, flow-back, torus-good and strong thickness.

    Returns ``(stages, certificate, strong_report)``; on a stage failure the
    later entries are None and the failing stage is last in ``stages``.
    """
    stages: list[Stage] = []
    o, _ = _origami(p["origami"])
    stages.append(Stage("origami", True, {"origami": o.to_json(), "genus": o.genus, "regular": o.regular}))
    slope = num(p["slope"])
    if p["tilt"]:
        cf = cf_expand(slope - math.floor(slope), max_terms=200) if not slope.is_rational else None
        all_ones = cf is not None and cf.period == (1,)
        if not all_ones:
            slope = tilted_slope(slope, p["tilt_terms"])
    torus = base_torus(slope)
    flow = LinearFlow(torus)
    gamma = Transversal((0, 0), (1, 0))
    rs = rotation_points(flow, gamma, (0, 0), (0, 0))[0]
    xi = rs.rotation_number
    stages.append(Stage("transversal", True, {"slope": format_exact(slope), "rotation": format_exact(xi),
                                              "return_system": rs.to_json()}))
    # game-produced points on the transversal
    r = Fraction(str(p["ratio"]))
    points: list[Fraction] = []
    games = []
    B_rot = None
    for i in range(p["n_points"]):
        anchors = points[:] if points else [Fraction(0)]
        alice = AvoidanceAlice(xi, anchors, r, r, two_sided=True)
        bob = _bob(p["bob"], xi, anchors, True)
        tr = play_game(Ball(Fraction(1, 2), Fraction(1, 2)), alice, bob, p["rounds"], seed=seed * 1000 + i)
        certs = certify_transcript(tr, xi, anchors, alice.declared_constant, two_sided=True)
        games.append({"point": str(tr.final_point), "declared_constant": str(alice.declared_constant),
                      "certifications": [_rotation_json(c) for c in certs]})
        if not all(c.verified for c in certs):
            stages.append(Stage("game", False, {"games": games}))
            return stages, None, None
        if points:
            B_rot = alice.declared_constant if B_rot is None else min(B_rot, alice.declared_constant)
        points.append(tr.final_point)
    stages.append(Stage("game", True, {"games": games, "rotation_constant": None if B_rot is None else str(B_rot)}))
    # flow back and transfer every ordered pair to the flow
    s_back = num(p["flow_back"])
    u = flow.u
    base_pts = [((x - s_back * u[0]).frac(), (-s_back * u[1]).frac()) for x in points]
    B_flow = num(p["B"]) if p["B"] is not None else (exact(B_rot) / 2 if B_rot is not None else exact(1))
    transfers = []
    ok = True
    for i in range(len(base_pts)):
        for j in range(len(base_pts)):
            if i == j:
                continue
            _, x, y = rotation_points(flow, gamma, base_pts[i], base_pts[j])
            K_rot = int(math.ceil(float(num(p["T"])) / rs.T0)) + 4
            rc = certify_rotation_pair(xi, x, y, exact(B_rot), 1, max(K_rot, 2), two_sided=False)
            rep = sublemma_transfer(flow, gamma, base_pts[i], base_pts[j], rc, B_flow, num(p["N"]), num(p["T"]))
            transfers.append(dict(rep.to_json(), i=i + 1, j=j + 1))
            ok = ok and rep.verified
    stages.append(Stage("flow-back", ok, {"flow_back": format_exact(s_back), "B_flow": format_exact(B_flow),
                                          "transfers": transfers}))
    if not ok:
        return stages, None, None
    marked = [MarkedPoint(i % o.n, bx, by) for i, (bx, by) in enumerate(base_pts)]
    cert = certify_torus_good(o, slope, marked, num(p["epsilon"]), B_flow, K=p["K"], N=num(p["N"]), T=num(p["T"]))
    stages.append(Stage("torus-good", cert.verified, {"reason": cert.reason}))
    if not cert.verified:
        return stages, cert, None
    strong = None
    if "L" in p:
        strong = strong_thickness_profile(cert, _t_grid(p["t_max"], p["t_step"]), num(p["L"]))
        stages.append(Stage("strong-thickness", strong.ok, strong.to_json()))
    return stages, cert, strong


def _torus_good_payload(cert) -> dict:
    j = cert.to_json()
    j["type"] = "torus-good"
    j["pairs"] = [dict(pr, certificate=dict(pr["certificate"], type="flow-pair")) for pr in j["pairs"]]
    if j["thickness"].get("eventually_thick"):
        j["thickness"] = dict(j["thickness"], type="thickness", lattice=[[[1, 0], [0, 1]]],
                              slope=j["slope"])
    return j


def _run_torus_good_like(p: dict, seed: int, bits: int, strong: bool):
    if p["marked"] is not None or (isinstance(p["origami"], str) and p["origami"].endswith(".txt")):
        if p["B"] is None:
            raise ConfigError("B is required when marked points are given explicitly")
        cert = _torus_good_direct(p, bits)
        payload = {"certificate": _torus_good_payload(cert)}
        ok = cert.verified
        if strong and ok:
            rep = strong_thickness_profile(cert, _t_grid(p["t_max"], p["t_step"]), num(p["L"]))
            payload["strong_thickness"] = rep.to_json()
            ok = rep.ok
        return payload, _status(ok)
    stages, cert, rep = pipeline_torus_good_end_to_end(p, seed, bits)
    payload = {"stages": [{"name": s.name, "ok": s.ok, "data": s.data} for s in stages]}
    if cert is not None:
        payload["certificate"] = _torus_good_payload(cert)
    if rep is not None:
        payload["strong_thickness"] = rep.to_json()
    if not all(s.ok for s in stages):
        return payload, STAGE_FAILED if cert is None else UNVERIFIED
    return payload, VERIFIED


def run_torus_good(p, seed, bits, out):
    return _run_torus_good_like(p, seed, bits, strong=False)


def run_strong_thickness(p, seed, bits, out):
    return _run_torus_good_like(p, seed, bits, strong=True)


def run_split_sequence(p: dict, seed: int, bits: int, out: Optional[Path]):
    track = _track(p["track"])
    w = _weights(track, p["weights"])
    res = splitting_sequence(track, w, p["steps"])
    payload = {"type": "split-sequence", "track": track.to_text(), "steps": p["steps"],
               "weights": {k: format_exact(v) for k, v in sorted(w.items())},
               "log": res.log, "terminal": res.terminal, "terminal_reason": res.terminal_reason,
               "final_weights": {k: format_exact(v) for k, v in sorted(res.weights.items())}}
    ok = True
    if p["cf_terms"]:
        got, want = cf_from_kind_log(w["x"], w["y"], p["cf_terms"])
        payload["cf_check"] = {"from_log": got, "continued_fraction": want, "match": got == want}
        ok = got == want
    return payload, _status(ok)


def run_tn_enum(p: dict, seed: int, bits: int, out: Optional[Path]):
    track = _track(p["track"])
    w = None if p["weights"] is None else _weights(track, p["weights"])
    res = enumerate_Tn(track, p["n"], w, budget=p["budget"])
    payload = {"depth": res.depth, "count": len(res.tracks), "partial": res.partial,
               "explored": res.explored, "tracks": [t.to_text() for t in res.tracks]}
    return payload, BUDGET if res.partial else VERIFIED


RUNNERS: dict[str, Callable] = {
    "rotation-cert": run_rotation_cert,
    "game-playout": run_game_playout,
    "thickness-profile": run_thickness_profile,
    "flow-cert": run_flow_cert,
    "torus-good": run_torus_good,
    "strong-thickness": run_strong_thickness,
    "split-sequence": run_split_sequence,
    "tn-enum": run_tn_enum,
}


# ---------------------------------------------------------------------------
# reports


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _file_hashes(params: dict) -> dict:
    out = {}
    for key in ("origami", "track"):
        v = params.get(key)
        if isinstance(v, str) and Path(v).is_file():
            out[key] = hashlib.sha256(Path(v).read_bytes()).hexdigest()
    return out


def run(kind: str, params: dict, seed: int = 0, bits: int = DEFAULT_PRECISION, out: Optional[Path] = None) -> dict:
    """Validate, execute and assemble a report (not written to disk here)."""
    p = validate_config(kind, params)
    started = time.perf_counter()
    payload, status = RUNNERS[kind](p, seed, bits, out)
    elapsed = time.perf_counter() - started
    config = {"kind": kind, "params": params, "seed": seed, "precision_bits": bits}
    return {
        "tool": "flatflow",
        "version": __version__,
        "config": config,
        "input_hashes": dict(_file_hashes(params), config=hashlib.sha256(canonical_json(config).encode()).hexdigest()),
        "status": status,
        "verified": status == VERIFIED,
        "payload": payload,
        "payload_sha256": hashlib.sha256(canonical_json(payload).encode()).hexdigest(),
        "wall_clock_s": round(elapsed, 3),
    }


# ---------------------------------------------------------------------------
# re-verification from a report alone


def _check_rotation(obj: dict) -> Optional[str]:
    c = RotationPairCertificate.from_json(obj)
    if c.orbit_hit:
        k = c.witness_k
        ok = (c.x + k * c.alpha - c.y).is_rational and (c.x + k * c.alpha - c.y).as_fraction().denominator == 1
        return None if ok and not c.verified else "orbit witness does not land on y"
    return None if c.recheck_witness() else "rotation witness value or verdict does not recompute"


def _check_flow(obj: dict) -> Optional[str]:
    lat = obj["lattice"]
    flow = LinearFlow.on_lattice(vec(lat[0]), vec(lat[1]), vec(obj["direction"]))
    p, q = vec(obj["p"]), vec(obj["q"])
    N, T = exact(obj["window"][0]), exact(obj["window"][1])
    if obj["witness"] is None:
        return None
    w = vec(obj["witness"])
    d = (w[0] - q[0] + p[0], w[1] - q[1] + p[1])
    for z in _lattice_coords(flow.lattice, d):
        if not (z.is_rational and z.as_fraction().denominator == 1):
            return "witness is not in q - p + lattice"
    H, A = flow.components(w)
    if obj["orbit_hit"]:
        return None if (not H and A > 0 and not obj["verified"]) else "orbit witness is not on the forward orbit"
    lo, mid = _window_min_sq(H, A, flow.speed_sq, N, T, int(obj.get("precision_bits", DEFAULT_PRECISION)))
    rec = float(obj["witness_min"])
    if abs(math.sqrt(max(mid, 0.0)) - rec) > 1e-9 * max(1.0, rec):
        return "witness window minimum does not recompute"
    if obj["verified"] and math.sqrt(max(mid, 0.0)) < float(exact(obj["B"])) * (1 - 1e-12):
        return "verified certificate has a witness below B"
    return None


def _check_thickness(obj: dict) -> Optional[str]:
    lat = obj["lattice"]
    slope = obj.get("slope")
    torus = FlatTorus.with_slope(Lattice(vec(lat[0]), vec(lat[1])) if len(lat) == 2 else Lattice((1, 0), (0, 1)),
                                 None if slope is None else num(slope))
    th = eventual_thickness(torus, K=int(obj.get("K", 40)))
    if not obj.get("eventually_thick", True):
        return None if isinstance(th, NotEventuallyThick) else "slope is eventually thick after all"
    if isinstance(th, NotEventuallyThick):
        return "recomputation finds a closed vertical curve"
    return None if th.epsilon_sq == exact(obj["epsilon_sq"]) else "thickness bound does not recompute"


def _check_transcript(obj: dict) -> Optional[str]:
    balls = [Ball.from_json(b) for b in obj["history"]]
    state = GameState(Fraction(obj["alpha_ratio"]), Fraction(obj["beta_ratio"]), [balls[0]])
    for ball in balls[1:]:
        chk = validate_move(state, ball)
        if not chk:
            return f"illegal move in transcript ({chk.reason})"
        state.history.append(ball)
    return None if Fraction(obj["final_point"]) == balls[-1].center else "final point is not the last centre"


def _check_split_sequence(obj: dict) -> Optional[str]:
    track = parse_track(obj["track"])
    w = {k: exact(v) for k, v in obj["weights"].items()}
    res = splitting_sequence(track, w, int(obj["steps"]))
    if res.log != obj["log"] or res.terminal != obj["terminal"]:
        return "replayed kind log differs"
    final = {k: format_exact(v) for k, v in sorted(res.weights.items())}
    return None if final == obj["final_weights"] else "replayed weights differ"


_CHECKERS = {
    "rotation-pair": _check_rotation,
    "flow-pair": _check_flow,
    "thickness": _check_thickness,
    "transcript": _check_transcript,
    "split-sequence": _check_split_sequence,
}


def verify_report(report: dict) -> list[str]:
    """Re-check every embedded certificate; returns a list of problems (empty when all pass)."""
    problems = []
    count = 0

    def walk(node, path):
        nonlocal count
        if isinstance(node, dict):
            t = node.get("type")
            if t in _CHECKERS:
                count += 1
                msg = _CHECKERS[t](node)
                if msg:
                    problems.append(f"{path}: {msg}")
            for k, v in node.items():
                walk(v, f"{path}.{k}")
        elif isinstance(node, list):
            for i, v in enumerate(node):
                walk(v, f"{path}[{i}]")

    walk(report.get("payload", {}), "payload")
    digest = hashlib.sha256(canonical_json(report.get("payload", {})).encode()).hexdigest()
    if digest != report.get("payload_sha256"):
        problems.append("payload hash mismatch")
    verify_report.last_count = count
    return problems
