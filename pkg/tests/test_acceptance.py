"""Acceptance criteria, each run at its stated tolerance.

Every criterion records one PASS/FAIL line, printed in the terminal summary.
"""
import math
import random
import time
from fractions import Fraction as F

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from flatflow.cf import bad_approx_constant, certify_rotation_pair, cf_expand
from flatflow.flow import (LinearFlow, Transversal, certify_flow_pair, first_return_system, rotation_points,
                           simulated_distance, sublemma_transfer)
from flatflow.origami import closed_geodesics, l_origami, torus_origami, wollmilchsau
from flatflow.pipeline import canonical_json, run
from flatflow.quadratic import GOLDEN_CONJ, QuadraticIrrational
from flatflow.schmidt import (AdversarialBob, Ball, MidpointStrategy, RandomLegalBob, alice_orbit_avoidance,
                              certify_transcript, combine_strategies, play_game)
from flatflow.torus import Lattice, brute_force_systole_sq, reduce_and_systole
from flatflow.traintrack import (canonical_form, carries, cf_from_kind_log, enumerate_Tn, find_large_branches,
                                 punctured_torus_track, seed_weights)

PHI = GOLDEN_CONJ + 1
Q = F(1, 4)
B0 = Ball(F(1, 2), F(1, 2))


def record(n, name, ok, detail):
    ACCEPTANCE_LINES.append(f"criterion {n} {'PASS' if ok else 'FAIL'}: {name} ({detail})")
    print(ACCEPTANCE_LINES[-1])
    assert ok, detail


def test_1_golden_constant():
    t = time.perf_counter()
    r = bad_approx_constant(GOLDEN_CONJ, 10**6)
    dt = time.perf_counter() - t
    v = float(r)
    record(1, "golden bad-approximation constant at K=1e6", 0.44721 <= v <= 0.44722 and dt < 5,
           f"value {v:.8f} at k={r.k}, {dt:.2f}s")


def test_2_single_target_games():
    t = time.perf_counter()
    tseng = (Q * Q / 4) ** 3
    bad = []
    for bob_name in ("random", "midpoint", "adversarial"):
        for seed in range(20):
            alice = alice_orbit_avoidance(GOLDEN_CONJ, 0, Q, Q)
            bob = {"random": RandomLegalBob(), "midpoint": MidpointStrategy(),
                   "adversarial": AdversarialBob(GOLDEN_CONJ, [0])}[bob_name]
            tr = play_game(B0, alice, bob, 40, seed=seed)
            (c,) = certify_transcript(tr, GOLDEN_CONJ, [0], tseng)
            if not c.verified:
                bad.append((bob_name, seed))
    dt = time.perf_counter() - t
    record(2, "60 playouts certified at (1/64)^3", not bad and dt < 60, f"{60 - len(bad)}/60, {dt:.1f}s")


def test_3_three_anchor_combination():
    anchors = [0, F(1, 3), F(2, 7)]
    ok = 0
    c3 = None
    for seed in range(20):
        comb = combine_strategies([alice_orbit_avoidance(GOLDEN_CONJ, a, Q, Q) for a in anchors])
        c3 = comb.declared_constant
        bob = AdversarialBob(GOLDEN_CONJ, anchors) if seed % 2 else RandomLegalBob()
        tr = play_game(B0, comb, bob, 40, seed=seed)
        certs = certify_transcript(tr, GOLDEN_CONJ, anchors, c3)
        ok += all(c.verified for c in certs) and len(certs) == 3
    record(3, "three-anchor combined strategy", ok == 20, f"{ok}/20 seeds at c3={float(c3):.3e}")


def _random_unimodular(rng):
    def fr():
        return F(rng.randint(-40, 40), rng.randint(1, 12))

    a = fr()
    while not a:
        a = fr()
    b, c = fr(), fr()
    return Lattice((a, b), (c, (1 + b * c) / a))


def _floor_at_systole(basis, ts):
    """Systole of g_t L on the grid, and sqrt(2|h a|) of the vector realising it at each t."""
    s = np.stack([np.exp(ts / 2), np.exp(-ts / 2)], axis=1)
    u = np.broadcast_to(basis[0], s.shape).copy()  # unstretched, reduced alongside the stretched copies
    v = np.broadcast_to(basis[1], s.shape).copy()
    for _ in range(500):
        su, sv = u * s, v * s
        swap = np.einsum("ij,ij->i", su, su) > np.einsum("ij,ij->i", sv, sv)
        u[swap], v[swap] = v[swap], u[swap].copy()
        su, sv = u * s, v * s
        m = np.round(np.einsum("ij,ij->i", su, sv) / np.einsum("ij,ij->i", su, su))
        if not m.any():
            break
        v = v - m[:, None] * u
    best = np.full(len(ts), np.inf)
    floor = np.zeros(len(ts))
    for i in range(-2, 3):
        for j in range(-2, 3):
            if i or j:
                w = i * u + j * v
                n = np.hypot(*(w * s).T)
                better = n < best
                best[better] = n[better]
                floor[better] = np.sqrt(2 * np.abs(w[better, 0] * w[better, 1]))
    return best, floor


def test_4_systole_floor_and_reduction():
    rng = random.Random(4)
    ts = np.arange(0, 10 + 1e-9, 1e-3)
    agree = grid_ok = 0
    for _ in range(200):
        lat = _random_unimodular(rng)
        agree += reduce_and_systole(lat).systole_sq == brute_force_systole_sq(lat, 5)
        basis = lat.float_basis()
        best, floor = _floor_at_systole(basis, ts)
        worst = float(np.min(best - floor))
        grid_ok += worst >= -1e-9
    record(4, "systole floor on the t-grid and exact reduction", agree == 200 and grid_ok == 200,
           f"reduction {agree}/200, floor {grid_ok}/200")


PERP = LinearFlow.on_lattice((1, 0), (-GOLDEN_CONJ, PHI), (0, 1))
HORIZONTAL = Transversal((0, 0), (1, 0))


def test_5_transfer():
    rs = first_return_system(PERP, HORIZONTAL)
    p = q = (F(1, 3), F(1, 5))
    _, x, y = rotation_points(PERP, HORIZONTAL, p, q)
    B = F(44, 100)
    rc = certify_rotation_pair(rs.rotation_number, x, y, B, 10, 10**4)
    rep = sublemma_transfer(PERP, HORIZONTAL, p, q, rc, F(9, 10) * B * PHI, 100, 10**4)
    first = rep.verified
    rng = random.Random(5)
    clean = 0
    for _ in range(50):
        p = (F(rng.randint(0, 999), 1000), F(rng.randint(0, 999), 1000))
        q = (F(rng.randint(0, 999), 1000), F(rng.randint(0, 999), 1000))
        _, x, y = rotation_points(PERP, HORIZONTAL, p, q)
        probe = certify_rotation_pair(rs.rotation_number, x, y, F(1, 10**9), 10, 10**4)
        if probe.orbit_hit:
            continue
        B_rot = F(float(probe.witness_value) * 0.99).limit_denominator(10**6)
        rc = certify_rotation_pair(rs.rotation_number, x, y, B_rot, 10, 10**4)
        B_prime = F(9, 10) * B_rot * F(float(rs.transfer_factor)).limit_denominator(10**6) * F(99, 100)
        rep = sublemma_transfer(PERP, HORIZONTAL, p, q, rc, B_prime, 100, 10**4)
        direct = certify_flow_pair(PERP, p, q, B_prime, 100, 10**4, bits=200)
        sims = np.linspace(100, 10**4, 1000)
        sim_ok = all(t * simulated_distance(PERP, p, q, t) >= float(B_prime) * (1 - 1e-9) for t in sims)
        clean += rep.verified and direct.verified and sim_ok
    record(5, "rotation-to-flow transfer", first and clean == 50,
           f"PERP B'=0.9*B*T0 {'verified' if first else 'unverified'}, {clean}/50 uncontradicted")


def test_6_strong_thickness_wollmilchsau():
    t = time.perf_counter()
    rep = run("strong-thickness", {"n_points": 2, "L": 50})
    dt = time.perf_counter() - t
    st = rep["payload"]["strong_thickness"]
    ok = rep["verified"] and st["sqrt_b_violations"] == 0 and dt < 120
    record(6, "wollmilchsau strong thickness at L=50", ok,
           f"{st['checked_connections']} connections, {st['sqrt_b_violations']} violations, {dt:.1f}s")


def test_7_closed_curves():
    mismatches = total = 0
    for o in (torus_origami(), l_origami(), wollmilchsau()):
        for g in closed_geodesics(o, 20):
            total += 1
            mismatches += g.length_sq != g.base_length_sq
    rep = run("strong-thickness", {"n_points": 2, "L": 20})
    st = rep["payload"]["strong_thickness"]
    delta = float(st["delta"]) if st["delta"] is not None else 0.0
    record(7, "closed-curve lengths at L=20", mismatches == 0 and st["closed_lengths_match"] and delta > 0,
           f"{total} curves, {mismatches} mismatches, delta={delta:.4f}")


def _random_qi(rng):
    while True:
        d = rng.choice([2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23])
        y = (rng.randint(1, 9) + rng.randint(1, 5) * QuadraticIrrational.sqrt(d)) / rng.randint(1, 7)
        if y > 0:
            return y


def _sample_weights(track, rng):
    (big,) = find_large_branches(track)
    w = {b: F(rng.randint(1, 10**6), rng.randint(1, 1000)) for b in track.branches if b != big}
    w[big] = sum(w.values())
    return w


def test_8_splitting_sequences():
    rng = random.Random(8)
    cf_ok = 0
    for _ in range(20):
        y = _random_qi(rng)
        got, want = cf_from_kind_log(1, y, 15)
        cf_ok += got == want == cf_expand(y).terms(15)
    seed = punctured_torus_track()
    nest_ok = nest_total = 0
    for depth in range(1, 7):
        leaves = enumerate_Tn(seed, depth).tracks
        for _ in range(1000):
            leaf = rng.choice(leaves)
            w = _sample_weights(leaf, rng)
            w0 = seed_weights(leaf, w)
            found = enumerate_Tn(seed, depth, w0).tracks
            nest_total += 1
            nest_ok += (carries(seed, w0).carried and len(found) == 1
                        and canonical_form(found[0]) == canonical_form(leaf))
    record(8, "split sequences follow continued fractions and nest", cf_ok == 20 and nest_ok == nest_total,
           f"cf {cf_ok}/20, nesting {nest_ok}/{nest_total}")


CONFIGS = [
    ("rotation-cert", {"alpha": "golden", "B": "0.44", "K": 100000}),
    ("rotation-cert", {"alpha": "silver", "B": "1/3", "K": 10000, "two_sided": True}),
    ("game-playout", {"games": 3, "rounds": 30}),
    ("game-playout", {"games": 2, "rounds": 30, "bob": "adversarial", "anchors": [0, "1/3"]}),
    ("thickness-profile", {"slope": "golden", "csv": False}),
    ("flow-cert", {"direction": ["golden", 1], "p": [0, 0], "q": ["1/2", "1/3"], "B": "1/20", "T": 1000}),
    ("torus-good", {"n_points": 2}),
    ("strong-thickness", {"n_points": 2, "L": 10}),
    ("split-sequence", {"weights": [1, "phi"], "steps": 30}),
    ("tn-enum", {"n": 4}),
]


def test_9_determinism():
    same = 0
    for kind, params in CONFIGS:
        a = canonical_json(run(kind, params, seed=7)["payload"]).encode()
        b = canonical_json(run(kind, params, seed=7)["payload"]).encode()
        same += a == b
    record(9, "byte-identical payloads on rerun", same == len(CONFIGS), f"{same}/{len(CONFIGS)} configs")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
