from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from flatflow.cf import certify_rotation_pair
from flatflow.quadratic import GOLDEN_CONJ
from flatflow.schmidt import (AdversarialBob, AvoidanceAlice, Ball, CombinedStrategy, GameState, IllegalMove,
                              MidpointStrategy, RandomLegalBob, alice_orbit_avoidance, certify_transcript,
                              combine_strategies, play_game, validate_move)

Q = F(1, 4)
B0 = Ball(F(1, 2), F(1, 2))
TSENG = (Q * Q / 4) ** 3  # (1/64)^3


def test_move_validation():
    state = GameState(F(1, 2), F(1, 2), [B0])
    assert validate_move(state, Ball(F(1, 4), F(1, 4)))
    assert validate_move(state, Ball(F(1, 4), F(1, 3))).reason == "ratio"
    assert validate_move(state, Ball(F(9, 10), F(1, 4))).reason == "containment"
    assert validate_move(state, Ball(F(1, 4), F(1, 4)), "bob").reason == "wrong-mover"


def test_radii_follow_ratio_recurrence():
    tr = play_game(B0, MidpointStrategy("alice"), MidpointStrategy(), 3, alpha_ratio=F(1, 2), beta_ratio=F(1, 2))
    assert [b.radius for b in tr.bob_balls[:3]] == [F(1, 2), F(1, 8), F(1, 32)]


def test_symmetric_play_keeps_centre():
    tr = play_game(B0, MidpointStrategy("alice"), MidpointStrategy(), 10, alpha_ratio=Q, beta_ratio=Q)
    assert tr.final_point == B0.center


def test_zero_rounds_leaves_first_ball():
    alice = alice_orbit_avoidance(GOLDEN_CONJ, 0, Q, Q)
    tr = play_game(B0, alice, MidpointStrategy(), 0)
    assert tr.history == [B0] and tr.final_point == B0.center


def test_illegal_strategy_is_reported():
    class Cheater(MidpointStrategy):
        def move(self, state, rng):
            return Ball(state.current.center, state.current.radius)

    with pytest.raises(IllegalMove):
        play_game(B0, Cheater("alice"), MidpointStrategy(), 2, alpha_ratio=Q, beta_ratio=Q)


@pytest.mark.parametrize("bob", [MidpointStrategy(), RandomLegalBob(), AdversarialBob(GOLDEN_CONJ, [0])],
                         ids=["midpoint", "random", "adversarial"])
def test_avoidance_reaches_tseng_constant(bob):
    alice = alice_orbit_avoidance(GOLDEN_CONJ, 0, Q, Q)
    assert alice.declared_constant == TSENG
    tr = play_game(B0, alice, bob, 40, seed=3)
    (cert,) = certify_transcript(tr, GOLDEN_CONJ, [0], TSENG)
    assert cert.verified and cert.K == tr.horizon()


def test_seeded_random_bob_replays_exactly():
    alice = alice_orbit_avoidance(GOLDEN_CONJ, 0, Q, Q)
    a = play_game(B0, alice, RandomLegalBob(), 40, seed=11)
    b = play_game(B0, alice, RandomLegalBob(), 40, seed=11)
    assert a.to_json() == b.to_json()
    assert play_game(B0, alice, RandomLegalBob(), 40, seed=12).history != a.history


def test_two_anchor_combiner():
    s1 = alice_orbit_avoidance(GOLDEN_CONJ, 0, Q, Q)
    s2 = alice_orbit_avoidance(GOLDEN_CONJ, F(1, 3), Q, Q)
    comb = combine_strategies([s1, s2])
    tr = play_game(B0, comb, RandomLegalBob(), 40, seed=5)
    certs = certify_transcript(tr, GOLDEN_CONJ, [0, F(1, 3)], comb.declared_constant)
    assert all(c.verified for c in certs)


def test_single_strategy_combiner_is_identity():
    s = alice_orbit_avoidance(GOLDEN_CONJ, 0, Q, Q)
    assert combine_strategies([s]) is s
    a = play_game(B0, s, RandomLegalBob(), 20, seed=1)
    b = play_game(B0, CombinedStrategy([s]), RandomLegalBob(), 20, seed=1)
    assert a.history == b.history


def test_three_anchor_constant_shape():
    anchors = [0, F(1, 3), F(2, 7)]
    comb = combine_strategies([alice_orbit_avoidance(GOLDEN_CONJ, a, Q, Q) for a in anchors])
    assert comb.declared_constant == TSENG ** 3  # one factor per target, cf. (1/64)^(3(k-1)) for k-1 = 2 earlier points
    tr = play_game(B0, comb, AdversarialBob(GOLDEN_CONJ, anchors), 40, seed=0)
    assert all(c.verified for c in certify_transcript(tr, GOLDEN_CONJ, anchors, comb.declared_constant))


def test_combiner_degradation_is_monotone():
    strategies = [alice_orbit_avoidance(GOLDEN_CONJ, a, Q, Q) for a in (0, F(1, 3), F(1, 5), F(4, 9))]
    prev = None
    for k in range(1, len(strategies) + 1):
        c = CombinedStrategy(strategies[:k]).constituent_constants()[0]
        assert prev is None or c <= prev
        prev = c


# properties ------------------------------------------------------------------


@given(st.integers(0, 2**31), st.integers(0, 25), st.sampled_from([F(1, 2), F(1, 3), F(1, 4)]))
@settings(max_examples=40)
def test_history_is_nested_and_shrinks_exactly(seed, rounds, r):
    alice = AvoidanceAlice(GOLDEN_CONJ, [0], r, r)
    tr = play_game(B0, alice, RandomLegalBob(), rounds, seed=seed)
    bobs = tr.bob_balls
    for prev, nxt in zip(tr.history, tr.history[1:]):
        assert prev.contains_ball(nxt) and nxt.radius < prev.radius
    for prev, nxt in zip(bobs, bobs[1:]):
        assert nxt.diameter == prev.diameter * r * r
    assert all(b.contains(tr.final_point) for b in tr.history)


@pytest.mark.parametrize("seed", range(50))
def test_avoidance_soundness_random_bobs(seed):
    alice = alice_orbit_avoidance(GOLDEN_CONJ, 0, Q, Q)
    tr = play_game(B0, alice, RandomLegalBob(), 40, seed=1000 + seed)
    (cert,) = certify_transcript(tr, GOLDEN_CONJ, [0], alice.declared_constant)
    assert cert.verified
    assert alice.declared_constant >= TSENG


def test_two_sided_avoidance():
    alice = AvoidanceAlice(GOLDEN_CONJ, [0], Q, Q, two_sided=True)
    tr = play_game(B0, alice, AdversarialBob(GOLDEN_CONJ, [0], two_sided=True), 40, seed=2)
    (cert,) = certify_transcript(tr, GOLDEN_CONJ, [0], alice.declared_constant, two_sided=True)
    assert cert.verified and cert.two_sided
    # symmetric: the reversed pair holds at the same constant
    rev = certify_rotation_pair(GOLDEN_CONJ, tr.final_point, 0, alice.declared_constant, 1, cert.K)
    assert rev.verified
