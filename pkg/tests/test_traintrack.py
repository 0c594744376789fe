import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from flatflow.cf import cf_expand
from flatflow.quadratic import GOLDEN_CONJ, QuadraticIrrational
from flatflow.traintrack import (InvalidSplit, NotCarried, canonical_form, carries, cf_from_kind_log, enumerate_Tn,
                                 euler_consistent, find_large_branches, kind_for, parse_track,
                                 punctured_torus_track, punctured_torus_weights, run_lengths, seed_weights, split,
                                 split_weights, splitting_sequence)

PHI = GOLDEN_CONJ + 1
SEED = punctured_torus_track()

positive = st.fractions(F(1, 100), 100, max_denominator=997)


def sample_weights(track, rng):
    """Random interior weights on a descendant of the punctured-torus track."""
    (big,) = find_large_branches(track)
    w = {b: F(rng.randint(1, 10**6), rng.randint(1, 1000)) for b in track.branches if b != big}
    w[big] = sum(w.values())
    return w


def test_golden_weights_are_interior():
    r = carries(SEED, punctured_torus_weights(1, PHI))
    assert r.carried and r.interior


def test_zero_weights_on_boundary():
    r = carries(SEED, {b: 0 for b in SEED.branches})
    assert r.carried and not r.interior


def test_perturbed_weight_reports_switch():
    w = punctured_torus_weights(1, PHI)
    w["x"] += 1
    r = carries(SEED, w)
    assert not r.carried and r.violating_switch is not None


def test_large_branches():
    assert find_large_branches(SEED) == ["b"]
    child = split(SEED, "b", "L")
    assert find_large_branches(child)
    two = parse_track("switch 1: side1=[x:0, y:0] side2=[x:1, y:1]")
    assert find_large_branches(two) == []


def test_golden_split_is_a_continued_fraction_step():
    w = punctured_torus_weights(1, PHI)
    assert kind_for(SEED, "b", w) == "R"
    w2 = split_weights(SEED, "b", "R", w)
    assert (w2["x"], w2["y"], w2["b"]) == (1, PHI, PHI - 1)
    child = split(SEED, "b", "R")
    assert carries(child, w2).interior
    assert seed_weights(child, w2) == w
    with pytest.raises(NotCarried):
        split_weights(SEED, "b", "L", w)


def test_equal_weights_only_central():
    w = punctured_torus_weights(1, 1)
    for kind in "LR":
        with pytest.raises(NotCarried):
            split_weights(SEED, "b", kind, w)
    assert split_weights(SEED, "b", "C", w)
    with pytest.raises(InvalidSplit):
        split(SEED, "b", "C")  # closes up into a loop


def test_golden_log_has_unit_runs():
    r = splitting_sequence(SEED, punctured_torus_weights(1, PHI), 20)
    assert len(r.log) == 20 and not r.terminal
    assert set(run_lengths(r.log)[1:-1]) == {1}


def test_silver_log_has_runs_of_two():
    r = splitting_sequence(SEED, punctured_torus_weights(1, 1 + QuadraticIrrational.sqrt(2)), 20)
    assert run_lengths(r.log)[:5] == [2, 2, 2, 2, 2]


def test_rational_weights_terminate():
    r = splitting_sequence(SEED, punctured_torus_weights(2, 3), 50)
    assert r.terminal and r.log.endswith("C")


def test_cf_of_sqrt7():
    got, want = cf_from_kind_log(3, 1 + QuadraticIrrational.sqrt(7), 15)
    assert got == want == cf_expand((1 + QuadraticIrrational.sqrt(7)) / 3).terms(15)


def test_depth_enumeration():
    assert [canonical_form(t) for t in enumerate_Tn(SEED, 0).tracks] == [canonical_form(SEED)]
    t1 = enumerate_Tn(SEED, 1).tracks
    assert sorted(canonical_form(t) for t in t1) == sorted(canonical_form(split(SEED, "b", k)) for k in "LR")
    assert [len(enumerate_Tn(SEED, n).tracks) for n in range(6)] == [1, 2, 4, 8, 16, 32]
    w = punctured_torus_weights(1, PHI)
    assert [len(enumerate_Tn(SEED, n, w).tracks) for n in range(6)] == [1] * 6


def test_budget_marks_partial():
    r = enumerate_Tn(SEED, 8, budget=50)
    assert r.partial and r.explored > 50


def test_text_roundtrip():
    child = split(SEED, "b", "L")
    child = split(child, find_large_branches(child)[0], "R")
    assert parse_track(child.to_text()).switches == child.switches


# properties -------------------------------------------------------------------


@given(positive, positive)
@settings(max_examples=100)
def test_exactly_one_kind_transports(x, y):
    w = punctured_torus_weights(x, y)
    ok = []
    for kind in "LRC":
        try:
            split_weights(SEED, "b", kind, w)
            ok.append(kind)
        except NotCarried:
            pass
    assert ok == (["C"] if x == y else [kind_for(SEED, "b", w)])


@given(positive, positive, st.integers(1, 8))
@settings(max_examples=60)
def test_euler_count_and_carrying_along_sequence(x, y, steps):
    track, w = SEED, punctured_torus_weights(x, y)
    w0 = dict(w)
    for _ in range(steps):
        large = find_large_branches(track)
        if not large:
            break
        b = large[0]
        kind = kind_for(track, b, w)
        if kind == "C":
            break
        w = split_weights(track, b, kind, w)
        child = split(track, b, kind)
        assert euler_consistent(track, child, kind)
        assert child.is_valid
        assert carries(child, w).carried
        assert seed_weights(child, w) == w0
        track = child


@pytest.mark.parametrize("depth", [1, 2, 3])
def test_children_polyhedra_nest(depth):
    rng = random.Random(depth)
    for t in enumerate_Tn(SEED, depth).tracks:
        for _ in range(20):
            w = sample_weights(t, rng)
            assert carries(t, w).interior
            assert carries(SEED, seed_weights(t, w)).carried
