import csv
import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatflow.cf import cf_value, golden_tail
from flatflow.quadratic import GOLDEN_CONJ, QuadraticIrrational, exact
from flatflow.torus import (FlatTorus, Lattice, NotEventuallyThick, apply_gt, brute_force_systole_sq,
                            eventual_thickness, gt_length, min_gt_length, reduce_and_systole, systole_profile,
                            write_profile_csv)

Z2 = Lattice((1, 0), (0, 1))

nonzero = st.fractions(min_value=-20, max_value=20, max_denominator=50).filter(bool)


@st.composite
def unimodular_lattices(draw):
    a, b, c = draw(nonzero), draw(st.fractions(-20, 20, max_denominator=50)), draw(st.fractions(-20, 20, max_denominator=50))
    return Lattice((a, b), (c, (1 + b * c) / a))


def test_systole_examples():
    assert reduce_and_systole(Z2).systole_sq == 1
    assert reduce_and_systole(Lattice((10, 0), (0, F(1, 10)))).exact_systole() == F(1, 10)
    lat = Lattice((1, 0), (F(1, 2), 1))
    assert reduce_and_systole(lat).systole_sq == 1 == brute_force_systole_sq(lat, 3)


@given(unimodular_lattices())
@settings(max_examples=200)
def test_reduction_matches_brute_force(lat):
    assert reduce_and_systole(lat).systole_sq == brute_force_systole_sq(lat, 5)
    assert lat.covolume == 1


def test_gt_on_square_lattice():
    tor = apply_gt(FlatTorus.standard(), stretch=2)  # t = 2 ln 2
    assert set(tor.lattice.basis) == {(exact(2), exact(0)), (exact(0), exact(F(1, 2)))} or \
        reduce_and_systole(tor.lattice).systole_sq == F(1, 4)
    for t in (0.5, 1.0, 3.0, 7.0):
        tor = apply_gt(FlatTorus.standard(), t)
        assert reduce_and_systole(tor.lattice).systole == pytest.approx(math.exp(-t / 2), rel=1e-12)


@given(unimodular_lattices(), st.floats(-5, 5))
@settings(max_examples=50)
def test_gt_preserves_covolume(lat, t):
    tor = apply_gt(FlatTorus(lat), t)
    assert float(tor.lattice.covolume.mid) == pytest.approx(1, abs=1e-12)


@given(st.fractions(F(1, 10), 10, max_denominator=20), st.fractions(F(1, 10), 10, max_denominator=20))
def test_gt_is_a_flow(s, r):
    tor = FlatTorus(Lattice((1, F(1, 3)), (F(2, 5), F(9, 5))))
    once = apply_gt(apply_gt(tor, stretch=s), stretch=r)
    assert same_lattice(once.lattice, apply_gt(tor, stretch=s * r).lattice)


def same_lattice(A, B):
    (a, b), (c, d) = B.basis
    det = a * d - b * c
    for v in A.basis:
        for z in ((v[0] * d - v[1] * c) / det, (a * v[1] - b * v[0]) / det):
            if not (z.is_rational and z.as_fraction().denominator == 1):
                return False
    return A.covolume == B.covolume


def test_min_gt_length_examples():
    m = min_gt_length((1, 1))
    assert m.value_sq == 2 and m.t == 0
    m = min_gt_length((3, F(1, 2)))
    assert m.value == pytest.approx(math.sqrt(3)) and m.t == pytest.approx(math.log(1 / 6))
    m = min_gt_length((0, 1))
    assert m.value == 0 and m.t == math.inf and not m.attained


@given(st.tuples(nonzero, nonzero))
@settings(max_examples=100)
def test_grid_never_beats_analytic_minimum(v):
    m = min_gt_length(v)
    ts = np.arange(-15, 15, 1e-3)
    h, a = float(v[0]), float(v[1])
    grid = np.sqrt(np.exp(ts) * h * h + np.exp(-ts) * a * a)
    assert grid.min() >= m.value - 1e-9
    # refinement converges to the analytic value when the minimiser is inside the grid
    if -15 < m.t < 15:
        assert grid.min() - m.value < 1e-5 * max(1.0, m.value)
    assert gt_length((h, a), m.t) == pytest.approx(m.value, rel=1e-9) if m.attained else True


def test_golden_slope_thickness_limit():
    th = eventual_thickness(FlatTorus.standard(GOLDEN_CONJ))
    assert th.limit_sq == 2 / QuadraticIrrational.sqrt(5)
    assert th.limit == pytest.approx(0.9457, abs=1e-4)
    ts = np.arange(0, 20, 1e-3)
    prof = systole_profile(FlatTorus.standard(GOLDEN_CONJ), ts)
    assert prof[ts > 5].min() >= th.epsilon - 1e-9
    assert prof[ts > 5].min() == pytest.approx(th.limit, abs=1e-3)


def test_rational_slope_not_thick():
    th = eventual_thickness(FlatTorus.standard(F(1, 2)))
    assert isinstance(th, NotEventuallyThick)
    assert th.closed_vector in {(exact(1), exact(2)), (exact(-1), exact(-2))}


def test_large_quotient_dips_then_recovers():
    plain = cf_value(golden_tail([0, 1, 1, 1, 1, 1, 1]))
    spiked = cf_value(golden_tail([0, 1, 1, 1, 1, 1, 10**6]))
    a = eventual_thickness(FlatTorus.standard(plain), K=30)
    b = eventual_thickness(FlatTorus.standard(spiked), K=30)
    # the convergent just before the large quotient is very thin
    assert b.profile_sq[4] > F(1, 2)
    assert b.profile_sq[5] < a.profile_sq[5] / 10**5
    assert b.argmin_index == 5
    assert b.limit_sq == a.limit_sq > 0


@given(st.lists(st.integers(1, 6), min_size=1, max_size=5))
@settings(max_examples=50)
def test_thickness_profile_is_nonincreasing_and_stabilises(prefix):
    slope = cf_value(golden_tail([0] + prefix))
    th = eventual_thickness(FlatTorus.standard(slope), K=40)
    prof = th.profile_sq
    assert all(x >= y for x, y in zip(prof, prof[1:]))
    assert prof[-1] == prof[-2]
    assert float(prof[-1]) <= float(th.limit_sq) + 1e-9 or prof[-1] <= th.limit_sq * 2


def test_profile_csv(tmp_path):
    ts = np.linspace(0, 1, 11)
    vals = systole_profile(FlatTorus.standard(GOLDEN_CONJ), ts)
    write_profile_csv(tmp_path / "p.csv", ts, vals)
    rows = list(csv.reader(open(tmp_path / "p.csv")))
    assert rows[0] == ["t", "systole"] and len(rows) == 12
    assert float(rows[3][1]) == vals[2]
