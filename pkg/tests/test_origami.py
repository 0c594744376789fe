import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flatflow.origami import (Disconnected, Endpoint, MarkedPoint, closed_geodesics, cycles,
                              enumerate_saddle_connections, format_cycles, l_origami, origami_from_permutations,
                              parse_cycles, parse_origami_text, shoot, torus_origami, wollmilchsau)
from flatflow.quadratic import exact
from flatflow.torus import min_gt_length


def random_origami(rng, n):
    while True:
        h, v = list(range(n)), list(range(n))
        rng.shuffle(h)
        rng.shuffle(v)
        try:
            return origami_from_permutations(n, [x + 1 for x in h], [x + 1 for x in v])
        except Disconnected:
            continue


def test_trivial_cover():
    o = torus_origami()
    assert o.genus == 1 and o.cone_points == [] and o.regular


def test_l_shaped_origami():
    o = l_origami()
    assert o.genus == 2
    assert [o.cone_angle(c) for c in o.cone_points] == [3]  # 6 pi
    assert not o.regular


def test_wollmilchsau():
    o = wollmilchsau()
    assert o.n == 8 and o.genus == 3
    assert sorted(o.cone_angle(c) for c in o.cone_points) == [2, 2, 2, 2]  # four 4 pi points
    assert o.regular and o.monodromy_order() == 8


def test_cycle_notation_roundtrip():
    p = parse_cycles("(1 3 2)(4 5)", 6)
    assert p == [2, 0, 1, 4, 3, 5]
    assert parse_cycles(format_cycles(p), 6) == p
    assert sorted(map(len, cycles(p))) == [1, 2, 3]


def test_disconnected_rejected():
    with pytest.raises(Disconnected):
        origami_from_permutations(2, "()", "()")


def test_origami_file(tmp_path):
    text = "3\n(1 2)\n(1 3)\nmarked 1 1/3 1/5\nmarked 3 (-1+1*sqrt(5))/2 1/2\n"
    o, marked = parse_origami_text(text)
    assert o == l_origami()
    assert marked[1].square == 2 and marked[1].x == exact("(-1+sqrt(5))/2")
    o2, m2 = parse_origami_text(o.to_text(marked))
    assert o2 == o and m2 == marked


@pytest.mark.parametrize("seed", range(100))
def test_euler_characteristic_two_ways(seed):
    rng = random.Random(seed)
    o = random_origami(rng, rng.randint(1, 9))
    combinatorial, from_angles = o.euler_two_ways()
    assert combinatorial == from_angles == 2 - 2 * o.genus
    assert sum(o.cone_angle(v) - 1 for v in range(len(o.vertices))) == 2 * o.genus - 2


# saddle connections -------------------------------------------------------


def test_torus_marked_self_connections_are_the_lattice_ball():
    o = torus_origami()
    m = [MarkedPoint(0, F(1, 3), F(1, 7))]
    conns = enumerate_saddle_connections(o, [Endpoint("marked", 0)], [Endpoint("marked", 0)], F(5, 2), m)
    got = sorted(tuple(int(z.as_fraction()) for z in c.displacement) for c in conns)
    ball = sorted((a, b) for a in range(-3, 4) for b in range(-3, 4) if (a or b) and 4 * (a * a + b * b) <= 25)
    assert got == ball and len(got) == 20


@given(st.fractions(F(1, 2), 3, max_denominator=4), st.fractions(0, 1, max_denominator=12).filter(lambda f: f < 1),
       st.fractions(0, 1, max_denominator=12).filter(lambda f: 0 < f < 1))
@settings(max_examples=20)
def test_torus_completeness(L, x, y):
    o = torus_origami()
    m = [MarkedPoint(0, x, y)]
    conns = enumerate_saddle_connections(o, [Endpoint("marked", 0)], [Endpoint("marked", 0)], L, m)
    r = math.ceil(L)
    ball = {(a, b) for a in range(-r, r + 1) for b in range(-r, r + 1) if (a or b) and a * a + b * b <= L * L}
    assert {tuple(int(z.as_fraction()) for z in cn.displacement) for cn in conns} == ball


def _check_by_shooting(o, c, marked):
    if c.start.kind == "marked":
        mp = marked[c.start.index]
        sq, x, y = c.start_square, mp.x, mp.y
    else:
        sq, x, y = c.start_square, exact(0), exact(0)
    dx, dy = c.displacement
    # nudge vertex starts into the right square: shoot from the corner with unit speed along the displacement
    s, xe, ye = shoot(o, sq, x if c.start.kind == "marked" else (1 if dx < 0 else 0),
                      y if c.start.kind == "marked" else (1 if dy < 0 else 0), dx, dy, 1)
    return s, xe, ye


def test_l_origami_cone_connections_shoot_true():
    o = l_origami()
    (cone,) = o.cone_points
    conns = enumerate_saddle_connections(o, [Endpoint("vertex", cone)], [Endpoint("vertex", cone)], F(3, 2))
    assert conns
    for c in conns:
        assert c.length_sq <= F(9, 4)
        s, xe, ye = _check_by_shooting(o, c, [])
        assert xe in (0, 1) and ye in (0, 1)
        cs = s
        if xe == 1:
            cs = o.h[cs]
        if ye == 1:
            cs = o.v[cs]
        assert o.vertex_of[cs] == cone


def test_marked_connections_shoot_true_on_wollmilchsau():
    o = wollmilchsau()
    marked = [MarkedPoint(0, F(1, 3), F(1, 5)), MarkedPoint(5, F(2, 7), F(3, 4))]
    eps = [Endpoint("marked", 0), Endpoint("marked", 1)]
    conns = enumerate_saddle_connections(o, eps, eps, 6, marked)
    assert conns
    for c in conns:
        s, xe, ye = _check_by_shooting(o, c, marked)
        end = marked[c.end.index]
        assert (s, xe, ye) == (end.square, end.x, end.y)
        # projection isometry: the developed length is the base displacement length
        dx, dy = c.displacement
        assert c.length_sq == dx * dx + dy * dy and c.length == pytest.approx(math.hypot(dx, dy))


def test_close_marked_points_below_separation():
    o = torus_origami()
    m = [MarkedPoint(0, F(1, 2), F(1, 2)), MarkedPoint(0, F(6, 10), F(1, 2))]
    eps = [Endpoint("marked", 0), Endpoint("marked", 1)]
    assert enumerate_saddle_connections(o, eps, eps, F(1, 20), m) == []


def test_cone_points_block_marked_points_do_not():
    o = l_origami()
    # through the cone point: (0,0) -> (1,1) diagonal from the centre of square 1 hits the corner
    m = [MarkedPoint(0, F(1, 2), F(1, 2))]
    conns = enumerate_saddle_connections(o, [Endpoint("marked", 0)], [Endpoint("marked", 0)], 2, m)
    assert all(c.displacement != (1, 1) or "RU" not in c.word for c in conns)
    # a marked point in the way does not block
    m2 = [MarkedPoint(0, F(1, 4), F(1, 2)), MarkedPoint(0, F(1, 2), F(1, 2))]
    e0 = [Endpoint("marked", 0)]
    far = enumerate_saddle_connections(torus_origami(), e0, e0, 1, m2)
    assert any(c.displacement == (1, 0) for c in far)


def test_connection_floors_hold_on_grid():
    o = wollmilchsau()
    marked = [MarkedPoint(0, F(1, 3), F(1, 5)), MarkedPoint(5, F(2, 7), F(3, 4))]
    eps = [Endpoint("marked", 0), Endpoint("marked", 1)]
    ts = np.arange(-10, 10, 1e-3)
    for c in enumerate_saddle_connections(o, eps, eps, 5, marked):
        h, a = float(c.displacement[0]), float(c.displacement[1])
        if not h or not a:
            continue
        floor = min_gt_length(c.displacement).value
        grid = np.sqrt(np.exp(ts) * h * h + np.exp(-ts) * a * a).min()
        assert grid >= floor - 1e-9


# closed curves ---------------------------------------------------------------


def test_closed_curve_lengths_equal_base_lengths():
    for o in (torus_origami(), l_origami(), wollmilchsau()):
        for g in closed_geodesics(o, 20):
            assert g.length_sq == g.base_length_sq
            assert sum(len(c) for c in [g.squares]) == g.multiplicity


def test_closed_curves_cover_every_square():
    o = wollmilchsau()
    for direction in [(1, 0), (0, 1), (1, 1)]:
        curves = [g for g in closed_geodesics(o, 20) if g.direction == direction]
        assert sorted(s for g in curves for s in g.squares) == list(range(o.n))
