"""The (alpha, beta) Schmidt game on the real line, with orbit-avoiding strategies.

Balls are closed intervals with exact rational centres and radii.  Targets live on
the circle R/Z, so distances to orbit points are taken mod 1.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .cf import RationalRotation, certify_rotation_pair, orbit_positions
from .quadratic import QuadraticIrrational, exact

ALICE, BOB = "alice", "bob"
GRID_BITS = 20  # strategies place centres on a grid of radius/2^20


class IllegalMove(RuntimeError):
    def __init__(self, player: str, round_index: int, reason: str):
        super().__init__(f"{player} made an illegal move in round {round_index}: {reason}")
        self.player = player
        self.round_index = round_index
        self.reason = reason


@dataclass(frozen=True)
class Ball:
    center: Fraction
    radius: Fraction

    def __post_init__(self):
        object.__setattr__(self, "center", Fraction(self.center))
        object.__setattr__(self, "radius", Fraction(self.radius))
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def diameter(self) -> Fraction:
        return 2 * self.radius

    @property
    def left(self) -> Fraction:
        return self.center - self.radius

    @property
    def right(self) -> Fraction:
        return self.center + self.radius

    def contains_ball(self, other: "Ball") -> bool:
        return self.left <= other.left and other.right <= self.right

    def contains(self, x) -> bool:
        return self.left <= x <= self.right

    def to_json(self) -> dict:
        return {"center": str(self.center), "radius": str(self.radius)}

    @classmethod
    def from_json(cls, obj) -> "Ball":
        return cls(Fraction(obj["center"]), Fraction(obj["radius"]))


@dataclass
class GameState:
    alpha_ratio: Fraction
    beta_ratio: Fraction
    history: list[Ball]

    def __post_init__(self):
        self.alpha_ratio = Fraction(self.alpha_ratio)
        self.beta_ratio = Fraction(self.beta_ratio)
        for r in (self.alpha_ratio, self.beta_ratio):
            if not 0 < r < 1:
                raise ValueError("game ratios must lie in (0, 1)")
        if not self.history:
            raise ValueError("history must start with Bob's ball B0")

    @property
    def next_mover(self) -> str:
        # history = B0, A1, B1, A2, ...: odd length means Alice moves next
        return ALICE if len(self.history) % 2 == 1 else BOB

    @property
    def current(self) -> Ball:
        return self.history[-1]

    @property
    def round_index(self) -> int:
        return (len(self.history) + 1) // 2

    def ratio_for(self, mover: str) -> Fraction:
        return self.alpha_ratio if mover == ALICE else self.beta_ratio

    def child_radius(self) -> Fraction:
        return self.current.radius * self.ratio_for(self.next_mover)

    def allowed_centers(self) -> tuple[Fraction, Fraction]:
        slack = self.current.radius - self.child_radius()
        return self.current.center - slack, self.current.center + slack


@dataclass
class MoveCheck:
    accepted: bool
    reason: Optional[str] = None  # "wrong-mover" | "ratio" | "containment"

    def __bool__(self):
        return self.accepted


def validate_move(state: GameState, ball: Ball, mover: Optional[str] = None) -> MoveCheck:
    if mover is not None and mover != state.next_mover:
        return MoveCheck(False, "wrong-mover")
    if ball.radius != state.child_radius():
        return MoveCheck(False, "ratio")
    if not state.current.contains_ball(ball):
        return MoveCheck(False, "containment")
    return MoveCheck(True)


def _snap_center(state: GameState, rel: float) -> Fraction:
    """Exact centre at relative offset ``rel`` (units of the current radius), kept legal."""
    lo, hi = state.allowed_centers()
    c = state.current.center + state.current.radius * Fraction(round(rel * (1 << GRID_BITS)), 1 << GRID_BITS)
    return min(max(c, lo), hi)


class Strategy:
    """A rule producing the next legal ball for ``player``.

    ``move`` must be a pure function of the state and the random generator passed
    in; :func:`play_game` seeds that generator from the game seed and round.
    """

    player = ALICE
    declared_constant: Optional[Fraction] = None

    def move(self, state: GameState, rng: random.Random) -> Ball:
        raise NotImplementedError

    @property
    def ratios(self) -> Optional[tuple[Fraction, Fraction]]:
        return None


class MidpointStrategy(Strategy):
    def __init__(self, player: str = BOB):
        self.player = player

    def move(self, state, rng):
        return Ball(state.current.center, state.child_radius())


class RandomLegalBob(Strategy):
    player = BOB

    def move(self, state, rng):
        slack = 1 - state.ratio_for(BOB)
        rel = rng.uniform(-float(slack), float(slack))
        return Ball(_snap_center(state, rel), state.child_radius())


class _OrbitTable:
    """Float positions of R^k x for 1 <= |k| <= cap, used to steer moves."""

    def __init__(self, alpha, anchors, cap: int, two_sided: bool):
        self.alpha = exact(alpha)
        if self.alpha.is_rational:
            raise RationalRotation("avoidance needs an irrational rotation")
        self.anchors = [exact(a).frac() for a in anchors]
        self.cap = int(cap)
        ks = np.arange(1, self.cap + 1, dtype=np.int64)
        if two_sided:
            ks = np.concatenate([ks, -ks])
        self.ks = ks
        self.absk = np.abs(ks)
        self.positions = [orbit_positions(self.alpha, x, ks) for x in self.anchors]

    def nearby(self, center: Fraction, radius: Fraction, horizon: int, reach: float = 3.0) -> np.ndarray:
        """Offsets (in units of ``radius``) of dangerous points within ``reach`` radii."""
        c = float(center - math.floor(center))
        r = float(radius)
        mask_k = self.absk <= horizon
        out = []
        for z in self.positions:
            zz = z[mask_k]
            off = np.mod(zz - c + 0.5, 1.0) - 0.5
            rel = off / r
            out.append(rel[np.abs(rel) <= reach])
        return np.concatenate(out) if out else np.empty(0)


def _horizon(diameter: Fraction, H: int, cap: int) -> int:
    return min(H * math.ceil(1 / diameter), cap)


class AvoidanceAlice(Strategy):
    """Alice keeps her ball as far as possible from the nearby low-index orbit points.

    The orbit points ``R^k x`` with ``|k| <= H * ceil(1/|B_i|)`` are dangerous at
    round ``i``; Alice plays the legal centre maximising the distance to the
    nearest dangerous point (ties go to the leftmost candidate).
    """

    player = ALICE

    def __init__(self, alpha, anchors, alpha_ratio, beta_ratio, *, H: int = 4,
                 max_horizon: int = 1 << 16, two_sided: bool = False):
        if not isinstance(anchors, (list, tuple)):
            anchors = [anchors]
        self.alpha = exact(alpha)
        self.anchors = [exact(a) for a in anchors]
        self.alpha_ratio, self.beta_ratio = Fraction(alpha_ratio), Fraction(beta_ratio)
        self.H = H
        self.max_horizon = max_horizon
        self.two_sided = two_sided
        self.table = _OrbitTable(self.alpha, self.anchors, max_horizon, two_sided)
        base = (self.alpha_ratio * self.beta_ratio / 4) ** 3
        # each extra target (another anchor, or the backward orbit) costs one factor
        n_targets = len(self.anchors) * (2 if two_sided else 1)
        self.declared_constant = base ** n_targets

    @property
    def ratios(self):
        return (self.alpha_ratio, self.beta_ratio)

    def horizon(self, ball: Ball) -> int:
        return _horizon(ball.diameter, self.H, self.max_horizon)

    def move(self, state, rng):
        if (state.alpha_ratio, state.beta_ratio) != self.ratios:
            raise ValueError("strategy built for different game ratios")
        cur = state.current
        pts = np.sort(self.table.nearby(cur.center, cur.radius, self.horizon(cur)))
        m = 1.0 - float(state.alpha_ratio)
        if pts.size == 0:
            return Ball(cur.center, state.child_radius())
        cands = [-m, m]
        cands += [float(v) for v in np.clip((pts[:-1] + pts[1:]) / 2, -m, m)]
        cands += [float(v) for v in np.clip(pts, -m, m)]
        cands = np.array(sorted(set(cands)))
        score = np.min(np.abs(cands[:, None] - pts[None, :]), axis=1)
        best = cands[int(np.argmax(score))]  # argmax returns the first (leftmost) maximiser
        return Ball(_snap_center(state, best), state.child_radius())


class AdversarialBob(Strategy):
    """Bob recentres as close as he legally can to the nearest dangerous orbit point."""

    player = BOB

    def __init__(self, alpha, anchors, *, H: int = 4, max_horizon: int = 1 << 16, two_sided: bool = False):
        if not isinstance(anchors, (list, tuple)):
            anchors = [anchors]
        self.H = H
        self.max_horizon = max_horizon
        self.table = _OrbitTable(alpha, anchors, max_horizon, two_sided)

    def move(self, state, rng):
        cur = state.current
        pts = self.table.nearby(cur.center, cur.radius, _horizon(cur.diameter, self.H, self.max_horizon), reach=1.5)
        if pts.size == 0:
            return Ball(cur.center, state.child_radius())
        target = float(pts[int(np.argmin(np.abs(pts)))])
        return Ball(_snap_center(state, target), state.child_radius())


class CombinedStrategy(Strategy):
    """Alice strategy aimed at the intersection of several targets.

    Avoidance strategies for one rotation are merged into a single avoidance over
    the union of their dangerous sets.  Any other mix is played round-robin, the
    i-th constituent choosing Alice's move in rounds congruent to i.
    """

    player = ALICE

    def __init__(self, strategies: Sequence[Strategy]):
        strategies = list(strategies)
        if not strategies:
            raise ValueError("need at least one strategy")
        ratios = {s.ratios for s in strategies}
        if len(ratios) != 1 or None in ratios:
            raise ValueError("constituent strategies must share the same (alpha, beta) ratios")
        self.constituents = strategies
        self._ratios = ratios.pop()
        if len(strategies) == 1:
            self.inner = strategies[0]
        elif all(isinstance(s, AvoidanceAlice) for s in strategies) and \
                len({(s.alpha, s.H, s.max_horizon, s.two_sided) for s in strategies}) == 1:
            s0 = strategies[0]
            anchors = [a for s in strategies for a in s.anchors]
            self.inner = AvoidanceAlice(s0.alpha, anchors, *self._ratios, H=s0.H,
                                        max_horizon=s0.max_horizon, two_sided=s0.two_sided)
        else:
            self.inner = None
        consts = [s.declared_constant for s in strategies]
        self.declared_constant = math.prod(consts) if all(c is not None for c in consts) else None

    @property
    def ratios(self):
        return self._ratios

    def constituent_constants(self) -> list[Optional[Fraction]]:
        """Declared constant for each constituent target once combined."""
        return [self.declared_constant] * len(self.constituents)

    def move(self, state, rng):
        if self.inner is not None:
            return self.inner.move(state, rng)
        i = (state.round_index - 1) % len(self.constituents)
        return self.constituents[i].move(state, rng)


def alice_orbit_avoidance(alpha, x, alpha_ratio, beta_ratio, **kw) -> AvoidanceAlice:
    return AvoidanceAlice(alpha, [x], alpha_ratio, beta_ratio, **kw)


def combine_strategies(strategies: Sequence[Strategy]) -> Strategy:
    combined = CombinedStrategy(strategies)
    return combined.constituents[0] if len(combined.constituents) == 1 else combined


@dataclass
class GameTranscript:
    alpha_ratio: Fraction
    beta_ratio: Fraction
    rounds: int
    history: list[Ball]
    final_point: Fraction
    seed: int = 0
    target_checks: list = field(default_factory=list)

    @property
    def bob_balls(self) -> list[Ball]:
        return self.history[0::2]

    def horizon(self, H: int = 4, cap: int = 1 << 16) -> int:
        return _horizon(self.history[-1].diameter, H, cap)

    def to_json(self) -> dict:
        return {
            "alpha_ratio": str(self.alpha_ratio),
            "beta_ratio": str(self.beta_ratio),
            "rounds": self.rounds,
            "seed": self.seed,
            "history": [b.to_json() for b in self.history],
            "final_point": str(self.final_point),
            "certifications": [c.to_json() for c in self.target_checks],
        }


def play_game(B0: Ball, alice: Strategy, bob: Strategy, rounds: int, *, alpha_ratio=None,
              beta_ratio=None, seed: int = 0) -> GameTranscript:
    """Alternate Alice and Bob for ``rounds`` full rounds after Bob's B0."""
    if rounds < 0:
        raise ValueError("rounds must be >= 0")
    ratios = alice.ratios or (alpha_ratio, beta_ratio)
    if alpha_ratio is not None:
        ratios = (Fraction(alpha_ratio), Fraction(beta_ratio))
    state = GameState(ratios[0], ratios[1], [B0])
    for i in range(1, rounds + 1):
        for player, strat in ((ALICE, alice), (BOB, bob)):
            rng = random.Random(f"{seed}:{player}:{i}")
            ball = strat.move(state, rng)
            check = validate_move(state, ball, player)
            if not check:
                raise IllegalMove(player, i, check.reason)
            state.history.append(ball)
    return GameTranscript(state.alpha_ratio, state.beta_ratio, rounds, list(state.history),
                          state.history[-1].center, seed)


def certify_transcript(transcript: GameTranscript, alpha, anchors, B, *, H: int = 4,
                       cap: int = 1 << 16, two_sided: bool = False, N: int = 1):
    """Certify the final point against every anchor up to the round-resolution horizon."""
    K = max(transcript.horizon(H, cap), N)
    certs = [certify_rotation_pair(alpha, x, transcript.final_point, B, N, K, two_sided=two_sided)
             for x in anchors]
    transcript.target_checks = certs
    return certs
