"""Abstract train tracks, splits at large branches and weight transport.

A track is a set of switches; each switch has two sides listing branch ends
``(branch, k)`` with ``k`` in ``{0, 1}``.  The order inside a side is left to
right when facing from side 1 towards side 2.  No embedding is stored; surface
data (genus, punctures, complementary regions) is declared with the seed track
and only used for Euler-characteristic consistency checks.

Split convention.  Let ``b`` be large, travelled from switch ``s1`` to ``s2``.
The ends behind ``s1`` are ``[a, c]`` (left, right) and the ends beyond ``s2``
are ``[d, e]``.  A left split keeps the strands ``a -> d`` and ``c -> e`` and
adds a diagonal carrying ``w(a) - w(d)`` from the ``a`` strand to the ``e``
strand; a right split is the mirror image with ``w(d) - w(a)``; a central split
removes ``b`` and joins ``a`` to ``d`` and ``c`` to ``e``.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .cf import cf_expand
from .quadratic import QuadraticIrrational, exact, format_exact

End = tuple  # (branch name, 0 or 1)
LEFT, RIGHT, CENTRAL = "L", "R", "C"
KINDS = (LEFT, RIGHT, CENTRAL)


class NotCarried(ValueError):
    def __init__(self, message: str, switch=None):
        super().__init__(message)
        self.switch = switch


class InvalidSplit(ValueError):
    pass


@dataclass(frozen=True)
class Region:
    euler: int
    cusps: int

    @property
    def index(self) -> Fraction:
        return Fraction(2 * self.euler - self.cusps, 2)


@dataclass(frozen=True)
class Surface:
    genus: int
    punctures: int

    @property
    def euler(self) -> int:
        return 2 - 2 * self.genus - self.punctures


@dataclass(frozen=True)
class TrainTrack:
    switches: tuple  # tuple of (side1, side2), each a tuple of ends
    surface: Optional[Surface] = None
    regions: Optional[tuple] = None  # declared complementary regions (seed tracks only)
    # weights of the seed track as integer combinations of this track's weights:
    # tuple of (seed branch, ((branch, coeff), ...)); None means the identity
    carrying: Optional[tuple] = None

    # structure -----------------------------------------------------------
    @property
    def branches(self) -> list:
        return sorted({e[0] for sw in self.switches for side in sw for e in side}, key=str)

    def locate(self) -> dict:
        """end -> (switch index, side index, position)."""
        loc = {}
        for i, (s1, s2) in enumerate(self.switches):
            for j, side in enumerate((s1, s2)):
                for k, e in enumerate(side):
                    loc[e] = (i, j, k)
        return loc

    def validate(self) -> list[str]:
        defects = []
        counts: dict = {}
        for i, (s1, s2) in enumerate(self.switches):
            if not s1 or not s2:
                defects.append(f"switch {i + 1} has an empty side")
            for e in s1 + s2:
                counts[e] = counts.get(e, 0) + 1
        for b in self.branches:
            for k in (0, 1):
                c = counts.get((b, k), 0)
                if c != 1:
                    defects.append(f"branch {b} end {k} appears {c} times")
        for e in counts:
            if e[1] not in (0, 1):
                defects.append(f"bad end label {e}")
        if self.regions is not None and self.surface is not None:
            idx = sum(r.index for r in self.regions)
            if idx != self.surface.euler:
                defects.append(f"region indices sum to {idx}, surface Euler characteristic is {self.surface.euler}")
            if self.graph_euler + sum(r.euler for r in self.regions) != self.surface.euler:
                defects.append("switches - branches + region Euler characteristics != surface Euler characteristic")
        return defects

    @property
    def is_valid(self) -> bool:
        return not self.validate()

    @property
    def graph_euler(self) -> int:
        return len(self.switches) - len(self.branches)

    # text format ---------------------------------------------------------
    def to_text(self) -> str:
        lines = []
        if self.surface is not None:
            lines.append(f"surface genus={self.surface.genus} punctures={self.surface.punctures}")
        for r in self.regions or ():
            lines.append(f"region euler={r.euler} cusps={r.cusps}")
        for i, (s1, s2) in enumerate(self.switches):
            f = lambda side: ", ".join(f"{b}:{k}" for b, k in side)  # noqa: E731
            lines.append(f"switch {i + 1}: side1=[{f(s1)}] side2=[{f(s2)}]")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {"text": self.to_text(), "canonical": canonical_form(self)}


_SWITCH_RE = re.compile(r"^switch\s+(\d+)\s*:\s*side1\s*=\s*\[(.*?)\]\s*side2\s*=\s*\[(.*?)\]\s*$")


def _parse_ends(s: str) -> tuple:
    out = []
    for tok in filter(None, (t.strip() for t in s.split(","))):
        b, _, k = tok.rpartition(":")
        if not b or k not in ("0", "1"):
            raise ValueError(f"bad branch end {tok!r}; expected name:0 or name:1")
        out.append((b, int(k)))
    return tuple(out)


def parse_track(text: str) -> TrainTrack:
    switches = {}
    surface, regions = None, []
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if ln.startswith("surface"):
            kv = dict(p.split("=") for p in ln.split()[1:])
            surface = Surface(int(kv["genus"]), int(kv["punctures"]))
            continue
        if ln.startswith("region"):
            kv = dict(p.split("=") for p in ln.split()[1:])
            regions.append(Region(int(kv["euler"]), int(kv["cusps"])))
            continue
        m = _SWITCH_RE.match(ln)
        if not m:
            raise ValueError(f"cannot parse line {ln!r}")
        switches[int(m[1])] = (_parse_ends(m[2]), _parse_ends(m[3]))
    track = TrainTrack(tuple(switches[k] for k in sorted(switches)), surface, tuple(regions) or None)
    defects = track.validate()
    if defects:
        raise ValueError("invalid track: " + "; ".join(defects))
    return track


def punctured_torus_track() -> TrainTrack:
    """Standard complete track on the once-punctured torus: a large branch ``b`` and loops ``x``, ``y``."""
    return TrainTrack(
        (((("x", 0), ("y", 0)), (("b", 0),)), ((("b", 1),), (("y", 1), ("x", 1)))),
        Surface(1, 1),
        (Region(0, 2),),
    )


def punctured_torus_weights(x, y) -> dict:
    x, y = exact(x), exact(y)
    return {"x": x, "y": y, "b": x + y}


# ---------------------------------------------------------------------------
# carrying


@dataclass
class CarryResult:
    carried: bool
    interior: bool
    violating_switch: Optional[int] = None
    reason: Optional[str] = None


def carries(track: TrainTrack, weights: Mapping) -> CarryResult:
    """Membership of ``weights`` in the carrying polyhedron (switch conditions and w >= 0)."""
    w = {b: exact(weights[b]) for b in track.branches if b in weights}
    missing = [b for b in track.branches if b not in w]
    if missing:
        return CarryResult(False, False, None, f"missing weights for {missing}")
    neg = [b for b, v in w.items() if v < 0]
    if neg:
        return CarryResult(False, False, None, f"negative weight on {neg[0]}")
    for i, (s1, s2) in enumerate(track.switches):
        if sum((w[e[0]] for e in s1), exact(0)) != sum((w[e[0]] for e in s2), exact(0)):
            return CarryResult(False, False, i + 1, f"switch condition fails at switch {i + 1}")
    return CarryResult(True, all(v > 0 for v in w.values()))


# ---------------------------------------------------------------------------
# large branches and splits


def find_large_branches(track: TrainTrack) -> list:
    """Branches both of whose ends are the only end on their side of the switch."""
    loc = track.locate()
    out = []
    for b in track.branches:
        ok = True
        sw = []
        for k in (0, 1):
            i, j, _ = loc[(b, k)]
            if len(track.switches[i][j]) != 1:
                ok = False
            sw.append(i)
        if ok and sw[0] != sw[1]:
            out.append(b)
    return out


@dataclass(frozen=True)
class _Frame:
    s1: int
    s2: int
    a: End
    c: End
    d: End
    e: End


def _frame(track: TrainTrack, b) -> _Frame:
    loc = track.locate()
    if b not in find_large_branches(track):
        raise InvalidSplit(f"branch {b} is not large")
    i0, j0, _ = loc[(b, 0)]
    i1, j1, _ = loc[(b, 1)]
    # travel along b from end 0 to end 1: enter b at switch i0, leave at switch i1
    behind = track.switches[i0][1 - j0]
    beyond = track.switches[i1][1 - j1]
    if len(behind) != 2 or len(beyond) != 2:
        raise InvalidSplit("splits are implemented for trivalent switches only")
    # facing the direction of travel: at i0 we move from side (1-j0) to side j0
    behind = behind if j0 == 1 else behind[::-1]
    beyond = beyond if j1 == 0 else beyond[::-1]
    return _Frame(i0, i1, behind[0], behind[1], beyond[0], beyond[1])


def _central_plan(f: _Frame, allow_loop: bool = False):
    """Fusions ``(keep, drop, far_end, reused_end)`` for a central split, in order.

    The strand ``a -> d`` becomes the branch of ``a``: the far end of ``d``'s
    branch is relabelled as the (now free) end ``a``.  Then the same for
    ``c -> e``, after applying the first relabelling.  A strand that closes up
    on itself ends the plan (it is a closed curve with no switch) unless
    ``allow_loop`` is false, in which case ``InvalidSplit`` is raised.
    """
    plan = []
    rename: dict = {}
    for x, y in ((f.a, f.d), (f.c, f.e)):
        x, y = rename.get(x, x), rename.get(y, y)
        if x[0] == y[0]:
            if allow_loop:
                break
            raise InvalidSplit("central split closes a strand into a loop without switches")
        far = (y[0], 1 - y[1])
        plan.append((x[0], y[0], far, x))
        rename[far] = x
    return plan


def _local_carrying(track: TrainTrack, f: _Frame, b, kind: str) -> dict:
    """Parent weights in terms of child weights for one split."""
    m = {p: {p: 1} for p in track.branches}
    if kind in (LEFT, RIGHT):
        m[b] = {f.a[0]: 1, f.c[0]: 1} if f.a[0] != f.c[0] else {f.a[0]: 2}
        return m
    plan = _central_plan(f)
    alias = {}
    for keep, drop, _, _ in plan:
        alias[drop] = alias.get(keep, keep)
    for p in list(m):
        if p in alias:
            m[p] = {alias[p]: 1}
    ka, kc = alias.get(f.a[0], f.a[0]), alias.get(f.c[0], f.c[0])
    m[b] = {ka: 1, kc: 1} if ka != kc else {ka: 2}
    return m


def carrying_matrix(track: TrainTrack) -> dict:
    if track.carrying is None:
        return {p: {p: 1} for p in track.branches}
    return {r: dict(row) for r, row in track.carrying}


def _compose_carrying(outer: dict, local: dict) -> tuple:
    out = []
    for r in sorted(outer, key=str):
        acc: dict = {}
        for p, c in outer[r].items():
            for q, d in local[p].items():
                acc[q] = acc.get(q, 0) + c * d
        out.append((r, tuple(sorted(acc.items(), key=lambda kv: str(kv[0])))))
    return tuple(out)


def seed_weights(track: TrainTrack, weights: Mapping) -> dict:
    """Evaluate the carrying matrix: the seed-track weights of a carried measure."""
    w = {k: exact(v) for k, v in weights.items()}
    return {r: sum((c * w[q] for q, c in row.items()), exact(0)) for r, row in carrying_matrix(track).items()}


def split(track: TrainTrack, b, kind: str) -> TrainTrack:
    if kind not in KINDS:
        raise ValueError(f"unknown split kind {kind!r}")
    f = _frame(track, b)
    rest = [sw for i, sw in enumerate(track.switches) if i not in (f.s1, f.s2)]
    b0, b1 = (b, 0), (b, 1)
    if kind == LEFT:
        new = [((f.a,), (f.d, b0)), ((b1, f.c), (f.e,))]
        switches = tuple(rest) + tuple(new)
    elif kind == RIGHT:
        new = [((f.c,), (b0, f.e)), ((f.a, b1), (f.d,))]
        switches = tuple(rest) + tuple(new)
    else:
        switches = rest
        for _, _, far, reused in _central_plan(f):
            switches = [tuple(tuple(reused if e == far else e for e in side) for side in sw) for sw in switches]
        switches = tuple(switches)
    carrying = _compose_carrying(carrying_matrix(track), _local_carrying(track, f, b, kind))
    return TrainTrack(switches, track.surface, None, carrying)


def split_weights(track: TrainTrack, b, kind: str, weights: Mapping) -> dict:
    """Transport weights across a split, or raise ``NotCarried`` for the wrong kind.

    A central split whose strands close up returns the weights of the
    resulting closed curve(s) (the seed branch names of the surviving strands).
    """
    f = _frame(track, b)
    w = {k: exact(v) for k, v in weights.items()}
    wa, wd = w[f.a[0]], w[f.d[0]]
    if kind == LEFT and not wa > wd:
        raise NotCarried("left split needs w(a) > w(d)")
    if kind == RIGHT and not wd > wa:
        raise NotCarried("right split needs w(d) > w(a)")
    if kind == CENTRAL and wa != wd:
        raise NotCarried("central split needs w(a) == w(d)")
    if kind == LEFT:
        w[b] = wa - wd
    elif kind == RIGHT:
        w[b] = wd - wa
    else:
        del w[b]
        for _, drop, _, _ in _central_plan(f, allow_loop=True):
            del w[drop]
    return w


def kind_for(track: TrainTrack, b, weights: Mapping) -> str:
    f = _frame(track, b)
    wa, wd = exact(weights[f.a[0]]), exact(weights[f.d[0]])
    return LEFT if wa > wd else RIGHT if wd > wa else CENTRAL


@dataclass
class FullSplitResult:
    track: TrainTrack
    weights: dict
    log: str
    terminal: bool = False
    terminal_reason: Optional[str] = None


def weight_driven_full_split(track: TrainTrack, weights: Mapping) -> FullSplitResult:
    """Split every large branch once, each with the unique kind that keeps the weights carried."""
    chk = carries(track, weights)
    if not chk.carried:
        raise NotCarried(chk.reason or "weights not carried", chk.violating_switch)
    if not chk.interior:
        raise NotCarried("weights must lie in the interior of the carrying polyhedron")
    w = {k: exact(v) for k, v in weights.items()}
    log = []
    for b in find_large_branches(track):
        kind = kind_for(track, b, w)
        log.append(kind)
        if kind == CENTRAL:
            try:
                new = split(track, b, kind)
            except InvalidSplit as exc:
                return FullSplitResult(track, w, "".join(log), True, str(exc))
            w = split_weights(track, b, kind, w)
            track = new
            continue
        w = split_weights(track, b, kind, w)
        track = split(track, b, kind)
    return FullSplitResult(track, w, "".join(log))


def splitting_sequence(track: TrainTrack, weights: Mapping, steps: int) -> FullSplitResult:
    """Iterate full splits; stops early (terminal) when a central split closes up."""
    log = ""
    w = dict(weights)
    for _ in range(steps):
        r = weight_driven_full_split(track, w)
        log += r.log
        if r.terminal:
            return FullSplitResult(r.track, r.weights, log, True, r.terminal_reason)
        track, w = r.track, r.weights
        if not carries(track, w).interior:
            return FullSplitResult(track, w, log, True, "weights reached a face of the carrying polyhedron")
    return FullSplitResult(track, w, log)


def run_lengths(log: str) -> list[int]:
    """Run lengths of a kind log, starting with the right-split run (possibly 0)."""
    out = []
    prev, n = RIGHT, 0
    for ch in log:
        if ch == prev:
            n += 1
        else:
            out.append(n)
            prev, n = ch, 1
    out.append(n)
    return out


def cf_from_kind_log(x, y, n_terms: int) -> tuple[list[int], list[int]]:
    """Partial quotients of y/x from the punctured-torus kind log and from the continued fraction."""
    x, y = exact(x), exact(y)
    cf = cf_expand(y / x)
    want = cf.terms(n_terms)
    steps = sum(want) + want[-1] + 2
    res = splitting_sequence(punctured_torus_track(), punctured_torus_weights(x, y), steps)
    got = run_lengths(res.log)[:n_terms]
    return got, want


# ---------------------------------------------------------------------------
# canonical forms and T_n


def canonical_form(track: TrainTrack) -> str:
    """Labelled canonical form: invariant under switch reordering, switch flips and end swaps.

    Branch names and the carrying matrix to the seed track are kept (the
    marking); only the bookkeeping of ends and switch orientation is normalised.
    """
    branches = track.branches
    best = None
    for flips in itertools.product((0, 1), repeat=len(branches)) if len(branches) <= 12 else [(0,) * len(branches)]:
        swap = dict(zip(branches, flips))
        sws = []
        for s1, s2 in track.switches:
            s1 = tuple((b, k ^ swap[b]) for b, k in s1)
            s2 = tuple((b, k ^ swap[b]) for b, k in s2)
            sws.append(min((s1, s2), (s2[::-1], s1[::-1])))
        key = repr((sorted(sws), track.carrying))
        if best is None or key < best:
            best = key
    return best


@dataclass
class TnResult:
    depth: int
    tracks: list
    partial: bool = False
    explored: int = 0


def _children(track: TrainTrack):
    large = find_large_branches(track)
    for kinds in itertools.product(KINDS, repeat=len(large)):
        t = track
        ok = True
        for b, kd in zip(large, kinds):
            try:
                t = split(t, b, kd)
            except InvalidSplit:
                ok = False
                break
        if ok and t.is_valid and find_large_branches(t):
            yield "".join(kinds), t


def enumerate_Tn(track: TrainTrack, n: int, weights: Optional[Mapping] = None, budget: int = 20_000) -> TnResult:
    """Depth-``n`` descendants under full splits, deduplicated by labelled canonical form.

    With ``weights`` only the children carrying the transported weights are kept
    (the weights are carried along each path).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    level = [(track, None if weights is None else {k: exact(v) for k, v in weights.items()})]
    explored = 0
    for depth in range(n):
        seen, nxt = set(), []
        for t, w in level:
            if w is not None:
                r = weight_driven_full_split(t, w)
                if r.terminal:
                    continue
                kids = [(r.track, r.weights)]
            else:
                kids = [(c, None) for _, c in _children(t)]
            for c, cw in kids:
                explored += 1
                if explored > budget:
                    return TnResult(depth + 1, [x for x, _ in nxt], True, explored)
                key = canonical_form(c)
                if key in seen:
                    continue
                seen.add(key)
                nxt.append((c, cw))
        level = nxt
    return TnResult(n, [t for t, _ in level], False, explored)


def euler_consistent(parent: TrainTrack, child: TrainTrack, kind: str) -> bool:
    """Left/right splits keep switches - branches; a central split lowers it by one."""
    delta = child.graph_euler - parent.graph_euler
    return delta == (-1 if kind == CENTRAL else 0)
