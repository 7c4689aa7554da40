"""Finite stages of the infinite-sided ball and the slope-changing map.

Stage 0 is the quadrant piece ``0 <= x2 + x1 <= 1, 0 <= x2 - x1 <= 1``;
only its outer boundary from ``(-1/2, 1/2)`` over ``(0, 1)`` to
``(1/2, 1/2)`` is stored. Boundary points are parametrized by the ratio
``t = x1 / x2``, which increases along that boundary. Stage ``j`` cuts
every corner made at stage ``j - 1`` by a line whose slope is the mean of
the two adjacent side slopes. A cut is accepted only when both new
vertices have ratios ``a/b`` in lowest terms with ``|a|, b > N_j``, that
is, ratios outside the set of fractions with small terms. The ball is the
piece reflected across ``x1 = x2`` and ``x1 = -x2``.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import TYPE_CHECKING

import attrs
import numpy as np
import sympy

from distance_set_lab import distset, exactnum, polynorm
from distance_set_lab.pointsets import LatticeRows

if TYPE_CHECKING:
    from collections.abc import Iterator, Sequence

    from distance_set_lab.exactnum import RingElement
    from distance_set_lab.pointsets import Budget
    from distance_set_lab.polynorm import PolygonalNorm

_logger = logging.getLogger(__name__)

MAX_STAGES = 4
MAX_CANDIDATES = 20_000

Vertex = tuple[Fraction, Fraction]

_HALF = Fraction(1, 2)
_LEFT: Vertex = (-_HALF, _HALF)
_RIGHT: Vertex = (_HALF, _HALF)
_APEX_REGION = Fraction(1, 3)


class AvoidanceSearchError(RuntimeError):
    pass


def ratio(v: Vertex, /) -> Fraction:
    return v[0] / v[1]


def avoids(t: Fraction, n: int, /) -> bool:
    """True when ``t`` and ``1/t`` both have denominators above ``n``."""
    return t.denominator > n and abs(t.numerator) > n


def farey_gap(x: Fraction, n: int, /) -> tuple[Fraction, Fraction]:
    """Neighbours of ``x`` among fractions with denominator ``<= n``.

    Every fraction strictly between them has denominator ``> n``.
    """
    if x.denominator <= n:
        msg = f"{x} has denominator at most {n}"
        raise ValueError(msg)
    left = Fraction(math.floor(x))
    right = left + 1
    while True:
        mediant = Fraction(
            left.numerator + right.numerator,
            left.denominator + right.denominator,
        )
        if mediant.denominator > n:
            return left, right
        if x < mediant:
            right = mediant
        else:
            left = mediant


def reciprocal_gap(
    x: Fraction, n: int, /
) -> tuple[Fraction | None, Fraction | None]:
    """Ratios ``t`` around ``x`` whose reciprocal has denominator ``> n``.

    ``None`` stands for an unbounded end.
    """
    left, right = farey_gap(1 / x, n)
    if left >= 0:
        return Fraction(1) / right, None if left == 0 else 1 / left
    return None if right == 0 else 1 / right, 1 / left


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class ProtectedInterval:
    """Open ratio interval around a vertex where later cuts may land."""

    center: Fraction
    lo: Fraction
    hi: Fraction

    def __repr__(self) -> str:
        return f"ProtectedInterval({self.lo} < {self.center} < {self.hi})"

    def contains(self, t: Fraction, /) -> bool:
        return self.lo < t < self.hi


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class Cut:
    """The line ``x2 = slope*x1 + offset`` replacing one corner."""

    stage: int
    corner: Vertex
    slope: Fraction
    offset: Fraction
    left: Vertex
    right: Vertex

    def __repr__(self) -> str:
        return f"Cut(stage {self.stage}, x2 = {self.slope}*x1 + {self.offset})"

    def to_json(self) -> dict[str, object]:
        return {
            "stage": self.stage,
            "corner": [str(c) for c in self.corner],
            "slope": str(self.slope),
            "offset": str(self.offset),
            "vertices": [
                [str(c) for c in self.left],
                [str(c) for c in self.right],
            ],
        }


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class StagePolygon:
    stage: int
    schedule: tuple[int, ...]
    piece: tuple[Vertex, ...]
    """Outer boundary of the quadrant piece, ordered by increasing ratio."""
    ball: PolygonalNorm
    protected: tuple[ProtectedInterval, ...]
    cuts: tuple[Cut, ...]
    previous: StagePolygon | None = None

    def __repr__(self) -> str:
        return f"StagePolygon(stage {self.stage}, {len(self.piece)} vertices)"

    @property
    def threshold(self) -> int:
        """``N_j`` of this stage (0 at stage 0)."""
        return self.schedule[self.stage - 1] if self.stage else 0

    @property
    def next_threshold(self) -> int | None:
        return (
            self.schedule[self.stage]
            if self.stage < len(self.schedule)
            else None
        )

    def history(self) -> Iterator[StagePolygon]:
        stage: StagePolygon | None = self
        while stage is not None:
            yield stage
            stage = stage.previous

    def to_json(self) -> dict[str, object]:
        return {
            "stage": self.stage,
            "schedule": list(self.schedule),
            "piece": [[str(c) for c in v] for v in self.piece],
            "ball": self.ball.to_json(),
            "protected": [
                {"center": str(p.center), "lo": str(p.lo), "hi": str(p.hi)}
                for p in self.protected
            ],
            "cuts": [
                c.to_json() for stage in self.history() for c in stage.cuts
            ],
        }


# ---------------------------------------------------------------------------
# ball assembly


def _cross(o: Vertex, a: Vertex, b: Vertex, /) -> Fraction:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def assemble_ball(piece: Sequence[Vertex], /, *, name: str) -> PolygonalNorm:
    """Reflect the piece into the full ball and drop straight vertices."""
    upper = list(reversed(piece))
    left = [(-y, -x) for x, y in piece]
    lower = [(-x, -y) for x, y in reversed(piece)]
    right = [(y, x) for x, y in piece]
    cycle: list[Vertex] = []
    for part in (upper, left, lower, right):
        for v in part:
            if not cycle or cycle[-1] != v:
                cycle.append(v)
    if cycle[0] == cycle[-1]:
        cycle.pop()
    count = len(cycle)
    kept = [
        cycle[i]
        for i in range(count)
        if _cross(cycle[i - 1], cycle[i], cycle[(i + 1) % count])
    ]
    return polynorm.norm_create(
        kept, ring=exactnum.rationals(), name=name
    )


def _slope(a: Vertex, b: Vertex, /) -> Fraction:
    return (b[1] - a[1]) / (b[0] - a[0])


def _protect(
    piece: Sequence[Vertex],
    index: int,
    n: int,
    parent: ProtectedInterval | None,
    /,
) -> ProtectedInterval:
    t = ratio(piece[index])
    lo, hi = farey_gap(t, n)
    rlo, rhi = reciprocal_gap(t, n)
    if rlo is not None:
        lo = max(lo, rlo)
    if rhi is not None:
        hi = min(hi, rhi)
    lo = max(lo, (ratio(piece[index - 1]) + t) / 2)
    hi = min(hi, (ratio(piece[index + 1]) + t) / 2)
    if parent is not None:
        lo, hi = max(lo, parent.lo), min(hi, parent.hi)
    return ProtectedInterval(center=t, lo=(lo + t) / 2, hi=(hi + t) / 2)


def _candidates(lo: Fraction, hi: Fraction, n: int, /) -> Iterator[Fraction]:
    """Ratios ``a/p`` in ``(lo, hi)``, ``p`` prime, ``|a|, p > n``."""
    mid = (lo + hi) / 2
    if not mid or hi <= lo:
        msg = f"cannot search the ratio range ({lo}, {hi})"
        raise ValueError(msg)
    # Spacing 1/p below a quarter of the width puts round(mid*p) in range.
    start = max(
        n, math.ceil((n + 1) / abs(mid)) + 1, math.ceil(4 / (hi - lo))
    )
    p = int(sympy.nextprime(start))
    while True:
        a0 = round(mid * p)
        for a in (a0, a0 + 1, a0 - 1, a0 + 2, a0 - 2):
            t = Fraction(a, p)
            if lo < t < hi and abs(a) > n and a % p:
                yield t
        p = int(sympy.nextprime(p))


def _cut_corner(
    piece: Sequence[Vertex],
    index: int,
    region: ProtectedInterval,
    n: int,
    stage: int,
    /,
) -> Cut:
    A, v, B = piece[index - 1], piece[index], piece[index + 1]
    slope = (_slope(A, v) + _slope(v, B)) / 2
    tv = ratio(v)
    lo = max(region.lo, ratio(A))
    hi = min(region.hi, ratio(B))
    tried = 0
    for t in _candidates(lo, tv, n):
        tried += 1
        if tried > MAX_CANDIDATES:
            break
        lam = (t * A[1] - A[0]) / ((v[0] - A[0]) - t * (v[1] - A[1]))
        if not 0 < lam < 1:
            continue
        P = (A[0] + lam * (v[0] - A[0]), A[1] + lam * (v[1] - A[1]))
        denom = (B[1] - v[1]) - slope * (B[0] - v[0])
        if not denom:
            continue
        mu = (slope * (v[0] - P[0]) - (v[1] - P[1])) / denom
        if not 0 < mu < 1:
            continue
        Q = (v[0] + mu * (B[0] - v[0]), v[1] + mu * (B[1] - v[1]))
        tq = ratio(Q)
        if not (tv < tq < hi and avoids(tq, n)):
            _logger.debug(
                "Stage %d: ratio %s rejected, partner ratio %s", stage, t, tq
            )
            continue
        _logger.debug(
            "Stage %d: corner %s cut after %d candidates", stage, tv, tried
        )
        return Cut(
            stage=stage,
            corner=v,
            slope=slope,
            offset=P[1] - slope * P[0],
            left=P,
            right=Q,
        )
    msg = (
        f"no admissible cut of the corner with ratio {tv} at stage {stage}"
        f" (N = {n}) within {MAX_CANDIDATES} candidates"
    )
    raise AvoidanceSearchError(msg)


def _mirror(v: Vertex, /) -> Vertex:
    return (-v[0], v[1])


def _next_stage(
    current: StagePolygon, schedule: tuple[int, ...], /
) -> StagePolygon:
    stage = current.stage + 1
    n = schedule[stage - 1]
    piece = current.piece
    regions = {p.center: p for p in current.protected}
    cuts: list[Cut] = []
    for index in range(1, len(piece) - 1):
        t = ratio(piece[index])
        if t < 0:
            continue
        cut = _cut_corner(piece, index, regions[t], n, stage)
        cuts.append(cut)
        if t > 0:
            cuts.append(
                Cut(
                    stage=stage,
                    corner=_mirror(cut.corner),
                    slope=-cut.slope,
                    offset=cut.offset,
                    left=_mirror(cut.right),
                    right=_mirror(cut.left),
                )
            )
    vertices = {piece[0], piece[-1]}
    for cut in cuts:
        vertices.update((cut.left, cut.right))
    new_piece = tuple(sorted(vertices, key=ratio))
    parents = {}
    for cut in cuts:
        parent = regions[ratio(cut.corner)]
        parents[cut.left] = parent
        parents[cut.right] = parent
    protected = tuple(
        _protect(new_piece, i, n, parents[new_piece[i]])
        for i in range(1, len(new_piece) - 1)
    )
    _logger.info(
        "Built stage %d (N = %d): %d cuts, %d piece vertices",
        stage,
        n,
        len(cuts),
        len(new_piece),
    )
    return StagePolygon(
        stage=stage,
        schedule=schedule,
        piece=new_piece,
        ball=assemble_ball(new_piece, name=f"stage{stage}"),
        protected=protected,
        cuts=tuple(cuts),
        previous=current,
    )


def initial_stage(schedule: Sequence[int] = (), /) -> StagePolygon:
    piece = (_LEFT, (Fraction(0), Fraction(1)), _RIGHT)
    return StagePolygon(
        stage=0,
        schedule=tuple(schedule),
        piece=piece,
        ball=assemble_ball(piece, name="stage0"),
        protected=(
            ProtectedInterval(
                center=Fraction(0), lo=-_APEX_REGION, hi=_APEX_REGION
            ),
        ),
        cuts=(),
    )


def build_stage(
    schedule: Sequence[int], J: int, /, *, max_stages: int = MAX_STAGES
) -> StagePolygon:
    """``D_J`` for the thresholds ``N_1 < ... < N_J`` of ``schedule``."""
    values = tuple(int(n) for n in schedule)
    if any(int(n) != n for n in schedule):
        msg = "schedule values must be integers"
        raise ValueError(msg)
    if not 0 <= J <= max_stages:
        msg = f"stage must be in [0, {max_stages}], got {J}"
        raise ValueError(msg)
    if len(values) < J:
        msg = f"stage {J} needs {J} schedule values, got {len(values)}"
        raise ValueError(msg)
    if any(n < 1 for n in values) or any(
        a >= b for a, b in zip(values, values[1:])
    ):
        msg = "schedule must be positive and strictly increasing"
        raise ValueError(msg)
    current = initial_stage(values)
    for _ in range(J):
        current = _next_stage(current, values)
    return current


# ---------------------------------------------------------------------------
# checks


def check_nesting(D: StagePolygon, /) -> bool:
    """Every vertex of each stage lies in the ball of the stage before."""
    for stage in D.history():
        if stage.previous is None:
            continue
        outer = stage.previous.ball
        for v in stage.ball.vertices:
            if exactnum.compare(polynorm.norm_eval(outer, v), 1) > 0:
                return False
    return True


def allowed_slopes(J: int, /) -> frozenset[Fraction]:
    slopes = {Fraction(1), Fraction(-1)}
    for i in range(J):
        slopes.update(Fraction(a, 2**i) for a in range(-(2**i), 2**i + 1))
    return frozenset(slopes)


def check_slope_ledger(D: StagePolygon, /) -> bool:
    allowed = allowed_slopes(D.stage)
    return all(
        _slope(a, b) in allowed for a, b in zip(D.piece, D.piece[1:])
    )


def check_avoidance(D: StagePolygon, /) -> bool:
    """New vertices of stage ``j`` have ratios with both terms ``> N_j``."""
    for stage in D.history():
        n = stage.threshold
        for cut in stage.cuts:
            if not all(avoids(ratio(v), n) for v in (cut.left, cut.right)):
                return False
    if not D.stage:
        return True
    return all(avoids(ratio(v), D.threshold) for v in D.piece[1:-1])


def check_fixed_vertices(D: StagePolygon, /) -> bool:
    return D.piece[0] == _LEFT and D.piece[-1] == _RIGHT


def check_linf_floor(
    D: StagePolygon, samples: int, /, *, seed: int = 0, radius: int = 1000
) -> bool:
    """``||x|| >= max(|x1|, |x2|)`` on random lattice vectors."""
    rng = np.random.default_rng(seed)
    points = rng.integers(-radius, radius + 1, size=(samples, 2))
    for x1, x2 in points.tolist():
        value = polynorm.norm_eval(D.ball, (x1, x2))
        if exactnum.compare(value, max(abs(x1), abs(x2))) < 0:
            return False
    return True


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class StageReport:
    nesting: bool
    slope_ledger: bool
    avoidance: bool
    fixed_vertices: bool
    linf_floor: bool

    @property
    def passed(self) -> bool:
        return all(attrs.astuple(self))


def stage_checks(
    D: StagePolygon, /, *, samples: int = 200, seed: int = 0
) -> StageReport:
    return StageReport(
        nesting=check_nesting(D),
        slope_ledger=check_slope_ledger(D),
        avoidance=check_avoidance(D),
        fixed_vertices=check_fixed_vertices(D),
        linf_floor=check_linf_floor(D, samples, seed=seed),
    )


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class ContainmentReport:
    stage: int
    N: int
    count: int
    bound: int
    linf_floor: bool

    @property
    def passed(self) -> bool:
        return self.count <= self.bound and self.linf_floor


def verify_containment_bound(
    D: StagePolygon,
    N: int,
    /,
    *,
    budget: Budget | None = None,
    samples: int = 200,
    seed: int = 0,
) -> ContainmentReport:
    """Exact ``|distances of Z^2 up to N|`` against ``2**(2j+3) * N``."""
    upper = D.next_threshold
    if not D.threshold < N or (upper is not None and N > upper):
        msg = (
            f"N = {N} is outside ({D.threshold}, {upper or 'inf'}] for"
            f" stage {D.stage}"
        )
        raise ValueError(msg)
    lattice = LatticeRows.box(exactnum.rationals(), 0, N)
    distset.window_check(lattice, D.ball, Fraction(N))
    count = len(distset.distance_set(lattice, D.ball, N, budget=budget))
    bound = 2 ** (2 * D.stage + 3) * N
    report = ContainmentReport(
        stage=D.stage,
        N=N,
        count=count,
        bound=bound,
        linf_floor=check_linf_floor(D, samples, seed=seed, radius=N),
    )
    _logger.info(
        "Stage %d, N = %d: %d distances, bound %d", D.stage, N, count, bound
    )
    return report


# ---------------------------------------------------------------------------
# coordinate change


def affine_slope_change(
    P: PolygonalNorm, alpha: RingElement | int | Fraction, /
) -> PolygonalNorm:
    """The ball in coordinates ``x1' = x1, x2' = x2 / alpha``.

    Slope ``beta`` becomes ``beta / alpha``; in particular ``alpha``
    becomes 1 while 0 and vertical sides stay.
    """
    if not isinstance(alpha, exactnum.RingElement):
        alpha = P.ring.constant(alpha)
    if alpha.is_zero:
        msg = "alpha must be nonzero"
        raise ValueError(msg)
    vertices = [(x, y / alpha) for x, y in P.vertices]
    if exactnum.sign(alpha) < 0:
        vertices.reverse()
    return polynorm.norm_create(
        vertices, ring=P.ring, name=f"{P.name}/{alpha}" if P.name else ""
    )
