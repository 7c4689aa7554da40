"""Exact distance sets of finite planar sets under polygonal norms.

The norm of a difference vector ``z`` is ``max_i l_i(z)``. Each facet
functional acts on integer coordinate numerators as an integer matrix,
so values are produced as integer key vectors over one output frame and
one denominator. Floats only steer the computation: the argmax over
facets and the threshold test fall back to exact comparison inside a
guard band.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Literal

import attrs
import numpy as np

from distance_set_lab import exactnum, polynorm
from distance_set_lab.exactnum import FLOAT_GUARD, RingMismatchError
from distance_set_lab.modelset import (
    enumerate_T,
    in_model_set,
    modulus_upper,
    with_c,
)
from distance_set_lab.pointsets import (
    INT64_SAFE,
    Budget,
    LatticeRows,
    ProductPlanarSet,
    int_dtype,
)

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

    from numpy.typing import NDArray

    from distance_set_lab.exactnum import Frame, RingElement
    from distance_set_lab.modelset import ModelSetSpec
    from distance_set_lab.pointsets import DifferenceChunk, PlanarSet
    from distance_set_lab.polynorm import PolygonalNorm

_logger = logging.getLogger(__name__)

Mode = Literal["threshold", "ball"]
MODES: tuple[Mode, ...] = ("threshold", "ball")


class WindowInsufficientError(RuntimeError):
    pass


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class FacetProgram:
    """Integer matrices of every facet functional on a coordinate frame.

    ``l_i(z) = (A1[i] @ dx + A2[i] @ dy) / (scale * denominator)`` over
    ``out_frame``, where ``dx, dy`` are coordinate numerators.
    """

    A1: tuple[NDArray[Any], ...]
    A2: tuple[NDArray[Any], ...]
    scale: int
    out_frame: Frame
    basis: NDArray[np.float64]
    entry_bound: int

    @property
    def facet_count(self) -> int:
        return len(self.A1)


def facet_program(P: PolygonalNorm, frame: Frame, /) -> FacetProgram:
    pieces = []
    for f in P.facets:
        rows1, out1 = exactnum.multiplication_matrix(f.u1, frame)
        rows2, out2 = exactnum.multiplication_matrix(f.u2, frame)
        pieces.append((rows1, out1, rows2, out2))
    out = pieces[0][1]
    for _, out1, _, out2 in pieces:
        out = out.union(out1).union(out2)
    widened = [
        (
            exactnum.widen_rows(rows1, out1, out),
            exactnum.widen_rows(rows2, out2, out),
        )
        for rows1, out1, rows2, out2 in pieces
    ]
    scale = math.lcm(
        1,
        *(
            c.denominator
            for pair in widened
            for rows in pair
            for row in rows
            for c in row
        ),
    )
    bound = max(
        (
            abs(int(c * scale))
            for pair in widened
            for rows in pair
            for row in rows
            for c in row
        ),
        default=0,
    )
    dtype = int_dtype(bound)

    def integral(rows: list[list[Fraction]]) -> NDArray[Any]:
        return np.array(
            [[int(c * scale) for c in row] for row in rows], dtype=dtype
        ).reshape(out.size, frame.size)

    return FacetProgram(
        A1=tuple(integral(r1) for r1, _ in widened),
        A2=tuple(integral(r2) for _, r2 in widened),
        scale=scale,
        out_frame=out,
        basis=out.basis_floats(),
        entry_bound=bound,
    )


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class DistanceSet:
    """Distinct values ``||a - a'||`` as integer keys over one frame.

    Value ``k`` is ``frame.element(keys[k] / denominator)``; ``facets[k]``
    is a facet attaining it. Keys are sorted by value.
    """

    norm: PolygonalNorm
    N: Fraction
    mode: Mode
    keys: NDArray[Any]
    facets: NDArray[np.int64]
    floats: NDArray[np.float64]
    frame: Frame
    denominator: int
    source: dict[str, Any] = attrs.field(factory=dict)

    def __repr__(self) -> str:
        return f"DistanceSet({len(self)} values, N={self.N}, {self.mode})"

    def __len__(self) -> int:
        return len(self.keys)

    def value(self, k: int, /) -> RingElement:
        return self.frame.element(
            Fraction(int(c), self.denominator) for c in self.keys[k]
        )

    def values(self) -> list[RingElement]:
        return [self.value(k) for k in range(len(self))]

    def value_set(self) -> set[RingElement]:
        return set(self.values())


def canonical_distance(
    P: PolygonalNorm, z: Sequence[Any], /
) -> RingElement:
    """``||z||`` as the exact element used to compare and merge distances.

    Elements are kept in reduced coordinates, so equal distances are equal
    keys; ``z`` and ``-z`` give the same key.
    """
    return polynorm.norm_eval(P, z)


def _chunk_keys(
    program: FacetProgram, chunk: DifferenceChunk, /
) -> list[NDArray[Any]]:
    bound = chunk.bound * max(program.entry_bound, 1) * 2 * chunk.dx.shape[1]
    dtype = np.int64 if bound < INT64_SAFE else object
    dx = chunk.dx.astype(dtype)
    dy = chunk.dy.astype(dtype)
    return [
        dx @ a1.astype(dtype).T + dy @ a2.astype(dtype).T
        for a1, a2 in zip(program.A1, program.A2)
    ]


def _element(
    program: FacetProgram, key: NDArray[Any], denominator: int, /
) -> RingElement:
    return program.out_frame.element(
        Fraction(int(c), denominator) for c in key
    )


def _evaluate(
    program: FacetProgram,
    chunk: DifferenceChunk,
    denominator: int,
    threshold: Fraction | None,
    /,
) -> tuple[NDArray[Any], NDArray[np.int64], NDArray[np.float64]]:
    """Norm keys of a chunk, keeping values ``<= threshold``."""
    keys = _chunk_keys(program, chunk)
    basis = program.basis / denominator
    floats = np.column_stack([k.astype(np.float64) @ basis for k in keys])
    scale = np.column_stack(
        [np.abs(k.astype(np.float64)) @ np.abs(basis) for k in keys]
    ).max(axis=1)
    guard = FLOAT_GUARD * (scale + 1)
    top = floats.argmax(axis=1)
    rows = np.arange(len(top))
    best = floats[rows, top]
    close = (best[:, None] - floats) <= guard[:, None]
    close[rows, top] = False
    for r in np.flatnonzero(close.any(axis=1)):
        rivals = [
            int(i)
            for i in np.flatnonzero(close[r])
            if not np.array_equal(keys[int(i)][r], keys[int(top[r])][r])
        ]
        if not rivals:
            continue
        winner = int(top[r])
        value = _element(program, keys[winner][r], denominator)
        for i in rivals:
            other = _element(program, keys[i][r], denominator)
            if exactnum.compare(other, value) > 0:
                winner, value = i, other
        top[r] = winner
    chosen = np.stack([keys[i] for i in range(len(keys))], axis=1)[rows, top]
    if threshold is None:
        return chosen, top, best
    limit = float(threshold)
    keep = best <= limit + guard
    for r in np.flatnonzero(keep & (np.abs(best - limit) <= guard)):
        value = _element(program, chosen[r], denominator)
        keep[r] = exactnum.compare(value, threshold) <= 0
    return chosen[keep], top[keep], best[keep]


def _unique(
    keys: NDArray[Any], facets: NDArray[np.int64], floats: NDArray[Any], /
) -> tuple[NDArray[Any], NDArray[np.int64], NDArray[np.float64]]:
    if keys.dtype == object:
        seen: dict[tuple[int, ...], int] = {}
        for r, key in enumerate(keys):
            seen.setdefault(tuple(int(c) for c in key), r)
        index = np.array(sorted(seen.values()), dtype=np.int64)
    else:
        _, index = np.unique(keys, axis=0, return_index=True)
    return keys[index], facets[index], floats[index]


def _check_ring(S: PlanarSet, P: PolygonalNorm, /) -> None:
    if S.ring.key != P.ring.key:
        msg = (
            f"ring mismatch: point set over {S.ring.name},"
            f" norm over {P.ring.name}"
        )
        raise RingMismatchError(msg)


def distance_set(
    S: PlanarSet,
    P: PolygonalNorm,
    N: Fraction | int,
    /,
    *,
    mode: Mode = "threshold",
    budget: Budget | None = None,
) -> DistanceSet:
    """``{||a - a'|| : a, a' in S}`` restricted by ``N``.

    ``threshold`` keeps values ``<= N``; ``ball`` keeps every value among
    the points of ``S`` inside ``N * BX``.
    """
    N = Fraction(N)
    if N <= 0:
        msg = "threshold N must be positive"
        raise ValueError(msg)
    if mode not in MODES:
        msg = f"unknown mode {mode!r}"
        raise ValueError(msg)
    _check_ring(S, P)
    budget = budget or Budget()
    if mode == "ball":
        S = S.restrict(P, N, budget=budget)
        threshold, reach = None, None
    else:
        threshold = N
        reach = N * polynorm.sandwich(P).linf_radius
    estimate = S.difference_estimate(reach)
    _logger.debug(
        "Distance set N=%s (%s): about %d difference vectors",
        N,
        mode,
        estimate,
    )
    budget.check_pairs(estimate, what=f"distance set N={N}")
    program = facet_program(P, S.frame)
    denominator = program.scale * S.denominator
    found_keys: list[NDArray[Any]] = []
    found_facets: list[NDArray[np.int64]] = []
    found_floats: list[NDArray[np.float64]] = []
    for chunk in S.difference_chunks(reach=reach):
        if not len(chunk):
            continue
        keys, facets, floats = _unique(
            *_evaluate(program, chunk, denominator, threshold)
        )
        found_keys.append(keys)
        found_facets.append(facets)
        found_floats.append(floats)
    if found_keys:
        keys, facets, floats = _unique(
            np.concatenate(found_keys),
            np.concatenate(found_facets),
            np.concatenate(found_floats),
        )
    else:
        keys = np.zeros((0, program.out_frame.size), dtype=np.int64)
        facets = np.zeros(0, dtype=np.int64)
        floats = np.zeros(0)
    order = np.argsort(floats, kind="stable")
    return DistanceSet(
        norm=P,
        N=N,
        mode=mode,
        keys=keys[order],
        facets=facets[order],
        floats=floats[order],
        frame=program.out_frame,
        denominator=denominator,
        source={"set": repr(S), "points": len(S)},
    )


def distance_set_oracle(
    S: PlanarSet,
    P: PolygonalNorm,
    N: Fraction | int,
    /,
    *,
    mode: Mode = "threshold",
) -> set[RingElement]:
    """All pairs, exact interval signs only."""
    N = Fraction(N)
    points = list(S.points())
    if mode == "ball":
        points = [
            p
            for p in points
            if exactnum.sign_at_zero(canonical_distance(P, p) - N) <= 0
        ]
    values = set()
    for i, a in enumerate(points):
        for b in points[i:]:
            value = canonical_distance(P, (a[0] - b[0], a[1] - b[1]))
            if mode == "ball" or exactnum.sign_at_zero(value - N) <= 0:
                values.add(value)
    return values


# ---------------------------------------------------------------------------
# growth


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class GrowthReport:
    schedule: tuple[Fraction, ...]
    counts: tuple[int, ...]
    exponent: float
    intercept: float
    residual: float

    @property
    def monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.counts, self.counts[1:]))

    def ratios(self) -> tuple[float, ...]:
        return tuple(c / float(n) for n, c in zip(self.schedule, self.counts))

    def to_json(self) -> dict[str, Any]:
        return {
            "schedule": [str(n) for n in self.schedule],
            "counts": list(self.counts),
            "exponent": self.exponent,
            "intercept": self.intercept,
            "residual": self.residual,
        }


def check_schedule(
    schedule: Iterable[Fraction | int], /
) -> tuple[Fraction, ...]:
    values = tuple(Fraction(n) for n in schedule)
    if not values:
        msg = "schedule is empty"
        raise ValueError(msg)
    if values[0] <= 0 or any(a >= b for a, b in zip(values, values[1:])):
        msg = "schedule must be positive and strictly increasing"
        raise ValueError(msg)
    return values


def growth_report(
    schedule: Sequence[Fraction], counts: Sequence[int], /
) -> GrowthReport:
    """Least-squares fit of ``log count`` against ``log N``."""
    if len(schedule) >= 2:  # noqa: PLR2004
        x = np.log(np.array([float(n) for n in schedule]))
        y = np.log(np.maximum(np.array(counts, dtype=np.float64), 1.0))
        (slope, intercept), residuals, *_ = np.polyfit(x, y, 1, full=True)
        residual = (
            math.sqrt(float(residuals[0]) / len(x)) if len(residuals) else 0.0
        )
    else:
        slope, intercept, residual = math.nan, math.nan, math.nan
    report = GrowthReport(
        schedule=tuple(schedule),
        counts=tuple(counts),
        exponent=float(slope),
        intercept=float(intercept),
        residual=residual,
    )
    if not report.monotone:
        _logger.warning("Counts are not nondecreasing: %s", report.counts)
    return report


def window_check(S: PlanarSet, P: PolygonalNorm, N: Fraction, /) -> None:
    """Refuse windows that cannot hold every pair at distance ``N``."""
    needed = N * polynorm.sandwich(P).linf_radius
    have = S.coordinate_reach()
    if have < needed:
        msg = (
            f"window reaches {float(have):.6g} but N={N} needs"
            f" {float(needed):.6g}"
        )
        raise WindowInsufficientError(msg)


def count_at(
    generator: Callable[[Fraction], PlanarSet],
    P: PolygonalNorm,
    N: Fraction,
    /,
    *,
    mode: Mode = "threshold",
    budget: Budget | None = None,
) -> int:
    S = generator(N)
    window_check(S, P, N)
    return len(distance_set(S, P, N, mode=mode, budget=budget))


def growth_scan(
    generator: Callable[[Fraction], PlanarSet],
    P: PolygonalNorm,
    schedule: Iterable[Fraction | int],
    /,
    *,
    mode: Mode = "threshold",
    budget: Budget | None = None,
) -> GrowthReport:
    values = check_schedule(schedule)
    counts = [
        count_at(generator, P, N, mode=mode, budget=budget) for N in values
    ]
    return growth_report(values, counts)


def lattice_windows(P: PolygonalNorm, /) -> Callable[[Fraction], PlanarSet]:
    """Centered boxes of ``Z^2`` just wide enough for each threshold."""
    reach = polynorm.sandwich(P).linf_radius

    def generate(N: Fraction, /) -> PlanarSet:
        M = math.ceil(N * reach)
        return LatticeRows.box(P.ring, -M, M)

    return generate


def model_set_windows(
    spec: ModelSetSpec, P: PolygonalNorm, /, *, budget: Budget | None = None
) -> Callable[[Fraction], PlanarSet]:
    """Squares ``T x T`` of model-set windows sized for each threshold."""
    reach = polynorm.sandwich(P).linf_radius
    budget = budget or Budget()

    def generate(N: Fraction, /) -> PlanarSet:
        T = enumerate_T(spec, N * reach, budget=budget)
        return ProductPlanarSet(xs=T, ys=T, budget=budget)

    return generate


# ---------------------------------------------------------------------------
# structure checks


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class DistanceClosureReport:
    checked: int
    failures: int
    bound: Fraction

    @property
    def passed(self) -> bool:
        return not self.failures


def closure_bound(P: PolygonalNorm, spec: ModelSetSpec, /) -> Fraction:
    """``2C * max_i max_k (|s_i u_i1| + |s_i u_i2|)`` at every embedding."""
    best = Fraction(0)
    for f in P.facets:
        s = f.integral_scale()
        for k in range(spec.degree):
            total = modulus_upper(
                exactnum.embed(f.u1 * s, k, precision=64)
            ) + modulus_upper(exactnum.embed(f.u2 * s, k, precision=64))
            best = max(best, total)
    return 2 * spec.C * best


def closure_check(
    D: DistanceSet, spec: ModelSetSpec, /
) -> DistanceClosureReport:
    """Every distance, times its facet's integral scale, lies in ``T(C')``."""
    bound = closure_bound(D.norm, spec)
    target = with_c(spec, bound)
    failures = 0
    for k in range(len(D)):
        scale = D.norm.facets[int(D.facets[k])].integral_scale()
        if not in_model_set(D.value(k) * scale, target):
            failures += 1
            _logger.debug("Distance %s escapes T(%s)", D.value(k), bound)
    return DistanceClosureReport(
        checked=len(D), failures=failures, bound=bound
    )


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class DensityReport:
    count: int
    floor: int
    passed: bool


def density_floor(
    S: PlanarSet,
    P: PolygonalNorm,
    N: Fraction | int,
    /,
    *,
    net: Fraction,
    budget: Budget | None = None,
) -> DensityReport:
    """Points with ``||x|| <= N/2`` against the net lower bound.

    ``net`` is the net constant of each coordinate axis; the square of
    half-width ``h = (N/2) * linf_inradius`` lies in the ball and holds
    at least ``floor(h / net)**2`` points.
    """
    N = Fraction(N)
    half = N / 2
    h = half * polynorm.sandwich(P).linf_inradius
    floor = math.floor(h / net) ** 2
    count = len(S.restrict(P, half, budget=budget or Budget()))
    return DensityReport(count=count, floor=floor, passed=count >= floor)

