"""Finite planar point sets and their difference vectors.

Every set stores exact coordinates as integer numerator arrays over a
shared :class:`~distance_set_lab.exactnum.Frame` and one common
denominator, so that difference vectors can be produced in large numpy
chunks without leaving exact arithmetic.
"""

from __future__ import annotations

import abc
import logging
import math
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import attrs
import numpy as np

from distance_set_lab import exactnum, polynorm
from distance_set_lab.exactnum import FLOAT_GUARD, Frame

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Sequence

    from numpy.typing import NDArray

    from distance_set_lab.exactnum import Ring, RingElement
    from distance_set_lab.modelset import WindowedSet
    from distance_set_lab.polynorm import Point, PolygonalNorm

_logger = logging.getLogger(__name__)

INT64_SAFE = 1 << 62
DEFAULT_CHUNK = 1 << 20


class BudgetExceededError(RuntimeError):
    pass


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class Budget:
    """Memory and work limits checked before any large allocation.

    ``max_points`` is the memory budget: the largest point set held at
    once. ``max_pairs`` bounds the difference vectors one distance set may
    touch.
    """

    max_points: int = attrs.field(
        default=5_000_000, validator=attrs.validators.gt(0)
    )
    max_pairs: int = attrs.field(
        default=400_000_000, validator=attrs.validators.gt(0)
    )

    def check_points(self, count: int, /, *, what: str) -> None:
        if count > self.max_points:
            msg = (
                f"{what}: about {count} points exceed the budget of"
                f" {self.max_points}"
            )
            raise BudgetExceededError(msg)

    def check_pairs(self, count: int, /, *, what: str) -> None:
        if count > self.max_pairs:
            msg = (
                f"{what}: about {count} difference vectors exceed the budget"
                f" of {self.max_pairs}"
            )
            raise BudgetExceededError(msg)


def int_dtype(bound: int, /) -> Any:
    """int64 when every intermediate stays below ``bound``, else object."""
    return np.int64 if bound < INT64_SAFE else object


def max_abs(array: NDArray[Any], /) -> int:
    if not array.size:
        return 0
    return int(max(abs(int(array.max())), abs(int(array.min()))))


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class DifferenceChunk:
    """Integer numerators of difference vectors, one row per vector."""

    dx: NDArray[Any]
    dy: NDArray[Any]

    def __len__(self) -> int:
        return len(self.dx)

    @property
    def bound(self) -> int:
        return max(max_abs(self.dx), max_abs(self.dy))


class PlanarSet(abc.ABC):
    """A finite planar point set with exact coordinates."""

    frame: Frame
    denominator: int

    @abc.abstractmethod
    def __len__(self) -> int: ...

    @abc.abstractmethod
    def points(self) -> Iterator[Point]: ...

    @abc.abstractmethod
    def coordinate_reach(self) -> Fraction:
        """Upper bound of ``max(|x1|, |x2|)`` over the set."""

    @abc.abstractmethod
    def difference_estimate(self, reach: Fraction | None, /) -> int: ...

    @abc.abstractmethod
    def difference_chunks(
        self, *, reach: Fraction | None, chunk_size: int = DEFAULT_CHUNK
    ) -> Iterator[DifferenceChunk]:
        """Yield ``a - a'`` for pairs of points, ``0`` included.

        Only one of ``z`` and ``-z`` needs to be produced. Vectors with a
        coordinate above ``reach`` in absolute value may be skipped.
        """

    @property
    def ring(self) -> Ring:
        return self.frame.ring

    def restrict(
        self, P: PolygonalNorm, N: Fraction, /, *, budget: Budget
    ) -> PlanarSet:
        """The points ``x`` with ``||x|| <= N``."""
        budget.check_points(len(self), what="ball restriction")
        return FinitePlanarSet.from_points(
            (p for p in self.points() if _norm_at_most(P, p, N)),
            ring=self.ring,
        )


def _norm_at_most(P: PolygonalNorm, p: Point, N: Fraction, /) -> bool:
    return exactnum.compare(polynorm.norm_eval(P, p), N) <= 0


def _coords_array(
    frame: Frame, values: Sequence[RingElement], denominator: int, /
) -> NDArray[Any]:
    rows = [
        [int(c * denominator) for c in frame.coords_of(v)] for v in values
    ]
    bound = max((abs(c) for row in rows for c in row), default=0)
    array = np.array(rows, dtype=int_dtype(4 * bound + 1))
    return array.reshape(len(rows), frame.size)


@attrs.define(
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class FinitePlanarSet(PlanarSet):
    """An explicit list of points."""

    frame: Frame
    denominator: int
    xs: NDArray[Any]
    ys: NDArray[Any]

    def __repr__(self) -> str:
        return f"FinitePlanarSet({len(self)} points, {self.frame!r})"

    @classmethod
    def from_points(
        cls, points: Iterable[Sequence[Any]], /, *, ring: Ring
    ) -> FinitePlanarSet:
        pts = [polynorm.as_point(ring, p) for p in points]
        unique = list(dict.fromkeys(pts))
        frame = exactnum.frame_for(ring, (c for p in unique for c in p))
        denominator = math.lcm(
            1, *(c.denominator for p in unique for v in p for c in v.coords)
        )
        return cls(
            frame=frame,
            denominator=denominator,
            xs=_coords_array(frame, [p[0] for p in unique], denominator),
            ys=_coords_array(frame, [p[1] for p in unique], denominator),
        )

    def __len__(self) -> int:
        return len(self.xs)

    def points(self) -> Iterator[Point]:
        scale = self.denominator
        for x, y in zip(self.xs, self.ys):
            yield (
                self.frame.element(Fraction(int(c), scale) for c in x),
                self.frame.element(Fraction(int(c), scale) for c in y),
            )

    def float_coords(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        basis = self.frame.basis_floats() / self.denominator
        return (
            self.xs.astype(np.float64) @ basis,
            self.ys.astype(np.float64) @ basis,
        )

    def coordinate_reach(self) -> Fraction:
        if not len(self):
            return Fraction(0)
        fx, fy = self.float_coords()
        guess = float(max(np.abs(fx).max(), np.abs(fy).max()))
        return Fraction(guess) * (1 + Fraction(1, 1 << 20)) + Fraction(
            1, 1 << 30
        )

    def difference_estimate(self, reach: Fraction | None, /) -> int:
        n = len(self)
        return n * (n + 1) // 2

    def difference_chunks(
        self, *, reach: Fraction | None, chunk_size: int = DEFAULT_CHUNK
    ) -> Iterator[DifferenceChunk]:
        # Sweep in x order so far pairs are never formed.
        n = len(self)
        if not n:
            return
        fx, fy = self.float_coords()
        order = np.argsort(fx, kind="stable")
        xs, ys, fx, fy = self.xs[order], self.ys[order], fx[order], fy[order]
        limit = math.inf if reach is None else float(reach) * (1 + 1e-9) + 1e-9
        pending_x: list[NDArray[Any]] = [xs[:1] - xs[:1]]
        pending_y: list[NDArray[Any]] = [ys[:1] - ys[:1]]
        pending = 1
        for i in range(n - 1):
            stop = (
                n
                if limit == math.inf
                else int(np.searchsorted(fx, fx[i] + limit, side="right"))
            )
            if stop <= i + 1:
                continue
            dy_f = fy[i + 1 : stop] - fy[i]
            keep = np.abs(dy_f) <= limit
            if not keep.any():
                continue
            pending_x.append(xs[i + 1 : stop][keep] - xs[i])
            pending_y.append(ys[i + 1 : stop][keep] - ys[i])
            pending += int(keep.sum())
            if pending >= chunk_size:
                yield DifferenceChunk(
                    dx=np.concatenate(pending_x), dy=np.concatenate(pending_y)
                )
                pending_x, pending_y, pending = [], [], 0
        if pending:
            yield DifferenceChunk(
                dx=np.concatenate(pending_x), dy=np.concatenate(pending_y)
            )

    def restrict(
        self, P: PolygonalNorm, N: Fraction, /, *, budget: Budget
    ) -> PlanarSet:
        mask = norm_mask(P, self, N)
        return FinitePlanarSet(
            frame=self.frame,
            denominator=self.denominator,
            xs=self.xs[mask],
            ys=self.ys[mask],
        )


def norm_mask(
    P: PolygonalNorm, S: FinitePlanarSet, N: Fraction, /
) -> NDArray[np.bool_]:
    """Exact ``||x|| <= N`` for every point, float-filtered."""
    fx, fy = S.float_coords()
    facets = P.facet_floats()
    values = (np.outer(fx, facets[:, 0]) + np.outer(fy, facets[:, 1])).max(
        axis=1, initial=-math.inf
    )
    scale = np.abs(facets).sum(axis=1).max() * (np.abs(fx) + np.abs(fy)) + 1
    band = FLOAT_GUARD * scale
    mask = values <= float(N) - band
    undecided = np.flatnonzero(np.abs(values - float(N)) <= band)
    if len(undecided):
        _logger.debug(
            "Deciding %d ball memberships exactly", len(undecided)
        )
    for i in undecided:
        x = S.frame.element(Fraction(int(c), S.denominator) for c in S.xs[i])
        y = S.frame.element(Fraction(int(c), S.denominator) for c in S.ys[i])
        mask[i] = _norm_at_most(P, (x, y), N)
    return mask


# ---------------------------------------------------------------------------
# integer lattice regions


def _merge_intervals(
    lo: NDArray[np.int64], hi: NDArray[np.int64], /
) -> tuple[NDArray[np.int64], NDArray[np.int64]]:
    """Union of integer intervals ``[lo_k, hi_k]`` as sorted disjoint runs."""
    if not len(lo):
        return lo, hi
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    reach = np.maximum.accumulate(hi)
    starts = np.ones(len(lo), dtype=bool)
    starts[1:] = lo[1:] > reach[:-1] + 1
    idx = np.flatnonzero(starts)
    ends = np.append(idx[1:] - 1, len(lo) - 1)
    return lo[idx], reach[ends]


def _expand_runs(
    lo: NDArray[np.int64], hi: NDArray[np.int64], /
) -> NDArray[np.int64]:
    lengths = hi - lo + 1
    total = int(lengths.sum())
    offsets = np.repeat(np.cumsum(lengths) - lengths, lengths)
    return np.arange(total, dtype=np.int64) - offsets + np.repeat(lo, lengths)


@attrs.define(
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class LatticeRows(PlanarSet):
    """Integer points described row by row.

    Row ``y0 + k`` holds ``x`` in ``[lefts[k], rights[k]]`` (empty when
    ``lefts[k] > rights[k]``).
    """

    frame: Frame
    denominator: int = 1
    y0: int
    lefts: NDArray[np.int64]
    rights: NDArray[np.int64]

    def __repr__(self) -> str:
        return (
            f"LatticeRows({len(self)} points, rows {self.y0}.."
            f"{self.y0 + len(self.lefts) - 1})"
        )

    @classmethod
    def box(cls, ring: Ring, lo: int, hi: int, /) -> LatticeRows:
        """``Z^2`` intersected with the square ``[lo, hi]^2``."""
        if lo > hi:
            msg = f"empty box [{lo}, {hi}]"
            raise ValueError(msg)
        height = hi - lo + 1
        return cls(
            frame=exactnum.frame_for(ring, [ring.one]),
            y0=lo,
            lefts=np.full(height, lo, dtype=np.int64),
            rights=np.full(height, hi, dtype=np.int64),
        )

    def __len__(self) -> int:
        return int(np.maximum(self.rights - self.lefts + 1, 0).sum())

    def _element(self, value: int, /) -> RingElement:
        return self.ring.constant(value)

    def points(self) -> Iterator[Point]:
        for k, (left, right) in enumerate(zip(self.lefts, self.rights)):
            y = self._element(self.y0 + k)
            for x in range(int(left), int(right) + 1):
                yield self._element(x), y

    def coordinate_reach(self) -> Fraction:
        rows = np.flatnonzero(self.lefts <= self.rights)
        if not len(rows):
            return Fraction(0)
        ys = self.y0 + rows
        return Fraction(
            max(
                abs(int(ys[0])),
                abs(int(ys[-1])),
                max_abs(self.lefts[rows]),
                max_abs(self.rights[rows]),
            )
        )

    def _column(self, values: NDArray[np.int64], /) -> NDArray[np.int64]:
        column = np.zeros((len(values), self.frame.size), dtype=np.int64)
        column[:, -self.frame.low] = values  # exponent 0
        return column

    def difference_estimate(self, reach: Fraction | None, /) -> int:
        height = len(self.lefts)
        width = int((self.rights - self.lefts).max(initial=0)) + 1
        full = height * (2 * width - 1)
        if reach is None:
            return full
        side = 2 * math.floor(reach) + 1
        return min(full, side * side // 2 + side)

    def difference_chunks(
        self, *, reach: Fraction | None, chunk_size: int = DEFAULT_CHUNK
    ) -> Iterator[DifferenceChunk]:
        height = len(self.lefts)
        limit = None if reach is None else math.floor(reach)
        top = height - 1 if limit is None else min(height - 1, limit)
        pending_x: list[NDArray[np.int64]] = []
        pending_y: list[NDArray[np.int64]] = []
        pending = 0
        for dy in range(top + 1):
            l1, r1 = self.lefts[dy:], self.rights[dy:]
            l2, r2 = self.lefts[: height - dy], self.rights[: height - dy]
            valid = (l1 <= r1) & (l2 <= r2)
            if not valid.any():
                continue
            lo, hi = _merge_intervals(
                (l1 - r2)[valid], (r1 - l2)[valid]
            )
            if dy == 0:
                lo = np.maximum(lo, 0)
            if limit is not None:
                lo = np.maximum(lo, -limit)
                hi = np.minimum(hi, limit)
            keep = lo <= hi
            dx = _expand_runs(lo[keep], hi[keep])
            if not len(dx):
                continue
            pending_x.append(dx)
            pending_y.append(np.full(len(dx), dy, dtype=np.int64))
            pending += len(dx)
            if pending >= chunk_size:
                yield DifferenceChunk(
                    dx=self._column(np.concatenate(pending_x)),
                    dy=self._column(np.concatenate(pending_y)),
                )
                pending_x, pending_y, pending = [], [], 0
        if pending:
            yield DifferenceChunk(
                dx=self._column(np.concatenate(pending_x)),
                dy=self._column(np.concatenate(pending_y)),
            )

    def restrict(
        self, P: PolygonalNorm, N: Fraction, /, *, budget: Budget
    ) -> PlanarSet:
        """Row extents of ``N*BX`` computed exactly, one row at a time."""
        ring = self.ring
        bound = ring.constant(N)
        lefts = self.lefts.copy()
        rights = self.rights.copy()
        for k in range(len(lefts)):
            if lefts[k] > rights[k]:
                continue
            y = ring.constant(self.y0 + k)
            low, high = int(lefts[k]), int(rights[k])
            for f in P.facets:
                room = bound - f.u2 * y
                s = exactnum.sign(f.u1)
                if s == 0:
                    if exactnum.sign(room) < 0:
                        low, high = 1, 0
                    continue
                edge = room / f.u1
                if s > 0:
                    high = min(high, exactnum.floor(edge))
                else:
                    low = max(low, -exactnum.floor(-edge))
            lefts[k], rights[k] = low, high
        rows = np.flatnonzero(lefts <= rights)
        if not len(rows):
            return LatticeRows(
                frame=self.frame,
                y0=0,
                lefts=np.ones(0, dtype=np.int64),
                rights=np.zeros(0, dtype=np.int64),
            )
        first, last = int(rows[0]), int(rows[-1]) + 1
        return LatticeRows(
            frame=self.frame,
            y0=self.y0 + first,
            lefts=lefts[first:last],
            rights=rights[first:last],
        )


# ---------------------------------------------------------------------------
# products of one-dimensional windows


def axis_differences(
    W: WindowedSet, reach: Fraction | None, /, *, budget: Budget
) -> tuple[NDArray[Any], NDArray[np.float64]]:
    """Distinct ``a - a'`` over a sorted window, capped at ``reach``.

    Returns integer coordinates and float values, sorted by value.
    """
    coords, values = W.coords, W.values
    n = len(values)
    if not n:
        return coords[:0], values[:0]
    limit = (
        math.inf if reach is None else float(reach) * (1 + 1e-9) + 1e-9
    )
    if limit == math.inf:
        estimate = n * n
    else:
        ahead = np.searchsorted(values, values + limit, side="right")
        estimate = int((ahead - np.arange(n)).sum()) * 2
    budget.check_pairs(estimate, what="axis differences")
    low = coords.min(axis=0)
    span = coords.max(axis=0) - low
    strides = np.cumprod(np.append(1, 2 * span[:-1] + 1))
    packed = bool(strides[-1] * (2 * span[-1] + 1) < INT64_SAFE)
    seen: list[NDArray[Any]] = []
    block = max(1, DEFAULT_CHUNK // max(1, n))
    for start in range(0, n, block):
        stop = min(n, start + block)
        hi = (
            n
            if limit == math.inf
            else int(np.searchsorted(values, values[stop - 1] + limit, "right"))
        )
        lo = (
            0
            if limit == math.inf
            else int(np.searchsorted(values, values[start] - limit, "left"))
        )
        diff = coords[start:stop, None, :] - coords[None, lo:hi, :]
        fdiff = values[start:stop, None] - values[None, lo:hi]
        rows = diff[np.abs(fdiff) <= limit]
        if packed:
            seen.append(np.unique((rows + span) @ strides))
        else:
            seen.append(np.unique(rows, axis=0))
    if packed:
        keys = np.unique(np.concatenate(seen))
        unpacked = np.empty((len(keys), len(span)), dtype=np.int64)
        rest = keys.copy()
        for j in range(len(span) - 1, -1, -1):
            unpacked[:, j] = rest // strides[j]
            rest = rest - unpacked[:, j] * strides[j]
        result = unpacked - span
    else:
        result = np.unique(np.concatenate(seen), axis=0)
    floats = result.astype(np.float64) @ W.frame.basis_floats()
    order = np.argsort(floats, kind="stable")
    return result[order], floats[order]


@attrs.define(
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class ProductPlanarSet(PlanarSet):
    """The square ``xs x ys`` of two one-dimensional windows."""

    xs: WindowedSet
    ys: WindowedSet
    budget: Budget = attrs.field(factory=Budget)

    def __repr__(self) -> str:
        return f"ProductPlanarSet({len(self.xs)} x {len(self.ys)})"

    @property
    def frame(self) -> Frame:  # type: ignore[override]
        return self.xs.frame

    @property
    def denominator(self) -> int:  # type: ignore[override]
        return 1

    def __len__(self) -> int:
        return len(self.xs) * len(self.ys)

    def points(self) -> Iterator[Point]:
        for x in self.xs.elements:
            for y in self.ys.elements:
                yield x, y

    def coordinate_reach(self) -> Fraction:
        return max(self.xs.radius, self.ys.radius)

    def difference_estimate(self, reach: Fraction | None, /) -> int:
        def side(W: WindowedSet) -> int:
            if reach is None or not len(W):
                return 2 * len(W)
            density = len(W) / (2 * float(W.radius))
            return int(2 * density * 2 * float(reach)) + 1

        return side(self.xs) * side(self.ys) // 2 + side(self.ys)

    def difference_chunks(
        self, *, reach: Fraction | None, chunk_size: int = DEFAULT_CHUNK
    ) -> Iterator[DifferenceChunk]:
        dxs, fxs = axis_differences(self.xs, reach, budget=self.budget)
        dys, _ = axis_differences(self.ys, reach, budget=self.budget)
        if not len(dxs) or not len(dys):
            return
        self.budget.check_pairs(
            len(dxs) * len(dys) // 2 + len(dys), what="product differences"
        )
        nonneg = _nonnegative(self.frame, dxs, fxs)
        zero = ~dxs.any(axis=1)
        nonneg &= ~zero
        dy_nonneg = _nonnegative(
            self.frame, dys, dys.astype(np.float64) @ self.frame.basis_floats()
        )
        rows_x = np.flatnonzero(nonneg)
        per_block = max(1, chunk_size // len(dys))
        for start in range(0, len(rows_x), per_block):
            block = rows_x[start : start + per_block]
            yield DifferenceChunk(
                dx=np.repeat(dxs[block], len(dys), axis=0),
                dy=np.tile(dys, (len(block), 1)),
            )
        if zero.any():
            half = dys[dy_nonneg]
            yield DifferenceChunk(dx=np.zeros_like(half), dy=half)

    def restrict(
        self, P: PolygonalNorm, N: Fraction, /, *, budget: Budget
    ) -> PlanarSet:
        reach = N * polynorm.sandwich(P).linf_radius
        limit = float(reach) * (1 + 1e-9) + 1e-9
        xi = np.flatnonzero(np.abs(self.xs.values) <= limit)
        yi = np.flatnonzero(np.abs(self.ys.values) <= limit)
        budget.check_points(len(xi) * len(yi), what="ball restriction")
        candidates = FinitePlanarSet(
            frame=self.frame,
            denominator=1,
            xs=np.repeat(self.xs.coords[xi], len(yi), axis=0),
            ys=np.tile(self.ys.coords[yi], (len(xi), 1)),
        )
        return candidates.restrict(P, N, budget=budget)


def _nonnegative(
    frame: Frame, coords: NDArray[Any], floats: NDArray[np.float64], /
) -> NDArray[np.bool_]:
    """Exact ``value >= 0`` per row, using floats away from zero."""
    scale = np.abs(coords).astype(np.float64) @ np.abs(frame.basis_floats())
    mask = floats >= 0
    for i in np.flatnonzero(np.abs(floats) <= FLOAT_GUARD * (scale + 1)):
        value = frame.element(int(c) for c in coords[i])
        mask[i] = exactnum.sign(value) >= 0
    return mask
