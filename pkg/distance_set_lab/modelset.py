"""Cut-and-project sets ``T(C)`` over a real number field.

``T(C)`` holds the algebraic integers ``sum a_j * a**j`` (integer ``a_j``)
whose conjugates other than the distinguished one have modulus at most
``C``. Windows ``T(C) & [-R, R]`` are enumerated by inverting the real
Vandermonde system of the embeddings.
"""

from __future__ import annotations

import functools
import itertools
import logging
import math
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import attrs
import numpy as np
from mpmath.ctx_mp import MPContext

from distance_set_lab import exactnum
from distance_set_lab.exactnum import FLOAT_GUARD, Frame, NumberField
from distance_set_lab.interval import Box, Interval
from distance_set_lab.pointsets import Budget, ProductPlanarSet

if TYPE_CHECKING:
    from collections.abc import Iterable, Iterator, Sequence

    from numpy.typing import NDArray

    from distance_set_lab.exactnum import RingElement

_logger = logging.getLogger(__name__)

_VANDERMONDE_BITS = 256


def _fraction_mpf(ctx: Any, value: Fraction, /) -> Any:
    return ctx.mpf(value.numerator) / value.denominator


def modulus_upper(box: Any, /) -> Fraction:
    """Rational upper bound of the modulus of a complex box."""
    if box.is_real:
        return box.re.magnitude()
    square = box.modulus_squared().hi
    scale = 1 << 64
    return Fraction(math.isqrt(math.ceil(square * scale * scale)) + 1, scale)


def conjugate_sum_bound(field: NumberField, k: int, /) -> Fraction:
    """Rational upper bound of ``1/2 * sum_j |a_k|**j``."""
    modulus = modulus_upper(field.root_boxes()[k])
    return sum((modulus**j for j in range(field.degree)), Fraction(0)) / 2


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class Vandermonde:
    """Real Vandermonde rows of the embeddings and bounds of the inverse.

    Row 0 is the distinguished embedding, then come the other real
    embeddings and a real and an imaginary row per complex pair. The
    inverse bounds are certified: an approximate inverse ``X`` is checked
    against interval enclosures of the rows through ``I - X M``.
    """

    embeddings: tuple[int, ...]
    """Embedding index owning each row."""
    inverse_bound: tuple[tuple[Fraction, ...], ...]
    """Rational upper bounds of ``|M^-1|`` entrywise."""
    determinant: float

    @property
    def size(self) -> int:
        return len(self.embeddings)

    def reach(self, bounds: Sequence[Fraction], /) -> list[Fraction]:
        """Upper bounds of ``|a_j|`` when row ``i`` is at most ``bounds[i]``."""
        return [
            sum((b * c for b, c in zip(row, bounds)), Fraction(0))
            for row in self.inverse_bound
        ]


def _rows(field: NumberField, bits: int, /) -> list[list[Interval]]:
    boxes = field.root_boxes(bits)
    rows: list[list[Interval]] = []

    def powers(box: Box, /) -> list[Box]:
        result = [Box.point(1)]
        for _ in range(1, field.degree):
            result.append((result[-1] * box).outward(bits))
        return result

    for k in range(field.real_count):
        rows.append([p.re for p in powers(boxes[k])])
    for k in field.complex_representatives():
        column = powers(boxes[k])
        rows.append([p.re for p in column])
        rows.append([p.im for p in column])
    return rows


def vandermonde(field: NumberField, /) -> Vandermonde:
    ctx = MPContext()
    ctx.prec = _VANDERMONDE_BITS
    d = field.degree
    owners = [*range(field.real_count)]
    for k in field.complex_representatives():
        owners.extend((k, k))
    rows = _rows(field, _VANDERMONDE_BITS)
    matrix = ctx.matrix(
        [[_fraction_mpf(ctx, entry.mid) for entry in row] for row in rows]
    )
    approx = ctx.inverse(matrix)
    X = [[Fraction(float(approx[i, j])) for j in range(d)] for i in range(d)]
    residual = Fraction(0)
    for i in range(d):
        row_sum = Fraction(0)
        for j in range(d):
            entry = Interval.point(1 if i == j else 0)
            for m in range(d):
                entry -= rows[m][j] * X[i][m]
            row_sum += entry.outward(_VANDERMONDE_BITS).magnitude()
        residual = max(residual, row_sum)
    if residual >= 1:
        msg = f"the embeddings of {field.name} are too close to separate"
        raise ValueError(msg)
    spread = max(sum(abs(x) for x in row) for row in X)
    slack = residual / (1 - residual) * spread
    _logger.debug(
        "Vandermonde inverse of %s certified with residual %.3g",
        field.name,
        float(residual),
    )
    return Vandermonde(
        embeddings=tuple(owners),
        inverse_bound=tuple(
            tuple(abs(x) + slack for x in row) for row in X
        ),
        determinant=float(abs(ctx.det(matrix))),
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
class ModelSetSpec:
    field: NumberField
    C: Fraction = attrs.field(converter=Fraction)
    K1: Fraction
    """Rational upper bound of ``K1_exact``."""
    K1_exact: RingElement
    """``1/2 * sum_j |a|**j`` as a field element."""
    K2: int
    vandermonde: Vandermonde

    def __repr__(self) -> str:
        return f"ModelSetSpec({self.field.name}, C={self.C})"

    @C.validator
    def _validate_c(
        self, _attribute: attrs.Attribute[Fraction], value: Fraction, /
    ) -> None:
        if value <= 0:
            msg = "C must be positive"
            raise ValueError(msg)

    @property
    def degree(self) -> int:
        return self.field.degree

    @property
    def frame(self) -> Frame:
        return Frame(ring=self.field, low=0, size=self.field.degree)

    def constraint_embeddings(self) -> tuple[int, ...]:
        """Embeddings bounded by ``C``: one per real or complex pair."""
        return tuple(
            k
            for k in dict.fromkeys(self.vandermonde.embeddings)
            if k != 0
        )

    def size_estimate(self, R: Fraction, /) -> int:
        real_others = self.field.real_count - 1
        pairs = (self.degree - self.field.real_count) // 2
        c = float(self.C)
        volume = (
            2 * float(R) * (2 * c) ** real_others * (math.pi * c * c) ** pairs
        )
        return int(volume / self.vandermonde.determinant) + 1


def default_c(field: NumberField, /) -> Fraction:
    """Smallest integer satisfying the net sufficiency bound."""
    if field.degree == 1:
        return Fraction(1)
    return Fraction(
        math.ceil(
            max(conjugate_sum_bound(field, k) for k in range(1, field.degree))
        )
    )


def model_set_spec(
    field: NumberField, C: Fraction | int | None = None, /
) -> ModelSetSpec:
    if C is None:
        C = default_c(field)
    C = Fraction(C)
    for k in range(1, field.degree):
        needed = conjugate_sum_bound(field, k)
        if C < needed:
            msg = (
                f"C={C} is below the net bound {float(needed):.6g} of"
                f" embedding {k}"
            )
            raise ValueError(msg)
    alpha = field.gen
    positive = alpha if exactnum.sign(alpha) >= 0 else -alpha
    k1_exact = sum(
        (positive**j for j in range(field.degree)), field.zero
    ) / 2
    k1 = exactnum.embed(k1_exact, 0, precision=64).re.hi
    table = vandermonde(field)
    widths = [C * sum(row, Fraction(0)) for row in table.inverse_bound]
    k2 = math.prod(math.floor(2 * h) + 1 for h in widths)
    _logger.debug(
        "Model set over %s: C=%s, K1<=%s, K2=%d", field.name, C, k1, k2
    )
    return ModelSetSpec(
        field=field, C=C, K1=k1, K1_exact=k1_exact, K2=k2, vandermonde=table
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
class WindowedSet:
    """``T(C) & [-R, R]`` sorted by value at the distinguished embedding."""

    spec: ModelSetSpec
    radius: Fraction
    coords: NDArray[np.int64]
    values: NDArray[np.float64]
    exact: bool = True
    """False when a boundary tie stayed undecided at the precision cap."""

    def __repr__(self) -> str:
        return f"WindowedSet({len(self)} elements, R={self.radius})"

    def __len__(self) -> int:
        return len(self.values)

    @property
    def frame(self) -> Frame:
        return self.spec.frame

    def element(self, i: int, /) -> RingElement:
        return self.spec.field.element(int(c) for c in self.coords[i])

    @property
    def elements(self) -> list[RingElement]:
        return [self.element(i) for i in range(len(self))]

    def __iter__(self) -> Iterator[RingElement]:
        return (self.element(i) for i in range(len(self)))


def _guard(scale: NDArray[np.float64], /) -> NDArray[np.float64]:
    return FLOAT_GUARD * (scale + 1)


def _within_exact(
    element: RingElement, spec: ModelSetSpec, R: Fraction, /
) -> bool | None:
    results = [exactnum.modulus_at_most(element, 0, R)]
    results.extend(
        exactnum.modulus_at_most(element, k, spec.C)
        for k in spec.constraint_embeddings()
    )
    if False in results:
        return False
    if None in results:
        return None
    return True


def _sort_exact(
    field: NumberField, coords: NDArray[np.int64], values: NDArray[Any], /
) -> tuple[NDArray[np.int64], NDArray[np.float64]]:
    order = np.argsort(values, kind="stable")
    coords, values = coords[order], values[order]
    if len(values) < 2:  # noqa: PLR2004
        return coords, values
    scale = np.abs(coords).astype(np.float64) @ np.abs(
        field.basis_floats(0, field.degree)
    )
    close = np.diff(values) <= _guard(scale[1:])
    if not close.any():
        return coords, values

    def cmp(i: int, j: int) -> int:
        return exactnum.compare(
            field.element(int(c) for c in coords[i]),
            field.element(int(c) for c in coords[j]),
        )

    order = np.arange(len(values))
    start = 0
    while start < len(close):
        if not close[start]:
            start += 1
            continue
        stop = start
        while stop < len(close) and close[stop]:
            stop += 1
        run = sorted(
            range(start, stop + 1), key=functools.cmp_to_key(cmp)
        )
        order[start : stop + 1] = run
        start = stop + 1
    _logger.debug("Resolved near ties in window order exactly")
    return coords[order], values[order]


def enumerate_T(
    spec: ModelSetSpec, R: Fraction | int, /, *, budget: Budget | None = None
) -> WindowedSet:
    """Every element of ``T(C)`` with ``|value| <= R``, exactly."""
    R = Fraction(R)
    if R <= 0:
        msg = "window radius must be positive"
        raise ValueError(msg)
    budget = budget or Budget()
    field = spec.field
    d = field.degree
    estimate = spec.size_estimate(R)
    _logger.debug("Window R=%s holds about %d elements", R, estimate)
    budget.check_points(estimate, what=f"T({spec.C}) window R={R}")
    if d == 1:
        a0 = np.arange(-math.floor(R), math.floor(R) + 1, dtype=np.int64)
        coords = a0.reshape(-1, 1)
        return WindowedSet(
            spec=spec,
            radius=R,
            coords=coords,
            values=a0.astype(np.float64),
        )
    table = spec.vandermonde
    reach = table.reach([R if k == 0 else spec.C for k in table.embeddings])
    tail_limits = [math.floor(r) for r in reach[1:]]
    tails = np.array(
        list(itertools.product(*(range(-t, t + 1) for t in tail_limits))),
        dtype=np.int64,
    ).reshape(-1, d - 1)
    roots = np.array(field.float_roots)
    powers = np.array([roots**j for j in range(1, d)])  # (d-1, d)
    shifts = tails.astype(np.float64) @ powers  # (n_tails, d) complex
    tail_scale = np.abs(tails).astype(np.float64) @ np.abs(powers)
    lo = np.full(len(tails), -math.inf)
    hi = np.full(len(tails), math.inf)
    checked = (0, *spec.constraint_embeddings())
    for k in checked:
        bound = float(R) if k == 0 else float(spec.C)
        s = shifts[:, k]
        margin = 1e-6 + _guard(tail_scale[:, k])
        if k < field.real_count:
            width = np.full(len(tails), bound)
            empty = np.zeros(len(tails), dtype=bool)
        else:
            room = bound * bound - s.imag**2
            width = np.sqrt(np.maximum(room, 0.0))
            empty = room < -2 * bound * margin - margin * margin
        lo = np.maximum(
            lo, np.where(empty, math.inf, -s.real - width - margin)
        )
        hi = np.minimum(
            hi, np.where(empty, -math.inf, -s.real + width + margin)
        )
    open_rows = lo <= hi
    first = np.where(open_rows, np.ceil(np.where(open_rows, lo, 0)), 0)
    last = np.where(open_rows, np.floor(np.where(open_rows, hi, 0)), -1)
    counts = np.maximum(last - first + 1, 0).astype(np.int64)
    total = int(counts.sum())
    budget.check_points(total, what=f"T({spec.C}) candidates R={R}")
    owner = np.repeat(np.arange(len(tails)), counts)
    a0 = (
        np.arange(total, dtype=np.int64)
        - np.repeat(np.cumsum(counts) - counts, counts)
        + np.repeat(first.astype(np.int64), counts)
    )
    keep = np.ones(total, dtype=bool)
    undecided = np.zeros(total, dtype=bool)
    for k in checked:
        bound = float(R) if k == 0 else float(spec.C)
        modulus = np.abs(a0 + shifts[owner, k])
        guard = _guard(np.abs(a0) + tail_scale[owner, k])
        keep &= modulus <= bound + guard
        undecided |= np.abs(modulus - bound) <= guard
    undecided &= keep
    coords = np.column_stack([a0, tails[owner]])
    exact = True
    boundary = np.flatnonzero(undecided)
    if len(boundary):
        _logger.debug("Deciding %d boundary elements exactly", len(boundary))
    for i in boundary:
        verdict = _within_exact(
            field.element(int(c) for c in coords[i]), spec, R
        )
        if verdict is None:
            exact = False
        keep[i] = verdict is not False
    coords = coords[keep]
    values = (a0[keep] + shifts[owner[keep], 0]).real
    coords, values = _sort_exact(field, coords, values)
    return WindowedSet(
        spec=spec, radius=R, coords=coords, values=values, exact=exact
    )


def product_set(
    T: WindowedSet,
    U: WindowedSet | None = None,
    /,
    *,
    budget: Budget | None = None,
) -> ProductPlanarSet:
    """The planar set ``T x T`` (or ``T x U``)."""
    budget = budget or Budget()
    other = T if U is None else U
    budget.check_pairs(len(T) * len(other), what="product set")
    return ProductPlanarSet(xs=T, ys=other, budget=budget)


# ---------------------------------------------------------------------------
# verification


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class NetReport:
    max_gap: Interval
    bound: Interval
    """Enclosure of ``2 * K1``."""
    gaps_checked: int
    passed: bool


def verify_net(T: WindowedSet, spec: ModelSetSpec, /) -> NetReport:
    """Largest gap between consecutive elements inside ``[-R+K1, R-K1]``."""
    if not len(T):
        msg = "window is empty"
        raise ValueError(msg)
    bound = spec.K1_exact * 2
    bound_box = exactnum.embed(bound, 0, precision=64).re
    values = T.values
    inner = float(T.radius - spec.K1)
    touching = np.flatnonzero(
        (values[1:] >= -inner - 1e-9) & (values[:-1] <= inner + 1e-9)
    )
    if not len(touching):
        return NetReport(
            max_gap=Interval.point(0),
            bound=bound_box,
            gaps_checked=0,
            passed=True,
        )
    gaps = values[touching + 1] - values[touching]
    best = int(touching[np.argmax(gaps)])
    suspects = touching[gaps >= float(bound_box.lo) - 1e-6]
    passed = True
    worst = T.element(best + 1) - T.element(best)
    for i in suspects:
        gap = T.element(int(i) + 1) - T.element(int(i))
        if exactnum.compare(gap, worst) > 0:
            worst = gap
        if exactnum.compare(gap, bound) > 0:
            passed = False
    return NetReport(
        max_gap=exactnum.embed(worst, 0, precision=64).re,
        bound=bound_box,
        gaps_checked=len(touching),
        passed=passed,
    )


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class LocalCountReport:
    max_count: int
    K2: int
    passed: bool


def verify_local_count(
    T: WindowedSet, spec: ModelSetSpec, /
) -> LocalCountReport:
    """Most elements in a closed window of width ``2C``."""
    if not len(T):
        msg = "window is empty"
        raise ValueError(msg)
    values = T.values
    width = float(2 * spec.C)
    scale = np.abs(values) + width
    lower = np.searchsorted(values, values + width - _guard(scale), "right")
    upper = np.searchsorted(values, values + width + _guard(scale), "right")
    counts = lower - np.arange(len(values))
    two_c = spec.field.constant(2 * spec.C)
    for i in np.flatnonzero(upper > lower):
        start = T.element(int(i))
        for j in range(int(lower[i]), int(upper[i])):
            if exactnum.compare(T.element(j) - start, two_c) <= 0:
                counts[i] = j - i + 1
    best = int(counts.max())
    return LocalCountReport(max_count=best, K2=spec.K2, passed=best <= spec.K2)


def in_model_set(a: RingElement, spec: ModelSetSpec, /) -> bool:
    """Exact membership in ``T(C)`` (no window)."""
    if not a.is_integral:
        return False
    return all(
        exactnum.modulus_at_most(a, k, spec.C) is not False
        for k in spec.constraint_embeddings()
    )


def with_c(spec: ModelSetSpec, C: Fraction, /) -> ModelSetSpec:
    """Same field with another band; the net bound is not re-checked."""
    return attrs.evolve(spec, C=Fraction(C))


def brute_force_T(
    spec: ModelSetSpec, R: Fraction | int, /, *, box: int
) -> list[tuple[int, ...]]:
    """Filter every integer vector with ``|a_j| <= box`` exactly."""
    R = Fraction(R)
    found = []
    for coords in itertools.product(range(-box, box + 1), repeat=spec.degree):
        a = spec.field.element(coords)
        if _within_exact(a, spec, R) is not False:
            found.append(coords)
    return found


def window_tuples(T: WindowedSet, /) -> list[tuple[int, ...]]:
    return [tuple(int(c) for c in row) for row in T.coords]


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class ClosureReport:
    checked: int
    failures: int
    bound: Fraction

    @property
    def passed(self) -> bool:
        return not self.failures


def difference_closure_check(
    T: WindowedSet, spec: ModelSetSpec, /
) -> ClosureReport:
    """``a - a'`` lies in ``T(2C)`` for every pair of the window."""
    doubled = with_c(spec, 2 * spec.C)
    elements = T.elements
    failures = sum(
        not in_model_set(a - b, doubled)
        for a, b in itertools.combinations(elements, 2)
    )
    return ClosureReport(
        checked=len(elements) * (len(elements) - 1) // 2,
        failures=failures,
        bound=doubled.C,
    )


def dilation_bound(spec: ModelSetSpec, beta: RingElement, /) -> Fraction:
    """``2C * max_k |sigma_k(beta)|`` rounded up to a rational."""
    largest = max(
        modulus_upper(exactnum.embed(beta, k, precision=64))
        for k in range(spec.degree)
    )
    return 2 * spec.C * largest


def dilation_closure_check(
    T: WindowedSet, spec: ModelSetSpec, beta: RingElement, /
) -> ClosureReport:
    """``beta * (a - a')`` lies in ``T(C1)`` for integral ``beta``."""
    if not beta.is_integral:
        msg = "beta must have integer power-basis coordinates"
        raise ValueError(msg)
    target = with_c(spec, dilation_bound(spec, beta))
    elements = T.elements
    failures = sum(
        not in_model_set(beta * (a - b), target)
        for a, b in itertools.combinations(elements, 2)
    )
    return ClosureReport(
        checked=len(elements) * (len(elements) - 1) // 2,
        failures=failures,
        bound=target.C,
    )


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class GrowthRatioReport:
    radii: tuple[Fraction, ...]
    counts: tuple[int, ...]
    ratios: tuple[float, ...]
    """``count(2R) / count(R)`` per radius."""
    passed: bool


def growth_ratio_check(
    spec: ModelSetSpec,
    radii: Iterable[Fraction | int],
    /,
    *,
    band: Sequence[float] = (1.6, 2.4),
    budget: Budget | None = None,
) -> GrowthRatioReport:
    radii = tuple(Fraction(r) for r in radii)
    counts = []
    ratios = []
    for R in radii:
        small = len(enumerate_T(spec, R, budget=budget))
        large = len(enumerate_T(spec, 2 * R, budget=budget))
        counts.append(small)
        ratios.append(large / small if small else math.inf)
    low, high = band
    return GrowthRatioReport(
        radii=radii,
        counts=tuple(counts),
        ratios=tuple(ratios),
        passed=all(low <= r <= high for r in ratios),
    )
