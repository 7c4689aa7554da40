"""Norms whose unit ball is a centrally symmetric convex polygon.

A polygon is given by its vertices in counterclockwise order. Each edge
carries a linear functional equal to 1 on that edge, and the gauge of a
point is the largest of these functionals.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import TYPE_CHECKING, Union

import attrs
import numpy as np

from distance_set_lab import exactnum
from distance_set_lab.exactnum import (
    NotInvertibleError,
    RingElement,
    RingMismatchError,
)

if TYPE_CHECKING:
    from collections.abc import Sequence

    from numpy.typing import NDArray

    from distance_set_lab.exactnum import Ring

_logger = logging.getLogger(__name__)

Coordinate = Union[RingElement, int, Fraction]
Point = tuple[RingElement, RingElement]

_SANDWICH_BITS = 20


class InvalidPolygonError(ValueError):
    pass


def _cross(
    a1: RingElement, a2: RingElement, b1: RingElement, b2: RingElement, /
) -> RingElement:
    return a1 * b2 - a2 * b1


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class Facet:
    """Linear functional ``u1*x1 + u2*x2`` equal to 1 on one side."""

    u1: RingElement
    u2: RingElement

    def __repr__(self) -> str:
        return f"Facet(({self.u1})*x1 + ({self.u2})*x2)"

    def value(self, x: Point, /) -> RingElement:
        return self.u1 * x[0] + self.u2 * x[1]

    def integral_scale(self) -> int:
        """Smallest positive integer making both coefficients integral."""
        return math.lcm(
            *(c.denominator for c in self.u1.coords + self.u2.coords)
        )


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class Slope:
    value: RingElement | None
    """None stands for the slope of a vertical side."""

    def __repr__(self) -> str:
        return f"Slope({self})"

    def __str__(self) -> str:
        return "inf" if self.value is None else str(self.value)

    @property
    def is_infinite(self) -> bool:
        return self.value is None


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class PolygonalNorm:
    """A centrally symmetric convex polygon and its gauge.

    Vertices are listed counterclockwise; facet ``i`` joins vertex ``i``
    to vertex ``i + 1``.
    """

    ring: Ring
    vertices: tuple[Point, ...]
    facets: tuple[Facet, ...]
    name: str = ""

    def __repr__(self) -> str:
        return f"PolygonalNorm({self.name or len(self.vertices)})"

    def facet_floats(self) -> NDArray[np.float64]:
        return np.array(
            [[f.u1.to_float(), f.u2.to_float()] for f in self.facets]
        )

    def to_json(self) -> list[list[object]]:
        return [[x.to_json(), y.to_json()] for x, y in self.vertices]


def as_point(ring: Ring, x: Sequence[Coordinate], /) -> Point:
    if len(x) != 2:  # noqa: PLR2004
        msg = f"expected a planar point, got {len(x)} coordinates"
        raise ValueError(msg)
    coords = []
    for c in x:
        if isinstance(c, RingElement):
            if c.ring.key != ring.key:
                msg = f"ring mismatch: {c.ring.name} and {ring.name}"
                raise RingMismatchError(msg)
            coords.append(c)
        else:
            coords.append(ring.constant(c))
    return coords[0], coords[1]


def _ring_of(vertices: Sequence[Sequence[Coordinate]], /) -> Ring:
    for v in vertices:
        for c in v:
            if isinstance(c, RingElement):
                return c.ring
    return exactnum.rationals()


def norm_create(
    vertices: Sequence[Sequence[Coordinate]],
    /,
    *,
    ring: Ring | None = None,
    name: str = "",
) -> PolygonalNorm:
    """Validate a counterclockwise vertex cycle and derive its facets."""
    count = len(vertices)
    if count < 4 or count % 2:  # noqa: PLR2004
        msg = f"need an even number of at least 4 vertices, got {count}"
        raise InvalidPolygonError(msg)
    if ring is None:
        ring = _ring_of(vertices)
    points = tuple(as_point(ring, v) for v in vertices)
    half = count // 2
    for i in range(half):
        x, y = points[i]
        if points[i + half] != (-x, -y):
            msg = f"vertex {i + half} is not the reflection of vertex {i}"
            raise InvalidPolygonError(msg)
    for i in range(count):
        a, b, c = points[i], points[(i + 1) % count], points[(i + 2) % count]
        if a == b:
            msg = f"vertices {i} and {(i + 1) % count} coincide"
            raise InvalidPolygonError(msg)
        if exactnum.sign(_cross(*a, *b)) <= 0:
            msg = (
                f"origin is not strictly inside edge {i}"
                " (or the cycle is not counterclockwise)"
            )
            raise InvalidPolygonError(msg)
        turn = exactnum.sign(
            _cross(b[0] - a[0], b[1] - a[1], c[0] - b[0], c[1] - b[1])
        )
        if turn == 0:
            msg = (
                f"vertices {i}, {(i + 1) % count}, {(i + 2) % count}"
                " are collinear"
            )
            raise InvalidPolygonError(msg)
        if turn < 0:
            msg = f"polygon is not convex at vertex {(i + 1) % count}"
            raise InvalidPolygonError(msg)
    angles = [math.atan2(y.to_float(), x.to_float()) for x, y in points]
    winding = sum(
        (angles[(i + 1) % count] - angles[i]) % (2 * math.pi)
        for i in range(count)
    )
    if winding > 3 * math.pi:
        msg = "vertex cycle winds around the origin more than once"
        raise InvalidPolygonError(msg)
    facets = []
    for i in range(count):
        (x1, y1), (x2, y2) = points[i], points[(i + 1) % count]
        cross = _cross(x1, y1, x2, y2)
        try:
            facets.append(Facet(u1=(y2 - y1) / cross, u2=(x1 - x2) / cross))
        except NotInvertibleError as e:
            msg = f"facet {i} functional does not lie in {ring.name}"
            raise InvalidPolygonError(msg) from e
    _logger.debug("Created polygon %s with %d facets", name, count)
    return PolygonalNorm(
        ring=ring, vertices=points, facets=tuple(facets), name=name
    )


def norm_eval(P: PolygonalNorm, x: Sequence[Coordinate], /) -> RingElement:
    """Exact gauge ``max_i l_i(x)``."""
    point = as_point(P.ring, x)
    return exactnum.max_element(f.value(point) for f in P.facets)


def contains(P: PolygonalNorm, x: Sequence[Coordinate], /) -> bool:
    """Exact point-in-polygon test by edge orientation."""
    px, py = as_point(P.ring, x)
    count = len(P.vertices)
    for i in range(count):
        (x1, y1), (x2, y2) = P.vertices[i], P.vertices[(i + 1) % count]
        if exactnum.sign(_cross(x2 - x1, y2 - y1, px - x1, py - y1)) < 0:
            return False
    return True


def side_slopes(P: PolygonalNorm, /) -> tuple[Slope, ...]:
    """One slope per facet direction; antipodal facets collapse."""
    seen: dict[Slope, None] = {}
    for f in P.facets:
        if f.u2.is_zero:
            slope = Slope(value=None)
        else:
            try:
                slope = Slope(value=-f.u1 / f.u2)
            except NotInvertibleError as e:
                msg = f"slope of {f!r} does not lie in {P.ring.name}"
                raise ValueError(msg) from e
        seen.setdefault(slope)
    return tuple(seen)


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class Sandwich:
    """Rational constants with ``delta*B_2 <= BX <= radius*B_2``.

    ``linf_radius`` bounds ``max(|x1|, |x2|)`` on the ball and
    ``linf_inradius`` is a square half-width inside it.
    """

    delta: Fraction
    radius: Fraction
    linf_radius: Fraction
    linf_inradius: Fraction


def _upper(a: RingElement, /) -> Fraction:
    return exactnum.embed(a, 0, precision=60).re.hi


def sandwich(P: PolygonalNorm, /) -> Sandwich:
    scale = 1 << (2 * _SANDWICH_BITS)
    normal_sq = max(_upper(f.u1 * f.u1 + f.u2 * f.u2) for f in P.facets)
    delta = Fraction(
        math.isqrt(math.floor(scale / normal_sq)), 1 << _SANDWICH_BITS
    )
    vertex_sq = max(_upper(x * x + y * y) for x, y in P.vertices)
    radius = Fraction(
        math.isqrt(math.ceil(vertex_sq * scale)) + 1, 1 << _SANDWICH_BITS
    )
    linf = max(
        max(
            exactnum.embed(x, 0, precision=60).re.magnitude(),
            exactnum.embed(y, 0, precision=60).re.magnitude(),
        )
        for x, y in P.vertices
    )
    l1_normal = max(
        exactnum.embed(f.u1, 0, precision=60).re.magnitude()
        + exactnum.embed(f.u2, 0, precision=60).re.magnitude()
        for f in P.facets
    )
    return Sandwich(
        delta=delta,
        radius=radius,
        linf_radius=linf,
        linf_inradius=1 / l1_normal,
    )


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class AxiomReport:
    passed: bool
    samples: int
    violation: str | None = None


def random_point(
    ring: Ring, rng: np.random.Generator, /, *, size: int = 1
) -> Point:
    """Pseudo-random point with small rational power-basis coordinates."""
    width = ring.degree if isinstance(ring, exactnum.NumberField) else 2

    def coordinate() -> RingElement:
        coords = [
            Fraction(int(rng.integers(-40, 41)), int(rng.integers(1, 9)))
            for _ in range(width)
        ]
        if isinstance(ring, exactnum.NumberField):
            return ring.element(coords)
        return ring.element(coords, valuation=-size)

    return coordinate(), coordinate()


def norm_axioms_check(
    P: PolygonalNorm, samples: int, /, *, seed: int = 0
) -> AxiomReport:
    """Check symmetry, homogeneity and the triangle inequality exactly."""
    if samples < 1:
        msg = "samples must be positive"
        raise ValueError(msg)
    rng = np.random.default_rng(seed)
    for i in range(samples):
        x = random_point(P.ring, rng)
        y = random_point(P.ring, rng)
        lam = Fraction(int(rng.integers(-30, 31)), int(rng.integers(1, 7)))
        nx = norm_eval(P, x)
        if norm_eval(P, (-x[0], -x[1])) != nx:
            return AxiomReport(
                passed=False,
                samples=i + 1,
                violation=f"symmetry fails at ({x[0]}, {x[1]})",
            )
        if norm_eval(P, (x[0] * lam, x[1] * lam)) != nx * abs(lam):
            return AxiomReport(
                passed=False,
                samples=i + 1,
                violation=f"homogeneity fails at ({x[0]}, {x[1]}), {lam}",
            )
        total = norm_eval(P, (x[0] + y[0], x[1] + y[1]))
        if exactnum.compare(total, nx + norm_eval(P, y)) > 0:
            return AxiomReport(
                passed=False,
                samples=i + 1,
                violation=(
                    f"triangle inequality fails at ({x[0]}, {x[1]}),"
                    f" ({y[0]}, {y[1]})"
                ),
            )
    return AxiomReport(passed=True, samples=samples)

