"""Closed rational intervals and complex boxes.

Endpoints are exact ``Fraction`` values, so every operation is a rigorous
enclosure. Results can be rounded outward to a dyadic grid to keep
denominators small.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import TYPE_CHECKING, Union

import attrs

if TYPE_CHECKING:
    from typing_extensions import Self

Scalar = Union[int, Fraction]


def _floor_dyadic(value: Fraction, bits: int, /) -> Fraction:
    scale = 1 << bits
    return Fraction(math.floor(value * scale), scale)


def _ceil_dyadic(value: Fraction, bits: int, /) -> Fraction:
    scale = 1 << bits
    return Fraction(math.ceil(value * scale), scale)


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    getstate_setstate=False,
    match_args=False,
)
class Interval:
    lo: Fraction = attrs.field(converter=Fraction)
    hi: Fraction = attrs.field(converter=Fraction)

    def __attrs_post_init__(self) -> None:
        if self.lo > self.hi:
            msg = f"empty interval [{self.lo}, {self.hi}]"
            raise ValueError(msg)

    @classmethod
    def point(cls, value: Scalar, /) -> Self:
        return cls(value, value)

    @classmethod
    def around(cls, center: Scalar, radius: Scalar, /) -> Self:
        return cls(Fraction(center) - radius, Fraction(center) + radius)

    def __repr__(self) -> str:
        return f"Interval({float(self.lo)!r}, {float(self.hi)!r})"

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def magnitude(self) -> Fraction:
        """Upper bound of ``|x|`` over the interval."""
        return max(-self.lo, self.hi)

    def mignitude(self) -> Fraction:
        """Lower bound of ``|x|`` over the interval."""
        if self.lo > 0:
            return self.lo
        if self.hi < 0:
            return -self.hi
        return Fraction(0)

    def sign(self) -> int | None:
        """Sign shared by every point, or None when zero is not excluded."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        return None

    def contains(self, value: Scalar | Interval, /) -> bool:
        if isinstance(value, Interval):
            return self.lo <= value.lo and value.hi <= self.hi
        return self.lo <= value <= self.hi

    def overlaps(self, other: Interval, /) -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def intersect(self, other: Interval, /) -> Interval:
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            msg = f"disjoint intervals {self!r} and {other!r}"
            raise ValueError(msg)
        return Interval(lo, hi)

    def hull(self, other: Interval, /) -> Interval:
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def outward(self, bits: int, /) -> Interval:
        """Round the endpoints outward onto the grid of step ``2**-bits``."""
        return Interval(
            _floor_dyadic(self.lo, bits), _ceil_dyadic(self.hi, bits)
        )

    def __add__(self, other: Interval | Scalar) -> Interval:
        if isinstance(other, Interval):
            return Interval(self.lo + other.lo, self.hi + other.hi)
        return Interval(self.lo + other, self.hi + other)

    __radd__ = __add__

    def __neg__(self) -> Interval:
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other: Interval | Scalar) -> Interval:
        if isinstance(other, Interval):
            return Interval(self.lo - other.hi, self.hi - other.lo)
        return Interval(self.lo - other, self.hi - other)

    def __rsub__(self, other: Scalar) -> Interval:
        return Interval(other - self.hi, other - self.lo)

    def __mul__(self, other: Interval | Scalar) -> Interval:
        if isinstance(other, Interval):
            products = (
                self.lo * other.lo,
                self.lo * other.hi,
                self.hi * other.lo,
                self.hi * other.hi,
            )
            return Interval(min(products), max(products))
        if other >= 0:
            return Interval(self.lo * other, self.hi * other)
        return Interval(self.hi * other, self.lo * other)

    __rmul__ = __mul__

    def square(self) -> Interval:
        low = self.mignitude()
        high = self.magnitude()
        return Interval(low * low, high * high)

    def reciprocal(self) -> Interval:
        if self.sign() in {None, 0}:
            msg = f"cannot invert {self!r}, it contains zero"
            raise ZeroDivisionError(msg)
        return Interval(1 / self.hi, 1 / self.lo)

    def __pow__(self, exponent: int) -> Interval:
        if exponent < 0:
            return self.reciprocal() ** (-exponent)
        result = Interval.point(1)
        base = self
        while exponent:
            if exponent & 1:
                result *= base
            exponent >>= 1
            if exponent:
                base = base.square()
        return result

    def as_floats(self) -> tuple[float, float]:
        return float(self.lo), float(self.hi)


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    getstate_setstate=False,
    match_args=False,
)
class Box:
    """Axis-aligned complex rectangle ``re + i*im``."""

    re: Interval
    im: Interval = attrs.field(factory=lambda: Interval.point(0))

    @classmethod
    def point(cls, real: Scalar, imag: Scalar = 0, /) -> Self:
        return cls(Interval.point(real), Interval.point(imag))

    def __repr__(self) -> str:
        return f"Box({self.re!r}, {self.im!r})"

    @property
    def is_real(self) -> bool:
        return self.im.lo == self.im.hi == 0

    @property
    def width(self) -> Fraction:
        return max(self.re.width, self.im.width)

    def center(self) -> complex:
        return complex(float(self.re.mid), float(self.im.mid))

    def contains(self, other: Box, /) -> bool:
        return self.re.contains(other.re) and self.im.contains(other.im)

    def overlaps(self, other: Box, /) -> bool:
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    def intersect(self, other: Box, /) -> Box:
        return Box(self.re.intersect(other.re), self.im.intersect(other.im))

    def conjugate(self) -> Box:
        return Box(self.re, -self.im)

    def outward(self, bits: int, /) -> Box:
        return Box(self.re.outward(bits), self.im.outward(bits))

    def __add__(self, other: Box | Scalar) -> Box:
        if isinstance(other, Box):
            return Box(self.re + other.re, self.im + other.im)
        return Box(self.re + other, self.im)

    __radd__ = __add__

    def __neg__(self) -> Box:
        return Box(-self.re, -self.im)

    def __sub__(self, other: Box | Scalar) -> Box:
        if isinstance(other, Box):
            return Box(self.re - other.re, self.im - other.im)
        return Box(self.re - other, self.im)

    def __mul__(self, other: Box | Scalar) -> Box:
        if isinstance(other, Box):
            if self.is_real and other.is_real:
                return Box(self.re * other.re)
            return Box(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        return Box(self.re * other, self.im * other)

    __rmul__ = __mul__

    def modulus_squared(self) -> Interval:
        return self.re.square() + self.im.square()
