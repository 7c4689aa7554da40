"""Exact arithmetic in number fields and in a transcendental-symbol ring.

Two kinds of coefficient rings are supported:

* :class:`NumberField` holds ``Q(a)`` for a real algebraic integer ``a``
  given by its monic integer minimal polynomial. Elements are rational
  coordinate vectors over the power basis ``1, a, ..., a**(d-1)``.
* :class:`SymbolicRing` holds Laurent polynomials with rational
  coefficients in one transcendental real constant (``pi`` or ``e``).
  Equality is coefficient identity.

Signs are decided at embedding 0 by interval evaluation, refining the
precision until the enclosure excludes zero.
"""

from __future__ import annotations

import functools
import logging
import math
import threading
from fractions import Fraction
from typing import TYPE_CHECKING, Any, Union

import attrs
import numpy as np
import sympy
from mpmath.libmp import (
    mpf_e,
    mpf_pi,
    round_ceiling,
    round_floor,
    to_rational,
)
from sympy.polys.densebasic import dup_strip
from sympy.polys.domains import QQ
from sympy.polys.euclidtools import dup_invert
from sympy.polys.polyerrors import NotInvertible

from distance_set_lab.interval import Box, Interval

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Mapping, Sequence

    from numpy.typing import NDArray

_logger = logging.getLogger(__name__)

BASE_PRECISION = 64
PRECISION_CAP = 16384
FLOAT_GUARD = 2.0**-30

_precision_cap = PRECISION_CAP


class RingMismatchError(ValueError):
    pass


class PrecisionCapError(ArithmeticError):
    pass


class NotInvertibleError(ArithmeticError):
    pass


def set_precision_cap(bits: int, /) -> None:
    global _precision_cap  # noqa: PLW0603
    if bits < BASE_PRECISION:
        msg = f"precision cap must be at least {BASE_PRECISION} bits"
        raise ValueError(msg)
    _precision_cap = bits


def get_precision_cap() -> int:
    return _precision_cap


def _fraction(value: Any, /) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, sympy.Rational):
        return Fraction(int(value.p), int(value.q))
    if hasattr(value, "numerator") and hasattr(value, "denominator"):
        return Fraction(int(value.numerator), int(value.denominator))
    msg = f"not an exact rational: {value!r}"
    raise TypeError(msg)


def _ladder(bits: int, /) -> int:
    level = BASE_PRECISION
    while level < bits:
        level *= 2
    return level


def _horner(coords: Sequence[Fraction], x: Box, /) -> Box:
    value = Box.point(coords[-1])
    for c in reversed(coords[:-1]):
        value = value * x + c
    return value


Ring = Union["NumberField", "SymbolicRing"]
Scalar = Union[int, Fraction]


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class RingElement:
    """An exact element of a :data:`Ring`.

    For number fields ``coords`` has exactly ``degree`` entries. For the
    symbolic ring the element is ``x**valuation * sum(c_i * x**i)``, kept
    normalized so that the first and last coordinates are nonzero.
    """

    ring: Ring
    coords: tuple[Fraction, ...]
    valuation: int = 0

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self.ring.constant(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return (
            self.ring.key == other.ring.key
            and self.valuation == other.valuation
            and self.coords == other.coords
        )

    def __hash__(self) -> int:
        return hash((self.ring.key, self.valuation, self.coords))

    def __repr__(self) -> str:
        return f"RingElement({self.ring.name}: {self})"

    def __str__(self) -> str:
        return self.ring.format(self)

    def _coerce(self, other: RingElement | Scalar, /) -> RingElement:
        if isinstance(other, RingElement):
            if other.ring.key != self.ring.key:
                msg = (
                    f"ring mismatch: {self.ring.name} and {other.ring.name}"
                )
                raise RingMismatchError(msg)
            return other
        return self.ring.constant(other)

    @property
    def is_zero(self) -> bool:
        return not any(self.coords)

    @property
    def is_integral(self) -> bool:
        """True when every power-basis coordinate is an integer."""
        return all(c.denominator == 1 for c in self.coords)

    def __add__(self, other: RingElement | Scalar) -> RingElement:
        return self.ring.add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self) -> RingElement:
        return self.ring.scale(self, -1)

    def __sub__(self, other: RingElement | Scalar) -> RingElement:
        return self.ring.add(self, -self._coerce(other))

    def __rsub__(self, other: Scalar) -> RingElement:
        return self.ring.add(self.ring.constant(other), -self)

    def __mul__(self, other: RingElement | Scalar) -> RingElement:
        if isinstance(other, (int, Fraction)):
            return self.ring.scale(self, Fraction(other))
        return self.ring.mul(self, self._coerce(other))

    __rmul__ = __mul__

    def __truediv__(self, other: RingElement | Scalar) -> RingElement:
        if isinstance(other, (int, Fraction)):
            if not other:
                msg = "division by zero"
                raise ZeroDivisionError(msg)
            return self.ring.scale(self, 1 / Fraction(other))
        return self.ring.divide(self, self._coerce(other))

    def __pow__(self, exponent: int) -> RingElement:
        if exponent < 0:
            return self.ring.inverse(self) ** (-exponent)
        result = self.ring.one
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            exponent >>= 1
            if exponent:
                base = base * base
        return result

    def to_float(self) -> float:
        return self.ring.float_value(self)

    def to_json(self) -> list[str] | dict[str, Any]:
        coords = [str(c) for c in self.coords]
        if isinstance(self.ring, SymbolicRing):
            return {"low": self.valuation, "coords": coords}
        return coords


# ---------------------------------------------------------------------------
# number fields


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class NumberField:
    """``Q(a)`` for a real algebraic integer ``a`` (embedding 0).

    Embeddings are ordered: the distinguished real root first, then the
    remaining real roots in increasing order, then the complex roots in
    the order sympy isolates them.
    """

    minpoly: tuple[int, ...]
    name: str
    root_index: int
    real_count: int
    float_roots: tuple[complex, ...]
    _root_objects: tuple[Any, ...]
    _cache: dict[int, tuple[Box, ...]] = attrs.field(init=False, factory=dict)
    _lock: threading.Lock = attrs.field(init=False, factory=threading.Lock)

    def __repr__(self) -> str:
        return f"NumberField({self.name})"

    @property
    def key(self) -> tuple[object, ...]:
        return ("field", self.minpoly, self.root_index)

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    @property
    def embedding_count(self) -> int:
        return self.degree

    @property
    def zero(self) -> RingElement:
        return RingElement(self, (Fraction(0),) * self.degree)

    @property
    def one(self) -> RingElement:
        return self.constant(1)

    @property
    def gen(self) -> RingElement:
        """The primitive element ``a`` itself."""
        if self.degree == 1:
            return self.constant(-self.minpoly[0])
        return self.element([0, 1])

    def constant(self, value: Scalar, /) -> RingElement:
        return RingElement(
            self, (Fraction(value),) + (Fraction(0),) * (self.degree - 1)
        )

    def element(
        self, coords: Iterable[Any], /, *, valuation: int = 0
    ) -> RingElement:
        values = [_fraction(c) for c in coords]
        if valuation:
            values = [Fraction(0)] * valuation + values
        if len(values) > self.degree:
            return self._reduce(values)
        values += [Fraction(0)] * (self.degree - len(values))
        return RingElement(self, tuple(values))

    def _reduce(self, coeffs: list[Fraction], /) -> RingElement:
        d = self.degree
        coeffs = list(coeffs)
        for top in range(len(coeffs) - 1, d - 1, -1):
            c = coeffs[top]
            if c:
                for i in range(d):
                    coeffs[top - d + i] -= c * self.minpoly[i]
                coeffs[top] = Fraction(0)
        coeffs += [Fraction(0)] * (d - len(coeffs))
        return RingElement(self, tuple(coeffs[:d]))

    def add(self, a: RingElement, b: RingElement, /) -> RingElement:
        return RingElement(
            self, tuple(x + y for x, y in zip(a.coords, b.coords))
        )

    def scale(self, a: RingElement, factor: Scalar, /) -> RingElement:
        return RingElement(self, tuple(c * factor for c in a.coords))

    def mul(self, a: RingElement, b: RingElement, /) -> RingElement:
        product = [Fraction(0)] * (2 * self.degree - 1)
        for i, x in enumerate(a.coords):
            if x:
                for j, y in enumerate(b.coords):
                    if y:
                        product[i + j] += x * y
        return self._reduce(product)

    def inverse(self, a: RingElement, /) -> RingElement:
        if a.is_zero:
            msg = "zero has no inverse"
            raise ZeroDivisionError(msg)
        if self.degree == 1:
            return self.constant(1 / a.coords[0])
        f = dup_strip([QQ(c.numerator, c.denominator) for c in a.coords[::-1]])
        g = [QQ(c) for c in self.minpoly[::-1]]
        try:
            inv = dup_invert(f, g, QQ)
        except NotInvertible as e:
            msg = f"{a} is not invertible modulo the minimal polynomial"
            raise NotInvertibleError(msg) from e
        return self.element(_fraction(c) for c in inv[::-1])

    def divide(self, a: RingElement, b: RingElement, /) -> RingElement:
        return self.mul(a, self.inverse(b))

    def format(self, a: RingElement, /) -> str:
        return _format_terms(a.coords, 0, self.name if self.degree > 1 else "")

    def root_boxes(self, bits: int = BASE_PRECISION, /) -> tuple[Box, ...]:
        """Certified, nested enclosures of all conjugates of ``a``."""
        level = _ladder(bits)
        with self._lock:
            cached = self._cache.get(level)
        if cached is not None:
            return cached
        previous = (
            self.root_boxes(level // 2) if level > BASE_PRECISION else None
        )
        radius = Fraction(1, 1 << level)
        boxes = []
        for k, root in enumerate(self._root_objects):
            if root is None:
                box = Box.point(-self.minpoly[0])
            else:
                tol = sympy.Rational(1, 1 << level)
                re, im = root.eval_rational(dx=tol, dy=tol).as_real_imag()
                re_f, im_f = _fraction(re), _fraction(im)
                box = (
                    Box(Interval.around(re_f, radius))
                    if k < self.real_count
                    else Box(
                        Interval.around(re_f, radius),
                        Interval.around(im_f, radius),
                    )
                )
            if previous is not None:
                box = box.intersect(previous[k])
            boxes.append(box)
        result = tuple(boxes)
        with self._lock:
            self._cache[level] = result
        return result

    def embed(
        self, a: RingElement, k: int = 0, /, *, precision: int = 53
    ) -> Box:
        if not 0 <= k < self.degree:
            msg = f"embedding index {k} out of range for degree {self.degree}"
            raise IndexError(msg)
        if a.is_zero:
            return Box.point(0)
        target = Fraction(1, 1 << (precision + 1))
        bits = _ladder(precision + 8)
        while True:
            value = _horner(a.coords, self.root_boxes(bits)[k])
            if value.width <= target:
                return value.outward(precision + 2)
            bits *= 2

    def complex_representatives(self) -> tuple[int, ...]:
        """One embedding index per complex-conjugate pair (positive imag)."""
        reps = []
        for k in range(self.real_count, self.degree):
            bits = BASE_PRECISION
            while (sign := self.root_boxes(bits)[k].im.sign()) is None:
                bits *= 2
            if sign > 0:
                reps.append(k)
        return tuple(reps)

    def basis_floats(self, low: int, size: int, /) -> NDArray[np.float64]:
        alpha = self.float_roots[0].real
        return np.array([alpha**e for e in range(low, low + size)])

    def float_value(self, a: RingElement, /) -> float:
        alpha = self.float_roots[0].real
        value = 0.0
        for c in reversed(a.coords):
            value = value * alpha + float(c)
        return value

    def float_scale(self, a: RingElement, /) -> float:
        alpha = abs(self.float_roots[0].real)
        return sum(abs(float(c)) * alpha**j for j, c in enumerate(a.coords))


def field_create(
    minpoly: Sequence[int | str],
    real_root_hint: Sequence[Scalar | str],
    /,
    *,
    name: str = "a",
) -> NumberField:
    """Build ``Q(a)`` where ``a`` is the root of ``minpoly`` in the hint.

    ``minpoly`` is given constant-to-leading, ``real_root_hint`` as a
    closed rational interval ``[lo, hi]``.
    """
    values = [Fraction(c) for c in minpoly]
    if any(v.denominator != 1 for v in values):
        msg = "minimal polynomial coefficients must be integers"
        raise ValueError(msg)
    coeffs = tuple(int(v) for v in values)
    if len(coeffs) < 2:  # noqa: PLR2004
        msg = "minimal polynomial must have degree at least 1"
        raise ValueError(msg)
    if coeffs[-1] != 1:
        msg = (
            f"minimal polynomial must be monic (leading coefficient is"
            f" {coeffs[-1]}); rescale with integral_rescale() first"
        )
        raise ValueError(msg)
    lo, hi = (Fraction(v) for v in real_root_hint)
    if lo > hi:
        msg = f"empty root hint [{lo}, {hi}]"
        raise ValueError(msg)
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x)
    degree = len(coeffs) - 1
    if not poly.is_sqf:
        msg = "minimal polynomial has a repeated factor"
        raise ValueError(msg)
    if degree > 1 and poly.ground_roots():
        msg = "minimal polynomial has a rational root, so it is reducible"
        raise ValueError(msg)
    lo_s = sympy.Rational(lo.numerator, lo.denominator)
    hi_s = sympy.Rational(hi.numerator, hi.denominator)
    found = int(poly.count_roots(lo_s, hi_s))
    if found != 1:
        msg = f"root hint [{lo}, {hi}] isolates {found} real roots, not 1"
        raise ValueError(msg)
    if degree == 1:
        root = Fraction(-coeffs[0])
        return NumberField(
            minpoly=coeffs,
            name=name,
            root_index=0,
            real_count=1,
            float_roots=(complex(float(root)),),
            root_objects=(None,),
        )
    real_count = int(poly.count_roots())
    below = int(poly.count_roots(None, lo_s))
    hinted = below - 1 if poly.eval(lo_s) == 0 else below
    order = [hinted]
    order += [i for i in range(real_count) if i != hinted]
    order += list(range(real_count, degree))
    roots = tuple(sympy.CRootOf(poly, i) for i in order)
    float_roots = tuple(complex(sympy.N(r, 30)) for r in roots)
    field = NumberField(
        minpoly=coeffs,
        name=name,
        root_index=hinted,
        real_count=real_count,
        float_roots=float_roots,
        root_objects=roots,
    )
    _logger.debug(
        "Created field %s of degree %d with %d real embeddings",
        name,
        degree,
        real_count,
    )
    return field


@functools.cache
def rationals() -> NumberField:
    """The field Q, as a degree-one number field."""
    return field_create([-1, 1], [0, 2], name="Q")


def integral_rescale(minpoly: Sequence[int], /) -> list[int]:
    """Minimal polynomial of ``c*a`` where ``c`` is the leading coefficient.

    Turns the root of a primitive non-monic polynomial into an algebraic
    integer generating the same field.
    """
    lead = minpoly[-1]
    degree = len(minpoly) - 1
    if lead == 0:
        msg = "leading coefficient must be nonzero"
        raise ValueError(msg)
    scaled = [
        c * lead ** (degree - 1 - i) for i, c in enumerate(minpoly[:-1])
    ]
    return [*scaled, 1]


# ---------------------------------------------------------------------------
# transcendental-symbol ring

_SYMBOL_CONSTANTS: Mapping[str, tuple[Callable[..., Any], float]] = {
    "pi": (mpf_pi, math.pi),
    "e": (mpf_e, math.e),
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
class SymbolicRing:
    """``Q[x, 1/x]`` with ``x`` a transcendental real constant."""

    symbol: str = attrs.field(
        validator=attrs.validators.in_(tuple(_SYMBOL_CONSTANTS))
    )

    def __repr__(self) -> str:
        return f"SymbolicRing({self.symbol})"

    @property
    def name(self) -> str:
        return self.symbol

    @property
    def key(self) -> tuple[object, ...]:
        return ("symbol", self.symbol)

    @property
    def embedding_count(self) -> int:
        return 1

    @property
    def zero(self) -> RingElement:
        return RingElement(self, ())

    @property
    def one(self) -> RingElement:
        return self.constant(1)

    @property
    def gen(self) -> RingElement:
        return RingElement(self, (Fraction(1),), 1)

    def constant(self, value: Scalar, /) -> RingElement:
        return self.element([value])

    def element(
        self, coords: Iterable[Any], /, *, valuation: int = 0
    ) -> RingElement:
        values = [_fraction(c) for c in coords]
        start = 0
        while start < len(values) and not values[start]:
            start += 1
        end = len(values)
        while end > start and not values[end - 1]:
            end -= 1
        if start == end:
            return RingElement(self, ())
        return RingElement(self, tuple(values[start:end]), valuation + start)

    def add(self, a: RingElement, b: RingElement, /) -> RingElement:
        if a.is_zero:
            return b
        if b.is_zero:
            return a
        low = min(a.valuation, b.valuation)
        high = max(a.valuation + len(a.coords), b.valuation + len(b.coords))
        values = [Fraction(0)] * (high - low)
        for elem in (a, b):
            offset = elem.valuation - low
            for i, c in enumerate(elem.coords):
                values[offset + i] += c
        return self.element(values, valuation=low)

    def scale(self, a: RingElement, factor: Scalar, /) -> RingElement:
        if not factor:
            return self.zero
        return RingElement(
            self, tuple(c * factor for c in a.coords), a.valuation
        )

    def mul(self, a: RingElement, b: RingElement, /) -> RingElement:
        if a.is_zero or b.is_zero:
            return self.zero
        values = [Fraction(0)] * (len(a.coords) + len(b.coords) - 1)
        for i, x in enumerate(a.coords):
            for j, y in enumerate(b.coords):
                values[i + j] += x * y
        return self.element(values, valuation=a.valuation + b.valuation)

    def divide(self, a: RingElement, b: RingElement, /) -> RingElement:
        """Exact quotient; raises if ``b`` does not divide ``a``."""
        if b.is_zero:
            msg = "division by zero"
            raise ZeroDivisionError(msg)
        if a.is_zero:
            return self.zero
        # Normalized coordinates have nonzero constant terms, so plain
        # polynomial division decides divisibility in the Laurent ring.
        remainder = list(a.coords)
        divisor = b.coords
        size = len(remainder) - len(divisor) + 1
        if size <= 0:
            msg = f"{b} does not divide {a}"
            raise NotInvertibleError(msg)
        quotient = [Fraction(0)] * size
        for i in range(size - 1, -1, -1):
            c = remainder[i + len(divisor) - 1] / divisor[-1]
            quotient[i] = c
            if c:
                for j, y in enumerate(divisor):
                    remainder[i + j] -= c * y
        if any(remainder):
            msg = f"{b} does not divide {a}"
            raise NotInvertibleError(msg)
        return self.element(quotient, valuation=a.valuation - b.valuation)

    def inverse(self, a: RingElement, /) -> RingElement:
        return self.divide(self.one, a)

    def format(self, a: RingElement, /) -> str:
        return _format_terms(a.coords, a.valuation, self.symbol)

    def symbol_value(self, bits: int = BASE_PRECISION, /) -> Interval:
        """Certified enclosure of the constant, of width ``<= 2**-bits``."""
        constant = _SYMBOL_CONSTANTS[self.symbol][0]
        lo = Fraction(*to_rational(constant(bits + 4, round_floor)))
        hi = Fraction(*to_rational(constant(bits + 4, round_ceiling)))
        return Interval(lo, hi)

    def embed(
        self, a: RingElement, k: int = 0, /, *, precision: int = 53
    ) -> Box:
        if k != 0:
            msg = "the symbolic ring has a single real embedding"
            raise IndexError(msg)
        if a.is_zero:
            return Box.point(0)
        target = Fraction(1, 1 << (precision + 1))
        bits = _ladder(precision + 8)
        while True:
            x = Box(self.symbol_value(bits))
            value = _horner(a.coords, x) * Box(x.re**a.valuation)
            if value.width <= target:
                return value.outward(precision + 2)
            bits *= 2

    def basis_floats(self, low: int, size: int, /) -> NDArray[np.float64]:
        value = _SYMBOL_CONSTANTS[self.symbol][1]
        return np.array([value**e for e in range(low, low + size)])

    def float_value(self, a: RingElement, /) -> float:
        value = _SYMBOL_CONSTANTS[self.symbol][1]
        total = 0.0
        for c in reversed(a.coords):
            total = total * value + float(c)
        return total * value**a.valuation

    def float_scale(self, a: RingElement, /) -> float:
        value = _SYMBOL_CONSTANTS[self.symbol][1]
        return sum(
            abs(float(c)) * value ** (a.valuation + j)
            for j, c in enumerate(a.coords)
        )


def symbolic_ring(symbol: str = "pi", /) -> SymbolicRing:
    return SymbolicRing(symbol=symbol)


def _format_terms(coords: Sequence[Fraction], low: int, symbol: str) -> str:
    terms = []
    for i, c in enumerate(coords):
        if not c:
            continue
        e = low + i
        if e == 0 or not symbol:
            terms.append(str(c))
        elif e == 1:
            terms.append(f"{c}*{symbol}")
        else:
            terms.append(f"{c}*{symbol}^{e}")
    return " + ".join(terms) or "0"


# ---------------------------------------------------------------------------
# embeddings and signs


def embed(a: RingElement, k: int = 0, /, *, precision: int = 53) -> Box:
    """Enclosure of ``a`` at embedding ``k`` of width ``<= 2**-precision``."""
    return a.ring.embed(a, k, precision=precision)


def sign_at_zero(a: RingElement, /) -> int:
    """Exact sign of ``a`` at embedding 0."""
    if a.is_zero:
        return 0
    bits = BASE_PRECISION
    while bits <= _precision_cap:
        sign = embed(a, 0, precision=bits).re.sign()
        if sign is not None and sign != 0:
            return sign
        _logger.debug("Sign of %s undecided at %d bits", a, bits)
        bits *= 2
    msg = f"sign of {a} undecided at the {_precision_cap}-bit cap"
    raise PrecisionCapError(msg)


def sign(a: RingElement, /) -> int:
    """Like :func:`sign_at_zero`, trying a guarded float evaluation first."""
    if a.is_zero:
        return 0
    try:
        value = a.ring.float_value(a)
        scale = a.ring.float_scale(a)
    except OverflowError:
        return sign_at_zero(a)
    if abs(value) > FLOAT_GUARD * scale:
        return 1 if value > 0 else -1
    return sign_at_zero(a)


def compare(a: RingElement | Scalar, b: RingElement | Scalar, /) -> int:
    """Return -1, 0 or 1 as ``a`` is below, equal to or above ``b``."""
    if isinstance(a, RingElement):
        return sign(a - b)
    if isinstance(b, RingElement):
        return -sign(b - a)
    return (a > b) - (a < b)


def abs_value(a: RingElement, /) -> RingElement:
    return -a if sign(a) < 0 else a


def max_element(values: Iterable[RingElement], /) -> RingElement:
    iterator = iter(values)
    best = next(iterator)
    for value in iterator:
        if compare(value, best) > 0:
            best = value
    return best


def floor(a: RingElement, /) -> int:
    """Exact floor of ``a`` at embedding 0."""
    guess = math.floor(a.to_float())
    while compare(a, guess) < 0:
        guess -= 1
    while compare(a, guess + 1) >= 0:
        guess += 1
    return guess


def modulus_at_most(
    a: RingElement, k: int, bound: Fraction, /
) -> bool | None:
    """Decide ``|sigma_k(a)| <= bound``.

    Returns None when the modulus is still undecided at the precision
    cap, which only happens for values numerically equal to the bound.
    """
    bound_sq = bound * bound
    bits = BASE_PRECISION
    while bits <= _precision_cap:
        box = embed(a, k, precision=bits)
        if box.is_real:
            magnitude = box.re
            if magnitude.magnitude() <= bound:
                return True
            if magnitude.mignitude() > bound:
                return False
        else:
            modulus = box.modulus_squared()
            if modulus.hi <= bound_sq:
                return True
            if modulus.lo > bound_sq:
                return False
        bits *= 2
    return None


# ---------------------------------------------------------------------------
# coordinate frames


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    getstate_setstate=False,
    match_args=False,
)
class Frame:
    """A finite window ``low .. low+size-1`` of power-basis exponents.

    Number-field frames never reach past ``degree - 1``.
    """

    ring: Ring = attrs.field(
        eq=attrs.cmp_using(eq=lambda a, b: a.key == b.key), hash=False
    )
    low: int
    size: int

    def __repr__(self) -> str:
        high = self.low + self.size - 1
        return f"Frame({self.ring.name}, {self.low}..{high})"

    def coords_of(self, a: RingElement, /) -> tuple[Fraction, ...]:
        values = [Fraction(0)] * self.size
        for i, c in enumerate(a.coords):
            if not c:
                continue
            e = a.valuation + i - self.low
            if not 0 <= e < self.size:
                msg = f"{a} does not fit in {self!r}"
                raise ValueError(msg)
            values[e] = c
        return tuple(values)

    def element(self, coords: Iterable[Any], /) -> RingElement:
        return self.ring.element(list(coords), valuation=self.low)

    def basis_floats(self) -> NDArray[np.float64]:
        return self.ring.basis_floats(self.low, self.size)

    def union(self, other: Frame, /) -> Frame:
        low = min(self.low, other.low)
        high = max(self.low + self.size, other.low + other.size)
        return Frame(ring=self.ring, low=low, size=high - low)


def frame_for(ring: Ring, elements: Iterable[RingElement], /) -> Frame:
    """Smallest frame holding every element (full basis for fields)."""
    if isinstance(ring, NumberField):
        return Frame(ring=ring, low=0, size=ring.degree)
    low, high = 0, 1
    for a in elements:
        if a.is_zero:
            continue
        low = min(low, a.valuation)
        high = max(high, a.valuation + len(a.coords))
    return Frame(ring=ring, low=low, size=high - low)


def multiplication_matrix(
    u: RingElement, frame: Frame, /
) -> tuple[list[list[Fraction]], Frame]:
    """Matrix of ``z -> u*z`` from ``frame`` coordinates to output ones.

    Returns ``(rows, out_frame)`` with ``rows[i][j]`` the coefficient of
    output basis ``i`` in ``u * basis_j``.
    """
    ring = frame.ring
    if isinstance(ring, NumberField):
        out = Frame(ring=ring, low=0, size=ring.degree)
        columns = [
            out.coords_of(u * ring.element([0] * e + [1]))
            for e in range(frame.low, frame.low + frame.size)
        ]
    else:
        if u.is_zero:
            out = frame
        else:
            out = Frame(
                ring=ring,
                low=frame.low + u.valuation,
                size=frame.size + len(u.coords) - 1,
            )
        columns = [
            out.coords_of(u * ring.element([1], valuation=e))
            for e in range(frame.low, frame.low + frame.size)
        ]
    rows = [[columns[j][i] for j in range(frame.size)] for i in range(out.size)]
    return rows, out


def widen_rows(
    rows: Sequence[Sequence[Fraction]], source: Frame, target: Frame, /
) -> list[list[Fraction]]:
    """Re-index matrix rows from ``source`` to a wider ``target`` frame."""
    width = len(rows[0]) if rows else 0
    result = [[Fraction(0)] * width for _ in range(target.size)]
    shift = source.low - target.low
    for i, row in enumerate(rows):
        result[i + shift] = list(row)
    return result


def element_from_json(ring: Ring, data: Any, /) -> RingElement:
    """Parse ``["1", "-1/2"]`` or ``{"low": -1, "coords": [...]}``."""
    if isinstance(data, (int, str)):
        return ring.constant(Fraction(data))
    if isinstance(data, dict):
        return ring.element(
            [Fraction(c) for c in data["coords"]],
            valuation=int(data.get("low", 0)),
        )
    return ring.element([Fraction(c) for c in data])
