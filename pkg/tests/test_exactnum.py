from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import pytest

from distance_set_lab import exactnum, presets
from distance_set_lab.interval import Box

if TYPE_CHECKING:
    import numpy as np

    from distance_set_lab.exactnum import (
        NumberField,
        RingElement,
        SymbolicRing,
    )


def test_field_arithmetic(sqrt2: NumberField) -> None:
    a = sqrt2.gen
    assert a * a == 2
    assert (a + 1) * (a - 1) == 1
    assert (1 + a) ** -1 == a - 1
    assert a / (a + 1) == 2 - a
    assert sqrt2.degree == 2


def test_golden_ratio(golden: NumberField) -> None:
    phi = golden.gen
    assert phi * phi == phi + 1
    assert phi ** 3 == 2 * phi + 1


def test_signs_and_comparisons(sqrt2: NumberField) -> None:
    a = sqrt2.gen
    assert exactnum.sign(a - Fraction(141421356, 100000000)) == 1
    assert exactnum.sign(a - Fraction(141421357, 100000000)) == -1
    assert exactnum.compare(a, Fraction(3, 2)) == -1
    assert exactnum.compare(a * a, 2) == 0
    assert exactnum.floor(a * 1000) == 1414
    assert exactnum.floor(-a) == -2
    assert exactnum.abs_value(1 - a) == a - 1
    assert exactnum.max_element([a, a * a - 1, 1 - a]) == a


def test_sign_at_zero_refines_close_values(sqrt2: NumberField) -> None:
    a = sqrt2.gen
    # 140/99 agrees with sqrt 2 to four decimals
    assert exactnum.sign_at_zero(a - Fraction(140, 99)) == 1
    assert exactnum.sign_at_zero(a - Fraction(577, 408)) == -1


def test_conjugate_embedding(sqrt2: NumberField) -> None:
    lo, hi = exactnum.embed(sqrt2.gen, 1, precision=40).re.as_floats()
    assert lo <= -(2**0.5) <= hi
    assert hi - lo < 1e-9


def test_ring_mismatch(sqrt2: NumberField, golden: NumberField) -> None:
    with pytest.raises(exactnum.RingMismatchError):
        _ = sqrt2.gen + golden.gen


@pytest.mark.parametrize(
    ("minpoly", "hint", "match"),
    [
        ([-1, 0, 2], [0, 1], "monic"),
        ([-1, 0, 1], [0, 2], "reducible"),
        ([-2, 0, 1], [-2, 2], "isolates"),
        ([-2, 1.5], [0, 3], "integers"),
    ],
)
def test_field_create_rejects(
    minpoly: list[int | float], hint: list[int], match: str
) -> None:
    with pytest.raises(ValueError, match=match):
        exactnum.field_create(minpoly, hint)  # type: ignore[arg-type]


def test_integral_rescale() -> None:
    assert exactnum.integral_rescale([-1, 0, 2]) == [-2, 0, 1]
    field = exactnum.field_create(
        exactnum.integral_rescale([-1, 0, 2]), [1, 2]
    )
    assert field.gen * field.gen == 2


def test_laurent_ring(pi_ring: SymbolicRing) -> None:
    x = pi_ring.gen
    assert (x + 1) * (x - 1) == x * x - 1
    assert (x * x - 1) / (x - 1) == x + 1
    assert x ** -1 * x == 1
    assert (x ** -2).valuation == -2
    with pytest.raises(exactnum.NotInvertibleError):
        _ = x / (x + 1)
    with pytest.raises(ZeroDivisionError):
        _ = x / pi_ring.zero


def test_symbolic_signs(pi_ring: SymbolicRing) -> None:
    x = pi_ring.gen
    assert exactnum.sign(x - Fraction(355, 113)) == -1
    assert exactnum.sign(x - Fraction(333, 106)) == 1
    assert exactnum.compare(x * x, Fraction(986, 100)) == 1
    assert exactnum.floor(1000 * x) == 3141


def test_precision_cap() -> None:
    with pytest.raises(ValueError, match="at least"):
        exactnum.set_precision_cap(32)
    previous = exactnum.get_precision_cap()
    try:
        exactnum.set_precision_cap(128)
        assert exactnum.get_precision_cap() == 128
    finally:
        exactnum.set_precision_cap(previous)


def test_elements_from_json(
    sqrt2: NumberField, pi_ring: SymbolicRing
) -> None:
    assert exactnum.element_from_json(sqrt2, ["1", "-1/2"]) == (
        1 - sqrt2.gen / 2
    )
    assert exactnum.element_from_json(sqrt2, "3") == 3
    value = exactnum.element_from_json(
        pi_ring, {"low": -1, "coords": ["2"]}
    )
    assert value == 2 * pi_ring.gen ** -1
    assert value.to_json() == {"low": -1, "coords": ["2"]}


def test_frames(pi_ring: SymbolicRing) -> None:
    x = pi_ring.gen
    frame = exactnum.frame_for(pi_ring, [x ** -1, x * x])
    assert (frame.low, frame.size) == (-1, 4)
    assert frame.coords_of(x) == (0, 0, 1, 0)
    assert frame.element([1, 0, 0, 1]) == x ** -1 + x * x
    with pytest.raises(ValueError, match="does not fit"):
        frame.coords_of(x**3)


def _cubic() -> NumberField:
    field = presets.load_field("cubic")
    assert isinstance(field, exactnum.NumberField)
    return field


def _random_element(
    field: NumberField, rng: np.random.Generator, /
) -> RingElement:
    return field.element(
        Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5)))
        for _ in range(field.degree)
    )


@pytest.mark.parametrize("name", ["sqrt2", "golden", "cubic"])
def test_ring_axioms(name: str, rng: np.random.Generator) -> None:
    field = presets.load_field(name)
    assert isinstance(field, exactnum.NumberField)
    for _ in range(30):
        a, b, c = (_random_element(field, rng) for _ in range(3))
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a * b == b * a
        assert (a - b) + b == a
        if not a.is_zero:
            assert a * a**-1 == 1


@pytest.mark.parametrize("name", ["sqrt2", "golden", "cubic"])
def test_sign_is_odd(name: str, rng: np.random.Generator) -> None:
    field = presets.load_field(name)
    assert isinstance(field, exactnum.NumberField)
    for _ in range(30):
        a = _random_element(field, rng)
        assert exactnum.sign_at_zero(-a) == -exactnum.sign_at_zero(a)
        assert exactnum.sign(a) == exactnum.sign_at_zero(a)


def test_embedding_is_multiplicative(rng: np.random.Generator) -> None:
    field = _cubic()
    for _ in range(20):
        a = _random_element(field, rng)
        b = _random_element(field, rng)
        for k in range(field.degree):
            product = exactnum.embed(a, k) * exactnum.embed(b, k)
            assert exactnum.embed(a * b, k).overlaps(product)


def _minpoly_at(field: NumberField, box: Box, /) -> Box:
    value = Box.point(field.minpoly[-1])
    for c in reversed(field.minpoly[:-1]):
        value = value * box + c
    return value


def test_root_boxes_enclose_roots() -> None:
    field = _cubic()
    assert (field.degree, field.real_count) == (3, 1)
    for bits in (64, 128, 256):
        for box in field.root_boxes(bits):
            value = _minpoly_at(field, box)
            assert value.re.contains(0)
            assert value.im.contains(0)


@pytest.mark.parametrize("name", ["sqrt2", "cubic"])
def test_root_boxes_are_nested(name: str) -> None:
    field = presets.load_field(name)
    assert isinstance(field, exactnum.NumberField)
    coarse = field.root_boxes(64)
    for bits in (128, 256, 512):
        fine = field.root_boxes(bits)
        assert all(c.contains(f) for c, f in zip(coarse, fine))
        assert all(f.width <= Fraction(1, 1 << bits) * 2 for f in fine)
        coarse = fine


def test_symbolic_enclosures_refine(pi_ring: SymbolicRing) -> None:
    coarse = pi_ring.symbol_value(64)
    for bits in (128, 256, 512):
        fine = pi_ring.symbol_value(bits)
        assert coarse.contains(fine)
        assert fine.width <= Fraction(1, 1 << bits)
        coarse = fine
    x = pi_ring.gen
    value = x * x - 10 * x**-1
    boxes = [exactnum.embed(value, precision=p) for p in (64, 128, 256)]
    for box, p in zip(boxes, (64, 128, 256)):
        assert box.width <= Fraction(1, 1 << p)
    assert boxes[0].overlaps(boxes[1])
    assert boxes[1].overlaps(boxes[2])


def test_precision_cap_stops_refinement(sqrt2: NumberField) -> None:
    p, q = 1, 1
    while q < 1 << 60:
        p, q = p + 2 * q, p + q
    # p/q agrees with sqrt 2 to about 120 bits
    close = sqrt2.gen - Fraction(p, q)
    previous = exactnum.get_precision_cap()
    try:
        exactnum.set_precision_cap(exactnum.BASE_PRECISION)
        with pytest.raises(exactnum.PrecisionCapError, match="undecided"):
            exactnum.sign_at_zero(close)
        with pytest.raises(exactnum.PrecisionCapError):
            exactnum.compare(sqrt2.gen, Fraction(p, q))
    finally:
        exactnum.set_precision_cap(previous)
    assert exactnum.sign_at_zero(close) == (1 if p * p < 2 * q * q else -1)
