from __future__ import annotations

from fractions import Fraction

import pytest

from distance_set_lab.interval import Box, Interval


def test_arithmetic_encloses() -> None:
    a = Interval(1, 2)
    b = Interval(3, 4)
    assert a + b == Interval(4, 6)
    assert b - a == Interval(1, 3)
    assert Interval(-1, 2) * b == Interval(-4, 8)
    assert a * -2 == Interval(-4, -2)
    assert 1 - a == Interval(-1, 0)


def test_empty_interval_rejected() -> None:
    with pytest.raises(ValueError, match="empty"):
        Interval(2, 1)


@pytest.mark.parametrize(
    ("interval", "expected"),
    [
        (Interval(1, 2), 1),
        (Interval(-2, -1), -1),
        (Interval(0, 0), 0),
        (Interval(-1, 1), None),
    ],
)
def test_sign(interval: Interval, expected: int | None) -> None:
    assert interval.sign() == expected


def test_square_and_powers() -> None:
    assert Interval(-2, 1) ** 2 == Interval(0, 4)
    assert Interval(2, 4) ** -1 == Interval(Fraction(1, 4), Fraction(1, 2))
    assert Interval(-1, 1).magnitude() == 1
    assert Interval(-1, 1).mignitude() == 0


def test_reciprocal_of_zero_straddling_interval() -> None:
    with pytest.raises(ZeroDivisionError):
        Interval(-1, 1).reciprocal()


def test_outward_rounding() -> None:
    rounded = Interval(Fraction(1, 3), Fraction(2, 3)).outward(2)
    assert rounded == Interval(Fraction(1, 4), Fraction(3, 4))
    assert rounded.contains(Interval(Fraction(1, 3), Fraction(2, 3)))


def test_intersection() -> None:
    assert Interval(0, 2).intersect(Interval(1, 3)) == Interval(1, 2)
    with pytest.raises(ValueError, match="disjoint"):
        Interval(0, 1).intersect(Interval(2, 3))


def test_complex_box_product() -> None:
    i = Box.point(0, 1)
    assert i * i == Box.point(-1)
    assert (i * i).is_real
    assert Box.point(3, 4).modulus_squared() == Interval(25, 25)
