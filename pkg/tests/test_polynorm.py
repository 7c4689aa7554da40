from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np
import pytest

from distance_set_lab import exactnum, polynorm, presets

if TYPE_CHECKING:
    from distance_set_lab.exactnum import NumberField


@pytest.mark.parametrize(
    ("name", "point", "expected"),
    [
        ("linf", (3, -2), 3),
        ("l1", (3, -2), 5),
        ("hexagon", (1, 1), 1),
        ("hexagon", (1, -1), 2),
        ("linf", (0, 0), 0),
    ],
)
def test_norm_eval(
    name: str, point: tuple[int, int], expected: int
) -> None:
    assert polynorm.norm_eval(presets.load_norm(name), point) == expected


def test_square_facets(rationals: NumberField) -> None:
    P = polynorm.norm_create(
        [(1, -1), (1, 1), (-1, 1), (-1, -1)], ring=rationals
    )
    assert len(P.facets) == 4
    values = {(f.u1, f.u2) for f in P.facets}
    one, zero = rationals.one, rationals.zero
    assert values == {(one, zero), (zero, one), (-one, zero), (zero, -one)}


def test_slopes(rationals: NumberField) -> None:
    slopes = polynorm.side_slopes(presets.load_norm("l1"))
    assert {s.value for s in slopes} == {
        rationals.constant(-1),
        rationals.constant(1),
    }
    linf = polynorm.side_slopes(presets.load_norm("linf"))
    assert any(s.is_infinite for s in linf)


@pytest.mark.parametrize("name", ["octagon", "pi_hexagon", "hexagon"])
def test_presets_declare_their_slopes(name: str) -> None:
    assert presets.load_norm_preset(name).slopes_match


def test_octagon_has_sqrt2_slope(sqrt2: NumberField) -> None:
    slopes = polynorm.side_slopes(presets.load_norm("octagon"))
    assert polynorm.Slope(value=sqrt2.gen) in slopes
    assert len(slopes) == 4


@pytest.mark.parametrize(
    ("vertices", "match"),
    [
        ([(1, 0), (0, 1), (-1, 0)], "even number"),
        ([(1, 0), (0, 1), (-1, 0), (0, -2)], "reflection"),
        ([(1, 0), (0, -1), (-1, 0), (0, 1)], "counterclockwise"),
        (
            [(2, 0), (1, 1), (0, 2), (-2, 0), (-1, -1), (0, -2)],
            "not convex",
        ),
        (
            [(1, -1), (1, 0), (1, 1), (-1, 1), (-1, 0), (-1, -1)],
            "collinear",
        ),
    ],
)
def test_invalid_polygons(
    vertices: list[tuple[int, int]], match: str
) -> None:
    with pytest.raises(polynorm.InvalidPolygonError, match=match):
        polynorm.norm_create(vertices)


def test_contains() -> None:
    P = presets.load_norm("linf")
    assert polynorm.contains(P, (1, 1))
    assert polynorm.contains(P, (Fraction(-1, 2), 1))
    assert not polynorm.contains(P, (Fraction(3, 2), 0))


def _agreement(name: str, samples: int, seed: int) -> int:
    P = presets.load_norm(name)
    rng = np.random.default_rng(seed)
    inside = 0
    for _ in range(samples):
        x, y = polynorm.random_point(P.ring, rng)
        point = (x / 20, y / 20)
        expected = exactnum.sign_at_zero(polynorm.norm_eval(P, point) - 1)
        assert polynorm.contains(P, point) is (expected <= 0), point
        inside += expected <= 0
    return inside


@pytest.mark.parametrize("name", ["linf", "hexagon", "octagon", "pi_hexagon"])
def test_contains_agrees_with_gauge(name: str) -> None:
    inside = _agreement(name, 500, seed=3)
    assert 0 < inside < 500


@pytest.mark.slow
@pytest.mark.parametrize("name", ["octagon", "pi_hexagon"])
def test_contains_agrees_with_gauge_long(name: str) -> None:
    _agreement(name, 10_000, seed=17)


@pytest.mark.parametrize("name", ["linf", "l1", "hexagon", "octagon"])
def test_axioms(name: str) -> None:
    report = polynorm.norm_axioms_check(presets.load_norm(name), 100)
    assert report.passed, report.violation
    assert report.samples == 100


def test_axioms_on_transcendental_hexagon() -> None:
    report = polynorm.norm_axioms_check(presets.load_norm("pi_hexagon"), 25)
    assert report.passed, report.violation


def test_sandwich_of_square() -> None:
    bounds = polynorm.sandwich(presets.load_norm("linf"))
    assert bounds.delta <= 1
    assert bounds.radius**2 >= 2
    assert 1 <= bounds.linf_radius <= 1 + Fraction(1, 2**40)
    assert bounds.linf_inradius <= 1


def test_samples_must_be_positive() -> None:
    with pytest.raises(ValueError, match="positive"):
        polynorm.norm_axioms_check(presets.load_norm("linf"), 0)
