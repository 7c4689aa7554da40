from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import pytest

from distance_set_lab import modelset, presets
from distance_set_lab.pointsets import (
    Budget,
    BudgetExceededError,
    FinitePlanarSet,
    LatticeRows,
    PlanarSet,
    ProductPlanarSet,
)

if TYPE_CHECKING:
    from distance_set_lab.exactnum import NumberField
    from distance_set_lab.modelset import ModelSetSpec


def _pairs(S: PlanarSet, reach: Fraction | None = None) -> int:
    return sum(len(chunk) for chunk in S.difference_chunks(reach=reach))


def test_budget_limits() -> None:
    budget = Budget(max_points=10, max_pairs=20)
    budget.check_points(10, what="ok")
    budget.check_pairs(20, what="ok")
    with pytest.raises(BudgetExceededError, match="exceed the budget"):
        budget.check_points(11, what="points")
    with pytest.raises(BudgetExceededError, match="difference vectors"):
        budget.check_pairs(21, what="pairs")
    with pytest.raises(ValueError, match="max_points"):
        Budget(max_points=0)


def test_box(rationals: NumberField) -> None:
    S = LatticeRows.box(rationals, -5, 5)
    assert len(S) == 121
    assert len(list(S.points())) == 121
    assert LatticeRows.box(rationals, -3, 5).coordinate_reach() == 5
    with pytest.raises(ValueError, match="empty box"):
        LatticeRows.box(rationals, 2, 1)


@pytest.mark.parametrize(
    ("name", "N", "expected"),
    [("linf", 3, 49), ("l1", 3, 25), ("linf", 0, 1), ("l1", 20, 841)],
)
def test_lattice_restrict(name: str, N: int, expected: int) -> None:
    P = presets.load_norm(name)
    S = LatticeRows.box(P.ring, -30, 30)
    assert len(S.restrict(P, Fraction(N), budget=Budget())) == expected


def test_lattice_restrict_matches_pointwise(sqrt2: NumberField) -> None:
    P = presets.load_norm("octagon")
    S = LatticeRows.box(sqrt2, -6, 6)
    for N in (Fraction(1), Fraction(5, 2), Fraction(4)):
        rows = S.restrict(P, N, budget=Budget())
        pointwise = PlanarSet.restrict(S, P, N, budget=Budget())
        assert set(rows.points()) == set(pointwise.points())


def test_lattice_restrict_empty(rationals: NumberField) -> None:
    P = presets.load_norm("linf")
    S = LatticeRows.box(rationals, 5, 8)
    assert len(S.restrict(P, Fraction(2), budget=Budget())) == 0


def test_lattice_differences(rationals: NumberField) -> None:
    S = LatticeRows.box(rationals, 0, 2)
    # (25 difference vectors + the zero vector) / 2
    assert _pairs(S) == 13
    assert _pairs(S, Fraction(1)) == 5
    assert S.difference_estimate(None) >= 13


def test_finite_set_dedupes(rationals: NumberField) -> None:
    S = FinitePlanarSet.from_points(
        [(0, 0), (1, 0), (0, 0), (0, 1)], ring=rationals
    )
    assert len(S) == 3
    assert _pairs(S) == 4


def test_finite_set_fractions(rationals: NumberField) -> None:
    S = FinitePlanarSet.from_points(
        [(Fraction(1, 2), 0), (0, Fraction(-1, 3))], ring=rationals
    )
    assert S.denominator == 6
    one_half = rationals.constant(Fraction(1, 2))
    assert (one_half, rationals.zero) in set(S.points())
    assert S.coordinate_reach() >= Fraction(1, 2)


def test_finite_restrict(rationals: NumberField) -> None:
    P = presets.load_norm("l1")
    S = FinitePlanarSet.from_points(
        [(x, y) for x in range(-3, 4) for y in range(-3, 4)], ring=rationals
    )
    assert len(S.restrict(P, Fraction(2), budget=Budget())) == 13
    assert len(S.restrict(P, Fraction(1, 2), budget=Budget())) == 1


def test_pointwise_restrict_budget(rationals: NumberField) -> None:
    P = presets.load_norm("linf")
    S = LatticeRows.box(rationals, -5, 5)
    with pytest.raises(BudgetExceededError):
        PlanarSet.restrict(S, P, Fraction(1), budget=Budget(max_points=100))


def test_product_set(spec10: ModelSetSpec) -> None:
    T = modelset.enumerate_T(spec10, Fraction(6))
    S = modelset.product_set(T)
    assert isinstance(S, ProductPlanarSet)
    assert len(S) == len(T) ** 2
    P = presets.load_norm("octagon")
    N = Fraction(3)
    ball = S.restrict(P, N, budget=Budget())
    pointwise = FinitePlanarSet.from_points(S.points(), ring=S.ring).restrict(
        P, N, budget=Budget()
    )
    assert set(ball.points()) == set(pointwise.points())
    assert len(ball) > 0
