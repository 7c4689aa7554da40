from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING, Any

import numpy as np
import pytest

from distance_set_lab import distset, exactnum, modelset, polynorm, presets
from distance_set_lab.exactnum import RingMismatchError
from distance_set_lab.pointsets import (
    Budget,
    BudgetExceededError,
    FinitePlanarSet,
    LatticeRows,
)

if TYPE_CHECKING:
    from distance_set_lab.exactnum import NumberField, RingElement
    from distance_set_lab.pointsets import PlanarSet
    from distance_set_lab.polynorm import PolygonalNorm


def _lattice(P: PolygonalNorm, N: int) -> LatticeRows:
    S = distset.lattice_windows(P)(Fraction(N))
    assert isinstance(S, LatticeRows)
    return S


@pytest.mark.parametrize("name", ["linf", "l1", "hexagon"])
@pytest.mark.parametrize("N", [1, 8, 25])
def test_integer_norms_threshold(name: str, N: int) -> None:
    P = presets.load_norm(name)
    D = distset.distance_set(_lattice(P, N), P, N)
    assert len(D) == N + 1
    assert D.value_set() == {P.ring.constant(k) for k in range(N + 1)}


def test_linf_ball_mode() -> None:
    P = presets.load_norm("linf")
    N = 8
    D = distset.distance_set(_lattice(P, N), P, N, mode="ball")
    assert len(D) == 2 * N + 1
    assert D.value(len(D) - 1) == 2 * N


def test_values_sorted() -> None:
    P = presets.load_norm("hexagon")
    D = distset.distance_set(_lattice(P, 12), P, 12)
    assert list(D.floats) == sorted(D.floats)
    assert D.value(0) == 0


def test_invalid_arguments(rationals: NumberField) -> None:
    P = presets.load_norm("linf")
    S = LatticeRows.box(rationals, -3, 3)
    with pytest.raises(ValueError, match="positive"):
        distset.distance_set(S, P, 0)
    with pytest.raises(ValueError, match="unknown mode"):
        distset.distance_set(S, P, 2, mode="sphere")  # type: ignore[arg-type]


def test_ring_mismatch(rationals: NumberField) -> None:
    P = presets.load_norm("octagon")
    S = LatticeRows.box(rationals, -3, 3)
    with pytest.raises(RingMismatchError):
        distset.distance_set(S, P, 2)


def test_pair_budget(rationals: NumberField) -> None:
    P = presets.load_norm("linf")
    S = LatticeRows.box(rationals, -50, 50)
    with pytest.raises(BudgetExceededError):
        distset.distance_set(S, P, 50, budget=Budget(max_pairs=1000))


@pytest.mark.parametrize("mode", distset.MODES)
def test_matches_oracle_on_model_set(sqrt2: NumberField, mode: str) -> None:
    spec = modelset.model_set_spec(sqrt2)
    P = presets.load_norm("octagon")
    N = Fraction(2)
    S = distset.model_set_windows(spec, P)(N)
    D = distset.distance_set(S, P, N, mode=mode)  # type: ignore[arg-type]
    oracle = distset.distance_set_oracle(
        S, P, N, mode=mode  # type: ignore[arg-type]
    )
    assert D.value_set() == oracle
    assert len(D) == len(oracle)


def test_matches_oracle_on_scattered_points(rationals: NumberField) -> None:
    P = presets.load_norm("hexagon")
    points = [
        (Fraction(1, 2), 3),
        (-2, Fraction(5, 3)),
        (0, 0),
        (4, -1),
        (Fraction(-7, 4), Fraction(-9, 2)),
        (3, 3),
    ]
    S = FinitePlanarSet.from_points(points, ring=rationals)
    for N in (Fraction(1), Fraction(4), Fraction(20)):
        D = distset.distance_set(S, P, N)
        assert D.value_set() == distset.distance_set_oracle(S, P, N)


def test_check_schedule() -> None:
    assert distset.check_schedule([1, 2, 4]) == (1, 2, 4)
    for bad in ([], [10, 5], [0, 1], [3, 3]):
        with pytest.raises(ValueError, match="schedule"):
            distset.check_schedule(bad)


def test_growth_report_linear() -> None:
    schedule = (Fraction(8), Fraction(16), Fraction(32), Fraction(64))
    report = distset.growth_report(schedule, [9, 17, 33, 65])
    assert report.monotone
    assert 0.9 < report.exponent < 1.1
    assert report.ratios()[0] == pytest.approx(9 / 8)
    assert report.to_json()["schedule"] == ["8", "16", "32", "64"]


def test_growth_report_single_point() -> None:
    report = distset.growth_report((Fraction(8),), [9])
    assert report.counts == (9,)
    assert report.exponent != report.exponent  # nan


def test_growth_scan_lattice() -> None:
    P = presets.load_norm("linf")
    generator = distset.lattice_windows(P)
    report = distset.growth_scan(generator, P, [4, 8, 16])
    assert report.counts == (5, 9, 17)
    ball = distset.growth_scan(generator, P, [4, 8], mode="ball")
    assert ball.counts == (9, 17)


def test_window_check(rationals: NumberField) -> None:
    P = presets.load_norm("linf")
    S = LatticeRows.box(rationals, -2, 2)
    distset.window_check(S, P, Fraction(2))
    with pytest.raises(distset.WindowInsufficientError):
        distset.window_check(S, P, Fraction(5))


def test_closure(sqrt2: NumberField) -> None:
    spec = modelset.model_set_spec(sqrt2)
    P = presets.load_norm("octagon")
    N = Fraction(3)
    D = distset.distance_set(distset.model_set_windows(spec, P)(N), P, N)
    report = distset.closure_check(D, spec)
    assert report.passed
    assert report.checked == len(D)
    assert report.bound >= 2 * spec.C


def test_density_floor(rationals: NumberField) -> None:
    P = presets.load_norm("linf")
    S = LatticeRows.box(rationals, -20, 20)
    report = distset.density_floor(S, P, 20, net=Fraction(1))
    assert report.count == 441
    assert report.floor <= 100
    assert report.passed


def test_canonical_distance(sqrt2: NumberField) -> None:
    linf = presets.load_norm("linf")
    assert distset.canonical_distance(linf, (3, -2)) == 3
    assert distset.canonical_distance(linf, (-3, 2)) == 3
    assert distset.canonical_distance(linf, (0, 0)) == 0
    octagon = presets.load_norm("octagon")
    z = (1 + sqrt2.gen, sqrt2.zero)
    assert distset.canonical_distance(octagon, z) == 1 + sqrt2.gen
    assert distset.canonical_distance(octagon, z) == polynorm.norm_eval(
        octagon, z
    )


def _shifted(S: PlanarSet, shift: tuple[Any, Any], sign: int) -> PlanarSet:
    return FinitePlanarSet.from_points(
        [(sign * x + shift[0], sign * y + shift[1]) for x, y in S.points()],
        ring=S.ring,
    )


def test_invariant_under_translation_and_negation(sqrt2: NumberField) -> None:
    spec = modelset.model_set_spec(sqrt2)
    P = presets.load_norm("octagon")
    N = Fraction(2)
    S = distset.model_set_windows(spec, P)(N)
    expected = distset.distance_set(S, P, N).value_set()
    shift = (sqrt2.gen, 1 - sqrt2.gen / 3)
    for sign in (1, -1):
        moved = _shifted(S, shift, sign)
        assert distset.distance_set(moved, P, N).value_set() == expected
    negated = _shifted(S, (0, 0), -1)
    assert distset.distance_set(negated, P, N).value_set() == expected


def test_monotone_in_threshold(rationals: NumberField) -> None:
    P = presets.load_norm("hexagon")
    rng = np.random.default_rng(5)
    points = [
        (Fraction(int(a), 3), Fraction(int(b), 2))
        for a, b in rng.integers(-30, 30, size=(40, 2))
    ]
    S = FinitePlanarSet.from_points(points, ring=rationals)
    previous: set[RingElement] = set()
    for N in (1, 3, 7, 15, 40):
        current = distset.distance_set(S, P, N).value_set()
        assert previous <= current
        assert all(exactnum.compare(v, N) <= 0 for v in current)
        previous = current
    lattice = distset.lattice_windows(P)
    small = distset.distance_set(lattice(Fraction(6)), P, 6).value_set()
    large = distset.distance_set(lattice(Fraction(12)), P, 12).value_set()
    assert small <= large
