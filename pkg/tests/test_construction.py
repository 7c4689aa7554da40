from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import pytest

from distance_set_lab import construction, polynorm, presets

if TYPE_CHECKING:
    from distance_set_lab.exactnum import NumberField

SCHEDULE = (5, 25, 125)


def test_farey_gap() -> None:
    assert construction.farey_gap(Fraction(2, 5), 3) == (
        Fraction(1, 3),
        Fraction(1, 2),
    )
    assert construction.farey_gap(Fraction(7, 5), 3) == (
        Fraction(4, 3),
        Fraction(3, 2),
    )
    with pytest.raises(ValueError, match="denominator"):
        construction.farey_gap(Fraction(1, 2), 3)


def test_reciprocal_gap() -> None:
    lo, hi = construction.reciprocal_gap(Fraction(5, 7), 3)
    assert (lo, hi) == (Fraction(2, 3), Fraction(3, 4))
    assert lo is not None
    assert hi is not None
    assert lo < Fraction(5, 7) < hi


@pytest.mark.parametrize(
    ("t", "n", "expected"),
    [
        (Fraction(7, 5), 4, True),
        (Fraction(3, 7), 4, False),
        (Fraction(7, 3), 4, False),
        (Fraction(-9, 7), 6, True),
    ],
)
def test_avoids(t: Fraction, n: int, *, expected: bool) -> None:
    assert construction.avoids(t, n) is expected


def test_initial_stage() -> None:
    D = construction.build_stage(SCHEDULE, 0)
    assert D.threshold == 0
    assert D.next_threshold == 5
    assert construction.ratio(D.piece[0]) == -1
    assert construction.ratio(D.piece[-1]) == 1
    assert construction.stage_checks(D, samples=50).passed
    # the stage-0 ball is the l1 ball
    assert polynorm.norm_eval(D.ball, (3, -4)) == 7


@pytest.mark.parametrize(
    ("schedule", "J", "match"),
    [
        ((5, 25), 3, "needs"),
        ((10, 5), 1, "strictly increasing"),
        ((0, 5), 1, "strictly increasing"),
        ((Fraction(5, 2), 25), 1, "integers"),
        ((5, 25), -1, "stage must be"),
    ],
)
def test_build_stage_rejects(
    schedule: tuple[int, ...], J: int, match: str
) -> None:
    with pytest.raises(ValueError, match=match):
        construction.build_stage(schedule, J)


@pytest.mark.parametrize("J", [1, 2])
def test_stages_pass_checks(J: int) -> None:
    D = construction.build_stage(SCHEDULE, J)
    assert D.stage == J
    assert D.threshold == SCHEDULE[J - 1]
    assert D.next_threshold == SCHEDULE[J]
    assert len(list(D.history())) == J + 1
    report = construction.stage_checks(D, samples=100, seed=7)
    assert report.nesting
    assert report.slope_ledger
    assert report.avoidance
    assert report.fixed_vertices
    assert report.linf_floor
    assert report.passed


def test_stage_json() -> None:
    data = construction.build_stage(SCHEDULE, 1).to_json()
    assert data["stage"] == 1
    assert data["schedule"] == list(SCHEDULE)
    assert set(data) >= {"piece", "ball", "protected", "cuts"}


def test_allowed_slopes() -> None:
    assert construction.allowed_slopes(0) == {Fraction(1), Fraction(-1)}
    assert Fraction(1, 2) in construction.allowed_slopes(2)
    assert Fraction(1, 4) not in construction.allowed_slopes(2)


def test_containment_stage0() -> None:
    D = construction.build_stage((8, 64), 0)
    report = construction.verify_containment_bound(D, 8, samples=50)
    assert report.count == 9
    assert report.bound == 64
    assert report.passed
    with pytest.raises(ValueError, match="outside"):
        construction.verify_containment_bound(D, 9)


@pytest.mark.slow
def test_containment_stage1() -> None:
    D = construction.build_stage(SCHEDULE, 1)
    report = construction.verify_containment_bound(D, 25, samples=50)
    assert report.bound == 2**5 * 25
    assert report.passed


def test_affine_slope_change(sqrt2: NumberField) -> None:
    P = presets.load_norm("octagon")
    Q = construction.affine_slope_change(P, sqrt2.gen)
    half = sqrt2.gen / 2
    expected = {
        polynorm.Slope(value=None),
        polynorm.Slope(value=-half),
        polynorm.Slope(value=sqrt2.zero),
        polynorm.Slope(value=sqrt2.one),
    }
    assert set(polynorm.side_slopes(Q)) == expected
    with pytest.raises(ValueError, match="nonzero"):
        construction.affine_slope_change(P, 0)


def test_protected_interval_is_open() -> None:
    interval = construction.ProtectedInterval(
        center=Fraction(0), lo=Fraction(-1, 3), hi=Fraction(1, 3)
    )
    assert interval.contains(Fraction(0))
    assert interval.contains(Fraction(-1, 4))
    assert not interval.contains(Fraction(1, 3))
    assert not interval.contains(Fraction(-1, 3))
    protected = construction.build_stage(SCHEDULE, 0).protected
    assert all(
        not p.contains(p.lo) and not p.contains(p.hi) and p.contains(p.center)
        for p in protected
    )
