from __future__ import annotations

import math
from fractions import Fraction
from typing import TYPE_CHECKING

import numpy as np
import pytest

from distance_set_lab import exactnum, modelset, presets
from distance_set_lab.pointsets import Budget, BudgetExceededError

if TYPE_CHECKING:
    from distance_set_lab.exactnum import NumberField
    from distance_set_lab.modelset import ModelSetSpec


@pytest.fixture
def spec(sqrt2: NumberField) -> ModelSetSpec:
    return modelset.model_set_spec(sqrt2)


def test_default_band(spec: ModelSetSpec) -> None:
    assert spec.C == 2
    assert spec.degree == 2
    assert Fraction(6, 5) < spec.K1 < Fraction(121, 100)
    assert spec.K2 >= 2


@pytest.mark.parametrize("C", [Fraction(1), Fraction(1, 100)])
def test_band_below_net_bound(sqrt2: NumberField, C: Fraction) -> None:
    with pytest.raises(ValueError, match="net bound"):
        modelset.model_set_spec(sqrt2, C)


def test_with_c(spec: ModelSetSpec) -> None:
    wider = modelset.with_c(spec, Fraction(5))
    assert wider.C == 5
    assert wider.field is spec.field
    with pytest.raises(ValueError, match="positive"):
        modelset.with_c(spec, Fraction(0))


def test_window_sorted(spec: ModelSetSpec) -> None:
    T = modelset.enumerate_T(spec, Fraction(30))
    assert len(T) == len(modelset.window_tuples(T))
    assert np.all(np.diff(T.values) > 0)
    assert np.all(np.abs(T.values) <= 30)
    assert T.exact


def test_matches_brute_force(spec10: ModelSetSpec) -> None:
    R = 20
    box = math.ceil((R + spec10.C) / 2) + 1
    T = modelset.enumerate_T(spec10, Fraction(R))
    expected = set(modelset.brute_force_T(spec10, R, box=box))
    assert set(modelset.window_tuples(T)) == expected


def test_matches_brute_force_golden(golden: NumberField) -> None:
    spec = modelset.model_set_spec(golden)
    R = 10
    box = math.ceil(R + spec.C) + 1
    T = modelset.enumerate_T(spec, Fraction(R))
    expected = set(modelset.brute_force_T(spec, R, box=box))
    assert set(modelset.window_tuples(T)) == expected


def test_size_estimate(spec: ModelSetSpec) -> None:
    R = Fraction(200)
    count = len(modelset.enumerate_T(spec, R))
    estimate = spec.size_estimate(R)
    assert estimate / 2 <= count <= 2 * estimate


def test_enumeration_budget(spec: ModelSetSpec) -> None:
    with pytest.raises(BudgetExceededError):
        modelset.enumerate_T(
            spec, Fraction(10_000), budget=Budget(max_points=100)
        )


def test_net_and_local_count(spec: ModelSetSpec) -> None:
    T = modelset.enumerate_T(spec, Fraction(50))
    net = modelset.verify_net(T, spec)
    assert net.passed
    assert net.gaps_checked > 0
    assert net.max_gap.lo <= net.bound.hi
    local = modelset.verify_local_count(T, spec)
    assert local.passed
    assert 1 <= local.max_count <= spec.K2


def test_membership(spec: ModelSetSpec, sqrt2: NumberField) -> None:
    x = sqrt2.gen
    assert modelset.in_model_set(x, spec)
    assert modelset.in_model_set(1 + x, spec)
    assert not modelset.in_model_set(sqrt2.constant(11), spec)
    assert not modelset.in_model_set(8 * x, spec)
    assert not modelset.in_model_set(sqrt2.constant(Fraction(1, 2)), spec)


def test_difference_closure(spec: ModelSetSpec) -> None:
    T = modelset.enumerate_T(spec, Fraction(8))
    report = modelset.difference_closure_check(T, spec)
    assert report.passed
    assert report.bound == 2 * spec.C
    assert report.checked == len(T) * (len(T) - 1) // 2


def test_dilation_closure(spec: ModelSetSpec, sqrt2: NumberField) -> None:
    T = modelset.enumerate_T(spec, Fraction(8))
    report = modelset.dilation_closure_check(T, spec, sqrt2.gen)
    assert report.passed
    assert report.bound > 2 * spec.C
    with pytest.raises(ValueError, match="integer"):
        modelset.dilation_closure_check(
            T, spec, sqrt2.constant(Fraction(1, 2))
        )


def test_growth_ratio(spec: ModelSetSpec) -> None:
    report = modelset.growth_ratio_check(spec, [50, 100])
    assert report.passed
    assert len(report.counts) == 2
    assert all(1.6 <= r <= 2.4 for r in report.ratios)


def test_vandermonde_bounds_cover_inverse(sqrt2: NumberField) -> None:
    table = modelset.vandermonde(sqrt2)
    assert table.embeddings == (0, 1)
    # M = [[1, a], [1, -a]] has inverse [[1/2, 1/2], [1/2a, -1/2a]]
    (b00, b01), (b10, b11) = table.inverse_bound
    assert all(isinstance(b, Fraction) for b in (b00, b01, b10, b11))
    assert min(b00, b01) >= Fraction(1, 2)
    assert min(b10, b11) ** 2 * 8 >= 1
    assert max(b00, b01, b10, b11) < Fraction(1, 2) + Fraction(1, 10**9)


def test_vandermonde_reach_bounds_coordinates(
    rng: np.random.Generator,
) -> None:
    field = presets.load_field("cubic")
    assert isinstance(field, exactnum.NumberField)
    table = modelset.vandermonde(field)
    assert table.size == 3
    for _ in range(25):
        e = field.element(int(rng.integers(-50, 51)) for _ in range(3))
        bounds = []
        seen: set[int] = set()
        for k in table.embeddings:
            box = exactnum.embed(e, k, precision=80)
            bounds.append((box.im if k in seen else box.re).magnitude())
            seen.add(k)
        reach = table.reach(bounds)
        assert all(isinstance(r, Fraction) for r in reach)
        assert all(abs(c) <= r for c, r in zip(e.coords, reach))
