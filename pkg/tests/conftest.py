from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

from distance_set_lab import exactnum, modelset, presets, sumsetlab

if TYPE_CHECKING:
    from distance_set_lab.exactnum import NumberField, SymbolicRing
    from distance_set_lab.modelset import ModelSetSpec
    from distance_set_lab.sumsetlab import FiniteSet


@pytest.fixture
def sqrt2() -> NumberField:
    field = presets.load_field("sqrt2")
    assert isinstance(field, exactnum.NumberField)
    return field


@pytest.fixture
def golden() -> NumberField:
    field = presets.load_field("golden")
    assert isinstance(field, exactnum.NumberField)
    return field


@pytest.fixture
def rationals() -> NumberField:
    return exactnum.rationals()


@pytest.fixture
def pi_ring() -> SymbolicRing:
    return exactnum.symbolic_ring("pi")


@pytest.fixture
def spec10(sqrt2: NumberField) -> ModelSetSpec:
    return modelset.model_set_spec(sqrt2, 10)


@pytest.fixture
def square(pi_ring: SymbolicRing) -> FiniteSet:
    """``{0, 1, x, 1 + x}``."""
    x = pi_ring.gen
    return sumsetlab.finite_set([0, 1, x, 1 + x], ring=pi_ring)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
