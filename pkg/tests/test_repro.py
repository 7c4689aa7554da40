from __future__ import annotations

import asyncio
from fractions import Fraction

import pytest
from rich.progress import Progress

from distance_set_lab import presets, repro
from distance_set_lab.pointsets import Budget


def _run(*numbers: int) -> list[repro.RunResult]:
    async def go() -> list[repro.RunResult]:
        with Progress(disable=True) as progress:
            ctx = repro.Context(budget=Budget(), progress=progress)
            return await repro.run(ctx, numbers)

    return asyncio.run(go())


def test_unknown_run() -> None:
    with pytest.raises(ValueError, match="no reproduction run"):
        _run(42)


def test_oracle_cases_cover_presets() -> None:
    cases = repro.oracle_cases(Budget())
    names = [name for name, *_ in cases]
    assert names == presets.list_presets()["norms"]
    assert all(N == Fraction(8) for *_, N in cases)


def test_result_json() -> None:
    result = repro.RunResult(
        number=3, title="t", passed=True, details={"a": 1}, elapsed=1.23456
    )
    assert result.to_json() == {
        "number": 3,
        "title": "t",
        "passed": True,
        "elapsed": 1.235,
        "details": {"a": 1},
    }


@pytest.mark.slow
@pytest.mark.parametrize("number", [1, 3, 4, 8])
def test_runs_pass(number: int) -> None:
    [result] = _run(number)
    assert result.number == number
    assert result.passed, result.details
    assert result.elapsed > 0
