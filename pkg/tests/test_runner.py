from __future__ import annotations

import asyncio
import time

from rich.progress import Progress

from distance_set_lab.counter import Tally
from distance_set_lab.runner import Unit, run_all


def _slow(value: int) -> int:
    time.sleep(0.01 * (5 - value))
    return value


def test_results_keep_input_order() -> None:
    units = [Unit(label=str(i), call=lambda i=i: _slow(i)) for i in range(5)]

    async def go() -> list[int]:
        with Progress(disable=True) as progress:
            return await run_all(
                units, module="test", progress=progress, threads=3
            )

    assert asyncio.run(go()) == [0, 1, 2, 3, 4]


def test_failures_are_counted() -> None:
    units = [Unit(label=str(i), call=lambda i=i: i) for i in range(6)]

    async def go() -> tuple[list[int], float]:
        with Progress(disable=True) as progress:
            results = await run_all(
                units,
                module="even",
                progress=progress,
                passed=lambda v: v % 2 == 0,
                threads=2,
            )
            return results, progress.tasks[0].fields["failed_count"]

    results, failed = asyncio.run(go())
    assert results == list(range(6))
    assert failed == 3


def test_tally() -> None:
    tally = Tally()
    tally.record(ok=True)
    tally.record(ok=False)
    tally.record(ok=False)
    assert (tally.passed, tally.failed, tally.total) == (1, 2, 3)
