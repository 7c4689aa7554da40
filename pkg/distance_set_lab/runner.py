from __future__ import annotations

import asyncio
import logging
import os
from typing import TYPE_CHECKING, Generic, TypeVar

import attrs

from distance_set_lab.counter import Tally

if TYPE_CHECKING:
    from collections.abc import Sequence
    from typing import Callable

    from rich.progress import Progress, TaskID

T = TypeVar("T")

_logger = logging.getLogger(__name__)

THREADS_ENV = "DSLAB_THREADS"


def thread_limit() -> int:
    """Worker threads from ``DSLAB_THREADS``; 0 or unset means all CPUs."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    try:
        value = int(raw) if raw else 0
    except ValueError:
        msg = f"{THREADS_ENV} must be an integer, got {raw!r}"
        raise ValueError(msg) from None
    if value < 0:
        msg = f"{THREADS_ENV} must be non-negative"
        raise ValueError(msg)
    return value or os.cpu_count() or 1


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class Unit(Generic[T]):
    """One independent piece of blocking work."""

    label: str
    call: Callable[[], T]

    def __repr__(self) -> str:
        return f"Unit({self.label})"


def _always(_: object, /) -> bool:
    return True


async def run_one(
    *,
    unit: Unit[T],
    passed: Callable[[T], bool],
    progress: Progress,
    semaphore: asyncio.Semaphore,
    tally: Tally,
    task: TaskID,
) -> T:
    async with semaphore:
        result = await asyncio.to_thread(unit.call)
    ok = passed(result)
    tally.record(ok=ok)
    if not ok:
        _logger.warning("%s failed", unit.label)
    else:
        _logger.debug("%s done", unit.label)
    progress.update(task_id=task, advance=1, failed_count=tally.failed)
    return result


async def run_all(
    units: Sequence[Unit[T]],
    /,
    *,
    module: str,
    progress: Progress,
    passed: Callable[[T], bool] = _always,
    threads: int | None = None,
) -> list[T]:
    """Run ``units`` in worker threads; results come back in input order."""
    semaphore = asyncio.Semaphore(threads or thread_limit())
    tally = Tally()
    task = progress.add_task(
        description="", total=len(units), module=module, failed_count=0
    )
    results = await asyncio.gather(
        *(
            run_one(
                unit=unit,
                passed=passed,
                progress=progress,
                semaphore=semaphore,
                tally=tally,
                task=task,
            )
            for unit in units
        )
    )
    _logger.debug(
        "%s: %d units, %d failed", module, tally.total, tally.failed
    )
    return list(results)
