"""Desk-scale reproduction runs.

Each run is a coroutine returning a :class:`RunResult`; independent
pieces of a run go through :func:`distance_set_lab.runner.run_all`.
"""

from __future__ import annotations

import functools
import logging
import math
import time
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import attrs

from distance_set_lab import (
    construction,
    distset,
    exactnum,
    modelset,
    presets,
    sumsetlab,
)
from distance_set_lab.pointsets import LatticeRows
from distance_set_lab.runner import Unit, run_all

if TYPE_CHECKING:
    from collections.abc import Awaitable, Callable, Sequence

    from rich.progress import Progress

    from distance_set_lab.distset import DistanceSet, Mode
    from distance_set_lab.pointsets import Budget, PlanarSet
    from distance_set_lab.polynorm import PolygonalNorm

_logger = logging.getLogger(__name__)


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class RunResult:
    number: int
    title: str
    passed: bool
    details: dict[str, Any]
    elapsed: float = 0.0

    def __repr__(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"RunResult({self.number}: {verdict})"

    def to_json(self) -> dict[str, Any]:
        return {
            "number": self.number,
            "title": self.title,
            "passed": self.passed,
            "elapsed": round(self.elapsed, 3),
            "details": self.details,
        }


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class Context:
    budget: Budget
    progress: Progress
    seed: int = 0
    threads: int | None = None


def _distances(
    generator: Callable[[Fraction], PlanarSet],
    P: PolygonalNorm,
    N: Fraction,
    mode: Mode,
    budget: Budget,
    windowed: bool,  # noqa: FBT001
    /,
) -> DistanceSet:
    S = generator(N)
    if windowed and mode == "threshold":
        distset.window_check(S, P, N)
    return distset.distance_set(S, P, N, mode=mode, budget=budget)


def scan_units(
    generator: Callable[[Fraction], PlanarSet],
    P: PolygonalNorm,
    schedule: Sequence[Fraction],
    /,
    *,
    mode: Mode,
    budget: Budget,
    windowed: bool = True,
) -> list[Unit[DistanceSet]]:
    """One unit per threshold.

    ``windowed`` generators cut a finite window out of an infinite set and
    are refused when the window is too small; a fixed finite set is taken
    as it is.
    """
    return [
        Unit(
            label=f"{P.name} N={N} {mode}",
            call=functools.partial(
                _distances, generator, P, N, mode, budget, windowed
            ),
        )
        for N in schedule
    ]


async def linf_baseline(ctx: Context, /) -> RunResult:
    P = presets.load_norm("linf")
    generator = distset.lattice_windows(P)
    schedule = (Fraction(10), Fraction(100), Fraction(1000))
    units = [
        *scan_units(
            generator, P, schedule, mode="threshold", budget=ctx.budget
        ),
        *scan_units(generator, P, schedule, mode="ball", budget=ctx.budget),
    ]
    results = await run_all(
        units, module="linf", progress=ctx.progress, threads=ctx.threads
    )
    threshold = [len(D) for D in results[: len(schedule)]]
    ball = [len(D) for D in results[len(schedule) :]]
    return RunResult(
        number=1,
        title="l-infinity baseline on Z^2",
        passed=threshold == [int(N) + 1 for N in schedule]
        and ball == [2 * int(N) + 1 for N in schedule],
        details={
            "schedule": [str(N) for N in schedule],
            "threshold": threshold,
            "ball": ball,
        },
    )


async def octagon_growth(ctx: Context, /) -> RunResult:
    spec = modelset.model_set_spec(presets.load_field("sqrt2"), 10)
    P = presets.load_norm("octagon")
    schedule = distset.check_schedule((50, 100, 200, 400))
    generator = distset.model_set_windows(spec, P, budget=ctx.budget)
    results = await run_all(
        scan_units(
            generator, P, schedule, mode="threshold", budget=ctx.budget
        ),
        module="octagon",
        progress=ctx.progress,
        threads=ctx.threads,
    )
    report = distset.growth_report(schedule, [len(D) for D in results])
    closures = await run_all(
        [
            Unit(
                label=f"closure N={D.N}",
                call=functools.partial(distset.closure_check, D, spec),
            )
            for D in results
        ],
        module="closure",
        progress=ctx.progress,
        passed=lambda r: r.passed,
        threads=ctx.threads,
    )
    ratios = report.ratios()
    spread = max(ratios) / min(ratios) if min(ratios) > 0 else math.inf
    return RunResult(
        number=2,
        title="octagon over a model-set square",
        passed=report.exponent <= 1.1  # noqa: PLR2004
        and spread <= 3  # noqa: PLR2004
        and all(c.passed for c in closures),
        details={
            **report.to_json(),
            "ratio_spread": spread,
            "closure_bound": str(closures[0].bound) if closures else None,
            "closure_failures": sum(c.failures for c in closures),
        },
    )


def _structure(spec: modelset.ModelSetSpec, R: int, budget: Budget, /) -> Any:
    T = modelset.enumerate_T(spec, R, budget=budget)
    return (
        len(T),
        modelset.verify_net(T, spec),
        modelset.verify_local_count(T, spec),
    )


async def model_set_structure(ctx: Context, /) -> RunResult:
    spec = modelset.model_set_spec(presets.load_field("sqrt2"), 10)
    radii = (100, 1000, 10_000)
    results = await run_all(
        [
            Unit(
                label=f"T(10) R={R}",
                call=functools.partial(_structure, spec, R, ctx.budget),
            )
            for R in radii
        ],
        module="model set",
        progress=ctx.progress,
        threads=ctx.threads,
    )
    densities = [count / R for R, (count, _, _) in zip(radii, results)]
    return RunResult(
        number=3,
        title="model-set density, net and local count",
        passed=max(densities) <= 1.5 * min(densities)  # noqa: PLR2004
        and all(net.passed and local.passed for _, net, local in results),
        details={
            "radii": list(radii),
            "densities": densities,
            "max_gaps": [str(net.max_gap) for _, net, _ in results],
            "gap_bound": str(results[0][1].bound),
            "max_local_counts": [local.max_count for _, _, local in results],
            "K2": spec.K2,
        },
    )


def _stage_run(
    schedule: Sequence[int], j: int, budget: Budget, seed: int, /
) -> tuple[construction.StageReport, list[construction.ContainmentReport]]:
    D = construction.build_stage(schedule, j)
    checks = construction.stage_checks(D, seed=seed)
    reports = [
        construction.verify_containment_bound(
            D, N, budget=budget, seed=seed
        )
        for N in (D.threshold + 1, D.next_threshold)
    ]
    return checks, reports


async def stage_bound(ctx: Context, /) -> RunResult:
    schedule = (5, 25, 125)
    results = await run_all(
        [
            Unit(
                label=f"stage {j}",
                call=functools.partial(
                    _stage_run, schedule, j, ctx.budget, ctx.seed
                ),
            )
            for j in range(3)
        ],
        module="stages",
        progress=ctx.progress,
        passed=lambda r: r[0].passed and all(c.passed for c in r[1]),
        threads=ctx.threads,
    )
    rows = [
        {
            "stage": c.stage,
            "N": c.N,
            "count": c.count,
            "bound": c.bound,
            "passed": c.passed,
        }
        for _, reports in results
        for c in reports
    ]
    return RunResult(
        number=4,
        title="stage containment bound",
        passed=all(
            checks.passed and all(c.passed for c in reports)
            for checks, reports in results
        ),
        details={
            "schedule": list(schedule),
            "stage_checks": [
                attrs.asdict(checks) for checks, _ in results
            ],
            "containment": rows,
        },
    )


async def transcendental_contrast(ctx: Context, /) -> RunResult:
    P = presets.load_norm("pi_hexagon")
    schedule = distset.check_schedule((32, 64, 128, 256, 512))
    results = await run_all(
        scan_units(
            distset.lattice_windows(P),
            P,
            schedule,
            mode="threshold",
            budget=ctx.budget,
        ),
        module="pi hexagon",
        progress=ctx.progress,
        threads=ctx.threads,
    )
    report = distset.growth_report(schedule, [len(D) for D in results])
    return RunResult(
        number=5,
        title="hexagon with a transcendental slope on Z^2",
        passed=report.exponent >= 1.3,  # noqa: PLR2004
        details=report.to_json(),
    )


def _suite_units(
    name: str, trials: int, seed: int, /, *, batch: int = 50
) -> list[Unit[sumsetlab.SuiteReport]]:
    suite = sumsetlab.SUITES[name]
    units = []
    for k, start in enumerate(range(0, trials, batch)):
        count = min(batch, trials - start)
        units.append(
            Unit(
                label=f"{name} batch {k}",
                call=functools.partial(suite, count, seed=seed + k),
            )
        )
    return units


async def run_suite(
    ctx: Context, name: str, trials: int, /
) -> sumsetlab.SuiteReport:
    """A randomized suite split into seeded batches."""
    reports = await run_all(
        _suite_units(name, trials, ctx.seed),
        module=name,
        progress=ctx.progress,
        passed=lambda r: r.passed,
        threads=ctx.threads,
    )
    return functools.reduce(sumsetlab.SuiteReport.merge, reports)


async def property_suite(ctx: Context, /) -> RunResult:
    reports = [
        await run_suite(ctx, name, trials)
        for name, trials in (
            ("ruzsa", 500),
            ("decomposition", 200),
            ("freiman", 200),
            ("consequences", 200),
        )
    ]
    return RunResult(
        number=6,
        title="sumset property suites",
        passed=all(r.passed for r in reports),
        details={r.name: r.to_json() for r in reports},
    )


async def dilation_contrast(ctx: Context, /) -> RunResult:
    spec = modelset.model_set_spec(presets.load_field("sqrt2"), 10)
    alpha = spec.field.gen
    algebraic, symbolic = await run_all(
        [
            Unit(
                label="T(10) windows",
                call=functools.partial(
                    sumsetlab.algebraic_contrast,
                    spec,
                    alpha,
                    (50, 100, 200),
                    budget=ctx.budget,
                ),
            ),
            Unit(
                label="progressions",
                call=functools.partial(
                    sumsetlab.dilation_growth_scan,
                    {
                        "progression": [
                            sumsetlab.progression(n) for n in (5, 10, 20)
                        ]
                    },
                    budget=ctx.budget,
                ),
            ),
        ],
        module="dilations",
        progress=ctx.progress,
        threads=ctx.threads,
    )
    exact = [row.difference == row.size**2 for row in symbolic.rows]
    return RunResult(
        number=7,
        title="algebraic and transcendental dilations",
        passed=algebraic.stable and all(exact),
        details={
            "algebraic": [
                {"size": r.size, "difference": r.difference}
                for r in algebraic.rows
            ],
            "constants": algebraic.constants,
            "progressions": [
                {"size": r.size, "difference": r.difference}
                for r in symbolic.rows
            ],
        },
    )


def oracle_cases(
    budget: Budget, /
) -> list[tuple[str, PlanarSet, PolygonalNorm, Fraction]]:
    """Small windows for every shipped polygon preset."""
    cases = []
    for name in presets.list_presets()["norms"]:
        P = presets.load_norm(name)
        if isinstance(P.ring, exactnum.NumberField) and P.ring.degree > 1:
            spec = modelset.model_set_spec(P.ring)
            T = modelset.enumerate_T(spec, Fraction(3, 2), budget=budget)
            S: PlanarSet = modelset.product_set(T, budget=budget)
        else:
            S = LatticeRows.box(P.ring, -10, 10)
        cases.append((name, S, P, Fraction(8)))
    return cases


def _oracle_match(
    S: PlanarSet, P: PolygonalNorm, N: Fraction, budget: Budget, /
) -> bool:
    return all(
        distset.distance_set(S, P, N, mode=mode, budget=budget).value_set()
        == distset.distance_set_oracle(S, P, N, mode=mode)
        for mode in distset.MODES
    )


def _enumeration_match(spec: modelset.ModelSetSpec, R: int, /) -> bool:
    box = math.ceil((R + spec.C) / 2) + 1
    fast = sorted(modelset.window_tuples(modelset.enumerate_T(spec, R)))
    return fast == sorted(modelset.brute_force_T(spec, R, box=box))


async def oracle_equivalence(ctx: Context, /) -> RunResult:
    cases = oracle_cases(ctx.budget)
    spec = modelset.model_set_spec(presets.load_field("sqrt2"), 10)
    radii = (10, 50, 100)
    units: list[Unit[bool]] = [
        Unit(
            label=f"oracle {name}",
            call=functools.partial(_oracle_match, S, P, N, ctx.budget),
        )
        for name, S, P, N in cases
    ]
    units.extend(
        Unit(
            label=f"enumeration R={R}",
            call=functools.partial(_enumeration_match, spec, R),
        )
        for R in radii
    )
    results = await run_all(
        units,
        module="oracles",
        progress=ctx.progress,
        passed=bool,
        threads=ctx.threads,
    )
    return RunResult(
        number=8,
        title="fast paths against exact oracles",
        passed=all(results),
        details={
            "distance_sets": {
                name: ok for (name, *_), ok in zip(cases, results)
            },
            "enumeration": dict(
                zip((str(R) for R in radii), results[len(cases) :])
            ),
        },
    )


RUNS: dict[int, Callable[[Context], Awaitable[RunResult]]] = {
    1: linf_baseline,
    2: octagon_growth,
    3: model_set_structure,
    4: stage_bound,
    5: transcendental_contrast,
    6: property_suite,
    7: dilation_contrast,
    8: oracle_equivalence,
}


async def run(ctx: Context, numbers: Sequence[int], /) -> list[RunResult]:
    results = []
    for number in numbers or sorted(RUNS):
        try:
            run_one = RUNS[number]
        except KeyError:
            msg = f"no reproduction run numbered {number}"
            raise ValueError(msg) from None
        start = time.perf_counter()
        result = await run_one(ctx)
        result = attrs.evolve(result, elapsed=time.perf_counter() - start)
        _logger.info(
            "Run %d (%s): %s in %.1f s",
            number,
            result.title,
            "PASS" if result.passed else "FAIL",
            result.elapsed,
        )
        results.append(result)
    return results
