# ruff: noqa: E402
from __future__ import annotations

from distance_set_lab import logs

_logs_listener = logs.configure()

import argparse
import asyncio
import json
import logging
import sys
from pathlib import Path
from typing import TYPE_CHECKING

from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn

from distance_set_lab import commands, utils
from distance_set_lab.construction import AvoidanceSearchError
from distance_set_lab.distset import MODES, WindowInsufficientError
from distance_set_lab.exactnum import (
    PRECISION_CAP,
    NotInvertibleError,
    PrecisionCapError,
)
from distance_set_lab.pointsets import Budget, BudgetExceededError
from distance_set_lab.settings import POINT_SETS, ExperimentConfig, merge
from distance_set_lab.sumsetlab import SUITES

if sys.version_info >= (3, 11):
    try:
        import tomllib
    except ImportError:
        # Help users on older alphas
        if not TYPE_CHECKING:
            import tomli as tomllib
else:
    import tomli as tomllib

if TYPE_CHECKING:
    from collections.abc import Sequence
    from typing import Any

_logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3

DEFAULT_CONFIG: dict[str, Any] = {
    "debug": False,
    "seed": 0,
    "precision_cap": PRECISION_CAP,
    "budget": {
        "max_points": Budget().max_points,
        "max_pairs": Budget().max_pairs,
    },
    "output": {"path": "./out", "csv": True, "json": True},
    "experiment": {
        "norm": "linf",
        "field": "sqrt2",
        "set": "z2",
        "radius": "100",
        "schedule": "64,128,256",
        "mode": "threshold",
    },
}
CONFIG_FILE = Path("config.toml")

_BUDGET_ERRORS = (
    BudgetExceededError,
    WindowInsufficientError,
    PrecisionCapError,
    AvoidanceSearchError,
)
_CONFIG_ERRORS = (ValueError, KeyError, OSError, TypeError, NotInvertibleError)


def _experiment_flags(
    parser: argparse.ArgumentParser, /, *names: str
) -> None:
    flags = {
        "norm": ("--norm", {"help": "polygon preset name or JSON file"}),
        "field": ("--field", {"help": "field preset name or JSON file"}),
        "set": (
            "--set",
            {"help": f"{', '.join(POINT_SETS)} or a JSON file of points"},
        ),
        "C": ("--C", {"help": "model-set window constant"}),
        "radius": ("--R", {"dest": "radius", "help": "window radius"}),
        "schedule": (
            "--schedule",
            {"help": "comma-separated, strictly increasing values"},
        ),
        "mode": ("--mode", {"choices": MODES}),
    }
    for name in names:
        flag, kwargs = flags[name]
        parser.add_argument(flag, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distance_set_lab",
        description="Distance sets of polygonal norms on structured sets.",
    )
    parser.add_argument(
        "--config", type=Path, help="TOML or JSON file overriding defaults"
    )
    parser.add_argument("--debug", action="store_true", default=None)
    parser.add_argument("--output", help="artifact directory")
    parser.add_argument("--seed", type=int)
    sub = parser.add_subparsers(dest="command", required=True)

    norm = sub.add_parser("norm", help="polygon presets")
    norm.add_argument("verb", choices=("list", "show", "check"))
    norm.add_argument("name", nargs="?")
    norm.add_argument(
        "--rescale", help="show the ball in coordinates (x1, x2 / alpha)"
    )
    norm.add_argument("--samples", type=int, default=200)

    model = sub.add_parser("modelset", help="model-set windows")
    _experiment_flags(model, "field", "C", "radius", "schedule")
    model.add_argument(
        "verb", choices=("verify", "enumerate", "closure", "growth")
    )

    dist = sub.add_parser("distset", help="distance-set growth scans")
    _experiment_flags(dist, "norm", "set", "field", "C", "schedule", "mode")
    dist.add_argument("--closure", action="store_true")
    dist.add_argument(
        "--density", action="store_true", help="check the counting floor"
    )
    dist.add_argument("--max-exponent", type=float)
    dist.add_argument("--min-exponent", type=float)
    dist.add_argument(
        "--max-spread", type=float, help="bound on max/min of count/N"
    )

    construct = sub.add_parser("construct", help="staged polygon")
    _experiment_flags(construct, "schedule")
    construct.add_argument(
        "--stages",
        "--stage",
        dest="stage",
        type=int,
        default=0,
        metavar="J",
        help="stage to build, using the first J schedule values",
    )
    construct.add_argument("--verify", action="store_true")
    construct.add_argument(
        "--export", metavar="NAME", help="save the ball as a user preset"
    )

    sumset = sub.add_parser("sumset", help="sumset toolkit")
    sumset.add_argument(
        "verb",
        choices=(
            "check-ruzsa",
            "freiman",
            "decompose",
            "pair",
            "iterate",
            "dim-check",
            "growth-scan",
            "suite",
        ),
    )
    sumset.add_argument("instance", nargs="?", type=Path)
    sumset.add_argument("--K")
    sumset.add_argument("--depth", type=int)
    sumset.add_argument("--sizes", default="5,10,20")
    sumset.add_argument("--digits", type=int, default=0)
    sumset.add_argument("--terms", type=int, default=3)
    sumset.add_argument(
        "--suite", dest="name", choices=sorted(SUITES), default="ruzsa"
    )
    sumset.add_argument("--trials", type=int, default=100)

    run = sub.add_parser("repro", help="reproduction runs")
    run.add_argument("numbers", nargs="*", type=int)
    return parser


def _read_mapping(path: Path, /) -> dict[str, Any]:
    text = utils.bytes_decode(path.read_bytes())
    if path.suffix == ".json":
        data = json.loads(text)
        if not isinstance(data, dict):
            msg = f"{path} must hold a JSON object"
            raise ValueError(msg)  # noqa: TRY004
        return data
    return tomllib.loads(text)


def _flag_overrides(args: argparse.Namespace, /) -> dict[str, Any]:
    experiment = {
        key: getattr(args, key, None)
        for key in ("norm", "field", "C", "radius", "schedule", "mode")
    }
    experiment["set"] = getattr(args, "set", None)
    return {
        "debug": args.debug,
        "seed": args.seed,
        "output": {"path": args.output},
        "experiment": experiment,
    }


async def load_config(args: argparse.Namespace, /) -> ExperimentConfig:
    cfg = DEFAULT_CONFIG
    if await asyncio.to_thread(CONFIG_FILE.is_file):
        cfg = merge(cfg, await asyncio.to_thread(_read_mapping, CONFIG_FILE))
    if args.config is not None:
        cfg = merge(cfg, await asyncio.to_thread(_read_mapping, args.config))
    cfg = merge(cfg, _flag_overrides(args))
    config = await ExperimentConfig.from_mapping(cfg)
    config.apply()
    return config


async def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = await load_config(args)
        with Progress(
            TextColumn("[yellow]{task.fields[module]}"),
            TextColumn("[red]::"),
            BarColumn(),
            TextColumn("[red]{task.fields[failed_count]}"),
            MofNCompleteColumn(),
            transient=True,
        ) as progress:
            passed = await commands.HANDLERS[args.command](
                args, config, progress
            )
    except _BUDGET_ERRORS as e:
        _logger.error("%s: %s", type(e).__name__, e)
        return EXIT_BUDGET
    except AssertionError as e:
        _logger.error("%s: %s", type(e).__name__, e)
        return EXIT_FAIL
    except _CONFIG_ERRORS as e:
        _logger.error("%s: %s", type(e).__name__, e)
        return EXIT_CONFIG
    return EXIT_PASS if passed else EXIT_FAIL


def cli() -> None:
    _logs_listener.start()
    try:
        code = asyncio.run(main())
    except KeyboardInterrupt:
        code = 130
    finally:
        _logs_listener.stop()
    sys.exit(code)


if __name__ == "__main__":
    cli()
