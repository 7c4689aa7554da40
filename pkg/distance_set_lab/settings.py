from __future__ import annotations

import logging
import stat
from fractions import Fraction
from pathlib import Path
from typing import TYPE_CHECKING, Any

import attrs

from distance_set_lab import exactnum, fs
from distance_set_lab.distset import MODES
from distance_set_lab.pointsets import Budget
from distance_set_lab.runner import thread_limit
from distance_set_lab.utils import parse_rational, parse_schedule

if TYPE_CHECKING:
    from collections.abc import Mapping

    from typing_extensions import Self

    from distance_set_lab.distset import Mode

_logger = logging.getLogger(__name__)

POINT_SETS = ("z2", "modelset")


def _budget_converter(value: Mapping[str, int] | Budget, /) -> Budget:
    if isinstance(value, Budget):
        return value
    return Budget(
        max_points=int(value.get("max_points", Budget().max_points)),
        max_pairs=int(value.get("max_pairs", Budget().max_pairs)),
    )


def _optional_rational(
    value: str | int | Fraction | None, /
) -> Fraction | None:
    if value is None or value == "":
        return None
    return parse_rational(value)


def merge(
    base: Mapping[str, Any], override: Mapping[str, Any], /
) -> dict[str, Any]:
    """Nested update; ``None`` values in ``override`` are skipped."""
    result = dict(base)
    for key, value in override.items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(result.get(key), dict):
            result[key] = merge(result[key], value)
        else:
            result[key] = value
    return result


@attrs.define(
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class ExperimentConfig:
    debug: bool = attrs.field(validator=attrs.validators.instance_of(bool))
    seed: int = attrs.field(
        validator=[attrs.validators.instance_of(int), attrs.validators.ge(0)]
    )
    precision_cap: int = attrs.field(
        validator=attrs.validators.ge(exactnum.BASE_PRECISION)
    )
    budget: Budget = attrs.field(converter=_budget_converter)
    output_path: Path = attrs.field(converter=Path)
    output_csv: bool = attrs.field(
        validator=attrs.validators.instance_of(bool)
    )
    output_json: bool = attrs.field(
        validator=attrs.validators.instance_of(bool)
    )
    threads: int = attrs.field(validator=attrs.validators.gt(0))
    norm: str = attrs.field(validator=attrs.validators.min_len(1))
    field: str = attrs.field(validator=attrs.validators.min_len(1))
    point_set: str = attrs.field(validator=attrs.validators.min_len(1))
    C: Fraction | None = attrs.field(converter=_optional_rational)
    radius: Fraction = attrs.field(converter=parse_rational)
    schedule: tuple[Fraction, ...] = attrs.field(converter=parse_schedule)
    mode: Mode = attrs.field(validator=attrs.validators.in_(MODES))

    def __attrs_post_init__(self) -> None:
        if not self.output_json and not self.output_csv:
            msg = "both json and csv outputs are disabled"
            raise ValueError(msg)

    @C.validator
    def _validate_c(
        self, _attribute: attrs.Attribute[Fraction | None], value: Any, /
    ) -> None:
        if value is not None and value <= 0:
            msg = "C must be positive"
            raise ValueError(msg)

    @point_set.validator
    def _validate_point_set(
        self, _attribute: attrs.Attribute[str], value: str, /
    ) -> None:
        if value in POINT_SETS:
            return
        path = Path(value)
        if path.suffix != ".json":
            msg = (
                f"point_set must be one of {', '.join(POINT_SETS)} or a JSON"
                f" file, got {value!r}"
            )
            raise ValueError(msg)
        if not path.is_file():
            msg = f"point_set file {value} does not exist"
            raise ValueError(msg)

    @radius.validator
    def _validate_radius(
        self, _attribute: attrs.Attribute[Fraction], value: Fraction, /
    ) -> None:
        if value <= 0:
            msg = "radius must be positive"
            raise ValueError(msg)

    def apply(self) -> None:
        exactnum.set_precision_cap(self.precision_cap)
        if self.debug:
            logging.root.setLevel(logging.DEBUG)

    @classmethod
    async def from_mapping(cls, cfg: Mapping[str, Any], /) -> Self:
        output_path = Path(cfg["output"]["path"] or ".")
        await fs.create_or_fix_dir(
            output_path, permission=stat.S_IXUSR | stat.S_IWUSR
        )
        experiment = cfg["experiment"]
        return cls(
            debug=cfg["debug"],
            seed=cfg["seed"],
            precision_cap=cfg["precision_cap"],
            budget=cfg["budget"],
            output_path=output_path,
            output_csv=cfg["output"]["csv"],
            output_json=cfg["output"]["json"],
            threads=cfg.get("threads") or thread_limit(),
            norm=experiment["norm"],
            field=experiment["field"],
            point_set=experiment["set"],
            C=experiment.get("C"),
            radius=experiment["radius"],
            schedule=experiment["schedule"],
            mode=experiment["mode"],
        )
