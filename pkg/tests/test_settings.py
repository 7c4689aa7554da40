from __future__ import annotations

import asyncio
from fractions import Fraction
from typing import TYPE_CHECKING, Any

import pytest

from distance_set_lab import exactnum, runner, settings, utils
from distance_set_lab.__main__ import DEFAULT_CONFIG
from distance_set_lab.pointsets import Budget

if TYPE_CHECKING:
    from pathlib import Path


def _config(tmp_path: Path, **experiment: Any) -> settings.ExperimentConfig:
    cfg = settings.merge(
        DEFAULT_CONFIG,
        {"output": {"path": str(tmp_path / "out")}, "experiment": experiment},
    )
    return asyncio.run(settings.ExperimentConfig.from_mapping(cfg))


def test_merge_is_nested() -> None:
    base = {"a": 1, "b": {"c": 2, "d": 3}}
    merged = settings.merge(base, {"b": {"d": 4}, "e": None, "a": None})
    assert merged == {"a": 1, "b": {"c": 2, "d": 4}}
    assert base == {"a": 1, "b": {"c": 2, "d": 3}}


def test_parse_rational() -> None:
    assert utils.parse_rational("3/2") == Fraction(3, 2)
    assert utils.parse_rational(7) == 7
    with pytest.raises(ValueError, match="float"):
        utils.parse_rational(1.5)
    with pytest.raises(ValueError, match="not a rational"):
        utils.parse_rational("1/0")


def test_parse_schedule() -> None:
    assert utils.parse_schedule("64, 128,256") == (64, 128, 256)
    assert utils.parse_schedule([1, "5/2"]) == (1, Fraction(5, 2))
    with pytest.raises(ValueError, match="strictly increasing"):
        utils.parse_schedule("10,5")


def test_defaults(tmp_path: Path) -> None:
    config = _config(tmp_path)
    assert config.norm == "linf"
    assert config.point_set == "z2"
    assert config.schedule == (64, 128, 256)
    assert config.radius == 100
    assert config.C is None
    assert config.budget.max_points == Budget().max_points
    assert config.threads >= 1
    assert (tmp_path / "out").is_dir()


def test_overrides(tmp_path: Path) -> None:
    config = _config(
        tmp_path, C="5/2", schedule="8,16", mode="ball", set="modelset"
    )
    assert config.C == Fraction(5, 2)
    assert config.schedule == (8, 16)
    assert config.mode == "ball"
    assert config.point_set == "modelset"


@pytest.mark.parametrize(
    ("experiment", "match"),
    [
        ({"mode": "sphere"}, "mode"),
        ({"set": "grid"}, "point_set"),
        ({"set": "nowhere.json"}, "does not exist"),
        ({"C": "-1"}, "C must be positive"),
        ({"radius": "0"}, "radius must be positive"),
        ({"schedule": "5,5"}, "strictly increasing"),
    ],
)
def test_invalid(
    tmp_path: Path, experiment: dict[str, str], match: str
) -> None:
    with pytest.raises(ValueError, match=match):
        _config(tmp_path, **experiment)


def test_outputs_disabled(tmp_path: Path) -> None:
    cfg = settings.merge(
        DEFAULT_CONFIG,
        {
            "output": {
                "path": str(tmp_path),
                "csv": False,
                "json": False,
            }
        },
    )
    with pytest.raises(ValueError, match="disabled"):
        asyncio.run(settings.ExperimentConfig.from_mapping(cfg))


def test_output_path_is_file(tmp_path: Path) -> None:
    target = tmp_path / "taken"
    target.write_text("")
    cfg = settings.merge(DEFAULT_CONFIG, {"output": {"path": str(target)}})
    with pytest.raises(ValueError, match="not a directory"):
        asyncio.run(settings.ExperimentConfig.from_mapping(cfg))


def test_apply_sets_precision_cap(tmp_path: Path) -> None:
    previous = exactnum.get_precision_cap()
    cfg = settings.merge(
        DEFAULT_CONFIG,
        {"output": {"path": str(tmp_path)}, "precision_cap": 256},
    )
    config = asyncio.run(settings.ExperimentConfig.from_mapping(cfg))
    try:
        config.apply()
        assert exactnum.get_precision_cap() == 256
    finally:
        exactnum.set_precision_cap(previous)


def test_thread_limit(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(runner.THREADS_ENV, "3")
    assert runner.thread_limit() == 3
    monkeypatch.setenv(runner.THREADS_ENV, "0")
    assert runner.thread_limit() >= 1
    monkeypatch.setenv(runner.THREADS_ENV, "many")
    with pytest.raises(ValueError, match="integer"):
        runner.thread_limit()
    monkeypatch.setenv(runner.THREADS_ENV, "-2")
    with pytest.raises(ValueError, match="non-negative"):
        runner.thread_limit()


def test_point_set_file(tmp_path: Path) -> None:
    points = tmp_path / "points.json"
    points.write_text('{"points": [["0", "0"]]}', encoding="utf-8")
    config = _config(tmp_path, set=str(points))
    assert config.point_set == str(points)
