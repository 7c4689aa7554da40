from __future__ import annotations

import asyncio
import csv
import json
from typing import TYPE_CHECKING

import pytest

from distance_set_lab.__main__ import (
    EXIT_BUDGET,
    EXIT_CONFIG,
    EXIT_FAIL,
    EXIT_PASS,
    main,
)

if TYPE_CHECKING:
    from pathlib import Path


@pytest.fixture
def out(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    monkeypatch.chdir(tmp_path)
    return tmp_path / "out"


def _run(out: Path, *argv: str) -> int:
    return asyncio.run(main(["--output", str(out), *argv]))


def _linf(*extra: str) -> tuple[str, ...]:
    return ("distset", "--norm", "linf", "--set", "z2", *extra)


def test_distset_writes_artifacts(out: Path) -> None:
    assert _run(out, *_linf("--schedule", "4,8")) == EXIT_PASS
    data = json.loads((out / "distset.json").read_text(encoding="utf-8"))
    assert data["counts"] == [5, 9]
    assert data["schedule"] == ["4", "8"]
    assert data["passed"]
    assert (out / "distset_pretty.json").is_file()
    with (out / "distset.csv").open(encoding="utf-8") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["N", "count", "ratio", "max_lo", "max_hi"]
    assert [row[:2] for row in rows[1:]] == [["4", "5"], ["8", "9"]]


def test_distset_ball_mode(out: Path) -> None:
    code = _run(out, *_linf("--schedule", "4,8", "--mode", "ball"))
    assert code == EXIT_PASS
    data = json.loads((out / "distset.json").read_text(encoding="utf-8"))
    assert data["counts"] == [9, 17]


def test_density_floor(out: Path) -> None:
    code = _run(out, *_linf("--schedule", "8,16", "--density"))
    assert code == EXIT_PASS
    data = json.loads((out / "distset.json").read_text(encoding="utf-8"))
    assert all(d["passed"] for d in data["density"])


def _points_file(tmp_path: Path, **data: object) -> str:
    path = tmp_path / "points.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_distset_point_file(out: Path, tmp_path: Path) -> None:
    points = _points_file(
        tmp_path,
        points=[["0", "0"], ["3", "0"], ["0", "1"], ["1", "1"], [0, 0]],
    )
    code = _run(
        out, "distset", "--norm", "linf", "--set", points, "--schedule", "1,3"
    )
    assert code == EXIT_PASS
    data = json.loads((out / "distset.json").read_text(encoding="utf-8"))
    assert data["counts"] == [2, 4]
    assert data["set"] == points


@pytest.mark.parametrize(
    ("data", "extra"),
    [
        ({"field": "sqrt2", "points": [["0", "0"]]}, ()),
        ({"dots": [["0", "0"]]}, ()),
        ({"points": [["0", "0"], ["1", "0"]]}, ("--density",)),
    ],
)
def test_distset_point_file_errors(
    out: Path, tmp_path: Path, data: dict[str, object], extra: tuple[str, ...]
) -> None:
    points = _points_file(tmp_path, **data)
    code = _run(
        out,
        "distset",
        "--norm",
        "linf",
        "--set",
        points,
        "--schedule",
        "1,2",
        *extra,
    )
    assert code == EXIT_CONFIG


@pytest.mark.parametrize("name", ["grid", "missing.json"])
def test_distset_unknown_point_set(out: Path, name: str) -> None:
    code = _run(out, "distset", "--norm", "linf", "--set", name)
    assert code == EXIT_CONFIG


def test_exponent_gate_fails(out: Path) -> None:
    code = _run(out, *_linf("--schedule", "4,8", "--max-exponent", "0.5"))
    assert code == EXIT_FAIL


@pytest.mark.parametrize(
    "argv",
    [
        _linf("--schedule", "10,5"),
        ("distset", "--norm", "dodecagon", "--schedule", "4,8"),
        _linf("--schedule", "4,8", "--closure"),
        ("norm", "show", "dodecagon"),
        ("construct", "--schedule", "8,64", "--stage", "3"),
    ],
)
def test_configuration_errors(out: Path, argv: tuple[str, ...]) -> None:
    assert _run(out, *argv) == EXIT_CONFIG


def test_budget_exceeded(out: Path, tmp_path: Path) -> None:
    config = tmp_path / "tiny.json"
    config.write_text(json.dumps({"budget": {"max_pairs": 10}}))
    code = asyncio.run(
        main(
            [
                "--config",
                str(config),
                "--output",
                str(out),
                *_linf("--schedule", "4,8"),
            ]
        )
    )
    assert code == EXIT_BUDGET


def test_config_file_in_toml(out: Path, tmp_path: Path) -> None:
    (tmp_path / "config.toml").write_text(
        '[experiment]\nnorm = "l1"\nschedule = "3,6"\n', encoding="utf-8"
    )
    assert _run(out, "distset", "--set", "z2") == EXIT_PASS
    data = json.loads((out / "distset.json").read_text(encoding="utf-8"))
    assert data["norm"] == "l1"
    assert data["counts"] == [4, 7]


def test_norm_check(out: Path) -> None:
    assert _run(out, "norm", "check", "octagon", "--samples", "50") == EXIT_PASS


@pytest.mark.parametrize("flag", ["--stages", "--stage"])
def test_construct_stage0(out: Path, flag: str) -> None:
    code = _run(out, "construct", "--schedule", "8,64", flag, "0", "--verify")
    assert code == EXIT_PASS


def test_sumset_instance(out: Path, tmp_path: Path) -> None:
    x = {"low": 1, "coords": ["1"]}
    one_plus_x = {"low": 0, "coords": ["1", "1"]}
    instance = tmp_path / "square.json"
    instance.write_text(
        json.dumps(
            {
                "ring": "pi",
                "A": ["0", "1", x, one_plus_x],
                "alpha": x,
                "K": 3,
            }
        )
    )
    assert _run(out, "sumset", "check-ruzsa", str(instance)) == EXIT_PASS
    assert _run(out, "sumset", "decompose", str(instance)) == EXIT_PASS
    assert (
        _run(out, "sumset", "decompose", str(instance), "--K", "1")
        == EXIT_CONFIG
    )


def test_sumset_suite(out: Path) -> None:
    code = _run(out, "sumset", "suite", "--suite", "ruzsa", "--trials", "5")
    assert code == EXIT_PASS
    data = json.loads((out / "suite_ruzsa.json").read_text(encoding="utf-8"))
    assert data["trials"] == 5
