from __future__ import annotations

import asyncio
import csv
import io
import json
import logging
from typing import TYPE_CHECKING, Any

from distance_set_lab import exactnum, fs
from distance_set_lab.utils import format_float

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence
    from pathlib import Path

    from distance_set_lab.exactnum import RingElement
    from distance_set_lab.settings import ExperimentConfig

_logger = logging.getLogger(__name__)


def interval_columns(value: RingElement, /) -> tuple[str, str]:
    """``lo`` and ``hi`` of an enclosure of ``value``, 15 digits each."""
    lo, hi = exactnum.embed(value, 0, precision=64).re.as_floats()
    return format_float(lo), format_float(hi)


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def json_text(data: Any, /) -> str:
    """Tab-indented JSON, as in the ``_pretty`` files."""
    return json.dumps(data, ensure_ascii=False, indent="\t")


async def write_json(path: Path, name: str, data: Any, /) -> list[Path]:
    written = []
    for target, indent, separators in (
        (path / f"{name}.json", None, (",", ":")),
        (path / f"{name}_pretty.json", "\t", None),
    ):
        await fs.write_chunks(
            target,
            json.JSONEncoder(
                ensure_ascii=False, indent=indent, separators=separators
            ).iterencode(data),
        )
        written.append(target)
    return written


async def write_csv(
    path: Path,
    name: str,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    /,
) -> Path:
    target = path / f"{name}.csv"
    text = await asyncio.to_thread(_csv_text, header, rows)
    await fs.write_chunks(target, (text,))
    return target


async def save_report(
    *,
    config: ExperimentConfig,
    name: str,
    data: Any,
    header: Sequence[str] = (),
    rows: Iterable[Sequence[Any]] = (),
) -> None:
    written: list[Path] = []
    if config.output_json:
        written.extend(await write_json(config.output_path, name, data))
    if config.output_csv and header:
        written.append(
            await write_csv(config.output_path, name, header, rows)
        )
    for target in written:
        _logger.info(
            "Saved %s", await asyncio.to_thread(target.absolute)
        )
