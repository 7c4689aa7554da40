from __future__ import annotations

import asyncio
import logging
from typing import TYPE_CHECKING

import platformdirs

if TYPE_CHECKING:
    from collections.abc import Iterable
    from pathlib import Path

_logger = logging.getLogger(__name__)
CONFIG_PATH = platformdirs.user_config_path("distance_set_lab")


async def add_permission(
    path: Path, permission: int, /, *, missing_ok: bool = False
) -> None:
    try:
        current = (await asyncio.to_thread(path.stat)).st_mode
        wanted = current | permission
        if current != wanted:
            await asyncio.to_thread(path.chmod, wanted)
            _logger.info(
                "Changed permissions of %s from %o to %o",
                path,
                current,
                wanted,
            )
    except FileNotFoundError:
        if not missing_ok:
            raise


async def create_or_fix_dir(path: Path, /, *, permission: int) -> None:
    try:
        await asyncio.to_thread(path.mkdir, parents=True)
    except FileExistsError:
        if not await asyncio.to_thread(path.is_dir):
            msg = f"{path} is not a directory"
            raise ValueError(msg) from None
        await add_permission(path, permission)


async def write_chunks(path: Path, chunks: Iterable[str], /) -> None:
    """Replace ``path`` with the concatenated ``chunks``."""
    await asyncio.to_thread(path.unlink, missing_ok=True)
    f = await asyncio.to_thread(path.open, "w", encoding="utf-8", newline="")
    try:
        for chunk in chunks:
            await asyncio.to_thread(f.write, chunk)
    finally:
        await asyncio.to_thread(f.close)
