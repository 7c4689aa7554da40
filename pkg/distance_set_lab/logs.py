from __future__ import annotations

import logging
import logging.handlers
import queue
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from typing import Any

# Width of rendered tracebacks and of the stderr console.
CONSOLE_WIDTH = 80


def configure(
    *, level: int = logging.INFO
) -> logging.handlers.QueueListener:
    """Route every record through a queue to a rich handler on stderr.

    Worker threads only enqueue; the listener renders. Call ``start()``
    on the result before running and ``stop()`` when done.
    """
    log_queue: queue.Queue[Any] = queue.Queue()

    logging.root.addHandler(logging.handlers.QueueHandler(log_queue))
    logging.root.setLevel(level)
    logging.captureWarnings(True)  # noqa: FBT003

    # Start logging before importing rich for the first time
    import rich.traceback  # noqa: PLC0415
    from rich.console import Console  # noqa: PLC0415
    from rich.logging import RichHandler  # noqa: PLC0415

    rich.traceback.install(
        width=CONSOLE_WIDTH, extra_lines=0, word_wrap=True, suppress=[queue]
    )
    stderr_handler = RichHandler(
        console=Console(stderr=True),
        omit_repeated_times=False,
        show_path=False,
        rich_tracebacks=True,
        tracebacks_width=CONSOLE_WIDTH,
        tracebacks_extra_lines=0,
        tracebacks_word_wrap=True,
        log_time_format=logging.Formatter.default_time_format,
    )

    return logging.handlers.QueueListener(
        log_queue, stderr_handler, respect_handler_level=True
    )
