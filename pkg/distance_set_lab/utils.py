from __future__ import annotations

from fractions import Fraction
from typing import TYPE_CHECKING

import charset_normalizer

from distance_set_lab.distset import check_schedule

if TYPE_CHECKING:
    from collections.abc import Iterable


def bytes_decode(value: bytes, /) -> str:
    match = charset_normalizer.from_bytes(value).best()
    return value.decode() if match is None else str(match)


def parse_rational(value: str | float | Fraction, /) -> Fraction:
    if isinstance(value, float):
        msg = f"expected an exact rational, got the float {value!r}"
        raise ValueError(msg)
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        msg = f"not a rational number: {value!r}"
        raise ValueError(msg) from None


def parse_schedule(
    value: str | Iterable[str | int], /
) -> tuple[Fraction, ...]:
    """``"64,128,256"`` or a list, positive and strictly increasing."""
    items = value.split(",") if isinstance(value, str) else value
    return check_schedule(parse_rational(str(v).strip()) for v in items)


def format_float(value: float, /) -> str:
    return f"{value:.15g}"
