"""Field, polygon and point-set presets.

A preset is named either by a path to an existing JSON file or by a bare
name looked up in the shipped ``presets/`` directory and then in the user
configuration directory.
"""

from __future__ import annotations

import functools
import json
import logging
from fractions import Fraction
from pathlib import Path
from typing import TYPE_CHECKING, Any

import attrs

from distance_set_lab import exactnum, fs, polynorm, sumsetlab
from distance_set_lab.pointsets import FinitePlanarSet
from distance_set_lab.polynorm import Slope
from distance_set_lab.utils import bytes_decode

if TYPE_CHECKING:
    from collections.abc import Mapping

    from distance_set_lab.exactnum import Ring, RingElement
    from distance_set_lab.polynorm import PolygonalNorm
    from distance_set_lab.sumsetlab import FiniteSet

_logger = logging.getLogger(__name__)

PRESETS_PATH = Path(__file__).parent / "presets"
USER_PRESETS_PATH = fs.CONFIG_PATH / "presets"
_KINDS = ("fields", "norms")


def _locate(kind: str, name: str, /) -> Path:
    candidate = Path(name)
    if candidate.suffix == ".json" and candidate.is_file():
        return candidate
    for root in (PRESETS_PATH, USER_PRESETS_PATH):
        path = root / kind / f"{name}.json"
        if path.is_file():
            return path
    msg = f"unknown {kind[:-1]} preset: {name}"
    raise ValueError(msg)


def read_json(path: Path, /) -> Any:
    return json.loads(bytes_decode(path.read_bytes()))


def field_from_mapping(data: Mapping[str, Any], /) -> Ring:
    """``{"minpoly": [...], "real_root_hint": [lo, hi]}`` or ``{"symbol"}``."""
    if "symbol" in data:
        return exactnum.symbolic_ring(data["symbol"])
    try:
        minpoly = data["minpoly"]
        hint = data["real_root_hint"]
    except KeyError as e:
        msg = f"field description lacks {e.args[0]!r}"
        raise ValueError(msg) from None
    if len(hint) != 2:  # noqa: PLR2004
        msg = "real_root_hint must be an interval [lo, hi]"
        raise ValueError(msg)
    return exactnum.field_create(
        minpoly, hint, name=str(data.get("name", "a"))
    )


@functools.cache
def load_field(name: str, /) -> Ring:
    path = _locate("fields", name)
    _logger.debug("Loading field preset %s", path)
    return field_from_mapping(read_json(path))


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class NormPreset:
    norm: PolygonalNorm
    declared_slopes: tuple[Slope, ...]
    field_name: str
    description: str = ""

    def __repr__(self) -> str:
        return f"NormPreset({self.norm.name})"

    @property
    def slopes_match(self) -> bool:
        return set(self.declared_slopes) == set(polynorm.side_slopes(self.norm))


def _slope(ring: Ring, data: Any, /) -> Slope:
    if data == "inf":
        return Slope(value=None)
    return Slope(value=exactnum.element_from_json(ring, data))


def norm_from_mapping(
    data: Mapping[str, Any], /, *, name: str = ""
) -> NormPreset:
    field_name = str(data.get("field", "rationals"))
    ring = load_field(field_name)
    try:
        raw = data["vertices"]
    except KeyError:
        msg = "polygon description lacks 'vertices'"
        raise ValueError(msg) from None
    vertices = [
        [exactnum.element_from_json(ring, c) for c in vertex]
        for vertex in raw
    ]
    norm = polynorm.norm_create(
        vertices, ring=ring, name=str(data.get("name", name))
    )
    return NormPreset(
        norm=norm,
        declared_slopes=tuple(_slope(ring, s) for s in data.get("slopes", ())),
        field_name=field_name,
        description=str(data.get("description", "")),
    )


@functools.cache
def load_norm_preset(name: str, /) -> NormPreset:
    path = _locate("norms", name)
    _logger.debug("Loading polygon preset %s", path)
    preset = norm_from_mapping(read_json(path), name=path.stem)
    if preset.declared_slopes and not preset.slopes_match:
        _logger.warning(
            "Polygon preset %s declares slopes %s but has %s",
            name,
            [str(s) for s in preset.declared_slopes],
            [str(s) for s in polynorm.side_slopes(preset.norm)],
        )
    return preset


def load_norm(name: str, /) -> PolygonalNorm:
    return load_norm_preset(name).norm


def norm_to_mapping(
    P: PolygonalNorm, /, *, field: str, description: str = ""
) -> dict[str, Any]:
    """The preset file contents for ``P``; readable by ``load_norm``."""
    return {
        "name": P.name,
        "description": description,
        "field": field,
        "vertices": P.to_json(),
        "slopes": [
            "inf" if s.value is None else s.value.to_json()
            for s in polynorm.side_slopes(P)
        ],
    }


def point_set_from_mapping(
    data: Mapping[str, Any], /, *, ring: Ring
) -> FinitePlanarSet:
    """Parse ``{"field": ..., "points": [[x1, x2], ...]}``.

    ``field`` is optional and defaults to ``ring``; when given it must
    name the same ring.
    """
    if "field" in data:
        declared = load_field(str(data["field"]))
        if declared.key != ring.key:
            msg = (
                f"point set is over {declared.name} but the norm is over"
                f" {ring.name}"
            )
            raise exactnum.RingMismatchError(msg)
    try:
        raw = data["points"]
    except KeyError:
        msg = "point set description lacks 'points'"
        raise ValueError(msg) from None
    points = [
        [exactnum.element_from_json(ring, c) for c in point] for point in raw
    ]
    return FinitePlanarSet.from_points(points, ring=ring)


def load_point_set(path: Path, /, *, ring: Ring) -> FinitePlanarSet:
    _logger.debug("Loading point set %s", path)
    data = read_json(path)
    if not isinstance(data, dict):
        msg = f"{path} must hold a JSON object"
        raise ValueError(msg)  # noqa: TRY004
    return point_set_from_mapping(data, ring=ring)


def list_presets() -> dict[str, list[str]]:
    found: dict[str, list[str]] = {}
    for kind in _KINDS:
        names: set[str] = set()
        for root in (PRESETS_PATH, USER_PRESETS_PATH):
            folder = root / kind
            if folder.is_dir():
                names.update(p.stem for p in folder.glob("*.json"))
        found[kind] = sorted(names)
    return found


@attrs.define(
    frozen=True,
    repr=False,
    weakref_slot=False,
    kw_only=True,
    eq=False,
    getstate_setstate=False,
    match_args=False,
)
class SumsetInstance:
    """Sets and dilation factors read from a sumset instance file."""

    ring: Ring | None
    A: FiniteSet
    B: FiniteSet
    alpha: RingElement | None = None
    alpha2: RingElement | None = None
    K: Fraction | None = None
    depth: int = 1

    def __repr__(self) -> str:
        return f"SumsetInstance(|A|={len(self.A)}, |B|={len(self.B)})"


def _instance_ring(data: Any, /) -> Ring | None:
    if data is None or data == "vectors":
        return None
    if isinstance(data, str):
        return load_field(data)
    return field_from_mapping(data)


def instance_from_mapping(data: Mapping[str, Any], /) -> SumsetInstance:
    """Parse ``{"ring": ..., "A": [...], "B": [...], "alpha": ...}``.

    ``ring`` is a field preset name, an inline field description or
    ``"vectors"`` for plain rational vectors; ``B`` defaults to ``A``.
    """
    ring = _instance_ring(data.get("ring", "vectors"))
    try:
        raw_a = data["A"]
    except KeyError:
        msg = "sumset instance lacks 'A'"
        raise ValueError(msg) from None
    raw_b = data.get("B", raw_a)

    def build(raw: Any, /) -> FiniteSet:
        if ring is None:
            return sumsetlab.vector_set(raw)
        return sumsetlab.finite_set(
            [exactnum.element_from_json(ring, a) for a in raw], ring=ring
        )

    def factor(key: str, /) -> RingElement | None:
        if data.get(key) is None:
            return None
        if ring is None:
            msg = f"{key!r} needs a ring"
            raise ValueError(msg)
        return exactnum.element_from_json(ring, data[key])

    K = data.get("K")
    return SumsetInstance(
        ring=ring,
        A=build(raw_a),
        B=build(raw_b),
        alpha=factor("alpha"),
        alpha2=factor("alpha2"),
        K=None if K is None else Fraction(str(K)),
        depth=int(data.get("depth", data.get("d", 1))),
    )
