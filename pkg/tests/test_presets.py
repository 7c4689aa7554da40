from __future__ import annotations

from fractions import Fraction

import pytest

from distance_set_lab import exactnum, presets

BUNDLED_NORMS = ("hexagon", "l1", "linf", "octagon", "pi_hexagon")


def test_list_presets() -> None:
    found = presets.list_presets()
    assert set(found) == {"fields", "norms"}
    assert {"golden", "sqrt2", "cubic", "pi", "rationals"} <= set(
        found["fields"]
    )
    assert set(BUNDLED_NORMS) <= set(found["norms"])


@pytest.mark.parametrize("name", BUNDLED_NORMS)
def test_declared_slopes_match(name: str) -> None:
    preset = presets.load_norm_preset(name)
    assert preset.declared_slopes
    assert preset.slopes_match


def test_unknown_presets() -> None:
    with pytest.raises(ValueError, match="unknown norm preset"):
        presets.load_norm("dodecagon")
    with pytest.raises(ValueError, match="unknown field preset"):
        presets.load_field("sqrt7")


def test_fields() -> None:
    cubic = presets.load_field("cubic")
    assert isinstance(cubic, exactnum.NumberField)
    assert cubic.degree == 3
    assert cubic.real_count == 1
    assert presets.load_field("sqrt2") is presets.load_field("sqrt2")
    assert isinstance(
        presets.field_from_mapping({"symbol": "pi"}), exactnum.SymbolicRing
    )


@pytest.mark.parametrize(
    ("data", "match"),
    [
        ({"real_root_hint": ["1", "2"]}, "lacks 'minpoly'"),
        ({"minpoly": ["-2", "0", "1"]}, "lacks 'real_root_hint'"),
        (
            {"minpoly": ["-2", "0", "1"], "real_root_hint": ["1", "2", "3"]},
            "interval",
        ),
    ],
)
def test_bad_field_descriptions(data: dict[str, object], match: str) -> None:
    with pytest.raises(ValueError, match=match):
        presets.field_from_mapping(data)


def test_norm_mapping_round_trip() -> None:
    P = presets.load_norm("octagon")
    data = presets.norm_to_mapping(P, field="sqrt2", description="copy")
    preset = presets.norm_from_mapping(data)
    assert preset.norm.vertices == P.vertices
    assert preset.slopes_match
    assert preset.description == "copy"
    with pytest.raises(ValueError, match="vertices"):
        presets.norm_from_mapping({"field": "sqrt2"})


def test_symbolic_instance() -> None:
    x = {"low": 1, "coords": ["1"]}
    instance = presets.instance_from_mapping(
        {"ring": "pi", "A": ["0", "1", x], "alpha": x, "K": "3/2", "d": 2}
    )
    assert isinstance(instance.ring, exactnum.SymbolicRing)
    assert len(instance.A) == 3
    assert instance.B.value_set() == instance.A.value_set()
    assert instance.alpha == instance.ring.gen
    assert instance.alpha2 is None
    assert instance.K == Fraction(3, 2)
    assert instance.depth == 2


def test_vector_instance() -> None:
    instance = presets.instance_from_mapping(
        {"A": [[0, 0], [1, 0]], "B": [[0, 0], [0, 1], [1, 1]], "K": 2}
    )
    assert instance.ring is None
    assert instance.A.frame is None
    assert (len(instance.A), len(instance.B)) == (2, 3)
    assert instance.K == 2
    assert instance.depth == 1
    with pytest.raises(ValueError, match="needs a ring"):
        presets.instance_from_mapping({"A": [[0]], "alpha": "2"})
    with pytest.raises(ValueError, match="lacks 'A'"):
        presets.instance_from_mapping({"ring": "pi"})


def test_point_set_from_mapping() -> None:
    sqrt2 = presets.load_field("sqrt2")
    S = presets.point_set_from_mapping(
        {"field": "sqrt2", "points": [[["0", "1"], "2"], ["1/2", 0], [0, 0]]},
        ring=sqrt2,
    )
    assert len(S) == 3
    assert (sqrt2.gen, sqrt2.constant(2)) in set(S.points())
    duplicate = presets.point_set_from_mapping(
        {"points": [[1, 1], ["1", "1"]]}, ring=exactnum.rationals()
    )
    assert len(duplicate) == 1
    with pytest.raises(exactnum.RingMismatchError):
        presets.point_set_from_mapping(
            {"field": "rationals", "points": []}, ring=sqrt2
        )
    with pytest.raises(ValueError, match="lacks 'points'"):
        presets.point_set_from_mapping({}, ring=sqrt2)
