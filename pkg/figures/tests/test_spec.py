"""FigureSpec validation and loading."""

import pytest

from decofig import DEFAULT_FORMAT, EmptyInput, FigureSpec, SpecError, from_mapping, load_spec


def test_minimal_mapping():
    spec = from_mapping({"kind": "series", "inputs": "a/*.csv", "out": "fig"})
    assert spec.inputs == ("a/*.csv",)
    assert spec.out_format == "pdf"
    assert spec.out_path().suffix == ".pdf"


@pytest.mark.parametrize("kind,fmt", sorted(DEFAULT_FORMAT.items()))
def test_default_formats(kind, fmt):
    expected = {"heatmap": "png"}.get(kind, "pdf")
    assert fmt == expected


def test_explicit_suffix_kept():
    spec = from_mapping(
        {"kind": "series", "inputs": "a.csv", "out": "fig.svg", "format": "svg"}
    )
    assert spec.out_path().name == "fig.svg"


def test_unknown_kind():
    with pytest.raises(SpecError):
        FigureSpec(kind="pie", inputs=("a.csv",), out="fig")


def test_unknown_field():
    with pytest.raises(SpecError):
        from_mapping({"kind": "series", "inputs": "a.csv", "out": "fig", "colour": "red"})


def test_missing_required_field():
    with pytest.raises(SpecError):
        from_mapping({"kind": "series", "inputs": "a.csv"})


def test_bad_limits():
    with pytest.raises(SpecError):
        from_mapping(
            {"kind": "series", "inputs": "a.csv", "out": "fig", "xlim": [1.0]}
        )


def test_bad_format():
    with pytest.raises(SpecError):
        from_mapping(
            {"kind": "series", "inputs": "a.csv", "out": "fig", "format": "bmp"}
        )


def test_inputs_list():
    spec = from_mapping(
        {"kind": "series", "inputs": ["a.csv", "b.csv"], "out": "fig"}
    )
    assert spec.inputs == ("a.csv", "b.csv")


def test_resolve_inputs_glob(fixtures_dir):
    spec = FigureSpec(kind="series", inputs=("ridge/point_*/series.csv",), out="fig")
    found = spec.resolve_inputs(fixtures_dir)
    assert [p.parent.name for p in found] == ["point_000", "point_001", "point_002"]


def test_resolve_inputs_empty(fixtures_dir):
    spec = FigureSpec(kind="series", inputs=("nowhere/*.csv",), out="fig")
    with pytest.raises(EmptyInput):
        spec.resolve_inputs(fixtures_dir)


def test_load_spec_json(specs_dir):
    spec = load_spec(specs_dir / "series.json")
    assert spec.kind == "series"
    assert spec.options["guide"]["fit"] == "entropy_slope"


def test_load_spec_yaml(tmp_path):
    path = tmp_path / "fig.yaml"
    path.write_text("kind: table\ninputs: timescales/timescales.csv\nout: fig\n")
    spec = load_spec(path)
    assert spec.kind == "table"


def test_load_spec_missing_file(tmp_path):
    with pytest.raises(SpecError):
        load_spec(tmp_path / "absent.json")


def test_load_spec_bad_json(tmp_path):
    path = tmp_path / "fig.json"
    path.write_text("{not json")
    with pytest.raises(SpecError):
        load_spec(path)
