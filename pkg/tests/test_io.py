import json
import math

import pytest

from py_capq.exceptions import DataError, FileOperationError
from py_capq.indices.report import IndexEntry, IndexReport, IntervalEstimate
from py_capq.utils.io import load_measurements, save_text
from py_capq.utils.report_renderer import render_json, render_report, render_text


@pytest.fixture
def csv_file(tmp_path):
    def _write(text, name="data.csv"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return _write


@pytest.fixture
def report():
    entries = [
        IndexEntry.from_value("c_pk", 0.7777777777777778, {"c_pu": 0.7777777777777778, "c_pl": 1.4444444444444444}),
        IndexEntry.from_value("perakis_cpc", math.inf, {"p": 1.0, "p_nc": 0.0}, {"p0": 0.9973}),
        IndexEntry.from_value("c_p", 1.1111111111111112, notes=["estimated from n=10 observations"]),
    ]
    entries[2].interval = IntervalEstimate(point=1.11, lower=0.9, upper=1.4, level=0.9, replicates=1000, seed=7)
    return IndexReport(version="0.1.0", command="analyze", seeds={"bootstrap": 7}, entries=entries,
                       defaults_applied=[{"field": "interpolation", "value": "step"}], warnings=["something odd"])


def test_load_univariate(csv_file):
    m = load_measurements(csv_file("thickness\n1.5\n2.0\n\n2.5\n"))
    assert m.header == ["thickness"]
    assert m.dimension == 1
    sample = m.sample()
    assert sample.values == [1.5, 2.0, 2.5]
    assert sample.source.endswith("data.csv")


def test_load_multivariate(csv_file):
    m = load_measurements(csv_file("x,y\n1,2\n3,4\n5,6\n"))
    assert m.dimension == 2
    assert m.values.shape == (3, 2)
    with pytest.raises(DataError, match="single column"):
        m.sample()


def test_header_only(csv_file):
    with pytest.raises(DataError, match="no observations"):
        load_measurements(csv_file("x\n"))
    with pytest.raises(DataError, match="empty file"):
        load_measurements(csv_file(""))


def test_malformed_rows_are_listed(csv_file):
    with pytest.raises(DataError) as excinfo:
        load_measurements(csv_file("x,y\n1,2\nabc,3\n4,5\n6\n7,nan\n"))
    assert excinfo.value.lines == [3, 5, 6]
    assert "lines: 3, 5, 6" in str(excinfo.value)


def test_missing_file(tmp_path):
    with pytest.raises(FileOperationError, match="Failed to read measurements"):
        load_measurements(str(tmp_path / "absent.csv"))


def test_render_json_flags_infinite(report):
    doc = json.loads(render_json(report))
    perakis = doc["entries"][1]
    assert perakis["value"] is None
    assert perakis["infinite"] is True
    assert doc["schema_version"] == 1
    assert doc["entries"][0]["value"] == 0.7777777777777778


def test_render_json_round_trip(report):
    text = render_json(report)
    assert IndexReport.model_validate(json.loads(text)).model_dump() == report.model_dump()
    assert text == render_json(report)
    assert list(json.loads(text)) == sorted(json.loads(text))


@pytest.mark.parametrize("value", [0.1 + 0.2, 1 / 3, 2.0 ** -1074, 1.7976931348623157e308, 1e-17 + 1e-33])
def test_render_json_floats_round_trip_exactly(value):
    report = IndexReport(version="0.1.0", command="analyze", entries=[IndexEntry.from_value("c_p", value)])
    written = json.loads(render_json(report))["entries"][0]["value"]
    assert written == value
    assert len(repr(written).replace("-", "").split("e")[0].replace(".", "").lstrip("0")) <= 17


def test_render_text(report):
    text = render_text(report)
    lines = text.splitlines()
    rows = [line.split()[0] for line in lines if line.split() and line.split()[0] in ("c_pk", "perakis_cpc", "c_p")]
    assert rows == ["c_pk", "perakis_cpc", "c_p"]
    assert "inf" in next(line for line in lines if line.startswith("perakis_cpc"))
    assert "[0.9, 1.4] @ 0.9" in text
    assert "c_p: estimated from n=10 observations" in text
    assert "interpolation = \"step\"" in text
    assert "warnings:" in text and "something odd" in text


def test_render_report_formats(report):
    assert render_report(report, "json") == render_json(report)
    assert render_report(report, "text") == render_text(report)
    with pytest.raises(ValueError, match="unknown report format"):
        render_report(report, "xml")


def test_nonfinite_components_become_notes():
    entry = IndexEntry.from_value("yb_cf", 0.5, {"lower": math.inf, "upper": math.nan})
    assert entry.components == {"lower": None, "upper": None}
    assert "component lower is infinite" in entry.notes
    assert "component upper is undefined" in entry.notes
    assert IndexEntry.from_value("c_py", math.nan).undefined


def test_save_text(tmp_path):
    path = tmp_path / "out.txt"
    save_text(str(path), "a\nb\n")
    assert path.read_text(encoding="utf-8") == "a\nb\n"
    with pytest.raises(FileOperationError):
        save_text(str(tmp_path / "missing" / "out.txt"), "x")
