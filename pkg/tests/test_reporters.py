import json
import math

import numpy as np
import pytest

from reporters.count import count
from reporters.document import (
    ReportDocument,
    Section,
    dumps,
    gates,
    jsonable,
    record_passed,
    section_rows,
    write_csv,
    write_json,
)
from reporters.merge import merge
from reporters.summary import render


def _doc(*sections):
    return ReportDocument({"threads": 1}, list(sections))


def test_jsonable_handles_numpy_and_non_finite():
    value = {"a": math.inf, "b": np.float64(math.nan), "c": (1, np.int64(2)), "d": np.bool_(True),
             "e": -math.inf, 3: np.array([0.5])}
    assert jsonable(value) == {"a": "inf", "b": "nan", "c": [1, 2], "d": True, "e": "-inf",
                               "3": [0.5]}
    # strict JSON: no bare Infinity or NaN
    assert "Infinity" not in dumps(value)


def test_gating_rule():
    assert gates({"passed": False})
    assert not gates({"passed": False, "discrepancy": "quoted constant is off"})
    assert not gates({"passed": False, "gating": False})
    assert record_passed({"passed": True})
    assert not record_passed({})


def test_section_pass_logic():
    section = Section("bounds", [{"name": "a", "passed": True},
                                 {"name": "b", "passed": False, "discrepancy": "d"}])
    assert section.passed
    assert section.discrepancies == ["b: d"]
    section.records.append({"name": "c", "passed": False})
    assert not section.passed
    assert not Section("x", [{"passed": True}], reason="internal").passed
    assert "reason" in Section("x", reason="overflow").to_record()


def test_document_pass_logic_and_add():
    doc = _doc()
    assert not doc.passed
    doc.add(Section("area", [{"passed": False}]))
    doc.add(Section("area", [{"passed": True}]))
    assert [s.name for s in doc.sections] == ["area"]
    assert doc.passed


def test_document_round_trip_and_schema_check():
    doc = _doc(Section("area", [{"passed": True, "value": 1.0}], wall_clock=0.5))
    data = json.loads(dumps(doc))
    assert data["schema"] == 1
    again = ReportDocument.from_record(data)
    assert again.sections[0].records == [{"passed": True, "value": 1.0}]
    with pytest.raises(ValueError):
        ReportDocument.from_record({**data, "schema": 99})


def test_section_json_ignores_wall_clock():
    first = _doc(Section("area", [{"passed": True, "value": 1.0}], wall_clock=0.5))
    second = _doc(Section("area", [{"passed": True, "value": 1.0}], wall_clock=7.25))
    assert dumps(first) == dumps(second)
    assert "wall_clock" not in json.loads(dumps(first))["sections"][0]


def test_write_csv_columns(tmp_path):
    rows = [{"t": 0.5, "area": 1.0, "zeta": 1, "section": "s"},
            {"g": 2, "alpha": [1, 2]}]
    path = write_csv(tmp_path / "out" / "rows.csv", rows)
    lines = path.read_text().splitlines()
    assert lines[0] == "section,g,t,area,alpha,zeta"
    assert lines[1] == "s,,0.5,1,,1"
    assert lines[2] == ',2,,,"[1, 2]",'


def test_section_rows_keep_scalars():
    rows = section_rows([{"name": "a", "value": 1.5, "extra": {"x": 1}, "passed": True}], "area")
    assert rows == [{"section": "area", "name": "a", "value": 1.5, "passed": True}]


def test_merge_orders_sections(tmp_path):
    write_json(tmp_path / "jacobi.json", _doc(Section("jacobi", [{"passed": True}])))
    write_json(tmp_path / "area.json", _doc(Section("area", [{"passed": True}])))
    write_json(tmp_path / "report.json", _doc(Section("stale", [{"passed": False}])))
    (tmp_path / "broken.json").write_text("{not json")
    merged = merge(tmp_path)
    assert [s.name for s in merged.sections] == ["area", "jacobi"]
    assert merged.passed


def test_merge_of_empty_directory(tmp_path):
    merged = merge(tmp_path)
    assert merged.sections == []
    assert not merged.passed


def test_count_totals():
    report = json.loads(dumps(_doc(
        Section("verify-bounds", [{"passed": True}, {"passed": True, "discrepancy": "d"}]),
        Section("sweepout", [{"passed": False}]),
    )))
    counts = count(report)
    assert counts["checks"] == 3
    assert counts["passed"] == 1
    assert counts["flagged"] == 1
    assert counts["failed"] == 1
    assert counts["failed_sections"] == ["sweepout"]
    assert counts["gate"] == "fail"
    assert count({})["gate"] == "fail"


def test_summary_render():
    report = json.loads(dumps(_doc(
        Section("verify-bounds", [{"name": "cones-infinite", "passed": True, "computed_max": 1.9801,
                                   "quoted_bound": 1.98, "margin": -1e-4, "discrepancy": "off"}]),
    )))
    text = render(report, count(report))
    assert "PASSED" in text
    assert "cones-infinite" in text
    assert "flagged" in text
    assert "1.9801" in text
    assert "### Discrepancies" in text
