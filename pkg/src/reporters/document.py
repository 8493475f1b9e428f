"""Report document shared by every section, plus the JSON and CSV writers.

A record gates the run unless it carries a ``discrepancy`` text or ``gating: false``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from runtime import __version__

SCHEMA = 1
LEADING_COLUMNS = ("section", "step", "g", "R", "convention", "t", "r", "area", "error_bound")


def jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become "inf", "-inf" or "nan"."""
    if hasattr(value, "to_record"):
        return jsonable(value.to_record())
    if isinstance(value, Mapping):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def gates(record: Mapping[str, Any]) -> bool:
    return not record.get("discrepancy") and record.get("gating", True) is not False


def record_passed(record: Mapping[str, Any]) -> bool:
    return bool(record.get("passed", False))


@dataclass
class Section:
    name: str
    records: list[dict[str, Any]] = field(default_factory=list)
    wall_clock: float = 0.0
    reason: str | None = None
    csv_rows: list[dict[str, Any]] = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        if self.reason is not None:
            return False
        return all(record_passed(r) for r in self.records if gates(r))

    @property
    def discrepancies(self) -> list[str]:
        return [f"{r.get('name', r.get('step', self.name))}: {r['discrepancy']}"
                for r in self.records if r.get("discrepancy")]

    def to_record(self) -> dict[str, Any]:
        # wall_clock stays out so reruns write identical JSON
        out = {"name": self.name, "passed": self.passed, "records": self.records,
               "discrepancies": self.discrepancies}
        if self.reason is not None:
            out["reason"] = self.reason
        return out

    @classmethod
    def from_record(cls, data: Mapping[str, Any]) -> "Section":
        return cls(data["name"], list(data.get("records", [])), reason=data.get("reason"))


@dataclass
class ReportDocument:
    config: dict[str, Any]
    sections: list[Section] = field(default_factory=list)
    version: str = __version__

    @property
    def passed(self) -> bool:
        return bool(self.sections) and all(s.passed for s in self.sections)

    def add(self, section: Section) -> None:
        self.sections = [s for s in self.sections if s.name != section.name] + [section]

    def to_record(self) -> dict[str, Any]:
        return {
            "schema": SCHEMA,
            "version": self.version,
            "config": self.config,
            "passed": self.passed,
            "sections": [s.to_record() for s in self.sections],
        }

    @classmethod
    def from_record(cls, data: Mapping[str, Any]) -> "ReportDocument":
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        return cls(dict(data.get("config", {})),
                   [Section.from_record(s) for s in data.get("sections", [])],
                   data.get("version", __version__))


def dumps(value: Any) -> str:
    return json.dumps(jsonable(value), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path: str | Path, value: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(value), encoding="utf-8")
    return path


def _cell(value: Any) -> Any:
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (list, tuple, dict)):
        return json.dumps(jsonable(value), sort_keys=True)
    return value


def write_csv(path: str | Path, rows: Sequence[Mapping[str, Any]]) -> Path:
    """Header row from the union of keys; leading columns first, the rest sorted."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    keys: set[str] = set()
    for row in rows:
        keys.update(row)
    columns = [c for c in LEADING_COLUMNS if c in keys] + sorted(keys - set(LEADING_COLUMNS))
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, restval="", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
    return path


def section_rows(records: Iterable[Mapping[str, Any]], section: str) -> list[dict[str, Any]]:
    """Flat rows (scalars only) for the CSV rendering of a section."""
    rows = []
    for record in records:
        row = {"section": section}
        for key, value in record.items():
            if isinstance(value, (str, int, float, bool)) or value is None:
                row[key] = value
        rows.append(row)
    return rows
