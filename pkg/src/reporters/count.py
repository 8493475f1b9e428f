#!/usr/bin/env python3
"""Count checks per section and decide the gate."""
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from reporters.document import gates, record_passed  # noqa: E402


def count(report: dict) -> dict:
    totals = {"checks": 0, "passed": 0, "failed": 0, "flagged": 0}
    failed_sections = []
    for section in report.get("sections", []):
        for record in section.get("records", []):
            totals["checks"] += 1
            if not gates(record):
                totals["flagged"] += 1
            elif record_passed(record):
                totals["passed"] += 1
            else:
                totals["failed"] += 1
        if not section.get("passed", False):
            failed_sections.append(section.get("name", "unknown"))
    return {
        **totals,
        "sections": len(report.get("sections", [])),
        "failed_sections": failed_sections,
        "gate": "pass" if report.get("passed") and not failed_sections else "fail",
    }


def main():
    report_path = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".gav-results/report.json")
    report = json.loads(report_path.read_text(encoding="utf-8")) if report_path.exists() else {}
    print(json.dumps(count(report), sort_keys=True))


if __name__ == "__main__":
    main()
