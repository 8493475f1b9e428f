#!/usr/bin/env python3
"""Merge per-section report files into the master report.json."""
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from reporters.document import ReportDocument, write_json  # noqa: E402

SECTION_ORDER = ["area", "entropy", "jacobi", "verify-bounds", "sweepout"]
MASTER = "report.json"


def merge(output_dir: Path) -> ReportDocument:
    merged = None
    for path in sorted(output_dir.glob("*.json")):
        if path.name == MASTER:
            continue
        try:
            doc = ReportDocument.from_record(json.loads(path.read_text(encoding="utf-8")))
        except (ValueError, KeyError) as exc:
            print(f"Skipping {path.name}: {exc}", file=sys.stderr)
            continue
        if merged is None:
            merged = ReportDocument(doc.config, [], doc.version)
        for section in doc.sections:
            merged.add(section)
    if merged is None:
        merged = ReportDocument({}, [])
    rank = {name: i for i, name in enumerate(SECTION_ORDER)}
    merged.sections.sort(key=lambda s: (rank.get(s.name, len(rank)), s.name))
    return merged


def main():
    output_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".gav-results")
    merged = merge(output_dir)
    write_json(output_dir / MASTER, merged)
    state = "PASSED" if merged.passed else "FAILED"
    print(f"Merged {len(merged.sections)} sections into {output_dir / MASTER}. Overall: {state}")


if __name__ == "__main__":
    main()
