#!/usr/bin/env python3
"""Render the markdown step summary (appears in the Actions run UI)."""
import argparse
import json
import sys
from pathlib import Path

from jinja2 import Environment, FileSystemLoader, Undefined

TEMPLATES = Path(__file__).resolve().parent / "templates"


def fmt(value):
    if value is None or isinstance(value, Undefined):
        return "-"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def render(report: dict, counts: dict | None = None) -> str:
    env = Environment(loader=FileSystemLoader(str(TEMPLATES)), trim_blocks=True,
                      lstrip_blocks=True, keep_trailing_newline=True)
    env.globals["fmt"] = fmt
    template = env.get_template("summary.md.j2")
    return template.render(
        passed=report.get("passed", False),
        version=report.get("version", "unknown"),
        schema=report.get("schema", "?"),
        sections=report.get("sections", []),
        counts=counts or {},
    )


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--report", required=True)
    parser.add_argument("--counts", default="")
    args = parser.parse_args()

    path = Path(args.report)
    report = json.loads(path.read_text(encoding="utf-8")) if path.exists() else {}
    try:
        counts = json.loads(args.counts) if args.counts else {}
    except json.JSONDecodeError:
        counts = {}
    sys.stdout.write(render(report, counts))


if __name__ == "__main__":
    main()
