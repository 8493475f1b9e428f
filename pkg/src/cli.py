#!/usr/bin/env python3
"""Command-line entry point: area, entropy, verify-bounds, sweepout, jacobi, all.

Each section is written to ``<output-dir>/<section>.json`` (and ``.csv`` when asked);
``all`` also writes the merged ``report.json``. Exit codes: 0 pass, 1 a check
failed or a suite errored, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent))

from geometry.gaussian_measure import (  # noqa: E402
    EntropySearch,
    FunctionalCenter,
    area,
    closed_form_agreement,
    entropy,
    profile_functional,
    scaling_identity_check,
    shrinker_monotonicity_check,
    surface_area,
    translate_area_bound_check,
)
from geometry.surfaces import (  # noqa: E402
    INF,
    CappedGraph,
    CompositeSurface,
    Cylinder,
    DoubledAnnulus,
    DoubledCone,
    Ellipsoid,
    Sphere,
    SphericalCaps,
    lower_to_profile,
    surface_from_dict,
    surface_to_dict,
)
from reporters.document import ReportDocument, Section, dumps, section_rows, write_csv, write_json  # noqa: E402
from runtime import __version__  # noqa: E402
from runtime.config import RunConfig, load_config, parse_grid  # noqa: E402
from runtime.errors import DomainError, UsageError, VerificationError  # noqa: E402
from runtime.logs import configure, get_logger  # noqa: E402
from verifiers import jacobi, sweepout  # noqa: E402
from verifiers.bounds import PROPS, run_props  # noqa: E402

log = get_logger("cli")

SURFACES = ("sphere", "cylinder", "annulus", "plane", "cone", "caps", "ellipsoid", "graph")
SUBCOMMANDS = ("area", "entropy", "verify-bounds", "sweepout", "jacobi", "all")

FOUR_OVER_E = 4.0 / math.e
CYLINDER_ENTROPY = math.sqrt(2.0 * math.pi / math.e)


def _or(value: float | None, default: float) -> float:
    return default if value is None else value


def build_surface(args: argparse.Namespace) -> CompositeSurface:
    if getattr(args, "surface_json", None):
        try:
            data = json.loads(Path(args.surface_json).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read surface JSON {args.surface_json}: {exc}") from exc
        try:
            return surface_from_dict(data)
        except DomainError as exc:
            raise UsageError(f"bad surface JSON: {exc}") from exc
    kind = args.surface or "sphere"
    R, R2, h = args.R, args.R2, args.h
    builders: dict[str, Callable[[], Any]] = {
        "sphere": lambda: Sphere(_or(R, 2.0)),
        "cylinder": lambda: Cylinder(_or(R, math.sqrt(2.0)), _or(h, INF)),
        "annulus": lambda: DoubledAnnulus(_or(R, 0.0), _or(R2, INF), _or(h, 0.0)),
        "plane": lambda: DoubledAnnulus(0.0, INF, _or(h, 0.0), sheets=1),
        "cone": lambda: DoubledCone(_or(R, 0.2), _or(R2, INF), _or(h, 0.0), _or(args.phi, 0.0)),
        "caps": lambda: SphericalCaps(_or(R, 2.0), _or(h, 0.0)),
        "ellipsoid": lambda: Ellipsoid(_or(args.a, 2.0), _or(args.b, 1.0)),
        "graph": lambda: CappedGraph(_or(h, 0.0), _or(args.a, 3.0), _or(args.b, 1.0)),
    }
    try:
        return CompositeSurface.of(kind, builders[kind]())
    except DomainError as exc:
        raise UsageError(f"bad {kind} parameters: {exc}") from exc


# ── sections ────────────────────────────────────────────────────────────────

def _area_record(surface: CompositeSurface, config: RunConfig) -> dict[str, Any]:
    res = surface_area(surface, config.quadrature_spec())
    return {"op": "area", "name": surface.label, "inputs": surface_to_dict(surface),
            "value": res.value, "error_bound": res.error_bound, "method": res.method,
            "inequality": res.inequality, "passed": True}


def normalization_pins(config: RunConfig) -> list[dict[str, Any]]:
    spec = config.quadrature_spec()
    sphere = Sphere(2.0)
    closed = area(sphere, spec)
    quad = profile_functional(lower_to_profile(sphere, spec), FunctionalCenter(), spec)
    cyl = area(Cylinder(math.sqrt(2.0), INF), spec)
    plane = area(DoubledAnnulus(0.0, INF, 0.0, sheets=1), spec)
    pins = [
        ("sphere S(2), closed form", closed.value, FOUR_OVER_E, 1e-9),
        ("sphere S(2), quadrature", quad.value, FOUR_OVER_E, 1e-8),
        ("cylinder Cyl(sqrt 2, inf)", cyl.value, CYLINDER_ENTROPY, 1e-8),
        ("plane", plane.value, 1.0, 1e-12),
    ]
    return [{"op": "area", "name": name, "value": value, "expected": expected,
             "tolerance": tol, "passed": abs(value - expected) <= tol}
            for name, value, expected, tol in pins]


def property_checks(config: RunConfig, seed: int = 7, agreement_draws: int = 1000,
                    scaling_draws: int = 100) -> list[dict[str, Any]]:
    """Closed forms against quadrature, the scaling identity, the translation inequality on
    random upper-half pieces and shrinker monotonicity."""
    spec = config.quadrature_spec()
    agreement = [
        {"op": "area", **closed_form_agreement(agreement_draws, seed, spec).to_record()},
        {"op": "f_functional", **scaling_identity_check(scaling_draws, seed, spec).to_record()},
    ]
    rng = np.random.default_rng(seed)
    failures, trials = [], 100
    for k in range(trials):
        kind = k % 3
        R = float(rng.uniform(0.2, 4.0))
        h = float(rng.uniform(0.0, 2.0))
        if kind == 0:
            piece = SphericalCaps(R, float(rng.uniform(0.0, 2.0)), upper_only=True)
        elif kind == 1:
            piece = DoubledAnnulus(R, R + float(rng.uniform(0.1, 4.0)), float(rng.uniform(0.0, 2.0)),
                                   sheets=1)
        else:
            a = R + 0.5
            hb = float(rng.uniform(0.0, 1.0))
            piece = CappedGraph(hb, a, float(rng.uniform(hb, a)))
        report = translate_area_bound_check(piece, h, spec)
        if not report.passed:
            failures.append({"piece": repr(piece), **report.to_record()})
    records = agreement + [{"op": "translate_area_bound_check",
                            "name": "translation (random upper-half pieces)",
                            "trials": trials, "failures": failures, "passed": not failures}]
    s_grid = np.linspace(0.0, 3.0, 31)
    for label, surface in (("S(2)", CompositeSurface.of("S(2)", Sphere(2.0))),
                           ("Cyl(sqrt 2)", CompositeSurface.of("Cyl", Cylinder(math.sqrt(2.0), INF)))):
        for _ in range(5):
            y = tuple(float(c) for c in rng.uniform(-1.0, 1.0, 3))
            a = float(rng.uniform(0.0, 0.5))
            report = shrinker_monotonicity_check(surface, y, a, s_grid, spec)
            records.append({"op": "shrinker_monotonicity_check", "name": f"monotonicity {label}",
                            "y": list(y), "a": a, "first_violation": report.first_violation,
                            "passed": report.passed})
    return records


def run_area(config: RunConfig, args: argparse.Namespace) -> Section:
    if getattr(args, "surface", None) or getattr(args, "surface_json", None):
        return Section("area", [_area_record(build_surface(args), config)])
    return Section("area", normalization_pins(config) + property_checks(config))


def _entropy_record(surface: CompositeSurface, config: RunConfig,
                    expected: float | None = None) -> dict[str, Any]:
    search = EntropySearch(tau_points=config.entropy_tau_points, y_points=config.entropy_y_points,
                           rounds=config.entropy_rounds)
    result = entropy(surface, search, config.quadrature_spec())
    record = {"op": "entropy", "name": surface.label, **result.to_record()}
    if expected is not None:
        record["expected"] = expected
        record["passed"] = abs(result.value - expected) <= 1e-6
    else:
        record["passed"] = True
    return record


def run_entropy(config: RunConfig, args: argparse.Namespace) -> Section:
    if getattr(args, "surface", None) or getattr(args, "surface_json", None):
        return Section("entropy", [_entropy_record(build_surface(args), config)])
    shrinkers = [
        (CompositeSurface.of("plane", DoubledAnnulus(0.0, INF, 0.0, sheets=1)), 1.0),
        (CompositeSurface.of("sphere S(2)", Sphere(2.0)), FOUR_OVER_E),
        (CompositeSurface.of("cylinder Cyl(sqrt 2)", Cylinder(math.sqrt(2.0), INF)), CYLINDER_ENTROPY),
    ]
    return Section("entropy", [_entropy_record(s, config, v) for s, v in shrinkers])


def run_bounds(config: RunConfig, args: argparse.Namespace) -> Section:
    reports = run_props(getattr(args, "prop", None), config.bound_resolution,
                        config.quadrature_spec(), config.threads)
    for report in reports:
        if report.discrepancy:
            log.warning("%s: %s", report.name, report.discrepancy)
    return Section("verify-bounds", [r.to_record() for r in reports])


def run_sweepout(config: RunConfig, args: argparse.Namespace) -> Section:
    lo, hi, n = config.r_grid
    report = sweepout.run_sweepout(
        config.g_list, [float(r) for r in np.linspace(lo, hi, n)], config.t_resolution,
        delta2=config.delta2, eta2=config.eta2, eta1=config.eta1, catenoid_c=config.catenoid_c,
        iota=config.iota, convention=config.convention, spec=config.quadrature_spec(),
        threads=config.threads,
    )
    summary = report.to_record()
    records = [{
        "name": "sweepout", "passed": report.passed, "max_area": report.global_max,
        "margin": report.margin, "bound": 2.0, "step3_max": summary["step3_max"],
        "step4_max": summary["step4_max"], "inf_D_rt_R": summary["inf_D_rt_R"],
    }]
    records += [{"name": f"inversion g={inv.g} R={inv.R:.6g}", **inv.to_record()}
                for inv in report.inversions]
    records += [{"name": f"{p.step} g={p.g}", **p.to_record()} for p in report.edges + report.literal]
    records.append({"name": "riemann-hurwitz", "passed": all(r["ok"] for r in report.rh_table),
                    "rows": list(report.rh_table)})
    records.append({"name": "parameter-monotonicity",
                    "passed": all(m["passed"] for m in report.monotonicity),
                    "rows": list(report.monotonicity)})
    records.append({"name": "squeeze-gap", "passed": True,
                    "examples": [{"lambda": lam, "lambda_prime": lp,
                                  "rho0": sweepout.squeeze_translation_gap(lam, lp)}
                                 for lam, lp in ((2.0, 3.0), (1.9, 2.94))]})
    section = Section("sweepout", records)
    section.csv_rows = report.rows()
    emit = getattr(args, "emit_profiles", None)
    if emit:
        write_csv(emit, section.csv_rows)
    return section


def run_jacobi(config: RunConfig, args: argparse.Namespace) -> Section:
    reports = jacobi.run_jacobi(config.lambda_points, config.threads)
    section = Section("jacobi", [r.to_record() for r in reports])
    section.csv_rows = jacobi.curves()
    emit = getattr(args, "emit_curves", None)
    if emit:
        write_csv(emit, section.csv_rows)
    return section


RUNNERS: dict[str, Callable[[RunConfig, argparse.Namespace], Section]] = {
    "area": run_area,
    "entropy": run_entropy,
    "jacobi": run_jacobi,
    "verify-bounds": run_bounds,
    "sweepout": run_sweepout,
}


def _timed(name: str, config: RunConfig, args: argparse.Namespace) -> Section:
    start = time.perf_counter()
    try:
        section = RUNNERS[name](config, args)
    except UsageError:
        raise
    except VerificationError as exc:
        log.error("%s failed: %s", name, exc)
        section = Section(name, [exc.to_record()], reason=exc.reason)
    except Exception as exc:  # fail closed
        log.exception("%s raised an internal error", name)
        section = Section(name, [{"passed": False, "reason": "internal", "message": str(exc)}],
                          reason="internal")
    section.wall_clock = time.perf_counter() - start
    state = "passed" if section.passed else "FAILED"
    log.info("%s %s in %.1f s", name, state, section.wall_clock)
    return section


def _write_section(section: Section, config: RunConfig) -> None:
    out = Path(config.output_dir)
    doc = ReportDocument(config.echo(), [section])
    if "json" in config.formats:
        write_json(out / f"{section.name}.json", doc)
    if "csv" in config.formats:
        rows = section.csv_rows or section_rows(section.records, section.name)
        write_csv(out / f"{section.name}.csv", rows)


# ── argument parsing ────────────────────────────────────────────────────────

def _add_surface_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--surface", choices=SURFACES)
    parser.add_argument("--surface-json", dest="surface_json")
    for flag in ("--R", "--R2", "--h", "--phi", "--a", "--b"):
        parser.add_argument(flag, type=float, dest=flag.lstrip("-"))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--format", dest="formats")
    common.add_argument("--threads", type=int)
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="gav", description="Gaussian area verification suite",
                                     parents=[common])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("area", parents=[common], help="Gaussian area of a surface")
    _add_surface_flags(p)
    p = sub.add_parser("entropy", parents=[common], help="entropy lower bound of a surface")
    _add_surface_flags(p)
    p = sub.add_parser("verify-bounds", parents=[common], help="certify the building-block bounds")
    p.add_argument("--prop", action="append", choices=sorted(PROPS))
    p.add_argument("--resolution", type=int)
    p = sub.add_parser("sweepout", parents=[common], help="inversion families and their areas")
    p.add_argument("--g", type=int, nargs="+")
    p.add_argument("--R-grid", dest="r_grid")
    p.add_argument("--t-res", dest="t_res", type=int)
    p.add_argument("--emit-profiles", dest="emit_profiles")
    p.add_argument("--convention", choices=("fold", "literal", "both"))
    p = sub.add_parser("jacobi", parents=[common], help="radial Jacobi fields of the plane")
    p.add_argument("--lambda-grid", dest="lambda_grid", type=int)
    p.add_argument("--emit-curves", dest="emit_curves")
    sub.add_parser("all", parents=[common], help="every suite, merged into report.json")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    out: dict[str, Any] = {
        "output_dir": getattr(args, "output_dir", None),
        "formats": getattr(args, "formats", None),
        "threads": getattr(args, "threads", None),
        "bound_resolution": getattr(args, "resolution", None),
        "g_list": ",".join(str(g) for g in args.g) if getattr(args, "g", None) else None,
        "r_grid": parse_grid(args.r_grid) if getattr(args, "r_grid", None) else None,
        "t_resolution": getattr(args, "t_res", None),
        "convention": getattr(args, "convention", None),
        "lambda_points": getattr(args, "lambda_grid", None),
    }
    return {k: v for k, v in out.items() if v is not None}


def run(argv: Sequence[str] | None = None) -> tuple[int, ReportDocument | None]:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure(getattr(args, "verbose", False))
    try:
        config = load_config(getattr(args, "config", None), _overrides(args))
        names = list(RUNNERS) if args.command == "all" else [args.command]
        doc = ReportDocument(config.echo())
        for name in names:
            section = _timed(name, config, args)
            _write_section(section, config)
            doc.add(section)
    except UsageError as exc:
        log.error("usage: %s", exc)
        return 2, None
    if args.command == "all" and "json" in config.formats:
        write_json(Path(config.output_dir) / "report.json", doc)
    sys.stdout.write(dumps(doc))
    return (0 if doc.passed else 1), doc


def main() -> None:
    code, _ = run()
    sys.exit(code)


if __name__ == "__main__":
    main()
