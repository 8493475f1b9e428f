"""Certification of the Gaussian-area bounds for the building blocks.

Each verifier scans a parameter grid, polishes the grid argmax with a compass
search, and reports the measured maximum next to the bound it is compared with.
The slack ledger holds only certified numerical error: grid slack (half the final
cell diameter times a measured Lipschitz constant) and the analytic tail past the
scanned box, plus quadrature error where a piece needs it. Half a unit in the last
quoted digit decides whether an excess is flagged as a quoting discrepancy or fails
the check.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from geometry.gaussian_measure import (
    FunctionalCenter,
    annulus_area,
    capped_graph_area,
    cone_area,
    cylinder_area,
    ellipsoid_area,
    gaussian_volume_ball,
    half_volume_radius,
    profile_functional,
    sphere_area,
)
from geometry.surfaces import HALF_PI, DoubledCone, lower_to_profile
from numerics.quadrature import QuadratureSpec
from numerics.search import grid_maximum, grid_slack, lipschitz_estimate, pattern_search
from numerics.special_functions import SQRT_PI
from runtime.errors import DomainError
from runtime.logs import get_logger

log = get_logger("bounds")

DELTA1 = 0.133
DELTA2 = 0.02
DELTA3 = 0.0365
QUOTED_ELLIPSOID_BOUND = 1.9365
R_TAIL = 12.0


@dataclass(frozen=True)
class BoundReport:
    name: str
    computed_max: float
    argmax: dict[str, float]
    quoted_bound: float
    passed: bool
    grid_spec: dict[str, Any]
    slack: float = 0.0
    tail_bound: float = 0.0
    discrepancy: str | None = None
    gating: bool = True
    extra: dict[str, Any] = field(default_factory=dict)

    @property
    def margin(self) -> float:
        return self.quoted_bound - self.computed_max

    def to_record(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "computed_max": self.computed_max,
            "argmax": self.argmax,
            "quoted_bound": self.quoted_bound,
            "margin": self.margin,
            "passed": self.passed,
            "slack": self.slack,
            "tail_bound": self.tail_bound,
            "discrepancy": self.discrepancy,
            "gating": self.gating,
            "grid_spec": self.grid_spec,
            "extra": self.extra,
        }


@dataclass(frozen=True)
class _Scan:
    point: tuple[float, ...]
    value: float
    grid_value: float
    grid_slack: float
    on_boundary: bool
    evaluations: int
    spec: dict[str, Any]


def _nested_levels(count: int) -> list[int]:
    """Point counts n, (n + 1)/2, ... whose grids are subsets of the n-point grid, coarsest first."""
    levels = [count]
    while count > 3 and count % 2 == 1:
        count = (count + 1) // 2
        levels.append(count)
    return levels[::-1]


def _scan_level(func: Callable[[tuple[float, ...]], float],
                bounds: Sequence[tuple[float, float]],
                counts: Sequence[int],
                threads: int,
                rounds: int) -> _Scan:
    axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(bounds, counts)]
    best, grid_value, values = grid_maximum(func, axes, threads)
    cells = [(hi - lo) / (n - 1) for (lo, hi), n in zip(bounds, counts)]
    polished = pattern_search(func, best, bounds, cells, rounds=rounds, shrink=0.5)
    lipschitz = lipschitz_estimate(func, polished.x, polished.step, bounds)
    on_boundary = any(x <= lo or x >= hi for x, (lo, hi) in zip(polished.x, bounds))
    return _Scan(polished.x, polished.value, grid_value, grid_slack(polished.step, lipschitz),
                 on_boundary, values.size + polished.evaluations,
                 {"final_step": list(polished.step), "lipschitz": lipschitz})


def _maximize(func: Callable[[tuple[float, ...]], float],
              names: Sequence[str],
              bounds: Sequence[tuple[float, float]],
              resolution: int | Sequence[int],
              threads: int = 1,
              rounds: int = 3) -> _Scan:
    """Grid scan plus compass polish.

    A single odd ``resolution`` also scans every nested coarser grid and keeps the best
    point found, so going from n to 2n - 1 points per axis never lowers the maximum.
    Slack and grid value come from the finest level.
    """
    if isinstance(resolution, int):
        levels = [[n] * len(names) for n in _nested_levels(resolution)]
    else:
        levels = [list(resolution)]
    best: _Scan | None = None
    running, evaluations = [], 0
    for counts in levels:
        scan = _scan_level(func, bounds, counts, threads, rounds)
        evaluations += scan.evaluations
        if best is not None and best.value > scan.value:
            scan = dataclasses.replace(scan, point=best.point, value=best.value,
                                       on_boundary=best.on_boundary)
        best = scan
        running.append(scan.value)
    counts = levels[-1]
    spec = {
        "axes": {n: [lo, hi, c] for n, (lo, hi), c in zip(names, bounds, counts)},
        "rounds": rounds,
        "shrink": 0.5,
        "levels": [c[0] for c in levels],
        "level_max": running,
        **best.spec,
    }
    return dataclasses.replace(best, evaluations=evaluations, spec=spec)


def _quoted_precision(constant: str) -> float:
    """Half a unit in the last digit of a quoted decimal, e.g. '1.98' -> 0.005."""
    digits = len(constant.split(".")[1]) if "." in constant else 0
    return 0.5 * 10.0 ** (-digits)


def _against_quote(value: float, bound: float, slack: float, quoted: str) -> tuple[bool, str | None]:
    """Pass on certified slack only; an excess inside the quoted digits is flagged, not failed."""
    passed = value <= bound + slack
    if value <= bound:
        return passed, None
    precision = _quoted_precision(quoted)
    if value > bound + slack + precision:
        return passed, None
    return passed, (f"measured max {value!r} exceeds {bound!r} by {value - bound:.3g}, inside "
                    f"half a unit ({precision:g}) of the quoted '{quoted}'")


def _planar_cone_tail(R: float) -> float:
    # |C(R1, R2, phi)| <= (2 + sqrt(pi) R) e^{-R^2/4} once R1 >= R
    return (2.0 + SQRT_PI * R) * math.exp(-R * R / 4.0)


# ── capped cylinders ────────────────────────────────────────────────────────

def capped_cylinder_bound(R: float, h: float) -> float:
    """G(R, h) = e^{-h^2/4}|S(R)| + |Cyl(R, h)|."""
    return math.exp(-h * h / 4.0) * sphere_area(R) + cylinder_area(R, h)


def verify_capped_cylinders(resolution: int = 40, spec: QuadratureSpec | None = None,
                            threads: int = 1) -> BoundReport:
    quoted = "1.867"
    r_lo = R_TAIL / 400
    # dG/dh = R e^{-(R^2+h^2)/4}(1 - hR/2) vanishes only at h = 2/R
    reduced = _maximize(lambda p: capped_cylinder_bound(p[0], 2.0 / p[0]), ["R"],
                        [(r_lo, R_TAIL)], 4 * resolution - 3, threads, rounds=8)
    box = _maximize(lambda p: capped_cylinder_bound(p[0], p[1]), ["R", "h"],
                    [(r_lo, R_TAIL), (0.0, R_TAIL)], resolution, threads, rounds=8)
    sphere_edge = _maximize(lambda p: sphere_area(p[0]), ["R"], [(r_lo, R_TAIL)], resolution, threads)
    cylinder_edge = _maximize(lambda p: cylinder_area(p[0], math.inf), ["R"], [(r_lo, R_TAIL)],
                              resolution, threads)
    R0 = reduced.point[0]
    computed = max(reduced.value, box.value)
    tail = (R_TAIL ** 2 + SQRT_PI * R_TAIL) * math.exp(-R_TAIL ** 2 / 4.0)
    slack = max(reduced.grid_slack, box.grid_slack) + tail
    passed, discrepancy = _against_quote(computed, float(quoted), slack, quoted)
    interior = not reduced.on_boundary
    if not interior:
        log.warning("capped-cylinder argmax R = %g lies on the scan boundary", R0)
    return BoundReport(
        name="capped-cylinders",
        computed_max=computed,
        argmax={"R": R0, "h": 2.0 / R0},
        quoted_bound=float(quoted),
        passed=interior and passed,
        grid_spec={"reduced": reduced.spec, "box": box.spec},
        slack=slack,
        tail_bound=tail,
        discrepancy=discrepancy,
        extra={
            "box_max": box.value,
            "box_argmax": {"R": box.point[0], "h": box.point[1]},
            "sphere_edge_max": sphere_edge.value,
            "sphere_edge_R": sphere_edge.point[0],
            "cylinder_edge_max": cylinder_edge.value,
            "cylinder_edge_R": cylinder_edge.point[0],
            "delta1": DELTA1,
            "two_minus_delta1": 2.0 - DELTA1,
            "quoted_precision": _quoted_precision(quoted),
        },
    )


# ── cones ───────────────────────────────────────────────────────────────────

def _cone(R1: float, R2: float, h: float, phi: float) -> float:
    if phi >= HALF_PI:
        return cone_area(R1, math.inf, h, HALF_PI)
    return cone_area(R1, R2, h, phi)


def verify_cones_finite(resolution: int = 40, spec: QuadratureSpec | None = None,
                        threads: int = 1) -> BoundReport:
    """|C(R1, R2, phi)| <= 2 over R1 <= R2, with R2 = inf scanned as its own slice."""
    finite = _maximize(lambda p: _cone(p[0], p[0] + p[1], 0.0, p[2]), ["R1", "length", "phi"],
                       [(0.0, R_TAIL), (1e-3, 2 * R_TAIL), (0.0, HALF_PI)], resolution, threads)
    infinite = _maximize(lambda p: _cone(p[0], math.inf, 0.0, p[1]), ["R1", "phi"],
                         [(0.0, R_TAIL), (0.0, HALF_PI)], resolution, threads)
    if infinite.value >= finite.value:
        argmax = {"R1": infinite.point[0], "R2": math.inf, "phi": infinite.point[1]}
        computed = infinite.value
    else:
        argmax = {"R1": finite.point[0], "R2": finite.point[0] + finite.point[1],
                  "phi": finite.point[2]}
        computed = finite.value
    tail = _planar_cone_tail(R_TAIL)
    slack = max(finite.grid_slack, infinite.grid_slack) + tail + 1e-9
    return BoundReport(
        name="cones-finite",
        computed_max=computed,
        argmax=argmax,
        quoted_bound=2.0,
        passed=computed <= 2.0 + slack,
        grid_spec={"finite": finite.spec, "infinite": infinite.spec},
        slack=slack,
        tail_bound=tail,
        extra={"finite_max": finite.value, "infinite_max": infinite.value,
               "closure_value": annulus_area(0.0, math.inf, 0.0)},
    )


def verify_cones_infinite(resolution: int = 40, spec: QuadratureSpec | None = None,
                          threads: int = 1) -> BoundReport:
    quoted = "1.98"
    bound = 2.0 - DELTA2
    scan = _maximize(lambda p: _cone(p[0], math.inf, 0.0, p[1]), ["R", "phi"],
                     [(0.2, R_TAIL), (0.0, HALF_PI)], resolution, threads, rounds=8)
    tail = _planar_cone_tail(R_TAIL)
    precision = _quoted_precision(quoted)
    slack = scan.grid_slack + tail
    passed, discrepancy = _against_quote(scan.value, bound, slack, quoted)
    if discrepancy:
        log.warning("cones-infinite: %s", discrepancy)
    return BoundReport(
        name="cones-infinite",
        computed_max=scan.value,
        argmax={"R": scan.point[0], "phi": scan.point[1]},
        quoted_bound=bound,
        passed=passed,
        grid_spec=scan.spec,
        slack=slack,
        tail_bound=tail,
        discrepancy=discrepancy,
        extra={"boundary_value": 2.0 * math.exp(-0.01), "quoted_precision": precision,
               "vertical_limit": cylinder_area(scan.point[0], math.inf)},
    )


def verify_cone_monotonicity(R: float, phi_points: int = 50, fd_step: float = 1e-5,
                             tolerance: float = 1e-9) -> BoundReport:
    """phi -> |C(R, inf, phi)| strictly decreasing on (0, pi/2] for R <= 0.2."""
    if not 0 < R <= 0.2:
        raise DomainError("cone monotonicity is claimed for 0 < R <= 0.2")
    factor = SQRT_PI * R * math.exp(R * R / 4.0)
    phis = [HALF_PI * k / phi_points for k in range(1, phi_points + 1)]
    derivatives = []
    for phi in phis:
        if phi + fd_step <= HALF_PI:
            d = (_cone(R, math.inf, 0.0, phi + fd_step) - _cone(R, math.inf, 0.0, phi - fd_step)) \
                / (2.0 * fd_step)
        else:
            d = (3.0 * _cone(R, math.inf, 0.0, phi) - 4.0 * _cone(R, math.inf, 0.0, phi - fd_step)
                 + _cone(R, math.inf, 0.0, phi - 2.0 * fd_step)) / (2.0 * fd_step)
        derivatives.append(d)
    worst = max(derivatives)
    k = derivatives.index(worst)
    envelope = [2.0 * math.exp(-R * R / 4.0) * math.sin(p) * (-1.0 + factor) for p in phis]
    violations = [p for p, d in zip(phis, derivatives) if d >= tolerance]
    return BoundReport(
        name=f"cone-monotonicity[R={R!r}]",
        computed_max=worst,
        argmax={"phi": phis[k]},
        quoted_bound=0.0,
        passed=factor <= 0.5 and not violations,
        grid_spec={"phi_points": phi_points, "fd_step": fd_step},
        slack=tolerance,
        extra={
            "sqrt_pi_R_exp": factor,
            "factor_ok": factor <= 0.5,
            "phi": phis,
            "derivative": derivatives,
            "envelope": envelope,
            "violations": violations,
            "endpoint_value": _cone(R, math.inf, 0.0, 0.0),
            "annulus_value": annulus_area(R, math.inf, 0.0),
        },
    )


def verify_translated_cones(resolution: int = 40, spec: QuadratureSpec | None = None,
                            threads: int = 1, h_grid: Sequence[float] | None = None) -> BoundReport:
    """Translated cones: below 2 - delta2 for R > .2 and below |D(R, inf, h)| for R <= .2."""
    spec = spec or QuadratureSpec()
    quoted = "1.98"
    bound = 2.0 - DELTA2
    hs = list(h_grid) if h_grid is not None else list(np.linspace(0.0, 6.0, resolution // 2 + 1))
    rs = np.linspace(0.2, R_TAIL, resolution)
    small = np.linspace(0.0, 0.2, resolution // 4 + 2)
    phis = np.linspace(0.0, HALF_PI, resolution)
    worst, worst_at = -math.inf, {}
    lemma_excess, small_excess = -math.inf, -math.inf
    for h in hs:
        shrink = math.exp(-h * h / 4.0)
        for R in rs:
            for phi in phis:
                moved = _cone(R, math.inf, h, phi)
                lemma_excess = max(lemma_excess, moved - shrink * _cone(R, math.inf, 0.0, phi))
                if R > 0.2 and moved > worst:
                    worst, worst_at = moved, {"R": float(R), "h": float(h), "phi": float(phi)}
        for R in small:
            disk = annulus_area(R, math.inf, h)
            for phi in phis:
                small_excess = max(small_excess, _cone(R, math.inf, h, phi) - disk)
    spot = []
    for R, h, phi in ((0.3, 1.0, math.pi / 6), (0.1, 0.5, math.pi / 3), (1.0, 0.25, math.pi / 4)):
        profile = lower_to_profile(DoubledCone(R, math.inf, h, phi), spec)
        quad = profile_functional(profile, FunctionalCenter(), spec).value
        closed = _cone(R, math.inf, h, phi)
        spot.append({"R": R, "h": h, "phi": phi, "closed_form": closed, "quadrature": quad,
                     "relative_difference": abs(quad - closed) / closed})
    precision = _quoted_precision(quoted)
    slack = 1e-12
    below, discrepancy = _against_quote(worst, bound, slack, quoted)
    if discrepancy:
        log.warning("translated-cones: %s", discrepancy)
    return BoundReport(
        name="translated-cones",
        computed_max=worst,
        argmax=worst_at,
        quoted_bound=bound,
        passed=below and lemma_excess <= 1e-12 and small_excess <= 1e-12,
        grid_spec={"h": hs, "R": [0.2, R_TAIL, resolution], "phi": [0.0, HALF_PI, resolution]},
        slack=slack,
        tail_bound=_planar_cone_tail(R_TAIL),
        discrepancy=discrepancy,
        extra={"shift_excess": lemma_excess, "small_radius_excess": small_excess,
               "spot_checks": spot, "quoted_precision": precision},
    )


# ── ellipsoids and capped graphs ────────────────────────────────────────────

def verify_ellipsoids(resolution: int = 40, spec: QuadratureSpec | None = None,
                      threads: int = 1) -> list[BoundReport]:
    """sup |E(a, b)| over 0 < b <= a <= 4 against 2 - delta3, then against the quoted 1.9365.

    The first report gates. The second compares with the quoted digits and never gates.
    """
    spec = spec or QuadratureSpec()
    bound = 2.0 - DELTA3

    def value(p: tuple[float, ...]) -> float:
        a, ratio = p
        return ellipsoid_area(a, ratio * a, spec).value

    scan = _maximize(value, ["a", "b_over_a"], [(1e-3, 4.0), (1e-6, 1.0)], resolution, threads)
    closure = 2.0 * (1.0 - math.exp(-4.0))
    a, ratio = scan.point
    argmax = {"a": a, "b": ratio * a}
    slack = scan.grid_slack + 1e-10
    main = BoundReport(
        name="ellipsoids",
        computed_max=scan.value,
        argmax=argmax,
        quoted_bound=bound,
        passed=scan.value <= bound + slack,
        grid_spec=scan.spec,
        slack=slack,
        extra={"closure_b0_max": closure, "closure_b0_argmax_a": 4.0,
               "sphere_value": sphere_area(2.0)},
    )
    discrepancy = None
    if scan.value > QUOTED_ELLIPSOID_BOUND:
        discrepancy = (f"quoted bound {QUOTED_ELLIPSOID_BOUND} reads as a transposition of "
                       f"2 - {DELTA3} = {bound!r}; measured sup {scan.value!r} exceeds the quoted "
                       f"digits and approaches the b = 0 closure {closure!r}")
        log.warning("ellipsoids: %s", discrepancy)
    quoted = BoundReport(
        name="ellipsoids-quoted",
        computed_max=scan.value,
        argmax=argmax,
        quoted_bound=QUOTED_ELLIPSOID_BOUND,
        passed=scan.value <= QUOTED_ELLIPSOID_BOUND + slack,
        grid_spec=scan.spec,
        slack=slack,
        discrepancy=discrepancy,
        gating=False,
        extra={"two_minus_delta3": bound},
    )
    return [main, quoted]


def verify_capped_graphs(resolution: int = 40, spec: QuadratureSpec | None = None,
                         threads: int = 1) -> list[BoundReport]:
    """|z+_{h,a,b}| decreasing in b on [h, a] for a >= 3, hence below the b = h sheet.

    The first report gates on the e^{-h^2/4} sheet budget; the second compares with the
    quoted 1 - h^2/4 and never gates.
    """
    spec = spec or QuadratureSpec()
    a_values = np.linspace(3.0, 8.0, max(resolution // 8, 3))
    h_values = np.linspace(0.0, 1.0, max(resolution // 8, 3))
    steps = np.linspace(0.0, 1.0, resolution)
    budget_excess, budget_at = -math.inf, {}
    quoted_excess, quoted_at = -math.inf, {}
    violations = []
    err = 0.0
    for a in a_values:
        for h in h_values:
            previous = math.inf
            sheet = math.exp(-h * h / 4.0)
            for s in steps:
                b = min(h + s * (a - h), a)
                res = capped_graph_area(float(h), float(a), float(b), spec)
                err = max(err, res.error_bound)
                if res.value > previous + 1e-10:
                    violations.append({"a": float(a), "h": float(h), "b": float(b)})
                previous = res.value
                if res.value - sheet > budget_excess:
                    budget_excess = res.value - sheet
                    budget_at = {"a": float(a), "h": float(h), "b": float(b)}
                if res.value - (1.0 - h * h / 4.0) > quoted_excess:
                    quoted_excess = res.value - (1.0 - h * h / 4.0)
                    quoted_at = {"a": float(a), "h": float(h), "b": float(b)}
    slack = err + 1e-10
    grid_spec = {"a": [3.0, 8.0, len(a_values)], "h": [0.0, 1.0, len(h_values)],
                 "b_fraction": [0.0, 1.0, resolution]}
    main = BoundReport(
        name="capped-graphs",
        computed_max=budget_excess,
        argmax=budget_at,
        quoted_bound=0.0,
        passed=not violations and budget_excess <= slack,
        grid_spec=grid_spec,
        slack=slack,
        extra={"monotonicity_violations": violations[:20], "violation_count": len(violations)},
    )
    discrepancy = None
    if quoted_excess > 0:
        discrepancy = (f"|z+| exceeds 1 - h^2/4 by up to {quoted_excess:.6g} at {quoted_at}; "
                       f"the b = h sheet has area e^(-h^2/4) > 1 - h^2/4")
        log.warning("capped-graphs: %s", discrepancy)
    quoted = BoundReport(
        name="capped-graphs-quoted",
        computed_max=quoted_excess,
        argmax=quoted_at,
        quoted_bound=0.0,
        passed=quoted_excess <= slack,
        grid_spec=grid_spec,
        slack=slack,
        discrepancy=discrepancy,
        gating=False,
    )
    return [main, quoted]


# ── Gaussian volume ─────────────────────────────────────────────────────────

def verify_gaussian_volume(resolution: int = 40, spec: QuadratureSpec | None = None,
                           threads: int = 1) -> BoundReport:
    quoted = 0.5445
    total = gaussian_volume_ball(math.inf).value
    radius = half_volume_radius()
    sphere = sphere_area(radius)
    return BoundReport(
        name="gaussian-volume",
        computed_max=total,
        argmax={"R": math.inf},
        quoted_bound=quoted,
        passed=abs(total - quoted) <= 5e-4 and sphere >= 1.0,
        grid_spec={},
        extra={"quoted_tolerance": 5e-4, "half_volume_radius": radius,
               "half_volume": 0.5 * total,
               "sphere_area_at_half_radius": sphere},
    )


def _cone_monotonicity_suite(resolution: int = 40, spec: QuadratureSpec | None = None,
                             threads: int = 1) -> list[BoundReport]:
    return [verify_cone_monotonicity(R) for R in (0.05, 0.1, 0.2)]


PROPS: dict[str, Callable[..., Any]] = {
    "capped-cylinders": verify_capped_cylinders,
    "cones-finite": verify_cones_finite,
    "cones-infinite": verify_cones_infinite,
    "cone-monotonicity": _cone_monotonicity_suite,
    "translated-cones": verify_translated_cones,
    "ellipsoids": verify_ellipsoids,
    "capped-graphs": verify_capped_graphs,
    "gaussian-volume": verify_gaussian_volume,
}


def run_props(names: Sequence[str] | None = None, resolution: int = 40,
              spec: QuadratureSpec | None = None, threads: int = 1) -> list[BoundReport]:
    selected = list(names) if names else list(PROPS)
    unknown = [n for n in selected if n not in PROPS]
    if unknown:
        raise DomainError(f"unknown proposition(s): {unknown}; choose from {sorted(PROPS)}")
    reports: list[BoundReport] = []
    for name in selected:
        log.info("verifying %s at resolution %d", name, resolution)
        out = PROPS[name](resolution, spec, threads)
        reports.extend(out if isinstance(out, list) else [out])
    return reports
