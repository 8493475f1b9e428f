"""Radial Jacobi fields of the plane and the spherical comparison.

On H the stability operator acting on radial functions is

    phi'' + (1/r - r/2) phi' + phi/2 = 0,

which under xi = r^2/4 becomes Kummer's equation with a = -1/2, b = 1. The
regular solution is phi1 = M(-1/2, 1, xi) and the singular one phi2 = U(-1/2, 1, xi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy import integrate, special

from numerics.search import ZeroBracket, bisect_bracket, map_ordered
from numerics.special_functions import (
    SQRT_PI,
    kummer_m,
    kummer_m_derivative,
    tricomi_u_half,
    tricomi_u_half_derivative,
)
from runtime.errors import BracketError, DomainError, VerificationError
from runtime.logs import get_logger

log = get_logger("jacobi")

A, B = -0.5, 1.0
R_MAX = 8.0
FD_STEP = 1e-5
TINY_R = 1e-6
LEGENDRE_DEGREE = (-1.0 + math.sqrt(17.0)) / 2.0
SPHERE_START = 1e-3


@dataclass(frozen=True)
class JacobiSolution:
    """phi1, phi2 or phi_lambda = phi2 + lambda phi1, with radial derivatives."""

    kind: str
    lam: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("phi1", "phi2", "combination"):
            raise DomainError(f"unknown Jacobi solution {self.kind!r}")
        if not math.isfinite(self.lam):
            raise DomainError("lambda must be finite")

    @classmethod
    def combination(cls, lam: float) -> "JacobiSolution":
        return cls("combination", lam)

    def _parts(self) -> tuple[float, float]:
        if self.kind == "phi1":
            return 1.0, 0.0
        if self.kind == "phi2":
            return 0.0, 1.0
        return self.lam, 1.0

    def xi_derivative(self, xi: float, order: int = 0) -> float:
        """d^k/dxi^k in the Kummer variable."""
        c1, c2 = self._parts()
        total = 0.0
        if c1:
            m = kummer_m(A, B, xi) if order == 0 else kummer_m_derivative(A, B, xi, order)
            total += c1 * m.value
        if c2:
            if xi <= 0:
                raise DomainError("phi2 is singular at r = 0")
            u = tricomi_u_half(xi) if order == 0 else tricomi_u_half_derivative(xi, order)
            total += c2 * u.value
        return total

    def __call__(self, r: float) -> float:
        return self.xi_derivative(r * r / 4.0)

    def derivative(self, r: float, order: int = 1) -> float:
        xi = r * r / 4.0
        d1 = self.xi_derivative(xi, 1)
        if order == 1:
            return 0.5 * r * d1
        if order == 2:
            return 0.25 * r * r * self.xi_derivative(xi, 2) + 0.5 * d1
        raise DomainError("derivative order must be 1 or 2")


PHI1 = JacobiSolution("phi1")
PHI2 = JacobiSolution("phi2")


def _check_r(r: float) -> None:
    if not 0 < r <= R_MAX:
        raise DomainError(f"r must lie in (0, {R_MAX}], got {r}")


def stability_residual(sol: JacobiSolution, r: float) -> float:
    """|phi'' + (1/r - r/2) phi' + phi/2| from the analytic derivatives."""
    _check_r(r)
    return abs(sol.derivative(r, 2) + (1.0 / r - r / 2.0) * sol.derivative(r, 1) + sol(r) / 2.0)


def kummer_residual(sol: JacobiSolution, r: float) -> float:
    """|xi phi_xixi + (1 - xi) phi_xi + phi/2| at xi = r^2/4."""
    _check_r(r)
    xi = r * r / 4.0
    return abs(xi * sol.xi_derivative(xi, 2) + (1.0 - xi) * sol.xi_derivative(xi, 1)
               + sol.xi_derivative(xi) / 2.0)


def _richardson(estimate: Callable[[float], float], h: float) -> float:
    return (4.0 * estimate(h / 2.0) - estimate(h)) / 3.0


def fd_residual(sol: JacobiSolution, r: float, h: float = FD_STEP) -> float:
    """Same residual with Richardson-extrapolated central differences."""
    _check_r(r)
    if r <= h:
        raise DomainError("finite differences need r > h")
    d1 = _richardson(lambda s: (sol(r + s) - sol(r - s)) / (2.0 * s), h)
    d2 = _richardson(lambda s: (sol(r + s) - 2.0 * sol(r) + sol(r - s)) / (s * s), h)
    return abs(d2 + (1.0 / r - r / 2.0) * d1 + sol(r) / 2.0)


def residual_scale(sol: JacobiSolution, r: float) -> float:
    return max(1.0, abs(sol(r)), abs(sol.derivative(r, 1)), abs(sol.derivative(r, 2)))


def find_zero(func: Callable[[float], float], lo: float, hi: float,
              width: float = 1e-12) -> ZeroBracket:
    return bisect_bracket(func, lo, hi, width=width)


def wronskian(xi: float) -> tuple[float, float]:
    """(M U' - M' U, its closed form e^xi / (2 sqrt(pi) xi))."""
    m = kummer_m(A, B, xi).value
    dm = kummer_m_derivative(A, B, xi, 1).value
    u = tricomi_u_half(xi).value
    du = tricomi_u_half_derivative(xi, 1).value
    return m * du - dm * u, math.exp(xi) / (2.0 * SQRT_PI * xi)


def phi1_asymptotic(r: float, terms: bool = True) -> float:
    """-4 r^-3 e^{r^2/4}/sqrt(pi), optionally times the series summed to its smallest term."""
    xi = r * r / 4.0
    lead = -4.0 * math.exp(xi) / (r ** 3 * SQRT_PI)
    if not terms:
        return lead
    # sum (b-a)_k (1-a)_k / k! xi^-k with b - a = 1 - a = 3/2
    total, term, k = 1.0, 1.0, 0
    while True:
        nxt = term * (1.5 + k) ** 2 / ((k + 1) * xi)
        if abs(nxt) >= abs(term):
            break
        term = nxt
        total += term
        k += 1
    return lead * total


@dataclass(frozen=True)
class JacobiReport:
    name: str
    passed: bool
    values: dict[str, Any] = field(default_factory=dict)
    violations: tuple[Any, ...] = ()
    note: str | None = None

    def to_record(self) -> dict[str, Any]:
        return {"name": self.name, "passed": self.passed, "values": self.values,
                "violations": list(self.violations[:50]), "violation_count": len(self.violations),
                "note": self.note}


def phi1_zero() -> ZeroBracket:
    return find_zero(PHI1, 0.1, 6.0)


def phi2_zero(r1: float | None = None) -> ZeroBracket:
    r1 = r1 if r1 is not None else phi1_zero().root
    return find_zero(PHI2, 1e-3, r1)


def verify_residuals(r_grid: Sequence[float] | None = None, tolerance: float = 1e-9) -> JacobiReport:
    grid = np.linspace(0.05, 6.0, 200) if r_grid is None else np.asarray(r_grid, dtype=float)
    worst: dict[str, float] = {}
    violations = []
    mismatched = []
    for sol in (PHI1, PHI2):
        polar = [stability_residual(sol, float(r)) for r in grid]
        kummer = [kummer_residual(sol, float(r)) for r in grid]
        worst[sol.kind] = max(polar)
        worst[f"{sol.kind}_kummer"] = max(kummer)
        for r, p, k in zip(grid, polar, kummer):
            if p >= tolerance:
                violations.append({"solution": sol.kind, "r": float(r), "residual": p})
            if (p < tolerance) != (k < tolerance):
                mismatched.append(float(r))
    fd = {}
    for sol in (PHI1, PHI2, JacobiSolution.combination(3.0)):
        rel = max(fd_residual(sol, r) / residual_scale(sol, r) for r in (0.5, 1.0, 2.0, 4.0))
        fd[sol.kind if sol.kind != "combination" else "lambda=3"] = rel
    fd_ok = all(v < 1e-4 for v in fd.values())
    return JacobiReport("residuals", not violations and not mismatched and fd_ok,
                        {"max_residual": worst, "tolerance": tolerance, "fd_relative": fd,
                         "form_mismatch": mismatched}, tuple(violations))


def verify_zeros() -> JacobiReport:
    r1 = phi1_zero()
    r2 = phi2_zero(r1.root)
    xi1 = r1.root ** 2 / 4.0
    ok = r2.root < r1.root and r1.width <= 1e-10 and r2.width <= 1e-10 and 1.5 < xi1 < 1.7
    return JacobiReport("zeros", ok, {
        "r1": {"lo": r1.lo, "hi": r1.hi, "root": r1.root, "residual": r1.residual},
        "r2": {"lo": r2.lo, "hi": r2.hi, "root": r2.root, "residual": r2.residual},
        "xi1": xi1,
    })


def verify_phi1_shape(points: int = 2000) -> JacobiReport:
    r1 = phi1_zero().root
    grid = np.linspace((r1 + 2.0) / points, r1 + 2.0, points)
    violations = []
    for r in grid:
        d1, d2 = PHI1.derivative(float(r), 1), PHI1.derivative(float(r), 2)
        if not (d1 < 0 and d2 < 0):
            violations.append({"r": float(r), "d1": d1, "d2": d2})
    at8 = PHI1(8.0)
    leading = at8 / phi1_asymptotic(8.0, terms=False)
    series = at8 / phi1_asymptotic(8.0)
    ok = PHI1(0.0) == 1.0 and not violations and abs(series - 1.0) <= 0.05
    return JacobiReport(
        "phi1-shape", ok,
        {"phi1_at_0": PHI1(0.0), "r1": r1, "grid_max": float(grid[-1]),
         "ratio_leading_at_8": leading, "ratio_series_at_8": series},
        tuple(violations),
        note=(f"leading term alone is off by {abs(leading - 1.0):.1%} at r = 8; "
              "the 5% check uses the asymptotic series")
        if abs(leading - 1.0) > 0.05 else None,
    )


def verify_phi2_shape(points: int = 10_000) -> JacobiReport:
    """Exactly one sign change of phi2 by counting, and phi2' > 0 on the same grid."""
    grid = np.linspace(1e-4, R_MAX, points)
    values = np.array([PHI2(float(r)) for r in grid])
    slopes = np.array([PHI2.derivative(float(r), 1) for r in grid])
    changes = int(np.count_nonzero(np.diff(np.sign(values)) != 0))
    not_increasing = [float(r) for r, s in zip(grid, slopes) if not s > 0]
    return JacobiReport("phi2-shape", changes == 1 and not not_increasing,
                        {"sign_changes": changes, "points": points},
                        tuple(not_increasing))


def verify_wronskian(xi_grid: Sequence[float] | None = None, tolerance: float = 1e-8) -> JacobiReport:
    grid = np.linspace(0.5, 20.0, 80) if xi_grid is None else np.asarray(xi_grid, dtype=float)
    worst = 0.0
    violations = []
    for xi in grid:
        w, expected = wronskian(float(xi))
        rel = abs(w - expected) / expected
        # M'U - MU' is the negative of the same quantity
        swapped = -w
        worst = max(worst, rel)
        if rel >= tolerance or swapped >= 0:
            violations.append({"xi": float(xi), "W": w, "expected": expected})
    return JacobiReport("wronskian", not violations,
                        {"max_relative_error": worst, "tolerance": tolerance}, tuple(violations))


def _negative_beyond(sol: JacobiSolution, start: float, stop: float = 40.0,
                     step: float = 0.05) -> float | None:
    r = start
    while r <= stop:
        if sol(r) < 0:
            return r
        r += step
    return None


def _certify(lam: float, r1: float, r2: float) -> dict[str, Any]:
    sol = JacobiSolution.combination(lam)
    positive_at = r1
    positive = sol(r1)
    if lam <= 0:
        negative_at = r2 / 2.0
    else:
        negative_at = _negative_beyond(sol, r1 + 0.01)
    negative = sol(negative_at) if negative_at is not None else None
    tiny = sol(TINY_R)
    return {
        "lambda": lam,
        "positive_r": positive_at, "positive_value": positive,
        "negative_r": negative_at, "negative_value": negative,
        "tiny_r_value": tiny, "tiny_r_negative": tiny < 0,
        "certified": positive > 0 and negative is not None and negative < 0,
    }


def lambda_grid(points: int = 201, span: float = 1e6) -> list[float]:
    """0 together with +-logspace(-6, log10(span)), log-symmetric."""
    half = max(1, (points - 1) // 2)
    mags = np.logspace(-6.0, math.log10(span), half)
    return sorted([0.0] + [float(m) for m in mags] + [-float(m) for m in mags])


def verify_no_positive_radial(lambdas: Sequence[float] | None = None,
                              threads: int = 1) -> JacobiReport:
    """Every phi_lambda and every pure multiple of phi1, phi2 takes both signs."""
    lambdas = lambda_grid() if lambdas is None else list(lambdas)
    if not lambdas or not all(math.isfinite(x) for x in lambdas):
        raise DomainError("lambda grid must be finite and nonempty")
    r1 = phi1_zero().root
    r2 = phi2_zero(r1).root
    rows = map_ordered(lambda lam: _certify(float(lam), r1, r2), lambdas, threads)
    failed = [row["lambda"] for row in rows if not row["certified"]]
    pure = {
        "phi1": PHI1(r1 / 2.0) > 0 > PHI1(r1 + 0.5),
        "phi2": PHI2(r2 / 2.0) < 0 < PHI2(r1),
    }
    tiny_limit = max((abs(row["lambda"]) for row in rows if row["tiny_r_negative"]
                      and row["lambda"] > 0), default=0.0)
    if failed:
        log.error("no sign certificate for lambda = %s", failed[:5])
    return JacobiReport(
        "no-positive-radial", not failed and all(pure.values()),
        {"r1": r1, "r2": r2, "phi2_at_r1": PHI2(r1), "pure_multiples": pure,
         "lambda_count": len(rows), "tiny_r": TINY_R,
         "tiny_r_certifies_up_to": tiny_limit, "rows": rows},
        tuple(failed),
        note=(f"evaluation at r = {TINY_R:g} is negative only for lambda up to "
              f"about {tiny_limit:.3g}; larger lambda use a witness beyond r1"),
    )


# ── sphere comparison ───────────────────────────────────────────────────────

def legendre_profile(phi: float) -> float:
    """P_nu(cos phi) with nu(nu + 1) = 4, as 2F1(-nu, nu + 1; 1; sin^2(phi/2))."""
    x = math.sin(phi / 2.0) ** 2
    return float(special.hyp2f1(-LEGENDRE_DEGREE, LEGENDRE_DEGREE + 1.0, 1.0, x))


def _series_start(phi: float) -> tuple[float, float]:
    # J = 1 - phi^2 + 5 phi^4 / 24 + O(phi^6) for J'' + cot(phi) J' + 4J = 0, J(0) = 1
    return 1.0 - phi ** 2 + 5.0 * phi ** 4 / 24.0, -2.0 * phi + 5.0 * phi ** 3 / 6.0


def sphere_profile_first_zero(rtol: float = 1e-12, atol: float = 1e-14) -> ZeroBracket:
    """First zero of the axially symmetric J with Delta J + 4J = 0 on the unit sphere."""

    def rhs(phi: float, y: np.ndarray) -> list[float]:
        return [y[1], -math.cos(phi) / math.sin(phi) * y[1] - 4.0 * y[0]]

    def crossing(phi: float, y: np.ndarray) -> float:
        return y[0]

    crossing.terminal = True
    crossing.direction = -1
    sol = integrate.solve_ivp(rhs, (SPHERE_START, math.pi - SPHERE_START),
                              list(_series_start(SPHERE_START)), method="DOP853",
                              rtol=rtol, atol=atol, events=crossing)
    if sol.status == -1 or not len(sol.t_events[0]):
        raise VerificationError(f"sphere profile integration failed: {sol.message}")
    root = float(sol.t_events[0][0])
    try:
        oracle = bisect_bracket(legendre_profile, root - 1e-6, root + 1e-6, width=1e-13)
    except BracketError as err:
        raise VerificationError(f"Legendre oracle does not bracket {root}: {err}") from err
    lo, hi = min(oracle.lo, root), max(oracle.hi, root)
    return ZeroBracket(lo, hi, root, abs(legendre_profile(root)))


def cos_eigen_residual(points: int = 200) -> float:
    """max |f'' + cot(phi) f' + 2f| for f = cos phi."""
    worst = 0.0
    for phi in np.linspace(0.05, math.pi - 0.05, points):
        f, df, d2f = math.cos(phi), -math.sin(phi), -math.cos(phi)
        worst = max(worst, abs(d2f + math.cos(phi) / math.sin(phi) * df + 2.0 * f))
    return worst


def verify_sphere_comparison() -> JacobiReport:
    bracket = sphere_profile_first_zero()
    oracle = bisect_bracket(legendre_profile, 0.5, 1.5, width=1e-13)
    cos_res = cos_eigen_residual()
    gap = abs(bracket.root - oracle.root)
    ok = bracket.root < math.pi / 2.0 - 1e-3 and cos_res < 1e-10 and gap < 1e-10
    return JacobiReport("sphere-comparison", ok, {
        "phi0": bracket.root, "oracle_phi0": oracle.root, "difference": gap,
        "legendre_degree": LEGENDRE_DEGREE, "cos_residual": cos_res,
    })


# ── curves and suite ────────────────────────────────────────────────────────

def curves(r_grid: Sequence[float] | None = None) -> list[dict[str, float]]:
    grid = np.linspace(0.05, 6.0, 120) if r_grid is None else r_grid
    rows = []
    for r in grid:
        r = float(r)
        rows.append({"r": r, "phi1": PHI1(r), "phi2": PHI2(r),
                     "residual1": stability_residual(PHI1, r),
                     "residual2": stability_residual(PHI2, r)})
    return rows


def run_jacobi(lambda_points: int = 201, threads: int = 1) -> list[JacobiReport]:
    return [
        verify_residuals(),
        verify_zeros(),
        verify_phi1_shape(),
        verify_phi2_shape(),
        verify_wronskian(),
        verify_no_positive_radial(lambda_grid(lambda_points), threads),
        verify_sphere_comparison(),
    ]
