"""Adaptive quadrature wrapper around scipy.integrate.quad.

quad's own error estimate is returned with the value; a run that ends with a
warning and an estimate above the requested tolerance raises QuadratureError
carrying the partial value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from scipy import integrate

from runtime.errors import DomainError, QuadratureError


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-11
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    truncation_threshold: float = 1e-18

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be positive")
        if not 0 < self.truncation_threshold < 1:
            raise DomainError("truncation_threshold must lie in (0, 1)")

    def truncation_radius(self, tau: float = 1.0) -> float:
        """Distance past which exp(-d^2/(4 tau)) drops below the threshold."""
        return 2.0 * math.sqrt(tau * math.log(1.0 / self.truncation_threshold))

    def tolerance_for(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float


def integrate_1d(func: Callable[[float], float], lo: float, hi: float,
                 spec: QuadratureSpec,
                 points: Sequence[float] | None = None) -> QuadratureResult:
    if hi <= lo:
        return QuadratureResult(0.0, 0.0)
    kwargs = {
        "epsabs": spec.abs_tol,
        "epsrel": spec.rel_tol,
        "limit": spec.max_subdivisions,
        "full_output": 1,
    }
    inner = [p for p in (points or ()) if lo < p < hi]
    if inner and math.isfinite(lo) and math.isfinite(hi):
        kwargs["points"] = sorted(set(inner))
    out = integrate.quad(func, lo, hi, **kwargs)
    value, error = float(out[0]), float(out[1])
    if len(out) > 3 and error > spec.tolerance_for(value):
        raise QuadratureError(
            f"quad did not converge on [{lo}, {hi}]: {out[3]}",
            partial_value=value,
            error_estimate=error,
            tolerance=spec.tolerance_for(value),
        )
    return QuadratureResult(value, error)
