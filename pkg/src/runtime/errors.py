"""Reason-coded exceptions.

Every exception carries a short ``reason`` string; report records store it next to
``passed`` so a failed check always says why it failed.
"""

from __future__ import annotations

from typing import Any


class VerificationError(Exception):
    reason = "internal"

    def to_record(self) -> dict[str, Any]:
        return {"passed": False, "reason": self.reason, "message": str(self)}


class DomainError(VerificationError, ValueError):
    reason = "domain"


class PoleError(DomainError):
    reason = "pole"


class OverflowSignal(VerificationError, OverflowError):
    reason = "overflow"


class QuadratureError(VerificationError, RuntimeError):
    """Adaptive quadrature did not reach its tolerance.

    The partial value and error estimate are kept so callers can report them.
    """

    reason = "quadrature_nonconvergence"

    def __init__(self, message: str, partial_value: float, error_estimate: float,
                 tolerance: float) -> None:
        super().__init__(message)
        self.partial_value = partial_value
        self.error_estimate = error_estimate
        self.tolerance = tolerance

    def to_record(self) -> dict[str, Any]:
        record = super().to_record()
        record.update({
            "partial_value": self.partial_value,
            "error_estimate": self.error_estimate,
            "tolerance": self.tolerance,
        })
        return record


class BracketError(VerificationError, ValueError):
    reason = "no_sign_change"


class PreconditionError(VerificationError, ValueError):
    reason = "precondition"


class InfeasibleParameters(VerificationError, RuntimeError):
    reason = "infeasible"


class UsageError(VerificationError):
    reason = "usage"
