"""
Error taxonomy for the solver.

All solver failures derive from VeckinError so callers (the CLI in particular)
can map them to a single runtime-failure exit code.
"""

from typing import Any, Optional


class VeckinError(Exception):
    """Base class for solver errors"""
    pass


class ShapeError(VeckinError, ValueError):
    """Mismatched field or array shapes"""
    pass


class DomainError(VeckinError, ValueError):
    """Argument outside the domain of an operation"""
    pass


class PositivityError(VeckinError, ValueError):
    """Non-positive shallow-water depth"""
    pass


class NumericalError(VeckinError, ArithmeticError):
    """Non-finite value produced or queried"""
    pass


class BlowUpError(NumericalError):
    """
    Time integration produced an inadmissible state.

    Carries where it happened and the diagnostics recorded up to that point.
    """

    def __init__(
        self,
        message: str,
        step: int,
        time: float,
        stage: int,
        report: Optional[Any] = None,
    ):
        super().__init__(f"{message} (step={step}, t={time:.6g}, stage={stage})")
        self.step = step
        self.time = time
        self.stage = stage
        self.report = report


class ConvergenceError(VeckinError, RuntimeError):
    """Root finder did not converge"""
    pass


class UnknownCaseError(VeckinError, KeyError):
    """Case name not in the registry"""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown case"


class EocUndefinedError(VeckinError, ValueError):
    """Convergence order cannot be computed from the given rows"""
    pass


class ShockFormedError(ConvergenceError, DomainError):
    """Exact solution queried at or after shock formation, where no smooth root exists"""
    pass
