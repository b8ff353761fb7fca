"""Exception types shared across the toolkit."""

from typing import Optional


class HPlanarError(Exception):
    """Base class for toolkit errors."""


class InputError(HPlanarError, ValueError):
    """Malformed graph, formula or certificate input."""


class PreconditionError(HPlanarError, ValueError):
    """A documented precondition of an operation does not hold."""


class MissingSolverError(PreconditionError):
    """The target class lacks a sub-solver the operation needs."""


class CeilingExceeded(HPlanarError):
    """An exponential routine refused an input above its configured size ceiling."""

    def __init__(self, routine: str, size: int, ceiling: Optional[int]):
        self.routine = routine
        self.size = size
        self.ceiling = ceiling
        super().__init__(f"{routine}: size {size} exceeds ceiling {ceiling}")


class OracleFault(HPlanarError):
    """A decision oracle answered inconsistently during self-reduction."""


class ContractViolation(HPlanarError):
    """An internal bound or invariant was breached."""


def check_ceiling(routine: str, size: int, ceiling: Optional[int]) -> None:
    """Raise CeilingExceeded when size is above a non-None ceiling."""
    if ceiling is not None and size > ceiling:
        raise CeilingExceeded(routine, size, ceiling)
