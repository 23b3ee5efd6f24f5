"""Exception types raised by the laboratory."""

from typing import Optional, Sequence


class DomainError(ValueError):
    """A state lies outside the admissible set."""

    def __init__(self, message: str, cell: Optional[int] = None):
        self.cell = cell
        super().__init__(message)


class NumericalAbort(RuntimeError):
    """A solver could not continue.

    Carries the diagnostics needed to locate the failure.
    """

    def __init__(
        self,
        message: str,
        step: Optional[int] = None,
        time: Optional[float] = None,
        cell: Optional[int] = None,
        state: Optional[Sequence[float]] = None,
    ):
        self.step = step
        self.time = time
        self.cell = cell
        self.state = None if state is None else [float(x) for x in state]

        details = []
        if step is not None:
            details.append(f"step={step}")
        if time is not None:
            details.append(f"t={time:.6g}")
        if cell is not None:
            details.append(f"cell={cell}")
        if self.state is not None:
            details.append("U=[" + ", ".join(f"{x:.6g}" for x in self.state) + "]")
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)


class ConvergenceError(NumericalAbort):
    """Newton iteration for the relaxation solve did not converge."""


class InsufficientDataError(ValueError):
    """Not enough points for a fit or a finite difference."""
