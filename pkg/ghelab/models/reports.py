"""Report models for structure checks and convergence experiments."""

import math
from typing import Dict, List, Literal, Optional

from pydantic import BaseModel, Field

STRUCTURE_CSV_HEADER = ["check", "name", "samples", "max_defect", "threshold", "pass"]


def format_number(value: Optional[float]) -> str:
    """17 significant digits; empty for missing values."""
    if value is None:
        return ""
    return f"{value:.17g}"


class CheckResult(BaseModel):
    """One named row of a structure check."""

    check: str = Field(description="Check family, e.g. convexity")
    name: str = Field(description="Row name within the check")
    samples: int = Field(ge=0, description="Number of evaluated samples")
    max_defect: float = Field(description="Largest defect over the samples")
    threshold: float = Field(description="Largest accepted defect")
    note: str = Field(default="", description="Free-form detail for the text report")

    @property
    def passed(self) -> bool:
        """Pass iff at least one sample was evaluated and max_defect <= threshold."""
        if self.samples == 0 or math.isnan(self.max_defect):
            return False
        return self.max_defect <= self.threshold

    def to_csv_row(self) -> List[str]:
        return [
            self.check,
            self.name,
            str(self.samples),
            format_number(self.max_defect),
            format_number(self.threshold),
            "true" if self.passed else "false",
        ]


class StructureReport(BaseModel):
    """Collection of structure-check rows."""

    results: List[CheckResult] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [r for r in self.results if not r.passed]

    def add(self, result: CheckResult) -> None:
        self.results.append(result)

    def extend(self, other: "StructureReport") -> None:
        self.results.extend(other.results)

    def to_text(self) -> str:
        """Line-oriented human-readable form."""
        lines = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            line = (
                f"{status} {r.check}/{r.name}: samples={r.samples} "
                f"max_defect={r.max_defect:.6e} threshold={r.threshold:.6e}"
            )
            if r.note:
                line += f" ({r.note})"
            lines.append(line)
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


class FitResult(BaseModel):
    """Least-squares fit of log(value) against log(epsilon)."""

    quantity: str = Field(description="Fitted quantity")
    slope: Optional[float] = Field(default=None, description="Fitted order")
    intercept: Optional[float] = Field(default=None, description="Fitted log-constant")
    r_squared: Optional[float] = Field(default=None, description="Coefficient of determination")
    points: int = Field(default=0, ge=0, description="Number of points in the fit")
    expected: float = Field(description="Expected order")
    tolerance: Optional[float] = Field(
        default=None,
        description="Accepted |slope - expected|; None means slope >= expected",
    )
    status: Literal["pass", "fail", "inconclusive", "exact"] = Field(
        default="inconclusive",
        description="Outcome of the fit",
    )
    note: str = Field(default="", description="Detail for the summary")

    @property
    def passed(self) -> bool:
        return self.status in ("pass", "exact")


class EpsilonResult(BaseModel):
    """Measurements for one relaxation time."""

    epsilon: float = Field(gt=0)
    ok: bool = Field(default=True, description="False if the run aborted")
    error: Optional[str] = Field(default=None, description="Abort message")
    norms: Dict[str, float] = Field(
        default_factory=dict,
        description="Named norms, e.g. l2_error, r1, heat_defect",
    )
    under_resolved: bool = Field(default=False, description="Spatial guard tripped")
    steps: int = Field(default=0, ge=0, description="Solver steps taken")


class ConvergenceReport(BaseModel):
    """Outcome of an epsilon sweep."""

    experiment: Literal["converge", "maxwell", "residual"] = Field(description="Experiment kind")
    epsilons: List[float] = Field(description="Relaxation times in the sweep")
    n_cells: int = Field(gt=0, description="Grid size of the relaxation runs")
    t_end: float = Field(ge=0, description="Final time")
    runs: List[EpsilonResult] = Field(default_factory=list)
    fits: List[FitResult] = Field(default_factory=list)
    flags: Dict[str, bool] = Field(default_factory=dict, description="Named pass flags")
    notes: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.flags) and all(self.flags.values())

    @property
    def successful_runs(self) -> List[EpsilonResult]:
        return [r for r in self.runs if r.ok]

    def fit(self, quantity: str) -> Optional[FitResult]:
        for f in self.fits:
            if f.quantity == quantity:
                return f
        return None
