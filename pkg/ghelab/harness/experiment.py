"""Epsilon sweeps against a Navier-Stokes-Fourier reference.

One Experiment owns the reference runs (computed on a finer grid and
restricted for converge, on the run grid otherwise) and executes the relaxation runs, one per epsilon, on a thread
pool. Reports are assembled in epsilon order after all runs finish.
"""

import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from ..config import ExperimentConfig, RunConfig
from ..errors import DomainError, NumericalAbort
from ..models.params import ModelParams
from ..models.reports import ConvergenceReport, EpsilonResult, FitResult
from ..solvers.ghe import ImexConfig, Trajectory, run
from ..solvers.grid import Grid1D, NsfField, l2_norm, linf_norm, restrict
from ..solvers.initial import initial_condition
from ..solvers.nsf import NSF_ROWS, restrict_field, run_nsf
from .fitting import exact_result, loglog_fit, require_points
from .maxwell import maxwell_defect
from .prepare import prepare
from .residual import residual_norms

logger = logging.getLogger(__name__)

T = TypeVar("T")

DRIFT_TOL = 1e-12
ENTROPY_TOL = 1e-8
ROUNDOFF_TOL = 1e-10

CONVERGE_ORDER = (2.0, 0.3)
MAXWELL_ORDER = 2.5
RESIDUAL_I_ORDER = (2.0, 0.3)
RESIDUAL_II_ORDER = (1.0, 0.3)


class Experiment:
    """Relaxation-limit experiments on one grid and one initial condition."""

    def __init__(
        self,
        params: ModelParams,
        grid: Grid1D,
        solver: ImexConfig,
        settings: ExperimentConfig,
        initial: str = "smooth_wave",
        amplitude: float = 0.1,
        threads: int = 1,
    ):
        """Initialize the experiment.

        Args:
            params: Model parameters (epsilon is replaced per run)
            grid: Grid of the relaxation runs
            solver: Integration settings; t_end is the final time
            settings: Sweep settings
            initial: Name of the initial condition
            amplitude: Its amplitude
            threads: Worker threads for the epsilon runs
        """
        self.params = params.with_dim(1)
        self.grid = grid
        self.solver = solver
        self.settings = settings
        self.initial = initial
        self.amplitude = amplitude
        self.threads = threads

        self._references: Dict[Tuple[int, Tuple[float, ...], int], Tuple[List[NsfField], Trajectory]] = {}
        self._lock = threading.Lock()
        self._stats = {
            "ghe_runs": 0,
            "nsf_runs": 0,
            "aborted": 0,
            "steps": 0,
        }

    @classmethod
    def from_config(cls, config: RunConfig) -> "Experiment":
        return cls(
            params=config.model,
            grid=config.grid.to_grid(),
            solver=config.solver,
            settings=config.experiment,
            initial=config.initial.name,
            amplitude=config.initial.amplitude,
            threads=config.threads,
        )

    @property
    def stats(self) -> dict:
        """Get run statistics."""
        with self._lock:
            return dict(self._stats)

    def _count(self, key: str, amount: int = 1) -> None:
        with self._lock:
            self._stats[key] += amount

    @property
    def t_end(self) -> float:
        return self.solver.t_end

    def epsilons(self) -> List[float]:
        """Distinct relaxation times in descending order.

        Raises:
            InsufficientDataError: With fewer than three values
        """
        values = sorted({float(e) for e in self.settings.epsilons}, reverse=True)
        require_points(len(values), "epsilon values")
        return values

    def comparison_times(self) -> List[float]:
        """0 followed by the equally spaced comparison times up to t_end."""
        n = self.settings.snapshots
        return [0.0] + [self.t_end * k / n for k in range(1, n + 1)]

    def residual_times(self) -> List[float]:
        center = self.settings.residual_center * self.t_end
        delta = self.settings.residual_spacing * self.t_end
        return [center - delta, center, center + delta]

    def _map(self, func: Callable[[float], T], values: Sequence[float]) -> List[T]:
        if self.threads > 1 and len(values) > 1:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                return list(executor.map(func, values))
        return [func(v) for v in values]

    def reference(
        self,
        n_cells: int,
        times: Sequence[float],
        refinement: Optional[int] = None,
    ) -> Tuple[List[NsfField], Trajectory]:
        """Reference snapshots on an n_cells grid at the given times.

        The run uses `refinement` times more cells (nsf_refinement by
        default) and is restricted; results are cached per
        (n_cells, times, refinement).
        """
        factor = self.settings.nsf_refinement if refinement is None else refinement
        key = (n_cells, tuple(float(t) for t in times), factor)
        with self._lock:
            cached = self._references.get(key)
        if cached is not None:
            return cached

        fine_grid = Grid1D(n_cells=n_cells * factor, length=self.grid.length)
        initial = initial_condition(self.initial, fine_grid, self.params, self.amplitude)
        config = self.solver.model_copy(update={"t_end": max(times)})
        logger.info(f"Reference run: {fine_grid.n_cells} cells restricted to {n_cells}")
        trajectory = run_nsf(initial, self.params, config, snapshot_times=times)
        self._count("nsf_runs")

        snapshots = [
            restrict_field(trajectory.snapshot_at(t), factor) if factor > 1
            else trajectory.snapshot_at(t)
            for t in times
        ]
        with self._lock:
            self._references[key] = (snapshots, trajectory)
        return snapshots, trajectory

    def run_relaxation(self, epsilon: float, reference: Sequence[NsfField]) -> Trajectory:
        """Generalized run from the prepared first reference snapshot."""
        params = self.params.with_epsilon(epsilon)
        start = reference[0]
        data = prepare(start, epsilon, params, well_prepared=self.settings.well_prepared)
        times = [snap.t for snap in reference]
        config = self.solver.model_copy(update={"t_end": max(times)})
        trajectory = run(data.field, params, config, snapshot_times=times)
        self._count("ghe_runs")
        self._count("steps", trajectory.steps)
        return trajectory

    def _guarded(self, epsilon: float, build: Callable[[EpsilonResult], None]) -> EpsilonResult:
        result = EpsilonResult(epsilon=epsilon)
        try:
            build(result)
        except (NumericalAbort, DomainError) as e:
            result.ok = False
            result.error = str(e)
            self._count("aborted")
            logger.error(f"eps={epsilon:g} failed: {e}")
        return result

    def converge(self) -> ConvergenceReport:
        """Sup-in-time error of the conserved rows against the reference.

        Raises:
            InsufficientDataError: With fewer than three epsilon values
        """
        epsilons = self.epsilons()
        times = self.comparison_times()
        reference, ref_traj = self.reference(self.grid.n_cells, times)
        guard = self.settings.spatial_guard
        half_reference: Optional[List[NsfField]] = None
        half_traj: Optional[Trajectory] = None
        if guard:
            if self.grid.n_cells % 2:
                raise ValueError("the spatial guard needs an even number of cells")
            half_reference, half_traj = self.reference(self.grid.n_cells // 2, times)

        dx = self.grid.dx
        order = self.solver.order

        def measure(epsilon: float) -> EpsilonResult:
            def build(result: EpsilonResult) -> None:
                trajectory = self.run_relaxation(epsilon, reference)
                gaps = [
                    snap.U[:, :NSF_ROWS] - ref.U
                    for snap, ref in zip(trajectory.snapshots, reference)
                    if ref.t > 0.0
                ]
                result.steps = trajectory.steps
                result.norms["l2_error"] = max(l2_norm(g, dx) for g in gaps)
                result.norms["linf_error"] = max(linf_norm(g) for g in gaps)
                _record_run(result, trajectory)

                if guard:
                    coarse = self.run_relaxation(epsilon, half_reference)
                    gap_fine = gaps[-1]
                    gap_coarse = coarse.final.U[:, :NSF_ROWS] - half_reference[-1].U
                    estimate = l2_norm(gap_coarse - restrict(gap_fine, 2), 2.0 * dx) / (2**order - 1)
                    gap = l2_norm(gap_fine, dx)
                    result.norms["spatial_error"] = estimate
                    result.norms["gap"] = gap
                    result.under_resolved = estimate > self.settings.guard_fraction * gap
                    if result.under_resolved:
                        logger.warning(
                            f"eps={epsilon:g} under-resolved: spatial error {estimate:.3e} "
                            f"exceeds {self.settings.guard_fraction:g} x gap {gap:.3e}"
                        )

            return self._guarded(epsilon, build)

        runs = self._map(measure, epsilons)
        report = ConvergenceReport(
            experiment="converge",
            epsilons=epsilons,
            n_cells=self.grid.n_cells,
            t_end=self.t_end,
            runs=runs,
        )
        ok = report.successful_runs
        xs = [r.epsilon for r in ok]
        expected, tolerance = CONVERGE_ORDER
        report.fits = [
            loglog_fit(xs, [r.norms["l2_error"] for r in ok], "l2_error", expected, tolerance),
            loglog_fit(xs, [r.norms["linf_error"] for r in ok], "linf_error", expected, tolerance),
        ]

        errors = [r.norms["l2_error"] for r in ok]
        report.flags["l2_slope"] = report.fits[0].passed
        report.flags["monotone"] = all(a > b for a, b in zip(errors, errors[1:]))
        if guard:
            report.flags["spatial_guard"] = bool(ok) and not any(r.under_resolved for r in ok)
        references = [ref_traj] + ([half_traj] if half_traj is not None else [])
        self._finish(report, references)
        if not self.settings.well_prepared:
            report.notes.append("ill-prepared data: V^II = 0 at t = 0")
        return report

    def maxwell(self) -> ConvergenceReport:
        """Defect of (q, tau) against the first Maxwell iteration at t_end.

        Raises:
            InsufficientDataError: With fewer than three epsilon values
        """
        epsilons = self.epsilons()
        times = [0.0, self.t_end]
        # defects are judged against their own discretization floor
        reference, ref_traj = self.reference(self.grid.n_cells, times, refinement=1)

        def measure(epsilon: float) -> EpsilonResult:
            def build(result: EpsilonResult) -> None:
                trajectory = self.run_relaxation(epsilon, reference)
                dt = max(trajectory.dt_history) if trajectory.dt_history else None
                defect = maxwell_defect(
                    trajectory.final,
                    self.params,
                    epsilon,
                    reference=reference[-1],
                    dt=dt,
                    splitting=self.solver.splitting,
                )
                result.steps = trajectory.steps
                result.norms.update({
                    "heat_defect": defect.heat,
                    "stress_defect": defect.stress,
                    "heat_floor": defect.heat_floor,
                    "stress_floor": defect.stress_floor,
                })
                if defect.heat_gap is not None and defect.stress_gap is not None:
                    result.norms["heat_gap"] = defect.heat_gap
                    result.norms["stress_gap"] = defect.stress_gap
                result.norms["heat_resolved"] = float(defect.resolved("heat"))
                result.norms["stress_resolved"] = float(defect.resolved("stress"))
                _record_run(result, trajectory)

            return self._guarded(epsilon, build)

        runs = self._map(measure, epsilons)
        report = ConvergenceReport(
            experiment="maxwell",
            epsilons=epsilons,
            n_cells=self.grid.n_cells,
            t_end=self.t_end,
            runs=runs,
        )
        for quantity in ("heat", "stress"):
            above = [r for r in report.successful_runs if r.norms[f"{quantity}_resolved"] > 0]
            fit = loglog_fit(
                [r.epsilon for r in above],
                [r.norms[f"{quantity}_defect"] for r in above],
                f"{quantity}_defect",
                MAXWELL_ORDER,
            )
            dropped = len(report.successful_runs) - len(above)
            if dropped:
                fit.note = (fit.note + "; " if fit.note else "") + f"{dropped} eps below 10x floor"
            report.fits.append(fit)
            report.flags[f"{quantity}_slope"] = fit.passed
        self._finish(report, [ref_traj])
        return report

    def residual(self) -> ConvergenceReport:
        """Residual orders of the normal form at the prepared data.

        Raises:
            InsufficientDataError: With fewer than three epsilon values
        """
        epsilons = self.epsilons()
        times = self.residual_times()
        # residuals are judged against their own discretization floor
        reference, ref_traj = self.reference(self.grid.n_cells, times, refinement=1)

        def measure(epsilon: float) -> EpsilonResult:
            def build(result: EpsilonResult) -> None:
                norms = residual_norms(reference, epsilon, self.params)
                result.norms.update({
                    "r1": norms.r1,
                    "r1_closure": norms.r1_closure,
                    "r1_floor": norms.r1_floor,
                    "r2": norms.r2,
                    "scale": norms.scale,
                })

            return self._guarded(epsilon, build)

        runs = self._map(measure, epsilons)
        report = ConvergenceReport(
            experiment="residual",
            epsilons=epsilons,
            n_cells=self.grid.n_cells,
            t_end=self.t_end,
            runs=runs,
        )
        ok = report.successful_runs
        xs = [r.epsilon for r in ok]
        report.fits = [
            _closure_fit(ok),
            loglog_fit(xs, [r.norms["r2"] for r in ok], "r2", *RESIDUAL_II_ORDER),
        ]
        report.flags["r1"] = report.fits[0].passed
        report.flags["r2"] = report.fits[1].passed
        self._finish(report, [ref_traj], relaxation_runs=False)
        return report

    def _finish(
        self,
        report: ConvergenceReport,
        references: Sequence[Trajectory],
        relaxation_runs: bool = True,
    ) -> None:
        """Add the run-level flags shared by all experiments."""
        ok = report.successful_runs
        report.flags["all_runs"] = len(ok) == len(report.runs)
        drifts = [t.max_drift for t in references]
        increases = [t.max_entropy_increase for t in references]
        if relaxation_runs:
            drifts += [r.norms.get("drift", math.inf) for r in ok]
            increases += [r.norms.get("entropy_increase", math.inf) for r in ok]
        report.flags["conservation"] = max(drifts, default=0.0) <= DRIFT_TOL
        report.flags["entropy"] = max(increases, default=0.0) <= ENTROPY_TOL
        report.notes.append(
            f"max conserved drift {max(drifts, default=0.0):.3e}, "
            f"max entropy increase {max(increases, default=0.0):.3e}"
        )
        status = "PASS" if report.passed else "FAIL"
        logger.info(f"{report.experiment}: {len(ok)}/{len(report.runs)} runs, {status}")


def _record_run(result: EpsilonResult, trajectory: Trajectory) -> None:
    result.norms["drift"] = trajectory.max_drift
    result.norms["entropy_increase"] = trajectory.max_entropy_increase


def _closure_fit(runs: Sequence[EpsilonResult]) -> FitResult:
    """R^I vanishes to round-off with constant weights; fit only otherwise."""
    if not runs:
        return loglog_fit([], [], "r1", *RESIDUAL_I_ORDER)
    ratios = [r.norms["r1_closure"] / r.norms["scale"] for r in runs]
    worst = float(np.max(ratios))
    if worst <= ROUNDOFF_TOL:
        return exact_result("r1", RESIDUAL_I_ORDER[0], worst, ROUNDOFF_TOL, len(runs))
    return loglog_fit(
        [r.epsilon for r in runs],
        [r.norms["r1_closure"] for r in runs],
        "r1",
        *RESIDUAL_I_ORDER,
    )
