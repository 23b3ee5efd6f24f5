"""Laboratory orchestrator: one object per command-line invocation."""

import logging
from datetime import datetime
from pathlib import Path
from typing import List, Optional, Union

from .config import RunConfig, config_to_dict, get_config
from .errors import DomainError, InsufficientDataError, NumericalAbort
from .harness.experiment import DRIFT_TOL, ENTROPY_TOL, Experiment
from .harness.prepare import prepare
from .models.reports import ConvergenceReport
from .output.writers import (
    echo_config,
    write_convergence,
    write_snapshot,
    write_structure,
    write_trajectory,
)
from .solvers.ghe import run
from .solvers.initial import initial_condition
from .solvers.nsf import run_nsf
from .structure.suite import run_structure_suite
from .utils.logging import setup_logging

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_ABORT = 3

COMMANDS = ("check", "simulate", "converge", "maxwell", "residual")


class Laboratory:
    """Main laboratory class.

    Loads the configuration, prepares the output directory and dispatches
    the structure checks, single simulations and epsilon sweeps.
    """

    def __init__(self, config: Union[RunConfig, str, None] = None, raw_text: Optional[str] = None):
        """Initialize the laboratory.

        Args:
            config: RunConfig instance, path to YAML config file, or None for env/defaults
            raw_text: Original config file text to echo (read from the path if not given)
        """
        if isinstance(config, RunConfig):
            self.config = config
        elif isinstance(config, str):
            self.config = get_config(config)
            if raw_text is None:
                raw_text = Path(config).read_text()
        else:
            self.config = get_config()
        self.raw_text = raw_text

        self.experiment: Optional[Experiment] = None
        self._stats = {
            "command": None,
            "start_time": None,
            "end_time": None,
            "files_written": 0,
            "exit_code": None,
        }

    @property
    def output_dir(self) -> Path:
        return Path(self.config.output.directory)

    @property
    def stats(self) -> dict:
        """Get run statistics."""
        stats = dict(self._stats)
        if stats["start_time"] and stats["end_time"]:
            stats["elapsed"] = (stats["end_time"] - stats["start_time"]).total_seconds()
        if self.experiment is not None:
            stats.update(self.experiment.stats)
        return stats

    def _written(self, paths: List[Path]) -> None:
        self._stats["files_written"] += len(paths)
        for path in paths:
            logger.info(f"Wrote {path}")

    def prepare_output(self) -> None:
        """Create the output directory and echo the configuration into it."""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        self._written(echo_config(self.output_dir, self.raw_text, config_to_dict(self.config)))

    def run(self, command: str, model: str = "ghe") -> int:
        """Run one command and map the outcome to an exit code.

        Args:
            command: check, simulate, converge, maxwell or residual
            model: ghe or nsf (simulate only)

        Returns:
            0 pass, 1 experiment fail, 2 usage/config error, 3 numerical abort
        """
        setup_logging(
            level=self.config.logging.level,
            log_file=self.config.logging.file,
            format_string=self.config.logging.format,
            threads=self.config.threads,
        )
        self._stats["command"] = command
        self._stats["start_time"] = datetime.now()
        logger.info(f"Starting {command} (seed={self.config.seed}, threads={self.config.threads})")

        try:
            self.prepare_output()
            if command == "simulate":
                code = self.cmd_simulate(model)
            elif command in COMMANDS:
                code = getattr(self, f"cmd_{command}")()
            else:
                logger.error(f"Unknown command {command!r}")
                code = EXIT_CONFIG
        except InsufficientDataError as e:
            logger.error(f"Insufficient data: {e}")
            code = EXIT_CONFIG
        except (DomainError, NumericalAbort) as e:
            logger.error(f"Numerical abort: {e}")
            code = EXIT_ABORT
        except ValueError as e:
            logger.error(f"Configuration error: {e}")
            code = EXIT_CONFIG

        self._stats["end_time"] = datetime.now()
        self._stats["exit_code"] = code
        logger.info(f"{command} finished with exit code {code}")
        return code

    def cmd_check(self) -> int:
        """Run the structure suite; exit 0 iff every row passes."""
        s = self.config.structure
        report = run_structure_suite(
            self.config.model,
            dims=s.dims,
            samples=s.samples,
            seed=self.config.seed,
            threads=self.config.threads,
            budget=s.budget,
            concavity_trials=s.concavity_trials,
            solver_check=s.solver_check,
        )
        self._written(write_structure(self.output_dir, report))
        for row in report.failures:
            logger.warning(f"Structure row failed: {row.check}/{row.name} ({row.max_defect:.3e})")
        return EXIT_PASS if report.passed else EXIT_FAIL

    def cmd_simulate(self, model: str = "ghe") -> int:
        """One generalized or Navier-Stokes-Fourier run with snapshot CSVs.

        The generalized run starts from the prepared closure data at the
        configured epsilon (or from V^II = 0 when well_prepared is off).
        """
        if model not in ("ghe", "nsf"):
            raise ValueError(f"model must be ghe or nsf, got {model!r}")

        params = self.config.model.with_dim(1)
        solver = self.config.solver
        grid = self.config.grid.to_grid()
        start = initial_condition(self.config.initial.name, grid, params, self.config.initial.amplitude)
        times = self.config.output.snapshot_times or [0.0, solver.t_end]

        if model == "nsf":
            trajectory = run_nsf(start, params, solver, snapshot_times=times)
        else:
            data = prepare(start, params.epsilon, params, self.config.experiment.well_prepared)
            trajectory = run(data.field, params, solver, snapshot_times=times)

        paths = [
            write_snapshot(self.output_dir / f"snapshot_{i:04d}.csv", snap, params)
            for i, snap in enumerate(trajectory.snapshots)
        ]
        paths.append(write_trajectory(self.output_dir / "trajectory.csv", trajectory))
        self._written(paths)

        if trajectory.max_drift > DRIFT_TOL:
            logger.warning(f"Conserved totals drifted by {trajectory.max_drift:.3e} in one step")
        if trajectory.max_entropy_increase > ENTROPY_TOL:
            logger.warning(f"Total entropy increased by {trajectory.max_entropy_increase:.3e} in one step")
        logger.info(f"{model.upper()} run completed in {trajectory.steps} steps")
        return EXIT_PASS

    def cmd_experiment(self, kind: str) -> int:
        """converge, maxwell or residual; exit 0 iff every flag passes."""
        self.experiment = Experiment.from_config(self.config)
        report: ConvergenceReport = getattr(self.experiment, kind)()
        self._written(write_convergence(self.output_dir, report))
        return EXIT_PASS if report.passed else EXIT_FAIL

    def cmd_converge(self) -> int:
        return self.cmd_experiment("converge")

    def cmd_maxwell(self) -> int:
        return self.cmd_experiment("maxwell")

    def cmd_residual(self) -> int:
        return self.cmd_experiment("residual")
