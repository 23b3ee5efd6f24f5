"""Run every structure check and collect the rows in a fixed order."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

from ..models.params import ModelParams
from ..models.reports import StructureReport
from ..solvers.ghe import ImexConfig, equilibrium_field, run
from ..solvers.grid import Grid1D
from ..solvers.initial import smooth_wave
from .checks import (
    check_concavity_lemmas,
    check_convexity,
    check_dissipation,
    check_entropy_production,
    check_equilibrium_blocks,
    check_hyperbolicity,
    check_symmetrizer,
)
from .sampling import StateSampler

logger = logging.getLogger(__name__)

Task = Tuple[str, Callable[[], StructureReport]]


def solver_entropy_check(
    params: ModelParams,
    n_cells: int = 64,
    t_end: float = 0.05,
) -> StructureReport:
    """Entropy production along a short first-order run on the smooth wave."""
    params = params.with_dim(1)
    grid = Grid1D(n_cells=n_cells)
    config = ImexConfig(t_end=t_end, reconstruction="constant")
    initial = equilibrium_field(smooth_wave(grid, params))
    trajectory = run(initial, params, config, snapshot_times=[0.0, 0.5 * t_end, t_end])
    return check_entropy_production(trajectory, params)


def build_tasks(
    params: ModelParams,
    dims: Sequence[int],
    samples: int,
    seed: int,
    budget: Optional[int] = None,
    concavity_trials: int = 10_000,
    solver_check: bool = True,
) -> List[Task]:
    """List the checks in report order.

    Every task owns its sampler, seeded from (seed, dim, position), so the
    rows do not depend on how tasks are scheduled.
    """
    tasks: List[Task] = []
    for d in dims:
        p = params.with_dim(d)

        def sampler(position: int, p: ModelParams = p, d: int = d) -> StateSampler:
            return StateSampler(p, seed=seed + 1000 * d + position, budget=budget)

        tasks.append((f"convexity_d{d}",
                      lambda p=p, s=sampler: check_convexity(s(0), p, samples)))
        tasks.append((f"symmetrizer_d{d}",
                      lambda p=p, s=sampler: check_symmetrizer(s(1), p, samples)))
        for j in range(d):
            tasks.append((f"hyperbolicity_d{d}_x{j}",
                          lambda p=p, s=sampler, j=j: check_hyperbolicity(s(2 + j), p, j, samples)))
        tasks.append((f"equilibrium_blocks_d{d}",
                      lambda p=p, s=sampler: check_equilibrium_blocks(s(5), p, samples)))
        tasks.append((f"dissipation_d{d}",
                      lambda p=p, s=sampler: check_dissipation(s(6), p, samples)))

    tasks.append(("concavity",
                  lambda: check_concavity_lemmas(params, concavity_trials, seed)))
    if solver_check:
        tasks.append(("entropy_production_run", lambda: solver_entropy_check(params)))
    return tasks


def run_structure_suite(
    params: ModelParams,
    dims: Sequence[int] = (1, 2, 3),
    samples: int = 100,
    seed: int = 0,
    threads: int = 1,
    budget: Optional[int] = None,
    concavity_trials: int = 10_000,
    solver_check: bool = True,
) -> StructureReport:
    """Run all checks for each dimension.

    Args:
        params: Model parameters (dim is overridden per entry of dims)
        dims: Spatial dimensions to check
        samples: States per check
        seed: Base seed of the samplers
        threads: Worker threads; results are identical for any value
        budget: Per-sampler state budget (unbounded when None)
        concavity_trials: Pairs per midpoint-concavity witness
        solver_check: Include the short solver run

    Returns:
        StructureReport with rows in task order
    """
    tasks = build_tasks(params, dims, samples, seed, budget, concavity_trials, solver_check)
    logger.info(f"Running {len(tasks)} structure checks on {threads} thread(s)")

    def execute(task: Task) -> StructureReport:
        name, func = task
        report = func()
        status = "passed" if report.passed else "FAILED"
        logger.info(f"Structure check {name} {status} ({len(report.results)} rows)")
        return report

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            parts = list(executor.map(execute, tasks))
    else:
        parts = [execute(task) for task in tasks]

    report = StructureReport()
    for part in parts:
        report.extend(part)
    logger.info(
        f"Structure suite: {len(report.results)} rows, {len(report.failures)} failures"
    )
    return report
