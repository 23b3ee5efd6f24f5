"""Finite-volume IMEX integrator for the scaled generalized system in 1D.

One step is a Strang splitting: half a relaxation step with the conserved
rows frozen, a full explicit flux step with the Rusanov flux on
F + G/eps, and another half relaxation step.

The etd splitting instead integrates the linear decay of the dissipative
rows exactly and treats the flux terms with exponential time differencing.
Its discrete fixed point matches the stiff balance of flux and source.
"""

import logging
from typing import Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydanticField

from ..errors import DomainError, NumericalAbort
from ..models.layout import get_layout
from ..models.params import ModelParams
from ..system.dissipation import relax_exact, relax_newton, relaxation_rates
from ..system.fluxes import total_flux
from ..system.speeds import max_speed
from ..thermo.entropy import admissible_mask, eta, primitives
from .grid import Field, NsfField
from .numerics import advance, flux_difference, reconstruct, rusanov_flux

logger = logging.getLogger(__name__)


class ImexConfig(BaseModel):
    """Time-integration settings shared by both solvers."""

    model_config = ConfigDict(extra="forbid")

    cfl: float = PydanticField(
        default=0.45,
        gt=0,
        lt=1,
        description="Courant number"
    )
    t_end: float = PydanticField(
        default=0.2,
        ge=0,
        description="Final time"
    )
    reconstruction: Literal["constant", "linear"] = PydanticField(
        default="linear",
        description="constant (first-order Rusanov) or linear (MUSCL + SSP-RK2)"
    )
    limiter: bool = PydanticField(
        default=False,
        description="Apply minmod slopes in linear reconstruction"
    )
    relaxation: Literal["exact", "newton"] = PydanticField(
        default="exact",
        description="exact (closed-form decay) or newton (backward Euler)"
    )
    splitting: Literal["strang", "etd"] = PydanticField(
        default="strang",
        description="strang (relax, flux, relax) or etd (exponential time differencing)"
    )
    source_tol: float = PydanticField(
        default=1e-12,
        gt=0,
        description="Newton tolerance of the relaxation solve"
    )
    max_newton: int = PydanticField(
        default=50,
        ge=1,
        description="Maximum Newton iterations"
    )
    fixed_dt: Optional[float] = PydanticField(
        default=None,
        gt=0,
        description="Use this time step instead of the CFL step"
    )
    max_steps: int = PydanticField(
        default=5_000_000,
        ge=1,
        description="Abort after this many steps"
    )
    log_every: int = PydanticField(
        default=1000,
        ge=1,
        description="Progress log interval in steps"
    )
    compact_rho: Tuple[float, float] = PydanticField(
        default=(0.1, 10.0),
        description="Density bounds of the admissible window"
    )
    compact_u: Tuple[float, float] = PydanticField(
        default=(0.1, 10.0),
        description="Internal-energy bounds of the admissible window"
    )

    @property
    def order(self) -> int:
        """Formal spatial order of the scheme."""
        return 1 if self.reconstruction == "constant" else 2


class Trajectory(BaseModel):
    """Snapshots and per-step diagnostics of a run."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    snapshots: List[object] = PydanticField(default_factory=list)
    times: List[float] = PydanticField(default_factory=list)
    step_times: List[float] = PydanticField(default_factory=list)
    dt_history: List[float] = PydanticField(default_factory=list)
    speed_history: List[float] = PydanticField(default_factory=list)
    entropy_history: List[float] = PydanticField(default_factory=list)
    totals_history: List[List[float]] = PydanticField(default_factory=list)
    steps: int = 0
    max_drift: float = 0.0
    max_entropy_increase: float = 0.0
    compact_exit_time: Optional[float] = None

    @property
    def final(self):
        return self.snapshots[-1]

    def snapshot_at(self, t: float, tol: float = 1e-12):
        """Snapshot whose time matches t."""
        for time, snap in zip(self.times, self.snapshots):
            if abs(time - t) <= tol * max(1.0, abs(t)):
                return snap
        raise KeyError(f"No snapshot at t={t}")


def check_interfaces(left: np.ndarray, right: np.ndarray, conserved_rows: int) -> None:
    """Raise DomainError naming the first interface with an inadmissible state."""
    bad = ~(admissible_mask(left, conserved_rows) & admissible_mask(right, conserved_rows))
    if np.any(bad):
        cell = int(np.flatnonzero(bad)[0])
        raise DomainError(f"Inadmissible reconstruction at interface {cell}+1/2", cell=cell)


def abort_from(
    error: DomainError,
    U: np.ndarray,
    conserved_rows: int,
    step: int,
    t: float,
) -> NumericalAbort:
    """NumericalAbort with the diagnostics of the first offending cell."""
    cell = error.cell
    if cell is None:
        bad = np.flatnonzero(~admissible_mask(U, conserved_rows))
        cell = int(bad[0]) if bad.size else None
    message = f"Inadmissible state: {error}"
    state = U[cell] if cell is not None else None
    logger.error(f"{message} at step {step}, t={t:.6g}, cell={cell}")
    return NumericalAbort(message, step=step, time=t, cell=cell, state=state)


def stable_dt(field: Field, params: ModelParams, config: ImexConfig) -> Tuple[float, float]:
    """CFL time step and the largest characteristic speed.

    Returns:
        Tuple (dt, max speed)
    """
    speed = float(np.max(max_speed(field.U, params)))
    if config.fixed_dt is not None:
        return config.fixed_dt, speed
    return config.cfl * field.grid.dx / speed, speed


def hyperbolic_rhs(U: np.ndarray, dx: float, params: ModelParams, config: ImexConfig) -> np.ndarray:
    """-(dF/dx + (1/eps) dG/dx) by conservative Rusanov flux differencing."""
    left, right = reconstruct(U, config.reconstruction, config.limiter)
    check_interfaces(left, right, get_layout(1).n_conserved)
    interface = rusanov_flux(
        left,
        right,
        lambda X: total_flux(X, params),
        lambda X: max_speed(X, params),
    )
    return flux_difference(interface, dx)


def relax(U: np.ndarray, h: float, params: ModelParams, config: ImexConfig) -> np.ndarray:
    """Relaxation substep over time h with the conserved rows frozen."""
    if config.relaxation == "newton":
        return relax_newton(U, h, params, tol=config.source_tol, max_iter=config.max_newton)
    return relax_exact(U, h, params)


PHI_SERIES_CUTOFF = 1e-3


def phi_functions(z: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """exp(-z), (1 - exp(-z))/z and (exp(-z) - 1 + z)/z^2 for z >= 0.

    Small z use truncated Taylor series, which keeps z = 0 (conserved rows)
    exact: phi1 = 1 and phi2 = 1/2.
    """
    z = np.asarray(z, dtype=float)
    small = z < PHI_SERIES_CUTOFF
    safe = np.where(small, 1.0, z)
    em1 = np.expm1(-safe)
    phi0 = np.exp(-z)
    phi1 = np.where(small, 1.0 - z / 2.0 + z * z / 6.0, -em1 / safe)
    phi2 = np.where(small, 0.5 - z / 6.0 + z * z / 24.0, (em1 + safe) / (safe * safe))
    return phi0, phi1, phi2


def row_rates(U: np.ndarray, params: ModelParams) -> np.ndarray:
    """Per-row linear decay rates of the source, zero on the conserved rows.

    In 1D the stress variable is a pure trace, so it decays with the bulk
    rate.
    """
    layout = get_layout(1)
    rates = relaxation_rates(U, params)
    k = np.zeros(U.shape)
    k[:, layout.heat] = rates[:, 0:1]
    k[:, layout.stress] = rates[:, 2:3]
    return k


def etd_update(
    U: np.ndarray,
    dx: float,
    dt: float,
    params: ModelParams,
    config: ImexConfig,
) -> np.ndarray:
    """Exponential time differencing step for U_t = R(U) - k U.

    The rates k are frozen at U; their variation inside the step is moved
    into the explicit part. Constant reconstruction takes the first-order
    exponential Euler step, linear reconstruction adds the Cox-Matthews
    second-order corrector, which reduces to Heun on the conserved rows.
    """
    k = row_rates(U, params)
    phi0, phi1, phi2 = phi_functions(k * dt)

    def explicit(X: np.ndarray) -> np.ndarray:
        rhs = hyperbolic_rhs(X, dx, params, config)
        if X is U:
            return rhs
        primitives(X, params)
        return rhs - (row_rates(X, params) - k) * X

    base = explicit(U)
    predictor = phi0 * U + dt * phi1 * base
    if config.reconstruction == "constant":
        return predictor
    return predictor + dt * phi2 * (explicit(predictor) - base)


def step(
    field: Field,
    params: ModelParams,
    config: ImexConfig,
    dt: Optional[float] = None,
    step_index: int = 0,
) -> Field:
    """Advance one IMEX step (Strang or exponential, per config.splitting).

    Args:
        field: Current admissible field
        params: Model parameters
        config: Integration settings
        dt: Time step (CFL step when omitted)
        step_index: Step counter for diagnostics

    Returns:
        New field at t + dt

    Raises:
        NumericalAbort: If a stage becomes inadmissible or Newton fails
    """
    if params.dim != 1:
        raise ValueError("Time evolution is implemented for dim=1 only")
    if dt is None:
        dt, _ = stable_dt(field, params, config)

    conserved_rows = get_layout(1).n_conserved
    U = field.U
    try:
        if config.splitting == "etd":
            U = etd_update(U, field.grid.dx, dt, params, config)
        else:
            U = relax(U, 0.5 * dt, params, config)
            U = advance(U, lambda X: hyperbolic_rhs(X, field.grid.dx, params, config), dt,
                        config.reconstruction)
            U = relax(U, 0.5 * dt, params, config)
        primitives(U, params)
    except DomainError as e:
        raise abort_from(e, U, conserved_rows, step_index, field.t) from e

    return field.advanced(U, field.t + dt)


def _snapshot_schedule(start: float, t_end: float, times: Optional[Sequence[float]]) -> List[float]:
    if times is None:
        times = [t_end]
    schedule = sorted({float(t) for t in times if start - 1e-14 <= t <= t_end + 1e-14})
    if not schedule or schedule[-1] < t_end:
        schedule.append(t_end)
    return schedule


def integrate(
    initial,
    t_end: float,
    snapshot_times: Optional[Sequence[float]],
    advance_step: Callable,
    dt_rule: Callable,
    entropy_density: Callable[[np.ndarray], np.ndarray],
    conserved_rows: int,
    config: ImexConfig,
    params: ModelParams,
    label: str,
) -> Trajectory:
    """Shared time loop of both solvers.

    Steps are clipped to land exactly on every requested snapshot time.
    """
    schedule = _snapshot_schedule(initial.t, t_end, snapshot_times)
    traj = Trajectory()
    field = initial
    dx = field.grid.dx

    def record(current) -> None:
        U = current.U
        traj.entropy_history.append(float(np.sum(entropy_density(U)) * dx))
        traj.totals_history.append((np.sum(U[:, :conserved_rows], axis=0) * dx).tolist())
        traj.step_times.append(current.t)
        if traj.compact_exit_time is None and not _in_window(U, config):
            traj.compact_exit_time = current.t
            logger.warning(f"{label}: state left the admissible window at t={current.t:.6g}")

    record(field)
    pending = list(schedule)
    if pending and abs(pending[0] - field.t) <= 1e-14:
        traj.snapshots.append(field)
        traj.times.append(pending.pop(0))

    logger.info(
        f"{label}: N={field.grid.n_cells}, eps={params.epsilon:g}, t_end={t_end:g}, "
        f"snapshots={len(schedule)}"
    )

    while pending:
        if traj.steps >= config.max_steps:
            raise NumericalAbort(
                f"{label}: step limit {config.max_steps} reached", step=traj.steps, time=field.t
            )
        target = pending[0]
        dt, speed = dt_rule(field)
        if not np.isfinite(dt) or dt <= 0.0:
            raise NumericalAbort(f"{label}: invalid time step {dt!r}", step=traj.steps, time=field.t)

        landing = field.t + dt >= target - 1e-12 * max(1.0, abs(target))
        if landing:
            dt = target - field.t

        previous = field
        field = advance_step(field, dt, traj.steps)
        if landing:
            field = field.advanced(field.U, target)
        traj.steps += 1
        traj.dt_history.append(dt)
        traj.speed_history.append(speed)
        record(field)

        _update_drift(traj, previous.U, field.U, conserved_rows, dx)

        if landing:
            traj.snapshots.append(field)
            traj.times.append(pending.pop(0))

        if traj.steps % config.log_every == 0:
            logger.info(
                f"{label}: step {traj.steps}, t={field.t:.6g}, dt={dt:.3e}, max speed={speed:.4g}"
            )

    logger.info(
        f"{label}: finished in {traj.steps} steps, max drift={traj.max_drift:.3e}, "
        f"max entropy increase={traj.max_entropy_increase:.3e}"
    )
    return traj


def _in_window(U: np.ndarray, config: ImexConfig) -> bool:
    rho = U[:, 0]
    u = U[:, 2] / rho - 0.5 * (U[:, 1] / rho) ** 2
    rho_lo, rho_hi = config.compact_rho
    u_lo, u_hi = config.compact_u
    return bool(
        np.all((rho >= rho_lo) & (rho <= rho_hi)) and np.all((u >= u_lo) & (u <= u_hi))
    )


def _update_drift(
    traj: Trajectory,
    before: np.ndarray,
    after: np.ndarray,
    conserved_rows: int,
    dx: float,
) -> None:
    scale = float(np.max(np.sum(np.abs(before[:, :conserved_rows]), axis=0) * dx))
    change = np.abs(np.asarray(traj.totals_history[-1]) - np.asarray(traj.totals_history[-2]))
    traj.max_drift = max(traj.max_drift, float(np.max(change)) / max(scale, 1e-300))

    s_old, s_new = traj.entropy_history[-2], traj.entropy_history[-1]
    reference = max(abs(s_old), 1e-300)
    traj.max_entropy_increase = max(traj.max_entropy_increase, (s_new - s_old) / reference)


def run(
    initial: Field,
    params: ModelParams,
    config: ImexConfig,
    snapshot_times: Optional[Sequence[float]] = None,
) -> Trajectory:
    """Integrate the generalized system from initial.t to config.t_end.

    Args:
        initial: Initial field
        params: Model parameters (dim must be 1)
        config: Integration settings
        snapshot_times: Times at which to keep snapshots (t_end is always kept)

    Returns:
        Trajectory with snapshots and per-step diagnostics
    """
    return integrate(
        initial,
        config.t_end,
        snapshot_times,
        advance_step=lambda f, dt, n: step(f, params, config, dt=dt, step_index=n),
        dt_rule=lambda f: stable_dt(f, params, config),
        entropy_density=lambda U: eta(U, params),
        conserved_rows=get_layout(1).n_conserved,
        config=config,
        params=params,
        label="GHE",
    )


def equilibrium_field(nsf: NsfField) -> Field:
    """Generalized field with the conserved rows of nsf and w = c = 0."""
    layout = get_layout(1)
    U = np.zeros((nsf.grid.n_cells, layout.n_state))
    U[:, layout.conserved] = nsf.U
    return Field(grid=nsf.grid, U=U, t=nsf.t)
