"""Tests for prepared data, residuals, Maxwell defects, fits and sweeps."""

import numpy as np
import pytest

from ghelab.config import ExperimentConfig, RunConfig
from ghelab.errors import InsufficientDataError
from ghelab.harness import (
    Experiment,
    closure_variables,
    exact_result,
    loglog_fit,
    maxwell_defect,
    prepare,
    require_points,
    residual_norms,
)
from ghelab.harness.maxwell import MaxwellDefect, splitting_floor
from ghelab.harness.residual import stiff_flux_divergence, time_stencil
from ghelab.models.params import ModelParams
from ghelab.solvers.ghe import ImexConfig
from ghelab.solvers.grid import Grid1D, NsfField, ddx
from ghelab.solvers.initial import equilibrium, initial_condition, smooth_wave
from ghelab.solvers.nsf import euler_primitives
from ghelab.system.fluxes import flux_G


def static_snapshots(name: str, n_cells: int = 32, times=(0.0, 0.1, 0.2)):
    """The same profile at several times, so every time derivative vanishes."""
    field = initial_condition(name, Grid1D(n_cells=n_cells), ModelParams(), 0.1)
    return [NsfField(grid=field.grid, U=field.U.copy(), t=t) for t in times]


class TestPrepare:
    """Tests for well-prepared initial data."""

    def test_uniform_state(self):
        """Test a uniform state gives V^II = 0 and unchanged conserved rows."""
        nsf = equilibrium(Grid1D(n_cells=16), ModelParams())
        data = prepare(nsf, 0.05, ModelParams())

        assert data.v_ii_max == 0.0
        assert np.array_equal(data.field.U[:, :3], nsf.U)
        assert np.all(data.field.U[:, 3:] == 0.0)

    def test_conserved_rows_bit_equal(self):
        """Test the conserved block is copied bit for bit."""
        nsf = initial_condition("manufactured", Grid1D(n_cells=32), ModelParams(), 0.2)
        data = prepare(nsf, 0.05, ModelParams())

        assert np.array_equal(data.field.U[:, :3], nsf.U)
        assert data.field.t == nsf.t
        assert data.well_prepared

    def test_closure_values(self):
        """Test V^II = eps (lambda T_x, kappa v_x / T)."""
        params = ModelParams()
        nsf = initial_condition("manufactured", Grid1D(n_cells=32), params, 0.2)
        _, v, _, temperature, _ = euler_primitives(nsf.U, params)
        dx = nsf.grid.dx
        v_ii = closure_variables(nsf, 0.1, params)

        assert np.allclose(v_ii[:, 0], 0.1 * params.lam * ddx(temperature, dx))
        assert np.allclose(v_ii[:, 1], 0.1 * params.kappa * ddx(v, dx) / temperature)

    def test_scales_with_epsilon(self):
        """Test V^II is linear in eps."""
        nsf = smooth_wave(Grid1D(n_cells=32), ModelParams())
        a = prepare(nsf, 0.02, ModelParams())
        b = prepare(nsf, 0.01, ModelParams())
        assert np.allclose(a.v_ii, 2.0 * b.v_ii)

    def test_ill_prepared(self):
        """Test well_prepared=False starts from V^II = 0."""
        nsf = smooth_wave(Grid1D(n_cells=32), ModelParams())
        data = prepare(nsf, 0.05, ModelParams(), well_prepared=False)

        assert not data.well_prepared
        assert np.all(data.field.U[:, 3:] == 0.0)


class TestMaxwellDefect:
    """Tests for the defect against the first Maxwell iteration."""

    def test_equilibrium_is_zero(self):
        """Test the defect vanishes on a uniform rest state."""
        params = ModelParams()
        data = prepare(equilibrium(Grid1D(n_cells=16), params), 0.05, params)
        defect = maxwell_defect(data.field, params, 0.05)

        assert defect.heat == 0.0
        assert defect.stress == 0.0

    def test_prepared_data_satisfies_closure(self):
        """Test prepared data has a round-off defect."""
        params = ModelParams()
        nsf = initial_condition("manufactured", Grid1D(n_cells=32), params, 0.2)
        data = prepare(nsf, 0.05, params)
        defect = maxwell_defect(data.field, params, 0.05, reference=nsf)

        assert defect.heat < 1e-14
        assert defect.stress < 1e-14
        assert defect.heat_gap < 1e-14
        assert defect.heat_floor > 0.0

    def test_ill_prepared_defect(self):
        """Test V^II = 0 leaves the full closure as the defect."""
        params = ModelParams()
        nsf = initial_condition("manufactured", Grid1D(n_cells=32), params, 0.2)
        data = prepare(nsf, 0.05, params, well_prepared=False)
        defect = maxwell_defect(data.field, params, 0.05)

        assert defect.heat > 0.0
        assert defect.stress > 0.0
        assert defect.resolved("heat")

    def test_resolved(self):
        """Test a defect must clear ten times its floor."""
        defect = MaxwellDefect(epsilon=0.1, heat=1.0, stress=1.0, heat_floor=0.05, stress_floor=0.2)
        assert defect.resolved("heat")
        assert not defect.resolved("stress")

    def test_strang_floor(self):
        """Test Strang splitting adds its fixed-point shift to the floor."""
        params = ModelParams()
        nsf = initial_condition("manufactured", Grid1D(n_cells=32), params, 0.2)
        field = prepare(nsf, 0.05, params).field
        etd = maxwell_defect(field, params, 0.05, dt=1e-3, splitting="etd")
        strang = maxwell_defect(field, params, 0.05, dt=1e-3, splitting="strang")

        assert strang.heat_floor > etd.heat_floor
        assert splitting_floor(field, params.with_epsilon(0.05), 1e-3).shape == (2,)


class TestResidual:
    """Tests for the residual of the prepared data."""

    def test_uniform_state_is_zero(self):
        """Test the residual vanishes on a uniform rest state."""
        norms = residual_norms(static_snapshots("equilibrium"), 0.05, ModelParams())

        assert norms.r1 == 0.0
        assert norms.r2 == 0.0
        assert norms.time == 0.1

    def test_requires_three_snapshots(self):
        """Test fewer than three snapshots raise InsufficientDataError."""
        with pytest.raises(InsufficientDataError):
            residual_norms(static_snapshots("equilibrium", times=(0.0, 0.1)), 0.05, ModelParams())

    def test_unequal_spacing(self):
        """Test unequally spaced snapshots raise InsufficientDataError."""
        with pytest.raises(InsufficientDataError):
            time_stencil(static_snapshots("equilibrium", times=(0.0, 0.1, 0.3)))

    def test_stiff_divergence_matches_flux(self):
        """Test the chain-rule divergence agrees with differencing G."""
        params = ModelParams()
        nsf = initial_condition("manufactured", Grid1D(n_cells=256), params, 0.2)
        U = prepare(nsf, 0.05, params).field.U
        dx = nsf.grid.dx
        direct = ddx(flux_G(U, params)[:, 0, :], dx)

        assert np.allclose(stiff_flux_divergence(U, dx, params), direct, atol=1e-3)

    def test_closure_part_vanishes(self):
        """Test the eps-dependent part of R^I is round-off for constant weights."""
        norms = residual_norms(static_snapshots("manufactured"), 0.05, ModelParams())

        assert norms.r1_closure <= 1e-10 * norms.scale
        assert norms.r1_floor > 0.0

    def test_r2_linear_in_epsilon(self):
        """Test R^II halves with eps."""
        snapshots = static_snapshots("manufactured")
        a = residual_norms(snapshots, 0.02, ModelParams())
        b = residual_norms(snapshots, 0.01, ModelParams())

        assert b.r2 > 0.0
        assert a.r2 / b.r2 == pytest.approx(2.0, rel=1e-6)
        assert a.r1_floor == pytest.approx(b.r1_floor)


class TestFitting:
    """Tests for log-log order fits."""

    def test_exact_power_law(self):
        """Test slope, intercept and pass status on y = 3 x^2."""
        x = [0.08, 0.04, 0.02, 0.01]
        fit = loglog_fit(x, [3.0 * e**2 for e in x], "q", 2.0, 0.3)

        assert fit.slope == pytest.approx(2.0)
        assert fit.intercept == pytest.approx(np.log(3.0))
        assert fit.r_squared == pytest.approx(1.0)
        assert fit.points == 4
        assert fit.status == "pass"

    def test_wrong_order_fails(self):
        """Test a first-order quantity fails a second-order expectation."""
        x = [0.08, 0.04, 0.02, 0.01]
        fit = loglog_fit(x, x, "q", 2.0, 0.3)
        assert fit.status == "fail"
        assert not fit.passed

    def test_lower_bound(self):
        """Test tolerance None accepts any slope above the expectation."""
        x = [0.08, 0.04, 0.02]
        assert loglog_fit(x, [e**3 for e in x], "q", 2.5).status == "pass"
        assert loglog_fit(x, [e**2 for e in x], "q", 2.5).status == "fail"

    def test_too_few_points(self):
        """Test fits with fewer than three usable points are inconclusive."""
        fit = loglog_fit([0.1, 0.05, 0.02], [1.0, 0.0, float("nan")], "q", 2.0, 0.3)

        assert fit.status == "inconclusive"
        assert fit.points == 1
        assert fit.slope is None

    def test_poor_fit_inconclusive(self):
        """Test a scattered fit below the R^2 threshold is inconclusive."""
        fit = loglog_fit([0.08, 0.04, 0.02, 0.01], [1.0, 0.01, 1.0, 0.01], "q", 2.0, 0.3)
        assert fit.status == "inconclusive"
        assert fit.r_squared < 0.98

    def test_exact_result(self):
        """Test identically vanishing quantities report exact."""
        assert exact_result("r1", 2.0, 1e-14, 1e-10, 4).status == "exact"
        assert exact_result("r1", 2.0, 1e-3, 1e-10, 4).status == "fail"

    def test_require_points(self):
        """Test the point-count guard."""
        require_points(3, "values")
        with pytest.raises(InsufficientDataError, match="insufficient points"):
            require_points(2, "values")


def small_experiment(**settings) -> Experiment:
    return Experiment(
        params=ModelParams(),
        grid=Grid1D(n_cells=32),
        solver=ImexConfig(t_end=0.02, splitting="etd"),
        settings=ExperimentConfig(**settings),
        initial="manufactured",
        amplitude=0.1,
    )


class TestExperiment:
    """Tests for the epsilon sweeps."""

    def test_single_epsilon_rejected(self):
        """Test a sweep needs three distinct relaxation times."""
        experiment = small_experiment(epsilons=[0.05, 0.05, 0.02])
        with pytest.raises(InsufficientDataError):
            experiment.converge()

    def test_epsilons_descending(self):
        """Test relaxation times are deduplicated and sorted."""
        experiment = small_experiment(epsilons=[0.01, 0.04, 0.02, 0.04])
        assert experiment.epsilons() == [0.04, 0.02, 0.01]

    def test_times(self):
        """Test comparison and residual times."""
        experiment = small_experiment(snapshots=4)

        assert experiment.comparison_times() == pytest.approx([0.0, 0.005, 0.01, 0.015, 0.02])
        assert experiment.residual_times() == pytest.approx([0.009, 0.01, 0.011])

    def test_from_config(self):
        """Test construction from the run configuration."""
        experiment = Experiment.from_config(RunConfig())

        assert experiment.grid.n_cells == 2048
        assert experiment.solver.splitting == "etd"
        assert experiment.params.dim == 1
        assert experiment.stats["ghe_runs"] == 0

    def test_odd_grid_with_guard(self):
        """Test the spatial guard needs an even number of cells."""
        experiment = Experiment(
            params=ModelParams(),
            grid=Grid1D(n_cells=9),
            solver=ImexConfig(t_end=0.005, splitting="etd"),
            settings=ExperimentConfig(epsilons=[0.04, 0.02, 0.01], nsf_refinement=1),
        )
        with pytest.raises(ValueError, match="even number of cells"):
            experiment.converge()

    def test_residual_sweep(self):
        """Test the residual sweep reports an exact R^I and first-order R^II."""
        experiment = small_experiment(epsilons=[0.04, 0.02, 0.01])
        report = experiment.residual()

        assert report.experiment == "residual"
        assert report.epsilons == [0.04, 0.02, 0.01]
        assert report.flags["all_runs"]
        assert report.fit("r1").status == "exact"
        assert report.fit("r2").status == "pass"
        assert report.fit("r2").slope == pytest.approx(1.0, abs=1e-6)
        assert experiment.stats["nsf_runs"] == 1

    def test_results_independent_of_threads(self):
        """Test the sweep gives identical norms on several threads."""
        single = small_experiment(epsilons=[0.04, 0.02, 0.01]).residual()
        experiment = small_experiment(epsilons=[0.04, 0.02, 0.01])
        experiment.threads = 3
        multi = experiment.residual()

        assert [r.norms for r in single.runs] == [r.norms for r in multi.runs]

    def test_reference_cached(self):
        """Test reference runs are reused for equal grids and times."""
        experiment = small_experiment(epsilons=[0.04, 0.02, 0.01])
        first = experiment.reference(32, [0.0, 0.01])
        second = experiment.reference(32, [0.0, 0.01])

        assert first is second
        assert experiment.stats["nsf_runs"] == 1
        assert first[0][0].grid.n_cells == 32

    def test_refined_reference_only_for_converge(self):
        """Test maxwell and residual run the reference on the relaxation grid."""
        experiment = small_experiment(epsilons=[0.04, 0.02, 0.01], nsf_refinement=2)
        experiment.residual()
        times = experiment.residual_times()

        assert experiment.stats["nsf_runs"] == 1
        snapshots, trajectory = experiment.reference(32, times, refinement=1)
        assert experiment.stats["nsf_runs"] == 1
        assert trajectory.snapshots[0].grid.n_cells == 32

        refined, fine = experiment.reference(32, times)
        assert experiment.stats["nsf_runs"] == 2
        assert fine.snapshots[0].grid.n_cells == 64
        assert refined[0].grid.n_cells == 32

    def test_relaxation_run_counts(self):
        """Test relaxation runs start from the prepared reference and are counted."""
        experiment = small_experiment(epsilons=[0.04, 0.02, 0.01])
        reference, _ = experiment.reference(32, [0.0, 0.01])
        trajectory = experiment.run_relaxation(0.04, reference)

        assert trajectory.times == [0.0, 0.01]
        assert np.array_equal(trajectory.snapshots[0].U[:, :3], reference[0].U)
        assert experiment.stats["ghe_runs"] == 1
        assert experiment.stats["steps"] == trajectory.steps

    def test_converge_sweep(self):
        """Test a small converge sweep runs every epsilon twice and sets its flags."""
        experiment = Experiment(
            params=ModelParams(),
            grid=Grid1D(n_cells=16),
            solver=ImexConfig(t_end=0.005, splitting="etd", reconstruction="linear"),
            settings=ExperimentConfig(epsilons=[0.04, 0.02, 0.01], snapshots=2),
        )
        report = experiment.converge()

        assert [r.epsilon for r in report.runs] == [0.04, 0.02, 0.01]
        assert report.flags["all_runs"]
        assert {"l2_slope", "monotone", "spatial_guard", "conservation", "entropy"} <= set(report.flags)
        for run in report.runs:
            assert {"l2_error", "linf_error", "spatial_error", "gap", "drift"} <= set(run.norms)
        assert [f.quantity for f in report.fits] == ["l2_error", "linf_error"]
        assert experiment.stats["nsf_runs"] == 2
        assert experiment.stats["ghe_runs"] == 6

    def test_maxwell_sweep(self):
        """Test a small maxwell sweep reports defects, floors and both fits."""
        experiment = small_experiment(epsilons=[0.04, 0.02, 0.01])
        report = experiment.maxwell()

        assert report.flags["all_runs"]
        assert report.fit("heat_defect") is not None
        assert report.fit("stress_defect") is not None
        for run in report.runs:
            assert run.norms["heat_defect"] >= 0.0
            assert run.norms["heat_floor"] > 0.0
            assert "heat_gap" in run.norms
