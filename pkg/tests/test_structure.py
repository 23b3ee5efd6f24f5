"""Tests for the pointwise structure checks."""

import numpy as np
import pytest

from ghelab.models.params import ModelParams
from ghelab.solvers.ghe import Trajectory
from ghelab.structure import (
    StateSampler,
    check_concavity_lemmas,
    check_convexity,
    check_dissipation,
    check_entropy_production,
    check_equilibrium_blocks,
    check_hyperbolicity,
    check_symmetrizer,
    run_structure_suite,
    solver_entropy_check,
)
from ghelab.thermo.entropy import primitives


class TestStateSampler:
    """Tests for seeded state sampling."""

    def test_ranges(self):
        """Test sampled states lie in the compact test set."""
        params = ModelParams(dim=2)
        U = StateSampler(params, seed=5).draw(200)
        prim = primitives(U, params)

        assert U.shape == (200, 9)
        assert np.all((prim.rho >= 0.5) & (prim.rho <= 2.0))
        assert np.all((prim.u >= 0.5 - 1e-12) & (prim.u <= 2.0 + 1e-12))
        assert np.all(np.abs(prim.v) <= 1.0 + 1e-12)
        assert np.all(np.abs(prim.w) <= 0.5 + 1e-12)

    def test_deterministic(self):
        """Test equal seeds give equal states."""
        params = ModelParams()
        a = StateSampler(params, seed=11).draw(20)
        b = StateSampler(params, seed=11).draw(20)
        assert np.array_equal(a, b)

    def test_equilibrium_draw(self):
        """Test equilibrium draws have w = c = 0."""
        U = StateSampler(ModelParams(), seed=1).draw(10, equilibrium=True)
        assert np.all(U[:, 3:] == 0.0)

    def test_budget(self):
        """Test an exhausted budget yields fewer states and records the shortfall."""
        sampler = StateSampler(ModelParams(), seed=0, budget=15)

        assert len(sampler.draw(10)) == 10
        assert len(sampler.draw(10)) == 5
        assert sampler.shortfall == 5
        assert sampler.remaining == 0
        assert len(sampler.draw(3)) == 0

    def test_directions_are_unit(self):
        """Test dissipative directions have unit length."""
        directions = StateSampler(ModelParams(dim=3), seed=2).directions(8)
        assert directions.shape == (8, 9)
        assert np.allclose(np.linalg.norm(directions, axis=-1), 1.0)


class TestChecks:
    """Tests for individual check families."""

    @pytest.mark.parametrize("dim", [1, 2])
    def test_convexity_passes(self, dim):
        """Test the entropy passes its convexity rows."""
        params = ModelParams(dim=dim)
        report = check_convexity(StateSampler(params, seed=dim), params, count=10)

        assert report.passed, report.to_text()
        assert {r.name for r in report.results} == {
            "min_eigenvalue", "hessian_symmetry", "gradient_fd", "hessian_fd", "gibbs_identity",
        }
        assert all(r.check == f"convexity_d{dim}" for r in report.results)

    @pytest.mark.parametrize("dim", [1, 3])
    def test_dissipation_passes(self, dim):
        """Test coercivity, entropy production sign and relaxation decay."""
        params = ModelParams(dim=dim)
        report = check_dissipation(StateSampler(params, seed=dim), params, count=10)
        assert report.passed, report.to_text()

    def test_empty_sampler_fails(self):
        """Test rows with zero samples fail and mention the shortfall."""
        params = ModelParams()
        report = check_convexity(StateSampler(params, budget=0), params, count=5)

        assert not report.passed
        assert all(r.samples == 0 for r in report.results)
        assert all("sampler short by 5" in r.note for r in report.results)

    def test_concavity_lemmas(self):
        """Test the entropy transforms are concave and the cubic is rejected."""
        report = check_concavity_lemmas(ModelParams(), trials=500, seed=4)
        names = [r.name for r in report.results]

        assert names == [
            "equilibrium_entropy", "perspective", "composition",
            "generalized_entropy", "negative_control",
        ]
        assert report.passed, report.to_text()

    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_symmetrizer_passes(self, dim):
        """Test symmetric products, block-diagonal A0 and the normal-form round trip."""
        params = ModelParams(dim=dim)
        report = check_symmetrizer(StateSampler(params, seed=1000 * dim + 1), params, count=100)

        assert report.passed, report.to_text()
        assert all(r.samples == 100 for r in report.results)

    @pytest.mark.parametrize("dim,direction", [(1, 0), (2, 1), (3, 2)])
    def test_hyperbolicity_passes(self, dim, direction):
        """Test real speeds growing like 1/eps in every direction."""
        params = ModelParams(dim=dim)
        sampler = StateSampler(params, seed=1000 * dim + 2 + direction)
        report = check_hyperbolicity(sampler, params, direction, count=100)
        names = {r.name for r in report.results}

        assert report.passed, report.to_text()
        assert ("closed_form_speeds" in names) == (dim == 1)

    def test_hyperbolicity_direction_range(self):
        """Test a direction beyond the dimension is rejected."""
        params = ModelParams(dim=2)
        with pytest.raises(ValueError):
            check_hyperbolicity(StateSampler(params), params, direction=2, count=1)

    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_equilibrium_blocks_pass(self, dim):
        """Test the block rates, including samples where the A0 gap vanishes identically."""
        params = ModelParams(dim=dim)
        report = check_equilibrium_blocks(StateSampler(params, seed=1000 * dim + 5), params, count=100)
        rows = {r.name: r for r in report.results}

        assert report.passed, report.to_text()
        assert np.isfinite(rows["a0_ii_quadratic_slope"].max_defect)
        assert "exact identity at" in rows["a0_ii_quadratic_slope"].note
        assert rows["eta_cross_block_slope"].samples == 100

    def test_concavity_lemmas_three_dimensions(self):
        """Test the sample boxes stay admissible in three dimensions."""
        report = check_concavity_lemmas(ModelParams(dim=3), trials=10_000, seed=0)
        rows = {r.name: r for r in report.results}

        assert report.passed, report.to_text()
        assert rows["composition"].samples == 10_000
        assert rows["generalized_entropy"].samples == 10_000

    def test_entropy_production_run(self):
        """Test a short solver run dissipates entropy and conserves totals."""
        report = solver_entropy_check(ModelParams(), n_cells=32, t_end=0.01)
        rows = {r.name: r for r in report.results}

        assert rows["pointwise_sigma"].passed
        assert rows["conservation_drift"].passed
        assert rows["total_entropy_increase"].passed
        assert rows["conservation_drift"].samples > 0

    def test_entropy_production_without_steps(self):
        """Test a run without steps cannot pass the per-step rows."""
        report = check_entropy_production(Trajectory(), ModelParams())
        rows = {r.name: r for r in report.results}
        assert not rows["conservation_drift"].passed


class TestSuite:
    """Tests for the full structure suite."""

    def test_independent_of_threads(self):
        """Test rows are identical for one and several threads."""
        kwargs = dict(dims=[1], samples=3, seed=9, concavity_trials=100, solver_check=False)
        single = run_structure_suite(ModelParams(), threads=1, **kwargs)
        multi = run_structure_suite(ModelParams(), threads=3, **kwargs)

        assert [r.to_csv_row() for r in single.results] == [r.to_csv_row() for r in multi.results]

    def test_row_order(self):
        """Test checks appear per dimension in a fixed order."""
        report = run_structure_suite(
            ModelParams(), dims=[1, 2], samples=2, concavity_trials=50, solver_check=False
        )
        checks = []
        for r in report.results:
            if r.check not in checks:
                checks.append(r.check)

        assert checks == [
            "convexity_d1", "symmetrizer_d1", "hyperbolicity_x0_d1", "equilibrium_blocks_d1",
            "dissipation_d1",
            "convexity_d2", "symmetrizer_d2", "hyperbolicity_x0_d2", "hyperbolicity_x1_d2",
            "equilibrium_blocks_d2", "dissipation_d2",
            "concavity",
        ]
