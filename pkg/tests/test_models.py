"""Tests for Pydantic data models."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from ghelab.models.layout import StateLayout, get_layout
from ghelab.models.params import ModelParams
from ghelab.models.reports import (
    CheckResult,
    ConvergenceReport,
    EpsilonResult,
    FitResult,
    StructureReport,
    format_number,
)
from ghelab.models.state import ConservedState, NormalState


class TestModelParams:
    """Tests for ModelParams model."""

    def test_default_values(self):
        """Test default values are set correctly."""
        params = ModelParams()

        assert params.c_v == 1.5
        assert params.R_gas == 1.0
        assert params.lam == 0.01
        assert params.alpha1 == 100.0
        assert params.epsilon == 0.1
        assert params.dim == 1
        assert params.gamma == pytest.approx(5.0 / 3.0)

    def test_lambda_alias(self):
        """Test the heat conductivity is read from the lambda key."""
        params = ModelParams.model_validate({"lambda": 0.5})
        assert params.lam == 0.5

        params = ModelParams(lam=0.25)
        assert params.lam == 0.25

    def test_rejects_non_positive_weights(self):
        """Test entropy weights and transport coefficients must be positive."""
        with pytest.raises(ValidationError):
            ModelParams(alpha1=-1.0)
        with pytest.raises(ValidationError):
            ModelParams(alpha2=0.0)
        with pytest.raises(ValidationError):
            ModelParams(kappa=0.0)

    def test_rejects_unknown_keys(self):
        """Test unknown parameters are rejected."""
        with pytest.raises(ValidationError):
            ModelParams.model_validate({"viscosity": 1.0})

    def test_dimension_range(self):
        """Test only dimensions 1-3 are accepted."""
        with pytest.raises(ValidationError):
            ModelParams(dim=4)

    def test_with_epsilon_and_dim(self):
        """Test validated copies keep the other constants."""
        params = ModelParams(lam=0.2, alpha2=7.0)
        copy = params.with_epsilon(0.01).with_dim(3)

        assert copy.epsilon == 0.01
        assert copy.dim == 3
        assert copy.lam == 0.2
        assert copy.alpha2 == 7.0
        assert params.epsilon == 0.1

        with pytest.raises(ValidationError):
            params.with_epsilon(0.0)


class TestStateLayout:
    """Tests for the state-vector layout."""

    @pytest.mark.parametrize("dim,n_state", [(1, 5), (2, 9), (3, 14)])
    def test_sizes(self, dim, n_state):
        """Test row counts per dimension."""
        layout = get_layout(dim)
        assert layout.n_state == n_state
        assert layout.n_conserved == dim + 2
        assert layout.n_dissipative == n_state - dim - 2

    def test_invalid_dimension(self):
        """Test dimension 4 is rejected."""
        with pytest.raises(ValueError):
            StateLayout(4)

    def test_pack_unpack(self):
        """Test packing preserves the Frobenius product."""
        layout = get_layout(3)
        rng = np.random.default_rng(1)
        a = rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3))
        A = a + a.T
        B = b + b.T

        assert np.allclose(layout.unpack(layout.pack(A)), A)
        assert layout.pack(A) @ layout.pack(B) == pytest.approx(np.sum(A * B))
        assert layout.trace(layout.pack(A)) == pytest.approx(np.trace(A))
        assert layout.trace(layout.deviator(layout.pack(A))) == pytest.approx(0.0, abs=1e-12)

    def test_row_names(self):
        """Test readable row names."""
        assert get_layout(1).row_names() == ["rho", "m_x", "E", "W_x", "C_xx"]
        assert get_layout(2).row_names()[-3:] == ["C_xx", "C_xy", "C_yy"]


class TestConservedState:
    """Tests for ConservedState model."""

    def test_from_primitive(self):
        """Test construction from density, velocity and internal energy."""
        state = ConservedState.from_primitive(rho=2.0, v=[0.5], u=1.5, w=[0.1])

        assert state.m == [1.0]
        assert state.E_tot == pytest.approx(2.0 * (1.5 + 0.125))
        assert state.W == [pytest.approx(0.2)]
        assert state.C == [0.0]
        assert state.internal_energy == pytest.approx(1.5)
        assert state.dim == 1

    def test_vector_layout(self):
        """Test the flat vector follows the layout order."""
        state = ConservedState(rho=1.0, m=[0.1], E_tot=2.0, W=[0.3], C=[0.4])
        vector = state.to_vector()

        assert vector.tolist() == [1.0, 0.1, 2.0, 0.3, 0.4]
        assert ConservedState.from_vector(vector, 1) == state

    def test_from_vector_wrong_length(self):
        """Test a vector of the wrong length is rejected."""
        with pytest.raises(ValueError):
            ConservedState.from_vector([1.0, 0.0, 2.0], 1)

    def test_mismatched_lengths(self):
        """Test W and C lengths must match the momentum."""
        with pytest.raises(ValidationError):
            ConservedState(rho=1.0, m=[0.0, 0.0], E_tot=2.0, W=[0.0], C=[0.0, 0.0, 0.0])
        with pytest.raises(ValidationError):
            ConservedState(rho=1.0, m=[0.0, 0.0], E_tot=2.0, W=[0.0, 0.0], C=[0.0])

    def test_density_positive(self):
        """Test density must be positive."""
        with pytest.raises(ValidationError):
            ConservedState(rho=0.0, m=[0.0], E_tot=1.0, W=[0.0], C=[0.0])

    def test_stress_matrix(self):
        """Test the packed stress unpacks to a symmetric matrix."""
        C = np.array([[1.0, 0.5], [0.5, 2.0]])
        state = ConservedState.from_primitive(rho=1.0, v=[0.0, 0.0], u=1.0, c=C)
        assert np.allclose(state.stress_matrix, C)

    def test_normal_state_vector(self):
        """Test the normal state splits into conserved and dissipative blocks."""
        vector = np.array([1.0, 0.0, 2.0, 0.1, 0.2])
        normal = NormalState.from_vector(vector, 1)

        assert normal.V_I.tolist() == [1.0, 0.0, 2.0]
        assert normal.V_II.tolist() == [0.1, 0.2]
        assert normal.vector.tolist() == vector.tolist()


class TestReports:
    """Tests for report models."""

    def test_format_number(self):
        """Test round-trip formatting and missing values."""
        assert format_number(None) == ""
        assert format_number(0.5) == "0.5"
        assert float(format_number(0.1)) == 0.1

    def test_check_result_passed(self):
        """Test a row passes iff samples exist and the defect is within threshold."""
        assert CheckResult(check="c", name="n", samples=3, max_defect=1e-13, threshold=1e-12).passed
        assert not CheckResult(check="c", name="n", samples=3, max_defect=1e-11, threshold=1e-12).passed
        assert not CheckResult(check="c", name="n", samples=0, max_defect=0.0, threshold=1.0).passed
        assert not CheckResult(
            check="c", name="n", samples=3, max_defect=math.nan, threshold=1.0
        ).passed

    def test_check_result_csv_row(self):
        """Test the CSV row carries a lowercase pass column."""
        row = CheckResult(check="c", name="n", samples=2, max_defect=0.25, threshold=0.5).to_csv_row()
        assert row == ["c", "n", "2", "0.25", "0.5", "true"]

    def test_structure_report(self):
        """Test an empty report fails and failures are collected."""
        report = StructureReport()
        assert not report.passed

        report.add(CheckResult(check="c", name="a", samples=1, max_defect=0.0, threshold=0.0))
        assert report.passed

        other = StructureReport()
        other.add(CheckResult(check="c", name="b", samples=1, max_defect=1.0, threshold=0.0))
        report.extend(other)

        assert not report.passed
        assert [r.name for r in report.failures] == ["b"]
        text = report.to_text()
        assert "FAIL c/b" in text
        assert text.endswith("overall: FAIL\n")

    def test_fit_result_passed(self):
        """Test only pass and exact count as passing."""
        assert FitResult(quantity="q", expected=2.0, status="pass").passed
        assert FitResult(quantity="q", expected=2.0, status="exact").passed
        assert not FitResult(quantity="q", expected=2.0).passed
        assert not FitResult(quantity="q", expected=2.0, status="fail").passed

    def test_convergence_report(self):
        """Test overall status and run filtering."""
        report = ConvergenceReport(experiment="converge", epsilons=[0.1], n_cells=16, t_end=0.1)
        assert not report.passed

        report.runs = [
            EpsilonResult(epsilon=0.1, norms={"l2_error": 1.0}),
            EpsilonResult(epsilon=0.05, ok=False, error="abort"),
        ]
        report.fits = [FitResult(quantity="l2_error", expected=2.0, status="pass")]
        report.flags = {"l2_slope": True, "all_runs": False}

        assert [r.epsilon for r in report.successful_runs] == [0.1]
        assert report.fit("l2_error").passed
        assert report.fit("missing") is None
        assert not report.passed
