"""Tests for fluxes, normal form, characteristic speeds and dissipation."""

import numpy as np
import pytest

from ghelab.errors import ConvergenceError, DomainError
from ghelab.models.params import ModelParams
from ghelab.solvers.grid import Grid1D, ddx
from ghelab.solvers.nsf import euler_speed
from ghelab.system.dissipation import (
    dissipation_action,
    dissipation_matrix,
    dissipative_variables,
    entropy_production,
    fns_inverse,
    relax_exact,
    relax_newton,
    relaxation_rates,
    relaxation_source,
)
from ghelab.system.fluxes import flux_F, flux_G, fluxes, total_flux
from ghelab.system.jacobians import central_difference, jacobians
from ghelab.system.normal_form import (
    from_normal,
    normal_jacobian,
    normal_matrices,
    symmetrizer,
    to_normal,
)
from ghelab.system.speeds import characteristic_speeds, max_speed, squared_speeds
from ghelab.thermo.entropy import conjugates, conserved_from_primitives, eta, eta_gradient


def state_1d(params, rho=1.0, v=0.0, u=1.5, w=0.0, c=0.0) -> np.ndarray:
    return conserved_from_primitives(
        np.array(rho), np.array([v]), np.array(u), np.array([w]), np.array([c]), params
    )


class TestFluxes:
    """Tests for the convective and stiff fluxes."""

    def test_rest_state_flux(self):
        """Test F at rest carries only the pressure."""
        params = ModelParams()
        F = flux_F(state_1d(params), params)

        assert F.shape == (1, 5)
        assert np.allclose(F[0], [0.0, 1.0, 0.0, 0.0, 0.0])

    def test_convective_flux_moving(self):
        """Test F = v U plus pressure work for a moving state."""
        params = ModelParams()
        U = state_1d(params, rho=2.0, v=0.5, u=1.5, w=0.2, c=0.1)
        F = flux_F(U, params)[0]
        p = 2.0

        assert F[0] == pytest.approx(1.0)
        assert F[1] == pytest.approx(2.0 * 0.25 + p)
        assert F[2] == pytest.approx(0.5 * U[2] + p * 0.5)
        assert F[3] == pytest.approx(0.5 * U[3])
        assert F[4] == pytest.approx(0.5 * U[4])

    def test_stiff_flux_rows(self):
        """Test G = (0, tau, q + tau v, 1/theta, -v) in 1D."""
        params = ModelParams()
        U = state_1d(params, rho=1.0, v=0.3, u=1.5, w=2.0, c=-1.0)
        G = flux_G(U, params)[0]
        theta = 1.0
        q = -2.0 / 100.0
        tau = -theta * -1.0 / 100.0

        assert G[0] == 0.0
        assert G[1] == pytest.approx(tau)
        assert G[2] == pytest.approx(q + tau * 0.3)
        assert G[3] == pytest.approx(1.0 / theta)
        assert G[4] == pytest.approx(-0.3)

    def test_stiff_flux_stress_rows_2d(self):
        """Test div G reproduces -sym(grad v) in the packed stress rows."""
        params = ModelParams(dim=2)
        U = conserved_from_primitives(
            np.array(1.0), np.array([0.2, -0.4]), np.array(1.5),
            np.zeros(2), np.zeros(3), params,
        )
        G = flux_G(U, params)
        stress = slice(6, 9)
        sqrt2 = np.sqrt(2.0)

        assert np.allclose(G[0, stress], [-0.2, -0.5 * sqrt2 * -0.4, 0.0])
        assert np.allclose(G[1, stress], [0.0, -0.5 * sqrt2 * 0.2, 0.4])

    def test_total_flux(self):
        """Test F + G/eps in one direction."""
        params = ModelParams(epsilon=0.5)
        U = state_1d(params, v=0.1, w=0.3, c=0.2)
        pair = fluxes(U, params)
        assert np.allclose(total_flux(U, params), pair.F[0] + pair.G[0] / 0.5)

    def test_jacobians_converge(self):
        """Test the Richardson check accepts smooth fluxes."""
        params = ModelParams()
        jac = jacobians(state_1d(params, v=0.2, w=0.1, c=0.05), params)

        assert jac.converged
        assert jac.F_U.shape == (1, 5, 5)
        assert jac.G_U.shape == (1, 5, 5)


class TestNormalForm:
    """Tests for the normal-form variables and matrices."""

    def test_round_trip(self):
        """Test from_normal inverts to_normal."""
        params = ModelParams(dim=2)
        U = conserved_from_primitives(
            np.array([1.0, 1.3]),
            np.array([[0.1, 0.2], [-0.3, 0.0]]),
            np.array([1.5, 0.8]),
            np.array([[0.1, -0.2], [0.0, 0.3]]),
            np.array([[0.1, 0.05, -0.2], [0.0, 0.1, 0.2]]),
            params,
        )
        assert np.allclose(from_normal(to_normal(U, params), params), U, rtol=1e-14, atol=1e-15)
        assert np.allclose(from_normal(to_normal(U, params).vector, params), U)

    def test_dissipative_variables(self):
        """Test V^II = (w/alpha1, c/alpha2)."""
        params = ModelParams(alpha1=2.0, alpha2=4.0)
        V = to_normal(state_1d(params, rho=2.0, w=1.0, c=2.0), params)
        assert np.allclose(V.V_II, [0.5, 0.5])

    def test_from_normal_rejects_bad_density(self):
        """Test the conserved block is validated."""
        params = ModelParams()
        with pytest.raises(DomainError):
            from_normal(np.array([-1.0, 0.0, 1.0, 0.0, 0.0]), params)

    def test_normal_jacobian(self):
        """Test J matches finite differences of U -> V."""
        params = ModelParams()
        U = state_1d(params, rho=1.2, v=0.3, u=1.1, w=0.5, c=-0.3)
        steps = 1e-6 * (1.0 + np.abs(U))
        fd = central_difference(lambda X: to_normal(X, params).vector, U, steps)
        assert np.allclose(normal_jacobian(U, params), fd, rtol=1e-6, atol=1e-9)

    def test_symmetrizer_block_diagonal(self):
        """Test A0 is symmetric positive definite with no I-II coupling."""
        params = ModelParams()
        A0 = symmetrizer(state_1d(params, rho=1.2, v=0.3, u=1.1, w=0.5, c=-0.3), params)

        assert np.allclose(A0, A0.T, atol=1e-10)
        assert np.allclose(A0[:3, 3:], 0.0, atol=1e-10)
        assert np.all(np.linalg.eigvalsh(A0) > 0.0)

    def test_normal_matrices_symmetric(self):
        """Test A0 A and A0 B are symmetric."""
        params = ModelParams()
        nf = normal_matrices(state_1d(params, rho=1.2, v=0.3, u=1.1, w=0.5, c=-0.3), params)

        assert nf.jacobians_converged
        for S in (nf.A0 @ nf.A[0], nf.A0 @ nf.B[0]):
            assert np.linalg.norm(S - S.T) <= 1e-5 * np.linalg.norm(S)


class TestSpeeds:
    """Tests for the closed-form characteristic speeds."""

    def test_speeds_sorted_and_centered(self):
        """Test five sorted speeds symmetric about v."""
        params = ModelParams()
        speeds = characteristic_speeds(state_1d(params, v=0.4, w=0.2, c=0.1), params)

        assert np.all(np.diff(speeds) >= 0.0)
        assert speeds[2] == pytest.approx(0.4)
        assert speeds[0] + speeds[4] == pytest.approx(0.8)
        assert speeds[1] + speeds[3] == pytest.approx(0.8)

    def test_speeds_match_eigenvalues(self):
        """Test the closed form against the eigenvalues of the flux Jacobian."""
        params = ModelParams(epsilon=0.5)
        U = state_1d(params, v=0.2, w=0.3, c=-0.2)
        jac = jacobians(U, params)
        A = jac.F_U[0] + jac.G_U[0] / params.epsilon
        eigen = np.sort(np.linalg.eigvals(A).real)

        assert np.allclose(characteristic_speeds(U, params), eigen, rtol=1e-5, atol=1e-6)

    def test_speed_scales_with_inverse_epsilon(self):
        """Test the largest speed doubles when eps halves for small eps."""
        fast = max_speed(state_1d(ModelParams(epsilon=5e-4)), ModelParams(epsilon=5e-4))
        slow = max_speed(state_1d(ModelParams(epsilon=1e-3)), ModelParams(epsilon=1e-3))
        assert fast / slow == pytest.approx(2.0, rel=1e-3)

    def test_large_epsilon_recovers_sound_speed(self):
        """Test the equilibrium speed is the Euler sound speed as eps grows."""
        params = ModelParams(epsilon=1e6)
        U = state_1d(params)
        mu = squared_speeds(U, params)

        assert np.sqrt(mu[1]) == pytest.approx(float(euler_speed(U[:3], params)), rel=1e-6)

    def test_only_one_dimension(self):
        """Test closed-form speeds reject dim != 1."""
        params = ModelParams(dim=2)
        U = conserved_from_primitives(
            np.array(1.0), np.zeros(2), np.array(1.5), np.zeros(2), np.zeros(3), params
        )
        with pytest.raises(DomainError):
            squared_speeds(U, params)


class TestDissipation:
    """Tests for the dissipation matrix and relaxation solves."""

    def test_source_vanishes_at_equilibrium(self):
        """Test S(U) = 0 for w = c = 0."""
        params = ModelParams()
        assert np.all(relaxation_source(state_1d(params, v=0.3), params) == 0.0)

    def test_source_rows(self):
        """Test the source acts on the dissipative rows only."""
        params = ModelParams(epsilon=0.5)
        U = state_1d(params, w=0.2, c=0.1)
        S = relaxation_source(U, params)
        rates = relaxation_rates(U, params)

        assert np.all(S[:3] == 0.0)
        assert S[3] == pytest.approx(-rates[0] * U[3])
        assert S[4] == pytest.approx(-rates[2] * U[4])

    def test_matrix_equals_fns_inverse(self):
        """Test M coincides with the inverse transport matrix."""
        params = ModelParams(dim=3)
        U = conserved_from_primitives(
            np.array(1.3), np.array([0.1, 0.2, 0.3]), np.array(0.9),
            np.full(3, 0.1), np.full(6, 0.2), params,
        )
        assert np.allclose(dissipation_matrix(U, params), fns_inverse(U, params))

    def test_action_matches_matrix(self):
        """Test the matrix-free action equals the dense product."""
        params = ModelParams(dim=2)
        U = conserved_from_primitives(
            np.array(1.0), np.array([0.1, 0.2]), np.array(1.2),
            np.array([0.1, 0.2]), np.array([0.3, -0.1, 0.2]), params,
        )
        Y = dissipative_variables(U, params)
        assert np.allclose(dissipation_action(U, Y, params), dissipation_matrix(U, params) @ Y)

    def test_entropy_production_non_positive(self):
        """Test sigma <= 0 on random states."""
        params = ModelParams(dim=2)
        rng = np.random.default_rng(7)
        U = conserved_from_primitives(
            rng.uniform(0.5, 2.0, 50),
            rng.uniform(-1.0, 1.0, (50, 2)),
            rng.uniform(0.5, 2.0, 50),
            rng.uniform(-0.5, 0.5, (50, 2)),
            rng.uniform(-0.5, 0.5, (50, 3)),
            params,
        )
        assert np.all(entropy_production(U, params) <= 0.0)

    def test_relax_exact_decay(self):
        """Test the exact relaxation decays w and c at their rates."""
        params = ModelParams(epsilon=0.1)
        U = state_1d(params, w=0.4, c=-0.2)
        h = 1e-3
        rates = relaxation_rates(U, params)
        out = relax_exact(U, h, params)

        assert np.all(out[:3] == U[:3])
        assert out[3] == pytest.approx(U[3] * np.exp(-h * rates[0]))
        assert out[4] == pytest.approx(U[4] * np.exp(-h * rates[2]))

    def test_relax_newton_backward_euler(self):
        """Test Newton reproduces the backward-Euler decay X0/(1 + h k)."""
        params = ModelParams(epsilon=0.1)
        U = state_1d(params, w=0.4, c=-0.2)
        h = 1e-3
        rates = relaxation_rates(U, params)
        out = relax_newton(U, h, params)

        assert out[3] == pytest.approx(U[3] / (1.0 + h * rates[0]), rel=1e-10)
        assert out[4] == pytest.approx(U[4] / (1.0 + h * rates[2]), rel=1e-10)

    def test_relax_newton_not_converged(self):
        """Test ConvergenceError when no iteration is allowed."""
        params = ModelParams()
        with pytest.raises(ConvergenceError):
            relax_newton(state_1d(params, w=0.4), 1e-3, params, max_iter=0)


def smooth_state(n_cells: int, params: ModelParams, boost: float = 0.0):
    """A smooth periodic 1D state on n_cells cells, optionally moving with +boost."""
    grid = Grid1D(n_cells=n_cells)
    x = 2.0 * np.pi * grid.centers
    U = conserved_from_primitives(
        1.0 + 0.2 * np.sin(x),
        (0.3 * np.cos(x) + boost)[:, None],
        1.5 + 0.2 * np.sin(2.0 * x),
        (0.1 * np.sin(x))[:, None],
        (0.1 * np.cos(2.0 * x))[:, None],
        params,
    )
    return grid, U


def refinement_order(defects, cells) -> float:
    return float(-np.polyfit(np.log(cells), np.log(defects), 1)[0])


class TestEntropyFlux:
    """Tests for the entropy fluxes and the Galilean shift."""

    CELLS = (32, 64, 128, 256)

    def test_convective_entropy_flux(self):
        """Test eta_U . dF/dx = d(v eta)/dx with a defect vanishing under refinement."""
        params = ModelParams()
        defects = []
        for n in self.CELLS:
            grid, U = smooth_state(n, params)
            v = U[:, 1] / U[:, 0]
            lhs = np.sum(eta_gradient(U, params) * ddx(flux_F(U, params)[:, 0, :], grid.dx), axis=-1)
            rhs = ddx(v * eta(U, params), grid.dx)
            defects.append(float(np.max(np.abs(lhs - rhs))))

        assert defects[-1] < 1e-2
        assert refinement_order(defects, self.CELLS) >= 1.0

    def test_stiff_entropy_flux(self):
        """Test eta_U . dG/dx = d(w / (alpha1 theta))/dx under refinement."""
        params = ModelParams()
        defects = []
        for n in self.CELLS:
            grid, U = smooth_state(n, params)
            conj = conjugates(U, params)
            lhs = np.sum(eta_gradient(U, params) * ddx(flux_G(U, params)[:, 0, :], grid.dx), axis=-1)
            rhs = ddx(-conj.q[:, 0] / conj.theta, grid.dx)
            defects.append(float(np.max(np.abs(lhs - rhs))))

        assert refinement_order(defects, self.CELLS) >= 1.0

    def test_galilean_shift(self):
        """Test a boost transports F and leaves the conjugates and the source unchanged."""
        params = ModelParams(epsilon=0.1)
        boost = 0.7
        _, U = smooth_state(64, params)
        _, moved = smooth_state(64, params, boost=boost)
        conj, conj_moved = conjugates(U, params), conjugates(moved, params)

        for name in ("theta", "pi", "q", "tau"):
            assert np.allclose(getattr(conj_moved, name), getattr(conj, name))
        assert np.allclose(relaxation_source(moved, params), relaxation_source(U, params))

        # mass, heat and stress rows are pure transport
        F, F_moved = flux_F(U, params)[:, 0, :], flux_F(moved, params)[:, 0, :]
        for row in (0, 3, 4):
            assert np.allclose(F_moved[:, row] - boost * moved[:, row], F[:, row])

        G, G_moved = flux_G(U, params)[:, 0, :], flux_G(moved, params)[:, 0, :]
        shift = np.zeros_like(G)
        shift[:, 2] = boost * conj.tau[:, 0]
        shift[:, 4] = -boost
        assert np.allclose(G_moved - G, shift)
