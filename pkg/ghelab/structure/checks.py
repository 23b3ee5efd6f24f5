"""Pointwise structure checks of the generalized system.

Each check evaluates a family of defects on sampled states and returns a
StructureReport whose rows pass iff max_defect <= threshold. Positive
definiteness is reported as defect = -lambda_min against a threshold of
-1e-14, so a row passes only when lambda_min >= 1e-14.
"""

import logging
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from ..models.layout import get_layout
from ..models.params import ModelParams
from ..models.reports import CheckResult, StructureReport
from ..models.state import NormalState
from ..solvers.ghe import Trajectory
from ..system.dissipation import (
    dissipation_action,
    dissipation_matrix,
    dissipative_variables,
    entropy_production,
    fns_inverse,
    relax_exact,
    relaxation_source,
)
from ..system.jacobians import central_difference, jacobians
from ..system.normal_form import from_normal, normal_matrices, symmetrizer, to_normal
from ..system.speeds import characteristic_speeds
from ..thermo.concavity import (
    box_sampler,
    compose,
    concavity_witness,
    equilibrium_entropy,
    internal_energy,
    perspective,
)
from ..thermo.entropy import conjugates, eta, eta_gradient, eta_hessian
from ..thermo.eos import entropy_generalized
from .sampling import StateSampler

logger = logging.getLogger(__name__)

PD_THRESHOLD = -1e-14
FD_REL_STEP = 1e-5
ROUNDOFF = 1e-12


def _label(family: str, params: ModelParams) -> str:
    return f"{family}_d{params.dim}"


def _row(
    check: str,
    name: str,
    defects: Sequence[float],
    threshold: float,
    note: str = "",
) -> CheckResult:
    values = np.asarray(defects, dtype=float).ravel()
    if values.size == 0:
        return CheckResult(
            check=check,
            name=name,
            samples=0,
            max_defect=float("nan"),
            threshold=threshold,
            note=note or "no samples",
        )
    return CheckResult(
        check=check,
        name=name,
        samples=int(values.size),
        max_defect=float(np.max(values)),
        threshold=threshold,
        note=note,
    )


def _relative(diff: np.ndarray, ref: np.ndarray) -> float:
    scale = float(np.max(np.abs(ref)))
    return float(np.max(np.abs(diff))) / max(scale, 1e-300)


def _frobenius(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix))


def _asymmetry(matrix: np.ndarray) -> float:
    """||S - S^T|| / ||S||."""
    return _frobenius(matrix - matrix.T) / max(_frobenius(matrix), 1e-300)


def _loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def _decay_slope(x: Sequence[float], y: Sequence[float], floor: float) -> Optional[float]:
    """Log-log slope over the points with y above the round-off floor.

    Returns None when fewer than two points are above it, i.e. the quantity
    vanishes identically up to round-off.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = y > floor
    if np.count_nonzero(keep) < 2:
        return None
    return _loglog_slope(x[keep], y[keep])


def _note_shortfall(report: StructureReport, sampler: StateSampler) -> StructureReport:
    if sampler.shortfall:
        for r in report.results:
            r.note = (r.note + "; " if r.note else "") + f"sampler short by {sampler.shortfall}"
    return report


def check_convexity(
    sampler: StateSampler,
    params: ModelParams,
    count: int = 100,
    gradient_tol: float = 1e-6,
    hessian_tol: float = 1e-5,
) -> StructureReport:
    """Strict convexity of eta and consistency of its derivatives.

    Rows: minimum Hessian eigenvalue, Hessian symmetry, gradient and Hessian
    against central differences, and the identity pi/theta = eta_U.U - eta.
    """
    check = _label("convexity", params)
    U = sampler.draw(count)
    report = StructureReport()
    if len(U) == 0:
        for name in ("min_eigenvalue", "hessian_symmetry", "gradient_fd", "hessian_fd", "gibbs_identity"):
            report.add(_row(check, name, [], 0.0))
        return _note_shortfall(report, sampler)

    hess = eta_hessian(U, params)
    grad = eta_gradient(U, params)
    lam_min = np.linalg.eigvalsh(hess)[:, 0]
    report.add(_row(check, "min_eigenvalue", -lam_min, PD_THRESHOLD,
                    note=f"smallest eigenvalue {float(np.min(lam_min)):.6e}"))
    report.add(_row(check, "hessian_symmetry",
                    [_asymmetry(H) for H in hess], 1e-9))

    grad_defects = []
    hess_defects = []
    for x, g, H in zip(U, grad, hess):
        steps = FD_REL_STEP * (1.0 + np.abs(x))
        g_fd = central_difference(lambda X: eta(X, params), x, steps)
        H_fd = central_difference(lambda X: eta_gradient(X, params), x, steps)
        grad_defects.append(_relative(g_fd - g, g))
        hess_defects.append(_relative(H_fd - H, H))
    report.add(_row(check, "gradient_fd", grad_defects, gradient_tol))
    report.add(_row(check, "hessian_fd", hess_defects, hessian_tol))

    conj = conjugates(U, params)
    lhs = conj.pi / conj.theta
    rhs = np.sum(grad * U, axis=-1) - eta(U, params)
    scale = np.maximum(np.abs(lhs), np.abs(rhs))
    report.add(_row(check, "gibbs_identity", np.abs(lhs - rhs) / scale, 1e-10))
    return _note_shortfall(report, sampler)


def check_symmetrizer(
    sampler: StateSampler,
    params: ModelParams,
    count: int = 100,
    symmetry_tol: float = 1e-6,
    block_tol: float = 1e-8,
) -> StructureReport:
    """Symmetric products eta_UU F_jU, eta_UU G_jU and the block-diagonal A0.

    Also checks that A0^{II,II} H reproduces M, that M is positive definite
    and that the normal-form map round-trips.

    Raises:
        DomainError: If dV/dU is singular at a sampled state
    """
    check = _label("symmetrizer", params)
    layout = get_layout(params.dim)
    con, dis = layout.conserved, layout.dissipative
    U = sampler.draw(count)

    f_sym, g_sym, off_block, a0_min, a0h_gap, m_min, richardson, roundtrip = ([] for _ in range(8))
    for x in U:
        hess = eta_hessian(x, params)
        jac = jacobians(x, params)
        richardson.append(jac.richardson_defect)
        f_sym.append(max(_asymmetry(hess @ jac.F_U[j]) for j in range(params.dim)))
        g_sym.append(max(_asymmetry(hess @ jac.G_U[j]) for j in range(params.dim)))

        A0 = symmetrizer(x, params)
        off_block.append(_frobenius(A0[con, dis]) / _frobenius(A0))
        a0_min.append(float(scipy.linalg.eigvalsh(0.5 * (A0 + A0.T))[0]))

        M = dissipation_matrix(x, params)
        H = hess[dis, dis] @ M
        product = A0[dis, dis] @ H
        a0h_gap.append(_frobenius(product - M) / _frobenius(M))
        m_min.append(float(scipy.linalg.eigvalsh(0.5 * (product + product.T))[0]))

        back = from_normal(to_normal(x, params), params)
        roundtrip.append(_relative(back - x, x))

    report = StructureReport()
    report.add(_row(check, "eta_F_symmetry", f_sym, symmetry_tol))
    report.add(_row(check, "eta_G_symmetry", g_sym, symmetry_tol))
    report.add(_row(check, "jacobian_richardson", richardson, 1e-4))
    report.add(_row(check, "a0_offdiagonal_block", off_block, block_tol))
    report.add(_row(check, "a0_min_eigenvalue", -np.asarray(a0_min), PD_THRESHOLD))
    report.add(_row(check, "a0h_equals_m", a0h_gap, block_tol))
    report.add(_row(check, "a0h_min_eigenvalue", -np.asarray(m_min), PD_THRESHOLD))
    report.add(_row(check, "normal_roundtrip", roundtrip, 1e-12))
    return _note_shortfall(report, sampler)


def _convection_spectrum(nf, direction: int, epsilon: float):
    """Generalized eigenvalues of (A0 C, A0) with C = A_j + B_j/eps.

    Returns:
        Tuple (eigenvalues ascending, relative asymmetry of A0 C, largest
        relative imaginary part of the similar matrix L^-1 (A0 C) L^-T)
    """
    C = nf.A[direction] + nf.B[direction] / epsilon
    S = nf.A0 @ C
    A0 = 0.5 * (nf.A0 + nf.A0.T)
    values = scipy.linalg.eigh(0.5 * (S + S.T), A0, eigvals_only=True)

    L = scipy.linalg.cholesky(A0, lower=True)
    K = scipy.linalg.solve_triangular(L, scipy.linalg.solve_triangular(L, S.T, lower=True).T, lower=True)
    imag = np.max(np.abs(np.linalg.eigvals(K).imag)) / max(np.max(np.abs(values)), 1e-300)
    return values, _asymmetry(S), float(imag)


def check_hyperbolicity(
    sampler: StateSampler,
    params: ModelParams,
    direction: int = 0,
    count: int = 100,
    symmetry_tol: float = 1e-6,
    imag_tol: float = 1e-8,
    speed_tol: float = 1e-6,
    sweep: Sequence[float] = (1e-3, 1e-4, 1e-5),
    slope_tol: float = 0.1,
) -> StructureReport:
    """Real spectrum of A_j + B_j/eps via the A0-weighted eigenproblem.

    For dim=1 the generalized eigenvalues are compared with the closed-form
    characteristic speeds. The largest speed must scale like 1/eps as eps
    decreases along `sweep`.
    """
    if not 0 <= direction < params.dim:
        raise ValueError(f"Direction {direction} out of range for dim={params.dim}")

    check = _label(f"hyperbolicity_x{direction}", params)
    layout = get_layout(params.dim)
    U = sampler.draw(count)

    asym, imag, agreement, slopes = [], [], [], []
    for x in U:
        nf = normal_matrices(x, params)
        values, s_asym, s_imag = _convection_spectrum(nf, direction, params.epsilon)
        asym.append(s_asym)
        imag.append(s_imag)

        if params.dim == 1:
            speeds = characteristic_speeds(x, params)
            agreement.append(_relative(np.sort(values) - speeds, speeds))

        largest = [np.max(np.abs(_convection_spectrum(nf, direction, eps)[0])) for eps in sweep]
        slopes.append(abs(_loglog_slope(sweep, largest) + 1.0))

    rest = np.zeros(layout.n_state)
    rest[layout.rho] = 1.0
    rest[layout.energy] = params.c_v
    values, _, _ = _convection_spectrum(normal_matrices(rest, params), direction, params.epsilon)
    mirror = np.abs(values + values[::-1]) / np.max(np.abs(values))

    report = StructureReport()
    report.add(_row(check, "a0_convection_symmetry", asym, symmetry_tol))
    report.add(_row(check, "imaginary_part", imag, imag_tol))
    if params.dim == 1:
        report.add(_row(check, "closed_form_speeds", agreement, speed_tol))
    report.add(_row(check, "speed_eps_slope", slopes, slope_tol,
                    note="|slope + 1| of max|lambda| against eps"))
    report.add(_row(check, "rest_state_symmetry", mirror, 1e-8))
    return _note_shortfall(report, sampler)


def check_equilibrium_blocks(
    sampler: StateSampler,
    params: ModelParams,
    count: int = 100,
    magnitudes: Sequence[float] = (1e-1, 1e-2, 1e-3),
    block_tol: float = 1e-8,
    a0_slope: float = 1.9,
    cross_slope: float = 0.9,
) -> StructureReport:
    """Blocks that vanish at equilibrium and their rates away from it.

    B_j^{I,I}(V^I, 0) must vanish; A0^{I,I}(V) - eta_{U^I U^I}(U(V^I, 0))
    must decay at least quadratically in |V^II| and eta_{U^II U^I} at least
    linearly.
    """
    check = _label("equilibrium_blocks", params)
    layout = get_layout(params.dim)
    con, dis = layout.conserved, layout.dissipative

    base = sampler.draw(count, equilibrium=True)
    b_defects = []
    for x in base:
        nf = normal_matrices(x, params)
        b_defects.append(max(float(np.max(np.abs(nf.B[j][con, con]))) for j in range(params.dim)))

    directions = sampler.directions(len(base))
    a0_defects, cross_defects = [], []
    exact = 0
    for x, n in zip(base, directions):
        reference = eta_hessian(x, params)[con, con]
        a0_gap, cross = [], []
        for s in magnitudes:
            U = from_normal(NormalState(V_I=x[con], V_II=s * n), params)
            a0_gap.append(_frobenius(symmetrizer(U, params)[con, con] - reference))
            cross.append(_frobenius(eta_hessian(U, params)[dis, con]))
        slope = _decay_slope(magnitudes, a0_gap, ROUNDOFF * _frobenius(reference))
        if slope is None:
            exact += 1
            a0_defects.append(0.0)
        else:
            a0_defects.append(a0_slope - slope)
        cross_defects.append(cross_slope - _loglog_slope(magnitudes, cross))

    report = StructureReport()
    report.add(_row(check, "b_ii_at_equilibrium", b_defects, block_tol))
    report.add(_row(check, "a0_ii_quadratic_slope", a0_defects, 0.0,
                    note=f"defect = {a0_slope} - slope; exact identity at {exact} samples"))
    report.add(_row(check, "eta_cross_block_slope", cross_defects, 0.0,
                    note=f"defect = {cross_slope} - slope"))
    return _note_shortfall(report, sampler)


def check_dissipation(
    sampler: StateSampler,
    params: ModelParams,
    count: int = 100,
    sigma_tol: float = 1e-12,
) -> StructureReport:
    """Coercivity of the source, sign of entropy production and M = (K^FNS)^-1."""
    check = _label("dissipation", params)
    U = sampler.draw(count)
    report = StructureReport()

    if len(U) == 0:
        for name in ("source_coercivity", "entropy_production_sign", "action_matches_matrix",
                     "fns_inverse_gap", "source_at_equilibrium", "relaxation_decay"):
            report.add(_row(check, name, [], 0.0))
        return _note_shortfall(report, sampler)

    Y = dissipative_variables(U, params)
    MY = dissipation_action(U, Y, params)
    M = dissipation_matrix(U, params)
    ratio = np.sum(Y * MY, axis=-1) / np.sum(Y * Y, axis=-1)
    c0 = float(np.min(ratio))
    report.add(_row(check, "source_coercivity", -ratio, PD_THRESHOLD, note=f"c0={c0:.6e}"))

    sigma = entropy_production(U, params)
    report.add(_row(check, "entropy_production_sign", sigma, sigma_tol))

    dense = np.einsum("...ij,...j->...i", M, Y)
    report.add(_row(check, "action_matches_matrix",
                    [_relative(a - b, b) for a, b in zip(MY, dense)], 1e-12))

    gap = [_frobenius(m - k) / _frobenius(m) for m, k in zip(M, fns_inverse(U, params))]
    report.add(_row(check, "fns_inverse_gap", gap, 1e-12,
                    note="exact identity for constant entropy weights"))

    layout = get_layout(params.dim)
    equilibrium = U.copy()
    equilibrium[:, layout.dissipative] = 0.0
    report.add(_row(check, "source_at_equilibrium",
                    np.max(np.abs(relaxation_source(equilibrium, params)), axis=-1), 1e-15))

    before = np.linalg.norm(Y, axis=-1)
    h = 0.1 * params.epsilon**2
    after = np.linalg.norm(dissipative_variables(relax_exact(U, h, params), params), axis=-1)
    report.add(_row(check, "relaxation_decay", after / before - 1.0, 0.0,
                    note="relative change of |eta_{U^II}| over one relaxation step"))
    return _note_shortfall(report, sampler)


def check_entropy_production(
    trajectory: Trajectory,
    params: ModelParams,
    sigma_tol: float = 1e-12,
    increase_tol: float = 1e-8,
    drift_tol: float = 1e-12,
) -> StructureReport:
    """Entropy balance along a generalized-system run.

    Rows: pointwise sigma <= tol on every snapshot, per-step relative
    increase of the total entropy, and per-step conservation drift.
    """
    check = "entropy_production_run"
    sigma_max = []
    for index, field in enumerate(trajectory.snapshots):
        sigma = entropy_production(field.U, params)
        worst = int(np.argmax(sigma))
        sigma_max.append(float(sigma[worst]))
        if sigma[worst] > sigma_tol:
            logger.warning(
                f"Positive entropy production {sigma[worst]:.3e} at cell {worst}, "
                f"snapshot {index} (t={field.t:.6g})"
            )

    report = StructureReport()
    report.add(_row(check, "pointwise_sigma", sigma_max, sigma_tol))
    report.add(CheckResult(
        check=check,
        name="total_entropy_increase",
        samples=trajectory.steps,
        max_defect=trajectory.max_entropy_increase if trajectory.steps else float("nan"),
        threshold=increase_tol,
    ))
    report.add(CheckResult(
        check=check,
        name="conservation_drift",
        samples=trajectory.steps,
        max_defect=trajectory.max_drift if trajectory.steps else float("nan"),
        threshold=drift_tol,
    ))
    return report


def _cubic(points: np.ndarray) -> np.ndarray:
    return points[..., 0] ** 3


def check_concavity_lemmas(
    params: ModelParams,
    trials: int = 10_000,
    seed: int = 0,
    tol: float = 1e-12,
) -> StructureReport:
    """Midpoint-concavity witnesses for the entropy transforms.

    Covers s_eq itself, its perspective rho s_eq(1/rho, Z/rho), the
    composition s_eq(nu, e - |v|^2/2) and the full generalized entropy in
    (nu, v, e, w, c). A non-concave cubic serves as a negative control.
    """
    check = "concavity"
    report = StructureReport()
    s_eq = equilibrium_entropy(params)
    d = params.dim
    n_sym = get_layout(d).n_sym

    def generalized(points: np.ndarray) -> np.ndarray:
        nu = points[..., 0]
        u = internal_energy(points[..., 1 : 2 + d])
        w = points[..., 2 + d : 2 + 2 * d]
        c = points[..., 2 + 2 * d :]
        return entropy_generalized(nu, u, w, c, params)

    def positive_energy(points: np.ndarray) -> np.ndarray:
        return internal_energy(points[..., 1 : 2 + d]) > 0.0

    # e >= 1 + d/2 keeps u >= 1 on the whole velocity box
    low_v, high_v = -np.ones(d), np.ones(d)
    e_low, e_high = 1.0 + 0.5 * d, 10.0 + 0.5 * d
    cases = [
        ("equilibrium_entropy", s_eq, box_sampler([0.1, 0.1], [10.0, 10.0]), None),
        ("perspective", perspective(s_eq), box_sampler([0.1, 0.1], [10.0, 10.0]), None),
        (
            "composition",
            compose(s_eq, internal_energy, split=1),
            box_sampler(np.r_[0.1, low_v, e_low], np.r_[10.0, high_v, e_high]),
            positive_energy,
        ),
        (
            "generalized_entropy",
            generalized,
            box_sampler(
                np.r_[0.1, low_v, e_low, -np.ones(d + n_sym)],
                np.r_[10.0, high_v, e_high, np.ones(d + n_sym)],
            ),
            positive_energy,
        ),
    ]
    for index, (name, f, sampler, domain) in enumerate(cases):
        result = concavity_witness(
            f, sampler, trials, tol=tol, rng=np.random.default_rng(seed + index), domain=domain
        )
        note = f"violations={result.violations}"
        if result.dropped:
            note += f"; {result.dropped} pairs outside the domain"
        report.add(CheckResult(
            check=check,
            name=name,
            samples=result.trials,
            max_defect=-result.worst_gap,
            threshold=0.0,
            note=note,
        ))

    control = concavity_witness(
        _cubic, box_sampler([-1.0], [1.0]), trials, tol=tol, rng=np.random.default_rng(seed)
    )
    report.add(CheckResult(
        check=check,
        name="negative_control",
        samples=control.trials,
        max_defect=0.0 if not control.passed else 1.0,
        threshold=0.0,
        note="x^3 on (-1, 1) must be rejected",
    ))
    return report

