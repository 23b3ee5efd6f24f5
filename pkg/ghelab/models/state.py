"""Pydantic models for states, conjugate variables and derived bundles.

ConservedState is the pointwise, user-facing form of a state. The numerical
kernels work on flat arrays of shape (..., n_state); the remaining models
bundle those arrays and are returned by the kernels.
"""

from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .layout import get_layout


class ConservedState(BaseModel):
    """Conserved state U = (rho, rho v, rho e, rho w, rho c) at one point."""

    rho: float = Field(
        gt=0,
        description="Density"
    )
    m: List[float] = Field(
        description="Momentum rho v (length d)"
    )
    E_tot: float = Field(
        description="Total energy rho e"
    )
    W: List[float] = Field(
        description="Heat variable rho w (length d)"
    )
    C: List[float] = Field(
        description="Stress variable rho c, packed symmetric (length d(d+1)/2)"
    )

    @model_validator(mode="after")
    def check_lengths(self) -> "ConservedState":
        """Check vector lengths agree with one spatial dimension."""
        dim = len(self.m)
        if dim not in (1, 2, 3):
            raise ValueError(f"Momentum must have 1-3 components, got {dim}")
        if len(self.W) != dim:
            raise ValueError(f"W has {len(self.W)} components, expected {dim}")
        n_sym = dim * (dim + 1) // 2
        if len(self.C) != n_sym:
            raise ValueError(f"C has {len(self.C)} packed entries, expected {n_sym}")
        return self

    @property
    def dim(self) -> int:
        """Spatial dimension."""
        return len(self.m)

    @property
    def velocity(self) -> np.ndarray:
        return np.asarray(self.m) / self.rho

    @property
    def internal_energy(self) -> float:
        """Specific internal energy u = e - |v|^2/2."""
        v = self.velocity
        return self.E_tot / self.rho - 0.5 * float(v @ v)

    @property
    def stress_matrix(self) -> np.ndarray:
        """rho c as a symmetric d x d matrix."""
        return get_layout(self.dim).unpack(np.asarray(self.C))

    def to_vector(self) -> np.ndarray:
        """Flatten into the state-vector layout."""
        return np.concatenate([
            [self.rho], self.m, [self.E_tot], self.W, self.C,
        ]).astype(float)

    @classmethod
    def from_vector(cls, vector: Sequence[float], dim: int) -> "ConservedState":
        """Build from a flat state vector.

        Args:
            vector: State vector of length n_state
            dim: Spatial dimension

        Returns:
            ConservedState instance
        """
        layout = get_layout(dim)
        vec = np.asarray(vector, dtype=float)
        if vec.shape != (layout.n_state,):
            raise ValueError(f"Expected vector of length {layout.n_state}, got shape {vec.shape}")
        return cls(
            rho=float(vec[layout.rho]),
            m=vec[layout.mom].tolist(),
            E_tot=float(vec[layout.energy]),
            W=vec[layout.heat].tolist(),
            C=vec[layout.stress].tolist(),
        )

    @classmethod
    def from_primitive(
        cls,
        rho: float,
        v: Sequence[float],
        u: float,
        w: Optional[Sequence[float]] = None,
        c: Optional[np.ndarray] = None,
    ) -> "ConservedState":
        """Build from density, velocity, internal energy and per-mass w, c.

        Args:
            rho: Density
            v: Velocity (length d)
            u: Specific internal energy
            w: Per-mass heat variable (defaults to zero)
            c: Per-mass stress variable as a d x d symmetric matrix (defaults to zero)

        Returns:
            ConservedState instance
        """
        v_arr = np.asarray(v, dtype=float)
        dim = v_arr.shape[0]
        layout = get_layout(dim)
        w_arr = np.zeros(dim) if w is None else np.asarray(w, dtype=float)
        c_packed = np.zeros(layout.n_sym) if c is None else layout.pack(np.asarray(c))
        e = u + 0.5 * float(v_arr @ v_arr)
        return cls(
            rho=rho,
            m=(rho * v_arr).tolist(),
            E_tot=rho * e,
            W=(rho * w_arr).tolist(),
            C=(rho * c_packed).tolist(),
        )


class _ArrayBundle(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class ConjugateSet(_ArrayBundle):
    """Conjugate variables of the generalized entropy.

    All fields carry the leading (batch) shape of the input state; vector
    fields add a trailing axis of length d, tensor fields a packed axis.
    """

    theta: np.ndarray = Field(description="Non-equilibrium temperature")
    pi: np.ndarray = Field(description="Non-equilibrium pressure")
    q: np.ndarray = Field(description="Heat flux -w/alpha1")
    tau: np.ndarray = Field(description="Viscous stress -theta c/alpha2 (packed)")
    zeta_w: np.ndarray = Field(description="Dissipative entropic variable s_w")
    zeta_c: np.ndarray = Field(description="Dissipative entropic variable s_c (packed)")


class EntropyDerivatives(_ArrayBundle):
    """Mathematical entropy with its gradient and Hessian."""

    eta: np.ndarray = Field(description="eta(U) = -rho s")
    grad: np.ndarray = Field(description="eta_U")
    hess: np.ndarray = Field(description="eta_UU")


class NormalState(_ArrayBundle):
    """Normal-form variables V = (U^I, eta_{U^II})."""

    V_I: np.ndarray = Field(description="Conserved block (rho, rho v, rho e)")
    V_II: np.ndarray = Field(description="eta_{U^II} = (-q, -tau/theta), packed")

    @property
    def vector(self) -> np.ndarray:
        """V as one array in the state layout."""
        return np.concatenate([self.V_I, self.V_II], axis=-1)

    @classmethod
    def from_vector(cls, vector: np.ndarray, dim: int) -> "NormalState":
        layout = get_layout(dim)
        vec = np.asarray(vector, dtype=float)
        return cls(V_I=vec[..., layout.conserved], V_II=vec[..., layout.dissipative])


class FluxPair(_ArrayBundle):
    """Convective and stiff fluxes, shape (..., d, n_state)."""

    F: np.ndarray = Field(description="Convective flux per direction")
    G: np.ndarray = Field(description="Stiff flux per direction")
