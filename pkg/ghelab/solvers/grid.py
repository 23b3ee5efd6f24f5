"""Periodic 1D grids, fields on them, and grid-level difference operators."""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydanticField, model_validator


class Grid1D(BaseModel):
    """Uniform periodic grid on [0, L)."""

    model_config = ConfigDict(frozen=True)

    n_cells: int = PydanticField(
        default=256,
        ge=8,
        description="Number of cells"
    )
    length: float = PydanticField(
        default=1.0,
        gt=0,
        description="Domain length L"
    )

    @property
    def dx(self) -> float:
        return self.length / self.n_cells

    @property
    def centers(self) -> np.ndarray:
        """Cell-center coordinates."""
        return (np.arange(self.n_cells) + 0.5) * self.dx

    def refined(self, factor: int) -> "Grid1D":
        return Grid1D(n_cells=self.n_cells * factor, length=self.length)

    def coarsened(self, factor: int) -> "Grid1D":
        if self.n_cells % factor:
            raise ValueError(f"{self.n_cells} cells cannot be coarsened by {factor}")
        return Grid1D(n_cells=self.n_cells // factor, length=self.length)


class _GridState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: Grid1D
    U: np.ndarray
    t: float = 0.0

    @model_validator(mode="after")
    def check_shape(self):
        if self.U.ndim != 2 or self.U.shape[0] != self.grid.n_cells:
            raise ValueError(
                f"State array of shape {self.U.shape} does not match {self.grid.n_cells} cells"
            )
        return self

    def totals(self) -> np.ndarray:
        """Integral of each row over the domain."""
        return np.sum(self.U, axis=0) * self.grid.dx

    def advanced(self, U: np.ndarray, t: float):
        """Copy of this field with a new state and time."""
        return type(self)(grid=self.grid, U=U, t=t)


class Field(_GridState):
    """Generalized-system state (N, 5) on a periodic grid."""


class NsfField(_GridState):
    """Navier-Stokes-Fourier state (rho, rho v, rho e) of shape (N, 3)."""


def ddx(f: np.ndarray, dx: float) -> np.ndarray:
    """Second-order periodic central derivative along axis 0."""
    return (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) / (2.0 * dx)


def ddx4(f: np.ndarray, dx: float) -> np.ndarray:
    """Fourth-order periodic central derivative along axis 0."""
    return (
        -np.roll(f, -2, axis=0)
        + 8.0 * np.roll(f, -1, axis=0)
        - 8.0 * np.roll(f, 1, axis=0)
        + np.roll(f, 2, axis=0)
    ) / (12.0 * dx)


def restrict(U: np.ndarray, factor: int) -> np.ndarray:
    """Average groups of `factor` neighbouring cells."""
    n = U.shape[0]
    if n % factor:
        raise ValueError(f"{n} cells cannot be restricted by {factor}")
    return U.reshape((n // factor, factor) + U.shape[1:]).mean(axis=1)


def l2_norm(f: np.ndarray, dx: float) -> float:
    """Discrete L2 norm sqrt(sum |f_i|^2 dx) over cells and components."""
    return float(np.sqrt(np.sum(f * f) * dx))


def linf_norm(f: np.ndarray) -> float:
    return float(np.max(np.abs(f))) if f.size else 0.0
