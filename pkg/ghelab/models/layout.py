"""Row layout of the flat state vector and packed symmetric tensors.

A state in d dimensions is stored as

    [rho, m_1..m_d, E, W_1..W_d, C_packed]

where C_packed holds the d(d+1)/2 entries C_ij with i <= j in
lexicographic order. Off-diagonal entries are multiplied by sqrt(2) so
that the dot product of two packed tensors equals A:B.
"""

import math
from functools import lru_cache
from typing import List, Tuple

import numpy as np

SQRT2 = math.sqrt(2.0)


class StateLayout:
    """Index bookkeeping for one spatial dimension."""

    def __init__(self, dim: int):
        """Initialize the layout.

        Args:
            dim: Spatial dimension (1, 2 or 3)

        Raises:
            ValueError: If dim is not 1, 2 or 3
        """
        if dim not in (1, 2, 3):
            raise ValueError(f"Spatial dimension must be 1, 2 or 3, got {dim}")

        self.dim = dim
        self.n_sym = dim * (dim + 1) // 2
        self.n_conserved = dim + 2
        self.n_dissipative = dim + self.n_sym
        self.n_state = self.n_conserved + self.n_dissipative

        self.rho = 0
        self.mom = slice(1, 1 + dim)
        self.energy = 1 + dim
        self.heat = slice(2 + dim, 2 + 2 * dim)
        self.stress = slice(2 + 2 * dim, self.n_state)
        self.conserved = slice(0, self.n_conserved)
        self.dissipative = slice(self.n_conserved, self.n_state)

        self.pairs: List[Tuple[int, int]] = [
            (i, j) for i in range(dim) for j in range(i, dim)
        ]
        self._rows = np.array([i for i, _ in self.pairs], dtype=int)
        self._cols = np.array([j for _, j in self.pairs], dtype=int)
        self.weights = np.array([1.0 if i == j else SQRT2 for i, j in self.pairs])
        self.diagonal = np.array([i == j for i, j in self.pairs])
        self.identity = self.diagonal.astype(float)

    def pack(self, matrix: np.ndarray) -> np.ndarray:
        """Pack symmetric matrices of shape (..., d, d) into (..., n_sym)."""
        matrix = np.asarray(matrix, dtype=float)
        return matrix[..., self._rows, self._cols] * self.weights

    def unpack(self, packed: np.ndarray) -> np.ndarray:
        """Unpack (..., n_sym) into symmetric matrices (..., d, d)."""
        packed = np.asarray(packed, dtype=float)
        entries = packed / self.weights
        out = np.zeros(packed.shape[:-1] + (self.dim, self.dim))
        out[..., self._rows, self._cols] = entries
        out[..., self._cols, self._rows] = entries
        return out

    def trace(self, packed: np.ndarray) -> np.ndarray:
        """Trace of packed tensors."""
        return np.sum(packed[..., self.diagonal], axis=-1)

    def deviator(self, packed: np.ndarray) -> np.ndarray:
        """Trace-free part of packed tensors."""
        return packed - (self.trace(packed) / self.dim)[..., None] * self.identity

    def pair_index(self, i: int, j: int) -> int:
        """Position of entry (i, j) in the packed vector."""
        return self.pairs.index((min(i, j), max(i, j)))

    def row_names(self) -> List[str]:
        """Readable names of the state rows."""
        axes = "xyz"[: self.dim]
        names = ["rho"] + [f"m_{a}" for a in axes] + ["E"]
        names += [f"W_{a}" for a in axes]
        names += [f"C_{axes[i]}{axes[j]}" for i, j in self.pairs]
        return names

    def __repr__(self) -> str:
        return f"StateLayout(dim={self.dim}, n_state={self.n_state})"


@lru_cache(maxsize=None)
def get_layout(dim: int) -> StateLayout:
    """Shared layout instance for a dimension."""
    return StateLayout(dim)
