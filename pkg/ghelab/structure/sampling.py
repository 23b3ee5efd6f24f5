"""Seeded sampling of admissible states on the compact test set."""

import logging
from typing import Optional

import numpy as np

from ..models.layout import get_layout
from ..models.params import ModelParams
from ..thermo.entropy import conserved_from_primitives

logger = logging.getLogger(__name__)

RHO_RANGE = (0.5, 2.0)
U_RANGE = (0.5, 2.0)
VELOCITY_BOUND = 1.0
DISSIPATIVE_BOUND = 0.5


class StateSampler:
    """Draws random states with rho, u in [0.5, 2], |v_i| <= 1 and |w|, |c| <= 0.5.

    The sampler has a finite budget. Once it is spent, draw() returns fewer
    states than requested and records the shortfall.
    """

    def __init__(self, params: ModelParams, seed: int = 0, budget: Optional[int] = None):
        """Initialize the sampler.

        Args:
            params: Model parameters (fixes the dimension)
            seed: Seed of the numpy Generator
            budget: Total number of states this sampler may produce (unbounded when None)
        """
        self.params = params
        self.layout = get_layout(params.dim)
        self.seed = seed
        self.budget = budget
        self.drawn = 0
        self.shortfall = 0
        self._rng = np.random.default_rng(seed)

    @property
    def remaining(self) -> Optional[int]:
        if self.budget is None:
            return None
        return max(self.budget - self.drawn, 0)

    def _take(self, count: int) -> int:
        granted = count if self.remaining is None else min(count, self.remaining)
        if granted < count:
            self.shortfall += count - granted
            logger.warning(f"State sampler exhausted: {granted} of {count} states granted")
        self.drawn += granted
        return granted

    def draw(self, count: int, equilibrium: bool = False) -> np.ndarray:
        """Draw up to `count` admissible states of shape (k, n_state).

        Args:
            count: Requested number of states
            equilibrium: Draw states with w = c = 0
        """
        k = self._take(count)
        d = self.params.dim
        rng = self._rng

        rho = rng.uniform(*RHO_RANGE, size=k)
        u = rng.uniform(*U_RANGE, size=k)
        v = rng.uniform(-VELOCITY_BOUND, VELOCITY_BOUND, size=(k, d))
        w = rng.uniform(-DISSIPATIVE_BOUND, DISSIPATIVE_BOUND, size=(k, d))
        c = rng.uniform(-DISSIPATIVE_BOUND, DISSIPATIVE_BOUND, size=(k, self.layout.n_sym))
        if equilibrium:
            w[:] = 0.0
            c[:] = 0.0
        return conserved_from_primitives(rho, v, u, w, c, self.params)

    def directions(self, count: int) -> np.ndarray:
        """Unit directions in the dissipative block, shape (k, n_dissipative)."""
        k = self._take(count)
        raw = self._rng.normal(size=(k, self.layout.n_dissipative))
        return raw / np.linalg.norm(raw, axis=-1, keepdims=True)
