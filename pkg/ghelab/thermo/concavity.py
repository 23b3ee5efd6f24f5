"""Midpoint-concavity witness and the function transforms it is used on."""

import logging
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, Field

from ..errors import DomainError
from ..models.params import ModelParams
from .eos import eos_equilibrium

logger = logging.getLogger(__name__)

ScalarFunction = Callable[[np.ndarray], np.ndarray]
Sampler = Callable[[np.random.Generator, int], np.ndarray]


class ConcavityResult(BaseModel):
    """Outcome of a midpoint-concavity test."""

    passed: bool = Field(description="True iff every sampled pair satisfied the inequality")
    trials: int = Field(ge=0, description="Number of pairs actually tested")
    dropped: int = Field(default=0, ge=0, description="Pairs discarded as outside the domain of f")
    violations: int = Field(ge=0, description="Number of failing pairs")
    worst_gap: float = Field(
        description="Smallest f(mid) - (f(x)+f(y))/2 + tol over all pairs"
    )

    def __bool__(self) -> bool:
        return self.passed


def concavity_witness(
    f: ScalarFunction,
    sampler: Sampler,
    trials: int,
    tol: float = 1e-12,
    rng: Optional[np.random.Generator] = None,
    domain: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> ConcavityResult:
    """Test f((x+y)/2) >= (f(x)+f(y))/2 - tol on random pairs.

    Pairs with an endpoint outside `domain` are dropped and counted. The
    domain must be convex, so the midpoint of a kept pair is inside it.

    Args:
        f: Vectorized function mapping points (n, k) to values (n,)
        sampler: Callable (rng, count) -> points (count', k) with count' <= count
        trials: Number of pairs requested
        tol: Absolute slack
        rng: Random generator (a fixed-seed generator is used when omitted)
        domain: Optional mask (n, k) -> (n,) of points where f is defined

    Returns:
        ConcavityResult; a run with zero pairs never passes. An f that
        still rejects a point gives an inconclusive result instead of raising.
    """
    if rng is None:
        rng = np.random.default_rng(0)

    x = np.asarray(sampler(rng, trials), dtype=float)
    y = np.asarray(sampler(rng, trials), dtype=float)
    count = min(len(x), len(y))
    x, y = x[:count], y[:count]

    dropped = 0
    if domain is not None and count:
        keep = np.asarray(domain(x), dtype=bool) & np.asarray(domain(y), dtype=bool)
        dropped = int(count - np.count_nonzero(keep))
        x, y = x[keep], y[keep]
        count = len(x)

    if count < trials:
        logger.warning(
            f"Concavity sampler yielded {count} of {trials} requested pairs ({dropped} outside the domain)"
        )
    if count == 0:
        return ConcavityResult(passed=False, trials=0, dropped=dropped, violations=0, worst_gap=float("nan"))

    try:
        gap = f(0.5 * (x + y)) - 0.5 * (f(x) + f(y)) + tol
    except DomainError as exc:
        logger.warning(f"Concavity test inconclusive: {exc}")
        return ConcavityResult(
            passed=False, trials=0, dropped=dropped + count, violations=0, worst_gap=float("nan")
        )

    violations = int(np.count_nonzero(gap < 0.0))
    return ConcavityResult(
        passed=violations == 0,
        trials=count,
        dropped=dropped,
        violations=violations,
        worst_gap=float(np.min(gap)),
    )


def perspective(f: ScalarFunction) -> ScalarFunction:
    """g(rho, Z) = rho f(1/rho, Z/rho), for points laid out as (rho, Z...)."""

    def g(points: np.ndarray) -> np.ndarray:
        rho = points[..., 0]
        inner = np.concatenate([(1.0 / rho)[..., None], points[..., 1:] / rho[..., None]], axis=-1)
        return rho * f(inner)

    return g


def compose(f: ScalarFunction, g: ScalarFunction, split: int) -> ScalarFunction:
    """h(x, z) = f(x, g(z)), where x is the first `split` coordinates."""

    def h(points: np.ndarray) -> np.ndarray:
        x = points[..., :split]
        z = points[..., split:]
        return f(np.concatenate([x, g(z)[..., None]], axis=-1))

    return h


def equilibrium_entropy(params: ModelParams) -> ScalarFunction:
    """s_eq as a function of points (nu, u)."""

    def s_eq(points: np.ndarray) -> np.ndarray:
        return eos_equilibrium(points[..., 0], points[..., 1], params)[0]

    return s_eq


def internal_energy(points: np.ndarray) -> np.ndarray:
    """u(v, e) = e - |v|^2/2 for points laid out as (v..., e)."""
    v = points[..., :-1]
    return points[..., -1] - 0.5 * np.sum(v * v, axis=-1)


def box_sampler(low: np.ndarray, high: np.ndarray) -> Sampler:
    """Uniform sampler on the box [low, high]."""
    low = np.asarray(low, dtype=float)
    high = np.asarray(high, dtype=float)

    def sample(rng: np.random.Generator, count: int) -> np.ndarray:
        return rng.uniform(low, high, size=(count, low.size))

    return sample
