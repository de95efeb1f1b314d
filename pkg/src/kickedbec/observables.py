"""Measured quantities: momentum distributions, moments, current fits, and
quasimomentum-ensemble averages.

Ensemble members evolve independently and are averaged with numpy's pairwise
summation, so results are deterministic and insensitive to evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import LadderState, check_quasimomentum
from .prep import prepare_superposition
from .propagator import DELTA_PULSE, PulseProfile, iterate_periods

_SUM_TOL = 1e-10


@dataclass(frozen=True)
class MomentumDistribution:
    """Probabilities P(n) over ladder indices for one quasimomentum."""

    beta: float
    n_min: int
    probabilities: np.ndarray

    def __post_init__(self):
        check_quasimomentum(self.beta)
        probs = np.asarray(self.probabilities, dtype=float)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probabilities must be a non-empty 1-d array")
        if probs.min() < 0.0:
            raise ValueError(f"negative probability {probs.min()}")
        total = probs.sum()
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")
        probs = probs.copy()
        probs.flags.writeable = False
        object.__setattr__(self, "probabilities", probs)

    @property
    def n_max(self) -> int:
        return self.n_min + self.probabilities.size - 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def momenta(self) -> np.ndarray:
        return self.indices + self.beta


@dataclass(frozen=True)
class CurrentFit:
    """Least-squares line through a mean-momentum series."""

    slope: float
    intercept: float
    residual_rms: float
    points_used: int

    def __post_init__(self):
        if self.points_used < 2:
            raise ValueError("a current fit needs at least 2 points")


def distribution_of(state: LadderState) -> MomentumDistribution:
    """P(n) = |psi_n|^2."""
    return MomentumDistribution(beta=state.beta, n_min=state.n_min,
                                probabilities=state.probabilities())


def mean_momentum(dist: MomentumDistribution) -> float:
    """First moment sum_n (n + beta) P(n), in units of 2*hbar*k_l."""
    return float(np.dot(dist.momenta, dist.probabilities))


def kinetic_energy(dist: MomentumDistribution) -> float:
    """sum_n (n + beta)^2 P(n) / 2, in scaled units."""
    return float(np.dot(dist.momenta ** 2, dist.probabilities)) / 2.0


def fit_current(points: Iterable[tuple[float, float]]) -> CurrentFit:
    """Ordinary least-squares line through (kick number, mean momentum) pairs;
    the slope is the measured current per kick."""
    pts = [(float(t), float(p)) for t, p in points]
    if len(pts) < 2:
        raise ValueError("a current fit needs at least 2 points")
    ts = np.array([t for t, _ in pts])
    ps = np.array([p for _, p in pts])
    if np.unique(ts).size < 2:
        raise ValueError("a current fit needs at least 2 distinct kick numbers")
    slope, intercept = np.polyfit(ts, ps, 1)
    residuals = ps - (slope * ts + intercept)
    rms = float(np.sqrt(np.mean(residuals ** 2)))
    return CurrentFit(slope=float(slope), intercept=float(intercept),
                      residual_rms=rms, points_used=len(pts))


def momentum_series(state: LadderState, K: float, tau: float, kicks: int,
                    profile: PulseProfile = DELTA_PULSE) -> np.ndarray:
    """Mean momentum after 0, 1, ..., kicks periods (one evolution, recorded
    stroboscopically)."""
    momenta = state.momenta
    series = np.empty(kicks + 1)
    series[0] = float(np.dot(momenta, state.probabilities()))
    for t, psi in enumerate(iterate_periods(state, K, tau, kicks, profile),
                            start=1):
        series[t] = float(np.dot(momenta, np.abs(psi) ** 2))
    return series


def ensemble_current(K: float, tau: float, phi: float, kicks: int,
                     beta_samples: Sequence[float], margin: int = 60,
                     profile: PulseProfile = DELTA_PULSE) -> list[tuple[int, float]]:
    """Ensemble-averaged mean-momentum series [(t, <p>_avg)] for t = 0..kicks.

    Each quasimomentum evolves its own prepared superposition independently;
    the per-member mean momenta (which include the member's beta offset) are
    averaged across the ensemble.
    """
    betas = [check_quasimomentum(b) for b in beta_samples]
    if not betas:
        raise ValueError("beta_samples must not be empty")
    reach = math.ceil(K * kicks) + margin
    n_min, n_max = -1 - reach, reach
    rows = np.empty((len(betas), kicks + 1))
    for i, beta in enumerate(betas):
        state = prepare_superposition(phi, n_min, n_max, beta=beta)
        rows[i] = momentum_series(state, K, tau, kicks, profile=profile)
    averaged = rows.mean(axis=0)
    return [(t, float(averaged[t])) for t in range(kicks + 1)]


def beta_grid(count: int) -> np.ndarray:
    """`count` uniformly spaced quasimomenta, symmetric about 0, spacing 1/count."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    return (np.arange(count) - (count - 1) / 2.0) / count


def beta_uniform(count: int, seed: int) -> np.ndarray:
    """`count` quasimomenta drawn uniformly from [-1/2, 1/2)."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = np.random.default_rng(seed)
    return rng.uniform(-0.5, 0.5, size=count)


def beta_gaussian(count: int, sigma: float, seed: int) -> np.ndarray:
    """`count` quasimomenta from a zero-mean Gaussian of width sigma, wrapped
    into [-1/2, 1/2) (quasimomentum is periodic)."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    rng = np.random.default_rng(seed)
    draws = rng.normal(0.0, sigma, size=count)
    return np.mod(draws + 0.5, 1.0) - 0.5
