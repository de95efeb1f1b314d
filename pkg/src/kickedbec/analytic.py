"""Closed-form resonant dynamics of the Bragg-prepared superposition.

At exact resonance (tau = 4*pi, beta = 0) the whole pulse train collapses to
a single effective pulse of strength K*t, and the output amplitudes are
Bessel ladders. These expressions are the analytic route against which the
numerical propagator is cross-validated.
"""

from __future__ import annotations

import math

import numpy as np

from .bessel import BesselTable, bessel_j, bessel_row

__all__ = [
    "resonant_amplitude",
    "resonant_amplitude_row",
    "resonant_probability",
    "resonant_probability_row",
    "resonant_mean_momentum",
    "ratchet_current",
    "support_bound",
    "bessel_j",
    "bessel_row",
    "BesselTable",
]

# (-i)^m cycles with period 4; table lookup keeps the values exact.
_QUARTER_TURNS = (1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j)


def _minus_i_power(m: int) -> complex:
    return _QUARTER_TURNS[m % 4]


def _check_kick_count(t) -> int:
    """Kick counters are stroboscopic: integers only, never interpolated."""
    if isinstance(t, float) and not t.is_integer():
        raise ValueError(f"kick count must be an integer, got {t}")
    t = int(t)
    if t < 0:
        raise ValueError(f"kick count must be >= 0, got {t}")
    return t


def _check_strength(K: float) -> float:
    if K < 0:
        raise ValueError(f"kick strength must be >= 0, got {K}")
    return float(K)


def support_bound(K: float, t: int, margin: int = 60) -> int:
    """Ladder half-width outside which the resonant amplitudes are negligible.

    Bessel functions decay super-exponentially once the order exceeds the
    argument, so |m| <= ceil(K*t) + margin captures the distribution to well
    below double precision for the default margin.
    """
    return math.ceil(_check_strength(K) * _check_kick_count(t)) + margin


def resonant_amplitude(m: int, K: float, t: int, phi: float) -> complex:
    """Output amplitude at ladder index m after t resonant kicks of strength K.

    e^(-i*pi*m/2)/sqrt(2) * (J_m(K*t) - e^(i*phi) * J_{m+1}(K*t)); t = 0
    reproduces the prepared superposition (Bessel argument 0).
    """
    K = _check_strength(K)
    t = _check_kick_count(t)
    x = K * t
    jm = bessel_j(m, x)
    jm1 = bessel_j(m + 1, x)
    return _minus_i_power(m) / math.sqrt(2.0) * (jm - np.exp(1j * phi) * jm1)


def resonant_amplitude_row(n_min: int, n_max: int, K: float, t: int,
                           phi: float) -> np.ndarray:
    """resonant_amplitude evaluated on every index n_min..n_max (one Bessel pass)."""
    K = _check_strength(K)
    t = _check_kick_count(t)
    table = BesselTable.build(K * t, n_min, n_max + 1)
    orders = np.arange(n_min, n_max + 1)
    jm = table.values[:-1]
    jm1 = table.values[1:]
    prefactor = np.array([_minus_i_power(int(m)) for m in orders])
    return prefactor / math.sqrt(2.0) * (jm - np.exp(1j * phi) * jm1)


def resonant_probability(m: int, K: float, t: int, phi: float) -> float:
    """P(m) = (J_m^2 + J_{m+1}^2 - 2*cos(phi)*J_m*J_{m+1})/2 at argument K*t."""
    K = _check_strength(K)
    t = _check_kick_count(t)
    x = K * t
    jm = bessel_j(m, x)
    jm1 = bessel_j(m + 1, x)
    return 0.5 * (jm * jm + jm1 * jm1 - 2.0 * math.cos(phi) * jm * jm1)


def resonant_probability_row(n_min: int, n_max: int, K: float, t: int,
                             phi: float) -> np.ndarray:
    """resonant_probability evaluated on every index n_min..n_max."""
    K = _check_strength(K)
    t = _check_kick_count(t)
    table = BesselTable.build(K * t, n_min, n_max + 1)
    jm = table.values[:-1]
    jm1 = table.values[1:]
    return 0.5 * (jm * jm + jm1 * jm1 - 2.0 * math.cos(phi) * jm * jm1)


def resonant_mean_momentum(K: float, t: int, phi: float) -> float:
    """Mean momentum -1/2 - cos(phi)*K*t/2 after t resonant kicks (2*hbar*k_l units).

    Equals the first moment of resonant_probability: the two halves of the
    initial superposition contribute their mean -1/2, and the interference
    term sums to cos(phi)*K*t/2 by the Bessel recurrence and addition rules.
    """
    _check_strength(K)
    t = _check_kick_count(t)
    return -0.5 - math.cos(phi) * K * t / 2.0


def ratchet_current(K: float, phi: float) -> float:
    """Directed current -cos(phi)*K/2: momentum gained per kick at resonance."""
    _check_strength(K)
    return -math.cos(phi) * K / 2.0
