"""Numerical time evolution on the momentum ladder.

One drive period is a lattice pulse followed by free evolution. The pulse
operator exp(-i*K*cos(theta)) is applied as a banded convolution with matrix
elements <n|...|n'> = (-i)^(n-n') J_(n-n')(K); free evolution multiplies each
amplitude by exp(-i*tau*(n+beta)^2/2). This route never uses the closed-form
resonant solution, so the two can cross-validate.

Truncation policy is fail-loud: if probability reaches the ladder edge, or a
pulse stops conserving the norm because mass fell off the ends, the evolution
aborts with a TruncationError carrying a widening hint instead of silently
reflecting or renormalizing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import kernels
from .bessel import bessel_row
from .core import LadderState

#: Kernel half-width beyond the pulse strength; J_d(K) is below double
#: precision long before d reaches ceil(K) + 60.
KERNEL_MARGIN = 60

#: Relative norm drift that counts as truncation.
NORM_TOL = 1e-12

#: Boundary amplitude (relative to the peak) that counts as edge contact.
EDGE_TOL = 1e-12

_QUARTER_TURNS = np.array([1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j])


class TruncationError(RuntimeError):
    """Probability reached the ladder edge; widen the ladder and re-run."""


class SubstepError(RuntimeError):
    """Finite-pulse time slicing too coarse for the requested tolerance."""


@dataclass(frozen=True)
class PulseProfile:
    """Temporal shape of one lattice pulse.

    delta: idealized instantaneous kick (scaled_width must be 0).
    rectangular: constant intensity over scaled_width, integrated with
    `substeps` symmetric split steps.
    """

    shape: str = "delta"
    scaled_width: float = 0.0
    substeps: int = 1

    def __post_init__(self):
        if self.shape not in ("delta", "rectangular"):
            raise ValueError(f"unknown pulse shape {self.shape!r}")
        if self.shape == "delta" and self.scaled_width != 0.0:
            raise ValueError("delta pulses must have scaled_width == 0")
        if self.shape == "rectangular" and self.scaled_width <= 0.0:
            raise ValueError("rectangular pulses need scaled_width > 0")
        if self.substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {self.substeps}")

    @property
    def is_delta(self) -> bool:
        return self.scaled_width == 0.0


DELTA_PULSE = PulseProfile()


def kick_kernel(K: float) -> np.ndarray:
    """Convolution stencil of exp(-i*K*cos(theta)): (-i)^d J_d(K) for
    |d| <= ceil(K) + KERNEL_MARGIN."""
    if K < 0:
        raise ValueError(f"kick strength must be >= 0, got {K}")
    half = math.ceil(K) + KERNEL_MARGIN
    row = bessel_row(K, half)
    offsets = np.arange(-half, half + 1)
    values = row[np.abs(offsets)]
    # J_{-d} = (-1)^d J_d
    values = np.where((offsets < 0) & (offsets % 2 != 0), -values, values)
    return _QUARTER_TURNS[offsets % 4] * values


def free_phase_factors(indices: np.ndarray, beta: float, tau: float) -> np.ndarray:
    """exp(-i*tau*(n+beta)^2/2) for each ladder index.

    The angle is reduced modulo 2*pi in units of pi before exponentiating,
    which keeps large-index phases accurate and makes the resonant case
    (tau = 4*pi, beta = 0) give exactly-unit factors.
    """
    half_turns = tau / (2.0 * math.pi)
    reduced = np.fmod(half_turns * (np.asarray(indices) + beta) ** 2, 2.0)
    return np.exp(-1j * math.pi * reduced)


def _check_edges(psi: np.ndarray) -> None:
    peak = np.abs(psi).max()
    if peak == 0.0:
        return
    if abs(psi[0]) > EDGE_TOL * peak or abs(psi[-1]) > EDGE_TOL * peak:
        raise TruncationError(
            "probability has reached the ladder edge; widen the ladder "
            "(see widen_if_needed) and re-run")


def _convolve_checked(psi: np.ndarray, kernel: np.ndarray,
                      norm_tol: float = NORM_TOL) -> np.ndarray:
    _check_edges(psi)
    norm_sq = float(np.vdot(psi, psi).real)
    out = kernels.convolve_banded(psi, kernel)
    drift = abs(float(np.vdot(out, out).real) - norm_sq)
    if drift > norm_tol * max(1.0, norm_sq):
        raise TruncationError(
            f"pulse lost {drift:.3e} of the norm to the ladder edge; widen "
            "the ladder (see widen_if_needed) and re-run")
    return out


def apply_kick(state: LadderState, K: float) -> LadderState:
    """One instantaneous pulse: psi'_n = sum_n' (-i)^(n-n') J_(n-n')(K) psi_n'."""
    psi = _convolve_checked(np.ascontiguousarray(state.amplitudes), kick_kernel(K))
    return state.with_amplitudes(psi)


def free_evolve(state: LadderState, tau: float) -> LadderState:
    """Kinetic evolution for a scaled duration tau (diagonal phases)."""
    phases = free_phase_factors(state.indices, state.beta, tau)
    return state.with_amplitudes(state.amplitudes * phases)


def iterate_periods(state: LadderState, K: float, tau: float, kicks: int,
                    profile: PulseProfile = DELTA_PULSE,
                    norm_tol: float = NORM_TOL):
    """Generator of amplitude arrays after each of `kicks` periods.

    Stroboscopic view of the evolution: one yield per pulse + free-evolution
    period. Yielded arrays are reused working buffers only in the sense that
    consumers get a fresh array each period; they may be kept without copying.
    """
    kicks = _check_kicks(kicks)
    if not profile.is_delta and profile.scaled_width >= tau:
        raise ValueError("pulse width must be smaller than the period "
                         f"({profile.scaled_width} >= {tau})")
    return _iterate_impl(state, K, tau, kicks, profile, norm_tol)


def _iterate_impl(state, K, tau, kicks, profile, norm_tol):
    indices = state.indices
    psi = np.ascontiguousarray(state.amplitudes)
    if profile.is_delta:
        kernel = kick_kernel(K)
        phases = free_phase_factors(indices, state.beta, tau)
        for _ in range(kicks):
            psi = _convolve_checked(psi, kernel, norm_tol) * phases
            yield psi
        return
    width = profile.scaled_width
    sub_kernel = kick_kernel(K / profile.substeps)
    half_step = free_phase_factors(indices, state.beta,
                                   width / profile.substeps / 2.0)
    rest = free_phase_factors(indices, state.beta, tau - width)
    for _ in range(kicks):
        for _ in range(profile.substeps):
            psi = _convolve_checked(psi * half_step, sub_kernel, norm_tol)
            psi = psi * half_step
        psi = psi * rest
        yield psi


def evolve_kicked(state: LadderState, K: float, tau: float,
                  kicks: int) -> LadderState:
    """Evolve through `kicks` periods of instantaneous pulse + free evolution."""
    psi = state.amplitudes
    for psi in iterate_periods(state, K, tau, kicks):
        pass
    return state.with_amplitudes(psi)


def evolve_finite_pulse(state: LadderState, K: float, tau: float,
                        profile: PulseProfile, kicks: int,
                        verify_substeps: bool = False,
                        substep_tol: float = 1e-10) -> LadderState:
    """Evolve with finite-width pulses of total area K.

    Each pulse integrates H = p^2/2 + (K/width)*cos(theta) over the pulse
    width with `profile.substeps` symmetric split steps, then evolves freely
    for the remaining tau - width. A delta profile (or zero width) reduces to
    evolve_kicked. With verify_substeps the evolution is repeated at doubled
    substeps and a SubstepError is raised if any amplitude moves by more than
    substep_tol.
    """
    psi = state.amplitudes
    for psi in iterate_periods(state, K, tau, kicks, profile):
        pass
    out = state.with_amplitudes(psi)
    if verify_substeps and not profile.is_delta:
        refined = evolve_finite_pulse(state, K, tau,
                                      replace(profile, substeps=2 * profile.substeps),
                                      kicks)
        change = float(np.abs(refined.amplitudes - out.amplitudes).max())
        if change > substep_tol:
            raise SubstepError(
                f"doubling substeps moved amplitudes by {change:.3e} "
                f"(> {substep_tol:.1e}); increase profile.substeps")
    return out


def find_converged_substeps(state: LadderState, K: float, tau: float,
                            width: float, kicks: int, tol: float = 1e-10,
                            start: int = 4, max_doublings: int = 14) -> int:
    """Smallest substep count (doubling from `start`) whose further doubling
    changes no amplitude by more than tol."""
    substeps = start
    profile = PulseProfile("rectangular", width, substeps)
    current = evolve_finite_pulse(state, K, tau, profile, kicks)
    for _ in range(max_doublings):
        refined = evolve_finite_pulse(
            state, K, tau, replace(profile, substeps=2 * substeps), kicks)
        if float(np.abs(refined.amplitudes - current.amplitudes).max()) <= tol:
            return substeps
        substeps *= 2
        current = refined
    raise SubstepError(f"no convergence to {tol:.1e} within "
                       f"{max_doublings} doublings from {start} substeps")


def widen_if_needed(state: LadderState, K: float, kicks: int,
                    margin: int = 60) -> LadderState:
    """Extend the ladder to ceil(K*kicks) + margin beyond the occupied support.

    Amplitudes are preserved; bounds never shrink. With K == 0 or kicks == 0
    nothing spreads, so the state is returned unchanged.
    """
    kicks = _check_kicks(kicks)
    if K < 0:
        raise ValueError(f"kick strength must be >= 0, got {K}")
    if K == 0 or kicks == 0:
        return state
    occupied = np.nonzero(np.abs(state.amplitudes) > 0.0)[0]
    if occupied.size == 0:
        lo_support, hi_support = 0, 0
    else:
        lo_support = state.n_min + int(occupied[0])
        hi_support = state.n_min + int(occupied[-1])
    reach = math.ceil(K * kicks) + margin
    n_min = min(state.n_min, lo_support - reach)
    n_max = max(state.n_max, hi_support + reach)
    if n_min == state.n_min and n_max == state.n_max:
        return state
    amps = np.zeros(n_max - n_min + 1, dtype=np.complex128)
    offset = state.n_min - n_min
    amps[offset:offset + state.size] = state.amplitudes
    return LadderState(state.beta, n_min, n_max, amps)


def _check_kicks(kicks) -> int:
    if isinstance(kicks, float) and not kicks.is_integer():
        raise ValueError(f"kick count must be an integer, got {kicks}")
    kicks = int(kicks)
    if kicks < 0:
        raise ValueError(f"kick count must be >= 0, got {kicks}")
    return kicks
