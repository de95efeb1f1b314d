"""State preparation: Bragg two-mode rotation and relative-phase imprinting.

The Bragg pulse is modeled as an ideal rotation between the two coupled
ladder indices (the two-photon detuning selects exactly one pair), and the
free-evolution delay is applied as an explicit relative phase on the lower
index; the physical alternative differs only by a global phase.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .core import LadderState, TWO_PI, new_ladder_state

#: Amplitude outside the coupled pair above this level breaks the two-mode model.
_SUPPORT_TOL = 1e-12


@dataclass(frozen=True)
class BraggPulse:
    """Two-mode rotation: pulse area (pi/2 for an equal split), coupling phase,
    and the pair of ladder indices it couples (upper, lower = upper - 1)."""

    area: float = math.pi / 2
    coupling_phase: float = 0.0
    target_pair: tuple[int, int] = (0, -1)

    def __post_init__(self):
        if not (0.0 <= self.area <= TWO_PI):
            raise ValueError(f"pulse area must lie in [0, 2*pi], got {self.area}")
        upper, lower = self.target_pair
        if upper - lower != 1:
            raise ValueError("target pair must be adjacent ladder indices "
                             f"(upper - lower == 1), got {self.target_pair}")


def apply_bragg(state: LadderState, pulse: BraggPulse) -> LadderState:
    """Rotate the amplitudes of the coupled pair; everything else is untouched.

    a_up'  = cos(area/2) a_up - i e^(+i chi) sin(area/2) a_lo
    a_lo'  = -i e^(-i chi) sin(area/2) a_up + cos(area/2) a_lo
    """
    upper, lower = pulse.target_pair
    iu = state.index_of(upper)
    il = state.index_of(lower)
    outside = np.abs(state.amplitudes).copy()
    outside[iu] = 0.0
    outside[il] = 0.0
    if outside.max(initial=0.0) > _SUPPORT_TOL:
        raise ValueError("state has support outside the Bragg-coupled pair "
                         f"{pulse.target_pair}; the two-mode rotation does not apply")

    c = math.cos(pulse.area / 2.0)
    s = math.sin(pulse.area / 2.0)
    chi = cmath.exp(1j * pulse.coupling_phase)
    a_up = state.amplitudes[iu]
    a_lo = state.amplitudes[il]
    amps = state.amplitudes.copy()
    amps[iu] = c * a_up - 1j * chi * s * a_lo
    amps[il] = -1j * s * a_up / chi + c * a_lo
    return state.with_amplitudes(amps)


def accumulate_phase(state: LadderState, phi: float) -> LadderState:
    """Multiply the n = -1 amplitude by e^(i*phi) (free evolution for the delay,
    up to a global phase)."""
    amps = state.amplitudes.copy()
    amps[state.index_of(-1)] *= cmath.exp(1j * phi)
    return state.with_amplitudes(amps)


def prepare_superposition(phi: float, n_min: int, n_max: int,
                          beta: float = 0.0) -> LadderState:
    """The kicked-sequence input state (|0> - i e^(i*phi) |-1>)/sqrt(2).

    Composition of the ideal pi/2 Bragg pulse on the seed |0> and the
    relative-phase accumulation.
    """
    seed = new_ladder_state(n_min, n_max, beta=beta, seed_index=0)
    return accumulate_phase(apply_bragg(seed, BraggPulse()), phi)
