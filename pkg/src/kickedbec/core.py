"""Unit conventions and the momentum-ladder state container.

All dynamics run in dimensionless units: momentum in units of two photon
recoils (2*hbar*k_l), angle theta = 2*k_l*x, phases in radians. Physical
quantities (seconds, rad/s, 1/m) live only in PhysicalParams and
ExperimentSequence and cross into scaled units through the conversion
helpers below.

Conversions are computed through ratios to the Talbot time so that exactly
resonant inputs stay exactly resonant in floating point (T equal to the
Talbot time gives tau == 4*pi bit-for-bit).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

#: Recoil angular frequency of the reference species (rad/s).
DEFAULT_RECOIL_FREQ = 2.37e4
#: Lattice wavenumber for a 780.233 nm standing wave (1/m). Informational.
DEFAULT_LATTICE_WAVENUMBER = TWO_PI / 780.233e-9


@dataclass(frozen=True)
class PhysicalParams:
    """Physical scales of the lattice. The Talbot time is always derived."""

    recoil_freq: float = DEFAULT_RECOIL_FREQ
    lattice_wavenumber: float = DEFAULT_LATTICE_WAVENUMBER

    def __post_init__(self):
        if self.recoil_freq <= 0:
            raise ValueError(f"recoil_freq must be > 0, got {self.recoil_freq}")
        if self.lattice_wavenumber <= 0:
            raise ValueError("lattice_wavenumber must be > 0, "
                             f"got {self.lattice_wavenumber}")

    @property
    def talbot_time(self) -> float:
        """Resonant kick period pi/(2*recoil_freq), in seconds."""
        return math.pi / (2.0 * self.recoil_freq)


@dataclass(frozen=True)
class ScaledParams:
    """Dimensionless drive parameters: kick strength K, period tau, quasimomentum beta."""

    kick_strength: float
    scaled_period: float
    quasimomentum: float = 0.0

    def __post_init__(self):
        if self.kick_strength < 0:
            raise ValueError(f"kick_strength must be >= 0, got {self.kick_strength}")
        if self.scaled_period <= 0:
            raise ValueError(f"scaled_period must be > 0, got {self.scaled_period}")
        check_quasimomentum(self.quasimomentum)


def check_quasimomentum(beta: float) -> float:
    if not (-0.5 <= beta < 0.5):
        raise ValueError(f"quasimomentum must lie in [-1/2, 1/2), got {beta}")
    return float(beta)


def scaled_period(kick_period: float, params: PhysicalParams) -> float:
    """Dimensionless period tau = 4*pi*T/T_Talbot for a kick period T in seconds."""
    if kick_period <= 0:
        raise ValueError(f"kick period must be > 0, got {kick_period}")
    return 4.0 * math.pi * (kick_period / params.talbot_time)


def period_from_scaled(tau: float, params: PhysicalParams) -> float:
    """Inverse of scaled_period: kick period in seconds for a dimensionless tau."""
    if tau <= 0:
        raise ValueError(f"scaled period must be > 0, got {tau}")
    return (tau / (4.0 * math.pi)) * params.talbot_time


def bragg_phase(phase_delay: float, params: PhysicalParams) -> float:
    """Relative phase 4*omega_r*delay accumulated during free evolution, in [0, 2*pi).

    One Talbot time of delay is a full turn, so the value is computed from
    the delay/Talbot ratio and reduced there; a delay of exactly the Talbot
    time returns exactly 0.
    """
    if phase_delay < 0:
        raise ValueError(f"phase delay must be >= 0, got {phase_delay}")
    half_turns = 2.0 * (phase_delay / params.talbot_time)
    return math.pi * math.fmod(half_turns, 2.0)


@dataclass(frozen=True)
class LadderState:
    """Complex amplitudes on the momentum ladder (n + beta) * 2*hbar*k_l.

    Value-like: the amplitude array is copied on construction and frozen, so
    states are safe to share between threads. All evolution operations return
    new states.
    """

    beta: float
    n_min: int
    n_max: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not (self.n_min <= 0 <= self.n_max):
            raise ValueError(f"ladder must contain the origin index: "
                             f"[{self.n_min}, {self.n_max}]")
        check_quasimomentum(self.beta)
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.size,):
            raise ValueError(f"expected {self.size} amplitudes, got shape {amps.shape}")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def size(self) -> int:
        return self.n_max - self.n_min + 1

    @property
    def indices(self) -> np.ndarray:
        """Ladder indices n_min..n_max."""
        return np.arange(self.n_min, self.n_max + 1)

    @property
    def momenta(self) -> np.ndarray:
        """Momenta (n + beta) in units of 2*hbar*k_l."""
        return self.indices + self.beta

    def index_of(self, n: int) -> int:
        if not (self.n_min <= n <= self.n_max):
            raise IndexError(f"ladder index {n} outside [{self.n_min}, {self.n_max}]")
        return n - self.n_min

    def amplitude(self, n: int) -> complex:
        return complex(self.amplitudes[self.index_of(n)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def with_amplitudes(self, amplitudes: np.ndarray) -> "LadderState":
        """New state on the same ladder with replaced amplitudes."""
        return LadderState(self.beta, self.n_min, self.n_max, amplitudes)


def new_ladder_state(n_min: int, n_max: int, beta: float = 0.0,
                     seed_index: int = 0) -> LadderState:
    """Unit-amplitude state at seed_index, zero elsewhere. Norm is exactly 1."""
    if not (n_min <= seed_index <= n_max):
        raise IndexError(f"seed index {seed_index} outside [{n_min}, {n_max}]")
    amps = np.zeros(n_max - n_min + 1, dtype=np.complex128)
    amps[seed_index - n_min] = 1.0
    return LadderState(beta=beta, n_min=n_min, n_max=n_max, amplitudes=amps)


@dataclass(frozen=True)
class ExperimentSequence:
    """Physical-unit description of one drive timeline: Bragg pulse, phase
    evolution delay, then a train of lattice pulses."""

    bragg_duration: float = 60e-6
    bragg_area: float = math.pi / 2
    phase_delay: float = 0.0
    kick_count: int = 0
    kick_period: float = math.pi / (2.0 * DEFAULT_RECOIL_FREQ)
    pulse_width: float = 0.0
    kick_strength: float = 0.6

    def __post_init__(self):
        for name in ("bragg_duration", "phase_delay", "kick_period", "pulse_width"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")
        if not (0.0 <= self.bragg_area <= TWO_PI):
            raise ValueError(f"bragg_area must lie in [0, 2*pi], got {self.bragg_area}")
        if self.kick_count < 0:
            raise ValueError(f"kick_count must be >= 0, got {self.kick_count}")
        if self.kick_strength < 0:
            raise ValueError(f"kick_strength must be >= 0, got {self.kick_strength}")
        if self.pulse_width >= self.kick_period:
            raise ValueError("pulse_width must be smaller than kick_period "
                             f"({self.pulse_width} >= {self.kick_period})")
