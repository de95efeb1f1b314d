"""Momentum-ladder simulator for a Bragg-prepared condensate kicked by a
pulsed optical lattice.

The package has two independent routes to the same physics: closed-form
resonant dynamics (`analytic`) and direct numerical evolution on the momentum
ladder (`propagator`), plus state preparation, observables, and a scenario
CLI that writes reproducible CSV datasets.
"""

from .bessel import BesselTable, bessel_j, bessel_row
from .core import (DEFAULT_LATTICE_WAVENUMBER, DEFAULT_RECOIL_FREQ,
                   ExperimentSequence, LadderState, PhysicalParams,
                   ScaledParams, bragg_phase, new_ladder_state,
                   period_from_scaled, scaled_period)
from .analytic import (ratchet_current, resonant_amplitude,
                       resonant_amplitude_row, resonant_mean_momentum,
                       resonant_probability, resonant_probability_row,
                       support_bound)
from .prep import BraggPulse, accumulate_phase, apply_bragg, prepare_superposition
from .propagator import (DELTA_PULSE, PulseProfile, SubstepError,
                         TruncationError, apply_kick, evolve_finite_pulse,
                         evolve_kicked, find_converged_substeps, free_evolve,
                         iterate_periods, kick_kernel, widen_if_needed)
from .observables import (CurrentFit, MomentumDistribution, beta_gaussian,
                          beta_grid, beta_uniform, distribution_of,
                          ensemble_current, fit_current, kinetic_energy,
                          mean_momentum, momentum_series)
from . import kernels

__version__ = "0.1.0"

__all__ = [
    "BesselTable", "bessel_j", "bessel_row",
    "DEFAULT_LATTICE_WAVENUMBER", "DEFAULT_RECOIL_FREQ",
    "ExperimentSequence", "LadderState", "PhysicalParams", "ScaledParams",
    "bragg_phase", "new_ladder_state", "period_from_scaled", "scaled_period",
    "ratchet_current", "resonant_amplitude", "resonant_amplitude_row",
    "resonant_mean_momentum", "resonant_probability",
    "resonant_probability_row", "support_bound",
    "BraggPulse", "accumulate_phase", "apply_bragg", "prepare_superposition",
    "DELTA_PULSE", "PulseProfile", "SubstepError", "TruncationError",
    "apply_kick", "evolve_finite_pulse", "evolve_kicked",
    "find_converged_substeps", "free_evolve", "iterate_periods",
    "kick_kernel", "widen_if_needed",
    "CurrentFit", "MomentumDistribution", "beta_gaussian", "beta_grid",
    "beta_uniform", "distribution_of", "ensemble_current", "fit_current",
    "kinetic_energy", "mean_momentum", "momentum_series",
    "kernels",
    "__version__",
]
