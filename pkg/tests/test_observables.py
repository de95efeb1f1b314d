"""Distributions, moments, current fits, and quasimomentum ensembles."""

import math

import numpy as np
import pytest

from kickedbec.analytic import (ratchet_current, resonant_mean_momentum,
                                resonant_probability_row, support_bound)
from kickedbec.core import new_ladder_state
from kickedbec.observables import (CurrentFit, MomentumDistribution,
                                   beta_gaussian, beta_grid, beta_uniform,
                                   distribution_of, ensemble_current,
                                   fit_current, kinetic_energy, mean_momentum,
                                   momentum_series)
from kickedbec.prep import prepare_superposition
from kickedbec.propagator import evolve_kicked

TAU_RES = 4.0 * math.pi


def test_distribution_of_prepared_state():
    dist = distribution_of(prepare_superposition(0.9, -8, 8))
    assert dist.probabilities[dist.indices.tolist().index(0)] == pytest.approx(
        0.5, abs=1e-15)
    assert dist.probabilities[dist.indices.tolist().index(-1)] == pytest.approx(
        0.5, abs=1e-15)
    assert dist.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
    assert dist.probabilities.min() >= 0.0


def test_distribution_matches_analytic_route():
    K, t, phi = 0.6, 5, math.pi
    bound = support_bound(K, t)
    state = prepare_superposition(phi, -1 - bound, bound)
    dist = distribution_of(evolve_kicked(state, K, TAU_RES, t))
    expected = resonant_probability_row(-1 - bound, bound, K, t, phi)
    assert np.abs(dist.probabilities - expected).max() < 1e-10


def test_distribution_validation():
    with pytest.raises(ValueError):
        MomentumDistribution(0.0, -1, np.array([0.5, 0.4]))  # sums to 0.9
    with pytest.raises(ValueError):
        MomentumDistribution(0.0, -1, np.array([1.1, -0.1]))


def test_mean_momentum_of_prepared_state():
    dist = distribution_of(prepare_superposition(0.0, -4, 4))
    assert mean_momentum(dist) == pytest.approx(-0.5, abs=1e-14)


def test_mean_momentum_includes_quasimomentum_offset():
    dist = distribution_of(new_ladder_state(-4, 4, beta=0.25, seed_index=0))
    assert mean_momentum(dist) == pytest.approx(0.25, abs=1e-15)


def test_mean_momentum_after_evolution_matches_closed_form():
    K = 0.6
    for t, phi in ((10, 0.0), (10, math.pi), (100, math.pi / 3)):
        bound = support_bound(K, t)
        state = prepare_superposition(phi, -1 - bound, bound)
        dist = distribution_of(evolve_kicked(state, K, TAU_RES, t))
        assert mean_momentum(dist) == pytest.approx(
            resonant_mean_momentum(K, t, phi), abs=1e-10)


def test_kinetic_energy_of_prepared_state():
    dist = distribution_of(prepare_superposition(0.0, -4, 4))
    assert kinetic_energy(dist) == pytest.approx(0.25, abs=1e-15)


def test_kinetic_energy_of_seed_is_zero():
    dist = distribution_of(new_ladder_state(-4, 4, seed_index=0))
    assert kinetic_energy(dist) == 0.0


def test_kinetic_energy_grows_ballistically_at_symmetric_phase():
    # brute-force moment of the closed-form distribution: E = (1 + (K t)^2)/4
    K, phi = 0.6, math.pi / 2
    energies = {}
    for t in (5, 10, 20):
        bound = support_bound(K, t)
        state = prepare_superposition(phi, -1 - bound, bound)
        energy = kinetic_energy(distribution_of(evolve_kicked(state, K, TAU_RES, t)))
        assert energy == pytest.approx((1.0 + (K * t) ** 2) / 4.0, abs=1e-10)
        energies[t] = energy
    # above the constant offset the growth is exactly quadratic in t
    growth = (energies[20] - 0.25) / (energies[10] - 0.25)
    assert growth == pytest.approx(4.0, abs=1e-10)


def test_fit_recovers_exact_line():
    fit = fit_current([(t, -0.5 - 0.3 * t) for t in range(1, 11)])
    assert fit.slope == pytest.approx(-0.3, abs=1e-12)
    assert fit.intercept == pytest.approx(-0.5, abs=1e-12)
    assert fit.residual_rms < 1e-12
    assert fit.points_used == 10


def test_fit_on_analytic_series_gives_current_law():
    K = 0.6
    for phi in (0.0, math.pi / 2, math.pi):
        series = [(t, resonant_mean_momentum(K, t, phi)) for t in range(1, 11)]
        fit = fit_current(series)
        assert fit.slope == pytest.approx(ratchet_current(K, phi), abs=1e-10)
        assert fit.residual_rms < 1e-10


def test_fit_current_reversal_is_exact():
    K = 0.6
    series0 = [(t, resonant_mean_momentum(K, t, 0.0)) for t in range(1, 21)]
    series_pi = [(t, resonant_mean_momentum(K, t, math.pi)) for t in range(1, 21)]
    assert fit_current(series0).slope == pytest.approx(
        -fit_current(series_pi).slope, abs=1e-10)


def test_fit_rejects_degenerate_input():
    with pytest.raises(ValueError):
        fit_current([(1, 0.0)])
    with pytest.raises(ValueError):
        fit_current([(1, 0.0), (1, 1.0)])
    with pytest.raises(ValueError):
        CurrentFit(0.0, 0.0, 0.0, 1)


def test_momentum_series_tracks_closed_form():
    K, phi = 0.6, 0.0
    bound = support_bound(K, 12)
    state = prepare_superposition(phi, -1 - bound, bound)
    series = momentum_series(state, K, TAU_RES, 12)
    expected = [resonant_mean_momentum(K, t, phi) for t in range(13)]
    assert np.abs(series - np.array(expected)).max() < 1e-10


def test_ensemble_with_single_sample_reduces_to_plain_series():
    series = ensemble_current(0.6, TAU_RES, math.pi, 6, [0.0])
    bound = support_bound(0.6, 6)
    state = prepare_superposition(math.pi, -1 - bound, bound)
    direct = momentum_series(state, 0.6, TAU_RES, 6)
    assert np.abs(np.array([p for _, p in series]) - direct).max() < 1e-13


def test_ensemble_rejects_empty_and_out_of_range_samples():
    with pytest.raises(ValueError):
        ensemble_current(0.6, TAU_RES, 0.0, 3, [])
    with pytest.raises(ValueError):
        ensemble_current(0.6, TAU_RES, 0.0, 3, [0.7])


def test_uniform_grid_dephases_the_current():
    series = ensemble_current(0.6, TAU_RES, 0.0, 10, beta_grid(201))
    fit = fit_current(series[1:])
    assert abs(fit.slope) < 0.02


def test_narrow_gaussian_preserves_the_current():
    # near-zero momentum spread: early-time current within 5% of -K/2
    betas = beta_gaussian(1001, 0.01, seed=20260809)
    series = ensemble_current(0.6, TAU_RES, 0.0, 4, betas)
    fit = fit_current(series[1:])
    assert fit.slope == pytest.approx(-0.3, rel=0.05)


def test_opposite_phases_average_to_zero_current():
    betas = beta_grid(7)
    for phi in (0.0, 1.1):
        fit_a = fit_current(ensemble_current(0.6, TAU_RES, phi, 6, betas)[1:])
        fit_b = fit_current(
            ensemble_current(0.6, TAU_RES, phi + math.pi, 6, betas)[1:])
        assert abs(fit_a.slope + fit_b.slope) < 1e-12


def test_beta_grid_properties():
    grid = beta_grid(201)
    assert grid.size == 201
    assert grid.min() >= -0.5 and grid.max() < 0.5
    assert 0.0 in grid
    assert grid.mean() == pytest.approx(0.0, abs=1e-15)
    assert np.allclose(np.diff(grid), 1.0 / 201)


def test_beta_samplers_are_seeded_and_in_range():
    a = beta_uniform(100, seed=5)
    b = beta_uniform(100, seed=5)
    assert np.array_equal(a, b)
    assert a.min() >= -0.5 and a.max() < 0.5
    g1 = beta_gaussian(100, 0.3, seed=5)
    g2 = beta_gaussian(100, 0.3, seed=5)
    assert np.array_equal(g1, g2)
    assert g1.min() >= -0.5 and g1.max() < 0.5
    with pytest.raises(ValueError):
        beta_grid(0)
    with pytest.raises(ValueError):
        beta_gaussian(10, -0.1, seed=0)
