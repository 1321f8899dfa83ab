import cmath
import math

import numpy as np
import pytest
from scipy.special import jv
from scipy.stats import poisson

from src.core.exceptions import ConvergenceError, FockTruncationWarning, OffOptimumWarning, ValidationError
from src.models.entities import CoherentState
from src.simulators import physics, qstate


def test_coherent_amplitudes_are_poissonian():
    state = qstate.coherent_fock_amplitudes(math.sqrt(10.0))
    k = np.arange(state.K + 1)
    assert state.K == qstate.default_fock_cutoff(10.0)
    assert np.allclose(np.abs(state.amps) ** 2, poisson.pmf(k, 10.0), atol=1e-14)
    assert state.tail < 1e-12
    assert state.status == "ok"


def test_coherent_amplitude_phases():
    state = qstate.coherent_fock_amplitudes(2.0 * cmath.exp(0.3j), K=12)
    phases = np.angle(state.amps[1:6])
    assert np.allclose(phases, 0.3 * np.arange(1, 6))


def test_vacuum_state():
    state = qstate.coherent_fock_amplitudes(0.0, K=4)
    assert state.amps[0] == 1.0
    assert np.all(state.amps[1:] == 0.0)


def test_small_cutoff_is_flagged():
    with pytest.warns(FockTruncationWarning):
        state = qstate.coherent_fock_amplitudes(math.sqrt(10.0), K=5)
    assert state.status == "truncated"
    assert state.tail > 1e-6


def test_superposition_is_normalized():
    state = qstate.fock_superposition([1.0, 1.0j, 0.0])
    assert state.norm_squared == pytest.approx(1.0)
    with pytest.raises(ValidationError):
        qstate.fock_superposition([0.0, 0.0])


def test_modulation_rotates_coherent_state(optimum):
    design = optimum(3)
    alpha = math.sqrt(5.0)
    t = design.carriers.period_w / 8
    state = qstate.coherent_fock_amplitudes(alpha)
    modulated = qstate.modulate_fock_state(state, design, t, 0.4)
    phase = qstate.total_phase(design, t, 0.4)
    rotated = qstate.coherent_fock_amplitudes(alpha * cmath.exp(-1j * phase), K=state.K)
    assert modulated.norm_squared == pytest.approx(state.norm_squared, abs=1e-14)
    assert np.allclose(modulated.amps, rotated.amps, atol=1e-12)


def test_total_phase_is_reduced(optimum):
    design = optimum(2)
    t = design.carriers.period_w / 8
    depth = physics.design_depth(design)
    phase = qstate.total_phase(design, t, 0.0)
    unreduced = design.carriers.omega_op * t + depth.chi + physics.modulated_phase(depth, t, 0.0)
    assert abs(phase) < 2 * math.pi
    assert abs(cmath.exp(-1j * phase) - cmath.exp(-1j * unreduced)) < 1e-9


@pytest.mark.parametrize("N", [1, 2])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_ode_matches_closed_form(optimum, N, k):
    design = optimum(N)
    for t0 in (0.0, design.carriers.period_w / 8):
        result = qstate.integrate_amplitude_ode(design, t0, 0.0, k)
        assert result.error < 1e-6
        assert result.halving_delta < 1e-6
        assert result.steps >= 2000


def test_ode_off_optimum(single):
    design = single.with_geometry(W=0.6 * single.geometry.W, D=1.3 * single.geometry.W, N=3)
    result = qstate.integrate_amplitude_ode(design, 0.0, 1.1, 2)
    assert result.error < 1e-6
    assert abs(result.factor) == pytest.approx(1.0)


def test_ode_rejects_coarse_steps(single):
    with pytest.raises(ValidationError):
        qstate.integrate_amplitude_ode(single, 0.0, 0.0, 1, steps_per_period=100)


def test_encoding_at_optimum(optimum):
    design = optimum(10)
    alpha = CoherentState.from_photon_number(10.0).alpha
    depth = physics.design_depth(design)
    for b in (0.0, math.pi / 3, math.pi):
        symbol = qstate.encode_coherent_symbol(alpha, design, b)
        assert symbol.theta == pytest.approx(10 * depth.delta_theta * math.cos(b), abs=1e-9)
        assert symbol.alpha_i == pytest.approx(alpha * cmath.exp(-1j * symbol.theta))
    assert abs(qstate.encode_coherent_symbol(alpha, design, math.pi / 2).theta) < 1e-12


def test_encoding_off_optimum_warns(single):
    design = single.with_geometry(W=0.5 * single.geometry.W)
    with pytest.warns(OffOptimumWarning):
        qstate.encode_coherent_symbol(1.0, design, 0.0)


def test_rotation_matrix_is_proper():
    rotation = qstate.rotation_matrix(0.7)
    assert np.linalg.det(rotation) == pytest.approx(1.0)
    assert np.allclose(rotation @ rotation.T, np.eye(2))
    x, p = qstate.apply_rotation(0.7, 1.2, -0.4)
    expected = complex(1.2, -0.4) * cmath.exp(-0.7j)
    assert x == pytest.approx(expected.real)
    assert p == pytest.approx(expected.imag)
    with pytest.raises(ValidationError):
        qstate.rotation_matrix(float("inf"))


def test_trajectory_starts_at_encoded_symbol(optimum):
    design = optimum(4)
    trajectory = qstate.phase_space_trajectory(2.0, design, 0.5, [0.0])
    assert trajectory[0] == pytest.approx(qstate.encode_coherent_symbol(2.0, design, 0.5).alpha_i)


def test_narrowband_residual_grows_over_the_period(optimum):
    design = optimum(4)
    period = design.carriers.period_w
    short = qstate.narrowband_residual(design, 0.0, np.linspace(0.0, 1e-4 * period, 11))
    full = qstate.narrowband_residual(design, 0.0, np.linspace(0.0, period, 101))
    assert short < 1e-3
    assert full > 10 * short
    assert qstate.narrowband_residual(design, 0.0, []) == 0.0


def test_ode_across_ten_element_array(optimum):
    design = optimum(10)
    result = qstate.integrate_amplitude_ode(design, design.carriers.period_w / 3, 0.9, 1)
    assert result.error < 1e-6


@pytest.mark.parametrize("n_ph", [10.0, 100.0])
def test_coherence_is_preserved(optimum, n_ph):
    design = optimum(5)
    alpha = math.sqrt(n_ph)
    state = qstate.coherent_fock_amplitudes(alpha)
    phase = qstate.total_phase(design, 0.0, 1.0)
    modulated = qstate.modulate_fock_state(state, design, 0.0, 1.0)
    expected = qstate.coherent_fock_amplitudes(alpha * cmath.exp(-1j * phase), K=state.K)
    assert np.max(np.abs(modulated.amps - expected.amps)) < 1e-12


@pytest.mark.parametrize("N", [1, 5, 10, 12])
def test_symbol_sidebands_sum_to_encoded_factor(optimum, N):
    design = optimum(N)
    depth = physics.design_depth(design)
    assert abs(N * depth.delta_theta) <= 2.5
    for b in np.linspace(0.0, 2.0 * math.pi, 13):
        amps = qstate.symbol_sideband_amplitudes(design, b, S=25)
        expected = cmath.exp(-1j * N * depth.delta_theta * math.cos(b))
        assert abs(complex(np.sum(amps.amps)) - expected) < 1e-10


def test_symbol_sideband_weights_use_minus_j_powers(optimum):
    design = optimum(5)
    amps = qstate.symbol_sideband_amplitudes(design, 0.0, S=25)
    z = physics.design_depth(design).delta_theta_N
    assert z == pytest.approx(5 * physics.design_depth(design).delta_theta)
    assert amps.amplitude(1) == pytest.approx(-1j * jv(1, z), abs=1e-13)
    assert amps.amplitude(2) == pytest.approx(-jv(2, z), abs=1e-13)
    assert amps.amplitude(-1) == pytest.approx(1j * jv(-1, z), abs=1e-13)
    assert amps.norm_squared == pytest.approx(1.0, abs=1e-14)


def test_symbol_sidebands_off_optimum(single):
    design = single.with_geometry(W=0.6 * single.geometry.W, D=1.3 * single.geometry.W, N=3)
    depth = physics.design_depth(design)
    for b in (0.0, 0.8, 2.5):
        theta = physics.modulated_phase(depth, 0.0, b)
        summed = complex(np.sum(qstate.symbol_sideband_amplitudes(design, b).amps))
        assert abs(summed - cmath.exp(-1j * theta)) < 1e-10


def test_rotation_inverse_and_quarter_turn():
    for theta in (0.3, 1.7, -2.9):
        x, p = qstate.apply_rotation(-theta, *qstate.apply_rotation(theta, 0.8, -1.3))
        assert x == pytest.approx(0.8, abs=1e-14)
        assert p == pytest.approx(-1.3, abs=1e-14)
    x, p = qstate.apply_rotation(math.pi / 2, 0.8, -1.3)
    assert x == pytest.approx(-1.3, abs=1e-15)
    assert p == pytest.approx(-0.8, abs=1e-15)


def test_ode_step_halving_uses_given_tolerance(single):
    with pytest.raises(ConvergenceError):
        qstate.integrate_amplitude_ode(single, 0.0, 0.0, 1, tolerance=1e-30)
    result = qstate.integrate_amplitude_ode(single, 0.0, 0.0, 1, tolerance=1e-3)
    assert result.halving_delta < 1e-3
