# src/simulators/qstate.py
"""
Fock-space view of the converter: coherent-state amplitudes, the per-photon-number
phase imprinted by the array, an RK4 oracle for the amplitude equation, and the
phase-space rotation picture of symbol encoding.
"""
import logging
import math
import warnings
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT
from scipy.special import gammaln

from ..core.exceptions import (
    ConvergenceError,
    FockTruncationWarning,
    OffOptimumWarning,
    ValidationError,
)
from ..models.entities import (
    TWO_PI,
    AmplitudeOdeResult,
    CoherentState,
    ConverterDesign,
    EncodedSymbol,
    FockState,
    SidebandVector,
)
from ..utils.bessel import bessel_jn_symmetric
from . import physics

logger = logging.getLogger(__name__)

FOCK_TAIL_LIMIT = 1e-6
MIN_STEPS_PER_PERIOD = 1000
ODE_TOLERANCE = 1e-6
SYMBOL_SIDEBAND_ORDERS = 25


def default_fock_cutoff(n_ph: float) -> int:
    """K = ceil(n_ph + 10 sqrt(n_ph) + 10); Poisson tail below 1e-12 for n_ph <= 100."""
    return int(math.ceil(n_ph + 10.0 * math.sqrt(n_ph) + 10.0))


def coherent_fock_amplitudes(alpha: complex, K: Optional[int] = None) -> FockState:
    """C_k = exp(-|alpha|^2/2) alpha^k / sqrt(k!) for k = 0..K (log-space magnitudes)."""
    state = CoherentState(alpha)
    if K is None:
        K = default_fock_cutoff(state.n_ph)
    if K < 0:
        raise ValidationError("K", "must be >= 0")
    k = np.arange(K + 1)
    radius = abs(state.alpha)
    if radius == 0.0:
        amps = np.zeros(K + 1, dtype=complex)
        amps[0] = 1.0
        return FockState(amps=amps)
    log_magnitude = -0.5 * radius ** 2 + k * math.log(radius) - 0.5 * gammaln(k + 1)
    amps = np.exp(log_magnitude) * np.exp(1j * k * math.atan2(state.alpha.imag, state.alpha.real))
    fock = FockState(amps=amps)
    if fock.tail > FOCK_TAIL_LIMIT:
        logger.warning("Fock cutoff K=%d leaves tail %.3e for n_ph=%.3g", K, fock.tail, state.n_ph)
        warnings.warn(f"Fock cutoff K={K} leaves probability tail {fock.tail:.3e}",
                      FockTruncationWarning, stacklevel=2)
        fock = FockState(amps=amps, status="truncated")
    return fock


def fock_superposition(amps: Sequence[complex]) -> FockState:
    """Normalized superposition sum_k C_k |k>."""
    values = np.asarray(amps, dtype=complex)
    norm = math.sqrt(float(np.sum(np.abs(values) ** 2)))
    if norm == 0.0:
        raise ValidationError("amps", "superposition must have non-zero norm")
    return FockState(amps=values / norm)


def total_phase(design: ConverterDesign, t: float, b: float) -> float:
    """omega_op t + chi + theta_i(t), reduced modulo 2pi."""
    depth = physics.design_depth(design)
    carrier = math.fmod(design.carriers.omega_op * t, TWO_PI)
    return math.fmod(carrier + math.fmod(depth.chi, TWO_PI) + physics.modulated_phase(depth, t, b), TWO_PI)


def modulate_fock_state(state: FockState, design: ConverterDesign, t: float, b: float) -> FockState:
    """C~_k = C_k exp(-j k (omega_op t + chi + theta_i(t)))."""
    phase = total_phase(design, t, b)
    k = np.arange(state.K + 1)
    return FockState(amps=state.amps * np.exp(-1j * k * phase), status=state.status)


def _element_windows(design: ConverterDesign, t0: float):
    """Yield (start, stop, driven) time windows of the photon's passage."""
    mat, geo = design.material, design.geometry
    t_w, t_d, _ = physics.transit_times(mat, design.carriers, geo)
    t_g = geo.G * mat.n_op / SPEED_OF_LIGHT
    for n in range(geo.N):
        start = t0 + n * t_d
        yield start, start + t_w, True
        if n < geo.N - 1 and t_g > 0.0:
            yield start + t_w, start + t_w + t_g, False


def _integrate_slow_phase(design: ConverterDesign, t0: float, b: float, k: int, steps_per_period: int) -> Tuple[float, int]:
    """RK4 on dc/dt = j k omega_op kappa E_w(t) c in the frame rotating at k omega_op.

    Returns the unwrapped modulation phase -arg(c) and the number of steps taken.
    """
    car, mat, geo, drive = design.carriers, design.material, design.geometry, design.drive
    kappa = 0.5 * mat.eps_op * mat.r33 * geo.gamma
    rate = k * car.omega_op * kappa * drive.E_w
    omega_w = car.omega_w
    period = car.period_w

    def rhs(tau: float, value: complex, driven: bool) -> complex:
        if not driven:
            return 0j
        return 1j * rate * math.sin(omega_w * tau + b) * value

    amplitude = 1.0 + 0j
    phase = 0.0
    steps = 0
    for start, stop, driven in _element_windows(design, t0):
        count = max(1, int(math.ceil(steps_per_period * (stop - start) / period)))
        h = (stop - start) / count
        tau = start
        for _ in range(count):
            k1 = rhs(tau, amplitude, driven)
            k2 = rhs(tau + 0.5 * h, amplitude + 0.5 * h * k1, driven)
            k3 = rhs(tau + 0.5 * h, amplitude + 0.5 * h * k2, driven)
            k4 = rhs(tau + h, amplitude + h * k3, driven)
            updated = amplitude + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            # accumulate the step's phase increment so the total stays unwrapped
            phase -= math.atan2((updated / amplitude).imag, (updated / amplitude).real)
            amplitude = updated
            tau += h
            steps += 1
    return phase, steps


def integrate_amplitude_ode(design: ConverterDesign, t0: float, b: float, k: int,
                            steps_per_period: int = 2000, tolerance: float = ODE_TOLERANCE) -> AmplitudeOdeResult:
    """Numerically integrate j dC_k/dt = k omega_op (1 - (eps r33 / 2) gamma E_w(t)) C_k.

    The fast k*omega_op rotation is removed analytically; only the slow modulation
    phase is integrated, once at steps_per_period and once at twice that, and the
    two runs must agree within tolerance. The returned phase is
    k (omega_op t0 + chi) + numerical modulation phase, to be compared
    with k (omega_op t0 + chi + theta_i(t0)).
    """
    if steps_per_period < MIN_STEPS_PER_PERIOD:
        raise ValidationError("steps_per_period", f"must be >= {MIN_STEPS_PER_PERIOD}")
    if isinstance(k, bool) or k < 0:
        raise ValidationError("k", "must be a Fock index >= 0")
    depth = physics.design_depth(design)
    coarse, _ = _integrate_slow_phase(design, t0, b, k, steps_per_period)
    fine, steps = _integrate_slow_phase(design, t0, b, k, 2 * steps_per_period)
    delta = abs(fine - coarse)
    if delta > tolerance:
        raise ConvergenceError(f"step halving changed the phase by {delta:.3e} rad (k={k})")
    carrier = k * (design.carriers.omega_op * t0 + depth.chi)
    closed = carrier + k * physics.modulated_phase(depth, t0, b)
    logger.debug("ode k=%d: numeric=%.12f closed=%.12f halving=%.2e", k, fine, closed - carrier, delta)
    return AmplitudeOdeResult(
        k=k,
        phase=carrier + fine,
        closed_form_phase=closed,
        halving_delta=delta,
        steps=steps,
    )


def encode_coherent_symbol(alpha: complex, design: ConverterDesign, b: float) -> EncodedSymbol:
    """Symbol at the microwave zero-phase instant: theta_i = theta(t=0) = N delta_theta cos b at the optimum."""
    if not physics.is_optimum(design):
        logger.warning("encoding on a non-optimum design; using the general offset form")
        warnings.warn("design is not at the optimum width/periodicity", OffOptimumWarning, stacklevel=2)
    depth = physics.design_depth(design)
    theta = physics.modulated_phase(depth, 0.0, b)
    alpha_i = complex(alpha) * complex(math.cos(theta), -math.sin(theta))
    return EncodedSymbol(b=b, theta=theta, alpha_i=alpha_i)


def symbol_sideband_amplitudes(design: ConverterDesign, b: float,
                               S: int = SYMBOL_SIDEBAND_ORDERS) -> SidebandVector:
    """(-j)^s J_s(delta_theta_N) exp(-j s b') for s = -S..S, with b' = b + phi_N - pi/2.

    Summed over s this is exp(-j delta_theta_N cos b'), the encoded symbol factor
    exp(-j theta_i); at the optimum that is exp(-j N delta_theta cos b).
    """
    if S < 1:
        raise ValidationError("S", "must be >= 1")
    depth = physics.design_depth(design)
    shifted = b + depth.phi_N - 0.5 * math.pi
    orders = np.arange(-S, S + 1)
    amps = (-1j) ** orders * bessel_jn_symmetric(S, depth.delta_theta_N) * np.exp(-1j * orders * shifted)
    return SidebandVector(S=S, amps=amps)


def rotation_matrix(theta: float) -> np.ndarray:
    """[[cos, sin], [-sin, cos]]: (x + jp) exp(-j theta) in real coordinates."""
    if not math.isfinite(theta):
        raise ValidationError("theta", "must be finite")
    cos_t, sin_t = math.cos(theta), math.sin(theta)
    return np.array([[cos_t, sin_t], [-sin_t, cos_t]])


def apply_rotation(theta: float, x: float, p: float) -> Tuple[float, float]:
    x_out, p_out = rotation_matrix(theta) @ np.array([x, p])
    return float(x_out), float(p_out)


def phase_space_trajectory(alpha: complex, design: ConverterDesign, b: float, t_grid: Sequence[float]) -> np.ndarray:
    """alpha * exp(-j theta_i(t)) over t_grid, carrier and propagation phase removed."""
    depth = physics.design_depth(design)
    times = np.asarray(t_grid, dtype=float)
    theta = depth.delta_theta_N * np.sin(depth.omega_w * times + depth.phi_N + b)
    return complex(alpha) * np.exp(-1j * theta)


def narrowband_residual(design: ConverterDesign, b: float, t_grid: Sequence[float]) -> float:
    """max_t |alpha_i(t) - alpha_i| / |alpha|: how far the symbol wanders within a microwave period."""
    times = np.asarray(t_grid, dtype=float)
    if times.size == 0:
        return 0.0
    exact = phase_space_trajectory(1.0, design, b, times)
    sampled = encode_coherent_symbol(1.0, design, b).alpha_i
    return float(np.max(np.abs(exact - sampled)))
