# src/simulators/physics.py
"""
Closed-form modulation depths and phases of antenna-coupled electro-optic
phase modulators, for one element and for an N-element array.

Optimum geometry: W_o = pi*c / (omega_w * sqrt(eps_op)) and D_o = 2 * W_o.
sin(omega_w*sqrt(eps_op)*W/2c) peaks at W_o and vanishes at 2*W_o; at D_o the
N element contributions add to N*delta_theta.
"""
import logging
import math
from typing import Tuple

import numpy as np
from scipy.constants import c as SPEED_OF_LIGHT

from ..core.exceptions import ValidationError
from ..models.entities import (
    TWO_PI,
    Carriers,
    ConverterDesign,
    DepthResult,
    Geometry,
    MaterialParams,
    MicrowaveDrive,
)

logger = logging.getLogger(__name__)


def _half_transit_phase(mat: MaterialParams, car: Carriers, length: float) -> float:
    """omega_w * sqrt(eps_op) * length / (2c)"""
    return car.omega_w * mat.n_op * length / (2.0 * SPEED_OF_LIGHT)


def modulation_depth(mat: MaterialParams, car: Carriers, geo: Geometry, drive: MicrowaveDrive) -> float:
    """Signed single-element depth delta_theta (rad); negative for positive inputs."""
    prefactor = car.omega_op * mat.eps_op * mat.r33 * geo.gamma / car.omega_w
    return -prefactor * math.sin(_half_transit_phase(mat, car, geo.W)) * drive.E_w


def element_offset(mat: MaterialParams, car: Carriers, geo: Geometry) -> float:
    """Single-element offset phase phi = omega_w * sqrt(eps_op) * W / (2c)."""
    return _half_transit_phase(mat, car, geo.W)


def optimum_element_width(mat: MaterialParams, car: Carriers) -> float:
    return math.pi * SPEED_OF_LIGHT / (car.omega_w * mat.n_op)


def optimum_array_periodicity(mat: MaterialParams, car: Carriers) -> float:
    return 2.0 * optimum_element_width(mat, car)


def inter_element_phase(mat: MaterialParams, car: Carriers, geo: Geometry) -> float:
    """Delta = omega_w * sqrt(eps_op) * D / c, the microwave phase advance between element entries."""
    return 2.0 * _half_transit_phase(mat, car, geo.D)


def transit_times(mat: MaterialParams, car: Carriers, geo: Geometry) -> Tuple[float, float, float]:
    """(T_W, T_D, total transit time through the array)."""
    t_w = geo.W * mat.n_op / SPEED_OF_LIGHT
    t_d = geo.D * mat.n_op / SPEED_OF_LIGHT
    return t_w, t_d, (geo.N - 1) * t_d + t_w


def dirichlet_factor(N: int, delta: float) -> float:
    """sin(N*delta/2) / sin(delta/2), finite at delta = 2*pi*m.

    With delta/2 = m*pi + x the ratio is (-1)^(m(N-1)) * sin(Nx)/sin(x), and
    sin(Nx)/sin(x) = N * sinc(Nx/pi) / sinc(x/pi) has no singularity for |x| <= pi/2.
    """
    m = round(delta / TWO_PI)
    x = 0.5 * delta - m * math.pi
    sign = -1.0 if (m * (N - 1)) % 2 else 1.0
    return sign * N * float(np.sinc(N * x / math.pi) / np.sinc(x / math.pi))


def array_modulation_depth(
    mat: MaterialParams, car: Carriers, geo: Geometry, drive: MicrowaveDrive
) -> Tuple[float, float]:
    """(delta_theta_N, phi_N) for N elements at periodicity D.

    Sum_n delta_theta * sin(u + phi_n) = delta_theta_N * sin(u + phi_N), with
    phi_N = phi + (N-1) * Delta/2.
    """
    delta_theta = modulation_depth(mat, car, geo, drive)
    delta = inter_element_phase(mat, car, geo)
    delta_theta_n = delta_theta * dirichlet_factor(geo.N, delta)
    phi_n = element_offset(mat, car, geo) + 0.5 * (geo.N - 1) * delta
    return delta_theta_n, phi_n


def phasor_sum_depth(
    mat: MaterialParams, car: Carriers, geo: Geometry, drive: MicrowaveDrive
) -> Tuple[float, float]:
    """Brute-force element sum refit to A * sin(u + psi): returns (A, psi), A >= 0."""
    delta_theta = modulation_depth(mat, car, geo, drive)
    offsets = np.array([element_offset_phase(car, mat, geo, n) for n in range(1, geo.N + 1)])
    total = delta_theta * np.sum(np.exp(1j * offsets))
    return float(abs(total)), float(np.angle(total))


def element_offset_phase(car: Carriers, mat: MaterialParams, geo: Geometry, n: int) -> float:
    """phi_n = omega_w*sqrt(eps_op)*W/(2c) + (n-1)*omega_w*sqrt(eps_op)*D/c for element n in 1..N."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or not 1 <= n <= geo.N:
        raise ValidationError("n", f"element index must be in 1..{geo.N}, got {n!r}")
    return element_offset(mat, car, geo) + (n - 1) * inter_element_phase(mat, car, geo)


def propagation_phase(car: Carriers, geo: Geometry, mat: MaterialParams) -> float:
    """chi = (N-1) * k_op * D + k_op * W."""
    k_op = car.k_op(mat)
    return (geo.N - 1) * k_op * geo.D + k_op * geo.W


def design_depth(design: ConverterDesign) -> DepthResult:
    mat, car, geo, drive = design.material, design.carriers, design.geometry, design.drive
    delta_theta_n, phi_n = array_modulation_depth(mat, car, geo, drive)
    result = DepthResult(
        delta_theta=modulation_depth(mat, car, geo, drive),
        phi=element_offset(mat, car, geo),
        delta_theta_N=delta_theta_n,
        phi_N=phi_n,
        chi=propagation_phase(car, geo, mat),
        omega_w=car.omega_w,
        N=geo.N,
    )
    logger.debug(
        "depth: delta_theta=%.6g delta_theta_N=%.6g phi_N=%.6g chi=%.6g",
        result.delta_theta, result.delta_theta_N, result.phi_N, result.chi,
    )
    return result


def modulated_phase(depth: DepthResult, t: float, b: float) -> float:
    """theta_i(t) = delta_theta_N * sin(omega_w t + phi_N + b).

    At the optimum periodicity this reduces to N * delta_theta * cos(omega_w t + b).
    """
    return depth.delta_theta_N * math.sin(depth.omega_w * t + depth.phi_N + b)


def optimum_design(
    mat: MaterialParams, car: Carriers, drive: MicrowaveDrive, N: int = 1, gamma: float = 6500.0
) -> ConverterDesign:
    w_o = optimum_element_width(mat, car)
    geo = Geometry(W=w_o, D=2.0 * w_o, N=N, gamma=gamma)
    return ConverterDesign(material=mat, carriers=car, geometry=geo, drive=drive)


def is_optimum(design: ConverterDesign, rel_tol: float = 1e-9) -> bool:
    w_o = optimum_element_width(design.material, design.carriers)
    geo = design.geometry
    width_ok = math.isclose(geo.W, w_o, rel_tol=rel_tol)
    # spacing only matters once there is more than one element
    spacing_ok = geo.N == 1 or math.isclose(geo.D, 2.0 * w_o, rel_tol=rel_tol)
    return width_ok and spacing_ok
