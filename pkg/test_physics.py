import math

import numpy as np
import pytest

from conftest import REFERENCE_DELTA_THETA, REFERENCE_W_O
from src.core.exceptions import CarrierRatioWarning, ValidationError
from src.models.entities import Carriers, Geometry, MicrowaveDrive, normalize_angle
from src.simulators import physics


def test_single_element_depth_at_optimum(single):
    depth = physics.design_depth(single)
    assert depth.delta_theta == pytest.approx(REFERENCE_DELTA_THETA, abs=1e-3)
    assert depth.delta_theta < 0.0
    assert depth.phi == pytest.approx(math.pi / 2, abs=1e-12)


def test_optimum_dimensions(material, carriers):
    w_o = physics.optimum_element_width(material, carriers)
    assert w_o == pytest.approx(REFERENCE_W_O, rel=1e-3)
    assert physics.optimum_array_periodicity(material, carriers) == pytest.approx(2.0 * w_o)


def test_depth_vanishes_at_twice_optimum_width(single):
    w_o = single.geometry.W
    doubled = single.with_geometry(W=2.0 * w_o, D=2.0 * w_o)
    assert abs(physics.design_depth(doubled).delta_theta) < 1e-15


def test_depth_scales_with_field(single):
    base = physics.design_depth(single).delta_theta
    stronger = physics.design_depth(single.with_drive(E_w=100.0)).delta_theta
    assert stronger == pytest.approx(2.0 * base, rel=1e-12)
    assert physics.design_depth(single.with_drive(E_w=0.0)).delta_theta == 0.0


@pytest.mark.parametrize("N", [1, 2, 3, 7, 10])
def test_optimum_array_adds_coherently(optimum, N):
    design = optimum(N)
    depth = physics.design_depth(design)
    assert abs(depth.delta_theta_N) == pytest.approx(N * abs(depth.delta_theta), rel=1e-9)
    period = design.carriers.period_w
    for t in (0.0, period / 8, period / 3):
        for b in (0.0, 1.0, math.pi):
            expected = N * depth.delta_theta * math.cos(design.carriers.omega_w * t + b)
            assert physics.modulated_phase(depth, t, b) == pytest.approx(expected, abs=1e-9)


def test_closed_form_matches_phasor_sum(single):
    w_o = single.geometry.W
    design = single.with_geometry(W=0.7 * w_o, D=1.6 * w_o, N=4)
    mat, car, geo, drive = design.material, design.carriers, design.geometry, design.drive
    delta_theta_n, phi_n = physics.array_modulation_depth(mat, car, geo, drive)
    amplitude, psi = physics.phasor_sum_depth(mat, car, geo, drive)
    assert abs(delta_theta_n) == pytest.approx(amplitude, rel=1e-9)
    for u in np.linspace(0.0, 2.0 * math.pi, 9):
        assert delta_theta_n * math.sin(u + phi_n) == pytest.approx(amplitude * math.sin(u + psi), abs=1e-12)


@pytest.mark.parametrize("N, delta, expected", [(5, 2 * math.pi, 5.0), (4, 2 * math.pi, -4.0), (4, 4 * math.pi, 4.0)])
def test_dirichlet_factor_at_coherent_points(N, delta, expected):
    assert physics.dirichlet_factor(N, delta) == pytest.approx(expected, rel=1e-12)


def test_dirichlet_factor_general():
    delta = 1.3
    assert physics.dirichlet_factor(6, delta) == pytest.approx(math.sin(3 * delta) / math.sin(delta / 2), rel=1e-12)
    assert physics.dirichlet_factor(1, 2.2) == pytest.approx(1.0)


def test_split_section_offsets(single):
    w_o = single.geometry.W
    sections = single.with_geometry(W=w_o, D=w_o, N=2)
    car, mat, geo = sections.carriers, sections.material, sections.geometry
    assert physics.element_offset_phase(car, mat, geo, 1) == pytest.approx(math.pi / 2, abs=1e-12)
    assert physics.element_offset_phase(car, mat, geo, 2) == pytest.approx(3 * math.pi / 2, abs=1e-12)


def test_element_index_out_of_range(optimum):
    design = optimum(3)
    car, mat, geo = design.carriers, design.material, design.geometry
    for n in (0, 4):
        with pytest.raises(ValidationError):
            physics.element_offset_phase(car, mat, geo, n)


def test_transit_times_and_propagation_phase(optimum):
    design = optimum(3)
    mat, car, geo = design.material, design.carriers, design.geometry
    t_w, t_d, total = physics.transit_times(mat, car, geo)
    assert t_w == pytest.approx(car.period_w / 2, rel=1e-12)
    assert t_d == pytest.approx(car.period_w, rel=1e-12)
    assert total == pytest.approx(2 * t_d + t_w)
    k_op = car.k_op(mat)
    assert physics.propagation_phase(car, geo, mat) == pytest.approx(2 * k_op * geo.D + k_op * geo.W)


def test_is_optimum(optimum):
    design = optimum(3)
    assert physics.is_optimum(design)
    assert not physics.is_optimum(design.with_geometry(D=3.0 * design.geometry.W))
    # periodicity is irrelevant for a single element
    assert physics.is_optimum(optimum(1).with_geometry(D=5.0 * design.geometry.W))


def test_geometry_validation():
    with pytest.raises(ValidationError):
        Geometry(W=1e-3, D=0.5e-3)
    with pytest.raises(ValidationError):
        Geometry(W=1e-3, D=1e-3, N=0)
    with pytest.raises(ValidationError):
        Geometry(W=-1e-3, D=1e-3)
    assert Geometry(W=1e-3, D=1e-3).G == 0.0


def test_drive_phase_is_wrapped():
    assert MicrowaveDrive(E_w=1.0, b=-math.pi / 2).b == pytest.approx(3 * math.pi / 2)
    assert normalize_angle(4 * math.pi + 0.25) == pytest.approx(0.25)


def test_low_carrier_ratio_warns():
    with pytest.warns(CarrierRatioWarning):
        Carriers(f_w=30e9, lambda_op=1e-3)


def test_depth_peaks_at_optimum_width(single):
    w_o = single.geometry.W
    widths = np.linspace(2.0 * w_o / 1000, 2.0 * w_o, 1000)
    depths = [abs(physics.design_depth(single.with_geometry(W=w, D=2.0 * w_o)).delta_theta) for w in widths]
    assert widths[int(np.argmax(depths))] == pytest.approx(w_o, rel=5e-3)
    assert max(depths) <= abs(physics.design_depth(single).delta_theta) + 1e-15


@pytest.mark.parametrize("fraction", [0.05, 0.3, 0.8])
def test_depth_is_symmetric_about_optimum_width(single, fraction):
    w_o = single.geometry.W
    x = fraction * w_o
    wider = physics.design_depth(single.with_geometry(W=w_o + x, D=4.0 * w_o)).delta_theta
    narrower = physics.design_depth(single.with_geometry(W=w_o - x, D=4.0 * w_o)).delta_theta
    assert abs(wider - narrower) < 1e-12


@pytest.mark.parametrize("N", [2, 5, 10])
@pytest.mark.parametrize("scale", [1.0 - 1e-9, 1.0 + 1e-9])
def test_array_depth_is_stable_near_optimum_periodicity(optimum, N, scale):
    design = optimum(N)
    perturbed = design.with_geometry(D=scale * design.geometry.D)
    mat, car, drive = design.material, design.carriers, design.drive
    delta_theta_n, _ = physics.array_modulation_depth(mat, car, perturbed.geometry, drive)
    delta_theta = physics.modulation_depth(mat, car, perturbed.geometry, drive)
    assert abs(abs(delta_theta_n / delta_theta) - N) < 1e-6
