import math

import numpy as np
import pytest

import pdcsim as p
from pdcsim.dispersion import CrystalSpec
from pdcsim.phasematch import amplitude_from_mismatch, intensity_from_mismatch

CRYSTAL = p.bbo()
PUMP = p.PumpSpec(wavelength_m=800e-9)
PUMP_400 = p.PumpSpec(wavelength_m=400e-9)


@pytest.fixture(scope="module")
def theta_pm():
    return p.collinear_degenerate_angle(CRYSTAL, PUMP)


def test_collinear_angle_frozen(theta_pm):
    assert math.degrees(theta_pm) == pytest.approx(19.86659173, abs=1e-5)
    point = p.delta_k(CRYSTAL.with_cut_angle(theta_pm), PUMP,
                      0.5 * PUMP.omega, 0.0)
    assert abs(point.delta_k) * CRYSTAL.length_m < 1e-6


def test_collinear_angle_shorter_pump():
    theta = p.collinear_degenerate_angle(CRYSTAL, PUMP_400)
    assert math.degrees(theta) == pytest.approx(29.178, abs=0.01)


def test_collinear_angle_degenerate_wavelength_guard():
    good = p.collinear_degenerate_angle(
        CRYSTAL, PUMP, degenerate_wavelength_m=1600e-9)
    assert math.degrees(good) == pytest.approx(19.8666, abs=1e-3)
    with pytest.raises(p.DegenerateInput):
        p.collinear_degenerate_angle(CRYSTAL, PUMP,
                                     degenerate_wavelength_m=1500e-9)


def test_no_sign_change_without_birefringence():
    iso = CrystalSpec(name="iso", ordinary=CRYSTAL.ordinary,
                      extraordinary=CRYSTAL.ordinary,
                      validity_um=CRYSTAL.validity_um)
    with pytest.raises(p.NoSignChange):
        p.collinear_degenerate_angle(iso, PUMP)


def test_delta_k_mirror_and_contract(theta_pm):
    crystal = CRYSTAL.with_cut_angle(theta_pm)
    omega_s = 0.47 * PUMP.omega
    plus = p.delta_k(crystal, PUMP, omega_s, 4.0e4)
    minus = p.delta_k(crystal, PUMP, omega_s, -4.0e4)
    assert plus.delta_k == pytest.approx(minus.delta_k, rel=1e-14)

    omega_half = 0.5 * PUMP.omega
    k_small = float(p.wavevector_magnitude(crystal, omega_half, p.ORDINARY))
    ev = p.delta_k(crystal, PUMP, omega_half, 1.2 * k_small)
    assert not ev.propagating
    assert math.isnan(ev.delta_k)

    with pytest.raises(p.DegenerateInput):
        p.delta_k(crystal, PUMP, 0.0, 0.0)
    with pytest.raises(p.DegenerateInput):
        p.delta_k(crystal, PUMP, PUMP.omega, 0.0)


def test_delta_k_signal_idler_symmetry(theta_pm):
    crystal = CRYSTAL.with_cut_angle(theta_pm)
    omega_s = PUMP.omega * np.linspace(0.38, 0.62, 25)
    dk_s, _ = p.mismatch_grid(crystal, PUMP, omega_s, 1.0e4)
    dk_i, _ = p.mismatch_grid(crystal, PUMP, PUMP.omega - omega_s, 1.0e4)
    assert np.max(np.abs(dk_s - dk_i)) <= 1e-9 * np.max(np.abs(dk_s))


def test_delta_k_frozen_composition():
    # oracle: the mismatch composed by hand from the index functions
    crystal = CRYSTAL.with_cut_angle(math.radians(19.98))
    omega_s = 2.0 * math.pi * p.SPEED_OF_LIGHT / 1500e-9
    omega_i = PUMP.omega - omega_s
    c = p.SPEED_OF_LIGHT
    n_pump = p.refractive_index(
        CRYSTAL, 0.8, p.Polarization.extraordinary_at(math.radians(19.98)))
    n_s = p.refractive_index(
        CRYSTAL, float(p.wavelength_um_from_omega(omega_s)), p.ORDINARY)
    n_i = p.refractive_index(
        CRYSTAL, float(p.wavelength_um_from_omega(omega_i)), p.ORDINARY)
    manual = (n_pump * PUMP.omega - n_s * omega_s - n_i * omega_i) / c
    point = p.delta_k(crystal, PUMP, omega_s, 0.0)
    assert point.delta_k == pytest.approx(float(manual), rel=1e-11)
    assert point.delta_k == pytest.approx(-1118.9944085553288, rel=1e-9)


def test_spectral_amplitude_shape(theta_pm):
    crystal = CRYSTAL.with_cut_angle(theta_pm)
    center = p.spectral_amplitude(crystal, PUMP, 0.5 * PUMP.omega, 0.0)
    assert abs(center - 1.0) < 1e-6

    length = CRYSTAL.length_m
    prop = np.array(True)
    at_pi = amplitude_from_mismatch(np.array(2.0 * math.pi / length),
                                    prop, length)
    assert abs(at_pi) < 1e-12

    rng = np.random.default_rng(7)
    dk = rng.uniform(-5e3, 5e3, 64)
    values = amplitude_from_mismatch(dk, np.ones(64, bool), length)
    assert np.all(np.abs(values) <= 1.0 + 1e-12)
    assert complex(amplitude_from_mismatch(np.array(1.0),
                                           np.array(False), length)) == 0.0


def test_spectrum_gain_branch(theta_pm):
    crystal = CRYSTAL.with_cut_angle(theta_pm)
    assert p.spectrum_value(crystal, PUMP, 0.5 * PUMP.omega, 0.0) == \
        pytest.approx(1.0, abs=1e-6)

    length = CRYSTAL.length_m
    gained = p.PumpSpec(wavelength_m=800e-9, gain=5.0)
    center = p.spectrum_value(crystal, gained, 0.5 * gained.omega, 0.0)
    assert center == pytest.approx(math.sinh(5.0) ** 2, rel=1e-9)

    # small-gain limit reproduces the gain-free shape inside the main lobe
    x = np.linspace(-1.2, 1.2, 41)
    dk = 2.0 * x / length
    prop = np.ones_like(x, bool)
    base = intensity_from_mismatch(dk, prop, length, 0.0)
    small = intensity_from_mismatch(dk, prop, length, 1e-3) / 1e-6
    assert np.max(np.abs(small - base) / base) <= 1e-6

    # continuity across the change of branch at x = G
    gain = 2.0
    just_below = intensity_from_mismatch(
        np.array(2.0 * (gain - 1e-9) / length), np.array(True), length, gain)
    just_above = intensity_from_mismatch(
        np.array(2.0 * (gain + 1e-9) / length), np.array(True), length, gain)
    assert abs(just_above - just_below) / just_below <= 1e-6


def test_spectrum_mirror_symmetry(theta_pm):
    crystal = CRYSTAL.with_cut_angle(theta_pm + math.radians(0.08))
    omega = PUMP.omega * np.linspace(0.4, 0.6, 33)[:, None]
    k = np.linspace(-1.2e5, 1.2e5, 41)[None, :]
    dk, prop = p.mismatch_grid(crystal, PUMP, omega, k)
    s = intensity_from_mismatch(dk, prop, crystal.length_m, 0.0)
    assert np.allclose(s, s[:, ::-1], rtol=0, atol=1e-14)


def test_halfmax_support_bounded(theta_pm):
    # 50%-of-max support stays strictly inside a wide reference grid
    crystal = CRYSTAL.with_cut_angle(theta_pm + math.radians(0.08))
    grid = p.default_grid(crystal, PUMP, 256, 256,
                          omega_halfspan_frac=0.25, k_halfspan_frac=0.30)
    intensity = p.build_intensity_grid(crystal, PUMP, grid)
    assert not p.boundary_contact(intensity, 0.5)


def test_tuning_curve_degenerate_point(theta_pm):
    loci = p.tuning_curve(CRYSTAL, PUMP, theta_pm,
                          (1.55e-6, 1.65e-6), (-0.02, 0.02), 11)
    on_axis = [ang for lam, ang in loci if abs(lam - 1.6e-6) < 1e-9]
    assert on_axis and min(abs(a) for a in on_axis) < 1e-4


def test_tuning_curve_below_angle_is_empty(theta_pm):
    loci = p.tuning_curve(CRYSTAL, PUMP, theta_pm - math.radians(0.05),
                          (1.55e-6, 1.65e-6), (-0.02, 0.02), 11)
    assert loci == []


def test_tuning_curve_ring_is_closed(theta_pm):
    loci = p.tuning_curve(CRYSTAL, PUMP, theta_pm + math.radians(0.08),
                          (1.25e-6, 2.3e-6), (-0.02, 0.02), 201)
    assert loci
    lams = [lam for lam, _ in loci]
    angs = [ang for _, ang in loci]
    # bounded wavelength interval with both signed branches present
    assert 1.3e-6 < min(lams) and max(lams) < 2.0e-6
    assert min(angs) < 0.0 < max(angs)


def test_tuning_curve_axis_aligned_pump_is_empty():
    loci = p.tuning_curve(CRYSTAL, PUMP_400, 0.0,
                          (0.7e-6, 0.9e-6), (-0.05, 0.05), 21)
    assert loci == []


def test_pump_spec_validation():
    with pytest.raises(ValueError):
        p.PumpSpec(wavelength_m=0.0)
    with pytest.raises(ValueError):
        p.PumpSpec(wavelength_m=800e-9, gain=-1.0)
