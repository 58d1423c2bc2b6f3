"""End-to-end acceptance checks, one per shipped capability.

Each test prints a single ``criterion N: PASS/FAIL`` line with the
measured numbers before asserting, so the log reads as a checklist.
Runtime ceilings are asserted alongside the physics.
"""

import math
import time

import numpy as np
import pytest

import pdcsim as p
from pdcsim.correlations import direct_transform_oracle
from pdcsim.phasematch import intensity_from_mismatch
from pdcsim.spectra import KIND_AMPLITUDE, KIND_INTENSITY

CRYSTAL = p.bbo()
PUMP = p.PumpSpec(wavelength_m=800e-9)


def check(criterion: int, ok: bool, detail: str) -> None:
    state = "PASS" if ok else "FAIL"
    print(f"criterion {criterion}: {state} - {detail}")
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module")
def theta_pm():
    return p.collinear_degenerate_angle(CRYSTAL, PUMP)


@pytest.fixture(scope="module")
def ring_crystal(theta_pm):
    return CRYSTAL.with_cut_angle(theta_pm + math.radians(0.08))


def build_intensity(crystal, n=512):
    grid = p.default_grid(crystal, PUMP, n, n)
    return p.build_intensity_grid(crystal, PUMP, grid)


def positive_cut_peak_exists(coords, profile, i_origin):
    for i in range(i_origin + 1, profile.size - 1):
        if profile[i] >= profile[i - 1] and profile[i] > profile[i + 1]:
            return True
    return False


def test_criterion_01_phase_matching_angle():
    start = time.perf_counter()
    theta = p.collinear_degenerate_angle(CRYSTAL, PUMP)
    elapsed = time.perf_counter() - start
    deg = math.degrees(theta)
    ok = abs(deg - 19.9) <= 0.3 and elapsed < 1.0
    check(1, ok, f"theta_pm={deg:.5f} deg (want 19.9 +/- 0.3), "
                 f"{elapsed:.3f} s")


def test_criterion_02_zero_dispersion_window():
    start = time.perf_counter()
    zdw = p.zero_dispersion_wavelength(CRYSTAL, p.ORDINARY)
    beta2 = p.gvd(CRYSTAL, 1.6, p.ORDINARY)
    elapsed = time.perf_counter() - start
    ok = 1.46 <= zdw <= 1.52 and beta2 < 0.0 and elapsed < 1.0
    check(2, ok, f"zdw_um={zdw:.6f} (want within [1.46, 1.52]), "
                 f"gvd(1.6 um)={beta2:.3e} s^2/m, {elapsed:.3f} s")


def test_criterion_03_spot_and_ring_topology(theta_pm, ring_crystal):
    start = time.perf_counter()
    spot = p.classify_topology(
        build_intensity(CRYSTAL.with_cut_angle(theta_pm)))
    spot_time = time.perf_counter() - start

    start = time.perf_counter()
    ring = p.classify_topology(build_intensity(ring_crystal))
    ring_time = time.perf_counter() - start

    ok = (spot == "spot" and ring == "ring"
          and spot_time < 5.0 and ring_time < 5.0)
    check(3, ok, f"matched cut -> {spot!r}, +0.08 deg -> {ring!r}, "
                 f"{spot_time:.2f} s / {ring_time:.2f} s at 512x512")


def test_criterion_04_ring_spectrum_bounded(ring_crystal):
    intensity = build_intensity(ring_crystal)
    touches = p.boundary_contact(intensity, 0.01)
    check(4, not touches,
          f"1%-of-max support touches default grid edge: {touches}")


def test_criterion_05_first_order_ring_structure(ring_crystal):
    start = time.perf_counter()
    intensity = build_intensity(ring_crystal)
    g1 = p.g1_map(intensity, pad_factor=4)
    magnitude = np.abs(g1.values)
    i0, j0 = g1.origin_indices()
    peak = np.unravel_index(np.argmax(magnitude), magnitude.shape)
    tau_ridge = positive_cut_peak_exists(g1.tau_axis, magnitude[:, j0], i0)
    xi_ridge = positive_cut_peak_exists(g1.xi_axis, magnitude[i0, :], j0)
    elapsed = time.perf_counter() - start
    ok = (peak == (i0, j0) and tau_ridge and xi_ridge and elapsed < 10.0)
    check(5, ok, f"global max at origin: {peak == (i0, j0)}, off-origin "
                 f"ridge on tau cut: {tau_ridge}, on xi cut: {xi_ridge}, "
                 f"{elapsed:.2f} s")


def make_masked_g2(ring_crystal, order_n):
    grid = p.default_grid(ring_crystal, PUMP, 512, 512)
    amplitude = p.build_amplitude_grid(ring_crystal, PUMP, grid)
    masked = p.apply_phase_mask(amplitude,
                                p.default_mask(amplitude, order_n))
    return p.g2_map(masked)


def test_criterion_06_separated_photons(ring_crystal):
    start = time.perf_counter()
    g2 = make_masked_g2(ring_crystal, 2)
    i0, j0 = g2.origin_indices()
    center = float(g2.values[i0, j0])
    fit = p.ring_fit(g2)
    elapsed = time.perf_counter() - start

    tau_fs = fit.tau_c * 1e15
    xi_um = fit.xi_c * 1e6
    ok = (center < 0.05
          and abs(tau_fs - 13.0) <= 0.3 * 13.0
          and abs(xi_um - 35.0) <= 0.3 * 35.0
          and fit.rms_residual < 0.2
          and fit.valid
          and elapsed < 15.0)
    check(6, ok, f"center/max={center:.2e} (<0.05), tau_c={tau_fs:.2f} fs "
                 f"(13 +/- 30%), xi_c={xi_um:.2f} um (35 +/- 30%), "
                 f"residual={fit.rms_residual:.3f} (<0.2), {elapsed:.2f} s")


def test_criterion_07_mask_order_monotonicity(ring_crystal):
    start = time.perf_counter()
    centers = {}
    fits = {}
    for order_n in (1, 2, 3):
        g2 = make_masked_g2(ring_crystal, order_n)
        i0, j0 = g2.origin_indices()
        centers[order_n] = float(g2.values[i0, j0])
        fits[order_n] = p.ring_fit(g2)
    elapsed = time.perf_counter() - start

    grows = (fits[3].tau_c >= fits[2].tau_c
             and fits[3].xi_c >= fits[2].xi_c
             and fits[2].valid and fits[3].valid)
    suppressed = all(centers[n] < 0.05 for n in (1, 2, 3))
    ok = grows and suppressed and elapsed < 45.0
    check(7, ok, f"tau_c {fits[2].tau_c*1e15:.2f} -> "
                 f"{fits[3].tau_c*1e15:.2f} fs, xi_c "
                 f"{fits[2].xi_c*1e6:.2f} -> {fits[3].xi_c*1e6:.2f} um, "
                 f"suppression {[f'{centers[n]:.1e}' for n in (1, 2, 3)]}, "
                 f"{elapsed:.2f} s")


def test_criterion_08_fedorov_ratios(theta_pm):
    start = time.perf_counter()
    intensity = build_intensity(CRYSTAL.with_cut_angle(theta_pm))
    g1 = p.g1_map(intensity, pad_factor=4)
    report = p.widths_and_fedorov(intensity, g1)
    elapsed = time.perf_counter() - start
    ok = (report.fedorov_omega > 10.0 and report.fedorov_k > 10.0
          and elapsed < 10.0)
    check(8, ok, f"fedorov_omega={report.fedorov_omega:.4f}, "
                 f"fedorov_k={report.fedorov_k:.4f} (want both > 10), "
                 f"{elapsed:.2f} s")


def test_criterion_09_oracle_equivalence():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(10):
        values = rng.standard_normal((32, 32)) \
            + 1j * rng.standard_normal((32, 32))
        omega = 2.0e15 + (np.arange(32) - 16) * 1.0e12
        k = (np.arange(32) - 16) * 2.0e3
        field = p.FieldGrid.from_axes(omega, k, 2.0e15, values,
                                      KIND_AMPLITUDE)
        fast = p.correlation_transform(field, pad_factor=1)
        slow = direct_transform_oracle(field)
        scale = float(np.max(np.abs(slow.values)))
        worst = max(worst,
                    float(np.max(np.abs(fast.values - slow.values))) / scale)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 5.0
    check(9, ok, f"max relative deviation {worst:.2e} over 10 random "
                 f"32x32 fields (<= 1e-9), {elapsed:.2f} s")


def test_criterion_10_numerical_properties(ring_crystal):
    start = time.perf_counter()
    failures = []

    grid = p.default_grid(ring_crystal, PUMP, 256, 256)
    intensity = p.build_intensity_grid(ring_crystal, PUMP, grid)
    amplitude = p.build_amplitude_grid(ring_crystal, PUMP, grid)

    g1 = p.g1_map(intensity, pad_factor=2)
    v = g1.values
    hermitian = float(np.max(np.abs(v[1:, 1:] - np.conj(v[:0:-1, :0:-1])))
                      / np.max(np.abs(v)))
    if hermitian > 1e-10:
        failures.append(f"hermitian {hermitian:.2e}")

    plain = p.correlation_transform(amplitude, pad_factor=1)
    d_tau = plain.tau_axis[1] - plain.tau_axis[0]
    d_xi = plain.xi_axis[1] - plain.xi_axis[0]
    lhs = float(np.sum(np.abs(plain.values) ** 2)) * d_tau * d_xi
    rhs = (2.0 * np.pi) ** 2 * float(np.sum(np.abs(amplitude.values) ** 2)) \
        * grid.delta_omega * grid.delta_k
    parseval = abs(lhs - rhs) / rhs
    if parseval > 1e-9:
        failures.append(f"parseval {parseval:.2e}")

    # vanishing-gain limit, evaluated across the central lobe where the
    # reference stays well away from zero
    length = 0.01
    x = np.linspace(-1.2, 1.2, 241)
    dk = 2.0 * x / length
    prop = np.ones_like(x, bool)
    reference = intensity_from_mismatch(dk, prop, length, 0.0)
    scaled = intensity_from_mismatch(dk, prop, length, 1e-3) / 1e-6
    gain_err = float(np.max(np.abs(scaled - reference) / reference))
    if gain_err > 1e-6:
        failures.append(f"gain limit {gain_err:.2e}")

    rng = np.random.default_rng(6)
    f = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    g = rng.standard_normal(32) + 1j * rng.standard_normal(32)
    omega = 2.0e15 + (np.arange(32) - 16) * 1.0e12
    k = (np.arange(32) - 16) * 2.0e3
    sep = p.FieldGrid.from_axes(omega, k, 2.0e15, np.outer(f, g),
                                KIND_AMPLITUDE)
    out = p.correlation_transform(sep, pad_factor=1)
    f_t = np.array([np.sum(f * np.exp(-1j * (omega - 2.0e15) * t)) * 1.0e12
                    for t in out.tau_axis])
    g_t = np.array([np.sum(g * np.exp(1j * k * x_)) * 2.0e3
                    for x_ in out.xi_axis])
    product = np.outer(f_t, g_t)
    separable = float(np.max(np.abs(out.values - product))
                      / np.max(np.abs(product)))
    if separable > 1e-8:
        failures.append(f"separable {separable:.2e}")

    def energy(n):
        g_ = p.default_grid(ring_crystal, PUMP, n, n)
        s_ = p.build_intensity_grid(ring_crystal, PUMP, g_)
        return float(s_.values.sum()) * g_.delta_omega * g_.delta_k

    coarse, fine = energy(256), energy(512)
    drift = abs(coarse - fine) / fine
    if drift > 0.01:
        failures.append(f"energy convergence {drift:.2e}")

    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 30.0
    check(10, ok, f"hermitian {hermitian:.1e}, parseval {parseval:.1e}, "
                  f"gain limit {gain_err:.1e}, separable {separable:.1e}, "
                  f"energy drift {drift:.1e}, {elapsed:.2f} s"
                  + (f"; failed: {failures}" if failures else ""))


def test_criterion_11_exclusions():
    print("criterion 11: PASS - quantities excluded from desk reproduction "
          "(resolution-limited measurement values); no assertion")
