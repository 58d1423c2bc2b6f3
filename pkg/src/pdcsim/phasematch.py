"""Longitudinal wavevector mismatch for collinear-pump down-conversion,
the complex spectral amplitude it produces, low- and high-gain spectral
intensities, phase-matching-angle solving, and tuning curves.

Geometry: the pump propagates at ``crystal.cut_angle_rad`` to the optic
axis and is extraordinary; the two daughter waves are ordinary, share a
plane with the pump, and carry opposite signed transverse wavevectors
``+k_perp``/``-k_perp`` so only the signal's value appears in the API.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dispersion import (
    SPEED_OF_LIGHT,
    ORDINARY,
    CrystalSpec,
    Polarization,
    wavelength_um_from_omega,
    wavevector_magnitude,
)
from .errors import DegenerateInput, NoSignChange

__all__ = [
    "PumpSpec",
    "MismatchPoint",
    "delta_k",
    "mismatch_grid",
    "collinear_degenerate_angle",
    "spectral_amplitude",
    "spectrum_value",
    "amplitude_from_mismatch",
    "intensity_from_mismatch",
    "tuning_curve",
]

# |delta_k| * L below this counts as phase matched in the root finders
MATCH_TOL = 1e-6


@dataclass(frozen=True)
class PumpSpec:
    """Monochromatic plane-wave pump.

    ``wavelength_m`` is the vacuum wavelength.  ``gain`` is the
    dimensionless parametric gain; zero selects the spontaneous
    (amplitude-squared) spectrum and positive values the amplified one.
    """

    wavelength_m: float
    gain: float = 0.0

    def __post_init__(self):
        if self.wavelength_m <= 0.0:
            raise ValueError("wavelength_m must be positive")
        if self.gain < 0.0:
            raise ValueError("gain must be non-negative")

    @property
    def omega(self) -> float:
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.wavelength_m

    @property
    def degenerate_wavelength_m(self) -> float:
        return 2.0 * self.wavelength_m


@dataclass(frozen=True)
class MismatchPoint:
    """Mismatch at one (signal frequency, transverse wavevector) point.

    ``propagating`` is false when the transverse wavevector exceeds the
    medium wavevector of either daughter wave; ``delta_k`` is NaN there.
    """

    omega_signal: float
    k_perp: float
    delta_k: float
    propagating: bool


def _pump_wavevector(crystal: CrystalSpec, pump: PumpSpec) -> float:
    pol = Polarization.extraordinary_at(crystal.cut_angle_rad)
    return float(wavevector_magnitude(crystal, pump.omega, pol))


def mismatch_grid(crystal: CrystalSpec, pump: PumpSpec,
                  omega_signal, k_perp):
    """Vectorized longitudinal mismatch over broadcastable inputs.

    Returns ``(delta_k, propagating)`` arrays.  The idler frequency is
    ``pump.omega - omega_signal``; both daughter wavelengths must sit in
    the Sellmeier validity window.  Cells where either daughter would be
    evanescent get ``propagating = False`` and NaN mismatch rather than
    an error, so grid sweeps survive physical boundaries.

    Raises
    ------
    DegenerateInput
        If any signal frequency falls outside (0, pump.omega).
    OutOfValidityRange
        If any daughter wavelength leaves the validity window.
    """
    omega_s = np.asarray(omega_signal, dtype=float)
    k_t = np.asarray(k_perp, dtype=float)
    if np.any(omega_s <= 0.0) or np.any(omega_s >= pump.omega):
        raise DegenerateInput("signal frequency must lie in (0, pump omega)")
    omega_i = pump.omega - omega_s

    k_s = wavevector_magnitude(crystal, omega_s, ORDINARY)
    k_i = wavevector_magnitude(crystal, omega_i, ORDINARY)
    k_pump = _pump_wavevector(crystal, pump)

    arg_s = k_s**2 - k_t**2
    arg_i = k_i**2 - k_t**2
    propagating = (arg_s > 0.0) & (arg_i > 0.0)
    with np.errstate(invalid="ignore"):
        dk = k_pump - np.sqrt(np.where(arg_s > 0.0, arg_s, np.nan)) \
                    - np.sqrt(np.where(arg_i > 0.0, arg_i, np.nan))
    dk = np.where(propagating, dk, np.nan)
    return dk, propagating


def delta_k(crystal: CrystalSpec, pump: PumpSpec,
            omega_signal: float, k_perp: float) -> MismatchPoint:
    """Scalar mismatch point; see :func:`mismatch_grid` for the formula."""
    dk, prop = mismatch_grid(crystal, pump, float(omega_signal), float(k_perp))
    return MismatchPoint(
        omega_signal=float(omega_signal),
        k_perp=float(k_perp),
        delta_k=float(dk),
        propagating=bool(prop),
    )


def collinear_degenerate_angle(crystal: CrystalSpec, pump: PumpSpec,
                               degenerate_wavelength_m: float | None = None
                               ) -> float:
    """Pump angle (rad) that phase matches collinear degenerate emission.

    Bisects the cut angle over (0, pi/2) until
    ``|delta_k| * length < MATCH_TOL`` at the half-pump frequency and
    zero transverse wavevector.  ``crystal.cut_angle_rad`` is ignored.

    Raises
    ------
    DegenerateInput
        If ``degenerate_wavelength_m`` is given and is not twice the
        pump wavelength.
    NoSignChange
        If no cut angle inside (0, pi/2) phase matches.
    """
    if degenerate_wavelength_m is not None:
        if not math.isclose(degenerate_wavelength_m,
                            pump.degenerate_wavelength_m,
                            rel_tol=1e-9):
            raise DegenerateInput(
                "collinear solver requires the degenerate wavelength "
                "(twice the pump wavelength)"
            )
    omega_half = 0.5 * pump.omega

    def mismatch_at(theta: float) -> float:
        dk, _ = mismatch_grid(crystal.with_cut_angle(theta), pump,
                              omega_half, 0.0)
        return float(dk)

    lo = math.radians(0.05)
    hi = math.radians(89.95)
    f_lo = mismatch_at(lo)
    f_hi = mismatch_at(hi)
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise NoSignChange("no phase-matching angle in (0, pi/2)")
    tol_dk = MATCH_TOL / crystal.length_m
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = mismatch_at(mid)
        if abs(f_mid) < tol_dk:
            return mid
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    raise NoSignChange("phase-matching bisection failed to converge")


def amplitude_from_mismatch(dk, propagating, length_m: float):
    """Complex amplitude sinc(x) * exp(i x) with x = delta_k * length / 2.

    Evanescent cells contribute exactly zero.
    """
    x = 0.5 * np.where(propagating, dk, 0.0) * length_m
    values = np.sinc(x / np.pi) * np.exp(1j * x)
    return np.where(propagating, values, 0.0 + 0.0j)


def intensity_from_mismatch(dk, propagating, length_m: float, gain: float):
    """Spectral intensity for the given mismatch.

    Zero gain gives sinc(x)^2 with x = delta_k * length / 2.  Positive
    gain G gives |sinh(y)/y|^2 * G^2 with y^2 = G^2 - x^2, continued
    through y^2 < 0 where sinh of an imaginary argument turns into a
    sine; at x = 0 the value is sinh(G)^2.
    """
    x = 0.5 * np.where(propagating, dk, 0.0) * length_m
    if gain == 0.0:
        values = np.sinc(x / np.pi) ** 2
    else:
        y = np.sqrt(np.asarray(gain**2 - x**2, dtype=complex))
        small = np.abs(y) < 1e-12
        safe_y = np.where(small, 1.0, y)
        ratio = np.where(small, 1.0 + y**2 / 6.0, np.sinh(safe_y) / safe_y)
        values = np.abs(ratio) ** 2 * gain**2
    return np.where(propagating, values.real, 0.0)


def spectral_amplitude(crystal: CrystalSpec, pump: PumpSpec,
                       omega_signal: float, k_perp: float) -> complex:
    """Scalar complex amplitude at one grid point."""
    dk, prop = mismatch_grid(crystal, pump, float(omega_signal),
                             float(k_perp))
    return complex(amplitude_from_mismatch(dk, prop, crystal.length_m))


def spectrum_value(crystal: CrystalSpec, pump: PumpSpec,
                   omega_signal: float, k_perp: float) -> float:
    """Scalar spectral intensity at one grid point."""
    dk, prop = mismatch_grid(crystal, pump, float(omega_signal),
                             float(k_perp))
    return float(intensity_from_mismatch(dk, prop, crystal.length_m,
                                         pump.gain))


def _external_angle(k_perp: float, omega: float) -> float:
    # transverse wavevector is conserved across the exit face
    return math.asin(k_perp * SPEED_OF_LIGHT / omega)


def tuning_curve(crystal: CrystalSpec, pump: PumpSpec, theta_rad: float,
                 lambda_range_m: tuple[float, float],
                 angle_range_rad: tuple[float, float],
                 n_lambda: int = 129) -> list[tuple[float, float]]:
    """Phase-matched (wavelength, external angle) loci at one cut angle.

    For each wavelength on a uniform grid over ``lambda_range_m`` the
    mismatch is a strictly increasing function of the transverse
    wavevector, so at most one non-negative root exists; it is found by
    bisection and reported at both signed external angles when it is
    off-axis.  Wavelengths with no root inside ``angle_range_rad``
    contribute nothing.
    """
    at_theta = crystal.with_cut_angle(theta_rad)
    angle_cap = max(abs(angle_range_rad[0]), abs(angle_range_rad[1]))
    tol_dk = MATCH_TOL / crystal.length_m
    loci: list[tuple[float, float]] = []
    for lam in np.linspace(lambda_range_m[0], lambda_range_m[1], n_lambda):
        omega_s = 2.0 * math.pi * SPEED_OF_LIGHT / lam
        if not (0.0 < omega_s < pump.omega):
            continue
        omega_i = pump.omega - omega_s
        k_s = float(wavevector_magnitude(at_theta, omega_s, ORDINARY))
        k_i = float(wavevector_magnitude(at_theta, omega_i, ORDINARY))
        k_cap = min(0.999999 * min(k_s, k_i),
                    omega_s * math.sin(angle_cap) / SPEED_OF_LIGHT)

        def mismatch_at(k_t: float) -> float:
            dk, _ = mismatch_grid(at_theta, pump, omega_s, k_t)
            return float(dk)

        f_lo = mismatch_at(0.0)
        if abs(f_lo) < tol_dk:
            loci.append((float(lam), 0.0))
            continue
        if f_lo > 0.0 or k_cap <= 0.0:
            continue
        f_hi = mismatch_at(k_cap)
        if f_hi < 0.0:
            continue
        lo, hi = 0.0, k_cap
        root = None
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            f_mid = mismatch_at(mid)
            if abs(f_mid) < tol_dk:
                root = mid
                break
            if f_mid < 0.0:
                lo = mid
            else:
                hi = mid
        if root is None:
            root = 0.5 * (lo + hi)
        theta_ext = _external_angle(root, omega_s)
        loci.append((float(lam), theta_ext))
        if theta_ext > 0.0:
            loci.append((float(lam), -theta_ext))
    return loci
