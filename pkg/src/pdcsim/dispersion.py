"""Refractive index, group-velocity dispersion and zero-dispersion search
for uniaxial crystals described by a four-coefficient Sellmeier fit.

Wavelengths are in micrometres throughout this module; angular
frequencies are in rad/s and wavevector magnitudes in rad/m.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import NoSignChange, OutOfValidityRange

SPEED_OF_LIGHT = 299_792_458.0  # m/s

__all__ = [
    "SPEED_OF_LIGHT",
    "SellmeierSet",
    "CrystalSpec",
    "Polarization",
    "ORDINARY",
    "EXTRAORDINARY_PRINCIPAL",
    "refractive_index",
    "wavevector_magnitude",
    "gvd",
    "zero_dispersion_wavelength",
    "load_crystal",
    "bbo",
    "omega_from_wavelength_um",
    "wavelength_um_from_omega",
]


@dataclass(frozen=True)
class SellmeierSet:
    """Coefficients of the fit n^2 = A + B / (lam^2 - C) - D * lam^2."""

    A: float
    B: float
    C: float
    D: float

    def index(self, wavelength_um):
        lam2 = np.asarray(wavelength_um, dtype=float) ** 2
        n2 = self.A + self.B / (lam2 - self.C) - self.D * lam2
        return np.sqrt(n2)


@dataclass(frozen=True)
class CrystalSpec:
    """A uniaxial crystal plus the geometry the pump propagates through.

    ``ordinary`` and ``extraordinary`` are the principal-index Sellmeier
    fits.  ``length_m`` is the interaction length and ``cut_angle_rad``
    the angle between the pump wavevector and the optic axis; both are
    run parameters rather than material data, so the crystal file format
    omits them and loaders take them as arguments.
    """

    name: str
    ordinary: SellmeierSet
    extraordinary: SellmeierSet
    validity_um: tuple[float, float]
    length_m: float = 0.01
    cut_angle_rad: float = math.pi / 4  # placeholder; solve then replace

    def __post_init__(self):
        lo, hi = self.validity_um
        if not (0.0 < lo < hi):
            raise ValueError("validity window must satisfy 0 < min < max")
        for fit in (self.ordinary, self.extraordinary):
            # pole of the B/(lam^2 - C) term must sit below the window
            if fit.C <= 0.0 or lo * lo <= fit.C:
                raise ValueError("Sellmeier pole inside validity window")
        if self.length_m <= 0.0:
            raise ValueError("length_m must be positive")
        # closed interval so an axis-aligned pump degrades to "no phase
        # matching" in sweeps instead of erroring out
        if not (0.0 <= self.cut_angle_rad <= math.pi / 2):
            raise ValueError("cut_angle_rad must lie in [0, pi/2]")

    def with_cut_angle(self, cut_angle_rad: float) -> "CrystalSpec":
        return dataclasses.replace(self, cut_angle_rad=float(cut_angle_rad))

    def check_wavelength(self, wavelength_um) -> None:
        lam = np.asarray(wavelength_um, dtype=float)
        lo, hi = self.validity_um
        if np.any(lam < lo) or np.any(lam > hi):
            raise OutOfValidityRange(
                f"wavelength outside {self.name} fit validity [{lo}, {hi}] um"
            )


@dataclass(frozen=True)
class Polarization:
    """Which index surface a wave sees.

    ``kind`` is ``"o"`` or ``"e"``.  An extraordinary wave's index
    depends on the angle between its wavevector and the optic axis;
    ``theta_rad`` stores that angle.  ``EXTRAORDINARY_PRINCIPAL`` is the
    right-angle case and :meth:`extraordinary_at` builds angle-tuned
    variants.
    """

    kind: str
    theta_rad: float = math.pi / 2

    @staticmethod
    def extraordinary_at(theta_rad: float) -> "Polarization":
        theta = float(theta_rad)
        if not (0.0 <= theta <= math.pi / 2):
            raise ValueError("theta_rad must lie in [0, pi/2]")
        return Polarization("e", theta)


ORDINARY = Polarization("o")
EXTRAORDINARY_PRINCIPAL = Polarization("e")


def refractive_index(crystal: CrystalSpec, wavelength_um, pol: Polarization):
    """Refractive index at ``wavelength_um`` for the given polarization.

    Ordinary waves use the ordinary fit directly.  Extraordinary waves
    combine the two principal indices through

        1 / n(theta)^2 = cos(theta)^2 / n_o^2 + sin(theta)^2 / n_e^2

    which reduces to the ordinary index at theta = 0 and the principal
    extraordinary index at theta = pi/2.

    Raises
    ------
    OutOfValidityRange
        If any wavelength lies outside the crystal's fit validity window.
    """
    crystal.check_wavelength(wavelength_um)
    if pol.kind == "o":
        return crystal.ordinary.index(wavelength_um)
    if pol.kind != "e":
        raise ValueError(f"unknown polarization kind {pol.kind!r}")
    n_o = crystal.ordinary.index(wavelength_um)
    n_e = crystal.extraordinary.index(wavelength_um)
    ct2 = math.cos(pol.theta_rad) ** 2
    st2 = math.sin(pol.theta_rad) ** 2
    return 1.0 / np.sqrt(ct2 / n_o**2 + st2 / n_e**2)


def omega_from_wavelength_um(wavelength_um):
    """Vacuum angular frequency (rad/s) for a wavelength in micrometres."""
    return 2.0 * np.pi * SPEED_OF_LIGHT / (np.asarray(wavelength_um, dtype=float) * 1e-6)


def wavelength_um_from_omega(omega):
    """Vacuum wavelength in micrometres for an angular frequency in rad/s."""
    return 2.0 * np.pi * SPEED_OF_LIGHT / np.asarray(omega, dtype=float) * 1e6


def wavevector_magnitude(crystal: CrystalSpec, omega, pol: Polarization):
    """Wavevector magnitude k = n(omega) * omega / c in rad/m."""
    lam_um = wavelength_um_from_omega(omega)
    n = refractive_index(crystal, lam_um, pol)
    return n * np.asarray(omega, dtype=float) / SPEED_OF_LIGHT


def gvd(crystal: CrystalSpec, wavelength_um: float, pol: Polarization,
        rel_step: float = 1e-4) -> float:
    """Group-velocity dispersion d^2k/domega^2 in s^2/m.

    Positive values mean normal dispersion, negative anomalous.  Uses a
    symmetric second difference in angular frequency with step
    ``rel_step * omega``, so the wavelength and its difference
    neighbours must all sit inside the validity window.
    """
    omega0 = float(omega_from_wavelength_um(wavelength_um))
    h = rel_step * omega0
    k_minus = wavevector_magnitude(crystal, omega0 - h, pol)
    k_zero = wavevector_magnitude(crystal, omega0, pol)
    k_plus = wavevector_magnitude(crystal, omega0 + h, pol)
    return float((k_plus - 2.0 * k_zero + k_minus) / h**2)


def zero_dispersion_wavelength(crystal: CrystalSpec, pol: Polarization,
                               scan_um: tuple[float, float] | None = None,
                               tol_um: float = 1e-6) -> float:
    """Wavelength (um) where the group-velocity dispersion crosses zero.

    Bisects on wavelength inside ``scan_um`` (default: the validity
    window shrunk by 0.1% so the finite-difference stencil stays
    inside).  The endpoints must bracket a sign change.

    Raises
    ------
    NoSignChange
        If the dispersion has the same sign at both scan endpoints.
    """
    if scan_um is None:
        lo_v, hi_v = crystal.validity_um
        scan_um = (lo_v * 1.001, hi_v * 0.999)
    lo, hi = float(scan_um[0]), float(scan_um[1])
    f_lo = gvd(crystal, lo, pol)
    f_hi = gvd(crystal, hi, pol)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if math.copysign(1.0, f_lo) == math.copysign(1.0, f_hi):
        raise NoSignChange(
            f"dispersion does not change sign over [{lo}, {hi}] um"
        )
    while hi - lo > tol_um:
        mid = 0.5 * (lo + hi)
        f_mid = gvd(crystal, mid, pol)
        if f_mid == 0.0:
            return mid
        if math.copysign(1.0, f_mid) == math.copysign(1.0, f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sellmeier_from_dict(d: dict) -> SellmeierSet:
    return SellmeierSet(A=float(d["A"]), B=float(d["B"]),
                        C=float(d["C"]), D=float(d["D"]))


def _crystal_from_dict(raw: dict, length_m: float,
                       cut_angle_rad: float) -> CrystalSpec:
    return CrystalSpec(
        name=str(raw["name"]),
        ordinary=_sellmeier_from_dict(raw["sellmeier_o"]),
        extraordinary=_sellmeier_from_dict(raw["sellmeier_e"]),
        validity_um=(float(raw["validity_um"][0]),
                     float(raw["validity_um"][1])),
        length_m=float(length_m),
        cut_angle_rad=float(cut_angle_rad),
    )


def load_crystal(path, length_m: float = 0.01,
                 cut_angle_rad: float = math.pi / 4) -> CrystalSpec:
    """Load a crystal description from a JSON file.

    The file must contain ``name``, ``sellmeier_o``, ``sellmeier_e``
    (each with keys A, B, C, D) and ``validity_um`` as a two-element
    list.  Length and cut angle are not material data and are supplied
    by the caller.
    """
    raw = json.loads(Path(path).read_text())
    try:
        return _crystal_from_dict(raw, length_m, cut_angle_rad)
    except (KeyError, IndexError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed crystal file {path}: {exc}") from exc


def bbo(length_m: float = 0.01,
        cut_angle_rad: float = math.pi / 4) -> CrystalSpec:
    """The packaged beta barium borate description."""
    ref = resources.files("pdcsim.crystals").joinpath("bbo.json")
    raw = json.loads(ref.read_text())
    return _crystal_from_dict(raw, length_m, cut_angle_rad)
