"""Spatiotemporal correlation maps derived from spectral grids.

The central object is the discrete transform

    G(tau, xi) = sum_{p,q} V[p,q] exp(i k_q xi - i (omega_p - omega0) tau)
                 * delta_omega * delta_k

evaluated by FFT with centred zero padding (fast path) and by the
literal double sum (reference path used as a test oracle).  First-order
maps transform the real intensity; second-order maps transform the
complex amplitude and square the magnitude.  Azimuthal phase masks,
ring fitting and width/entanglement metrics operate on these maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import AllZeroField, GridTooLarge, PeakNotResolved
from .spectra import KIND_AMPLITUDE, KIND_INTENSITY, FieldGrid

__all__ = [
    "ORDER_FIRST",
    "ORDER_SECOND",
    "CorrMap",
    "PhaseMask",
    "RingFitResult",
    "WidthsReport",
    "correlation_transform",
    "g1_map",
    "g2_map",
    "direct_transform_oracle",
    "ring_scales",
    "apply_phase_mask",
    "ring_fit",
    "widths_and_fedorov",
]

ORDER_FIRST = "first"
ORDER_SECOND = "second"

DEFAULT_PAD_FACTOR = 4


@dataclass(frozen=True)
class CorrMap:
    """Correlation samples over (tau, xi), axes symmetric about zero."""

    tau_axis: np.ndarray
    xi_axis: np.ndarray
    values: np.ndarray
    order: str
    normalized: bool

    def __post_init__(self):
        if self.order not in (ORDER_FIRST, ORDER_SECOND):
            raise ValueError(f"unknown correlation order {self.order!r}")
        if self.values.shape != (self.tau_axis.size, self.xi_axis.size):
            raise ValueError("values shape does not match axes")

    def origin_indices(self) -> tuple[int, int]:
        return (int(np.argmin(np.abs(self.tau_axis))),
                int(np.argmin(np.abs(self.xi_axis))))


def _padded_transform(values: np.ndarray, delta_omega: float,
                      delta_k: float, pad_factor: int):
    if pad_factor < 1:
        raise ValueError("pad_factor must be >= 1")
    n, m = values.shape
    rows, cols = pad_factor * n, pad_factor * m
    padded = np.zeros((rows, cols), dtype=np.complex128)
    padded[(rows - n) // 2:(rows + n) // 2,
           (cols - m) // 2:(cols + m) // 2] = values

    # row index encodes omega - omega0 (negative kernel sign -> fft);
    # column index encodes k (positive kernel sign -> ifft * count)
    spectrum = np.fft.fft(np.fft.ifftshift(padded), axis=0)
    spectrum = np.fft.ifft(spectrum, axis=1) * cols
    transformed = np.fft.fftshift(spectrum) * delta_omega * delta_k

    tau = (np.arange(rows) - rows // 2) * 2.0 * np.pi / (rows * delta_omega)
    xi = (np.arange(cols) - cols // 2) * 2.0 * np.pi / (cols * delta_k)
    if pad_factor > 1:
        transformed = transformed[rows // 4:3 * rows // 4,
                                  cols // 4:3 * cols // 4]
        tau = tau[rows // 4:3 * rows // 4]
        xi = xi[cols // 4:3 * cols // 4]
    return tau, xi, transformed


def correlation_transform(field: FieldGrid,
                          pad_factor: int = DEFAULT_PAD_FACTOR) -> CorrMap:
    """Apply the correlation kernel to a field grid of either kind.

    Zero padding by ``pad_factor`` refines the (tau, xi) sampling; the
    padded result is cropped back to its central half so the returned
    map oversamples the unpadded axes by ``pad_factor / 2``.
    """
    tau, xi, transformed = _padded_transform(
        np.asarray(field.values, dtype=np.complex128),
        field.delta_omega, field.delta_k, pad_factor,
    )
    return CorrMap(tau_axis=tau, xi_axis=xi, values=transformed,
                   order=ORDER_FIRST, normalized=False)


def g1_map(spectrum: FieldGrid,
           pad_factor: int = DEFAULT_PAD_FACTOR) -> CorrMap:
    """First-order correlation map: transform of the real intensity.

    The carrier at the centre frequency is removed, so the map is the
    envelope; its value at the origin equals the grid total times the
    cell area, and no point exceeds that in magnitude.
    """
    if spectrum.kind != KIND_INTENSITY:
        raise ValueError("first-order map expects an intensity grid")
    return correlation_transform(spectrum, pad_factor)


def g2_map(amplitude: FieldGrid,
           pad_factor: int = DEFAULT_PAD_FACTOR) -> CorrMap:
    """Second-order correlation map, max-normalized.

    Transforms the complex amplitude, squares the magnitude and divides
    by the maximum; the constant background of the physical quantity is
    omitted as negligible after normalization.

    Raises
    ------
    AllZeroField
        If the amplitude grid is identically zero.
    """
    if amplitude.kind != KIND_AMPLITUDE:
        raise ValueError("second-order map expects an amplitude grid")
    if not np.any(amplitude.values):
        raise AllZeroField("amplitude grid is identically zero")
    base = correlation_transform(amplitude, pad_factor)
    magnitude_sq = np.abs(base.values) ** 2
    return CorrMap(tau_axis=base.tau_axis, xi_axis=base.xi_axis,
                   values=magnitude_sq / magnitude_sq.max(),
                   order=ORDER_SECOND, normalized=True)


def direct_transform_oracle(field: FieldGrid) -> CorrMap:
    """Literal double-sum transform; the reference for the fast path.

    Evaluates the kernel sum cell by cell with no FFT, on the unpadded
    axes, so it is O(N^4) and only accepts small grids.  Matches
    ``correlation_transform(field, pad_factor=1)``.

    Raises
    ------
    GridTooLarge
        If either grid dimension exceeds 64.
    """
    n, m = field.values.shape
    if n > 64 or m > 64:
        raise GridTooLarge("reference transform accepts at most 64x64")
    d_omega = field.delta_omega if n > 1 else 1.0
    d_k = field.delta_k if m > 1 else 1.0
    detuning = np.asarray(field.omega_axis, dtype=float) - field.omega_center
    k_axis = np.asarray(field.k_axis, dtype=float)
    tau = (np.arange(n) - n // 2) * 2.0 * np.pi / (n * d_omega)
    xi = (np.arange(m) - m // 2) * 2.0 * np.pi / (m * d_k)
    values = np.asarray(field.values, dtype=np.complex128)
    out = np.empty((n, m), dtype=np.complex128)
    for i in range(n):
        for j in range(m):
            phase = np.exp(1j * (k_axis[None, :] * xi[j]
                                 - detuning[:, None] * tau[i]))
            out[i, j] = np.sum(values * phase) * d_omega * d_k
    return CorrMap(tau_axis=tau, xi_axis=xi, values=out,
                   order=ORDER_FIRST, normalized=False)


@dataclass(frozen=True)
class PhaseMask:
    """Azimuthal phase e^{i n phi} in scale-normalized coordinates.

    phi = atan2(k / k_scale, (omega - omega_center) / omega_scale), so
    the scales set what counts as a circle; order 0 is the identity.
    """

    order_n: int
    omega_scale: float
    k_scale: float
    omega_center: float

    def __post_init__(self):
        if self.omega_scale <= 0.0 or self.k_scale <= 0.0:
            raise ValueError("mask scales must be positive")


def _outermost_halfmax_extent(coords: np.ndarray, profile: np.ndarray,
                              center: float) -> float:
    """Distance from center to the outermost half-max crossing."""
    peak = float(profile.max())
    if peak <= 0.0:
        raise AllZeroField("profile is identically zero")
    half = 0.5 * peak
    above = np.nonzero(profile >= half)[0]
    i = int(above[-1])
    if i + 1 < profile.size:
        # linear interpolation between the last cell above and its neighbour
        frac = (profile[i] - half) / (profile[i] - profile[i + 1])
        edge = coords[i] + frac * (coords[i + 1] - coords[i])
    else:
        edge = coords[i]
    return abs(float(edge) - center)


def ring_scales(amplitude: FieldGrid) -> tuple[float, float]:
    """Half-max half-extents of |values| along the two centre cuts.

    Used as the natural normalization scales of an azimuthal mask on a
    ring-shaped amplitude: the outermost half-max crossing of the cut
    through the ring centre, per axis.
    """
    magnitude = np.abs(np.asarray(amplitude.values))
    row_c = int(np.argmin(np.abs(amplitude.omega_axis
                                 - amplitude.omega_center)))
    col_c = int(np.argmin(np.abs(amplitude.k_axis)))
    omega_scale = _outermost_halfmax_extent(
        amplitude.omega_axis, magnitude[:, col_c], amplitude.omega_center)
    k_scale = _outermost_halfmax_extent(
        amplitude.k_axis, magnitude[row_c, :], 0.0)
    return omega_scale, k_scale


def default_mask(amplitude: FieldGrid, order_n: int) -> PhaseMask:
    """Mask with scales measured from the amplitude grid itself."""
    omega_scale, k_scale = ring_scales(amplitude)
    return PhaseMask(order_n=order_n, omega_scale=omega_scale,
                     k_scale=k_scale, omega_center=amplitude.omega_center)


def apply_phase_mask(amplitude: FieldGrid, mask: PhaseMask) -> FieldGrid:
    """Multiply an amplitude grid by e^{i n phi}; magnitudes unchanged."""
    if mask.order_n == 0:
        return amplitude
    u = (amplitude.omega_axis[:, None] - mask.omega_center) / mask.omega_scale
    v = amplitude.k_axis[None, :] / mask.k_scale
    phi = np.arctan2(v, u)
    return amplitude.with_values(
        np.asarray(amplitude.values, dtype=np.complex128)
        * np.exp(1j * mask.order_n * phi))


@dataclass(frozen=True)
class RingFitResult:
    tau_c: float
    xi_c: float
    rms_residual: float
    valid: bool


def _parabolic_refine(coords: np.ndarray, values: np.ndarray,
                      i: int) -> float:
    if i <= 0 or i >= values.size - 1:
        return float(coords[i])
    a, b, c = values[i - 1], values[i], values[i + 1]
    denom = a - 2.0 * b + c
    if denom == 0.0:
        return float(coords[i])
    shift = 0.5 * (a - c) / denom
    return float(coords[i] + shift * (coords[1] - coords[0]))


def _positive_cut_peak(coords: np.ndarray, profile: np.ndarray,
                       i_origin: int):
    """Strongest interior local maximum at positive coordinate, if any.

    Returns (refined position, peak value) or None when the cut just
    decays from the centre with no usable off-origin peak.
    """
    best = None
    for i in range(i_origin + 1, profile.size - 1):
        if profile[i] >= profile[i - 1] and profile[i] > profile[i + 1]:
            if best is None or profile[i] > profile[best]:
                best = i
    if best is None:
        return None
    return _parabolic_refine(coords, profile, best), float(profile[best])


def ring_fit(map_: CorrMap, n_rays: int = 64) -> RingFitResult:
    """Fit the ellipse radii of a ring-shaped second-order map.

    The radii are the off-origin maxima of the two axis cuts (parabolic
    sub-cell refinement).  Quality control samples the ridge radius
    along ``n_rays`` directions in radius-normalized coordinates; the
    fit is valid when the rms deviation of those radii from 1 stays
    below 0.2 and both axis peaks dominate the map (above the origin
    value and above three times the map median).  Maps whose axis cuts
    only decay from the origin come back with ``valid=False``.
    """
    if map_.order != ORDER_SECOND or not map_.normalized:
        raise ValueError("ring fit expects a normalized second-order map")
    s = np.abs(np.asarray(map_.values, dtype=float))
    i0, j0 = map_.origin_indices()
    origin_value = float(s[i0, j0])
    median = float(np.median(s))

    tau_peak = _positive_cut_peak(map_.tau_axis, s[:, j0], i0)
    xi_peak = _positive_cut_peak(map_.xi_axis, s[i0, :], j0)
    if tau_peak is None or xi_peak is None:
        return RingFitResult(math.nan, math.nan, math.inf, False)
    tau_c, tau_val = tau_peak
    xi_c, xi_val = xi_peak
    if tau_c <= 0.0 or xi_c <= 0.0:
        return RingFitResult(math.nan, math.nan, math.inf, False)
    dominate = (min(tau_val, xi_val) > 3.0 * median
                and tau_val > origin_value and xi_val > origin_value)
    if not dominate:
        return RingFitResult(tau_c, xi_c, math.inf, False)

    # ridge radius along rays, in coordinates where the fit is a unit circle
    angles = np.linspace(0.0, 2.0 * np.pi, n_rays, endpoint=False)
    radii = np.linspace(0.25, 2.0, 351)
    tau_pts = radii[None, :] * np.cos(angles)[:, None] * tau_c
    xi_pts = radii[None, :] * np.sin(angles)[:, None] * xi_c
    d_tau = map_.tau_axis[1] - map_.tau_axis[0]
    d_xi = map_.xi_axis[1] - map_.xi_axis[0]
    rows = (tau_pts - map_.tau_axis[0]) / d_tau
    cols = (xi_pts - map_.xi_axis[0]) / d_xi
    sampled = ndimage.map_coordinates(
        s, [rows.ravel(), cols.ravel()], order=1, mode="nearest",
    ).reshape(rows.shape)
    ridge = np.empty(n_rays)
    for r in range(n_rays):
        i = int(np.argmax(sampled[r]))
        ridge[r] = _parabolic_refine(radii, sampled[r], i)
    rms = float(np.sqrt(np.mean((ridge - 1.0) ** 2)))
    return RingFitResult(tau_c, xi_c, rms, rms < 0.2)


@dataclass(frozen=True)
class WidthsReport:
    spectrum_fwhm_omega: float
    spectrum_fwhm_k: float
    corr_fwhm_tau: float
    corr_fwhm_xi: float
    fedorov_omega: float
    fedorov_k: float


def _fwhm_around(coords: np.ndarray, profile: np.ndarray, i_peak: int,
                 label: str) -> float:
    """Interpolated full width at half the value at ``i_peak``."""
    half = 0.5 * float(profile[i_peak])
    if half <= 0.0:
        raise PeakNotResolved(f"{label}: empty profile")

    def crossing(direction: int) -> float:
        i = i_peak
        while 0 <= i + direction < profile.size:
            j = i + direction
            if profile[j] < half:
                frac = (profile[i] - half) / (profile[i] - profile[j])
                return float(coords[i] + frac * (coords[j] - coords[i]))
            i = j
        raise PeakNotResolved(f"{label}: half level not reached in grid")

    width = crossing(+1) - crossing(-1)
    cell = abs(float(coords[1] - coords[0]))
    if width < 3.0 * cell:
        raise PeakNotResolved(f"{label}: width below 3 grid cells")
    return width


LOG16 = 8.0 * math.log(2.0)  # FWHM product of a transform-limited pair


def widths_and_fedorov(spectrum: FieldGrid, corr: CorrMap) -> WidthsReport:
    """Spectral marginal widths, correlation peak widths, and their ratios.

    The spectral FWHM in each variable is converted to the width a
    transform-limited peak would have in the conjugate variable
    (product 8 ln 2) and divided by the measured correlation FWHM, so a
    separable transform-limited Gaussian scores exactly 1 on both axes.

    Raises
    ------
    PeakNotResolved
        If any width spans fewer than 3 grid cells or never falls to
        half within the grid.
    """
    if spectrum.kind != KIND_INTENSITY:
        raise ValueError("width report expects an intensity grid")
    s = np.asarray(spectrum.values, dtype=float)
    marg_omega = s.sum(axis=1)
    marg_k = s.sum(axis=0)
    fwhm_omega = _fwhm_around(spectrum.omega_axis, marg_omega,
                              int(np.argmax(marg_omega)), "spectral marginal")
    fwhm_k = _fwhm_around(spectrum.k_axis, marg_k,
                          int(np.argmax(marg_k)), "wavevector marginal")

    c = np.abs(np.asarray(corr.values))
    i0, j0 = corr.origin_indices()
    fwhm_tau = _fwhm_around(corr.tau_axis, c[:, j0], i0, "correlation peak")
    fwhm_xi = _fwhm_around(corr.xi_axis, c[i0, :], j0, "correlation peak")

    return WidthsReport(
        spectrum_fwhm_omega=fwhm_omega,
        spectrum_fwhm_k=fwhm_k,
        corr_fwhm_tau=fwhm_tau,
        corr_fwhm_xi=fwhm_xi,
        fedorov_omega=(LOG16 / fwhm_omega) / fwhm_tau,
        fedorov_k=(LOG16 / fwhm_k) / fwhm_xi,
    )
