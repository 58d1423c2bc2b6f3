"""Command-line front end.

Usage:
    pdc <dispersion|spectrum|correlations|tuning> --config <path>
        [--out <dir>] [--format csv,bin,pgm] [--require-ring]

All run parameters come from a JSON config document; the subcommands
share the loading/validation code and the output conventions: every
run computes everything first, then stages its files through a
temporary directory and renames them into place, so an error exit never
leaves partial outputs behind.

Exit codes: 0 success, 2 configuration error, 3 physics-domain error,
4 I/O error, 5 ring fit required but not valid.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import os
import shutil
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import correlations as corr_mod
from . import dispersion as disp_mod
from . import phasematch as pm_mod
from . import spectra as spec_mod
from .errors import PdcError, PeakNotResolved

__all__ = ["main", "ConfigError", "RunConfig", "load_config"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_IO = 4
EXIT_FIT = 5

FORMATS = ("csv", "bin", "pgm")

LOCK_NAME = ".pdc.lock"


class ConfigError(Exception):
    """Malformed or inconsistent run configuration."""


class RingRequired(Exception):
    """--require-ring was set but the fitted map has no valid ring."""


# ---------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class RunConfig:
    crystal_path: Path
    pump: pm_mod.PumpSpec
    length_m: float
    theta_cut_deg: float | None   # exactly one of this ...
    auto_delta_deg: float | None  # ... and this is set
    n_omega: int
    n_k: int
    omega_halfspan_frac: float
    k_halfspan_frac: float
    mask_n: int
    mask_auto_scales: bool
    mask_omega_scale: float | None
    mask_k_scale: float | None
    mode_density: bool
    fwhm_lambda_m: float
    fwhm_theta_rad: float
    out_dir: Path
    formats: tuple[str, ...]
    tuning_theta_deg: tuple[float, ...]
    tuning_lambda_range_m: tuple[float, float]
    tuning_n_lambda: int
    tuning_omega_halfspan_frac: float | None
    tuning_k_halfspan_frac: float


def _section(raw: dict, name: str) -> dict:
    value = raw.get(name, {})
    if not isinstance(value, dict):
        raise ConfigError(f"section {name!r} must be an object")
    return value


def _number(section: dict, key: str, default, where: str) -> float:
    value = section.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key} must be a number")
    return float(value)


def _integer(section: dict, key: str, default: int, where: str) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}.{key} must be an integer")
    return value


def _boolean(section: dict, key: str, default: bool, where: str) -> bool:
    value = section.get(key, default)
    if not isinstance(value, bool):
        raise ConfigError(f"{where}.{key} must be true or false")
    return value


def load_config(path: Path) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")

    crystal_path = raw.get("crystal")
    if not isinstance(crystal_path, str) or not crystal_path:
        raise ConfigError("config key 'crystal' (path) is required")

    pump_sec = _section(raw, "pump")
    lambda_p_nm = _number(pump_sec, "lambda_p_nm", 800.0, "pump")
    gain = _number(pump_sec, "gain_GL", 0.0, "pump")
    if lambda_p_nm is None or lambda_p_nm <= 0.0:
        raise ConfigError("pump.lambda_p_nm must be positive")
    if gain is None or gain < 0.0:
        raise ConfigError("pump.gain_GL must be non-negative")
    pump = pm_mod.PumpSpec(wavelength_m=lambda_p_nm * 1e-9, gain=gain)

    geom = _section(raw, "geometry")
    theta_cut_deg = _number(geom, "theta_cut_deg", None, "geometry")
    auto = _boolean(geom, "auto", False, "geometry")
    delta_deg = _number(geom, "delta_deg", 0.0, "geometry")
    if (theta_cut_deg is None) == (not auto):
        raise ConfigError(
            "geometry must set exactly one of theta_cut_deg or auto=true")
    length_mm = _number(geom, "length_mm", 10.0, "geometry")
    if length_mm is None or length_mm <= 0.0:
        raise ConfigError("geometry.length_mm must be positive")

    grid = _section(raw, "grid")
    n_omega = _integer(grid, "n_omega", spec_mod.DEFAULT_N, "grid")
    n_k = _integer(grid, "n_k", spec_mod.DEFAULT_N, "grid")
    ofrac = _number(grid, "omega_halfspan_frac",
                    spec_mod.DEFAULT_OMEGA_HALFSPAN_FRAC, "grid")
    kfrac = _number(grid, "k_halfspan_frac",
                    spec_mod.DEFAULT_K_HALFSPAN_FRAC, "grid")

    mask = _section(raw, "mask")
    mask_n = _integer(mask, "n", 0, "mask")
    mask_auto = _boolean(mask, "auto_scales", True, "mask")
    mask_omega_scale = _number(mask, "omega_scale_rad_s", None, "mask")
    mask_k_scale = _number(mask, "k_scale_rad_m", None, "mask")
    if not mask_auto and mask_n != 0:
        if not mask_omega_scale or not mask_k_scale:
            raise ConfigError(
                "mask.auto_scales=false requires omega_scale_rad_s "
                "and k_scale_rad_m")

    det = _section(raw, "detection")
    mode_density = _boolean(det, "mode_density", False, "detection")
    fwhm_lambda_nm = _number(det, "fwhm_lambda_nm", 0.0, "detection")
    fwhm_theta_mrad = _number(det, "fwhm_theta_mrad", 0.0, "detection")
    if fwhm_lambda_nm < 0.0 or fwhm_theta_mrad < 0.0:
        raise ConfigError("detection FWHM values must be non-negative")

    outputs = _section(raw, "outputs")
    out_dir = outputs.get("directory", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("outputs.directory must be a non-empty string")
    formats = outputs.get("formats", ["csv"])
    formats = _check_formats(formats)

    tuning = _section(raw, "tuning")
    theta_list = tuning.get("theta_deg_list", [])
    if (not isinstance(theta_list, list)
            or any(isinstance(t, bool) or not isinstance(t, (int, float))
                   for t in theta_list)):
        raise ConfigError("tuning.theta_deg_list must be a list of numbers")
    lam_range = tuning.get("lambda_range_um",
                           [1.3, 2.1] if not theta_list else None)
    if lam_range is None:
        lam_range = [1.3, 2.1]
    if (not isinstance(lam_range, list) or len(lam_range) != 2
            or any(isinstance(x, bool) or not isinstance(x, (int, float))
                   for x in lam_range)
            or lam_range[0] >= lam_range[1]):
        raise ConfigError("tuning.lambda_range_um must be [min, max]")
    tuning_n_lambda = _integer(tuning, "n_lambda", 129, "tuning")
    # None -> span derived from lambda_range_um at run time
    tuning_ofrac = _number(tuning, "omega_halfspan_frac", None, "tuning")
    tuning_kfrac = _number(tuning, "k_halfspan_frac", 0.10, "tuning")

    return RunConfig(
        crystal_path=Path(crystal_path),
        pump=pump,
        length_m=length_mm * 1e-3,
        theta_cut_deg=theta_cut_deg,
        auto_delta_deg=delta_deg if auto else None,
        n_omega=n_omega,
        n_k=n_k,
        omega_halfspan_frac=ofrac,
        k_halfspan_frac=kfrac,
        mask_n=mask_n,
        mask_auto_scales=mask_auto,
        mask_omega_scale=mask_omega_scale,
        mask_k_scale=mask_k_scale,
        mode_density=mode_density,
        fwhm_lambda_m=fwhm_lambda_nm * 1e-9,
        fwhm_theta_rad=fwhm_theta_mrad * 1e-3,
        out_dir=Path(out_dir),
        formats=formats,
        tuning_theta_deg=tuple(float(t) for t in theta_list),
        tuning_lambda_range_m=(lam_range[0] * 1e-6, lam_range[1] * 1e-6),
        tuning_n_lambda=tuning_n_lambda,
        tuning_omega_halfspan_frac=tuning_ofrac,
        tuning_k_halfspan_frac=tuning_kfrac,
    )


def _check_formats(formats) -> tuple[str, ...]:
    if isinstance(formats, str):
        formats = [f for f in formats.split(",") if f]
    if (not isinstance(formats, (list, tuple)) or not formats
            or any(f not in FORMATS for f in formats)):
        raise ConfigError(f"formats must be a non-empty subset of {FORMATS}")
    # keep a canonical order so outputs do not depend on listing order
    return tuple(f for f in FORMATS if f in formats)


def _resolve_crystal(cfg: RunConfig) -> tuple[disp_mod.CrystalSpec, float]:
    """Crystal with the cut angle resolved; returns it plus theta in deg."""
    crystal = disp_mod.load_crystal(cfg.crystal_path, length_m=cfg.length_m)
    if cfg.theta_cut_deg is not None:
        theta = math.radians(cfg.theta_cut_deg)
    else:
        base = pm_mod.collinear_degenerate_angle(crystal, cfg.pump)
        theta = base + math.radians(cfg.auto_delta_deg)
    return crystal.with_cut_angle(theta), math.degrees(theta)


# ---------------------------------------------------------------------------
# serialization helpers


def _fmt_matrix(rows: np.ndarray) -> bytes:
    buf = io.BytesIO()
    np.savetxt(buf, rows, fmt="%.17g", delimiter=",", newline="\n")
    return buf.getvalue()


def csv_grid_bytes(header: str, row_axis: np.ndarray, col_axis: np.ndarray,
                   values: np.ndarray) -> bytes:
    n, m = values.shape
    table = np.column_stack([
        np.repeat(np.asarray(row_axis, dtype=float), m),
        np.tile(np.asarray(col_axis, dtype=float), n),
        np.asarray(values, dtype=float).ravel(),
    ])
    return header.encode() + b"\n" + _fmt_matrix(table)


def csv_table_bytes(header: str, columns: list[np.ndarray]) -> bytes:
    table = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    return header.encode() + b"\n" + _fmt_matrix(table)


def bin_bytes(values: np.ndarray) -> bytes:
    """Row-major 64-bit little-endian floats; complex data interleaves
    real and imaginary parts along the last axis."""
    arr = np.asarray(values)
    if np.iscomplexobj(arr):
        stacked = np.empty(arr.shape + (2,), dtype="<f8")
        stacked[..., 0] = arr.real
        stacked[..., 1] = arr.imag
        return np.ascontiguousarray(stacked).tobytes()
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


def pgm_bytes(values: np.ndarray) -> bytes:
    """16-bit P5 image, max-normalized; row 0 is the lowest row coordinate."""
    arr = np.asarray(values, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("PGM writer expects non-negative values")
    peak = arr.max()
    scaled = np.zeros_like(arr) if peak <= 0.0 else arr / peak
    data = np.round(scaled * 65535.0).astype(">u2")
    header = f"P5\n{arr.shape[1]} {arr.shape[0]}\n65535\n".encode()
    return header + data.tobytes()


def json_bytes(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode()


def _finite_or_none(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _axis_meta(name: str, unit: str, axis: np.ndarray) -> dict:
    axis = np.asarray(axis, dtype=float)
    step = float(axis[1] - axis[0]) if axis.size > 1 else 0.0
    return {"name": name, "unit": unit, "start": float(axis[0]),
            "step": step, "count": int(axis.size)}


def _common_meta(cfg: RunConfig, crystal: disp_mod.CrystalSpec,
                 theta_deg: float, mask_scales=None) -> dict:
    return {
        "crystal": {
            "name": crystal.name,
            "length_m": crystal.length_m,
            "cut_angle_deg": theta_deg,
            "validity_um": list(crystal.validity_um),
        },
        "pump": {
            "wavelength_m": cfg.pump.wavelength_m,
            "gain": cfg.pump.gain,
        },
        "mask": None if mask_scales is None else {
            "order_n": cfg.mask_n,
            "omega_scale_rad_s": mask_scales[0],
            "k_scale_rad_m": mask_scales[1],
        },
    }


class OutputSet:
    """Collects (filename, bytes) pairs; written in one staging pass."""

    def __init__(self):
        self.files: list[tuple[str, bytes]] = []

    def add(self, name: str, data: bytes) -> None:
        self.files.append((name, data))

    def add_grid(self, base: str, formats, header: str,
                 row_axis, col_axis, values, sidecar: dict) -> None:
        if "csv" in formats:
            self.add(base + ".csv",
                     csv_grid_bytes(header, row_axis, col_axis, values))
        if "bin" in formats:
            self.add(base + ".bin", bin_bytes(values))
        if "pgm" in formats:
            self.add(base + ".pgm", pgm_bytes(np.abs(values)))
        self.add(base + ".json", json_bytes(sidecar))


def stage_outputs(out_dir: Path, files: list[tuple[str, bytes]]) -> None:
    """Write everything to a temp dir inside ``out_dir``, then rename.

    An advisory lock file guards against concurrent runs on the same
    directory; holders crash-safe remove it on exit.
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    lock = out_dir / LOCK_NAME
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError as exc:
        raise OSError(f"output directory {out_dir} is locked "
                      f"(remove {lock} if stale)") from exc
    try:
        tmp = Path(tempfile.mkdtemp(prefix=".stage-", dir=out_dir))
        try:
            for name, data in files:
                (tmp / name).write_bytes(data)
            for name, _ in files:
                os.replace(tmp / name, out_dir / name)
        finally:
            shutil.rmtree(tmp, ignore_errors=True)
    finally:
        os.close(fd)
        lock.unlink(missing_ok=True)


# ---------------------------------------------------------------------------
# subcommands


def cmd_dispersion(cfg: RunConfig) -> int:
    crystal = disp_mod.load_crystal(cfg.crystal_path, length_m=cfg.length_m)
    lo, hi = crystal.validity_um
    lam = np.linspace(lo * 1.02, hi * 0.98, 201)
    n_o = disp_mod.refractive_index(crystal, lam, disp_mod.ORDINARY)
    n_e = disp_mod.refractive_index(crystal, lam,
                                    disp_mod.EXTRAORDINARY_PRINCIPAL)
    beta2 = np.array([disp_mod.gvd(crystal, x, disp_mod.ORDINARY)
                      for x in lam])
    zdw = disp_mod.zero_dispersion_wavelength(crystal, disp_mod.ORDINARY)

    out = OutputSet()
    out.add("dispersion_table.csv", csv_table_bytes(
        "lambda_um,n_ordinary,n_extraordinary_principal,gvd_ordinary_s2_per_m",
        [lam, n_o, n_e, beta2]))
    out.add("dispersion_report.json", json_bytes({
        "crystal": crystal.name,
        "validity_um": list(crystal.validity_um),
        "zdw_um": zdw,
        "gvd_at_zdw_s2_per_m": disp_mod.gvd(crystal, zdw, disp_mod.ORDINARY),
    }))
    stage_outputs(cfg.out_dir, out.files)
    print(f"zdw_um {zdw:.6f}")
    return EXIT_OK


def _intensity_pipeline(cfg: RunConfig):
    crystal, theta_deg = _resolve_crystal(cfg)
    grid = spec_mod.default_grid(
        crystal, cfg.pump, cfg.n_omega, cfg.n_k,
        cfg.omega_halfspan_frac, cfg.k_halfspan_frac)
    intensity = spec_mod.build_intensity_grid(crystal, cfg.pump, grid)
    return crystal, theta_deg, grid, intensity


def _detector_axes(grid: spec_mod.GridSpec, n_lambda: int, n_theta: int):
    omega = grid.omega_axis()
    lam_lo = 2.0 * np.pi * disp_mod.SPEED_OF_LIGHT / omega[-1]
    lam_hi = 2.0 * np.pi * disp_mod.SPEED_OF_LIGHT / omega[0]
    theta_max = math.asin(min(1.0, grid.k_halfspan
                              * disp_mod.SPEED_OF_LIGHT / omega[0]))
    lam_axis = np.linspace(lam_lo, lam_hi, n_lambda)
    theta_axis = np.linspace(-theta_max, theta_max, n_theta)
    return lam_axis, theta_axis


def _detected_map(cfg: RunConfig, intensity: spec_mod.FieldGrid,
                  grid: spec_mod.GridSpec) -> spec_mod.AngleWavelengthMap:
    lam_axis, theta_axis = _detector_axes(grid, cfg.n_omega, cfg.n_k)
    detected = spec_mod.to_angle_wavelength(intensity, lam_axis, theta_axis)
    if cfg.mode_density:
        detected = spec_mod.apply_mode_density(
            detected, cfg.pump.degenerate_wavelength_m)
    if cfg.fwhm_lambda_m > 0.0 or cfg.fwhm_theta_rad > 0.0:
        detected = spec_mod.instrument_convolution(
            detected, cfg.fwhm_lambda_m, cfg.fwhm_theta_rad)
    return detected


def cmd_spectrum(cfg: RunConfig) -> int:
    crystal, theta_deg, grid, intensity = _intensity_pipeline(cfg)
    gain = cfg.pump.gain
    ideal = math.sinh(gain) ** 2 if gain > 0.0 else 1.0
    topology = spec_mod.classify_topology(intensity, ideal_peak=ideal)
    detected = _detected_map(cfg, intensity, grid)

    meta = _common_meta(cfg, crystal, theta_deg)
    meta["topology"] = topology
    out = OutputSet()
    out.add_grid(
        "spectrum_omega_k", cfg.formats, "omega_rad_per_s,k_rad_per_m,value",
        intensity.omega_axis, intensity.k_axis, intensity.values,
        {**meta, "content": "spectral intensity",
         "omega_center_rad_s": grid.omega_center,
         "dtype": "float64-le",
         "row_axis": _axis_meta("omega", "rad/s", intensity.omega_axis),
         "col_axis": _axis_meta("k", "rad/m", intensity.k_axis)})
    out.add_grid(
        "spectrum_lambda_theta", cfg.formats, "lambda_m,theta_rad,value",
        detected.lambda_axis_m, detected.theta_axis_rad, detected.values,
        {**meta, "content": "detected spectrum",
         "mode_density_applied": detected.weighting_applied,
         "dtype": "float64-le",
         "row_axis": _axis_meta("lambda", "m", detected.lambda_axis_m),
         "col_axis": _axis_meta("theta", "rad", detected.theta_axis_rad)})
    stage_outputs(cfg.out_dir, out.files)
    print(topology)
    return EXIT_OK


def cmd_correlations(cfg: RunConfig, require_ring: bool) -> int:
    crystal, theta_deg, grid, intensity = _intensity_pipeline(cfg)
    amplitude = spec_mod.build_amplitude_grid(crystal, cfg.pump, grid)

    mask_scales = None
    phase_values = np.zeros(np.asarray(amplitude.values).shape, dtype=float)
    masked = amplitude
    if cfg.mask_n != 0:
        if cfg.mask_auto_scales:
            mask_scales = corr_mod.ring_scales(amplitude)
        else:
            mask_scales = (cfg.mask_omega_scale, cfg.mask_k_scale)
        mask = corr_mod.PhaseMask(
            order_n=cfg.mask_n, omega_scale=mask_scales[0],
            k_scale=mask_scales[1], omega_center=amplitude.omega_center)
        masked = corr_mod.apply_phase_mask(amplitude, mask)
        u = (amplitude.omega_axis[:, None] - mask.omega_center) / mask.omega_scale
        v = amplitude.k_axis[None, :] / mask.k_scale
        phase_values = np.angle(np.exp(1j * mask.order_n * np.arctan2(v, u)))

    first = corr_mod.g1_map(intensity)
    second = corr_mod.g2_map(masked)
    fit = corr_mod.ring_fit(second)
    try:
        report = corr_mod.widths_and_fedorov(intensity, first)
        fedorov_omega = report.fedorov_omega
        fedorov_k = report.fedorov_k
    except PeakNotResolved:
        fedorov_omega = fedorov_k = None

    if require_ring and not fit.valid:
        raise RingRequired(
            f"ring fit not valid (residual {fit.rms_residual:.3g})")

    meta = _common_meta(cfg, crystal, theta_deg, mask_scales)
    fit_report = {
        "tau_c_fs": _finite_or_none(fit.tau_c * 1e15),
        "xi_c_um": _finite_or_none(fit.xi_c * 1e6),
        "residual": _finite_or_none(fit.rms_residual),
        "valid": fit.valid,
        "fedorov_omega": fedorov_omega,
        "fedorov_k": fedorov_k,
    }
    out = OutputSet()
    out.add_grid(
        "g1_abs", cfg.formats, "tau_s,xi_m,value",
        first.tau_axis, first.xi_axis, np.abs(first.values),
        {**meta, "content": "first-order correlation magnitude",
         "omega_center_rad_s": grid.omega_center, "dtype": "float64-le",
         "row_axis": _axis_meta("tau", "s", first.tau_axis),
         "col_axis": _axis_meta("xi", "m", first.xi_axis)})
    out.add_grid(
        "g2_norm", cfg.formats, "tau_s,xi_m,value",
        second.tau_axis, second.xi_axis, second.values,
        {**meta, "content": "normalized second-order correlation",
         "omega_center_rad_s": grid.omega_center, "dtype": "float64-le",
         "row_axis": _axis_meta("tau", "s", second.tau_axis),
         "col_axis": _axis_meta("xi", "m", second.xi_axis)})
    out.add_grid(
        "mask_phase", cfg.formats, "omega_rad_per_s,k_rad_per_m,phase_rad",
        amplitude.omega_axis, amplitude.k_axis, phase_values + np.pi,
        {**meta, "content": "mask phase, shifted by pi into [0, 2*pi)",
         "omega_center_rad_s": grid.omega_center, "dtype": "float64-le",
         "row_axis": _axis_meta("omega", "rad/s", amplitude.omega_axis),
         "col_axis": _axis_meta("k", "rad/m", amplitude.k_axis)})
    out.add("fit_report.json", json_bytes({**meta, **fit_report}))
    stage_outputs(cfg.out_dir, out.files)
    print(json.dumps(fit_report, sort_keys=True))
    return EXIT_OK


def _tuning_omega_frac(cfg: RunConfig) -> float:
    """Frequency halfspan of the tuning map, as a fraction of omega0.

    Explicit config wins; otherwise the span is sized to cover the
    requested wavelength range (with 5% slack), so the map never spills
    past what the sweep actually asks for.
    """
    if cfg.tuning_omega_halfspan_frac is not None:
        return cfg.tuning_omega_halfspan_frac
    omega0 = 0.5 * cfg.pump.omega
    lam_lo, lam_hi = cfg.tuning_lambda_range_m
    omega_hi = 2.0 * math.pi * disp_mod.SPEED_OF_LIGHT / lam_lo
    omega_lo = 2.0 * math.pi * disp_mod.SPEED_OF_LIGHT / lam_hi
    return 1.05 * max(omega_hi - omega0, omega0 - omega_lo) / omega0


def cmd_tuning(cfg: RunConfig) -> int:
    if not cfg.tuning_theta_deg:
        raise ConfigError("tuning.theta_deg_list must list at least one angle")
    crystal = disp_mod.load_crystal(cfg.crystal_path, length_m=cfg.length_m)
    out = OutputSet()
    angles_written = []
    ofrac = _tuning_omega_frac(cfg)
    for index, theta_deg in enumerate(cfg.tuning_theta_deg):
        theta = math.radians(theta_deg)
        at_theta = crystal.with_cut_angle(theta)
        grid = spec_mod.default_grid(
            at_theta, cfg.pump, cfg.n_omega, cfg.n_k,
            ofrac, cfg.tuning_k_halfspan_frac)
        intensity = spec_mod.build_intensity_grid(at_theta, cfg.pump, grid)
        detected = _detected_map(cfg, intensity, grid)
        _, theta_axis = _detector_axes(grid, cfg.n_omega, cfg.n_k)
        loci = pm_mod.tuning_curve(
            at_theta, cfg.pump, theta,
            cfg.tuning_lambda_range_m,
            (float(theta_axis[0]), float(theta_axis[-1])),
            cfg.tuning_n_lambda)

        base = f"tuning_{index:02d}"
        meta = _common_meta(cfg, at_theta, theta_deg)
        out.add_grid(
            base + "_map", cfg.formats, "lambda_m,theta_rad,value",
            detected.lambda_axis_m, detected.theta_axis_rad, detected.values,
            {**meta, "content": "detected spectrum", "dtype": "float64-le",
             "row_axis": _axis_meta("lambda", "m", detected.lambda_axis_m),
             "col_axis": _axis_meta("theta", "rad",
                                    detected.theta_axis_rad)})
        if loci:
            lam_col = np.array([p[0] for p in loci])
            ang_col = np.array([p[1] for p in loci])
        else:
            lam_col = np.empty(0)
            ang_col = np.empty(0)
        out.add(base + "_loci.csv", csv_table_bytes(
            "lambda_m,theta_ext_rad", [lam_col, ang_col]))
        angles_written.append({"index": index, "theta_deg": theta_deg,
                               "n_loci": len(loci)})
    out.add("tuning_meta.json", json_bytes({"angles": angles_written}))
    stage_outputs(cfg.out_dir, out.files)
    for entry in angles_written:
        print(f"theta_deg {entry['theta_deg']:.4f} loci {entry['n_loci']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdc",
        description="Down-conversion spectra and correlation maps")
    parser.add_argument("command",
                        choices=["dispersion", "spectrum", "correlations",
                                 "tuning"])
    parser.add_argument("--config", required=True, help="JSON run config")
    parser.add_argument("--out", help="override outputs.directory")
    parser.add_argument("--format",
                        help="override outputs.formats (comma-separated)")
    parser.add_argument("--require-ring", action="store_true",
                        help="exit 5 unless the ring fit is valid")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(Path(args.config))
        if args.out:
            cfg = dataclasses.replace(cfg, out_dir=Path(args.out))
        if args.format:
            cfg = dataclasses.replace(cfg, formats=_check_formats(args.format))
        if args.command == "dispersion":
            return cmd_dispersion(cfg)
        if args.command == "spectrum":
            return cmd_spectrum(cfg)
        if args.command == "correlations":
            return cmd_correlations(cfg, args.require_ring)
        return cmd_tuning(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except RingRequired as exc:
        print(f"fit requirement failed: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (PdcError, ValueError) as exc:
        print(f"physics error: {exc.__class__.__name__}: {exc}",
              file=sys.stderr)
        return EXIT_PHYSICS
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
