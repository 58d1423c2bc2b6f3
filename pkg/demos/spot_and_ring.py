"""Classify how the emission spectrum changes shape with the cut angle.

At the matched angle the half-max region of S(omega, k) is a single
blob; a small positive detuning opens a hole and the blob becomes an
annulus.  An ASCII rendering of the coarse map goes with each verdict.
"""

import math

import numpy as np

import pdcsim as p

SHADES = " .:-=+*#%@"


def ascii_map(values, rows=24, cols=48):
    v = np.asarray(values, dtype=float)
    r = np.linspace(0, v.shape[0] - 1, rows).astype(int)
    c = np.linspace(0, v.shape[1] - 1, cols).astype(int)
    small = v[np.ix_(r, c)] / v.max()
    lines = []
    for row in small[::-1]:
        idx = np.minimum((row * (len(SHADES) - 1)).astype(int),
                         len(SHADES) - 1)
        lines.append("".join(SHADES[i] for i in idx))
    return "\n".join(lines)


def main():
    crystal = p.bbo()
    pump = p.PumpSpec(wavelength_m=800e-9)
    theta_pm = p.collinear_degenerate_angle(crystal, pump)

    for delta_deg in (0.0, 0.08, -0.5):
        at = crystal.with_cut_angle(theta_pm + math.radians(delta_deg))
        grid = p.default_grid(at, pump, 256, 256)
        field = p.build_intensity_grid(at, pump, grid)
        shape = p.classify_topology(field)
        print(f"\ncut angle detuning {delta_deg:+.2f} deg -> {shape}")
        if shape != "none":
            print(ascii_map(field.values))


if __name__ == "__main__":
    main()
