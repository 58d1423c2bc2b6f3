"""Compare spectral widths with correlation widths at the matched cut."""

import pdcsim as p


def main():
    crystal = p.bbo()
    pump = p.PumpSpec(wavelength_m=800e-9)
    theta_pm = p.collinear_degenerate_angle(crystal, pump)
    at = crystal.with_cut_angle(theta_pm)

    grid = p.default_grid(at, pump, 512, 512)
    intensity = p.build_intensity_grid(at, pump, grid)
    first = p.g1_map(intensity)
    report = p.widths_and_fedorov(intensity, first)

    print(f"spectral FWHM:    {report.spectrum_fwhm_omega:.4e} rad/s, "
          f"{report.spectrum_fwhm_k:.4e} rad/m")
    print(f"correlation FWHM: {report.corr_fwhm_tau:.4e} s, "
          f"{report.corr_fwhm_xi:.4e} m")
    print(f"width ratios:     {report.fedorov_omega:.4f} (time axis), "
          f"{report.fedorov_k:.4f} (space axis)")
    print("\na separable transform-limited Gaussian scores exactly 1, and")
    print("with a strictly monochromatic plane-wave pump the emission stays")
    print("transform-limited, so the quotient is pinned near 1; ratios far")
    print("above 1 need finite pump bandwidth and beam size, which this")
    print("model deliberately collapses to delta functions")


if __name__ == "__main__":
    main()
