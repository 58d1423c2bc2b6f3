"""Walk the refractive-index and dispersion curves of the packaged crystal.

Prints a short table of n_o, n_e and the ordinary-wave GVD across the
transparency window, then brackets the zero-dispersion wavelength.
"""

import numpy as np

import pdcsim as p


def main():
    crystal = p.bbo()
    lo, hi = crystal.validity_um
    print(f"crystal {crystal.name}, Sellmeier window "
          f"[{lo:.2f}, {hi:.2f}] um")

    lam = np.linspace(0.4, 2.2, 10)
    n_o = p.refractive_index(crystal, lam, p.ORDINARY)
    n_e = p.refractive_index(crystal, lam, p.EXTRAORDINARY_PRINCIPAL)
    print(f"{'lambda_um':>10} {'n_o':>9} {'n_e':>9} {'gvd_s2_per_m':>14}")
    for x, a, b in zip(lam, n_o, n_e):
        beta2 = p.gvd(crystal, x, p.ORDINARY)
        print(f"{x:10.3f} {a:9.5f} {b:9.5f} {beta2:14.3e}")

    zdw = p.zero_dispersion_wavelength(crystal, p.ORDINARY)
    print(f"\nordinary-wave GVD changes sign at {zdw:.6f} um")
    print(f"gvd({zdw:.4f} um) = {p.gvd(crystal, zdw, p.ORDINARY):.2e}")
    print(f"gvd(1.6 um)    = {p.gvd(crystal, 1.6, p.ORDINARY):.2e}"
          "  (anomalous)")


if __name__ == "__main__":
    main()
