"""Sweep the crystal cut angle and list where emission appears."""

import math

import pdcsim as p


def main():
    crystal = p.bbo()
    pump = p.PumpSpec(wavelength_m=800e-9)
    theta_pm = p.collinear_degenerate_angle(crystal, pump)
    print(f"collinear degenerate cut: {math.degrees(theta_pm):.4f} deg")

    for delta_deg in (-0.05, 0.0, 0.04, 0.08):
        theta = theta_pm + math.radians(delta_deg)
        loci = p.tuning_curve(crystal, pump, theta,
                              (1.25e-6, 2.3e-6), (-0.02, 0.02), 241)
        tag = f"cut {math.degrees(theta):.4f} deg ({delta_deg:+.2f})"
        if not loci:
            print(f"{tag}: no matched directions in range")
            continue
        lam = [x for x, _ in loci]
        ang = [a for _, a in loci]
        print(f"{tag}: {len(loci)} matched points, lambda "
              f"{min(lam) * 1e6:.3f}..{max(lam) * 1e6:.3f} um, "
              f"external angle up to {max(abs(a) for a in ang) * 1e3:.2f} mrad")


if __name__ == "__main__":
    main()
