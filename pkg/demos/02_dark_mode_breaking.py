"""Switching transparency windows on and off with the phonon-hopping phase.

Two degenerate mechanical modes coupled by a phase-tagged phonon link form
a bright and a dark combination.  With the link phase at 0 or pi the dark
mode decouples and the probe sees a single window; at intermediate phases
both hybrid modes couple and the window splits in two.  The script walks
the phase across [0, 2 pi], reports the hybrid-basis couplings, and shows
the window count and positions flipping.

Run:  python3 demos/02_dark_mode_breaking.py
"""

from __future__ import annotations

import math

import omit_lab as ol


def main() -> None:
    print("== hybrid-basis couplings vs link phase ==\n")
    for theta_pi in (0.0, 0.25, 0.5, 0.75, 1.0):
        cfg = ol.standard_setup(2, eta_frac=0.05, theta=theta_pi * math.pi)
        steady = ol.solve_steady_state(cfg)
        broken, ratio = ol.dark_mode_broken(cfg, steady)
        print(f"theta = {theta_pi:4.2f} pi   weaker/stronger coupling = "
              f"{ratio:6.4f}   dark mode broken: {broken}")

    print("\n== window count and centres across the phase ==\n")
    for theta_pi in (0.0, 0.5, 1.0, 1.5):
        cfg = ol.standard_setup(2, eta_frac=0.05, theta=theta_pi * math.pi)
        spectrum = ol.compute_spectrum(cfg, points=4001,
                                       include_second_order=False)
        fits = ol.fit_linewidth(spectrum)
        centers = ", ".join(f"{f.center / cfg.omega_ref:.4f}" for f in fits)
        print(f"theta = {theta_pi:4.2f} pi   {len(fits)} window(s) at "
              f"[{centers}] omega_m")

    print("\nAt theta = pi/2 the split windows sit at the phonon-exchange")
    print("normal-mode frequencies omega_m +- eta:")
    cfg = ol.standard_setup(2, eta_frac=0.05, theta=math.pi / 2)
    steady = ol.solve_steady_state(cfg)
    report = ol.hybridize_two_mode(cfg, steady)
    eta = cfg.couplings[0].eta
    split = report.omega_tilde_plus - report.omega_tilde_minus
    print(f"  (omega_tilde_plus - omega_tilde_minus) / (2 eta) = "
          f"{split / (2 * eta):.6f}")


if __name__ == "__main__":
    main()
