"""Cross-checking the frequency-domain solver against brute-force integration.

The sideband spectra come from a linearised frequency-domain solve.  As an
independent check, this script integrates the full nonlinear classical
equations of motion with the probe on, lock-in demodulates the cavity
trace at the probe detuning, and compares the extracted sideband
amplitudes against the linear prediction.  At a weak probe the two agree
to a fraction of a percent; pushing the probe harder grows the truncation
residual exactly as a perturbative expansion should.

Run:  python3 demos/04_time_domain_closure.py   (takes ~10 s)
"""

from __future__ import annotations

import math
import warnings

import omit_lab as ol


def main() -> None:
    cfg = ol.standard_setup(2, eta_frac=0.05, theta=math.pi / 2)

    print("== closure at both split windows (probe at 1% of the pump) ==\n")
    for frac in (0.95, 1.05):
        report = ol.sideband_closure(cfg, frac * cfg.omega_ref,
                                     probe_ratio=0.01, periods=150)
        print(f"omega = {frac:.2f} omega_m   "
              f"first-order rel err {report.rel_err_first:.2e}   "
              f"second-order rel err {report.rel_err_second:.2e}   "
              f"cycles used {report.n_cycles}")

    print("\n== truncation residual vs probe strength ==\n")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # strong-probe ratios warn
        for ratio in (0.01, 0.05, 0.10):
            report = ol.sideband_closure(cfg, 0.95 * cfg.omega_ref,
                                         probe_ratio=ratio, periods=100)
            print(f"probe/pump = {ratio:4.2f}   demodulation residual = "
                  f"{report.residual:.3e}")
    print("\nThe residual grows with the probe: the neglected third-order")
    print("terms scale as the cube of the probe amplitude.")


if __name__ == "__main__":
    main()
