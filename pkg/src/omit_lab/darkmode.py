"""Dark-mode analysis: hybridisation, breaking, and effective linewidths.

Two mechanical modes coupled to one cavity hybridise.  With no direct
phonon exchange (``eta = 0``) the combinations ::

    B_plus  = (G1 b1 + G2 b2) / G_plus     (bright)
    B_minus = (G2 b1 - G1 b2) / G_plus     (dark)

decouple the *dark* mode from the light entirely when the modes are
degenerate: only the bright mode interferes with the probe, so the OMIT
spectrum shows a single window whose linewidth collects the optical
damping of both modes.

Switching on the phonon hopping ``eta * exp(i*theta)`` first diagonalises
the mechanical pair into normal modes at ``omega_tilde_plus/minus``; the
cavity couples to those with rotated strengths ``g_tilde_plus/minus`` that
depend on ``theta``.  At ``theta = n*pi`` one rotated coupling vanishes
exactly -- a dark mode survives -- while any other phase makes both normal
modes optically active ("dark-mode breaking"), splitting the single
transparency window in two.

The adiabatic-elimination helpers integrate out a fast cavity
(``omega >> kappa >> G >> gamma``) and give each mode an optically induced
damping ``gamma_opt`` and spring shift ``omega_opt``; for ``N`` identical
modes sharing one bright mode the transparency window is predicted to have
linewidth ``gamma_m + N * gamma_opt``.  ``fit_linewidth`` measures the
actual window widths from a computed spectrum so prediction and
measurement can be compared.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks, peak_widths

from .errors import (
    InvalidParameterError,
    RegimeViolationError,
    UnsupportedTopologyError,
)
from .model import SteadyState, SystemConfig
from .sidebands import Spectrum

__all__ = [
    "HybridModeReport",
    "AdiabaticParams",
    "LinewidthFit",
    "linearized_couplings",
    "hybridize_two_mode",
    "dark_mode_broken",
    "optical_damping_rate",
    "optical_spring_shift",
    "adiabatic_elimination",
    "predict_linewidth",
    "fit_linewidth",
]


@dataclass(frozen=True)
class HybridModeReport:
    """Hybridised description of the two-mode mechanical pair.

    The bright/dark block describes the ``eta = 0`` optically mediated
    hybridisation; the tilde block describes the phonon-exchange normal
    modes and their rotated optical couplings.

    Attributes
    ----------
    g1, g2 : float
        Linearised couplings ``G_l = g_l * |alpha|`` (rad/s).
    g_plus : float
        Bright-mode coupling ``sqrt(G1^2 + G2^2)`` (rad/s).
    omega_plus, omega_minus : float
        Bright and dark mode frequencies (rad/s).
    zeta : float
        Residual bright-dark coupling, nonzero only for nondegenerate
        modes (rad/s).
    omega_tilde_plus, omega_tilde_minus : float
        Phonon-exchange normal-mode frequencies (rad/s).
    f, h : float
        Rotation coefficients of the normal-mode transform (f^2 + h^2 = 1).
    g_tilde_plus, g_tilde_minus : complex
        Optical couplings of the normal modes (rad/s); one of them
        vanishes exactly when ``theta`` is an integer multiple of pi.
    """

    g1: float
    g2: float
    g_plus: float
    omega_plus: float
    omega_minus: float
    zeta: float
    omega_tilde_plus: float
    omega_tilde_minus: float
    f: float
    h: float
    g_tilde_plus: complex
    g_tilde_minus: complex


@dataclass(frozen=True)
class AdiabaticParams:
    """Per-mode optically induced rates after eliminating the cavity.

    ``gamma_eff`` and ``omega_eff`` are the bright-mode linewidth and
    frequency for identical modes: mean bare value plus/minus the summed
    optical contributions.
    """

    gamma_opt: tuple[float, ...]
    omega_opt: tuple[float, ...]
    gamma_total: tuple[float, ...]
    omega_shifted: tuple[float, ...]
    xi1: complex
    xi2: complex
    gamma_eff: float
    omega_eff: float


@dataclass(frozen=True)
class LinewidthFit:
    """One transparency window measured from a spectrum."""

    center: float       # window centre (rad/s)
    fwhm: float         # full width at half prominence (rad/s)
    height: float       # |t_p|^2 at the window top
    prominence: float   # peak prominence in |t_p|^2


def linearized_couplings(config: SystemConfig,
                         steady: SteadyState) -> np.ndarray:
    """Linearised optomechanical couplings ``G_l = g_l * |alpha|``."""
    _, _, g = config.mode_arrays()
    return g * abs(steady.alpha)


def _require_two_modes(config: SystemConfig, what: str) -> None:
    if config.n_modes != 2:
        raise UnsupportedTopologyError(
            f"{what} is defined for the two-mode layout, "
            f"got {config.n_modes} modes")


def hybridize_two_mode(config: SystemConfig,
                       steady: SteadyState) -> HybridModeReport:
    """Hybridised mode frequencies and couplings of the two-mode system.

    Returns both pictures at once: the optically mediated bright/dark pair
    (how the system organises itself at ``eta = 0``) and the
    phonon-exchange normal modes with their theta-dependent rotated
    couplings (how a finite ``eta`` redistributes the optical coupling).

    The rotation coefficients are ::

        f = |omega_tilde_minus - omega_1| / sqrt((omega_tilde_minus -
            omega_1)^2 + eta^2),         h = eta * f / (omega_tilde_minus
            - omega_1)

    with the degenerate limit ``f = 1/sqrt(2), h = -1/sqrt(2)``; the
    rotated couplings are ``g_tilde_plus = f G1 - e^{-i theta} h G2`` and
    ``g_tilde_minus = e^{i theta} h G1 + f G2``.
    """
    _require_two_modes(config, "mode hybridisation")
    g1, g2 = linearized_couplings(config, steady)
    (o1, o2), _, _ = config.mode_arrays()
    eta = config.couplings[0].eta
    theta = config.couplings[0].theta

    g_plus = math.hypot(g1, g2)
    if g_plus > 0.0:
        omega_plus = (g1 ** 2 * o1 + g2 ** 2 * o2) / g_plus ** 2
        omega_minus = (g2 ** 2 * o1 + g1 ** 2 * o2) / g_plus ** 2
        zeta = g1 * g2 * (o1 - o2) / g_plus ** 2
    else:
        # No optical coupling at all: the bright/dark split is vacuous.
        omega_plus, omega_minus, zeta = o1, o2, 0.0

    gap = math.sqrt((o1 - o2) ** 2 + 4.0 * eta ** 2)
    omega_tilde_plus = 0.5 * (o1 + o2 + gap)
    omega_tilde_minus = 0.5 * (o1 + o2 - gap)

    d = omega_tilde_minus - o1
    if eta == 0.0:
        if o1 == o2:
            # Degenerate limit of the rotation (continuation from eta->0).
            f, h = 1.0 / math.sqrt(2.0), -1.0 / math.sqrt(2.0)
        elif o1 < o2:
            f, h = 0.0, -1.0
        else:
            f, h = 1.0, 0.0
    else:
        f = abs(d) / math.sqrt(d * d + eta * eta)
        h = eta * f / d
    phase = complex(math.cos(theta), math.sin(theta))
    g_tilde_plus = f * g1 - np.conj(phase) * h * g2
    g_tilde_minus = phase * h * g1 + f * g2

    return HybridModeReport(
        g1=float(g1), g2=float(g2), g_plus=float(g_plus),
        omega_plus=float(omega_plus), omega_minus=float(omega_minus),
        zeta=float(zeta),
        omega_tilde_plus=float(omega_tilde_plus),
        omega_tilde_minus=float(omega_tilde_minus),
        f=float(f), h=float(h),
        g_tilde_plus=complex(g_tilde_plus),
        g_tilde_minus=complex(g_tilde_minus),
    )


def dark_mode_broken(config: SystemConfig, steady: SteadyState,
                     tol: float = 1e-6) -> tuple[bool, float]:
    """Is the dark mode optically active?

    Returns ``(broken, coupling_ratio)`` where ``coupling_ratio`` is the
    smaller rotated coupling ``min(|g_tilde_plus|, |g_tilde_minus|)``
    normalised by ``g_plus``.  The dark mode counts as broken when both
    normal modes keep an optical coupling above ``tol * g_plus``, which
    happens exactly when ``theta`` is not an integer multiple of pi (for
    nonzero ``eta`` and both bare couplings nonzero).
    """
    report = hybridize_two_mode(config, steady)
    if report.g_plus == 0.0:
        return False, 0.0
    ratio = min(abs(report.g_tilde_plus), abs(report.g_tilde_minus))
    ratio /= report.g_plus
    return bool(ratio > tol), float(ratio)


def optical_damping_rate(g_lin: float, kappa: float, delta: float,
                         omega: float) -> float:
    """Optically induced damping of one mode after cavity elimination.

    ``gamma_opt = G^2 kappa [1/(kappa^2 + (Delta-omega)^2) -
    1/(kappa^2 + (Delta+omega)^2)]`` -- positive on the red sideband.
    """
    if kappa <= 0.0:
        raise InvalidParameterError("kappa must be > 0")
    return g_lin ** 2 * kappa * (
        1.0 / (kappa ** 2 + (delta - omega) ** 2)
        - 1.0 / (kappa ** 2 + (delta + omega) ** 2))


def optical_spring_shift(g_lin: float, kappa: float, delta: float,
                         omega: float) -> float:
    """Optically induced frequency pull of one mode (same elimination).

    ``omega_opt = G^2 [(Delta+omega)/(kappa^2 + (Delta+omega)^2) +
    (Delta-omega)/(kappa^2 + (Delta-omega)^2)]``; the shifted mechanical
    frequency is ``omega - omega_opt``.
    """
    if kappa <= 0.0:
        raise InvalidParameterError("kappa must be > 0")
    return g_lin ** 2 * (
        (delta + omega) / (kappa ** 2 + (delta + omega) ** 2)
        + (delta - omega) / (kappa ** 2 + (delta - omega) ** 2))


def _cross_damping(g_a: float, g_b: float, kappa: float, delta: float,
                   omega_b: float) -> complex:
    """Cavity-mediated cross term xi feeding mode a from mode b."""
    num1 = g_a * g_b * complex(kappa, delta + omega_b)
    num2 = g_a * g_b * complex(kappa, -(delta - omega_b))
    return (num1 / (kappa ** 2 + (delta + omega_b) ** 2)
            - num2 / (kappa ** 2 + (delta - omega_b) ** 2))


def adiabatic_elimination(config: SystemConfig,
                          steady: SteadyState) -> AdiabaticParams:
    """Effective mechanical rates with the cavity integrated out.

    Valid for the two-mode system without phonon exchange in the resolved
    sideband, weak-coupling regime ``omega >> kappa >> G >> gamma``; the
    numbers are still computed outside that regime, with a warning.

    Raises
    ------
    UnsupportedTopologyError
        More or fewer than two modes.
    RegimeViolationError
        Nonzero phonon exchange (the elimination below does not include
        the hopping term).
    """
    _require_two_modes(config, "adiabatic elimination")
    if config.couplings[0].eta != 0.0:
        raise RegimeViolationError(
            "adiabatic elimination is derived without phonon exchange; "
            "set eta = 0 or use the full sideband solve")
    (o1, o2), (gm1, gm2), _ = config.mode_arrays()
    g1, g2 = linearized_couplings(config, steady)
    kappa = config.cavity.kappa
    delta = steady.delta_eff

    if not (min(o1, o2) > 2.0 * kappa and kappa > 2.0 * max(g1, g2)
            and (min(g1, g2) > 2.0 * max(gm1, gm2) or max(g1, g2) == 0.0)):
        warnings.warn(
            "parameters violate omega >> kappa >> G >> gamma; "
            "adiabatic rates are indicative only", stacklevel=2)

    gamma_opt = (optical_damping_rate(g1, kappa, delta, o1),
                 optical_damping_rate(g2, kappa, delta, o2))
    omega_opt = (optical_spring_shift(g1, kappa, delta, o1),
                 optical_spring_shift(g2, kappa, delta, o2))
    gamma_total = (gm1 + gamma_opt[0], gm2 + gamma_opt[1])
    omega_shifted = (o1 - omega_opt[0], o2 - omega_opt[1])
    xi1 = _cross_damping(g1, g2, kappa, delta, o2)
    xi2 = _cross_damping(g2, g1, kappa, delta, o1)
    gamma_eff = 0.5 * (gm1 + gm2) + gamma_opt[0] + gamma_opt[1]
    omega_eff = 0.5 * (o1 + o2) - omega_opt[0] - omega_opt[1]
    return AdiabaticParams(
        gamma_opt=gamma_opt, omega_opt=omega_opt,
        gamma_total=gamma_total, omega_shifted=omega_shifted,
        xi1=xi1, xi2=xi2,
        gamma_eff=float(gamma_eff), omega_eff=float(omega_eff),
    )


def predict_linewidth(config: SystemConfig, steady: SteadyState) -> float:
    """Predicted OMIT window linewidth ``gamma_m + N * gamma_opt``.

    Applies to ``N`` identical modes sharing a single bright mode, i.e. no
    phonon exchange and degenerate (omega, gamma, g) across the chain.

    Raises
    ------
    RegimeViolationError
        Any nonzero phonon exchange.
    UnsupportedTopologyError
        Modes are not identical.
    """
    eta, _ = config.coupling_arrays()
    if np.any(eta != 0.0):
        raise RegimeViolationError(
            "linewidth prediction assumes no phonon exchange (eta = 0)")
    omega, gamma, g = config.mode_arrays()
    if (np.ptp(omega) != 0.0 or np.ptp(gamma) != 0.0 or np.ptp(g) != 0.0):
        raise UnsupportedTopologyError(
            "linewidth prediction assumes identical mechanical modes")
    g_lin = linearized_couplings(config, steady)
    total_opt = sum(
        optical_damping_rate(gl, config.cavity.kappa, steady.delta_eff, om)
        for gl, om in zip(g_lin, omega))
    return float(gamma[0] + total_opt)


def fit_linewidth(spectrum: Spectrum,
                  rel_prominence: float = 0.05) -> list[LinewidthFit]:
    """Locate transparency windows and measure their widths.

    Peaks of ``|t_p|^2`` with prominence at least ``rel_prominence`` times
    the full swing of the spectrum are fitted; the width is taken at half
    prominence (the usual FWHM convention for peaks on a baseline).
    Requires a uniform grid.

    Returns
    -------
    list of LinewidthFit
        One entry per window, ordered by increasing centre frequency;
        empty when the spectrum is featureless.
    """
    if not 0.0 < rel_prominence < 1.0:
        raise InvalidParameterError(
            f"rel_prominence must be in (0, 1), got {rel_prominence}")
    w = spectrum.omega
    if len(w) < 5:
        raise InvalidParameterError("spectrum too short to fit windows")
    steps = np.diff(w)
    h = steps[0]
    if not (h > 0 and np.allclose(steps, h, rtol=1e-9, atol=0.0)):
        raise InvalidParameterError("linewidth fitting requires a uniform grid")
    power = spectrum.transmission
    swing = float(np.max(power) - np.min(power))
    if swing <= 0.0:
        return []
    peaks, props = find_peaks(power, prominence=rel_prominence * swing)
    if len(peaks) == 0:
        return []
    widths = peak_widths(power, peaks, rel_height=0.5)[0]
    return [
        LinewidthFit(center=float(w[p]), fwhm=float(width * h),
                     height=float(power[p]),
                     prominence=float(prom))
        for p, width, prom in zip(peaks, widths, props["prominences"])
    ]
