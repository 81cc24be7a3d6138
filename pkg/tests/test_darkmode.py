"""Hybrid bright/dark modes, adiabatic elimination, linewidth fitting."""

from __future__ import annotations

import math

import numpy as np
import pytest

import omit_lab as ol

from conftest import (
    FROZEN_FWHM_ONE,
    FROZEN_FWHM_TWO,
    FROZEN_G_LIN,
    FROZEN_G_TILDE,
    FROZEN_GAMMA_EFF,
    FROZEN_GAMMA_OPT,
    FROZEN_OMEGA_TILDE_MINUS,
    FROZEN_OMEGA_TILDE_PLUS,
    TWO_PI,
    synthetic_steady,
)


# ---------------------------------------------------------------------------
# Hybridization


def test_hybrid_report_frozen(split_config, split_steady):
    rep = ol.hybridize_two_mode(split_config, split_steady)
    assert rep.g1 == pytest.approx(FROZEN_G_LIN, rel=1e-11)
    assert rep.g2 == pytest.approx(FROZEN_G_LIN, rel=1e-11)
    assert rep.omega_tilde_plus == pytest.approx(FROZEN_OMEGA_TILDE_PLUS,
                                                 rel=1e-12)
    assert rep.omega_tilde_minus == pytest.approx(FROZEN_OMEGA_TILDE_MINUS,
                                                  rel=1e-12)
    assert complex(rep.g_tilde_plus) == pytest.approx(FROZEN_G_TILDE,
                                                      rel=1e-11)
    assert complex(rep.g_tilde_minus) == pytest.approx(FROZEN_G_TILDE,
                                                       rel=1e-11)


def test_dark_mode_decouples_exactly_at_integer_pi():
    # theta = 0 leaves the antisymmetric combination dark; theta = pi the
    # symmetric one.  |G~| must vanish to rounding, not merely get small.
    for theta, which in ((0.0, "minus"), (math.pi, "plus"),
                         (3.0 * math.pi, "plus")):
        cfg = ol.standard_setup(2, eta_frac=0.05, theta=theta)
        st = ol.solve_steady_state(cfg)
        rep = ol.hybridize_two_mode(cfg, st)
        g_dark = (rep.g_tilde_minus if which == "minus"
                  else rep.g_tilde_plus)
        assert abs(g_dark) <= 1e-14 * rep.g_plus
        broken, ratio = ol.dark_mode_broken(cfg, st)
        assert not broken
        assert ratio <= 1e-14


def test_dark_mode_broken_at_quarter_turn(split_config, split_steady):
    broken, ratio = ol.dark_mode_broken(split_config, split_steady)
    assert broken
    # Degenerate modes at theta = pi/2 share the coupling evenly.
    assert ratio == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)


def test_coupling_weight_conservation():
    # |G~+|^2 + |G~-|^2 == G1^2 + G2^2 for any theta, eta: the hybrid
    # basis is a rotation.
    rng = np.random.default_rng(3)
    for _ in range(50):
        om1 = 6e6 * float(rng.uniform(0.8, 1.2))
        om2 = om1 * float(rng.uniform(0.85, 1.18))
        cfg = ol.SystemConfig(
            cavity=ol.CavityParams(kappa=1.3e6, delta_c=om1),
            modes=(
                ol.MechanicalMode(omega=om1, gamma=900.0,
                                  g=float(rng.uniform(5, 30))),
                ol.MechanicalMode(omega=om2, gamma=900.0,
                                  g=float(rng.uniform(5, 30))),
            ),
            couplings=(ol.PhononCoupling(
                eta=float(rng.uniform(0.0, 0.1)) * om1,
                theta=float(rng.uniform(0.0, TWO_PI))),),
            drive=ol.DriveSpec(power_pump=1.5e-3, omega_pump=1.77e15),
        )
        st = synthetic_steady(2e4 * np.exp(0.3j), om1, 2)
        rep = ol.hybridize_two_mode(cfg, st)
        left = abs(rep.g_tilde_plus) ** 2 + abs(rep.g_tilde_minus) ** 2
        right = rep.g1 ** 2 + rep.g2 ** 2
        assert left == pytest.approx(right, rel=1e-12)


def test_hybrid_degenerate_conventions(plain_config, plain_steady):
    # Exactly degenerate and uncoupled: the split is a pure convention and
    # must be the symmetric/antisymmetric pair.
    rep = ol.hybridize_two_mode(plain_config, plain_steady)
    assert rep.f == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-15)
    assert rep.h == pytest.approx(-1.0 / math.sqrt(2.0), rel=1e-15)
    assert rep.zeta == 0.0
    assert rep.omega_plus == rep.omega_minus


def test_bright_mode_frequency_weighting():
    # omega_+ is the coupling-weighted mean of the bare frequencies.
    om1, om2 = 6.0e6, 6.3e6
    cfg = ol.SystemConfig(
        cavity=ol.CavityParams(kappa=1.3e6, delta_c=om1),
        modes=(ol.MechanicalMode(omega=om1, gamma=900.0, g=10.0),
               ol.MechanicalMode(omega=om2, gamma=900.0, g=20.0)),
        couplings=(ol.PhononCoupling(eta=0.0),),
        drive=ol.DriveSpec(power_pump=1.5e-3, omega_pump=1.77e15),
    )
    st = synthetic_steady(1e4, om1, 2)
    rep = ol.hybridize_two_mode(cfg, st)
    g1, g2 = rep.g1, rep.g2
    expected = (g1**2 * om1 + g2**2 * om2) / (g1**2 + g2**2)
    assert rep.omega_plus == pytest.approx(expected, rel=1e-14)
    expected_zeta = g1 * g2 * (om1 - om2) / (g1**2 + g2**2)
    assert rep.zeta == pytest.approx(expected_zeta, rel=1e-14)


# ---------------------------------------------------------------------------
# Adiabatic elimination


def test_optical_damping_sideband_asymmetry():
    # gamma_opt = G^2 kappa [1/(kappa^2+(D-w)^2) - 1/(kappa^2+(D+w)^2)];
    # deep in the resolved-sideband regime at D = w it tends to G^2/kappa.
    g_lin, kappa, omega = 1e-2, 1e-3, 1.0
    got = ol.optical_damping_rate(g_lin, kappa, omega, omega)
    assert got == pytest.approx(g_lin**2 / kappa, rel=5e-3)
    # Anti-damping on the blue side, equal magnitude at this symmetry.
    blue = ol.optical_damping_rate(g_lin, kappa, -omega, omega)
    assert blue == pytest.approx(-got, rel=1e-12)


def test_adiabatic_parameters_frozen(plain_config, plain_steady):
    ad = ol.adiabatic_elimination(plain_config, plain_steady)
    assert ad.gamma_opt[0] == pytest.approx(FROZEN_GAMMA_OPT, rel=1e-11)
    assert ad.gamma_eff == pytest.approx(FROZEN_GAMMA_EFF, rel=1e-11)
    assert ol.predict_linewidth(plain_config, plain_steady) == pytest.approx(
        FROZEN_GAMMA_EFF, rel=1e-11)


def test_adiabatic_elimination_requires_uncoupled_pair(split_config,
                                                       split_steady):
    with pytest.raises(ol.RegimeViolationError):
        ol.adiabatic_elimination(split_config, split_steady)
    three = ol.standard_setup(3, eta_frac=0.0)
    st3 = ol.solve_steady_state(three)
    with pytest.raises(ol.UnsupportedTopologyError):
        ol.adiabatic_elimination(three, st3)


def test_predict_linewidth_guards(split_config, split_steady):
    with pytest.raises(ol.RegimeViolationError):
        ol.predict_linewidth(split_config, split_steady)


# ---------------------------------------------------------------------------
# Linewidth fitting


def test_fit_linewidth_on_synthetic_window(split_config):
    # A single Lorentzian transparency window of known width on a flat
    # background; the fitted FWHM must match the analytic one to the grid
    # resolution.
    sp = ol.compute_spectrum(split_config, points=2001, span=(0.9, 1.1),
                             include_second_order=False)
    w = sp.omega
    w0 = float(np.mean(w))
    width = 4e4  # HWHM in rad/s
    window = 0.8 / (1.0 + ((w - w0) / width) ** 2)
    synthetic = ol.Spectrum(
        omega=w, amplitude=np.sqrt(0.1 + window).astype(complex),
        transmission=0.1 + window, phase=np.zeros_like(w),
        group_delay=sp.group_delay,
        efficiency_percent=sp.efficiency_percent,
        route_discrepancy=sp.route_discrepancy, metadata=dict(sp.metadata))
    fits = ol.fit_linewidth(synthetic)
    assert len(fits) == 1
    assert fits[0].center == pytest.approx(w0, abs=(w[1] - w[0]))
    assert fits[0].fwhm == pytest.approx(2.0 * width, rel=5e-3)


def test_fit_linewidth_featureless_spectrum(split_config):
    sp = ol.compute_spectrum(split_config, points=101, span=(0.9, 1.1),
                             include_second_order=False)
    flat = ol.Spectrum(
        omega=sp.omega, amplitude=np.ones_like(sp.amplitude),
        transmission=np.ones_like(sp.transmission),
        phase=np.zeros_like(sp.phase), group_delay=sp.group_delay,
        efficiency_percent=sp.efficiency_percent,
        route_discrepancy=sp.route_discrepancy, metadata=dict(sp.metadata))
    assert ol.fit_linewidth(flat) == []


def test_fitted_linewidths_frozen(plain_config):
    sp2 = ol.compute_spectrum(plain_config, points=4001,
                              include_second_order=False)
    assert ol.fit_linewidth(sp2)[0].fwhm == pytest.approx(FROZEN_FWHM_TWO,
                                                          rel=1e-12)
    single = ol.standard_setup(1)
    sp1 = ol.compute_spectrum(single, points=4001,
                              include_second_order=False)
    assert ol.fit_linewidth(sp1)[0].fwhm == pytest.approx(FROZEN_FWHM_ONE,
                                                          rel=1e-12)


def test_prediction_consistency_window_width():
    # Stated consistency band between the adiabatic linewidth prediction
    # gamma_m + 2*gamma_opt and the fitted transparency-window FWHM over
    # the benchmark power range.  The measured windows run ~1.7x wider
    # than the prediction at these couplings (G ~ 0.3 kappa): the
    # perturbative elimination underestimates the hybridised width, which
    # only the square-root (non-perturbative) broadening captures.  Kept
    # at the stated band; see the acceptance suite for the same gap.
    for p_mw in (0.5, 1.0, 1.5, 2.0):
        cfg = ol.standard_setup(2, eta_frac=0.0, power_w=p_mw * 1e-3)
        st = ol.solve_steady_state(cfg)
        predicted = ol.predict_linewidth(cfg, st)
        sp = ol.compute_spectrum(cfg, points=4001,
                                 include_second_order=False)
        fitted = ol.fit_linewidth(sp)[0].fwhm
        assert 0.85 <= fitted / predicted <= 1.15, (
            f"P={p_mw} mW: fitted/predicted = {fitted / predicted:.3f} "
            f"outside [0.85, 1.15]")
