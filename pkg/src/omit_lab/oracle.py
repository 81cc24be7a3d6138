"""Time-domain cross-check of the frequency-domain sideband solution.

The sideband amplitudes of :mod:`omit_lab.sidebands` come from a
perturbative ansatz.  This module integrates the *full nonlinear*
mean-field equations ::

    da/dt   = -(kappa + i Delta_c) a - i a sum_l g_l (b_l + b_l^*)
              + eps_L + eps_p exp(-i Omega t)
    db_l/dt = -(gamma_l + i omega_l) b_l - i g_l |a|^2
              - i eta_{l-1} e^{-i theta_{l-1}} b_{l-1}
              - i eta_l e^{+i theta_l} b_{l+1}

with an explicit high-order Runge-Kutta scheme, waits for the driven
steady oscillation, and reads the sideband amplitudes back out by
least-squares demodulation of the cavity trace at ``+-Omega`` and
``+-2 Omega``.  Since this route shares no algebra with the linear-system
solves, agreement (to the accuracy the finite probe allows) validates the
whole frequency-domain stack; it also quantifies the error of truncating
the sideband hierarchy at a finite probe strength.

A practical note on time scales: the transient decays at the *optically
broadened* mechanical rates (tens of kilohertz here), not at the bare
mechanical damping, so a few milliseconds of settling is usually enough
even though ``1/gamma_m`` is much longer.  The built-in defaults are
deliberately conservative; pass ``settle`` explicitly for speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from .darkmode import linearized_couplings, optical_damping_rate
from .errors import (
    InvalidParameterError,
    NonConvergentError,
    UnstableIntegrationError,
)
from .model import (
    SteadyState,
    SystemConfig,
    probe_amplitude,
    pump_amplitude,
    solve_steady_state,
)
from .sidebands import solve_first_order, solve_second_order

__all__ = [
    "TimeTrace",
    "DemodResult",
    "ClosureReport",
    "integrate_mean_field",
    "demodulate",
    "sideband_closure",
]

# Resample no coarser than this many samples per fastest period.
_MIN_SAMPLES_PER_PERIOD = 50
_DEFAULT_SAMPLES_PER_PERIOD = 64
_OVERFLOW_FACTOR = 1e6


@dataclass(frozen=True)
class TimeTrace:
    """Uniformly sampled mean-field trajectory.

    ``cavity[i]`` and ``mechanics[l, i]`` hold the complex amplitudes at
    ``times[i]``; ``omega_probe`` records the probe detuning used (None
    for a pump-only run).
    """

    times: np.ndarray
    cavity: np.ndarray
    mechanics: np.ndarray
    omega_probe: float | None
    step: float


@dataclass(frozen=True)
class DemodResult:
    """Sideband content of a trace segment.

    ``a1_lower`` multiplies ``exp(-i Omega t)`` (the component at the probe
    frequency), ``a1_upper`` multiplies ``exp(+i Omega t)``, and the
    ``a2_*`` pair the same at ``2 Omega``.  ``residual`` is the rms of the
    part of the signal the five-term model does not explain, relative to
    the rms of the oscillating part; ``reliable`` is a conservative flag
    (enough cycles and a small residual).
    """

    mean: complex
    a1_lower: complex
    a1_upper: complex
    a2_lower: complex
    a2_upper: complex
    residual: float
    n_cycles: int
    reliable: bool


@dataclass(frozen=True)
class ClosureReport:
    """Frequency-domain vs time-domain sideband amplitudes at one detuning."""

    omega: float
    probe_ratio: float
    a1_freq: complex
    a1_time: complex
    a2_freq: complex
    a2_time: complex
    rel_err_first: float
    rel_err_second: float
    residual: float
    n_cycles: int
    reliable: bool


def _fastest_rate(config: SystemConfig, omega_probe: float | None) -> float:
    omega, _, _ = config.mode_arrays()
    rates = [float(np.max(omega)), abs(config.cavity.delta_c),
             config.cavity.kappa]
    if omega_probe is not None:
        rates.append(2.0 * abs(omega_probe))
    return max(rates)


def integrate_mean_field(config: SystemConfig, t_final: float, *,
                         omega_probe: float | None = None,
                         include_probe: bool = True,
                         step: float | None = None,
                         initial="steady",
                         rtol: float = 1e-10,
                         method: str = "DOP853") -> TimeTrace:
    """Integrate the nonlinear mean-field equations.

    Parameters
    ----------
    config : SystemConfig
    t_final : float
        End time (s), integration starts at 0.
    omega_probe : float, optional
        Probe-pump detuning Omega (rad/s); required whenever the probe is
        on and its amplitude is nonzero.
    include_probe : bool
        Switch the probe drive off to integrate the pump-only problem.
    step : float, optional
        Output sample step (s).  Defaults to 1/64 of the fastest period in
        the problem; must resolve it with at least 50 samples.
    initial : "steady", "vacuum", or (alpha0, betas0)
        Start from the pump-only steady state (default), from zero fields,
        or from explicit amplitudes.
    rtol : float
        Relative tolerance of the adaptive integrator.
    method : str
        Any |solve_ivp| method name; the default eighth-order explicit
        scheme is accurate and has no algebra in common with the
        frequency-domain route.

    Raises
    ------
    UnstableIntegrationError
        The cavity amplitude ran away (parametric instability); the error
        message reports when.
    NonConvergentError
        The adaptive integrator failed.
    """
    if t_final <= 0.0:
        raise InvalidParameterError(f"t_final must be > 0, got {t_final}")
    eps_l = pump_amplitude(config)
    eps_p = probe_amplitude(config) if include_probe else 0.0
    if eps_p > 0.0 and omega_probe is None:
        raise InvalidParameterError(
            "omega_probe is required when the probe drive is on")

    fastest = _fastest_rate(config, omega_probe if eps_p > 0 else None)
    shortest_period = 2.0 * math.pi / fastest
    if step is None:
        step = shortest_period / _DEFAULT_SAMPLES_PER_PERIOD
    elif step > shortest_period / _MIN_SAMPLES_PER_PERIOD:
        raise InvalidParameterError(
            f"step {step:.3e} s undersamples the fastest period "
            f"{shortest_period:.3e} s (need >= {_MIN_SAMPLES_PER_PERIOD} "
            "samples per period)")

    n = config.n_modes
    omega, gamma, g = config.mode_arrays()
    eta, theta = config.coupling_arrays()
    kappa = config.cavity.kappa
    delta_c = config.cavity.delta_c
    w_probe = float(omega_probe) if omega_probe is not None else 0.0

    if isinstance(initial, str):
        if initial == "steady":
            ss = solve_steady_state(config)
            alpha0 = ss.alpha
            betas0 = np.asarray(ss.betas, dtype=complex)
        elif initial == "vacuum":
            alpha0 = 0.0 + 0.0j
            betas0 = np.zeros(n, dtype=complex)
        else:
            raise InvalidParameterError(
                f"initial must be 'steady', 'vacuum', or amplitudes, "
                f"got {initial!r}")
    else:
        alpha0, betas0 = initial
        alpha0 = complex(alpha0)
        betas0 = np.asarray(betas0, dtype=complex)
        if betas0.shape != (n,):
            raise InvalidParameterError(
                f"initial mechanical amplitudes must have shape ({n},)")

    # Hopping coefficients feeding each mode from its neighbours.
    hop_next = 1j * np.append(eta * np.exp(1j * theta), 0.0)
    hop_prev = 1j * np.append(0.0, eta * np.exp(-1j * theta))

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        a = y[0] + 1j * y[1]
        b = y[2::2] + 1j * y[3::2]
        da = (-(kappa + 1j * delta_c) * a
              - 1j * a * np.dot(g, 2.0 * b.real) + eps_l)
        if eps_p > 0.0:
            da += eps_p * np.exp(-1j * w_probe * t)
        db = -(gamma + 1j * omega) * b - 1j * g * (a.real ** 2 + a.imag ** 2)
        db -= hop_next * np.append(b[1:], 0.0) + hop_prev * np.append(0.0, b[:-1])
        out = np.empty(2 * (n + 1))
        out[0], out[1] = da.real, da.imag
        out[2::2], out[3::2] = db.real, db.imag
        return out

    scale = max(abs(alpha0), eps_l / kappa, 1.0)
    limit_sq = (_OVERFLOW_FACTOR * scale) ** 2

    def overflow(t: float, y: np.ndarray) -> float:
        return limit_sq - (y[0] ** 2 + y[1] ** 2)

    overflow.terminal = True
    overflow.direction = -1.0

    y0 = np.empty(2 * (n + 1))
    y0[0], y0[1] = alpha0.real, alpha0.imag
    y0[2::2], y0[3::2] = betas0.real, betas0.imag

    t_eval = np.arange(0.0, t_final + 0.5 * step, step)
    t_eval = t_eval[t_eval <= t_final]
    # Starting at a fixed point the right-hand side is nearly zero, which
    # makes solve_ivp's automatic first-step heuristic overshoot wildly;
    # seed it with the sampling step instead.
    sol = solve_ivp(rhs, (0.0, t_final), y0, method=method, rtol=rtol,
                    atol=rtol * scale, t_eval=t_eval, events=overflow,
                    first_step=step)
    if sol.status == 1:
        t_ev = sol.t_events[0][0] if len(sol.t_events[0]) else float("nan")
        raise UnstableIntegrationError(
            f"cavity amplitude exceeded {_OVERFLOW_FACTOR:.0e} x its steady "
            f"scale at t = {t_ev:.6e} s; the operating point is unstable")
    if sol.status != 0:
        raise NonConvergentError(
            f"time integration failed: {sol.message}")

    cavity = sol.y[0] + 1j * sol.y[1]
    mechanics = sol.y[2::2] + 1j * sol.y[3::2]
    return TimeTrace(
        times=sol.t,
        cavity=cavity,
        mechanics=mechanics,
        omega_probe=omega_probe if eps_p > 0.0 else None,
        step=float(step),
    )


def demodulate(trace: TimeTrace, omega: float, *,
               settle: float | None = None,
               min_cycles: int = 50) -> DemodResult:
    """Extract the sideband amplitudes at ``+-omega`` and ``+-2 omega``.

    Fits ``mean + a1_lower e^{-i w t} + a1_upper e^{+i w t} + a2_lower
    e^{-2i w t} + a2_upper e^{+2i w t}`` to the cavity trace by linear
    least squares over a whole number of probe cycles after ``settle``.

    Parameters
    ----------
    trace : TimeTrace
    omega : float
        Demodulation frequency (rad/s); normally ``trace.omega_probe``.
    settle : float, optional
        Transient to discard (s).  The default, twenty bare lifetimes
        ``20 / min(kappa, gamma_l)``, is very conservative; pass the
        optically broadened time scale explicitly when speed matters.
    min_cycles : int
        Minimum number of full cycles the fit window must contain.

    Raises
    ------
    InvalidParameterError
        The trace does not extend ``min_cycles`` cycles past ``settle``.
    """
    if omega <= 0.0:
        raise InvalidParameterError(f"omega must be > 0, got {omega}")
    if min_cycles < 1:
        raise InvalidParameterError("min_cycles must be >= 1")
    times = trace.times
    period = 2.0 * math.pi / omega
    t_end = float(times[-1])
    if settle is None:
        # A trace carries no decay rates, so the default just discards the
        # first half of the record (or less, if that would not leave
        # min_cycles whole cycles).  Callers who know the physical settling
        # time should pass it.
        settle = max(0.0, min(0.5 * t_end, t_end - min_cycles * period))
    if settle < 0.0:
        raise InvalidParameterError("settle must be >= 0")
    n_cycles = int(math.floor((t_end - settle) / period))
    if n_cycles < min_cycles:
        raise InvalidParameterError(
            f"trace supports only {max(n_cycles, 0)} full cycles after the "
            f"settle time; {min_cycles} required")
    window_start = t_end - n_cycles * period
    mask = times >= window_start - 1e-9 * period
    ts = times[mask]
    ys = trace.cavity[mask]

    columns = np.column_stack([
        np.ones_like(ts, dtype=complex),
        np.exp(-1j * omega * ts),
        np.exp(1j * omega * ts),
        np.exp(-2j * omega * ts),
        np.exp(2j * omega * ts),
    ])
    coef, _, _, _ = np.linalg.lstsq(columns, ys, rcond=None)
    fitted = columns @ coef
    wiggle = ys - coef[0]
    denom = float(np.sqrt(np.mean(np.abs(wiggle) ** 2)))
    resid = float(np.sqrt(np.mean(np.abs(ys - fitted) ** 2)))
    residual = resid / denom if denom > 0.0 else float("inf")
    reliable = bool(n_cycles >= min_cycles and residual < 1e-3)
    return DemodResult(
        mean=complex(coef[0]),
        a1_lower=complex(coef[1]),
        a1_upper=complex(coef[2]),
        a2_lower=complex(coef[3]),
        a2_upper=complex(coef[4]),
        residual=residual,
        n_cycles=n_cycles,
        reliable=reliable,
    )


def _default_settle(config: SystemConfig, steady: SteadyState) -> float:
    """Forty lifetimes of the slowest optically broadened mode."""
    omega, gamma, _ = config.mode_arrays()
    g_lin = linearized_couplings(config, steady)
    total_opt = sum(
        optical_damping_rate(gl, config.cavity.kappa, steady.delta_eff, om)
        for gl, om in zip(g_lin, omega))
    rate = float(np.min(gamma)) + 0.5 * total_opt
    return 40.0 / rate


def sideband_closure(config: SystemConfig, omega: float, *,
                     probe_ratio: float = 0.01,
                     periods: int = 200,
                     settle: float | None = None,
                     rtol: float = 1e-10) -> ClosureReport:
    """Compare frequency-domain and time-domain sideband amplitudes.

    Runs both routes at one probe detuning and reports the relative
    disagreement of the first- and second-order lower sideband amplitudes.
    The frequency-domain result is exact in the linearised hierarchy, so
    the gap measures probe-nonlinearity plus integration error and shrinks
    with ``probe_ratio``.

    Parameters
    ----------
    config : SystemConfig
        The probe strength inside is overridden by ``probe_ratio``.
    omega : float
        Probe-pump detuning (rad/s).
    probe_ratio : float
        Probe amplitude as a fraction of the pump; small values isolate
        the linear response (default 0.01).
    periods : int
        Probe cycles to demodulate over.
    settle : float, optional
        Transient to discard; defaults to forty optically broadened
        mechanical lifetimes.
    rtol : float
        Integrator tolerance.
    """
    if omega <= 0.0:
        raise InvalidParameterError(f"omega must be > 0, got {omega}")
    config = replace(config,
                     drive=replace(config.drive, probe_ratio=probe_ratio,
                                   power_probe=None))
    steady = solve_steady_state(config)
    first = solve_first_order(config, steady, omega)
    second = solve_second_order(config, steady, omega, first) \
        if config.n_modes == 2 else None

    if settle is None:
        settle = _default_settle(config, steady)
    period = 2.0 * math.pi / omega
    t_final = settle + (periods + 1) * period
    trace = integrate_mean_field(config, t_final, omega_probe=omega,
                                 initial=(steady.alpha, steady.betas),
                                 rtol=rtol)
    demod = demodulate(trace, omega, settle=settle, min_cycles=periods)

    a1_fd = complex(first.a_minus)
    a1_td = demod.a1_lower
    err1 = abs(a1_fd - a1_td) / max(abs(a1_fd), abs(a1_td), 1e-300)
    if second is not None:
        a2_fd = complex(second.a_minus)
        a2_td = demod.a2_lower
        err2 = abs(a2_fd - a2_td) / max(abs(a2_fd), abs(a2_td), 1e-300)
    else:
        a2_fd = complex("nan")
        a2_td = demod.a2_lower
        err2 = float("nan")
    return ClosureReport(
        omega=float(omega),
        probe_ratio=float(probe_ratio),
        a1_freq=a1_fd,
        a1_time=a1_td,
        a2_freq=a2_fd,
        a2_time=a2_td,
        rel_err_first=float(err1),
        rel_err_second=float(err2),
        residual=demod.residual,
        n_cycles=demod.n_cycles,
        reliable=demod.reliable,
    )
