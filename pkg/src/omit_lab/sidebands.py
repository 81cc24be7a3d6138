"""Probe response: first- and second-order sideband amplitudes.

With a strong pump at ``omega_L`` and a weak probe at ``omega_p = omega_L +
Omega``, every field develops sidebands at ``omega_L +/- n*Omega``.  Writing
``a = alpha + A1m e^{-i Omega t} + A1p e^{+i Omega t} + A2m e^{-2i Omega t}
+ ...`` (and similarly for each mechanical mode) and collecting terms order
by order in the probe turns the nonlinear mean-field equations into a
hierarchy of linear systems:

* order 1: a ``(2n+2) x (2n+2)`` complex system in ``A1m``, ``conj(A1p)``
  and the mechanical pairs, driven by the probe amplitude;
* order 2: the same matrix evaluated at ``2*Omega``, driven by quadratic
  combinations of the first-order amplitudes.

Two observables summarise the response:

* probe transmission ``t_p = 1 - (kappa/eps_p) * A1m`` -- its squared
  modulus is the OMIT spectrum;
* second-order sideband efficiency ``|kappa * A2m / eps_p|`` -- the
  amplitude of the frequency-doubled output relative to the probe.

For the two-mode system the linear hierarchy also admits closed-form
solutions built from a small set of polynomial coefficients; these are
implemented here as an independent route and cross-checked against the
direct matrix solves (the ``route_discrepancy`` column of a spectrum).
Both routes are exact to rounding; a disagreement indicates a bug, not an
approximation error.

Group delay is the slope of the transmission phase, ``tau = d(arg t_p) /
d(Omega)``, evaluated with a five-point central stencil on the unwrapped
phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import (
    DegeneratePointError,
    InvalidParameterError,
    SingularSystemError,
    UnsupportedTopologyError,
)
from .model import (
    SteadyState,
    SystemConfig,
    probe_amplitude,
    pump_amplitude,
    solve_steady_state,
)

__all__ = [
    "TCoefficients",
    "AuxiliaryCoefficients",
    "FirstOrderAmplitudes",
    "SecondOrderAmplitudes",
    "Spectrum",
    "GroupDelayEstimate",
    "chain_polynomials",
    "auxiliary_coefficients",
    "solve_first_order",
    "solve_second_order",
    "first_order_closed_form",
    "second_order_closed_form",
    "transmission",
    "second_order_efficiency",
    "compute_spectrum",
    "group_delay",
]

_TINY = 1e-300


# ---------------------------------------------------------------------------
# Containers


@dataclass(frozen=True)
class TCoefficients:
    """Chain response polynomials of the two-mode mechanical pair.

    These four combinations of mode parameters and the evaluation frequency
    are the building blocks of every closed-form amplitude below.
    """

    t1: complex | np.ndarray
    t2: complex | np.ndarray
    t3_1: complex | np.ndarray
    t3_2: complex | np.ndarray


@dataclass(frozen=True)
class AuxiliaryCoefficients:
    """Everything the closed-form second-order route needs at one frequency.

    ``t_probe`` is evaluated at the probe detuning, ``t_double`` at twice
    the detuning.  ``v1 .. v3`` enter the mechanical first-order amplitudes;
    ``chi1, chi2`` fold the first-order solution into the second-order
    cavity amplitude.
    """

    t_probe: TCoefficients
    t_double: TCoefficients
    v1: complex
    v2: complex
    v3: complex
    chi1: complex
    chi2: complex


@dataclass(frozen=True)
class FirstOrderAmplitudes:
    """First-order sideband amplitudes.

    ``a_minus`` is the lower cavity sideband (at the probe frequency),
    ``a_plus_conj`` the conjugated upper sideband; ``b_minus`` and
    ``b_plus_conj`` hold the mechanical pairs, one column per mode.
    Scalar frequency input gives complex scalars / 1-D mode arrays, a grid
    gives arrays with the leading grid axis.
    """

    a_minus: complex | np.ndarray
    a_plus_conj: complex | np.ndarray
    b_minus: np.ndarray
    b_plus_conj: np.ndarray


@dataclass(frozen=True)
class SecondOrderAmplitudes:
    """Second-order sideband amplitudes, same layout as the first order."""

    a_minus: complex | np.ndarray
    a_plus_conj: complex | np.ndarray
    b_minus: np.ndarray
    b_plus_conj: np.ndarray


@dataclass(frozen=True)
class GroupDelayEstimate:
    """Group delay at one grid point.

    ``delay`` in seconds (positive = slow light), ``omega`` the detuning it
    was evaluated at, ``step`` the grid step used by the stencil.
    """

    delay: float
    omega: float
    index: int
    step: float


@dataclass(frozen=True)
class Spectrum:
    """Sideband response sampled on a detuning grid.

    Attributes
    ----------
    omega : numpy.ndarray
        Probe-pump detuning grid (rad/s).
    amplitude : numpy.ndarray
        Complex probe transmission amplitude ``t_p``.
    transmission : numpy.ndarray
        ``|t_p|^2``.
    phase : numpy.ndarray
        Unwrapped ``arg(t_p)`` (rad).
    group_delay : numpy.ndarray
        ``d(phase)/d(omega)`` (s); NaN on the two outermost points of each
        edge and everywhere when the grid is not uniform.
    efficiency_percent : numpy.ndarray
        Second-order sideband efficiency in percent; NaN when the second
        order was not computed (e.g. more than two modes).
    route_discrepancy : numpy.ndarray
        Pointwise relative disagreement between the matrix solve and the
        closed-form route; NaN when no closed form exists for the layout.
    metadata : dict
        Steady-state numbers and solver facts for the run.
    """

    omega: np.ndarray
    amplitude: np.ndarray
    transmission: np.ndarray
    phase: np.ndarray
    group_delay: np.ndarray
    efficiency_percent: np.ndarray
    route_discrepancy: np.ndarray
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def omega_normalized(self) -> np.ndarray:
        """Grid in units of the reference mechanical frequency."""
        return self.omega / self.metadata["omega_ref"]

    def nearest_index(self, omega: float) -> int:
        """Index of the grid point closest to ``omega`` (rad/s)."""
        return int(np.argmin(np.abs(self.omega - float(omega))))


# ---------------------------------------------------------------------------
# Internal plain-array view


@dataclass(frozen=True)
class _View:
    kappa: float
    delta: float
    alpha: complex
    eps_p: float
    omega: np.ndarray
    gamma: np.ndarray
    g: np.ndarray
    eta: np.ndarray
    theta: np.ndarray


def _view(config: SystemConfig, steady: SteadyState) -> _View:
    omega, gamma, g = config.mode_arrays()
    eta, theta = config.coupling_arrays()
    return _View(
        kappa=config.cavity.kappa,
        delta=steady.delta_eff,
        alpha=complex(steady.alpha),
        eps_p=probe_amplitude(config),
        omega=omega, gamma=gamma, g=g, eta=eta, theta=theta,
    )


def _as_grid(omega: float | np.ndarray) -> tuple[np.ndarray, bool]:
    arr = np.atleast_1d(np.asarray(omega, dtype=float))
    if arr.ndim != 1:
        raise InvalidParameterError("omega must be a scalar or 1-D array")
    if not np.all(np.isfinite(arr)):
        raise InvalidParameterError("omega grid contains non-finite values")
    return arr, np.ndim(omega) == 0


def _relative_gap(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.maximum(np.abs(a), np.abs(b)), _TINY)
    return np.abs(a - b) / scale


# ---------------------------------------------------------------------------
# Direct matrix route (any number of modes)


def _sideband_matrix(view: _View, w: np.ndarray, order: int) -> np.ndarray:
    """Linear response matrix at ``order * w`` for each grid frequency.

    Unknown layout: ``[A-, conj(A+), B0-, conj(B0+), B1-, conj(B1+), ...]``.
    """
    n = len(view.omega)
    m = 2 * n + 2
    k = len(w)
    ww = order * w
    mat = np.zeros((k, m, m), dtype=complex)
    mat[:, 0, 0] = view.kappa + 1j * (view.delta - ww)
    mat[:, 1, 1] = view.kappa - 1j * (view.delta + ww)
    a = view.alpha
    ac = np.conj(a)
    for l in range(n):
        rm, rp = 2 + 2 * l, 3 + 2 * l
        gl = view.g[l]
        mat[:, 0, rm] = 1j * gl * a
        mat[:, 0, rp] = 1j * gl * a
        mat[:, 1, rm] = -1j * gl * ac
        mat[:, 1, rp] = -1j * gl * ac
        mat[:, rm, rm] = view.gamma[l] + 1j * (view.omega[l] - ww)
        mat[:, rm, 0] = 1j * gl * ac
        mat[:, rm, 1] = 1j * gl * a
        mat[:, rp, rp] = view.gamma[l] - 1j * (view.omega[l] + ww)
        mat[:, rp, 0] = -1j * gl * ac
        mat[:, rp, 1] = -1j * gl * a
        if l + 1 < n:
            hop = view.eta[l] * np.exp(1j * view.theta[l])
            mat[:, rm, rm + 2] = 1j * hop
            mat[:, rp, rp + 2] = -1j * np.conj(hop)
        if l - 1 >= 0:
            hop = view.eta[l - 1] * np.exp(1j * view.theta[l - 1])
            mat[:, rm, rm - 2] = 1j * np.conj(hop)
            mat[:, rp, rp - 2] = -1j * hop
    return mat


def _solve_batched(mat: np.ndarray, rhs: np.ndarray,
                   w: np.ndarray) -> np.ndarray:
    """Batched linear solve with a per-frequency singularity diagnosis."""
    try:
        return np.linalg.solve(mat, rhs[..., None])[..., 0]
    except np.linalg.LinAlgError:
        # Identify which grid point is singular for a useful message.
        bad = [w[i] for i in range(len(w))
               if not np.all(np.isfinite(np.linalg.cond(mat[i])))
               or np.linalg.cond(mat[i]) > 1e15]
        where = f" near omega = {bad[0]:.6e} rad/s" if bad else ""
        raise SingularSystemError(
            f"sideband response matrix is singular{where}") from None


def _first_order_raw(view: _View, w: np.ndarray) -> np.ndarray:
    mat = _sideband_matrix(view, w, order=1)
    rhs = np.zeros((len(w), mat.shape[1]), dtype=complex)
    rhs[:, 0] = view.eps_p
    return _solve_batched(mat, rhs, w)


def _second_order_raw(view: _View, w: np.ndarray,
                      x1: np.ndarray) -> np.ndarray:
    n = len(view.omega)
    a1m = x1[:, 0]
    a1pc = x1[:, 1]
    # Mechanical back-action sum S1 = sum_l g_l (B_l- + conj(B_l+)).
    s1 = np.zeros(len(w), dtype=complex)
    for l in range(n):
        s1 += view.g[l] * (x1[:, 2 + 2 * l] + x1[:, 3 + 2 * l])
    mat = _sideband_matrix(view, w, order=2)
    rhs = np.zeros((len(w), 2 * n + 2), dtype=complex)
    rhs[:, 0] = -1j * a1m * s1
    rhs[:, 1] = 1j * a1pc * s1
    for l in range(n):
        rhs[:, 2 + 2 * l] = -1j * view.g[l] * a1pc * a1m
        rhs[:, 3 + 2 * l] = 1j * view.g[l] * a1pc * a1m
    return _solve_batched(mat, rhs, w)


def _pack_amplitudes(x: np.ndarray, n: int, scalar: bool, cls):
    a_minus = x[:, 0]
    a_plus_conj = x[:, 1]
    b_minus = x[:, 2::2]
    b_plus_conj = x[:, 3::2]
    if scalar:
        return cls(a_minus=complex(a_minus[0]),
                   a_plus_conj=complex(a_plus_conj[0]),
                   b_minus=b_minus[0].copy(),
                   b_plus_conj=b_plus_conj[0].copy())
    return cls(a_minus=a_minus, a_plus_conj=a_plus_conj,
               b_minus=b_minus, b_plus_conj=b_plus_conj)


def solve_first_order(config: SystemConfig, steady: SteadyState,
                      omega: float | np.ndarray) -> FirstOrderAmplitudes:
    """Solve the first-order sideband system directly (any mode count).

    Parameters
    ----------
    config : SystemConfig
    steady : SteadyState
        Operating point (from :func:`omit_lab.model.solve_steady_state`).
    omega : float or array
        Probe-pump detuning(s), rad/s.

    Returns
    -------
    FirstOrderAmplitudes
    """
    w, scalar = _as_grid(omega)
    view = _view(config, steady)
    x1 = _first_order_raw(view, w)
    return _pack_amplitudes(x1, config.n_modes, scalar, FirstOrderAmplitudes)


def solve_second_order(config: SystemConfig, steady: SteadyState,
                       omega: float | np.ndarray,
                       first: FirstOrderAmplitudes | None = None,
                       ) -> SecondOrderAmplitudes:
    """Solve the second-order sideband system (two-mode layout only).

    The second-order system is driven by products of first-order
    amplitudes; pass ``first`` (computed on the same grid) to reuse it,
    otherwise it is solved internally.

    Raises
    ------
    UnsupportedTopologyError
        If the config does not have exactly two mechanical modes.
    """
    if config.n_modes != 2:
        raise UnsupportedTopologyError(
            f"second-order sidebands are defined for the two-mode system, "
            f"got {config.n_modes} modes")
    w, scalar = _as_grid(omega)
    view = _view(config, steady)
    if first is None:
        x1 = _first_order_raw(view, w)
    else:
        x1 = _stack_amplitudes(first, len(w))
    x2 = _second_order_raw(view, w, x1)
    return _pack_amplitudes(x2, 2, scalar, SecondOrderAmplitudes)


def _stack_amplitudes(first: FirstOrderAmplitudes, k: int) -> np.ndarray:
    """Rebuild the raw solution matrix from a FirstOrderAmplitudes."""
    a_minus = np.atleast_1d(np.asarray(first.a_minus, dtype=complex))
    a_plus_conj = np.atleast_1d(np.asarray(first.a_plus_conj, dtype=complex))
    b_minus = np.atleast_2d(np.asarray(first.b_minus, dtype=complex))
    b_plus_conj = np.atleast_2d(np.asarray(first.b_plus_conj, dtype=complex))
    if len(a_minus) != k:
        raise InvalidParameterError(
            "first-order amplitudes were computed on a different grid")
    n = b_minus.shape[1]
    x1 = np.zeros((k, 2 * n + 2), dtype=complex)
    x1[:, 0] = a_minus
    x1[:, 1] = a_plus_conj
    x1[:, 2::2] = b_minus
    x1[:, 3::2] = b_plus_conj
    return x1


# ---------------------------------------------------------------------------
# Closed-form route (two modes)


def _require_two_modes(config: SystemConfig, what: str) -> None:
    if config.n_modes != 2:
        raise UnsupportedTopologyError(
            f"{what} exists for the two-mode layout only, "
            f"got {config.n_modes} modes")


def chain_polynomials(config: SystemConfig,
                      omega: float | np.ndarray) -> TCoefficients:
    """Chain response polynomials T1, T2, T3_1, T3_2 at ``omega``.

    These characterise the driven two-mode mechanical pair (including the
    phonon hopping ``eta``) and appear in every closed-form amplitude.
    """
    _require_two_modes(config, "the chain polynomial set")
    w = np.asarray(omega, dtype=float)
    (o1, o2), (g1v, g2v), _ = config.mode_arrays()
    eta = config.couplings[0].eta
    t1 = -o1 * o2 + eta ** 2 + (g1v - 1j * w) * (g2v - 1j * w)
    t2 = ((eta ** 2 + (-1j * g1v + o1 - w) * (1j * g2v - o2 + w))
          * (eta ** 2 + (g1v - 1j * (o1 + w)) * (g2v - 1j * (o2 + w))))
    t3_1 = (g1v ** 2 + o1 ** 2 - w ** 2 - 2j * g1v * w) * o2 - o1 * eta ** 2
    t3_2 = (g2v ** 2 + o2 ** 2 - w ** 2 - 2j * g2v * w) * o1 - o2 * eta ** 2
    if w.ndim == 0:
        return TCoefficients(complex(t1), complex(t2), complex(t3_1),
                             complex(t3_2))
    return TCoefficients(t1, t2, t3_1, t3_2)


def _closed_first_arrays(view: _View, w: np.ndarray
                         ) -> tuple[np.ndarray, ...]:
    """Closed-form first-order amplitudes on a grid (two modes).

    Returns (A1m, conj(A1p), B1m, B2m, conj(B1p), conj(B2p)).
    """
    o1, o2 = view.omega
    g1v, g2v = view.gamma
    gg1, gg2 = view.g
    eta = view.eta[0] if len(view.eta) else 0.0
    theta = view.theta[0] if len(view.theta) else 0.0
    kap, delta, eps_p = view.kappa, view.delta, view.eps_p
    asq = abs(view.alpha) ** 2
    ac = np.conj(view.alpha)
    ct = math.cos(theta)

    t1 = -o1 * o2 + eta ** 2 + (g1v - 1j * w) * (g2v - 1j * w)
    t2 = ((eta ** 2 + (-1j * g1v + o1 - w) * (1j * g2v - o2 + w))
          * (eta ** 2 + (g1v - 1j * (o1 + w)) * (g2v - 1j * (o2 + w))))
    t3_1 = (g1v ** 2 + o1 ** 2 - w ** 2 - 2j * g1v * w) * o2 - o1 * eta ** 2
    t3_2 = (g2v ** 2 + o2 ** 2 - w ** 2 - 2j * g2v * w) * o1 - o2 * eta ** 2

    mech = gg2 ** 2 * t3_1 + gg1 ** 2 * t3_2
    loop = gg1 * gg2 * eta * t1 * ct
    denom = (-t2 * (delta ** 2 + (kap - 1j * w) ** 2)
             + 4.0 * asq * delta * mech + 8.0 * loop * asq * delta)
    a1m = (t2 * (-kap + 1j * (delta + w)) - 2j * asq * mech
           - 4j * loop * asq) / denom * eps_p
    shared = (1j * kap + delta + w) * denom
    a1pc = (-2.0 * ac ** 2 * (kap - 1j * (delta + w))
            * (2.0 * loop + mech)) / shared * eps_p

    v1 = ((-eta ** 2 + (1j * g1v + o1 + w) * (1j * g2v + o2 + w))
          * (kap - 1j * (delta + w)) ** 2)
    v2 = ((eta ** 2 + (-1j * g1v + o1 - w) * (1j * g2v - o2 + w))
          * (kap - 1j * (delta + w)) ** 2)
    v3 = ((-eta ** 2 + (1j * g1v - o1 + w) * (1j * g2v - o2 + w))
          * (kap - 1j * (delta + w)))

    b1m = (gg1 * ac * v1 * (g2v + 1j * (o2 - w))
           - 1j * gg2 * ac * v1 * eta * np.exp(1j * theta)) / shared * eps_p
    b2m = (gg2 * ac * v1 * (g1v + 1j * (o1 - w))
           - 1j * gg1 * ac * v1 * eta * np.exp(-1j * theta)) / shared * eps_p
    b1pc = (-1j * v2 * (gg1 * ac * (1j * g2v + o2 + w)
                        - gg2 * ac * eta * np.exp(-1j * theta))) / shared * eps_p
    # Note the +denom here: the naive sign on this lone amplitude is
    # inconsistent with the governing linear system (it flips the sign of
    # conj(B2+)); the matrix solve fixes the convention.
    b2pc = (-np.exp(1j * theta) * gg1 * ac * eta * v3
            + gg2 * ac * v3 * (1j * g1v + o1 + w)) / denom * eps_p
    return a1m, a1pc, b1m, b2m, b1pc, b2pc


def first_order_closed_form(config: SystemConfig, steady: SteadyState,
                            omega: float | np.ndarray
                            ) -> FirstOrderAmplitudes:
    """Closed-form first-order amplitudes for the two-mode system.

    Algebraically identical to :func:`solve_first_order`; kept as an
    independent route so the two can be cross-checked to rounding error.
    """
    _require_two_modes(config, "the closed-form first-order solution")
    w, scalar = _as_grid(omega)
    view = _view(config, steady)
    a1m, a1pc, b1m, b2m, b1pc, b2pc = _closed_first_arrays(view, w)
    b_minus = np.stack([b1m, b2m], axis=-1)
    b_plus_conj = np.stack([b1pc, b2pc], axis=-1)
    if scalar:
        return FirstOrderAmplitudes(complex(a1m[0]), complex(a1pc[0]),
                                    b_minus[0], b_plus_conj[0])
    return FirstOrderAmplitudes(a1m, a1pc, b_minus, b_plus_conj)


def _closed_second_arrays(view: _View, w: np.ndarray,
                          fo: tuple[np.ndarray, ...]) -> np.ndarray:
    """Closed-form second-order cavity amplitude A2m on a grid."""
    o1, o2 = view.omega
    g1v, g2v = view.gamma
    gg1, gg2 = view.g
    eta = view.eta[0] if len(view.eta) else 0.0
    theta = view.theta[0] if len(view.theta) else 0.0
    kap, delta = view.kappa, view.delta
    alpha = view.alpha
    asq = abs(alpha) ** 2
    ct = math.cos(theta)
    a1m, a1pc, b1m, b2m, b1pc, b2pc = fo

    w2 = 2.0 * w
    t1 = -o1 * o2 + eta ** 2 + (g1v - 1j * w2) * (g2v - 1j * w2)
    t2 = ((eta ** 2 + (-1j * g1v + o1 - w2) * (1j * g2v - o2 + w2))
          * (eta ** 2 + (g1v - 1j * (o1 + w2)) * (g2v - 1j * (o2 + w2))))
    t3_1 = (g1v ** 2 + o1 ** 2 - w2 ** 2 - 2j * g1v * w2) * o2 - o1 * eta ** 2
    t3_2 = (g2v ** 2 + o2 ** 2 - w2 ** 2 - 2j * g2v * w2) * o1 - o2 * eta ** 2
    mech = gg1 ** 2 * t3_2 + gg2 ** 2 * t3_1
    loop = gg1 * gg2 * eta * t1 * ct

    s_comb = gg1 * (b1m + b1pc) + gg2 * (b2m + b2pc)
    chi1 = (2j * alpha * (alpha * s_comb - a1m * (1j * kap + delta + w2))
            * (2.0 * loop + mech)
            / ((1j * kap + delta + w2) * t2 - 2.0 * asq * mech
               - 4.0 * loop * asq))
    chi2 = 1.0 / (1.0 / (kap - 1j * (delta + w2))
                  - 1j * t2 / (2.0 * asq * (mech + 2.0 * loop)))
    return (chi1 * a1pc + 1j * s_comb * a1m) / (chi2 - (kap + 1j * (delta - w2)))


def second_order_closed_form(config: SystemConfig, steady: SteadyState,
                             omega: float | np.ndarray
                             ) -> complex | np.ndarray:
    """Closed-form second-order cavity amplitude for the two-mode system.

    Uses the closed first-order route internally; cross-check against
    :func:`solve_second_order`.
    """
    _require_two_modes(config, "the closed-form second-order solution")
    w, scalar = _as_grid(omega)
    view = _view(config, steady)
    fo = _closed_first_arrays(view, w)
    a2m = _closed_second_arrays(view, w, fo)
    return complex(a2m[0]) if scalar else a2m


def auxiliary_coefficients(config: SystemConfig, steady: SteadyState,
                           omega: float) -> AuxiliaryCoefficients:
    """All closed-form building blocks at a single detuning.

    Returns the chain polynomials at the probe detuning and at its double,
    the V factors of the mechanical amplitudes, and the chi pair that maps
    first-order amplitudes to the second-order cavity response.
    """
    _require_two_modes(config, "the auxiliary coefficient set")
    w = float(omega)
    view = _view(config, steady)
    t_probe = chain_polynomials(config, w)
    t_double = chain_polynomials(config, 2.0 * w)
    o1, o2 = view.omega
    g1v, g2v = view.gamma
    gg1, gg2 = view.g
    eta = view.eta[0] if len(view.eta) else 0.0
    theta = view.theta[0] if len(view.theta) else 0.0
    kap, delta = view.kappa, view.delta
    alpha = view.alpha
    asq = abs(alpha) ** 2
    ct = math.cos(theta)

    v1 = complex((-eta ** 2 + (1j * g1v + o1 + w) * (1j * g2v + o2 + w))
                 * (kap - 1j * (delta + w)) ** 2)
    v2 = complex((eta ** 2 + (-1j * g1v + o1 - w) * (1j * g2v - o2 + w))
                 * (kap - 1j * (delta + w)) ** 2)
    v3 = complex((-eta ** 2 + (1j * g1v - o1 + w) * (1j * g2v - o2 + w))
                 * (kap - 1j * (delta + w)))

    warr = np.array([w])
    fo = _closed_first_arrays(view, warr)
    a1m, a1pc, b1m, b2m, b1pc, b2pc = (x[0] for x in fo)
    w2 = 2.0 * w
    mech = gg1 ** 2 * t_double.t3_2 + gg2 ** 2 * t_double.t3_1
    loop = gg1 * gg2 * eta * t_double.t1 * ct
    s_comb = gg1 * (b1m + b1pc) + gg2 * (b2m + b2pc)
    chi1 = (2j * alpha * (alpha * s_comb - a1m * (1j * kap + delta + w2))
            * (2.0 * loop + mech)
            / ((1j * kap + delta + w2) * t_double.t2 - 2.0 * asq * mech
               - 4.0 * loop * asq))
    chi2 = 1.0 / (1.0 / (kap - 1j * (delta + w2))
                  - 1j * t_double.t2 / (2.0 * asq * (mech + 2.0 * loop)))
    return AuxiliaryCoefficients(t_probe=t_probe, t_double=t_double,
                                 v1=v1, v2=v2, v3=v3,
                                 chi1=complex(chi1), chi2=complex(chi2))


# ---------------------------------------------------------------------------
# Observables


def transmission(a_minus: complex | np.ndarray, eps_p: float,
                 kappa: float) -> tuple[complex | np.ndarray,
                                        float | np.ndarray]:
    """Probe transmission from the lower cavity sideband amplitude.

    ``t_p = 1 - (kappa / eps_p) * A1m``; returns ``(t_p, |t_p|^2)``.
    """
    if eps_p <= 0.0:
        raise InvalidParameterError("eps_p must be > 0 to define transmission")
    t_p = 1.0 - (kappa / eps_p) * np.asarray(a_minus)
    power = np.abs(t_p) ** 2
    if np.ndim(a_minus) == 0:
        return complex(t_p), float(power)
    return t_p, power


def second_order_efficiency(a2_minus: complex | np.ndarray, eps_p: float,
                            kappa: float) -> float | np.ndarray:
    """Second-order sideband efficiency ``|kappa * A2m / eps_p|``.

    Returned as a fraction of the probe amplitude (multiply by 100 for the
    percentage used in plots and CSV output).
    """
    if eps_p <= 0.0:
        raise InvalidParameterError("eps_p must be > 0 to define efficiency")
    eff = np.abs(kappa * np.asarray(a2_minus) / eps_p)
    return float(eff) if np.ndim(a2_minus) == 0 else eff


def _phase_and_delay(w: np.ndarray, t_p: np.ndarray
                     ) -> tuple[np.ndarray, np.ndarray]:
    """Unwrapped phase and five-point stencil group delay (NaN at edges)."""
    phase = np.unwrap(np.angle(t_p))
    k = len(w)
    delay = np.full(k, np.nan)
    if k >= 5:
        steps = np.diff(w)
        h = steps[0]
        if h > 0 and np.allclose(steps, h, rtol=1e-9, atol=0.0):
            delay[2:-2] = (8.0 * (phase[3:-1] - phase[1:-3])
                           - (phase[4:] - phase[:-4])) / (12.0 * h)
    return phase, delay


def compute_spectrum(config: SystemConfig,
                     omega: np.ndarray | None = None, *,
                     span: tuple[float, float] = (0.8, 1.2),
                     points: int = 4001,
                     include_second_order: bool | None = None,
                     steady: SteadyState | None = None) -> Spectrum:
    """Full sideband spectrum of a configuration.

    Solves the steady state, then the first-order (and, for the two-mode
    layout, second-order) sideband systems on a detuning grid, and
    assembles transmission, phase, group delay, and efficiency together
    with the closed-form cross-check.

    Parameters
    ----------
    config : SystemConfig
    omega : array, optional
        Explicit detuning grid (rad/s).  When omitted, a uniform grid of
        ``points`` samples spanning ``span`` (in units of the reference
        mechanical frequency) is used.
    span, points
        Default grid construction; ignored when ``omega`` is given.
    include_second_order : bool, optional
        ``None`` computes the second order exactly when the layout has two
        modes; ``True`` requires it (raising otherwise); ``False`` skips it.
    steady : SteadyState, optional
        Reuse a precomputed operating point.

    Returns
    -------
    Spectrum
    """
    if omega is None:
        lo, hi = span
        if not (hi > lo):
            raise InvalidParameterError(f"span must increase, got {span}")
        if points < 2:
            raise InvalidParameterError("points must be >= 2")
        w = np.linspace(lo * config.omega_ref, hi * config.omega_ref,
                        int(points))
    else:
        w, scalar = _as_grid(omega)
        if scalar:
            raise InvalidParameterError("omega grid must have >= 1 dimension")
        w = w.copy()

    if include_second_order is None:
        want_second = config.n_modes == 2
    else:
        want_second = bool(include_second_order)
        if want_second and config.n_modes != 2:
            raise UnsupportedTopologyError(
                "second-order sidebands require the two-mode layout")

    if steady is None:
        steady = solve_steady_state(config)
    view = _view(config, steady)
    if view.eps_p <= 0.0:
        raise InvalidParameterError(
            "probe amplitude must be > 0 to compute a spectrum")

    x1 = _first_order_raw(view, w)
    t_p, power = transmission(x1[:, 0], view.eps_p, view.kappa)
    phase, delay = _phase_and_delay(w, t_p)

    discrepancy = np.full(len(w), np.nan)
    efficiency = np.full(len(w), np.nan)
    if config.n_modes == 2:
        fo_closed = _closed_first_arrays(view, w)
        discrepancy = _relative_gap(x1[:, 0], fo_closed[0])
        if want_second:
            x2 = _second_order_raw(view, w, x1)
            efficiency = 100.0 * second_order_efficiency(
                x2[:, 0], view.eps_p, view.kappa)
            a2_closed = _closed_second_arrays(view, w, fo_closed)
            discrepancy = np.maximum(
                discrepancy, _relative_gap(x2[:, 0], a2_closed))

    metadata: dict[str, Any] = {
        "n_modes": config.n_modes,
        "omega_ref": config.omega_ref,
        "kappa": config.cavity.kappa,
        "delta_c": config.cavity.delta_c,
        "delta_eff": steady.delta_eff,
        "alpha_re": steady.alpha.real,
        "alpha_im": steady.alpha.imag,
        "photon_number": steady.photon_number,
        "eps_pump": pump_amplitude(config),
        "eps_probe": view.eps_p,
        "steady_converged": steady.converged,
        "steady_iterations": steady.iterations,
        "steady_residual": steady.residual,
        "multistable": steady.multistable,
        "second_order": want_second,
        "grid_points": len(w),
        "grid_start": float(w[0]),
        "grid_stop": float(w[-1]),
        "route_discrepancy_max": (float(np.nanmax(discrepancy))
                                  if np.any(np.isfinite(discrepancy))
                                  else float("nan")),
    }
    return Spectrum(
        omega=w,
        amplitude=t_p,
        transmission=power,
        phase=phase,
        group_delay=delay,
        efficiency_percent=efficiency,
        route_discrepancy=discrepancy,
        metadata=metadata,
    )


def group_delay(spectrum: Spectrum, at: float) -> GroupDelayEstimate:
    """Group delay ``d(arg t_p)/d(omega)`` at the grid point nearest ``at``.

    Uses a five-point central stencil on the unwrapped phase, so the target
    must sit at least five grid points away from either edge of a uniform
    grid.

    Raises
    ------
    InvalidParameterError
        Non-uniform grid, or target too close to the grid edge.
    DegeneratePointError
        ``|t_p|`` vanishes at the target, making the phase undefined.
    """
    w = spectrum.omega
    k = len(w)
    if k < 11:
        raise InvalidParameterError(
            "group delay needs a grid of at least 11 points")
    steps = np.diff(w)
    h = steps[0]
    if not (h > 0 and np.allclose(steps, h, rtol=1e-9, atol=0.0)):
        raise InvalidParameterError("group delay requires a uniform grid")
    idx = spectrum.nearest_index(at)
    if idx < 5 or idx > k - 6:
        raise InvalidParameterError(
            f"target {at:.6e} rad/s sits {min(idx, k - 1 - idx)} points from "
            "the grid edge; at least 5 are required")
    scale = float(np.max(np.abs(spectrum.amplitude)))
    if abs(spectrum.amplitude[idx]) < 1e-12 * max(scale, 1.0):
        raise DegeneratePointError(
            f"transmission amplitude vanishes at omega = {w[idx]:.6e} rad/s; "
            "phase slope is undefined there")
    phase = spectrum.phase
    delay = (8.0 * (phase[idx + 1] - phase[idx - 1])
             - (phase[idx + 2] - phase[idx - 2])) / (12.0 * h)
    return GroupDelayEstimate(delay=float(delay), omega=float(w[idx]),
                              index=idx, step=float(h))
