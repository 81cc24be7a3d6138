"""Plain-text configuration files (INI) for system descriptions.

Layout::

    [cavity]
    kappa_hz = 215000.0          ; decay rate / 2pi
    delta_c_hz = 966166.417      ; bare detuning / 2pi (may be negative)
    wavelength_m = 1.064e-06     ; optional
    cavity_length_m = 0.025      ; optional

    [drive]
    power_pump_w = 0.0015
    probe_ratio = 0.05           ; XOR power_probe_w; default 0.05
    ; omega_pump_hz = ...        ; optional, else derived from wavelength

    [mode1]                      ; one section per mode, numbered from 1
    omega_hz = 947000.0
    q_factor = 6700.0            ; XOR gamma_hz
    mass_kg = 1.45e-10           ; XOR g_hz (mass needs wavelength + length)

    [coupling1]                  ; exactly one fewer than the modes
    eta_hz = 47350.0
    theta_pi_units = 0.5         ; XOR theta_rad; default 0

Keys ending in ``_hz`` are ordinary frequencies and are multiplied by 2*pi
on load (the package works in angular units throughout); emission divides
back.  Unknown sections or keys are hard errors -- typos must not pass
silently.
"""

from __future__ import annotations

import configparser
import math
import os
from io import StringIO

from .errors import ConfigError, InvalidParameterError
from .model import (
    CavityParams,
    DriveSpec,
    MechanicalMode,
    PhononCoupling,
    SystemConfig,
    derive_single_photon_coupling,
)

__all__ = ["load_config", "loads_config", "emit_config", "save_config"]

TWO_PI = 2.0 * math.pi

_CAVITY_KEYS = {"kappa_hz", "delta_c_hz", "wavelength_m", "cavity_length_m"}
_DRIVE_KEYS = {"power_pump_w", "probe_ratio", "power_probe_w",
               "omega_pump_hz"}
_MODE_KEYS = {"omega_hz", "gamma_hz", "q_factor", "g_hz", "mass_kg"}
_COUPLING_KEYS = {"eta_hz", "theta_rad", "theta_pi_units"}


def _check_keys(section: str, present, allowed) -> None:
    unknown = sorted(set(present) - allowed)
    if unknown:
        raise ConfigError(
            f"unknown key(s) in [{section}]: {', '.join(unknown)}; "
            f"allowed: {', '.join(sorted(allowed))}")


def _get_float(parser: configparser.ConfigParser, section: str,
               key: str) -> float:
    raw = parser.get(section, key)
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(
            f"[{section}] {key} = {raw!r} is not a number") from None


def _require(parser: configparser.ConfigParser, section: str,
             key: str) -> float:
    if not parser.has_option(section, key):
        raise ConfigError(f"[{section}] is missing required key {key}")
    return _get_float(parser, section, key)


def _optional(parser: configparser.ConfigParser, section: str,
              key: str) -> float | None:
    if not parser.has_option(section, key):
        return None
    return _get_float(parser, section, key)


def _exactly_one(section: str, **kv: float | None) -> tuple[str, float]:
    given = {k: v for k, v in kv.items() if v is not None}
    if len(given) != 1:
        names = " / ".join(kv)
        raise ConfigError(
            f"[{section}] needs exactly one of {names}, got "
            f"{len(given)}: {', '.join(sorted(given)) or 'none'}")
    return next(iter(given.items()))


def _numbered_sections(parser: configparser.ConfigParser, stem: str) -> int:
    """Count sections ``stem1, stem2, ...`` and demand contiguous numbering."""
    found = [s for s in parser.sections() if s.startswith(stem)
             and s[len(stem):].isdigit()]
    count = len(found)
    expected = {f"{stem}{i}" for i in range(1, count + 1)}
    if set(found) != expected:
        raise ConfigError(
            f"{stem} sections must be numbered contiguously from 1; "
            f"found {sorted(found)}")
    return count


def loads_config(text: str) -> SystemConfig:
    """Parse a configuration from a string.  See the module docstring."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    n_modes = _numbered_sections(parser, "mode")
    n_couplings = _numbered_sections(parser, "coupling")
    known = ({"cavity", "drive"}
             | {f"mode{i}" for i in range(1, n_modes + 1)}
             | {f"coupling{i}" for i in range(1, n_couplings + 1)})
    unknown = sorted(set(parser.sections()) - known)
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    for required in ("cavity", "drive"):
        if not parser.has_section(required):
            raise ConfigError(f"missing required section [{required}]")
    if n_modes == 0:
        raise ConfigError("at least one [mode1] section is required")
    if n_couplings != n_modes - 1:
        raise ConfigError(
            f"{n_modes} mode(s) need exactly {n_modes - 1} coupling "
            f"section(s), found {n_couplings}")

    _check_keys("cavity", parser.options("cavity"), _CAVITY_KEYS)
    _check_keys("drive", parser.options("drive"), _DRIVE_KEYS)

    try:
        wavelength = _optional(parser, "cavity", "wavelength_m")
        cavity_length = _optional(parser, "cavity", "cavity_length_m")
        cavity = CavityParams(
            kappa=TWO_PI * _require(parser, "cavity", "kappa_hz"),
            delta_c=TWO_PI * _require(parser, "cavity", "delta_c_hz"),
            wavelength=wavelength,
            cavity_length=cavity_length,
        )

        probe_ratio = _optional(parser, "drive", "probe_ratio")
        power_probe = _optional(parser, "drive", "power_probe_w")
        if probe_ratio is not None and power_probe is not None:
            raise ConfigError(
                "[drive] probe_ratio and power_probe_w are mutually exclusive")
        if probe_ratio is None and power_probe is None:
            probe_ratio = 0.05
        omega_pump_hz = _optional(parser, "drive", "omega_pump_hz")
        drive = DriveSpec(
            power_pump=_require(parser, "drive", "power_pump_w"),
            probe_ratio=probe_ratio,
            power_probe=power_probe,
            omega_pump=(TWO_PI * omega_pump_hz
                        if omega_pump_hz is not None else None),
        )

        modes = []
        for i in range(1, n_modes + 1):
            section = f"mode{i}"
            _check_keys(section, parser.options(section), _MODE_KEYS)
            omega = TWO_PI * _require(parser, section, "omega_hz")
            damp_key, damp_val = _exactly_one(
                section,
                gamma_hz=_optional(parser, section, "gamma_hz"),
                q_factor=_optional(parser, section, "q_factor"))
            if damp_key == "gamma_hz":
                gamma = TWO_PI * damp_val
            else:
                if damp_val <= 0.0:
                    raise ConfigError(f"[{section}] q_factor must be > 0")
                gamma = omega / damp_val
            cpl_key, cpl_val = _exactly_one(
                section,
                g_hz=_optional(parser, section, "g_hz"),
                mass_kg=_optional(parser, section, "mass_kg"))
            if cpl_key == "g_hz":
                g = TWO_PI * cpl_val
                mass = None
            else:
                if wavelength is None or cavity_length is None:
                    raise ConfigError(
                        f"[{section}] mass_kg needs wavelength_m and "
                        "cavity_length_m in [cavity] to derive the coupling")
                mass = cpl_val
                g = derive_single_photon_coupling(
                    wavelength, cavity_length, mass, omega)
            modes.append(MechanicalMode(omega=omega, gamma=gamma, g=g,
                                        mass=mass))

        couplings = []
        for i in range(1, n_couplings + 1):
            section = f"coupling{i}"
            _check_keys(section, parser.options(section), _COUPLING_KEYS)
            eta = TWO_PI * _require(parser, section, "eta_hz")
            theta_rad = _optional(parser, section, "theta_rad")
            theta_pi = _optional(parser, section, "theta_pi_units")
            if theta_rad is not None and theta_pi is not None:
                raise ConfigError(
                    f"[{section}] theta_rad and theta_pi_units are "
                    "mutually exclusive")
            if theta_pi is not None:
                theta = theta_pi * math.pi
            else:
                theta = theta_rad if theta_rad is not None else 0.0
            couplings.append(PhononCoupling(eta=eta, theta=theta))

        return SystemConfig(cavity=cavity, modes=tuple(modes),
                            couplings=tuple(couplings), drive=drive)
    except InvalidParameterError as exc:
        # Parameter validation failures become config errors with context.
        raise ConfigError(f"invalid configuration: {exc}") from None


def load_config(path: str | os.PathLike) -> SystemConfig:
    """Load a configuration file.  See the module docstring for the format."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    return loads_config(text)


def emit_config(config: SystemConfig) -> str:
    """Serialise a configuration to canonical INI text.

    The output reloads to an identical :class:`SystemConfig` (all floats
    are written with full round-trip precision).  Damping is always
    written as ``gamma_hz`` and the phase as ``theta_rad``; the coupling
    is written as ``mass_kg`` when the mode records a mass, else ``g_hz``.
    """
    out = StringIO()
    c = config.cavity
    out.write("[cavity]\n")
    out.write(f"kappa_hz = {c.kappa / TWO_PI!r}\n")
    out.write(f"delta_c_hz = {c.delta_c / TWO_PI!r}\n")
    if c.wavelength is not None:
        out.write(f"wavelength_m = {c.wavelength!r}\n")
    if c.cavity_length is not None:
        out.write(f"cavity_length_m = {c.cavity_length!r}\n")

    d = config.drive
    out.write("\n[drive]\n")
    out.write(f"power_pump_w = {d.power_pump!r}\n")
    if d.probe_ratio is not None:
        out.write(f"probe_ratio = {d.probe_ratio!r}\n")
    else:
        out.write(f"power_probe_w = {d.power_probe!r}\n")
    if d.omega_pump is not None:
        out.write(f"omega_pump_hz = {d.omega_pump / TWO_PI!r}\n")

    for i, mode in enumerate(config.modes, start=1):
        out.write(f"\n[mode{i}]\n")
        out.write(f"omega_hz = {mode.omega / TWO_PI!r}\n")
        out.write(f"gamma_hz = {mode.gamma / TWO_PI!r}\n")
        if mode.mass is not None:
            out.write(f"mass_kg = {mode.mass!r}\n")
        else:
            out.write(f"g_hz = {mode.g / TWO_PI!r}\n")

    for i, coupling in enumerate(config.couplings, start=1):
        out.write(f"\n[coupling{i}]\n")
        out.write(f"eta_hz = {coupling.eta / TWO_PI!r}\n")
        out.write(f"theta_rad = {coupling.theta!r}\n")
    return out.getvalue()


def save_config(config: SystemConfig, path: str | os.PathLike) -> None:
    """Write :func:`emit_config` output to ``path``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(emit_config(config))
