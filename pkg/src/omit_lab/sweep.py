"""Parameter sweeps and result files (CSV, JSON, manifest).

A sweep varies one named parameter over a list of values, recomputes the
sideband spectrum at each value (optionally re-locking the effective
detuning, which experiments hold fixed while turning a knob), and collects
the spectra into a :class:`ResultBundle` that can be written to disk as
one CSV per point plus an index and a SHA-256 manifest.

Parameter names reuse the configuration-file key spelling, so the same
string works in a config file, in :func:`apply_parameter`, and on the
command line; ``_hz`` values are plain frequencies (multiplied by 2*pi
internally), angles are radians or units of pi, powers are watts.

Outputs are deterministic: no timestamps, floats written with ``repr``
(shortest round-trip form), and the same bytes regardless of the worker
count used to produce them.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError, OmitLabError
from .model import SystemConfig, lock_effective_detuning
from .sidebands import Spectrum, compute_spectrum

__all__ = [
    "SWEEPABLE_PARAMETERS",
    "SweepSpec",
    "ResultBundle",
    "apply_parameter",
    "run_sweep",
    "write_spectrum_csv",
    "spectrum_to_dict",
    "write_bundle",
    "resolve_jobs",
]

CSV_COLUMNS = ("omega_over_omega_m", "transmission", "efficiency_percent",
               "phase_rad", "group_delay_s", "route_discrepancy")

TWO_PI = 2.0 * math.pi

JOBS_ENV_VAR = "OMIT_LAB_JOBS"


def _set_mode(config: SystemConfig, index: int, **changes) -> SystemConfig:
    if not 0 <= index < config.n_modes:
        raise InvalidParameterError(
            f"mode index {index} out of range for {config.n_modes} modes")
    modes = list(config.modes)
    modes[index] = replace(modes[index], **changes)
    return replace(config, modes=tuple(modes))


def _set_coupling(config: SystemConfig, index: int, **changes) -> SystemConfig:
    if not 0 <= index < len(config.couplings):
        raise InvalidParameterError(
            f"coupling index {index} out of range for "
            f"{len(config.couplings)} couplings")
    couplings = list(config.couplings)
    couplings[index] = replace(couplings[index], **changes)
    return replace(config, couplings=tuple(couplings))


SWEEPABLE_PARAMETERS = {
    "power_pump_w": lambda cfg, v, i: replace(
        cfg, drive=replace(cfg.drive, power_pump=v)),
    "probe_ratio": lambda cfg, v, i: replace(
        cfg, drive=replace(cfg.drive, probe_ratio=v, power_probe=None)),
    "delta_c_hz": lambda cfg, v, i: replace(
        cfg, cavity=replace(cfg.cavity, delta_c=TWO_PI * v)),
    "omega_hz": lambda cfg, v, i: _set_mode(cfg, i, omega=TWO_PI * v),
    "gamma_hz": lambda cfg, v, i: _set_mode(cfg, i, gamma=TWO_PI * v),
    "g_hz": lambda cfg, v, i: _set_mode(cfg, i, g=TWO_PI * v, mass=None),
    "eta_hz": lambda cfg, v, i: _set_coupling(cfg, i, eta=TWO_PI * v),
    "theta_rad": lambda cfg, v, i: _set_coupling(cfg, i, theta=v),
    "theta_pi_units": lambda cfg, v, i: _set_coupling(
        cfg, i, theta=v * math.pi),
}


def apply_parameter(config: SystemConfig, parameter: str, value: float,
                    index: int = 0) -> SystemConfig:
    """Return a copy of ``config`` with one named parameter changed.

    ``parameter`` uses the config-file key spelling (see
    :data:`SWEEPABLE_PARAMETERS`); ``index`` selects the mode or coupling
    for per-element keys and is ignored by the global ones.
    """
    try:
        setter = SWEEPABLE_PARAMETERS[parameter]
    except KeyError:
        raise InvalidParameterError(
            f"unknown sweep parameter {parameter!r}; choose from "
            f"{', '.join(sorted(SWEEPABLE_PARAMETERS))}") from None
    return setter(config, float(value), index)


@dataclass(frozen=True)
class SweepSpec:
    """One-dimensional sweep description.

    ``lock_delta`` (rad/s), when set, re-locks the *effective* detuning to
    that value after each parameter change -- the usual experimental
    protocol when turning a knob that shifts the static displacements.
    """

    parameter: str
    values: tuple[float, ...]
    index: int = 0
    lock_delta: float | None = None

    def __post_init__(self) -> None:
        if self.parameter not in SWEEPABLE_PARAMETERS:
            raise InvalidParameterError(
                f"unknown sweep parameter {self.parameter!r}")
        values = tuple(float(v) for v in self.values)
        if len(values) == 0:
            raise InvalidParameterError("sweep needs at least one value")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class ResultBundle:
    """Spectra from a sweep, aligned with ``spec.values``.

    Points that failed carry ``None`` in ``spectra`` and the error message
    in ``errors``.
    """

    spec: SweepSpec
    spectra: tuple[Spectrum | None, ...]
    errors: tuple[str | None, ...]

    @property
    def n_failed(self) -> int:
        return sum(e is not None for e in self.errors)


def resolve_jobs(jobs: int | None) -> int:
    """Worker count: explicit argument, else the OMIT_LAB_JOBS variable, else 1."""
    if jobs is None:
        raw = os.environ.get(JOBS_ENV_VAR, "").strip()
        if raw:
            try:
                jobs = int(raw)
            except ValueError:
                raise InvalidParameterError(
                    f"{JOBS_ENV_VAR}={raw!r} is not an integer") from None
        else:
            jobs = 1
    if jobs < 1:
        raise InvalidParameterError(f"jobs must be >= 1, got {jobs}")
    return jobs


def _sweep_point(args) -> tuple[Spectrum | None, str | None]:
    (config, spec, value, omega, span, points, include_second_order) = args
    try:
        point_cfg = apply_parameter(config, spec.parameter, value, spec.index)
        if spec.lock_delta is not None:
            point_cfg = lock_effective_detuning(point_cfg, spec.lock_delta)
        spectrum = compute_spectrum(
            point_cfg, omega, span=span, points=points,
            include_second_order=include_second_order)
        return spectrum, None
    except OmitLabError as exc:
        return None, f"{type(exc).__name__}: {exc}"


def run_sweep(config: SystemConfig, spec: SweepSpec, *,
              omega: np.ndarray | None = None,
              span: tuple[float, float] = (0.8, 1.2),
              points: int = 4001,
              include_second_order: bool | None = None,
              jobs: int | None = None) -> ResultBundle:
    """Compute a spectrum per sweep value.

    Failures at individual points (non-convergent steady state, singular
    response, ...) are recorded and do not abort the rest of the sweep.
    With ``jobs > 1`` points are computed in separate processes; results
    and any output files are identical to the serial run.
    """
    jobs = resolve_jobs(jobs)
    tasks = [(config, spec, v, omega, span, points, include_second_order)
             for v in spec.values]
    if jobs == 1 or len(tasks) == 1:
        outcomes = [_sweep_point(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            outcomes = list(pool.map(_sweep_point, tasks))
    spectra = tuple(s for s, _ in outcomes)
    errors = tuple(e for _, e in outcomes)
    return ResultBundle(spec=spec, spectra=spectra, errors=errors)


# ---------------------------------------------------------------------------
# File output


def _fmt(value: float) -> str:
    """Shortest round-trip decimal form; NaN prints as 'nan'."""
    return repr(float(value))


def write_spectrum_csv(spectrum: Spectrum, path_or_file) -> None:
    """Write a spectrum as CSV with the standard column set.

    Columns: ``omega_over_omega_m, transmission, efficiency_percent,
    phase_rad, group_delay_s, route_discrepancy``.  Values unavailable for
    the layout (e.g. second order with more than two modes, delay at grid
    edges) are written as ``nan``.
    """
    rows = np.column_stack([
        spectrum.omega_normalized,
        spectrum.transmission,
        spectrum.efficiency_percent,
        spectrum.phase,
        spectrum.group_delay,
        spectrum.route_discrepancy,
    ])
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    text = "\n".join(lines) + "\n"
    if hasattr(path_or_file, "write"):
        path_or_file.write(text)
    else:
        with open(path_or_file, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _json_safe(value):
    """Make a value JSON-serialisable: complex -> re/im, NaN -> None."""
    if isinstance(value, (bool, int, str)) or value is None:
        return value
    if isinstance(value, complex):
        return {"re": _json_safe(value.real), "im": _json_safe(value.imag)}
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, np.generic):
        return _json_safe(value.item())
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def spectrum_to_dict(spectrum: Spectrum) -> dict:
    """JSON-ready dict of a spectrum (columns as named arrays)."""
    return _json_safe({
        "metadata": spectrum.metadata,
        "columns": {
            "omega_over_omega_m": spectrum.omega_normalized,
            "transmission": spectrum.transmission,
            "efficiency_percent": spectrum.efficiency_percent,
            "phase_rad": spectrum.phase,
            "group_delay_s": spectrum.group_delay,
            "route_discrepancy": spectrum.route_discrepancy,
        },
    })


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(path.read_bytes())
    return digest.hexdigest()


def write_bundle(bundle: ResultBundle, out_dir, *,
                 fmt: str = "csv") -> list[Path]:
    """Write a sweep to ``out_dir``: per-point files, index, manifest.

    Produces ``point_NNN.csv`` (or ``.json``) per successful point,
    ``bundle.json`` mapping sweep values to files (with per-point summary
    metadata and error messages for failed points), and ``manifest.json``
    with the SHA-256 and size of every other written file.  Returns the
    list of paths written.
    """
    if fmt not in ("csv", "json"):
        raise InvalidParameterError(f"format must be csv or json, got {fmt!r}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    points = []
    for i, (value, spectrum, error) in enumerate(
            zip(bundle.spec.values, bundle.spectra, bundle.errors)):
        entry: dict = {"value": value, "error": error, "file": None}
        if spectrum is not None:
            name = f"point_{i:03d}.{fmt}"
            path = out / name
            if fmt == "csv":
                write_spectrum_csv(spectrum, path)
            else:
                path.write_text(
                    json.dumps(spectrum_to_dict(spectrum), indent=1,
                               allow_nan=False) + "\n",
                    encoding="utf-8")
            entry["file"] = name
            entry["metadata"] = _json_safe(spectrum.metadata)
            written.append(path)
        points.append(entry)
    index = {
        "parameter": bundle.spec.parameter,
        "index": bundle.spec.index,
        "lock_delta": _json_safe(bundle.spec.lock_delta),
        "values": list(bundle.spec.values),
        "points": points,
    }
    index_path = out / "bundle.json"
    index_path.write_text(json.dumps(index, indent=1, allow_nan=False) + "\n",
                          encoding="utf-8")
    written.append(index_path)
    manifest = {
        "files": {
            p.name: {"sha256": _sha256(p), "bytes": p.stat().st_size}
            for p in sorted(written, key=lambda p: p.name)
        }
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1) + "\n",
                             encoding="utf-8")
    written.append(manifest_path)
    return written
