"""Flat ``key = value`` run configuration and the shipped presets.

Lengths ``lambda``, ``slit_separation``, ``slit_width``, ``screen_distance``,
``launch_y`` and ``envelope_sigma`` are absolute (same unit as ``lambda``).
``sample_window``, ``norm_window`` and the ``det_*`` keys are in units of the
fringe spacing L, which the geometry fixes. ``tau`` is absolute time or
``auto`` (twice the launch-to-screen transit time).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .detection import DetectorWindow, WindowError, check_windows
from .ensembles import EnsembleKind, EnsembleSpec
from .trajectories import transit_time
from .wavefield import GeometryError, SlitGeometry, Statistics, WaveParams, make_wave_vectors

KEYS = (
    "lambda", "slit_separation", "slit_width", "screen_distance", "launch_y",
    "statistics", "envelope_sigma", "ensemble", "n_pairs", "seed", "tau",
    "sample_window", "det_p_lo", "det_p_width", "det_q_lo", "det_q_width", "norm_window",
)

REQUIRED = ("ensemble", "det_p_lo", "det_p_width", "det_q_lo", "det_q_width")

DEFAULTS = {
    "lambda": "1.0",
    "slit_separation": "20.0",
    "slit_width": "20.0",
    "screen_distance": "200.0",
    "launch_y": "auto",
    "statistics": "bose",
    "envelope_sigma": "inf",
    "n_pairs": "100000",
    "seed": "20250101",
    "tau": "auto",
    "sample_window": "3.0",
    "norm_window": "auto",
}

PRESETS = {
    "dbb-time-symmetric": """
        # symmetric pairs, detectors mirrored through x = 0
        ensemble = time_symmetric
        det_p_lo = 0.4
        det_p_width = 0.2
        det_q_lo = -0.6
        det_q_width = 0.2
    """,
    "dbb-time-asymmetric": """
        # symmetric pairs, Q is not the mirror of P: no pair can fire both
        ensemble = time_symmetric
        det_p_lo = 0.2
        det_p_width = 0.1
        det_q_lo = -0.6
        det_q_width = 0.1
    """,
    "dbb-gibbs-asymmetric": """
        # fixed-time ensemble drawn from |psi|^2, same asymmetric detectors
        ensemble = gibbs
        det_p_lo = 0.2
        det_p_width = 0.1
        det_q_lo = -0.6
        det_q_width = 0.1
    """,
    "mb-crossing-demo": """
        # unsymmetrised state: single-particle tracks drift across x = 0
        statistics = mb
        ensemble = gibbs
        det_p_lo = 0.2
        det_p_width = 0.1
        det_q_lo = -0.6
        det_q_width = 0.1
    """,
}


class ConfigError(ValueError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


@dataclass(frozen=True)
class RunConfig:
    geometry: SlitGeometry
    params: WaveParams
    ensemble: EnsembleSpec
    detector_p: DetectorWindow
    detector_q: DetectorWindow
    normalization_window: float
    values: dict = field(default_factory=dict)
    output_dir: Path = Path("out")
    dump_trajectories: bool = False
    dump_initials: bool = False

    @property
    def fringe_spacing(self) -> float:
        return self.params.fringe_spacing

    @property
    def sample_half_width(self) -> float:
        return self.ensemble.sample_window * self.fringe_spacing


def parse_pairs(source: str, origin: str = "config") -> dict[str, str]:
    """Read ``key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(source.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(key, "unknown key")
        if key in out:
            raise ConfigError(key, "duplicate key")
        out[key] = value
    return out


def _float(values, key, allow_inf=False):
    text = values[key]
    try:
        x = float(text)
    except ValueError:
        raise ConfigError(key, f"malformed number {text!r}") from None
    if math.isnan(x) or (math.isinf(x) and not allow_inf):
        raise ConfigError(key, f"must be finite, got {text!r}")
    return x


def _int(values, key):
    x = _float(values, key)
    if x != int(x):
        raise ConfigError(key, f"must be an integer, got {values[key]!r}")
    return int(x)


def _choice(values, key, enum_cls):
    try:
        return enum_cls(values[key].lower())
    except ValueError:
        options = ", ".join(m.value for m in enum_cls)
        raise ConfigError(key, f"expected one of {options}, got {values[key]!r}") from None


def build_config(values: dict[str, str], **extra) -> RunConfig:
    merged = dict(DEFAULTS)
    merged.update(values)
    for key in REQUIRED:
        if key not in merged:
            raise ConfigError(key, "missing required key")

    try:
        launch_y = None if merged["launch_y"] == "auto" else _float(merged, "launch_y")
        geometry = SlitGeometry(
            wavelength=_float(merged, "lambda"),
            slit_separation=_float(merged, "slit_separation"),
            slit_width=_float(merged, "slit_width"),
            screen_distance=_float(merged, "screen_distance"),
            launch_y=launch_y,
        )
    except GeometryError as exc:
        raise ConfigError("geometry", str(exc)) from None

    statistics = _choice(merged, "statistics", Statistics)
    sigma = _float(merged, "envelope_sigma", allow_inf=True)
    if not sigma > 0:
        raise ConfigError("envelope_sigma", "must be positive or inf")
    try:
        params = WaveParams(make_wave_vectors(geometry), statistics, envelope_sigma=sigma)
        L = params.fringe_spacing
    except GeometryError as exc:
        raise ConfigError("slit_separation", str(exc)) from None

    kind = _choice(merged, "ensemble", EnsembleKind)
    if kind is EnsembleKind.TIME_SYMMETRIC and statistics is not Statistics.BOSE:
        raise ConfigError("statistics", "the time_symmetric ensemble is defined for bose statistics only")
    n_pairs = _int(merged, "n_pairs")
    if n_pairs < 1:
        raise ConfigError("n_pairs", "must be >= 1")
    seed = _int(merged, "seed")
    if not 0 <= seed < 2**64:
        raise ConfigError("seed", "must be an unsigned 64-bit integer")
    if merged["tau"] == "auto":
        tau = 2.0 * transit_time(params, geometry)
    else:
        tau = _float(merged, "tau")
        if not tau > 0:
            raise ConfigError("tau", "must be positive")
    window = _float(merged, "sample_window")
    if not window > 0:
        raise ConfigError("sample_window", "must be positive")
    ensemble = EnsembleSpec(kind, n_pairs, seed,
                            launch_spacing=tau if kind is EnsembleKind.TIME_SYMMETRIC else None,
                            sample_window=window)

    norm = window if merged["norm_window"] == "auto" else _float(merged, "norm_window")
    if not norm > 0:
        raise ConfigError("norm_window", "must be positive")
    try:
        P = DetectorWindow(_float(merged, "det_p_lo") * L, _float(merged, "det_p_width") * L, "P")
    except WindowError as exc:
        raise ConfigError("det_p_width", str(exc)) from None
    try:
        Q = DetectorWindow(_float(merged, "det_q_lo") * L, _float(merged, "det_q_width") * L, "Q")
    except WindowError as exc:
        raise ConfigError("det_q_width", str(exc)) from None
    try:
        check_windows(P, Q)
    except WindowError as exc:
        raise ConfigError("det_q_lo", str(exc)) from None
    for win, key in ((P, "det_p_lo"), (Q, "det_q_lo")):
        if win.x_lo < -norm * L or win.x_hi > norm * L:
            raise ConfigError(key, f"detector {win.label} lies outside the normalization window")

    return RunConfig(geometry, params, ensemble, P, Q, norm * L, values=merged, **extra)


def parse_config(source: str = "", overrides: dict[str, str] | None = None,
                 preset: str | None = None, **extra) -> RunConfig:
    """Preset values, then ``source``, then ``overrides``; later layers win."""
    values: dict[str, str] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError("preset", f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        values.update(parse_pairs(PRESETS[preset], origin=f"preset {preset}"))
    values.update(parse_pairs(source))
    for key, value in (overrides or {}).items():
        if key not in KEYS:
            raise ConfigError(key, "unknown key")
        values[key] = str(value)
    return build_config(values, **extra)
