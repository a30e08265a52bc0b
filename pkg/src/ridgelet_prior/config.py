"""Experiment configuration: a flat YAML mapping validated before any work.

Every key has a default. A ``preset`` selects one of the standard setting
rows (cubature grid, bandwidths, covariance model); explicit keys override
the preset. Unknown keys and ill-typed values raise :class:`ConfigError`.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .activations import ActivationPair
from .cubature import InputRule, make_input_rule, make_mollifier
from .kernels import (
    CovarianceModel,
    InPaintComposite,
    LinearMean,
    MeanModel,
    Periodic,
    RationalQuadratic,
    SquaredExponential,
    ZeroMean,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "EXPERIMENTS",
    "PRESETS",
    "DYNAMIC_SCHEDULE",
    "SWEEP_BANDWIDTHS",
    "load_config",
    "read_mapping",
    "config_from_mapping",
]

EXPERIMENTS = ("sample-prior", "mrmse", "cov-curve", "regress", "inpaint", "reconstruct", "sweep")
KERNELS = ("se", "rq", "periodic", "inpaint")

SWEEP_BANDWIDTHS = [[1.0, 4.0], [2.0, 9.0], [3.0, 16.0], [4.0, 25.0]]
DYNAMIC_SCHEDULE = [
    [1.0, 4.0, 300],
    [2.0, 9.0, 1000],
    [3.0, 16.0, 3000],
    [4.0, 25.0, 10000],
    [5.0, 36.0, 30000],
]

PRESETS = {
    "prior-1d": {},
    "co2": {
        "S": 5.0, "D": 200, "sigma_w": 5.0, "sigma_b": 36.0,
        "kernel": "periodic", "amplitude": 1.0, "lengthscale": 0.75, "period": 1.8,
        "mean": "linear", "mean_slope": 0.06, "noise_sd": 0.085, "N": [3000],
        "dataset": "synthetic-co2",
    },
    "airline": {
        "S": 5.0, "D": 200, "sigma_w": 5.0, "sigma_b": 36.0,
        "kernel": "periodic", "amplitude": 1.0, "lengthscale": 0.75, "period": 1.75,
        "mean": "linear", "mean_slope": 0.2, "noise_sd": 0.125, "N": [3000],
        "dataset": "synthetic-airline",
    },
    "inpainting": {
        "d": 2, "S": 5.0, "D": 30, "sigma_w": 2.0, "sigma_b": 18.0,
        "kernel": "inpaint", "amplitude": 0.1, "lengthscale": 0.1, "mean": "zero",
        "N": [5000], "sigma_w0": 2.0, "sigma_b0": 18.0, "noise_sd": 0.1,
        "dataset": "synthetic-image",
    },
    "deep": {"sigma_w": 2.0, "sigma_b": 9.0, "hidden_layers": 3},
}


@dataclass
class ExperimentConfig:
    """Flat experiment settings; defaults are the one-dimensional prior row."""

    experiment: str = "sample-prior"
    preset: str = "prior-1d"
    seed: int = 0
    # covariance and mean
    kernel: str = "se"
    amplitude: float = 1.0
    lengthscale: float = 1.5
    alpha: float = 1.0
    period: float = 2.0
    mean: str = "zero"
    mean_slope: float = 0.0
    # activation and cubature
    activation: str = "tanh"
    d: int = 1
    S: float = 6.0
    x_half: float = 5.0
    D: int = 200
    N: list = field(default_factory=lambda: [100, 1000, 3000])
    sigma_w: float = 5.0
    sigma_b: float = 36.0
    hidden_layers: int = 1
    # i.i.d. baseline
    sigma_w0: float = 5.0
    sigma_b0: float = 36.0
    sigma_w1: float | None = None
    # diagnostics
    seeds: list = field(default_factory=lambda: list(range(10)))
    n_paths: int = 10
    n_nets: int = 10
    probe_points: int = 201
    bandwidths: list = field(default_factory=lambda: [list(b) for b in SWEEP_BANDWIDTHS])
    schedule: list = field(default_factory=lambda: [list(s) for s in DYNAMIC_SCHEDULE])
    # regression
    prior: str = "both"
    noise_sd: float = 0.085
    n_samples: int = 5000
    burn_in: int = 1000
    thin: int = 2
    dataset: str | None = None
    x_columns: list = field(default_factory=lambda: ["x"])
    y_column: str = "y"
    extrapolate: float = 0.55
    mask_half_width: float = 1.5
    image_size: int = 20

    # -- derived objects -------------------------------------------------------

    def covariance(self) -> CovarianceModel:
        if self.kernel == "se":
            return SquaredExponential(self.amplitude, self.lengthscale, d=self.d)
        if self.kernel == "rq":
            return RationalQuadratic(self.amplitude, self.alpha, self.lengthscale, d=self.d)
        if self.kernel == "periodic":
            return Periodic(self.amplitude, self.lengthscale, self.period, d=self.d)
        return InPaintComposite(self.amplitude, self.lengthscale, d=self.d)

    def mean_model(self) -> MeanModel:
        if self.mean == "linear":
            return LinearMean([self.mean_slope] * self.d)
        return ZeroMean(self.d)

    def activation_pair(self) -> ActivationPair:
        return ActivationPair(self.activation, self.d)

    def input_rule(self, D: int | None = None) -> InputRule:
        moll = make_mollifier(self.x_half, self.S) if self.S > self.x_half else None
        return make_input_rule(self.d, [self.D if D is None else D] * self.d, self.S, moll)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def digest(self) -> str:
        """SHA-256 of the canonical JSON form."""
        text = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode()).hexdigest()


class ConfigError(ValueError):
    """Invalid experiment configuration."""


_FIELDS = {f.name: f for f in dataclasses.fields(ExperimentConfig)}
_INT_KEYS = {"seed", "d", "D", "hidden_layers", "n_paths", "n_nets", "probe_points", "n_samples", "burn_in", "thin",
             "image_size"}
_FLOAT_KEYS = {"amplitude", "lengthscale", "alpha", "period", "mean_slope", "S", "x_half", "sigma_w", "sigma_b",
               "sigma_w0", "sigma_b0", "sigma_w1", "noise_sd", "extrapolate", "mask_half_width"}
_POSITIVE = {"amplitude", "lengthscale", "alpha", "period", "S", "x_half", "sigma_w", "sigma_b", "sigma_w0",
             "sigma_b0", "sigma_w1", "noise_sd", "D", "n_paths", "n_samples", "thin", "image_size", "d", "hidden_layers"}
_CHOICES = {
    "experiment": EXPERIMENTS,
    "preset": tuple(PRESETS),
    "kernel": KERNELS,
    "mean": ("zero", "linear"),
    "activation": ("tanh", "relu", "gaussian"),
    "prior": ("ridgelet", "iid", "both"),
}


def _int(key, value):
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    return value


def _float(key, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    return float(value)


def _int_list(key, value):
    if isinstance(value, int) and not isinstance(value, bool):
        value = [value]
    if not isinstance(value, list) or not value:
        raise ConfigError(f"{key}: expected a non-empty list of integers")
    return [_int(key, v) for v in value]


def _validate(key: str, value):
    if key in _INT_KEYS:
        value = _int(key, value)
    elif key in _FLOAT_KEYS:
        value = None if (key == "sigma_w1" and value is None) else _float(key, value)
    elif key in ("N", "seeds"):
        value = _int_list(key, value)
    elif key == "bandwidths":
        if not isinstance(value, list) or not all(isinstance(p, list) and len(p) == 2 for p in value):
            raise ConfigError("bandwidths: expected a list of [sigma_w, sigma_b] pairs")
        value = [[_float(key, a), _float(key, b)] for a, b in value]
    elif key == "schedule":
        if not isinstance(value, list) or not all(isinstance(p, list) and len(p) in (3, 4) for p in value):
            raise ConfigError("schedule: expected a list of [sigma_w, sigma_b, N] or [sigma_w, sigma_b, N, D] rows")
        value = [[_float(key, r[0]), _float(key, r[1])] + [_int(key, v) for v in r[2:]] for r in value]
    elif key == "x_columns":
        if isinstance(value, str):
            value = [value]
        if not isinstance(value, list) or not value or not all(isinstance(v, str) for v in value):
            raise ConfigError("x_columns: expected a list of column names")
    elif key in ("dataset", "y_column") or key in _CHOICES:
        if value is not None and not isinstance(value, str):
            raise ConfigError(f"{key}: expected a string, got {value!r}")
    if key in _CHOICES and value not in _CHOICES[key]:
        raise ConfigError(f"{key}: {value!r} is not one of {', '.join(_CHOICES[key])}")
    if key in _POSITIVE and value is not None and not value > 0:
        raise ConfigError(f"{key}: must be positive, got {value!r}")
    return value


def config_from_mapping(mapping: dict | None) -> ExperimentConfig:
    """Validate a flat mapping, apply its preset, and build the config."""
    mapping = dict(mapping or {})
    unknown = sorted(set(mapping) - set(_FIELDS))
    if unknown:
        raise ConfigError(f"unknown config key(s): {', '.join(unknown)}")
    preset = _validate("preset", mapping.get("preset", "prior-1d"))
    merged = {**PRESETS[preset], **mapping}
    values = {k: _validate(k, v) for k, v in merged.items()}
    cfg = ExperimentConfig(**values)
    if min(cfg.N) < 1 or min(cfg.seeds) < 0:
        raise ConfigError("N entries must be positive and seeds non-negative")
    if cfg.d not in (1, 2, 3):
        raise ConfigError("d: must be 1, 2 or 3")
    if cfg.kernel == "periodic" and cfg.d != 1:
        raise ConfigError("kernel periodic requires d = 1")
    if cfg.kernel == "inpaint" and cfg.d != 2:
        raise ConfigError("kernel inpaint requires d = 2")
    if cfg.S < cfg.x_half:
        raise ConfigError("S must be at least x_half")
    if cfg.burn_in < 0 or cfg.burn_in >= cfg.n_samples:
        raise ConfigError("burn_in must lie in [0, n_samples)")
    if cfg.D < 2:
        raise ConfigError("D: need at least 2 grid points per axis")
    return cfg


def read_mapping(path: str | Path) -> dict:
    """Read a YAML file holding a flat mapping (an empty file is an empty mapping)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a mapping at top level")
    return dict(data or {})


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Config from a YAML file, with keyword overrides applied before validation."""
    return config_from_mapping({**read_mapping(path), **overrides})
