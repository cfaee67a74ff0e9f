"""Experiment configuration files.

A configuration is a flat key/value file in TOML syntax (or the equivalent
JSON object).  Keys common to every experiment::

    experiment         correlator | transport | plr | number | kappa-fit | beta-vs-lambda
    n                  chain length (required)
    lambda             disorder strength > 0 (required)
    halfwidth          support of the uniform single-site law      [1.0]
    envelope_exponent  decay exponent of the field envelope       [0.5]
    master_seed        unsigned 64-bit ensemble seed               [0]
    samples            number of disorder realizations             [100]
    output             stem of the output files                    [experiment name]

Experiment-specific keys and their defaults are listed in ``EXPERIMENT_KEYS``.
A JSON sidecar written next to a CSV is itself a valid configuration: its
``provenance`` entry is ignored on load.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .disorder import DisorderConfig, UniformSymmetric
from .errors import ConfigurationError

EXPERIMENTS = ("correlator", "transport", "plr", "number", "kappa-fit", "beta-vs-lambda")

COMMON_DEFAULTS = {
    "halfwidth": 1.0,
    "envelope_exponent": 0.5,
    "master_seed": 0,
    "samples": 100,
}

_TIME_GRID = {"t_min": 1.0, "t_max": 80.0, "num_t": 32, "window": None, "p": 2.0}

EXPERIMENT_KEYS = {
    "correlator": {"j": 1, "k_list": None},
    "kappa-fit": {"j": 1, "k_list": None},
    "transport": dict(_TIME_GRID),
    "beta-vs-lambda": dict(_TIME_GRID, lambda_list=None),
    "plr": {"a": 0.5, "b": 2.0, "t_min": 1.0, "t_ratio": math.sqrt(2.0), "t_cuts": [25.0, 50.0], "k_max": None},
    "number": {"wall": None, "eta": None, "sites": None, "t_max": 10.0, "num_t": 21},
}

RESERVED = ("provenance",)


@dataclass
class ExperimentSpec:
    experiment: str
    disorder: DisorderConfig
    samples: int
    params: dict = field(default_factory=dict)
    output: str = ""

    def resolved(self) -> dict:
        """Flat dict with every default filled in; valid input to :func:`parse_spec`."""
        out = {
            "experiment": self.experiment,
            "n": self.disorder.n,
            "lambda": self.disorder.lam,
            "halfwidth": self.disorder.distribution.halfwidth,
            "envelope_exponent": self.disorder.envelope_exponent,
            "master_seed": self.disorder.master_seed,
            "samples": self.samples,
            "output": self.output,
        }
        out.update(self.params)
        return out


def _line_of(text: str | None, key: str) -> str:
    if not text:
        return ""
    pattern = re.compile(rf'^\s*"?{re.escape(key)}"?\s*[=:]', re.M)
    for lineno, line in enumerate(text.splitlines(), 1):
        if pattern.match(line):
            return f" (line {lineno})"
    return ""


def _as_int(data, key, text, minimum=None):
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise ConfigurationError(f"key {key!r}{_line_of(text, key)}: expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigurationError(f"key {key!r}{_line_of(text, key)}: must be >= {minimum}, got {value}")
    return value


def _as_float(data, key, text):
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"key {key!r}{_line_of(text, key)}: expected a number, got {value!r}")
    return float(value)


def _as_list(data, key, text, kind=float):
    value = data[key]
    if not isinstance(value, list) or not value:
        raise ConfigurationError(f"key {key!r}{_line_of(text, key)}: expected a non-empty list")
    out = []
    for v in value:
        numeric = isinstance(v, (int, float)) and not isinstance(v, bool)
        if kind is int and numeric and float(v).is_integer():
            out.append(int(v))
        elif kind is float and numeric:
            out.append(float(v))
        else:
            raise ConfigurationError(f"key {key!r}{_line_of(text, key)}: bad list entry {v!r}")
    return out


def transport_times(params) -> np.ndarray:
    """Geometric time grid of the transport-type experiments."""
    return np.geomspace(params["t_min"], params["t_max"], params["num_t"])


def default_k_list(n: int) -> list[int]:
    from .ensemble import geometric_sites

    return geometric_sites(8, max(8, n // 2)) if n >= 16 else list(range(2, n + 1))


def parse_spec(data: dict, experiment: str | None = None, text: str | None = None) -> ExperimentSpec:
    """Validate a raw key/value mapping and resolve defaults."""
    data = {k: v for k, v in data.items() if k not in RESERVED}
    exp = data.get("experiment", experiment)
    if exp is None:
        raise ConfigurationError("missing required key 'experiment'")
    if experiment is not None and exp != experiment:
        raise ConfigurationError(
            f"key 'experiment'{_line_of(text, 'experiment')}: file says {exp!r} but command is {experiment!r}"
        )
    if exp not in EXPERIMENTS:
        raise ConfigurationError(f"key 'experiment'{_line_of(text, 'experiment')}: unknown experiment {exp!r}")
    specific = EXPERIMENT_KEYS[exp]
    allowed = {"experiment", "n", "lambda", "output", *COMMON_DEFAULTS, *specific}
    for key in data:
        if key not in allowed:
            raise ConfigurationError(f"unknown key {key!r}{_line_of(text, key)} for experiment {exp!r}")
    for key in ("n", "lambda"):
        if key not in data:
            raise ConfigurationError(f"missing required key {key!r}")
    merged = {**COMMON_DEFAULTS, **specific, **data}

    n = _as_int(merged, "n", text, minimum=1)
    lam = _as_float(merged, "lambda", text)
    samples = _as_int(merged, "samples", text, minimum=1)
    master_seed = _as_int(merged, "master_seed", text, minimum=0)
    disorder = DisorderConfig(
        n=n,
        lam=lam,
        envelope_exponent=_as_float(merged, "envelope_exponent", text),
        distribution=UniformSymmetric(_as_float(merged, "halfwidth", text)),
        master_seed=master_seed,
    )

    params = _resolve_params(exp, merged, n, text)
    output = merged.get("output") or exp
    if not isinstance(output, str) or "/" in output or "\\" in output:
        raise ConfigurationError(f"key 'output'{_line_of(text, 'output')}: must be a plain file stem")
    return ExperimentSpec(exp, disorder, samples, params, output)


def _check_sites(sites, n, key, text):
    for k in sites:
        if not 1 <= k <= n:
            raise ConfigurationError(f"key {key!r}{_line_of(text, key)}: site {k} outside 1..{n}")


def _resolve_params(exp, merged, n, text):
    p = {}
    if exp in ("correlator", "kappa-fit"):
        p["j"] = _as_int(merged, "j", text, minimum=1)
        k_list = default_k_list(n) if merged["k_list"] is None else _as_list(merged, "k_list", text, int)
        _check_sites([p["j"], *k_list], n, "k_list", text)
        if any(b <= a for a, b in zip(k_list, k_list[1:])):
            raise ConfigurationError(f"key 'k_list'{_line_of(text, 'k_list')}: must be strictly ascending")
        if k_list[0] <= p["j"]:
            raise ConfigurationError(f"key 'k_list'{_line_of(text, 'k_list')}: entries must exceed j={p['j']}")
        if exp == "kappa-fit" and len(k_list) < 6:
            raise ConfigurationError(f"key 'k_list'{_line_of(text, 'k_list')}: kappa-fit needs at least 6 sites")
        p["k_list"] = k_list
    elif exp in ("transport", "beta-vs-lambda"):
        p["p"] = _as_float(merged, "p", text)
        if not p["p"] > 0:
            raise ConfigurationError(f"key 'p'{_line_of(text, 'p')}: must be > 0")
        p["t_min"] = _as_float(merged, "t_min", text)
        p["t_max"] = _as_float(merged, "t_max", text)
        p["num_t"] = _as_int(merged, "num_t", text, minimum=2)
        if not 0 < p["t_min"] < p["t_max"]:
            raise ConfigurationError(f"key 't_max'{_line_of(text, 't_max')}: need 0 < t_min < t_max")
        window = [p["t_max"] / 4.0, p["t_max"]] if merged["window"] is None else _as_list(merged, "window", text)
        if len(window) != 2 or not p["t_min"] <= window[0] < window[1] <= p["t_max"]:
            raise ConfigurationError(f"key 'window'{_line_of(text, 'window')}: must be [lo, hi] inside [t_min, t_max]")
        grid = transport_times(p)
        inside = int(np.sum((grid >= window[0]) & (grid <= window[1])))
        if inside < 8:
            raise ConfigurationError(
                f"key 'window'{_line_of(text, 'window')}: only {inside} of num_t={p['num_t']} times fall inside; need 8"
            )
        p["window"] = window
        if exp == "beta-vs-lambda":
            if merged["lambda_list"] is None:
                raise ConfigurationError("missing required key 'lambda_list'")
            lams = _as_list(merged, "lambda_list", text)
            if any(lam < 0 for lam in lams):
                raise ConfigurationError(f"key 'lambda_list'{_line_of(text, 'lambda_list')}: entries must be >= 0")
            p["lambda_list"] = lams
    elif exp == "plr":
        p["a"] = _as_float(merged, "a", text)
        p["b"] = _as_float(merged, "b", text)
        if not (0 <= p["a"] <= 1 and p["b"] > 0):
            raise ConfigurationError(f"key 'a'{_line_of(text, 'a')}: need 0 <= a <= 1 and b > 0")
        p["t_min"] = _as_float(merged, "t_min", text)
        p["t_ratio"] = _as_float(merged, "t_ratio", text)
        cuts = _as_list(merged, "t_cuts", text)
        if any(b <= a for a, b in zip(cuts, cuts[1:])) or cuts[0] < p["t_min"] or not p["t_ratio"] > 1:
            raise ConfigurationError(f"key 't_cuts'{_line_of(text, 't_cuts')}: must ascend from t_min; t_ratio > 1")
        p["t_cuts"] = cuts
        k_max = max(2, n // 2) if merged["k_max"] is None else _as_int(merged, "k_max", text, minimum=2)
        _check_sites([k_max], n, "k_max", text)
        p["k_max"] = k_max
    elif exp == "number":
        if merged["eta"] is not None and merged["wall"] is not None:
            raise ConfigurationError("keys 'eta' and 'wall' are mutually exclusive")
        if merged["eta"] is not None:
            eta = _as_list(merged, "eta", text)
            if len(eta) != n or any(not 0 <= e <= 1 for e in eta):
                raise ConfigurationError(f"key 'eta'{_line_of(text, 'eta')}: need n values in [0, 1]")
            p["eta"] = eta
            p["wall"] = None
        else:
            wall = n // 2 if merged["wall"] is None else _as_int(merged, "wall", text, minimum=0)
            if wall > n:
                raise ConfigurationError(f"key 'wall'{_line_of(text, 'wall')}: must be <= n")
            p["wall"] = wall
            p["eta"] = None
        if merged["sites"] is None:
            sites = list(range(1, max(1, (p["wall"] or n // 2) // 2) + 1))
        else:
            sites = _as_list(merged, "sites", text, int)
        _check_sites(sites, n, "sites", text)
        if len(set(sites)) != len(sites):
            raise ConfigurationError(f"key 'sites'{_line_of(text, 'sites')}: duplicate site")
        p["sites"] = sites
        p["t_max"] = _as_float(merged, "t_max", text)
        if not p["t_max"] > 0:
            raise ConfigurationError(f"key 't_max'{_line_of(text, 't_max')}: must be > 0")
        p["num_t"] = _as_int(merged, "num_t", text, minimum=2)
    return p


def load_spec(path, experiment: str | None = None) -> ExperimentSpec:
    """Read and validate a TOML or JSON configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from None
    if path.suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: line {exc.lineno}: {exc.msg}") from None
        if not isinstance(data, dict):
            raise ConfigurationError(f"{path}: expected a JSON object")
    else:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigurationError(f"{path}: {exc}") from None
    return parse_spec(data, experiment, text)
