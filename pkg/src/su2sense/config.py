"""Flat key-value configuration for the experiment scenarios.

Precedence: built-in defaults < config file from $SU2SENSE_CONFIG_DIR
(<scenario>.cfg) < explicit --config file < --set key=value overrides.
Unknown keys are rejected so typos fail loudly.
"""

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "SCENARIO_DEFAULTS",
    "parse_config_text",
    "load_scenario_config",
    "CONFIG_DIR_ENV",
]

CONFIG_DIR_ENV = "SU2SENSE_CONFIG_DIR"


class ConfigError(ValueError):
    """Bad configuration input (unknown key, unparseable value, bad range)."""


SCENARIO_DEFAULTS = {
    # photon-number sweep at fixed ft = dt
    "fig2a": {
        "two_j_min": 20,
        "two_j_max": 1200,
        "two_j_count": 28,
        "ft": 10.0,
        "dt": 10.0,
        "e_over_d": 0.01,
        "max_two_j": 1200,
    },
    # detuning sweep at fixed j, dt
    "fig2b": {
        "j": 500,
        "dt": 10.0,
        "e_over_d": 0.01,
        "f_over_d_min": 0.01,
        "f_over_d_max": 10.0,
        "f_count": 60,
    },
    # Dicke distributions, two sizes x {linear, nonlinear}
    "fig3": {
        "j_small": 100,
        "j_large": 500,
        "ft": 10.0,
        "dt": 10.0,
        "e_over_d": 0.01,
    },
    # Husimi function + distributions at strong nonlinearity
    "fig4": {
        "j": 20,
        "ft": 10.0,
        "dt": 10.0,
        "e_over_d": 0.2,
        "n_theta": 181,
        "n_phi": 181,
    },
    # microscopic-vs-effective dynamics validation
    "fig5": {
        "n": 20,
        "delta_over_g": 1.0,
        "omega_l_over_g": 1600.0,
        "omega_a_over_g": 2000.0,
        "gt_max": 2000.0,
        "t_count": 4000,
        "atom_population_max": 0.01,
        "trace_deviation_max": 0.05,
    },
    # generic sweep over photon number or f
    "sweep": {
        "axis": "photon_number",  # photon_number | f
        "axis_min": 20.0,
        "axis_max": 400.0,
        "axis_count": 10,
        "ft": 10.0,
        "dt": 10.0,
        "e_over_d": 0.0,
        "j": 50,
        "method": "generator",   # generator | fd
        "max_two_j": 1200,
    },
    # Sagnac splitting table over rotation rates
    "sagnac": {
        "n0": 1.44,
        "radius": 0.0011,
        "wavelength": 1.55e-6,
        "dn0_dlambda": 0.0,
        "omega_min": 1e-7,
        "omega_max": 1.0,
        "omega_count": 15,
    },
}


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    params: dict
    output_dir: Path
    jobs: int = 1

    def hash(self):
        canon = json.dumps(
            {"scenario": self.scenario, "params": self.params}, sort_keys=True
        )
        return hashlib.sha256(canon.encode()).hexdigest()


def _coerce(raw, like):
    if isinstance(like, bool):
        if raw.lower() in ("1", "true", "yes"):
            return True
        if raw.lower() in ("0", "false", "no"):
            return False
        raise ConfigError(f"expected boolean, got {raw!r}")
    if isinstance(like, int):
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"expected integer, got {raw!r}") from exc
    if isinstance(like, float):
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"expected number, got {raw!r}") from exc
    return raw


def parse_config_text(text):
    """Parse `key = value` lines; '#' starts a comment, blanks are skipped."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, value = stripped.partition("=")
        out[key.strip()] = value.strip()
    return out


def load_scenario_config(scenario, config_file=None, overrides=None,
                         output_dir=".", jobs=1):
    """Resolve the configuration for one scenario (see module docstring)."""
    if scenario not in SCENARIO_DEFAULTS:
        raise ConfigError(f"unknown scenario {scenario!r}")
    params = dict(SCENARIO_DEFAULTS[scenario])

    layers = []
    env_dir = os.environ.get(CONFIG_DIR_ENV)
    if env_dir:
        candidate = Path(env_dir) / f"{scenario}.cfg"
        if candidate.is_file():
            layers.append(parse_config_text(candidate.read_text()))
    if config_file is not None:
        path = Path(config_file)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        layers.append(parse_config_text(path.read_text()))
    if overrides:
        layers.append(dict(overrides))

    for layer in layers:
        for key, raw in layer.items():
            if key not in params:
                raise ConfigError(
                    f"unknown key {key!r} for scenario {scenario!r} "
                    f"(known: {', '.join(sorted(params))})"
                )
            params[key] = _coerce(str(raw), params[key])

    _validate(scenario, params)
    return ExperimentConfig(
        scenario=scenario, params=params, output_dir=Path(output_dir), jobs=int(jobs)
    )


def _validate(scenario, p):
    def positive(*names):
        for name in names:
            if p[name] <= 0:
                raise ConfigError(f"{name} must be positive")

    counts = [k for k in p if k.endswith("_count") or k in ("n_theta", "n_phi")]
    for k in counts:
        if p[k] < 1:
            raise ConfigError(f"{k} must be >= 1")
    if scenario == "fig2a":
        positive("two_j_min", "two_j_max", "ft", "dt")
        if p["two_j_max"] > p["max_two_j"]:
            raise ConfigError(
                f"two_j_max {p['two_j_max']} exceeds the memory budget "
                f"max_two_j = {p['max_two_j']}"
            )
        if p["two_j_min"] < 2:
            raise ConfigError("two_j_min must be at least 2 (integer j >= 1)")
    elif scenario == "fig2b":
        positive("j", "dt", "f_over_d_min", "f_over_d_max")
    elif scenario == "fig3":
        positive("j_small", "j_large", "ft", "dt")
    elif scenario == "fig4":
        positive("j", "ft", "dt")
    elif scenario == "fig5":
        positive("n", "omega_l_over_g", "omega_a_over_g", "gt_max")
    elif scenario == "sweep":
        if p["axis"] not in ("photon_number", "f"):
            raise ConfigError("axis must be photon_number or f")
        if p["method"] not in ("generator", "fd"):
            raise ConfigError("method must be generator or fd")
        positive("axis_min", "axis_max", "dt")
    elif scenario == "sagnac":
        positive("n0", "radius", "wavelength", "omega_min", "omega_max")
