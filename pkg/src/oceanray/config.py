"""Run configuration: schema, validation, and profile construction.

The configuration is a YAML file of nested sections.  Unknown keys anywhere
are errors (typo safety), tolerances must be positive, and the parsed
configuration round-trips losslessly through :meth:`RunConfig.to_dict` for
the metadata sidecars.  Profiles are described by kind plus parameters so
worker processes can rebuild them without pickling closures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from .errors import ConfigError
from .profiles import (
    Profiles,
    make_betaplane,
    make_bump,
    make_signed_zonal,
    make_zero_zonal,
)

__all__ = ["RunConfig", "load_config", "build_profiles", "grid_values", "number_field", "integer_field"]

_NUMBER = (int, float)


def _require_keys(section: dict, allowed: dict, path: str):
    for key in section:
        if key not in allowed:
            raise ConfigError(f"unknown key {path}.{key!r}")


def number_field(section: dict, key: str, path: str, default=None, positive=False):
    if key not in section or section[key] is None:
        if default is None:
            raise ConfigError(f"missing required number {path}.{key}")
        return float(default)
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, _NUMBER):
        raise ConfigError(f"{path}.{key} must be a number, got {v!r}")
    v = float(v)
    if positive and not v > 0:
        raise ConfigError(f"{path}.{key} must be positive, got {v}")
    return v


def integer_field(section: dict, key: str, path: str, default=None, minimum=None):
    if key not in section or section[key] is None:
        if default is None:
            raise ConfigError(f"missing required integer {path}.{key}")
        return int(default)
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{path}.{key} must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(f"{path}.{key} must be >= {minimum}, got {v}")
    return v


def grid_values(spec: Any, path: str) -> List[float]:
    """A grid is either an explicit list of numbers or {start, stop, count}."""
    if isinstance(spec, list):
        if not spec:
            raise ConfigError(f"{path} must not be empty")
        out = []
        for v in spec:
            if isinstance(v, bool) or not isinstance(v, _NUMBER):
                raise ConfigError(f"{path} entries must be numbers, got {v!r}")
            out.append(float(v))
        return out
    if isinstance(spec, dict):
        _require_keys(spec, {"start": 1, "stop": 1, "count": 1}, path)
        start = number_field(spec, "start", path)
        stop = number_field(spec, "stop", path)
        count = integer_field(spec, "count", path, minimum=1)
        return [float(v) for v in np.linspace(start, stop, count)]
    raise ConfigError(f"{path} must be a list or a start/stop/count mapping")


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration; ``raw`` is the normalized echo."""

    zonal: Dict[str, Any]
    coriolis: Dict[str, Any]
    rtol: float
    atol: float
    xi2_cap: float
    quad_rtol: float
    tol_sigma: float
    tol_degenerate: float
    trapped_tol: float
    out_dir: str
    threads: int
    seed: int
    sections: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        d = {
            "profiles": {"zonal": dict(self.zonal), "coriolis": dict(self.coriolis)},
            "integrator": {"rtol": self.rtol, "atol": self.atol, "xi2_cap": self.xi2_cap},
            "quadrature": {"rtol": self.quad_rtol},
            "classification": {
                "tol_sigma": self.tol_sigma,
                "tol_degenerate": self.tol_degenerate,
            },
            "trapping": {"trapped_tol": self.trapped_tol},
            "run": {"out_dir": self.out_dir, "threads": self.threads, "seed": self.seed},
        }
        d.update(self.sections)
        return d


_TOP_KEYS = {
    "profiles": 1,
    "integrator": 1,
    "quadrature": 1,
    "classification": 1,
    "trapping": 1,
    "run": 1,
    "trace": 1,
    "classify": 1,
    "scan": 1,
    "critper": 1,
    "surface": 1,
    "eigs": 1,
    "dispersion": 1,
    "modes": 1,
    "lambda_sing": 1,
    "lambda_per": 1,
    "transport": 1,
}


def _parse_zonal(section: dict) -> Dict[str, Any]:
    kinds = {
        "zero": {"kind"},
        "bump": {"kind", "center", "halfwidth", "amplitude"},
        "signed": {"kind", "scale", "halfwidth"},
    }
    kind = section.get("kind")
    if kind not in kinds:
        raise ConfigError(f"profiles.zonal.kind must be one of {sorted(kinds)}, got {kind!r}")
    _require_keys(section, {k: 1 for k in kinds[kind]}, "profiles.zonal")
    out = {"kind": kind}
    if kind == "bump":
        out["center"] = number_field(section, "center", "profiles.zonal", default=0.0)
        out["halfwidth"] = number_field(section, "halfwidth", "profiles.zonal", positive=True)
        out["amplitude"] = number_field(section, "amplitude", "profiles.zonal")
    elif kind == "signed":
        out["scale"] = number_field(section, "scale", "profiles.zonal")
        out["halfwidth"] = number_field(section, "halfwidth", "profiles.zonal", positive=True)
        if out["scale"] == 0:
            raise ConfigError("profiles.zonal.scale must be nonzero")
    return out


def _parse_coriolis(section: dict) -> Dict[str, Any]:
    kind = section.get("kind")
    if kind != "betaplane":
        raise ConfigError(f"profiles.coriolis.kind must be 'betaplane', got {kind!r}")
    _require_keys(section, {"kind": 1, "beta": 1}, "profiles.coriolis")
    beta = number_field(section, "beta", "profiles.coriolis", default=1.0)
    if beta == 0:
        raise ConfigError("profiles.coriolis.beta must be nonzero")
    return {"kind": kind, "beta": beta}


def load_config(path: str, overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Parse and validate a YAML run configuration.

    ``overrides`` may replace out_dir, threads, and seed (the command-line
    flags and their environment mirrors take precedence over the file).
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping of sections")
    _require_keys(doc, _TOP_KEYS, "config")

    profiles = doc.get("profiles")
    if not isinstance(profiles, dict):
        raise ConfigError("config needs a profiles section")
    _require_keys(profiles, {"zonal": 1, "coriolis": 1}, "profiles")
    if "zonal" not in profiles or "coriolis" not in profiles:
        raise ConfigError("profiles needs zonal and coriolis subsections")
    zonal = _parse_zonal(profiles["zonal"] or {})
    coriolis = _parse_coriolis(profiles["coriolis"] or {})

    integ = doc.get("integrator") or {}
    _require_keys(integ, {"rtol": 1, "atol": 1, "xi2_cap": 1}, "integrator")
    quad = doc.get("quadrature") or {}
    _require_keys(quad, {"rtol": 1}, "quadrature")
    cls = doc.get("classification") or {}
    _require_keys(cls, {"tol_sigma": 1, "tol_degenerate": 1}, "classification")
    trap = doc.get("trapping") or {}
    _require_keys(trap, {"trapped_tol": 1}, "trapping")
    run = doc.get("run") or {}
    _require_keys(run, {"out_dir": 1, "threads": 1, "seed": 1}, "run")

    out_dir = run.get("out_dir", "out")
    if not isinstance(out_dir, str) or not out_dir:
        raise ConfigError("run.out_dir must be a nonempty string")
    threads = integer_field(run, "threads", "run", default=1, minimum=1)
    seed = integer_field(run, "seed", "run", default=0, minimum=0)

    overrides = overrides or {}
    if overrides.get("out_dir") is not None:
        out_dir = str(overrides["out_dir"])
    if overrides.get("threads") is not None:
        threads = int(overrides["threads"])
        if threads < 1:
            raise ConfigError("--threads must be >= 1")
    if overrides.get("seed") is not None:
        seed = int(overrides["seed"])
        if seed < 0:
            raise ConfigError("--seed must be >= 0")

    sections = {
        k: doc[k]
        for k in doc
        if k
        not in ("profiles", "integrator", "quadrature", "classification", "trapping", "run")
    }

    return RunConfig(
        zonal=zonal,
        coriolis=coriolis,
        rtol=number_field(integ, "rtol", "integrator", default=1e-10, positive=True),
        atol=number_field(integ, "atol", "integrator", default=1e-10, positive=True),
        xi2_cap=number_field(integ, "xi2_cap", "integrator", default=1e6, positive=True),
        quad_rtol=number_field(quad, "rtol", "quadrature", default=1e-9, positive=True),
        tol_sigma=number_field(cls, "tol_sigma", "classification", default=1e-6, positive=True),
        tol_degenerate=number_field(
            cls, "tol_degenerate", "classification", default=1e-8, positive=True
        ),
        trapped_tol=number_field(trap, "trapped_tol", "trapping", default=1e-6, positive=True),
        out_dir=out_dir,
        threads=threads,
        seed=seed,
        sections=sections,
    )


def build_profiles(zonal_spec: Dict[str, Any], coriolis_spec: Dict[str, Any]) -> Profiles:
    """Construct evaluator profiles from their plain-dict descriptions."""
    kind = zonal_spec["kind"]
    if kind == "zero":
        zonal = make_zero_zonal()
    elif kind == "bump":
        zonal = make_bump(
            zonal_spec["center"], zonal_spec["halfwidth"], zonal_spec["amplitude"]
        )
    elif kind == "signed":
        zonal = make_signed_zonal(zonal_spec["scale"], zonal_spec["halfwidth"])
    else:
        raise ConfigError(f"unknown zonal kind {kind!r}")
    coriolis = make_betaplane(coriolis_spec["beta"])
    return Profiles(zonal, coriolis)
