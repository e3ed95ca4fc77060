"""Run configuration: versioned JSON schema, strict validation.

A configuration declares named models and profiles and a list of scenarios
referencing them. Validation is strict: unknown keys are rejected, every
reference must resolve, and schema violations name the offending field.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from .errors import ConfigError
from .geometry import WarpingModel
from .isoperimetry import ModelProfile, PowerLawProfile, TabulatedProfile

SCHEMA_VERSION = 1
DEFAULT_TOLERANCE = 1e-8

CHECKS = ("linfty_bound", "torsion_bound", "lp_lower_bound", "energy_identity")
_PROFILE_CHECKS = ("linfty_bound", "torsion_bound", "lp_lower_bound")


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    check: str
    model: str
    profile: str | None
    params: dict = field(default_factory=dict)


@dataclass
class RunConfig:
    models: dict
    profiles: dict
    scenarios: list
    tolerance: float = DEFAULT_TOLERANCE
    jobs: int = 1
    output_dir: str | None = None


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _check_keys(obj, path, required, optional=()):
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", path)
    unknown = set(obj) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", path)
    for key in required:
        if key not in obj:
            raise ConfigError(f"missing required key '{key}'", path)


def _get_number(obj, key, path, positive=False, nonnegative=False):
    v = obj[key]
    if not _is_number(v):
        raise ConfigError("must be a finite number", f"{path}.{key}")
    if positive and v <= 0:
        raise ConfigError("must be positive", f"{path}.{key}")
    if nonnegative and v < 0:
        raise ConfigError("must be nonnegative", f"{path}.{key}")
    return float(v)


def _get_name(obj, path, seen, what):
    name = obj.get("name")
    if not isinstance(name, str) or not name:
        raise ConfigError("must carry a nonempty string 'name'", path)
    if name in seen:
        raise ConfigError(f"duplicate {what} name '{name}'", path)
    return name


def _curvature_from_spec(spec, path):
    _check_keys(spec, path, ("type",), ("value", "coefficients"))
    kind = spec["type"]
    if kind == "constant":
        if "value" not in spec:
            raise ConfigError("constant curvature needs 'value'", path)
        value = _get_number(spec, "value", path)
        if value > 0:
            raise ConfigError("radial curvature must be <= 0", f"{path}.value")
        return lambda r, v=value: v
    if kind == "polynomial":
        coeffs = spec.get("coefficients")
        if not isinstance(coeffs, list) or not coeffs or \
                not all(_is_number(c) for c in coeffs):
            raise ConfigError("polynomial curvature needs a nonempty "
                              "'coefficients' number list", path)
        cs = [float(c) for c in coeffs]
        if cs[0] > 0:
            raise ConfigError("radial curvature must be <= 0 at r = 0", path)

        def poly(r, cs=tuple(cs)):
            acc = 0.0
            for c in reversed(cs):
                acc = acc * r + c
            return acc

        return poly
    raise ConfigError(f"unknown curvature type '{kind}'", f"{path}.type")


def _parse_model(entry, path, seen):
    name = _get_name(entry, path, seen, "model")
    kind = entry.get("kind")
    if kind == "euclidean":
        _check_keys(entry, path, ("name", "kind", "dimension"))
    elif kind == "hyperbolic":
        _check_keys(entry, path, ("name", "kind", "dimension"), ("curvature",))
    elif kind == "jacobi":
        _check_keys(entry, path, ("name", "kind", "dimension", "curvature_profile"),
                    ("grid_resolution",))
    else:
        raise ConfigError(f"unknown model kind '{kind}'", f"{path}.kind")
    dim = entry["dimension"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 2:
        raise ConfigError("must be an integer >= 2", f"{path}.dimension")
    if kind == "euclidean":
        return name, WarpingModel.euclidean(dim)
    if kind == "hyperbolic":
        kappa = _get_number(entry, "curvature", path, positive=True) \
            if "curvature" in entry else 1.0
        return name, WarpingModel.hyperbolic(dim, kappa)
    curvature = _curvature_from_spec(entry["curvature_profile"],
                                     f"{path}.curvature_profile")
    resolution = _get_number(entry, "grid_resolution", path, positive=True) \
        if "grid_resolution" in entry else 0.1
    return name, WarpingModel.jacobi(dim, curvature, grid_resolution=resolution,
                                     label=f"jacobi:{dim}:{name}")


def _parse_profile(entry, path, seen, models, base_dir):
    name = _get_name(entry, path, seen, "profile")
    variant = entry.get("variant")
    if variant == "power_law":
        _check_keys(entry, path, ("name", "variant", "n"), ("D",))
        n = entry["n"]
        if not isinstance(n, int) or isinstance(n, bool) or n < 2:
            raise ConfigError("must be an integer >= 2", f"{path}.n")
        D = _get_number(entry, "D", path, positive=True) if "D" in entry else None
        if D is None and n != 2:
            raise ConfigError("power-law profiles with n >= 3 must supply D "
                              "(no dimensional default ships)", path)
        return name, PowerLawProfile(n, D)
    if variant == "model":
        _check_keys(entry, path, ("name", "variant", "model"))
        ref = entry["model"]
        if ref not in models:
            raise ConfigError(f"profile '{name}' references undeclared model "
                              f"'{ref}'", path)
        return name, ModelProfile(models[ref])
    if variant == "tabulated":
        _check_keys(entry, path, ("name", "variant", "csv"))
        csv_path = entry["csv"]
        if not isinstance(csv_path, str):
            raise ConfigError("must be a path string", f"{path}.csv")
        full = csv_path if os.path.isabs(csv_path) else os.path.join(base_dir, csv_path)
        if not os.path.exists(full):
            raise ConfigError(f"tabulated profile file not found: {full}", path)
        return name, TabulatedProfile.from_csv(full)
    raise ConfigError(f"unknown profile variant '{variant}'", f"{path}.variant")


def _parse_domain(entry, path):
    _check_keys(entry, path, ("type",), ("radius",))
    kind = entry["type"]
    if kind == "ball":
        if "radius" not in entry:
            raise ConfigError("ball domains need 'radius'", path)
        return {"domain_type": "ball",
                "radius": _get_number(entry, "radius", path, positive=True)}
    if kind == "whole_manifold":
        if "radius" in entry:
            raise ConfigError("whole-manifold domains take no radius", path)
        return {"domain_type": "whole_manifold"}
    raise ConfigError(f"unknown domain type '{kind}'", f"{path}.type")


def _parse_scenario(entry, path, seen, models, profiles):
    name = _get_name(entry, path, seen, "scenario")
    check = entry.get("check")
    if check not in CHECKS:
        raise ConfigError(f"unknown check '{check}' (expected one of {CHECKS})",
                          f"{path}.check")
    common = ("name", "check", "model")
    if check == "linfty_bound":
        _check_keys(entry, path, common + ("profile", "domain", "p"), ("lambda",))
    elif check == "torsion_bound":
        _check_keys(entry, path, common + ("profile", "radius"))
    elif check == "lp_lower_bound":
        _check_keys(entry, path, common + ("profile", "radius", "p"), ("gamma",))
    else:  # energy_identity
        _check_keys(entry, path, common + ("radius",))
    model_ref = entry["model"]
    if model_ref not in models:
        raise ConfigError(f"scenario '{name}' references undeclared model "
                          f"'{model_ref}'", path)
    profile_ref = None
    if check in _PROFILE_CHECKS:
        profile_ref = entry["profile"]
        if profile_ref not in profiles:
            raise ConfigError(f"scenario '{name}' references undeclared profile "
                              f"'{profile_ref}'", path)
    params = {}
    if "p" in entry:
        p = _get_number(entry, "p", path)
        if p < 2:
            raise ConfigError("sup-norm bound scenarios require p >= 2 "
                              f"(got {p:g})", f"{path}.p")
        params["p"] = p
    if "radius" in entry:
        params["radius"] = _get_number(entry, "radius", path, positive=True)
    if "gamma" in entry:
        params["gamma"] = _get_number(entry, "gamma", path, nonnegative=True)
    if "lambda" in entry:
        params["lambda"] = _get_number(entry, "lambda", path, positive=True)
    if "domain" in entry:
        params.update(_parse_domain(entry["domain"], f"{path}.domain"))
        if params["domain_type"] == "whole_manifold" and "lambda" not in params:
            raise ConfigError("whole-manifold scenarios must fix 'lambda'", path)
    return ScenarioSpec(name=name, check=check, model=model_ref,
                        profile=profile_ref, params=params)


def parse_config(path) -> RunConfig:
    """Load and validate a run configuration file."""
    if not os.path.exists(path):
        raise ConfigError(f"configuration file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON at line {exc.lineno} column "
                              f"{exc.colno}: {exc.msg}") from exc
    _check_keys(raw, "config",
                ("schema", "models", "scenarios"),
                ("profiles", "tolerance", "jobs", "output_dir"))
    if raw["schema"] != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {raw['schema']!r} "
                          f"(expected {SCHEMA_VERSION})", "config.schema")
    tolerance = DEFAULT_TOLERANCE
    if "tolerance" in raw:
        tolerance = _get_number(raw, "tolerance", "config", positive=True)
    jobs = 1
    if "jobs" in raw:
        jobs = raw["jobs"]
        if not isinstance(jobs, int) or isinstance(jobs, bool) or jobs < 1:
            raise ConfigError("must be an integer >= 1", "config.jobs")
    output_dir = raw.get("output_dir")
    if output_dir is not None and not isinstance(output_dir, str):
        raise ConfigError("must be a path string", "config.output_dir")

    base_dir = os.path.dirname(os.path.abspath(path))
    models, profiles, scenarios = {}, {}, []
    if not isinstance(raw["models"], list):
        raise ConfigError("must be a list", "config.models")
    for i, entry in enumerate(raw["models"]):
        name, model = _parse_model(entry, f"config.models[{i}]", models)
        models[name] = model
    for i, entry in enumerate(raw.get("profiles", [])):
        name, profile = _parse_profile(entry, f"config.profiles[{i}]",
                                       profiles, models, base_dir)
        profiles[name] = profile
    if not isinstance(raw["scenarios"], list) or not raw["scenarios"]:
        raise ConfigError("must be a nonempty list", "config.scenarios")
    seen = set()
    for i, entry in enumerate(raw["scenarios"]):
        spec = _parse_scenario(entry, f"config.scenarios[{i}]", seen,
                               models, profiles)
        seen.add(spec.name)
        scenarios.append(spec)
    return RunConfig(models=models, profiles=profiles, scenarios=scenarios,
                     tolerance=tolerance, jobs=jobs, output_dir=output_dir)
