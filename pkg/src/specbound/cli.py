"""Command line front-end.

Subcommands:

* ``run``       execute a JSON scenario configuration, write report.json /
                report.csv plus per-scenario radial CSV dumps
* ``constant``  print the closed-form power-law bound constant as JSON
* ``eigen``     print the first Dirichlet eigenvalue of a geodesic ball
* ``torsion``   print a single torsion-bound report row

Models and profiles are referenced by name from a config file, or given
inline: ``euclidean:N``, ``hyperbolic:N[:KAPPA]`` for models and
``power:N[:D]``, ``model``, ``tabulated:CSVPATH`` for profiles.

The environment variable SPECBOUND_TOL overrides the global relative
tolerance (default 1e-8). Exit codes: 0 success / all satisfied, 1 violated,
2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import runner
from .bounds import hadamard_constant, torsion_bound_check
from .config import DEFAULT_TOLERANCE, parse_config
from .errors import ConfigError, SpecboundError
from .geometry import WarpingModel
from .isoperimetry import (AifEvaluator, ModelProfile, PowerLawProfile,
                           TabulatedProfile)
from .radial import principal_dirichlet_eigenvalue
from .runner import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_VIOLATION


def _global_tolerance() -> float:
    raw = os.environ.get("SPECBOUND_TOL")
    if raw is None:
        return DEFAULT_TOLERANCE
    try:
        value = float(raw)
    except ValueError as exc:
        raise ConfigError(f"SPECBOUND_TOL is not a number: {raw!r}") from exc
    if value <= 0:
        raise ConfigError(f"SPECBOUND_TOL must be positive, got {raw}")
    return value


def _parse_model_spec(spec: str) -> WarpingModel:
    parts = spec.split(":")
    kind = parts[0]
    try:
        if kind == "euclidean" and len(parts) == 2:
            return WarpingModel.euclidean(int(parts[1]))
        if kind == "hyperbolic" and len(parts) in (2, 3):
            kappa = float(parts[2]) if len(parts) == 3 else 1.0
            return WarpingModel.hyperbolic(int(parts[1]), kappa)
    except ValueError as exc:
        raise ConfigError(f"malformed model spec {spec!r}: {exc}") from exc
    raise ConfigError(
        f"cannot parse model spec {spec!r} (expected euclidean:N or "
        "hyperbolic:N[:KAPPA]; jacobi models need a config file)")


def _parse_profile_spec(spec: str, model: WarpingModel):
    parts = spec.split(":")
    try:
        if parts[0] == "power" and len(parts) in (2, 3):
            D = float(parts[2]) if len(parts) == 3 else None
            return PowerLawProfile(int(parts[1]), D)
        if parts[0] == "model" and len(parts) == 1:
            return ModelProfile(model)
        if parts[0] == "tabulated" and len(parts) >= 2:
            return TabulatedProfile.from_csv(":".join(parts[1:]))
    except ValueError as exc:
        raise ConfigError(f"malformed profile spec {spec!r}: {exc}") from exc
    raise ConfigError(
        f"cannot parse profile spec {spec!r} (expected power:N[:D], model, "
        "or tabulated:CSVPATH)")


def _resolve_model(args, tolerance):
    if args.config:
        config = parse_config(args.config)
        config.tolerance = tolerance
        if args.model not in config.models:
            raise ConfigError(f"model '{args.model}' not declared in {args.config}")
        return config, config.models[args.model]
    return None, _parse_model_spec(args.model)


def _emit_json(payload: dict) -> None:
    print(runner._json_emit(payload))


def _cmd_run(args) -> int:
    config = parse_config(args.config)
    config.tolerance = _global_tolerance() if "SPECBOUND_TOL" in os.environ \
        else (config.tolerance or DEFAULT_TOLERANCE)
    return runner.run(config, out_dir=args.out, jobs=args.jobs,
                      constant_scale=args.constant_scale)


def _cmd_constant(args) -> int:
    value = hadamard_constant(args.lam, args.p, args.dim, args.D)
    _emit_json({"lambda": args.lam, "p": args.p, "dimension": args.dim,
                "D": args.D, "constant": value})
    return EXIT_OK


def _cmd_eigen(args) -> int:
    tolerance = _global_tolerance()
    _, model = _resolve_model(args, tolerance)
    lam1 = principal_dirichlet_eigenvalue(model, args.radius, tolerance)
    _emit_json({"model": args.model, "radius": args.radius, "lambda1": lam1})
    return EXIT_OK


def _cmd_torsion(args) -> int:
    tolerance = _global_tolerance()
    config, model = _resolve_model(args, tolerance)
    if config is not None:
        if args.profile not in config.profiles:
            raise ConfigError(f"profile '{args.profile}' not declared in {args.config}")
        profile = config.profiles[args.profile]
    else:
        profile = _parse_profile_spec(args.profile, model)
    report = torsion_bound_check(model, args.radius, profile,
                                 AifEvaluator(profile), scenario="torsion-cli")
    _emit_json(runner.report_row(report))
    return EXIT_OK if report.satisfied else EXIT_VIOLATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specbound",
        description="Verify sup-norm eigenfunction bounds derived from "
                    "isoperimetric data on rotationally symmetric models.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario configuration")
    p_run.add_argument("--config", required=True, help="JSON configuration path")
    p_run.add_argument("--out", default=None, help="output directory")
    p_run.add_argument("--jobs", type=int, default=None,
                       help="parallel scenario workers")
    p_run.add_argument("--constant-scale", type=float, default=1.0,
                       help="fault-injection multiplier on the bound constant "
                            "(testing only)")
    p_run.set_defaults(func=_cmd_run)

    p_const = sub.add_parser("constant",
                             help="closed-form power-law bound constant")
    p_const.add_argument("--lambda", dest="lam", type=float, required=True)
    p_const.add_argument("--p", type=float, required=True)
    p_const.add_argument("--dim", type=int, required=True)
    p_const.add_argument("--D", type=float, required=True)
    p_const.set_defaults(func=_cmd_constant)

    p_eigen = sub.add_parser("eigen",
                             help="first Dirichlet eigenvalue of a geodesic ball")
    p_eigen.add_argument("--model", required=True)
    p_eigen.add_argument("--radius", type=float, required=True)
    p_eigen.add_argument("--config", default=None,
                         help="resolve --model by name from this config")
    p_eigen.set_defaults(func=_cmd_eigen)

    p_tor = sub.add_parser("torsion", help="single torsion-bound report row")
    p_tor.add_argument("--model", required=True)
    p_tor.add_argument("--radius", type=float, required=True)
    p_tor.add_argument("--profile", required=True)
    p_tor.add_argument("--config", default=None,
                       help="resolve names from this config")
    p_tor.set_defaults(func=_cmd_torsion)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SpecboundError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
