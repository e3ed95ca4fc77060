"""Batch scenario execution with byte-deterministic reports.

Every number in the emitted artifacts is formatted at 12 significant digits
with a lowercase exponent, so repeated runs of the same configuration
produce identical bytes regardless of the parallelism degree. To keep the
values themselves order-independent:

* each scenario gets its own associated-integral evaluator (its internal
  cache then only ever sees a scenario-deterministic query sequence);
* lazily integrated Jacobi warpings are pre-extended to the largest radius
  any scenario can touch before workers start.
"""

from __future__ import annotations

import json
import os
import re
from concurrent.futures import ThreadPoolExecutor

from .bounds import (Ball, BoundScenario, VerificationReport, WholeManifold,
                     energy_identity_check, lp_lower_bound_check,
                     torsion_bound_check, verify_linfty_bound)
from .config import RunConfig, ScenarioSpec
from .errors import SpecboundError
from .isoperimetry import AifEvaluator
from .radial import solve_dirichlet_eigenpair

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3

_REPORT_COLUMNS = ("scenario", "check", "lhs", "rhs", "slack", "satisfied")


def fmt12(x: float) -> str:
    """12 significant digits, lowercase exponent, '.' decimal separator."""
    return f"{x:.11e}"


def _json_scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return fmt12(v)
    return json.dumps(v, ensure_ascii=False)


def _json_emit(value, indent=0) -> str:
    pad = "  " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = [f'{pad}  {json.dumps(str(k))}: {_json_emit(v, indent + 1)}'
                for k, v in value.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        rows = [f"{pad}  {_json_emit(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    return _json_scalar(value)


def _csv_quote(text: str) -> str:
    if any(c in text for c in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def _satisfied_token(report: VerificationReport) -> str:
    if report.status == "satisfied":
        return "true"
    if report.status == "violated":
        return "false"
    if report.status == "not_applicable":
        return "na"
    return "error"


def _diagnostics_pairs(diag: dict):
    for key in sorted(diag):
        value = diag[key]
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = fmt12(value)
        else:
            text = str(value).replace(";", ",")
        yield f"{key}={text}"


def report_row(report: VerificationReport) -> dict:
    """Ordered, serialization-ready view of one report."""
    row = {"scenario": report.scenario, "check": report.check}
    for key in ("lhs", "rhs", "slack"):
        row[key] = getattr(report, key)
    row["satisfied"] = report.satisfied
    row["status"] = report.status
    row["diagnostics"] = {k: report.diagnostics[k] for k in sorted(report.diagnostics)}
    return row


def write_csv(reports, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(_REPORT_COLUMNS) + ",diagnostics\n")
        for rep in reports:
            cells = [rep.scenario, rep.check]
            for key in ("lhs", "rhs", "slack"):
                value = getattr(rep, key)
                cells.append("" if value is None else fmt12(value))
            cells.append(_satisfied_token(rep))
            cells.append(";".join(_diagnostics_pairs(rep.diagnostics)))
            fh.write(",".join(_csv_quote(c) for c in cells) + "\n")


def write_json(reports, path, tolerance, constant_scale=1.0) -> None:
    payload = {
        "schema": 1,
        "tolerance": tolerance,
        "constant_scale": constant_scale,
        "reports": [report_row(r) for r in reports],
        "summary": {
            "total": len(reports),
            "satisfied": sum(r.status == "satisfied" for r in reports),
            "violated": sum(r.status == "violated" for r in reports),
            "not_applicable": sum(r.status == "not_applicable" for r in reports),
            "errors": sum(r.status == "error" for r in reports),
        },
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_json_emit(payload) + "\n")


def _safe_filename(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]", "_", name)


def execute_scenario(spec: ScenarioSpec, config: RunConfig,
                     constant_scale: float = 1.0) -> VerificationReport:
    """Run one scenario; failures become error reports, never batch aborts."""
    model = config.models[spec.model]
    profile = config.profiles[spec.profile] if spec.profile else None
    params = spec.params
    try:
        if spec.check == "torsion_bound":
            return torsion_bound_check(model, params["radius"], profile,
                                       AifEvaluator(profile), scenario=spec.name)
        if spec.check == "lp_lower_bound":
            pair = solve_dirichlet_eigenpair(model, params["radius"],
                                             config.tolerance)
            return lp_lower_bound_check(pair, params.get("gamma", 0.0),
                                        params["p"], AifEvaluator(profile),
                                        scenario=spec.name)
        if spec.check == "energy_identity":
            pair = solve_dirichlet_eigenpair(model, params["radius"],
                                             config.tolerance)
            return energy_identity_check(pair, model, scenario=spec.name)
        domain = Ball(params["radius"]) if params["domain_type"] == "ball" \
            else WholeManifold()
        scenario = BoundScenario(name=spec.name, model=model, profile=profile,
                                 p=params["p"], domain=domain,
                                 lam=params.get("lambda"),
                                 constant_scale=constant_scale,
                                 tolerance=config.tolerance)
        return verify_linfty_bound(scenario, AifEvaluator(profile))
    except SpecboundError as exc:
        return VerificationReport(
            spec.name, spec.check, None, None, None, None, "error",
            {"reason": str(exc), "error_type": type(exc).__name__})
    except Exception as exc:  # pragma: no cover - defensive batch isolation
        return VerificationReport(
            spec.name, spec.check, None, None, None, None, "error",
            {"reason": repr(exc), "error_type": type(exc).__name__})


def _prewarm_models(config: RunConfig) -> None:
    # grow lazy Jacobi caches once, serially, so worker threads never extend
    # them in a scheduling-dependent order
    reach = {}
    for spec in config.scenarios:
        radius = spec.params.get("radius", 0.0)
        if radius:
            reach[spec.model] = max(reach.get(spec.model, 0.0), radius)
    for name, radius in sorted(reach.items()):
        model = config.models[name]
        if model.kind == "jacobi":
            model.warping(radius * 1.01)


def run(config: RunConfig, out_dir: str | None = None, jobs: int | None = None,
        constant_scale: float = 1.0) -> int:
    """Execute all scenarios, write reports, and return the exit code.

    0: every applicable check satisfied; 1: at least one violation;
    3: at least one scenario failed numerically (violations notwithstanding).
    Configuration errors surface before this point as exit code 2.
    """
    out = out_dir or config.output_dir or "specbound-out"
    os.makedirs(out, exist_ok=True)
    jobs = jobs or config.jobs
    _prewarm_models(config)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(execute_scenario, spec, config, constant_scale)
                       for spec in config.scenarios]
            reports = [f.result() for f in futures]
    else:
        reports = [execute_scenario(spec, config, constant_scale)
                   for spec in config.scenarios]
    for rep in reports:
        if rep.radial is not None:
            rep.radial.to_csv(os.path.join(
                out, f"{_safe_filename(rep.scenario)}__radial.csv"))
    write_json(reports, os.path.join(out, "report.json"),
               config.tolerance, constant_scale)
    write_csv(reports, os.path.join(out, "report.csv"))
    if any(r.status == "error" for r in reports):
        return EXIT_NUMERIC
    if any(r.status == "violated" for r in reports):
        return EXIT_VIOLATION
    return EXIT_OK
