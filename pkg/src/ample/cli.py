"""Command-line front end.

Reads a JSON config (see config.py), dispatches to the library, and prints
one canonical-JSON report document to stdout; a one-line human summary goes
to stderr.  Flags mirror config keys and take precedence over the file.
Exit status: 0 when the command's check passed, 1 when it ran but failed,
2 for config errors, 3 for domain errors inside a command.  The AMPLE_SEED
environment variable, when set, overrides the seed of seed-consuming
commands so CI can shuffle runs without editing configs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from fractions import Fraction

from . import __version__
from .bundles import BundleExpr, Dual, Line, Sum, Twist, chern_of
from .config import COMMANDS, RunConfig, config_from_mapping
from .criteria import (
    Assertions,
    build_counterexample,
    check_criterion,
    check_rank2_criterion,
    epsilon_choice,
    nakai_check,
)
from .errors import AmpleError, ConfigError
from .intersection import CohClass, SurfaceRing
from .report import render
from .sweep import (
    SweepResult,
    export_histograms,
    run_gap_sweep,
    run_griffiths_sweep,
    run_lagrange_check,
)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_ERROR = 3

_PASS_VERDICTS = ("pass", "hypotheses-satisfied")


def _ring_doc(ring: SurfaceRing) -> dict:
    return {
        "basis": list(ring.basis_names),
        "pairing": [list(row) for row in ring.pairing],
    }


def _divisor_doc(d: CohClass, ring: SurfaceRing) -> dict:
    return {name: coord for name, coord in zip(ring.basis_names, d.deg2)}


def _bundle_doc(expr: BundleExpr, ring: SurfaceRing) -> dict:
    if isinstance(expr, Line):
        return {"kind": "line", "divisor": _divisor_doc(expr.divisor, ring)}
    if isinstance(expr, Sum):
        return {
            "kind": "sum",
            "summands": [_bundle_doc(x, ring) for x in expr.summands],
        }
    if isinstance(expr, Twist):
        return {
            "kind": "twist",
            "bundle": _bundle_doc(expr.bundle, ring),
            "divisor": _divisor_doc(expr.divisor, ring),
        }
    return {"kind": "dual", "bundle": _bundle_doc(expr.bundle, ring)}


def _assertion_flags(a: Assertions) -> dict:
    return {
        "c1_positive": a.c1_positive,
        "ample_on_curves": a.ample_on_curves,
        "semistable": a.semistable,
    }


def _assertion_marks(a: Assertions) -> dict:
    return {
        name: ("asserted" if flag else "unknown")
        for name, flag in _assertion_flags(a).items()
    }


def _sweep_doc(cfg: RunConfig) -> dict:
    # threads and batch_size are execution-plan knobs that never change the
    # results, so they are left out of the echo to keep reports byte-identical
    # across schedules
    s = cfg.sweep
    return {
        "sweep": {
            "ranks": list(s.ranks),
            "epsilons": list(s.epsilons),
            "samples": s.samples,
            "seed": s.seed,
            "restarts": s.restarts,
            "random_vectors": s.random_vectors,
            "iterations": s.iterations,
            "tol": s.tol,
            "threshold": s.threshold,
            "mode": s.mode,
            "histogram_bins": s.histogram_bins,
        }
    }


def _criterion_results(cfg: RunConfig, rank2: bool) -> tuple[dict, str, list[str]]:
    cd = chern_of(cfg.bundle, cfg.ring)
    rep = (
        check_rank2_criterion(cd, cfg.assertions)
        if rank2
        else check_criterion(cd, cfg.assertions)
    )
    results = {
        "rank": rep.rank,
        "c1": _divisor_doc(cd.c1, cfg.ring),
        "c1_sq": rep.c1_sq,
        "c2": rep.c2,
        "c1sq_minus_c2": rep.c1sq_minus_c2,
        "lubke_coefficient": rep.lubke_coefficient,
        "lubke_gap": rep.lubke_gap,
        "st_gap": rep.st_gap,
        "assertions": _assertion_marks(rep.assertions),
    }
    warnings = []
    missing = rep.assertions.missing()
    if missing:
        warnings.append("unverified hypotheses: " + ", ".join(missing))
    return results, rep.verdict, warnings


def _sweep_results(res: SweepResult, value_key: str) -> dict:
    configs = []
    for c in res.results:
        worst = {
            "seed": list(c.worst.seed),
            "value": c.worst.value,
            "v": list(c.worst.v),
            "source": c.worst.source,
        }
        configs.append(
            {
                "rank": c.rank,
                "epsilon": c.epsilon,
                "samples": c.samples,
                "min": c.min_value,
                "mean": c.mean_value,
                "converged_fraction": c.converged_fraction,
                "residual_max": dict(c.residual_max),
                "worst": worst,
                "histogram": [list(bin_) for bin_ in c.histogram],
            }
        )
    return {value_key: res.min_value, "residual_max": res.residual_max, "configs": configs}


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute one parsed config; returns (exit status, report document)."""
    inputs: dict = {}
    warnings: list[str] = []
    try:
        if cfg.command in ("check", "st-check"):
            inputs = {
                "ring": _ring_doc(cfg.ring),
                "bundle": _bundle_doc(cfg.bundle, cfg.ring),
                "assertions": _assertion_flags(cfg.assertions),
            }
            results, verdict, warnings = _criterion_results(cfg, cfg.command == "st-check")
        elif cfg.command == "nakai":
            inputs = {
                "ring": _ring_doc(cfg.ring),
                "divisor": _divisor_doc(cfg.divisor, cfg.ring),
                "curves": [_divisor_doc(c, cfg.ring) for c in cfg.curves],
            }
            rep = nakai_check(cfg.divisor, list(cfg.curves), cfg.ring)
            results = {
                "self_intersection": rep.self_intersection,
                "curve_degrees": list(rep.curve_degrees),
                "note": rep.note,
            }
            verdict = "pass" if rep.passed else "fail"
            warnings = list(rep.warnings)
        elif cfg.command == "counterexample":
            inputs = {"r": cfg.r, "a": cfg.a}
            ce = build_counterexample(cfg.r, cfg.a)
            results = {
                "ring": _ring_doc(ce.ring),
                "rank": ce.chern.rank,
                "c1_sq": ce.chern.c1_sq_value,
                "c2": ce.chern.c2_value,
                "slopes": list(ce.slopes),
                "identities": [
                    {
                        "name": chk.name,
                        "expected": chk.expected,
                        "actual": chk.actual,
                        "holds": chk.holds,
                    }
                    for chk in ce.identities
                ],
            }
            verdict = "pass" if ce.all_hold() else "fail"
        elif cfg.command == "epsilon":
            cd = chern_of(cfg.bundle, cfg.ring)
            inputs = {
                "ring": _ring_doc(cfg.ring),
                "bundle": _bundle_doc(cfg.bundle, cfg.ring),
                "omega_sq": cfg.omega_sq,
            }
            value = epsilon_choice(cd, cfg.omega_sq)
            results = {
                "rank": cd.rank,
                "c1_sq": cd.c1_sq_value,
                "c2": cd.c2_value,
                "epsilon": value,
            }
            verdict = "pass"
            if value <= 0:
                warnings.append(
                    "criterion combination is nonpositive; the value is not a usable error budget"
                )
        elif cfg.command == "verify-lemma":
            inputs = _sweep_doc(cfg)
            res = run_gap_sweep(cfg.sweep)
            results = _sweep_results(res, "min_gap")
            results["threshold"] = cfg.sweep.threshold
            verdict = "pass" if res.passed else "fail"
            if cfg.csv_path:
                export_histograms(res, cfg.csv_path)
        elif cfg.command == "griffiths":
            inputs = _sweep_doc(cfg)
            res = run_griffiths_sweep(cfg.sweep)
            results = _sweep_results(res, "min_eigenvalue")
            verdict = "pass" if res.passed else "fail"
            if cfg.csv_path:
                export_histograms(res, cfg.csv_path)
        elif cfg.command == "lagrange":
            samples = cfg.samples if cfg.samples is not None else 1000
            seed = cfg.seed if cfg.seed is not None else 0
            inputs = {"samples": samples, "seed": seed}
            res = run_lagrange_check(samples, seed)
            results = {
                "samples": res.samples,
                "seed": res.seed,
                "max_abs_diff": res.max_abs_diff,
                "worst": {
                    "rank": res.worst.rank,
                    "mu": res.worst.mu,
                    "b_diag": list(res.worst.b_diag),
                    "closed_form": res.worst.closed_form,
                    "numeric": res.worst.numeric,
                },
            }
            verdict = "pass" if res.passed else "fail"
        else:
            raise ConfigError(f"unknown command {cfg.command!r}")
    except AmpleError as exc:
        report = {
            "command": cfg.command,
            "inputs": inputs,
            "results": {"error": {"type": type(exc).__name__, "message": str(exc)}},
            "verdict": "error",
            "warnings": warnings,
            "version": __version__,
        }
        return EXIT_ERROR, report

    report = {
        "command": cfg.command,
        "inputs": inputs,
        "results": results,
        "verdict": verdict,
        "warnings": warnings,
        "version": __version__,
    }
    return (EXIT_PASS if verdict in _PASS_VERDICTS else EXIT_FAIL), report


def _summary(report: dict) -> str:
    command = report["command"]
    results = report["results"]
    verdict = report["verdict"]
    if verdict == "error":
        err = results["error"]
        return f"{command}: error ({err['type']}: {err['message']})"
    if command in ("check", "st-check"):
        return f"{command}: {verdict} (lubke_gap = {results['lubke_gap']})"
    if command == "nakai":
        return f"nakai: {verdict} (self-intersection = {results['self_intersection']})"
    if command == "counterexample":
        return f"counterexample: {verdict} (c1_sq = {results['c1_sq']}, c2 = {results['c2']})"
    if command == "epsilon":
        return f"epsilon: {results['epsilon']}"
    if command == "verify-lemma":
        return f"verify-lemma: {verdict} (min gap = {results['min_gap']:.6g})"
    if command == "griffiths":
        return f"griffiths: {verdict} (min eigenvalue = {results['min_eigenvalue']:.6g})"
    if command == "lagrange":
        return f"lagrange: {verdict} (max |closed - numeric| = {results['max_abs_diff']:.3e})"
    return f"{command}: {verdict}"


def _load_document(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config must be a JSON object")
    return data


def _apply_seed_env(cfg: RunConfig) -> tuple[RunConfig, list[str]]:
    raw = os.environ.get("AMPLE_SEED")
    if raw is None:
        return cfg, []
    try:
        seed = int(raw)
    except ValueError:
        raise ConfigError(f"AMPLE_SEED must be an integer, got {raw!r}") from None
    if seed < 0:
        raise ConfigError(f"AMPLE_SEED must be >= 0, got {seed}")
    if cfg.sweep is not None:
        return (
            replace(cfg, sweep=replace(cfg.sweep, seed=seed)),
            [f"seed overridden by AMPLE_SEED={seed}"],
        )
    if cfg.command == "lagrange":
        return replace(cfg, seed=seed), [f"seed overridden by AMPLE_SEED={seed}"]
    return cfg, []


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ample",
        description="Ampleness criteria for bundles on surfaces: exact checks and Monte Carlo curvature verification.",
    )
    parser.add_argument("--version", action="version", version=f"ample {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", metavar="PATH", help="JSON config file")
        p.add_argument("--out", metavar="PATH", help="also write the report to this file")
        return p

    add("check", "evaluate the higher-rank numerical criterion on exact Chern data")
    add("st-check", "evaluate the rank-2 Schneider-Tancredi criterion")
    add("nakai", "finite-list positivity check for a divisor class")

    p = add("counterexample", "build the rank-r boundary family and verify its identities")
    p.add_argument("-r", type=int, metavar="RANK", help="rank, at least 3")
    p.add_argument("-a", metavar="RAT", help="positive rational parameter, e.g. 2 or 7/3")

    for name, help_text in (
        ("verify-lemma", "Monte Carlo verification of the pointwise curvature inequality"),
        ("griffiths", "Monte Carlo minimum of the curvature form's smallest eigenvalue"),
    ):
        p = add(name, help_text)
        p.add_argument("--samples", type=int, metavar="N", help="samples per configuration")
        p.add_argument("--seed", type=int, metavar="S", help="base seed")
        p.add_argument("--restarts", type=int, metavar="K", help="adversarial search restarts")
        p.add_argument("--threads", type=int, metavar="T", help="worker threads")
        p.add_argument("--batch-size", type=int, metavar="B", help="samples per batch")
        p.add_argument("--mode", choices=("random", "projectively-flat"), help="sampler mode")
        p.add_argument("--csv", metavar="PATH", help="export per-config histograms as CSV")

    p = add("lagrange", "cross-check the closed-form constrained maximum against iteration")
    p.add_argument("--samples", type=int, metavar="N", help="number of random instances")
    p.add_argument("--seed", type=int, metavar="S", help="stream seed")

    add("epsilon", "exact error-budget parameter from Chern data and the omega^2 integral")
    return parser


def _merge_flags(doc: dict, args: argparse.Namespace) -> dict:
    command = args.command
    if "command" in doc and doc["command"] != command:
        raise ConfigError(
            f"config file says command {doc['command']!r} but the CLI invoked {command!r}"
        )
    doc["command"] = command
    if args.out is not None:
        doc["output_path"] = args.out
    if command == "counterexample":
        if args.r is not None:
            doc["r"] = args.r
        if args.a is not None:
            doc["a"] = args.a
    elif command in ("verify-lemma", "griffiths"):
        overrides = {
            "samples": args.samples,
            "seed": args.seed,
            "restarts": args.restarts,
            "threads": args.threads,
            "batch_size": args.batch_size,
            "mode": args.mode,
        }
        if any(v is not None for v in overrides.values()):
            sweep = doc.setdefault("sweep", {})
            if not isinstance(sweep, dict):
                raise ConfigError("sweep: expected an object")
            for key, value in overrides.items():
                if value is not None:
                    sweep[key] = value
        if args.csv is not None:
            doc["csv_path"] = args.csv
    elif command == "lagrange":
        if args.samples is not None:
            doc["samples"] = args.samples
        if args.seed is not None:
            doc["seed"] = args.seed
    return doc


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        doc = _load_document(args.config)
        doc = _merge_flags(doc, args)
        cfg = config_from_mapping(doc)
        cfg, env_warnings = _apply_seed_env(cfg)
    except ConfigError as exc:
        error = {"error": {"type": "ConfigError", "message": str(exc)}}
        sys.stderr.write(json.dumps(error) + "\n")
        return EXIT_CONFIG

    code, report = run(cfg)
    report["warnings"] = env_warnings + report["warnings"]
    text = render(report)
    sys.stdout.write(text)
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    sys.stderr.write(_summary(report) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
