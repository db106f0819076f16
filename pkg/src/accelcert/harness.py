"""Command-line harness: run experiments, write traces, certify them.

Subcommands::

    accelcert run --problem quad2d --algo m-nag --step 0.4 --r 2 --iters 200
    accelcert preset fig1 --outdir out/
    accelcert certify --trace trace.json --problem quad2d

Exit codes: 0 success, 1 usage or configuration error, 2 certification
failure. Trace CSVs are plot-ready; trace JSONs additionally carry the full
per-iteration state and can be re-ingested bit-faithfully. The environment
variable ACCEL_SEED is reserved but unused: every algorithm here is
deterministic.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, replace

import numpy as np

from . import lyapunov, problems
from .algorithms import (
    COMPOSITE_ALGOS,
    R_FAMILY_ALGOS,
    ALGORITHMS,
    RunParams,
    Trace,
    TraceRecord,
    run,
)
from .errors import AccelCertError
from .lyapunov import CERTIFIABLE_ALGOS
from .problems import as_composite, resolve_problem


class UsageError(AccelCertError):
    """Bad flags or configuration; maps to exit code 1."""


DEFAULT_ITERS = 200
DEFAULT_R = 2.0
FORMATS = ("csv", "json")
ENERGY_FORMS = ("auto", "velocity", "xy")


@dataclass(frozen=True)
class ExperimentConfig:
    problem: str
    algo: str
    step: float
    iters: int = DEFAULT_ITERS
    momentum_r: float | None = None
    x0: str | tuple[float, ...] = "ones"
    trace_path: str | None = None
    certificate_path: str | None = None
    format: str = "csv"
    certify: bool = False
    energy_form: str = "auto"


def _parse_x0(text):
    if text == "ones":
        return "ones"
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise UsageError(f"bad x0 {text!r}: expected 'ones' or comma-separated floats") from exc


def _validate_config(cfg: ExperimentConfig) -> ExperimentConfig:
    if cfg.algo not in ALGORITHMS:
        raise UsageError(f"unknown algorithm {cfg.algo!r}; choose from {', '.join(ALGORITHMS)}")
    if cfg.format not in FORMATS:
        raise UsageError(f"unknown format {cfg.format!r}")
    if cfg.energy_form not in ENERGY_FORMS:
        raise UsageError(f"unknown energy form {cfg.energy_form!r}")
    if cfg.iters < 1:
        raise UsageError("iters must be a positive integer")
    if cfg.step <= 0.0:
        raise UsageError("step must be positive")
    if cfg.algo in R_FAMILY_ALGOS and cfg.momentum_r is not None and cfg.momentum_r < 2.0:
        raise UsageError(f"momentum parameter r must be >= 2, got {cfg.momentum_r}")
    if cfg.certify and cfg.algo not in CERTIFIABLE_ALGOS:
        raise UsageError(
            f"no certificate available for {cfg.algo!r}; certifiable: "
            + ", ".join(sorted(CERTIFIABLE_ALGOS))
        )
    if cfg.trace_path is None:
        cfg = replace(cfg, trace_path=f"trace.{cfg.format}")
    if cfg.certify and cfg.certificate_path is None:
        cfg = replace(cfg, certificate_path="certificate.json")
    return cfg


def parse_config(source) -> ExperimentConfig:
    """Build a validated ExperimentConfig.

    ``source`` is either a list of command-line tokens for the ``run``
    subcommand, a path to a JSON config file, or a dict with the same keys
    as ExperimentConfig. On the command line --r is mandatory for
    r-dependent algorithms; a config file may omit momentum_r, which then
    defaults to 2.
    """
    if isinstance(source, (list, tuple)):
        parser = _build_parser()
        args = parser.parse_args(["run", *source])
        return _config_from_args(args)
    if isinstance(source, (str, os.PathLike)):
        try:
            with open(source) as fh:
                payload = json.load(fh)
        except OSError as exc:
            raise UsageError(f"cannot read config {source!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise UsageError(f"bad JSON in config {source!r}: {exc}") from exc
        return _config_from_mapping(payload)
    if isinstance(source, dict):
        return _config_from_mapping(source)
    raise UsageError(f"cannot parse config from {type(source).__name__}")


def _config_from_mapping(payload: dict) -> ExperimentConfig:
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = set(payload) - known
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
    for key in ("problem", "algo", "step"):
        if key not in payload:
            raise UsageError(f"config is missing required key {key!r}")
    payload = dict(payload)
    x0 = payload.get("x0", "ones")
    if isinstance(x0, str):
        payload["x0"] = _parse_x0(x0)
    else:
        payload["x0"] = tuple(float(v) for v in x0)
    cfg = ExperimentConfig(**payload)
    if cfg.algo in R_FAMILY_ALGOS and cfg.momentum_r is None:
        cfg = replace(cfg, momentum_r=DEFAULT_R)
    return _validate_config(cfg)


def _config_from_args(args) -> ExperimentConfig:
    if args.config is not None:
        base = parse_config(args.config)
    else:
        for key in ("problem", "algo", "step"):
            if getattr(args, key) is None:
                raise UsageError(f"--{key} is required")
        base = None

    overrides = {}
    for key in ("problem", "algo", "step", "iters", "format", "certify", "energy_form"):
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    if args.r is not None:
        overrides["momentum_r"] = args.r
    if args.x0 is not None:
        overrides["x0"] = _parse_x0(args.x0)
    if args.trace_out is not None:
        overrides["trace_path"] = args.trace_out
    if args.certificate_out is not None:
        overrides["certificate_path"] = args.certificate_out

    if base is not None:
        cfg = replace(base, **overrides)
    else:
        cfg = ExperimentConfig(**overrides)
        if cfg.algo in R_FAMILY_ALGOS and args.r is None:
            raise UsageError(f"--r is required for {cfg.algo}")
    return _validate_config(cfg)


def preset(name: str) -> list[ExperimentConfig]:
    """Experiment bundles reproducing the two benchmark figures.

    fig1: nag and m-nag on quad2d with s=0.4, r=2 (oscillation vs monotone
    descent). fig2: gd, nag-sc, m-nag-sc on quad2d with s=0.01, run long
    enough for the accelerated pair to cross small gap levels. Start point
    is (1, 1); the figures leave it unspecified, so the preset pins one for
    reproducibility.
    """
    if name == "fig1":
        return [
            ExperimentConfig(
                problem="quad2d", algo=algo, step=0.4, momentum_r=2.0,
                iters=200, x0=(1.0, 1.0),
            )
            for algo in ("nag", "m-nag")
        ]
    if name == "fig2":
        return [
            ExperimentConfig(
                problem="quad2d", algo=algo, step=0.01, iters=2000, x0=(1.0, 1.0),
            )
            for algo in ("gd", "nag-sc", "m-nag-sc")
        ]
    raise UsageError(f"unknown preset {name!r}; available: fig1, fig2")


def _resolve_x0(cfg: ExperimentConfig, dim: int) -> np.ndarray:
    if cfg.x0 == "ones":
        return np.ones(dim)
    x0 = np.asarray(cfg.x0, dtype=float)
    if x0.size != dim:
        raise UsageError(f"x0 has dimension {x0.size}, problem needs {dim}")
    return x0


def run_experiment(cfg: ExperimentConfig):
    """Run one configured experiment; returns (trace, certificate or None).

    Writes the trace to cfg.trace_path and, when certifying, the
    certificate JSON to cfg.certificate_path.
    """
    problem, optimum = resolve_problem(cfg.problem)
    if cfg.algo in COMPOSITE_ALGOS and not isinstance(problem, problems.CompositeObjective):
        problem = as_composite(problem)
    params = RunParams(
        algo=cfg.algo, step=cfg.step, iters=cfg.iters, momentum_r=cfg.momentum_r
    )
    x0 = _resolve_x0(cfg, problems.smooth_part(problem).dim)
    trace = run(problem, params, x0, problem_id=cfg.problem)

    certificate = None
    if cfg.certify:
        certificate = lyapunov.certify(trace, problem, optimum, form=cfg.energy_form)
        with open(cfg.certificate_path, "w") as fh:
            json.dump(lyapunov.certificate_to_dict(certificate), fh)
            fh.write("\n")
    emit_trace(trace, cfg.format, cfg.trace_path, optimum=optimum, certificate=certificate)
    return trace, certificate


def _violations(trace: Trace) -> list[int]:
    flags = [0]
    values = [rec.f_or_phi_at_x for rec in trace.records]
    for k in range(1, len(values)):
        flags.append(1 if values[k] > values[k - 1] else 0)
    return flags


def _row_fields(trace: Trace, optimum, certificate):
    energies = {}
    bounds = {}
    if certificate is not None:
        for row in certificate.rows:
            energies[row.k] = row.energy
            bounds[row.k] = row.bound
    flags = _violations(trace)
    for rec in trace.records:
        yield (
            rec,
            rec.f_or_phi_at_x - optimum.f_star,
            float(np.linalg.norm(rec.first_order_at_y)),
            flags[rec.k],
            energies.get(rec.k),
            bounds.get(rec.k),
        )


def _fmt(value) -> str:
    return "" if value is None else format(value, ".17g")


def emit_trace(trace: Trace, fmt: str, path: str, *, optimum, certificate=None) -> None:
    """Write a trace to disk.

    CSV columns: k, f_gap, grad_norm, x..., y..., monotone_violation,
    energy, bound (the last two blank unless a certificate is supplied).
    JSON mirrors those fields and adds the full per-iteration state, with
    floats at 17 significant digits so reloading is bit-faithful.
    """
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}")
    d = trace.records[0].x.size
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["k", "f_gap", "grad_norm"]
                + [f"x{i}" for i in range(d)]
                + [f"y{i}" for i in range(d)]
                + ["monotone_violation", "energy", "bound"]
            )
            for rec, f_gap, grad_norm, flag, e_k, b_k in _row_fields(
                trace, optimum, certificate
            ):
                writer.writerow(
                    [rec.k, _fmt(f_gap), _fmt(grad_norm)]
                    + [_fmt(v) for v in rec.x]
                    + [_fmt(v) for v in rec.y]
                    + [flag, _fmt(e_k), _fmt(b_k)]
                )
        return

    payload = {
        "kind": "accelcert-trace",
        "problem_id": trace.problem_id,
        "params": {
            "algo": trace.params.algo,
            "step": trace.params.step,
            "iters": trace.params.iters,
            "momentum_r": trace.params.momentum_r,
        },
        "records": [
            {
                "k": rec.k,
                "x": list(rec.x),
                "y": list(rec.y),
                "v": list(rec.v),
                "z": None if rec.z is None else list(rec.z),
                "f": rec.f_or_phi_at_x,
                "map": list(rec.first_order_at_y),
                "f_gap": f_gap,
                "grad_norm": grad_norm,
                "monotone_violation": flag,
                "energy": e_k,
                "bound": b_k,
            }
            for rec, f_gap, grad_norm, flag, e_k, b_k in _row_fields(
                trace, optimum, certificate
            )
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_trace(path: str) -> Trace:
    """Re-ingest a JSON trace written by emit_trace (CSV is plot-only)."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read trace {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path!r} is not a JSON trace (CSV traces cannot be re-ingested)") from exc
    if not isinstance(payload, dict) or payload.get("kind") != "accelcert-trace":
        raise UsageError(f"{path!r} is not an accelcert trace file")
    params = RunParams(
        algo=payload["params"]["algo"],
        step=payload["params"]["step"],
        iters=payload["params"]["iters"],
        momentum_r=payload["params"]["momentum_r"],
    )
    records = tuple(
        TraceRecord(
            k=rec["k"],
            x=np.asarray(rec["x"], dtype=float),
            y=np.asarray(rec["y"], dtype=float),
            v=np.asarray(rec["v"], dtype=float),
            f_or_phi_at_x=rec["f"],
            first_order_at_y=np.asarray(rec["map"], dtype=float),
            z=None if rec["z"] is None else np.asarray(rec["z"], dtype=float),
        )
        for rec in payload["records"]
    )
    return Trace(params=params, problem_id=payload["problem_id"], records=records)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="accelcert", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    p_run.add_argument("--problem", help="quad2d | quad-diag:<c1,c2,...> | lasso:<path>")
    p_run.add_argument("--algo", help="one of: " + ", ".join(ALGORITHMS))
    p_run.add_argument("--step", type=float, help="step size s, must satisfy 0 < s < 1/L")
    p_run.add_argument("--r", type=float, help="momentum parameter (r-family algorithms)")
    p_run.add_argument("--iters", type=int, help=f"iteration count (default {DEFAULT_ITERS})")
    p_run.add_argument("--x0", help="'ones' or comma-separated start point (default ones)")
    p_run.add_argument("--trace-out", help="trace output path (default trace.<format>)")
    p_run.add_argument("--certificate-out", help="certificate path (default certificate.json)")
    p_run.add_argument("--format", choices=FORMATS, help="trace format (default csv)")
    p_run.add_argument("--certify", action="store_const", const=True, default=None,
                       help="certify the run and gate the exit code on it")
    p_run.add_argument("--energy-form", choices=ENERGY_FORMS, dest="energy_form",
                       help="energy form for certification (default auto)")
    p_run.add_argument("--config", help="JSON config file; explicit flags override it")

    p_preset = sub.add_parser("preset", help="run a figure preset")
    p_preset.add_argument("name", help="fig1 | fig2")
    p_preset.add_argument("--outdir", default=".", help="directory for the trace files")
    p_preset.add_argument("--format", choices=FORMATS, default="csv")

    p_cert = sub.add_parser("certify", help="re-certify a stored JSON trace")
    p_cert.add_argument("--trace", required=True, help="JSON trace path")
    p_cert.add_argument("--problem", required=True, help="problem the trace was run on")
    p_cert.add_argument("--energy-form", choices=ENERGY_FORMS, dest="energy_form",
                        default="auto")
    p_cert.add_argument("--out", help="certificate output path (default: stdout)")
    return parser


def _cmd_run(args) -> int:
    cfg = _config_from_args(args)
    trace, certificate = run_experiment(cfg)
    gap = trace.records[-1].f_or_phi_at_x - trace.records[0].f_or_phi_at_x
    print(
        f"run {cfg.algo} on {cfg.problem}: {cfg.iters} iterations, "
        f"f drop {gap:.6g} -> {cfg.trace_path}"
    )
    if certificate is not None:
        if not certificate.overall_pass:
            k = lyapunov.first_failing_k(certificate)
            print(f"certificate: FAIL at k={k} -> {cfg.certificate_path}", file=sys.stderr)
            return 2
        print(f"certificate: PASS (K={certificate.threshold_K}) -> {cfg.certificate_path}")
    return 0


def _cmd_preset(args) -> int:
    configs = preset(args.name)
    os.makedirs(args.outdir, exist_ok=True)
    for cfg in configs:
        path = os.path.join(args.outdir, f"{args.name}_{cfg.algo}.{args.format}")
        cfg = replace(cfg, trace_path=path, format=args.format)
        run_experiment(cfg)
        print(f"{args.name}: {cfg.algo} -> {path}")
    return 0


def _cmd_certify(args) -> int:
    trace = load_trace(args.trace)
    problem, optimum = resolve_problem(args.problem)
    if trace.params.algo in COMPOSITE_ALGOS and not isinstance(
        problem, problems.CompositeObjective
    ):
        problem = as_composite(problem)
    certificate = lyapunov.certify(trace, problem, optimum, form=args.energy_form)
    payload = lyapunov.certificate_to_dict(certificate)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(payload, fh)
            fh.write("\n")
    else:
        json.dump(payload, sys.stdout)
        print()
    if not certificate.overall_pass:
        k = lyapunov.first_failing_k(certificate)
        print(f"certificate: FAIL at k={k}", file=sys.stderr)
        return 2
    print(f"certificate: PASS (K={certificate.threshold_K})", file=sys.stderr)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "preset":
            return _cmd_preset(args)
        return _cmd_certify(args)
    except AccelCertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
