"""Command-line entry point: ``sbo-vqa <subcommand> [options]``.

Results go to ``--out-dir`` (default ``out``) through atomic writes. On
failure a one-line JSON error report is printed to stderr and the exit
status is nonzero (2 for usage and configuration errors, 1 otherwise).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import scaling
from .config import RunConfig, load_config
from .experiments import (
    OPTIMIZERS,
    ConfigError,
    arm_rng,
    relative_abs_error,
    run_benchmark,
    run_optimizer,
    true_optimum,
)
from .io import atomic_write_json, atomic_write_text, dumps_json
from .sbo import sbo_run


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="TOML experiment configuration")
    p.add_argument("--out-dir", default="out", help="output directory (default: out)")
    p.add_argument("--seed", type=int, help="RNG seed")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="sbo-vqa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("optimize", help="run one optimizer once")
    _common(p)
    p.add_argument("--optimizer", choices=OPTIMIZERS)
    p.add_argument("--shots", type=int, help="shots per cost estimate")
    p.add_argument("--tau", type=int, help="SBO samples per patch")
    p.add_argument("--patch-size", type=float, help="SBO patch side")
    p.add_argument("--iters", type=int, help="iterations")

    p = sub.add_parser("benchmark", help="budget-matched comparison over many seeds")
    _common(p)
    p.add_argument("--optimizer", choices=OPTIMIZERS, action="append",
                   help="optimizer arm; repeat for several (default from config: sbo and spsa)")
    p.add_argument("--shots", type=int, help="shots per iteration shared by every optimizer")
    p.add_argument("--tau", type=int)
    p.add_argument("--patch-size", type=float)
    p.add_argument("--iters", type=int)
    p.add_argument("--runs", type=int, help="number of seeds, starting at --seed (default 0)")

    p = sub.add_parser("sweep-patch-size", help="mean final SBO error over a grid of patch sizes")
    _common(p)
    p.add_argument("--grid", help="comma-separated patch sizes")
    p.add_argument("--shots", type=int, help="shots per cost estimate")
    p.add_argument("--tau", type=int)
    p.add_argument("--iters", type=int)
    p.add_argument("--runs", type=int, help="runs per patch size")

    p = sub.add_parser("bound", help="critical-point bound and patch-size heuristic")
    p.add_argument("--out-dir", help="also write bound.json here")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--qaoa", action="store_true", help="QAOA on a kappa-regular graph")
    group.add_argument("--lambdas", help="comma-separated rotation counts per parameter")
    p.add_argument("-p", type=int, help="QAOA layers")
    p.add_argument("--kappa", type=int, help="graph regularity")

    p = sub.add_parser("fit", help="fit ell = beta * (kappa * (p + 1)) ** -alpha")
    p.add_argument("input", help="CSV with columns p,kappa,ell")
    p.add_argument("--out-dir", default="out")

    p = sub.add_parser("true-optimum", help="multi-start search for the exact minimum")
    _common(p)
    p.add_argument("--runs", type=int, help="number of starts")
    return parser


# -- helpers -------------------------------------------------------------------


def _config(args) -> RunConfig:
    return load_config(args.config) if args.config else RunConfig()


def _positive(name, value):
    if value is not None and value < 1:
        raise UsageError(f"--{name} must be >= 1, got {value}")


def _sbo_overrides(sbo, args):
    changes = {}
    if getattr(args, "tau", None) is not None:
        changes["tau"] = args.tau
    if getattr(args, "patch_size", None) is not None:
        ell = args.patch_size
        changes.update(patch_size=ell, eps_interior=ell / 20.0, eps_final=ell / 2.0)
    try:
        return dataclasses.replace(sbo, **changes) if changes else sbo
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write_trace(out: Path, stem: str, trace):
    atomic_write_json(out / f"{stem}.json", trace.to_dict())
    atomic_write_text(out / f"{stem}.csv", trace.to_csv())


# -- subcommands -----------------------------------------------------------------


def cmd_optimize(args) -> int:
    cfg = _config(args)
    opt = cfg.optimize
    name = args.optimizer or opt.optimizer
    seed = opt.seed if args.seed is None else args.seed
    shots = opt.shots if args.shots is None else args.shots
    iters = opt.iterations if args.iters is None else args.iters
    _positive("shots", shots)
    _positive("iters", iters)
    exp = dataclasses.replace(cfg.experiment, sbo=_sbo_overrides(cfg.experiment.sbo, args))
    # Re-derive the per-iteration budget so the experiment validates for this arm.
    budget = shots * exp.evaluations_per_iteration(name)
    exp = dataclasses.replace(exp, iterations=iters, optimizers=(name,), budget=budget, seeds=(seed,))
    objective = exp.problem.make_objective(shots)
    theta0 = exp.problem.initial_point()
    trace = run_optimizer(name, objective, theta0, exp, arm_rng(seed, name))
    out = Path(args.out_dir)
    _write_trace(out, "trace", trace)
    value = objective.exact(trace.theta_opt)
    result = {
        "optimizer": name,
        "seed": seed,
        "theta0": theta0.tolist(),
        "theta_opt": trace.theta_opt.tolist(),
        "exact_value": value,
        "total_shots": trace.total_shots,
    }
    atomic_write_json(out / "result.json", result)
    print(dumps_json(result), end="")
    return 0


def cmd_benchmark(args) -> int:
    cfg = _config(args)
    exp = cfg.experiment
    changes = {"sbo": _sbo_overrides(exp.sbo, args)}
    if args.optimizer:
        changes["optimizers"] = tuple(dict.fromkeys(args.optimizer))
    if args.shots is not None:
        changes["budget"] = args.shots
    if args.iters is not None:
        _positive("iters", args.iters)
        changes["iterations"] = args.iters
    if args.runs is not None or args.seed is not None:
        _positive("runs", args.runs)
        start = args.seed if args.seed is not None else 0
        count = args.runs if args.runs is not None else len(exp.seeds)
        changes["seeds"] = tuple(range(start, start + count))
    exp = dataclasses.replace(exp, **changes)
    result = run_benchmark(exp)
    out = Path(args.out_dir)
    atomic_write_text(out / "benchmark.csv", result.to_csv())
    summary = result.summary()
    atomic_write_json(out / "summary.json", summary)
    for (name, seed), trace in result.traces.items():
        atomic_write_json(out / "traces" / f"{name}_seed{seed}.json", trace.to_dict())
    brief = {name: arm["final_mean"] for name, arm in summary["optimizers"].items()}
    print(dumps_json({"final_mean_rel_err": brief, "v_min": summary["v_min"]}), end="")
    return 0


def _parse_floats(text: str, flag: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"{flag} must be a comma-separated list of numbers, got {text!r}") from None


def cmd_sweep(args) -> int:
    cfg = _config(args)
    sw = cfg.sweep
    grid = _parse_floats(args.grid, "--grid") if args.grid else list(sw.grid)
    runs = sw.runs if args.runs is None else args.runs
    iters = sw.iterations if args.iters is None else args.iters
    shots = sw.shots if args.shots is None else args.shots
    seed = sw.seed if args.seed is None else args.seed
    _positive("iters", iters)
    _positive("shots", shots)
    sbo = _sbo_overrides(cfg.experiment.sbo, args)
    problem = cfg.experiment.problem
    objective = problem.make_objective(shots)
    theta0 = problem.initial_point()
    best = true_optimum(objective, cfg.true_optimum.starts, np.random.default_rng(cfg.true_optimum.seed))

    def run_error(ell, rng):
        c = dataclasses.replace(sbo, patch_size=ell, eps_interior=ell / 20.0, eps_final=ell / 2.0,
                                iterations=iters)
        trace = sbo_run(objective, theta0, c, rng)
        return relative_abs_error(objective.exact(trace.theta_opt), best.value)

    try:
        result = scaling.optimal_patch_sweep(run_error, grid, runs, np.random.default_rng(seed))
    except scaling.SweepAborted as exc:
        atomic_write_json(Path(args.out_dir) / "sweep_partial.json", {"partial": exc.partial, "error": str(exc)})
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out_dir)
    atomic_write_text(out / "sweep.csv", result.to_csv())
    data = result.to_dict()
    data["v_min"] = best.value
    atomic_write_json(out / "sweep.json", data)
    print(dumps_json({"ell_star": result.ell_star}), end="")
    return 0


def cmd_bound(args) -> int:
    if args.qaoa:
        if args.p is None or args.kappa is None:
            raise UsageError("--qaoa needs -p and --kappa")
        try:
            c = scaling.AnsatzComplexity.qaoa(args.p, args.kappa)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        heuristic = scaling.qaoa_patch_size(args.p, args.kappa)
    else:
        try:
            lambdas = tuple(int(x) for x in args.lambdas.split(",") if x.strip())
            c = scaling.AnsatzComplexity(lambdas)
        except ValueError as exc:
            raise UsageError(f"--lambdas: {exc}") from None
        heuristic = scaling.patch_size_heuristic(c)
    bound = scaling.critical_point_bound(c)
    result = {
        "lambdas": list(c.lambdas),
        "dim": c.dim,
        "patch_size_heuristic": heuristic,
        "log_critical_point_bound": scaling.log_critical_point_bound(c),
        "critical_point_bound": bound if math.isfinite(bound) else None,
    }
    if args.out_dir:
        atomic_write_json(Path(args.out_dir) / "bound.json", result)
    print(dumps_json(result), end="")
    return 0


def _read_fit_points(path: Path) -> list:
    try:
        fh = path.open(newline="")
    except FileNotFoundError:
        raise ConfigError(f"{path}: input file not found") from None
    with fh:
        reader = csv.DictReader(fh)
        missing = {"p", "kappa", "ell"} - set(reader.fieldnames or ())
        if missing:
            raise ConfigError(f"{path}: missing column(s) {sorted(missing)}")
        points = []
        for lineno, row in enumerate(reader, 2):
            try:
                points.append((float(row["p"]), float(row["kappa"]), float(row["ell"])))
            except (TypeError, ValueError):
                raise ConfigError(f"{path}:{lineno}: non-numeric value in {row}") from None
    return points


def cmd_fit(args) -> int:
    path = Path(args.input)
    try:
        fit = scaling.fit_scaling(_read_fit_points(path))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{path}: {exc}") from None
    atomic_write_json(Path(args.out_dir) / "fit.json", fit.to_dict())
    print(dumps_json(fit.to_dict()), end="")
    return 0


def cmd_true_optimum(args) -> int:
    cfg = _config(args)
    starts = cfg.true_optimum.starts if args.runs is None else args.runs
    seed = cfg.true_optimum.seed if args.seed is None else args.seed
    _positive("runs", starts)
    objective = cfg.experiment.problem.make_objective()
    try:
        best = true_optimum(objective, starts, np.random.default_rng(seed))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    data = best.to_dict()
    atomic_write_json(Path(args.out_dir) / "optimum.json", data)
    print(dumps_json({"value": best.value, "theta": data["theta"]}), end="")
    return 0


COMMANDS = {
    "optimize": cmd_optimize,
    "benchmark": cmd_benchmark,
    "sweep-patch-size": cmd_sweep,
    "bound": cmd_bound,
    "fit": cmd_fit,
    "true-optimum": cmd_true_optimum,
}


def _report(kind: str, exc: BaseException, command=None):
    report = {"error": kind, "message": str(exc)}
    if command:
        report["command"] = command
    for attr in ("key", "line"):
        if getattr(exc, attr, None) is not None:
            report[attr] = getattr(exc, attr)
    print(json.dumps(report, sort_keys=True), file=sys.stderr)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _report("UsageError", exc)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    command = args.command
    try:
        return COMMANDS[command](args)
    except (ConfigError, UsageError) as exc:
        _report(type(exc).__name__, exc, command)
        return 2
    except OSError as exc:
        _report("IOError", exc, command)
        return 1
    except Exception as exc:  # noqa: BLE001 - every failure gets a machine-readable report
        _report(type(exc).__name__, exc, command)
        return 1


if __name__ == "__main__":
    sys.exit(main())
