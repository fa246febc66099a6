"""TOML experiment configuration.

Every section maps onto one dataclass; keys are the dataclass field names::

    [problem]      kind, n, p, graph, edge_prob, kappa, graph_file, layers, field, seed, theta0
    [benchmark]    optimizers, budget, iterations, seeds | runs, optimum_starts, optimum_seed
    [sbo]          SboConfig fields
    [spsa]         SpsaConfig fields
    [qn]           iterations, fd_step, max_step, lower, upper
    [optimize]     optimizer, seed, shots, iterations
    [sweep]        grid, runs, iterations, shots, seed
    [true_optimum] starts, seed

Unknown sections or keys and ill-typed values raise :class:`ConfigError`
naming the key and, where it can be found, its line in the file.
"""

from __future__ import annotations

import dataclasses
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .baselines import QuasiNewtonConfig, SpsaConfig
from .experiments import OPTIMIZERS, ConfigError, ExperimentConfig, ProblemConfig
from .sbo import SboConfig


@dataclass(frozen=True)
class OptimizeSettings:
    optimizer: str = "sbo"
    seed: int = 0
    shots: int = 250  # per estimate
    iterations: int = 100


@dataclass(frozen=True)
class SweepSettings:
    grid: tuple = (0.04, 0.08, 0.12, 0.16, 0.20)
    runs: int = 3
    iterations: int = 100
    shots: int = 60  # per estimate
    seed: int = 0


@dataclass(frozen=True)
class OptimumSettings:
    starts: int = 50
    seed: int = 0


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI invocation may read from a config file."""

    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)
    optimize: OptimizeSettings = field(default_factory=OptimizeSettings)
    sweep: SweepSettings = field(default_factory=SweepSettings)
    true_optimum: OptimumSettings = field(default_factory=OptimumSettings)


_SECTIONS = ("problem", "benchmark", "sbo", "spsa", "qn", "optimize", "sweep", "true_optimum")
_BENCHMARK_KEYS = ("optimizers", "budget", "iterations", "seeds", "runs", "optimum_starts", "optimum_seed")
_QN_KEYS = ("iterations", "fd_step", "max_step", "lower", "upper")


def _line_of(text: Optional[str], section: str, key: Optional[str] = None) -> Optional[int]:
    if not text:
        return None
    header = re.compile(r"^\s*\[\s*" + re.escape(section) + r"\s*\]")
    in_section = False
    for lineno, line in enumerate(text.splitlines(), 1):
        if re.match(r"^\s*\[", line):
            in_section = bool(header.match(line))
            if in_section and key is None:
                return lineno
            continue
        if in_section and key is not None and re.match(r"^\s*" + re.escape(key) + r"\s*=", line):
            return lineno
    return None


def _error(text, source, section, key, message) -> ConfigError:
    where = f"{section}.{key}" if key else section
    lineno = _line_of(text, section, key)
    loc = f"{source}:{lineno}" if lineno else str(source)
    err = ConfigError(f"{loc}: [{where}] {message}")
    err.key = where
    err.line = lineno
    return err


def _coerce(value, default, name):
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise TypeError(f"expected a boolean, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise TypeError(f"expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise TypeError(f"expected a number, got {value!r}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise TypeError(f"expected a string, got {value!r}")
        return value
    if isinstance(default, tuple):
        if not isinstance(value, list):
            raise TypeError(f"expected an array, got {value!r}")
        return tuple(value)
    return value


def _build(cls, table: dict, text, source, section, extra=()):
    """Instantiate ``cls`` from ``table``, checking key names and value types."""
    fields = {f.name: f for f in dataclasses.fields(cls) if not f.name.startswith("_")}
    template = cls()
    kwargs = {}
    for key, value in table.items():
        if key in extra:
            continue
        if key not in fields:
            raise _error(text, source, section, key, f"unknown key; expected one of {sorted(fields)}")
        default = getattr(template, key)
        try:
            kwargs[key] = _coerce(value, default, key) if default is not None else value
        except TypeError as exc:
            raise _error(text, source, section, key, str(exc)) from None
    try:
        return cls(**kwargs)
    except (ValueError, TypeError) as exc:
        bad = next((k for k in kwargs if k in str(exc)), None)
        raise _error(text, source, section, bad, str(exc)) from None


def parse_config(data: dict, text: Optional[str] = None, source="<config>") -> RunConfig:
    for section, value in data.items():
        if section not in _SECTIONS:
            raise _error(text, source, section, None, f"unknown section; expected one of {list(_SECTIONS)}")
        if not isinstance(value, dict):
            raise _error(text, source, section, None, "expected a table")

    problem = _build(ProblemConfig, data.get("problem", {}), text, source, "problem")
    sbo = _build(SboConfig, data.get("sbo", {}), text, source, "sbo")
    spsa = _build(SpsaConfig, data.get("spsa", {}), text, source, "spsa")

    qn_table = dict(data.get("qn", {}))
    for key in qn_table:
        if key not in _QN_KEYS:
            raise _error(text, source, "qn", key, f"unknown key; expected one of {sorted(_QN_KEYS)}")
    lower, upper = qn_table.pop("lower", None), qn_table.pop("upper", None)
    if (lower is None) != (upper is None):
        raise _error(text, source, "qn", "lower" if lower is None else "upper", "lower and upper must be given together")
    qn = _build(QuasiNewtonConfig, qn_table, text, source, "qn")
    if lower is not None:
        if not (isinstance(lower, list) and isinstance(upper, list) and len(lower) == len(upper) == problem.dim):
            raise _error(text, source, "qn", "lower", f"lower and upper must be arrays of length {problem.dim}")
        qn = dataclasses.replace(qn, bounds=(tuple(map(float, lower)), tuple(map(float, upper))))

    bench = dict(data.get("benchmark", {}))
    for key in bench:
        if key not in _BENCHMARK_KEYS:
            raise _error(text, source, "benchmark", key, f"unknown key; expected one of {sorted(_BENCHMARK_KEYS)}")
    if "seeds" in bench and "runs" in bench:
        raise _error(text, source, "benchmark", "runs", "give either seeds or runs, not both")
    if "runs" in bench:
        runs = bench.pop("runs")
        if isinstance(runs, bool) or not isinstance(runs, int) or runs < 1:
            raise _error(text, source, "benchmark", "runs", f"expected a positive integer, got {runs!r}")
        bench["seeds"] = list(range(runs))
    for key, bad in (("optimizers", lambda v: any(o not in OPTIMIZERS for o in v)),):
        if key in bench and (not isinstance(bench[key], list) or bad(bench[key])):
            raise _error(text, source, "benchmark", key, f"expected an array drawn from {list(OPTIMIZERS)}")
    bench_kwargs = {}
    template = ExperimentConfig()
    for key, value in bench.items():
        try:
            bench_kwargs[key] = _coerce(value, getattr(template, key), key)
        except TypeError as exc:
            raise _error(text, source, "benchmark", key, str(exc)) from None
    try:
        experiment = ExperimentConfig(problem=problem, sbo=sbo, spsa=spsa, qn=qn, **bench_kwargs)
    except (ValueError, TypeError) as exc:
        bad = next((k for k in bench_kwargs if k in str(exc)), None)
        raise _error(text, source, "benchmark", bad, str(exc)) from None

    optimize = _build(OptimizeSettings, data.get("optimize", {}), text, source, "optimize")
    if optimize.optimizer not in OPTIMIZERS:
        raise _error(text, source, "optimize", "optimizer", f"expected one of {list(OPTIMIZERS)}")
    sweep = _build(SweepSettings, data.get("sweep", {}), text, source, "sweep")
    optimum = _build(OptimumSettings, data.get("true_optimum", {}), text, source, "true_optimum")
    return RunConfig(experiment, optimize, sweep, optimum)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ConfigError(f"{path}: config file not found") from None
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config file: {exc}") from None
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: malformed TOML: {exc}") from None
    return parse_config(data, text, path)
