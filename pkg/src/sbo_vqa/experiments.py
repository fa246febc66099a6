"""Problem construction, true optima and budget-matched benchmark campaigns."""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.optimize import minimize

from .baselines import QuasiNewtonConfig, SpsaConfig, quasi_newton_run, spsa_run
from .circuit_sim import (
    Graph,
    HardwareEfficientObjective,
    QaoaObjective,
    random_connected_graph,
    random_regular_graph,
    transverse_ising_observable,
)
from .circuit_sim.states import MAX_QUBITS
from .sbo import SboConfig, latin_hypercube, sbo_run
from .trace import RunTrace

OPTIMIZERS = ("sbo", "spsa", "qn")
# Stable per-arm stream ids; never reorder.
_ARM_IDS = {"sbo": 1, "spsa": 2, "qn": 3}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


# -- problems ------------------------------------------------------------------


@dataclass(frozen=True)
class ProblemConfig:
    """What to optimise. ``seed`` fixes both the graph and the starting point."""

    kind: str = "qaoa"  # "qaoa" | "hea"
    n: int = 4
    p: int = 2
    graph: str = "erdos_renyi"  # "erdos_renyi" | "regular" | "file"
    edge_prob: float = 0.5
    kappa: int = 3
    graph_file: Optional[str] = None
    layers: int = 2  # hardware-efficient only
    field: float = 1.0  # transverse field of the hardware-efficient target
    seed: int = 0
    theta0: Optional[tuple] = None
    max_qubits: int = MAX_QUBITS

    def __post_init__(self):
        if self.kind not in ("qaoa", "hea"):
            raise ConfigError(f"problem.kind must be 'qaoa' or 'hea', got {self.kind!r}")
        if self.graph not in ("erdos_renyi", "regular", "file"):
            raise ConfigError(f"problem.graph must be erdos_renyi, regular or file, got {self.graph!r}")
        if self.graph == "file" and self.kind == "qaoa" and not self.graph_file:
            raise ConfigError("problem.graph = 'file' needs problem.graph_file")
        if self.n < 1 or self.p < 1 or self.layers < 1:
            raise ConfigError("problem.n, problem.p and problem.layers must be >= 1")
        if self.theta0 is not None:
            object.__setattr__(self, "theta0", tuple(float(x) for x in self.theta0))

    def _streams(self):
        graph_ss, theta_ss = np.random.SeedSequence(self.seed).spawn(2)
        return np.random.default_rng(graph_ss), np.random.default_rng(theta_ss)

    def make_graph(self) -> Graph:
        if self.graph == "file":
            return Graph.load(self.graph_file)
        rng, _ = self._streams()
        if self.graph == "regular":
            return random_regular_graph(self.n, self.kappa, rng)
        return random_connected_graph(self.n, self.edge_prob, rng)

    def make_objective(self, shots: int = 100):
        if self.kind == "qaoa":
            return QaoaObjective(self.make_graph(), self.p, shots=shots, max_qubits=self.max_qubits)
        obs = transverse_ising_observable(self.n, self.field)
        return HardwareEfficientObjective(self.n, self.layers, obs, max_qubits=self.max_qubits).with_shots(shots)

    @property
    def dim(self) -> int:
        return 2 * self.p if self.kind == "qaoa" else self.n * self.layers

    def initial_point(self) -> np.ndarray:
        """``theta0`` if given, else a uniform draw from ``[0, pi)^D``."""
        if self.theta0 is not None:
            theta = np.array(self.theta0, dtype=float)
            if theta.shape != (self.dim,):
                raise ConfigError(f"problem.theta0 has {theta.size} entries, problem dimension is {self.dim}")
            return theta
        _, rng = self._streams()
        return rng.uniform(0.0, np.pi, self.dim)


# -- reference optimum ---------------------------------------------------------


@dataclass
class TrueOptimum:
    value: float
    theta: np.ndarray
    grad_norm: float
    basin_values: np.ndarray

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "theta": self.theta.tolist(),
            "grad_norm": self.grad_norm,
            "basin_values": self.basin_values.tolist(),
        }


def true_optimum(objective, starts: int = 50, rng: Optional[np.random.Generator] = None,
                 max_dim: int = 16, gtol: float = 1e-8) -> TrueOptimum:
    """Multi-start L-BFGS-B on the exact cost from an LHS design over ``[0, 2pi)^D``.

    ``objective`` must provide ``exact_and_gradient``. The best basin is
    re-polished without bounds until the gradient norm drops below ``gtol``
    (the cost is periodic, so a bound-limited point is not a real minimum).
    """
    dim = objective.dim
    if dim > max_dim:
        raise ValueError(f"true optimum search is capped at D={max_dim}, got D={dim}")
    if starts < 1:
        raise ValueError("need at least one start")
    if rng is None:
        rng = np.random.default_rng(0)
    fun = objective.exact_and_gradient
    x0s = 2.0 * np.pi * latin_hypercube(starts, dim, rng)
    bounds = [(0.0, 2.0 * np.pi)] * dim
    basins = []
    for x0 in x0s:
        res = minimize(fun, x0, jac=True, method="L-BFGS-B", bounds=bounds,
                       options={"gtol": 1e-12, "ftol": 1e-15, "maxiter": 2000})
        basins.append((float(res.fun), res.x))
    values = np.array([b[0] for b in basins])
    best = basins[int(np.argmin(values))][1]
    for _ in range(5):
        res = minimize(fun, best, jac=True, method="BFGS", options={"gtol": 0.1 * gtol, "maxiter": 2000})
        if res.fun <= fun(best)[0]:
            best = res.x
        if np.linalg.norm(fun(best)[1]) < gtol:
            break
    value, grad = fun(best)
    return TrueOptimum(float(value), np.asarray(best), float(np.linalg.norm(grad)), values)


def relative_abs_error(v_opt: float, v_min: float) -> float:
    """``|1 - v_opt / v_min|``."""
    if v_min == 0:
        raise ValueError("relative error is undefined when the reference minimum is 0")
    return abs(1.0 - v_opt / v_min)


# -- benchmark -----------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentConfig:
    problem: ProblemConfig = field(default_factory=ProblemConfig)
    optimizers: tuple = ("sbo", "spsa")
    budget: int = 5000  # shots per iteration, equal for every optimizer
    iterations: int = 100
    seeds: tuple = tuple(range(20))
    sbo: SboConfig = field(default_factory=SboConfig)
    spsa: SpsaConfig = field(default_factory=SpsaConfig)
    qn: QuasiNewtonConfig = field(default_factory=QuasiNewtonConfig)
    optimum_starts: int = 50
    optimum_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "optimizers", tuple(self.optimizers))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        unknown = [o for o in self.optimizers if o not in OPTIMIZERS]
        if unknown:
            raise ConfigError(f"unknown optimizer(s) {unknown}; choose from {list(OPTIMIZERS)}")
        if not self.optimizers:
            raise ConfigError("need at least one optimizer")
        if len(set(self.optimizers)) != len(self.optimizers):
            raise ConfigError("optimizers must be distinct")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if len(set(self.seeds)) != len(self.seeds):
            raise ConfigError("seeds must be distinct")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        for name in self.optimizers:
            self.shots_per_estimate(name)

    def evaluations_per_iteration(self, name: str) -> int:
        if name == "sbo":
            return self.sbo.tau
        if name == "spsa":
            return 2
        return 2 * self.problem.dim + 1

    def shots_per_estimate(self, name: str) -> int:
        per = self.evaluations_per_iteration(name)
        if self.budget % per:
            raise ConfigError(
                f"budget {self.budget} is not divisible by the {per} estimates per {name} iteration"
            )
        shots = self.budget // per
        if shots < 1:
            raise ConfigError(f"budget {self.budget} leaves no shots for {name}")
        return shots

    def total_shots(self) -> int:
        return self.budget * self.iterations

    def to_dict(self) -> dict:
        d = asdict(self)
        d["optimizers"] = list(self.optimizers)
        d["seeds"] = list(self.seeds)
        return d


def checkpoints(iterations: int) -> list[int]:
    """Every iteration up to 200, else about 60 log-spaced ones plus the last."""
    if iterations <= 200:
        return list(range(1, iterations + 1))
    pts = np.unique(np.round(np.logspace(0, math.log10(iterations), 60)).astype(int))
    return sorted(set(pts.tolist()) | {iterations})


def arm_rng(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, _ARM_IDS[name]]))


def run_optimizer(name: str, objective, theta0, cfg: ExperimentConfig, rng) -> RunTrace:
    m = cfg.iterations
    if name == "sbo":
        return sbo_run(objective, theta0, replace(cfg.sbo, iterations=m), rng)
    if name == "spsa":
        return spsa_run(objective, theta0, replace(cfg.spsa, iterations=m), rng)
    return quasi_newton_run(objective, theta0, replace(cfg.qn, iterations=m), rng)


def worker_count(tasks: int) -> int:
    cap = os.environ.get("SBO_VQA_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = int(cap)
        except ValueError:
            raise ConfigError(f"SBO_VQA_THREADS must be an integer, got {cap!r}") from None
        if n < 1:
            raise ConfigError("SBO_VQA_THREADS must be >= 1")
    return max(1, min(n, tasks))


@dataclass
class BenchmarkResult:
    config: ExperimentConfig
    theta0: np.ndarray
    optimum: TrueOptimum
    rows: list  # (optimizer, seed, iter, shots, rel_err)
    traces: dict  # (optimizer, seed) -> RunTrace

    def curves(self, name: str):
        """Checkpoint iterations, cumulative shots and per-seed errors ``(seeds, checkpoints)``."""
        rows = [r for r in self.rows if r[0] == name]
        iters = sorted({r[2] for r in rows})
        shots = {r[2]: r[3] for r in rows}
        seeds = list(self.config.seeds)
        err = np.empty((len(seeds), len(iters)))
        col = {it: j for j, it in enumerate(iters)}
        row = {s: i for i, s in enumerate(seeds)}
        for r in rows:
            err[row[r[1]], col[r[2]]] = r[4]
        return np.array(iters), np.array([shots[i] for i in iters]), err

    def to_csv(self) -> str:
        lines = ["optimizer,seed,iter,shots,rel_err"]
        lines += [f"{o},{s},{i},{k},{e!r}" for o, s, i, k, e in self.rows]
        return "\n".join(lines) + "\n"

    def summary(self) -> dict:
        arms = {}
        for name in self.config.optimizers:
            iters, shots, err = self.curves(name)
            n = err.shape[0]
            stderr = err.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros(err.shape[1])
            arms[name] = {
                "iter": iters.tolist(),
                "shots": shots.tolist(),
                "mean": err.mean(axis=0).tolist(),
                "stderr": stderr.tolist(),
                "final_mean": float(err[:, -1].mean()),
            }
        return {
            "config": self.config.to_dict(),
            "theta0": self.theta0.tolist(),
            "v_min": self.optimum.value,
            "theta_min": self.optimum.theta.tolist(),
            "optimizers": arms,
        }


def run_benchmark(cfg: ExperimentConfig, workers: Optional[int] = None,
                  optimum: Optional[TrueOptimum] = None) -> BenchmarkResult:
    """Run every (optimizer, seed) pair from one shared ``theta0`` at equal shots per iteration.

    Errors are measured on the exact cost at each run's current best guess,
    relative to the multi-start reference optimum.
    """
    base = cfg.problem.make_objective()
    theta0 = cfg.problem.initial_point()
    if optimum is None:
        optimum = true_optimum(base, cfg.optimum_starts, np.random.default_rng(cfg.optimum_seed))
    marks = checkpoints(cfg.iterations)
    tasks = [(name, seed) for name in cfg.optimizers for seed in cfg.seeds]
    objectives = {name: base.with_shots(cfg.shots_per_estimate(name)) for name in cfg.optimizers}

    def work(task):
        name, seed = task
        return run_optimizer(name, objectives[name], theta0, cfg, arm_rng(seed, name))

    n_workers = workers if workers is not None else worker_count(len(tasks))
    if n_workers <= 1:
        traces = [work(t) for t in tasks]
    else:
        with ThreadPoolExecutor(n_workers) as pool:
            traces = list(pool.map(work, tasks))

    rows = []
    for (name, seed), trace in zip(tasks, traces):
        for it in marks:
            rec = trace.records[it - 1]
            err = relative_abs_error(base.exact(rec.estimate), optimum.value)
            rows.append((name, seed, it, rec.cumulative_shots, err))
    return BenchmarkResult(cfg, theta0, optimum, rows, dict(zip(tasks, traces)))
