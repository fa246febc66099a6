"""Adaptive patch-walk surrogate-based optimizer.

Each iteration draws a Latin-hypercube design of ``tau`` points in the
hypercube patch of side ``patch_size`` around the current center, estimates
the cost at each, fits a Gaussian-kernel surrogate and minimises it over a
shrunk box. The minimiser becomes the next center. Minimisers that land well
inside their patch are collected; the final answer is the mean of those
close to the last center.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .objective import NoisyObjective
from .surrogate import SurrogateModel, fit_arrays, silverman_bandwidth
from .trace import IterationRecord, RunTrace


@dataclass(frozen=True)
class SboConfig:
    patch_size: float = 0.2
    tau: int = 20
    iterations: int = 100
    eps_initial: float = 0.0
    eps_interior: Optional[float] = None  # defaults to patch_size / 20
    eps_final: Optional[float] = None  # defaults to patch_size / 2
    eps_end_fraction: float = 0.95
    sigma: Optional[float] = None  # None: Silverman bandwidth from (tau, D)
    normalize_kernel: bool = True
    restarts: int = 4
    inner_max_iter: int = 500
    inner_gtol: float = 1e-8
    inner_xtol: float = 1e-10

    def __post_init__(self):
        ell = self.patch_size
        if not ell > 0:
            raise ValueError(f"patch_size must be positive, got {ell}")
        if self.eps_interior is None:
            object.__setattr__(self, "eps_interior", ell / 20.0)
        if self.eps_final is None:
            object.__setattr__(self, "eps_final", ell / 2.0)
        if not 0.0 < self.eps_end_fraction < 1.0:
            raise ValueError("eps_end_fraction must be in (0, 1)")
        if not 0.0 <= self.eps_initial <= self.eps_end_fraction * ell:
            raise ValueError(
                f"eps_initial must be in [0, {self.eps_end_fraction} * patch_size], got {self.eps_initial}"
            )
        for name in ("eps_interior", "eps_final"):
            value = getattr(self, name)
            if not 0.0 < value < ell:
                raise ValueError(f"{name} must be in (0, patch_size), got {value}")
        if self.tau < 2:
            raise ValueError(f"tau must be >= 2, got {self.tau}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.sigma is not None and not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Box:
    lo: np.ndarray
    hi: np.ndarray

    def contains(self, x, tol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)


@dataclass(frozen=True)
class Patch:
    center: np.ndarray
    side: float


def latin_hypercube(tau: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    """``(tau, dim)`` array in ``[0, 1)``, one point per stratum per axis."""
    if tau < 1 or dim < 1:
        raise ValueError(f"tau and dim must be positive, got tau={tau}, dim={dim}")
    strata = np.stack([rng.permutation(tau) for _ in range(dim)], axis=1)
    return (strata + rng.random((tau, dim))) / tau


def patch_bounds(patch: Patch, eps: float) -> Box:
    """Box of half-width ``(side - eps) / 2`` around the patch center."""
    if not 0.0 <= eps < patch.side:
        raise ValueError(f"eps must be in [0, {patch.side}), got {eps}")
    center = np.asarray(patch.center, dtype=float)
    half = 0.5 * (patch.side - eps)
    return Box(center - half, center + half)


def epsilon_schedule(iteration: int, cfg: SboConfig) -> float:
    """Linear ramp from ``eps_initial`` at iteration 1 to ``0.95 * patch_size`` at ``M``."""
    m = cfg.iterations
    if not 1 <= iteration <= m:
        raise ValueError(f"iteration must be in [1, {m}], got {iteration}")
    if m == 1:
        return cfg.eps_initial
    end = cfg.eps_end_fraction * cfg.patch_size
    return cfg.eps_initial + (iteration - 1) / (m - 1) * (end - cfg.eps_initial)


def _inner_minimize(model: SurrogateModel, box: Box, restarts: int, rng: np.random.Generator,
                    max_iter: int = 500, gtol: float = 1e-8, xtol: float = 1e-10):
    starts = [box.center, np.clip(model.best_sample(), box.lo, box.hi)]
    starts += [box.lo + (box.hi - box.lo) * rng.random(box.lo.size) for _ in range(restarts - 2)]
    best = None
    for x0 in starts[:restarts]:
        x, f, converged, _ = kernels.projected_descent(
            model.points, model.values, model.sigma, model.normalized, np.asarray(x0, dtype=float),
            box.lo, box.hi, max_iter, gtol, xtol,
        )
        # Converged starts rank ahead of unconverged ones.
        key = (not converged, f)
        if best is None or key < best[0]:
            best = (key, np.asarray(x), float(f))
    return best[1], best[2]


def inner_minimize(model: SurrogateModel, bounds: Box, restarts: int = 4,
                   rng: Optional[np.random.Generator] = None, **kwargs) -> np.ndarray:
    """Multi-start projected gradient descent of the surrogate inside ``bounds``."""
    if model.dim != bounds.lo.size:
        raise ValueError(f"model dimension {model.dim} does not match bounds {bounds.lo.size}")
    if rng is None:
        rng = np.random.default_rng(0)
    x, _ = _inner_minimize(model, bounds, restarts, rng, **kwargs)
    return x


@dataclass
class SboState:
    center: np.ndarray
    iteration: int = 0
    minima: list = field(default_factory=list)
    trace: Optional[RunTrace] = None

    @classmethod
    def start(cls, theta0) -> "SboState":
        theta0 = np.array(theta0, dtype=float)
        return cls(center=theta0.copy(), trace=RunTrace("sbo", theta0))


def _mean_near(minima, center, cfg: SboConfig) -> np.ndarray:
    box = patch_bounds(Patch(center, cfg.patch_size), cfg.eps_final)
    near = [m for m in minima if box.contains(m)]
    if not near:
        return np.array(center, dtype=float)
    return np.mean(near, axis=0)


def sbo_iterate(state: SboState, objective: NoisyObjective, cfg: SboConfig,
                rng: np.random.Generator) -> SboState:
    i = state.iteration + 1
    center = state.center
    dim = center.size
    ell = cfg.patch_size

    points = center - 0.5 * ell + ell * latin_hypercube(cfg.tau, dim, rng)
    values = np.array([objective.estimate(pt, rng) for pt in points], dtype=float)
    sigma = cfg.sigma if cfg.sigma is not None else silverman_bandwidth(cfg.tau, dim)
    model = fit_arrays(points, values, sigma, cfg.normalize_kernel)

    patch = Patch(center, ell)
    eps = epsilon_schedule(i, cfg)
    new_center, w_min = _inner_minimize(
        model, patch_bounds(patch, eps), cfg.restarts, rng,
        cfg.inner_max_iter, cfg.inner_gtol, cfg.inner_xtol,
    )
    interior = patch_bounds(patch, cfg.eps_interior).contains(new_center)
    if interior:
        state.minima.append(new_center.copy())

    shots = objective.shots * cfg.tau
    prev = state.trace.total_shots if state.trace.records else 0
    state.trace.records.append(
        IterationRecord(
            iteration=i,
            center=center.copy(),
            samples=points,
            values=values,
            output=new_center.copy(),
            estimate=_mean_near(state.minima, new_center, cfg),
            shots=shots,
            cumulative_shots=prev + shots,
            eps=eps,
            surrogate_min=w_min,
            added_to_minima=interior,
        )
    )
    state.center = new_center
    state.iteration = i
    return state


def finalize(state: SboState, cfg: SboConfig) -> np.ndarray:
    """Mean of collected minima inside the ``eps_final`` box of the last center."""
    return _mean_near(state.minima, state.center, cfg)


def sbo_run(objective: NoisyObjective, theta0, cfg: SboConfig,
            rng: np.random.Generator) -> RunTrace:
    theta0 = np.asarray(theta0, dtype=float)
    if theta0.shape != (objective.dim,):
        raise ValueError(f"theta0 has shape {theta0.shape}, objective dimension is {objective.dim}")
    state = SboState.start(theta0)
    for _ in range(cfg.iterations):
        sbo_iterate(state, objective, cfg, rng)
    state.trace.minima = list(state.minima)
    state.trace.theta_opt = finalize(state, cfg)
    return state.trace
