"""Reference optimizers: SPSA and a finite-difference projected BFGS."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .objective import NoisyObjective
from .trace import IterationRecord, RunTrace


@dataclass(frozen=True)
class SpsaConfig:
    a: float = 0.2
    c: float = 0.2
    alpha: float = 0.602
    gamma: float = 0.101
    A: float = 0.0
    iterations: int = 100

    def __post_init__(self):
        if not (self.a > 0 and self.c > 0):
            raise ValueError("SPSA gains a and c must be positive")
        if not 0 < self.gamma < self.alpha <= 1:
            raise ValueError(f"need 0 < gamma < alpha <= 1, got alpha={self.alpha}, gamma={self.gamma}")
        if self.A < 0:
            raise ValueError("stability offset A must be non-negative")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")

    def step_gain(self, k: int) -> float:
        return self.a / (k + 1 + self.A) ** self.alpha

    def perturbation_gain(self, k: int) -> float:
        return self.c / (k + 1) ** self.gamma

    def to_dict(self) -> dict:
        return asdict(self)


def spsa_gradient(objective: NoisyObjective, theta, ck: float, delta, rng):
    """Two-point simultaneous-perturbation gradient estimate."""
    plus = theta + ck * delta
    minus = theta - ck * delta
    y_plus = objective.estimate(plus, rng)
    y_minus = objective.estimate(minus, rng)
    ghat = (y_plus - y_minus) / (2.0 * ck) / delta
    return ghat, np.stack([plus, minus]), np.array([y_plus, y_minus])


def spsa_run(objective: NoisyObjective, theta0, cfg: SpsaConfig,
             rng: np.random.Generator) -> RunTrace:
    theta = np.array(theta0, dtype=float)
    if theta.shape != (objective.dim,):
        raise ValueError(f"theta0 has shape {theta.shape}, objective dimension is {objective.dim}")
    trace = RunTrace("spsa", theta.copy())
    shots = 2 * objective.shots
    for k in range(cfg.iterations):
        delta = rng.choice(np.array([-1.0, 1.0]), size=theta.size)
        ck = cfg.perturbation_gain(k)
        ghat, samples, values = spsa_gradient(objective, theta, ck, delta, rng)
        new = theta - cfg.step_gain(k) * ghat
        trace.records.append(
            IterationRecord(
                iteration=k + 1,
                center=theta.copy(),
                samples=samples,
                values=values,
                output=new.copy(),
                estimate=new.copy(),
                shots=shots,
                cumulative_shots=(k + 1) * shots,
            )
        )
        theta = new
    trace.theta_opt = theta
    return trace


@dataclass(frozen=True)
class QuasiNewtonConfig:
    iterations: int = 100
    fd_step: float = 1e-2
    max_step: float = 0.5
    bounds: Optional[tuple] = None  # (lo, hi) arrays or None

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not self.fd_step > 0 or not self.max_step > 0:
            raise ValueError("fd_step and max_step must be positive")


def _project(x, bounds):
    if bounds is None:
        return x
    return np.clip(x, bounds[0], bounds[1])


def quasi_newton_run(objective: NoisyObjective, theta0, cfg: QuasiNewtonConfig,
                     rng: np.random.Generator) -> RunTrace:
    """Projected BFGS with central finite-difference gradients of the noisy cost.

    Every iteration spends exactly ``2D + 1`` estimates: the cost at the
    current point plus the ``2D`` difference evaluations. Acceptance of the
    previous step is judged lagged, once the cost at the new point is known;
    a step that raised the cost is undone, the inverse Hessian reset and the
    trust radius (initially ``max_step``) halved. Accepted steps double the
    radius again, up to ``max_step``.
    """
    bounds = None
    if cfg.bounds is not None:
        bounds = (np.asarray(cfg.bounds[0], dtype=float), np.asarray(cfg.bounds[1], dtype=float))
    x = _project(np.array(theta0, dtype=float), bounds)
    dim = x.size
    if x.shape != (objective.dim,):
        raise ValueError(f"theta0 has shape {x.shape}, objective dimension is {objective.dim}")
    h = cfg.fd_step
    eye = np.eye(dim)
    H = eye.copy()
    radius = cfg.max_step
    prev = None  # (x, f, g) of the last accepted point
    best_x = x.copy()
    trace = RunTrace("qn", x.copy())
    shots = (2 * dim + 1) * objective.shots

    for k in range(cfg.iterations):
        f = objective.estimate(x, rng)
        samples = [x.copy()]
        values = [f]
        g = np.empty(dim)
        for m in range(dim):
            xp, xm = x + h * eye[m], x - h * eye[m]
            fp, fm = objective.estimate(xp, rng), objective.estimate(xm, rng)
            g[m] = (fp - fm) / (2.0 * h)
            samples += [xp, xm]
            values += [fp, fm]
        center = x.copy()

        if prev is not None and f > prev[1]:
            x, f, g = prev
            H = eye.copy()
            radius *= 0.5
        else:
            if prev is not None:
                s = x - prev[0]
                y = g - prev[2]
                sy = s @ y
                if sy > 1e-12:
                    if np.array_equal(H, eye):
                        H = eye * (sy / (y @ y))
                    rho = 1.0 / sy
                    V = eye - rho * np.outer(s, y)
                    H = V @ H @ V.T + rho * np.outer(s, s)
            prev = (x.copy(), f, g.copy())
            best_x = x.copy()
            radius = min(cfg.max_step, 2.0 * radius)

        step = -(H @ g)
        norm = np.linalg.norm(step)
        if norm > radius:
            step *= radius / norm
        new = _project(x + step, bounds)
        trace.records.append(
            IterationRecord(
                iteration=k + 1,
                center=center,
                samples=np.array(samples),
                values=np.array(values),
                output=new.copy(),
                estimate=best_x.copy(),
                shots=shots,
                cumulative_shots=(k + 1) * shots,
            )
        )
        x = new

    trace.theta_opt = best_x
    return trace
