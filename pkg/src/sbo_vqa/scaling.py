"""Patch-size heuristics from critical-point counting, the optimal-patch sweep
and the power-law fit of swept optima.

An ansatz whose ``j``-th generator compiles to ``lambda_j`` parametrised
Z rotations has at most ``(4 * sum(lambda))**D`` critical points, which
suggests a patch side of at least ``1 / (4 * sum(lambda))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

DEFAULT_SWEEP_GRID = tuple(round(0.02 * k, 2) for k in range(1, 21))


@dataclass(frozen=True)
class AnsatzComplexity:
    lambdas: tuple[int, ...]

    def __post_init__(self):
        lambdas = tuple(self.lambdas)
        if not lambdas:
            raise ValueError("need at least one parameter")
        if any(lam < 1 for lam in lambdas):
            raise ValueError(f"every rotation count must be >= 1, got {lambdas}")
        object.__setattr__(self, "lambdas", lambdas)

    @classmethod
    def qaoa(cls, p: int, kappa: int) -> "AnsatzComplexity":
        """Mixer (one rotation) and ``kappa``-regular ZZ layer (``kappa`` rotations), ``p`` times."""
        if p < 1 or kappa < 1:
            raise ValueError(f"need p >= 1 and kappa >= 1, got p={p}, kappa={kappa}")
        return cls((1, kappa) * p)

    @property
    def dim(self) -> int:
        return len(self.lambdas)

    @property
    def total(self):
        return sum(self.lambdas)


def _as_complexity(c) -> AnsatzComplexity:
    return c if isinstance(c, AnsatzComplexity) else AnsatzComplexity(tuple(c))


def log_critical_point_bound(c) -> float:
    """Natural log of ``(4 * sum(lambda))**D``."""
    c = _as_complexity(c)
    return c.dim * math.log(4 * c.total)


def critical_point_bound(c) -> float:
    """``(4 * sum(lambda))**D``; ``inf`` when it exceeds the float range."""
    c = _as_complexity(c)
    base = 4 * c.total
    if isinstance(base, int):
        exact = base ** c.dim
        try:
            return float(exact)
        except OverflowError:
            return math.inf
    try:
        return math.pow(base, c.dim)
    except OverflowError:
        return math.inf


def patch_size_heuristic(c) -> float:
    c = _as_complexity(c)
    return 1.0 / (4 * c.total)


def qaoa_patch_size(p: int, kappa: int) -> float:
    if p < 1 or kappa < 1:
        raise ValueError(f"need p >= 1 and kappa >= 1, got p={p}, kappa={kappa}")
    return 1.0 / (4 * p * (kappa + 1))


# -- optimal patch size sweep ---------------------------------------------


@dataclass
class SweepResult:
    grid: np.ndarray
    mean_errors: np.ndarray
    stderr: np.ndarray
    runs: int
    ell_star: float
    errors: np.ndarray = field(repr=False, default=None)  # (len(grid), runs)

    def to_csv(self) -> str:
        lines = ["ell,mean_error,stderr,runs"]
        for ell, m, s in zip(self.grid, self.mean_errors, self.stderr):
            lines.append(f"{float(ell)!r},{float(m)!r},{float(s)!r},{self.runs}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.tolist(),
            "mean_errors": self.mean_errors.tolist(),
            "stderr": self.stderr.tolist(),
            "runs": self.runs,
            "ell_star": self.ell_star,
        }


class SweepAborted(RuntimeError):
    """Raised when a sweep run fails; ``partial`` maps finished ell to errors."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


def spline_minimizer(grid, values, resolution: float = 1e-3) -> float:
    """Minimiser of the natural cubic spline through ``(grid, values)``."""
    grid = np.asarray(grid, dtype=float)
    spline = CubicSpline(grid, np.asarray(values, dtype=float), bc_type="natural")
    fine = np.arange(grid[0], grid[-1] + 0.5 * resolution, resolution)
    fine = np.clip(fine, grid[0], grid[-1])
    return float(fine[int(np.argmin(spline(fine)))])


def optimal_patch_sweep(
    run_error: Callable[[float, np.random.Generator], float],
    grid: Sequence[float] = DEFAULT_SWEEP_GRID,
    runs: int = 10,
    rng: Optional[np.random.Generator] = None,
) -> SweepResult:
    """Average ``runs`` final errors per patch size and locate the spline minimum.

    ``run_error(ell, rng)`` performs one optimisation at patch size ``ell``
    and returns its final error. Each (ell, run) pair gets its own child
    generator spawned from ``rng`` in grid order.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 4:
        raise ValueError("sweep grid needs at least 4 points")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("sweep grid must be strictly increasing")
    if runs < 2:
        raise ValueError("need at least 2 runs per patch size")
    if rng is None:
        rng = np.random.default_rng()
    children = rng.spawn(grid.size * runs)
    errors = np.empty((grid.size, runs))
    for a, ell in enumerate(grid):
        for r in range(runs):
            try:
                errors[a, r] = run_error(float(ell), children[a * runs + r])
            except Exception as exc:
                partial = {float(grid[b]): errors[b].tolist() for b in range(a)}
                raise SweepAborted(f"run {r} at ell={ell} failed: {exc}", partial) from exc
    if not np.all(np.isfinite(errors)):
        raise ValueError("sweep produced non-finite errors")
    mean = errors.mean(axis=1)
    stderr = errors.std(axis=1, ddof=1) / math.sqrt(runs)
    return SweepResult(grid, mean, stderr, runs, spline_minimizer(grid, mean), errors)


# -- power-law fit ---------------------------------------------------------


@dataclass(frozen=True)
class ScalingFit:
    alpha: float
    beta: float
    residual: float

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "beta": self.beta, "residual": self.residual}


def fit_scaling(points: Sequence[tuple[float, float, float]]) -> ScalingFit:
    """Fit ``ell = beta * (kappa * p + kappa) ** -alpha`` to ``(p, kappa, ell)`` triples.

    Least squares on ``log ell = log beta - alpha * log(kappa * (p + 1))``;
    ``residual`` is the 2-norm of the log-space residuals.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3 or pts.shape[0] < 2:
        raise ValueError("need at least two (p, kappa, ell) points")
    p, kappa, ell = pts.T
    if np.any(ell <= 0) or np.any(kappa <= 0) or np.any(p < 0):
        raise ValueError("p, kappa and ell must be positive")
    x = np.log(kappa * p + kappa)
    if np.ptp(x) == 0:
        raise ValueError("degenerate design: all points share the same kappa * (p + 1)")
    design = np.column_stack([np.ones_like(x), -x])
    coef, *_ = np.linalg.lstsq(design, np.log(ell), rcond=None)
    resid = np.log(ell) - design @ coef
    return ScalingFit(alpha=float(coef[1]), beta=float(math.exp(coef[0])), residual=float(np.linalg.norm(resid)))
