"""The estimator interface shared by every optimizer.

An objective exposes ``dim``, ``shots`` (circuit executions charged per
call to ``estimate``) and ``estimate(theta, rng) -> float``. Objectives that
can also be evaluated noiselessly provide ``exact(theta)``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Protocol

import numpy as np


class NoisyObjective(Protocol):
    dim: int
    shots: int

    def estimate(self, theta: np.ndarray, rng: np.random.Generator) -> float: ...


@dataclass(frozen=True)
class FunctionObjective:
    """A classical test function with optional additive Gaussian noise."""

    func: Callable[[np.ndarray], float]
    dim: int
    noise: float = 0.0
    shots: int = 1

    def exact(self, theta) -> float:
        return float(self.func(np.asarray(theta, dtype=float)))

    def estimate(self, theta, rng: np.random.Generator) -> float:
        value = self.exact(theta)
        if self.noise > 0.0:
            value += self.noise * rng.standard_normal()
        return value

    def with_shots(self, shots: int) -> "FunctionObjective":
        return replace(self, shots=shots)


def quadratic_bowl(center, depth: float = 0.0, curvature: float = 1.0) -> Callable[[np.ndarray], float]:
    """``curvature * |theta - center|^2 - depth``."""
    center = np.asarray(center, dtype=float)

    def bowl(theta):
        d = np.asarray(theta, dtype=float) - center
        return float(curvature * d @ d - depth)

    return bowl
