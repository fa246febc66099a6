"""Gaussian-kernel surrogate of a noisy cost function on one patch.

The default model is the plain weighted kernel sum

    W(theta) = sum_j v_j * exp(-|theta - theta_j|^2 / (2 sigma))

with no normalisation by the kernel weights. Note the bandwidth enters
linearly in the denominator, not squared. W therefore carries an offset and
scale bias relative to the sampled function.

``normalized=True`` divides by ``sum_j k_j`` instead, giving a kernel
weighted average of the samples. When ``sigma`` is wide compared to the
patch, the plain sum of negative values is minimised close to the sample
centroid, so an optimizer walking on it barely moves; the normalized form
keeps the descent direction of the data at any offset.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels


def silverman_bandwidth(tau: int, dim: int) -> float:
    """``(4 / (tau * (dim + 2))) ** (1 / (dim + 4))``."""
    if tau < 1 or dim < 1:
        raise ValueError(f"tau and dim must be positive, got tau={tau}, dim={dim}")
    return (4.0 / (tau * (dim + 2))) ** (1.0 / (dim + 4))


@dataclass(frozen=True)
class SamplePoint:
    location: np.ndarray
    value: float


@dataclass(frozen=True)
class SurrogateModel:
    points: np.ndarray  # (tau, D)
    values: np.ndarray  # (tau,)
    sigma: float
    normalized: bool = False

    @property
    def tau(self) -> int:
        return self.values.size

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def _query(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.dim,):
            raise ValueError(f"query has shape {theta.shape}, model dimension is {self.dim}")
        return theta

    def evaluate(self, theta) -> float:
        value, _ = kernels.surrogate_value_grad(self.points, self.values, self.sigma, self._query(theta), self.normalized)
        return float(value)

    def gradient(self, theta) -> np.ndarray:
        _, grad = kernels.surrogate_value_grad(self.points, self.values, self.sigma, self._query(theta), self.normalized)
        return np.asarray(grad)

    def value_and_gradient(self, theta):
        value, grad = kernels.surrogate_value_grad(self.points, self.values, self.sigma, self._query(theta), self.normalized)
        return float(value), np.asarray(grad)

    def best_sample(self) -> np.ndarray:
        return self.points[int(np.argmin(self.values))].copy()

    def to_dict(self) -> dict:
        return {
            "sigma": self.sigma,
            "normalized": self.normalized,
            "points": self.points.tolist(),
            "values": self.values.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SurrogateModel":
        return fit_arrays(
            np.array(data["points"], dtype=float),
            np.array(data["values"], dtype=float),
            float(data["sigma"]),
            bool(data.get("normalized", False)),
        )

    def dumps(self) -> str:
        return json.dumps(self.to_dict())


def fit_arrays(points: np.ndarray, values: np.ndarray, sigma: float, normalized: bool = False) -> SurrogateModel:
    points = np.ascontiguousarray(points, dtype=float)
    values = np.ascontiguousarray(values, dtype=float)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValueError("need a non-empty (tau, D) array of sample locations")
    if values.shape != (points.shape[0],):
        raise ValueError(f"{values.size} values for {points.shape[0]} locations")
    if not np.all(np.isfinite(values)):
        raise ValueError("sample values must be finite")
    if not sigma > 0.0:
        raise ValueError(f"bandwidth must be positive, got {sigma}")
    points.setflags(write=False)
    values.setflags(write=False)
    return SurrogateModel(points, values, float(sigma), bool(normalized))


def fit(samples: Sequence[SamplePoint], sigma: float, normalized: bool = False) -> SurrogateModel:
    if not samples:
        raise ValueError("cannot fit a surrogate to zero samples")
    dims = {np.asarray(s.location).shape for s in samples}
    if len(dims) != 1:
        raise ValueError(f"sample locations have mismatched shapes {sorted(dims)}")
    points = np.stack([np.asarray(s.location, dtype=float) for s in samples])
    values = np.array([s.value for s in samples], dtype=float)
    return fit_arrays(points, values, sigma, normalized)
