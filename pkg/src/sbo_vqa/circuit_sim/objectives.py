"""Variational cost functions backed by the statevector simulator."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .graphs import Graph
from .observables import Observable, maxcut_observable
from .states import (
    MAX_QUBITS,
    QaoaParams,
    ShotPlan,
    exact_expectation,
    hardware_efficient_state,
    maxcut_diagonal,
    qaoa_state,
    sample_estimate,
    _check_qubits,
)


def _flip_sum(psi: np.ndarray, n: int) -> np.ndarray:
    """``sum_q X_q psi``."""
    idx = np.arange(psi.size)
    out = np.zeros_like(psi)
    for q in range(n):
        out += psi[idx ^ (1 << q)]
    return out


@dataclass(frozen=True)
class QaoaObjective:
    """MaxCut QAOA energy ``<psi(gamma, beta)| H_p |psi(gamma, beta)>``.

    ``theta`` is laid out as ``(gamma_1..gamma_p, beta_1..beta_p)``; ``shots``
    is shots per estimate (one measurement basis, so K equals the total).
    """

    graph: Graph
    p: int
    shots: int = 100
    max_qubits: int = MAX_QUBITS
    _obs: Observable = field(init=False, repr=False, compare=False)
    _diag: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.p < 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        _check_qubits(self.graph.n, self.max_qubits)
        object.__setattr__(self, "_obs", maxcut_observable(self.graph))
        object.__setattr__(self, "_diag", maxcut_diagonal(self.graph))

    @property
    def dim(self) -> int:
        return 2 * self.p

    @property
    def observable(self) -> Observable:
        return self._obs

    def state(self, theta):
        params = QaoaParams.from_vector(theta)
        if params.p != self.p:
            raise ValueError(f"expected {2 * self.p} parameters, got {2 * params.p}")
        return qaoa_state(self.graph, params, self.max_qubits, diag=self._diag)

    def exact(self, theta) -> float:
        probs = self.state(theta).probabilities()
        return float(probs @ self._diag)

    def estimate(self, theta, rng: np.random.Generator) -> float:
        plan = ShotPlan.uniform(self.shots, 1)
        return sample_estimate(self.state(theta), self._obs, plan, rng)

    def exact_and_gradient(self, theta):
        """Exact energy and its gradient by adjoint differentiation."""
        params = QaoaParams.from_vector(theta)
        n, diag = self.graph.n, self._diag
        dim = 1 << n
        psi = np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)
        for gamma, beta in zip(params.gammas, params.betas):
            psi = np.exp(-1j * gamma * diag) * psi
            psi = _mixer(psi, n, beta)
        lam = diag * psi
        value = float(np.vdot(psi, lam).real)
        grad_g = np.zeros(self.p)
        grad_b = np.zeros(self.p)
        for layer in reversed(range(self.p)):
            grad_b[layer] = 2.0 * np.vdot(lam, -1j * _flip_sum(psi, n)).real
            psi = _mixer(psi, n, -params.betas[layer])
            lam = _mixer(lam, n, -params.betas[layer])
            grad_g[layer] = 2.0 * np.vdot(lam, -1j * diag * psi).real
            phase = np.exp(1j * params.gammas[layer] * diag)
            psi = phase * psi
            lam = phase * lam
        return value, np.concatenate([grad_g, grad_b])

    def with_shots(self, shots: int) -> "QaoaObjective":
        return replace(self, shots=shots)


def _mixer(psi: np.ndarray, n: int, beta: float) -> np.ndarray:
    out = psi.copy()
    c, s = np.cos(beta), np.sin(beta)
    for q in range(n):
        view = out.reshape(1 << (n - 1 - q), 2, 1 << q)
        a = view[:, 0, :].copy()
        b = view[:, 1, :].copy()
        view[:, 0, :] = c * a - 1j * s * b
        view[:, 1, :] = c * b - 1j * s * a
    return out


@dataclass(frozen=True)
class HardwareEfficientObjective:
    """RY + CZ-ladder ansatz against a general Pauli observable.

    ``shots`` is per measurement basis, so one estimate costs
    ``shots * observable.num_bases`` executions.
    """

    n: int
    layers: int
    observable: Observable
    shots_per_basis: int = 100
    max_qubits: int = MAX_QUBITS

    def __post_init__(self):
        if self.observable.n != self.n:
            raise ValueError("observable size does not match the ansatz")

    @property
    def dim(self) -> int:
        return self.n * self.layers

    @property
    def shots(self) -> int:
        return self.shots_per_basis * self.observable.num_bases

    def state(self, theta):
        return hardware_efficient_state(self.n, self.layers, theta, self.max_qubits)

    def exact(self, theta) -> float:
        return exact_expectation(self.state(theta), self.observable)

    def estimate(self, theta, rng: np.random.Generator) -> float:
        plan = ShotPlan.uniform(self.shots_per_basis, self.observable.num_bases)
        return sample_estimate(self.state(theta), self.observable, plan, rng)

    def exact_and_gradient(self, theta):
        """Energy and its gradient by the two-term parameter-shift rule.

        Each parameter drives ``exp(-i theta Y / 2)``, so shifting it by
        ``+-pi/2`` gives the exact partial derivative.
        """
        theta = np.asarray(theta, dtype=float)
        grad = np.empty(theta.size)
        for m in range(theta.size):
            shift = np.zeros(theta.size)
            shift[m] = 0.5 * np.pi
            grad[m] = 0.5 * (self.exact(theta + shift) - self.exact(theta - shift))
        return self.exact(theta), grad

    def with_shots(self, shots: int) -> "HardwareEfficientObjective":
        """``shots`` is the total per estimate; split evenly across bases."""
        nu = self.observable.num_bases
        if shots % nu:
            raise ValueError(f"{shots} shots cannot be split evenly over {nu} bases")
        return replace(self, shots_per_basis=shots // nu)
