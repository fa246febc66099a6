"""Statevector preparation, exact expectations and shot-sampled estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .. import kernels
from .graphs import Graph
from .observables import Observable

MAX_QUBITS = 16

_H = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)
_SDG = np.array([[1.0, 0.0], [0.0, -1j]], dtype=complex)
# Maps the X (resp. Y) eigenbasis onto the computational basis.
_ROTATE_TO_Z = {"X": _H, "Y": _H @ _SDG}


class QubitLimitError(ValueError):
    pass


def _check_qubits(n: int, max_qubits: int) -> None:
    if n > max_qubits:
        raise QubitLimitError(
            f"{n} qubits exceeds the statevector limit of {max_qubits} "
            f"(2**{n} amplitudes)"
        )


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    n: int

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} amplitudes, got shape {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True)
class QaoaParams:
    gammas: np.ndarray
    betas: np.ndarray

    def __post_init__(self):
        g = np.atleast_1d(np.asarray(self.gammas, dtype=float))
        b = np.atleast_1d(np.asarray(self.betas, dtype=float))
        if g.ndim != 1 or g.shape != b.shape or g.size < 1:
            raise ValueError("gammas and betas must be equal-length 1-d vectors, p >= 1")
        object.__setattr__(self, "gammas", g)
        object.__setattr__(self, "betas", b)

    @property
    def p(self) -> int:
        return self.gammas.size

    @classmethod
    def from_vector(cls, theta) -> "QaoaParams":
        """Split ``theta = (gamma_1..gamma_p, beta_1..beta_p)``."""
        theta = np.asarray(theta, dtype=float)
        if theta.ndim != 1 or theta.size % 2 or theta.size == 0:
            raise ValueError(f"QAOA parameter vector needs even length, got {theta.shape}")
        p = theta.size // 2
        return cls(theta[:p], theta[p:])

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.gammas, self.betas])


@dataclass(frozen=True)
class ShotPlan:
    """Shots per measurement basis; ``per_basis=None`` means exact evaluation."""

    per_basis: Optional[tuple[int, ...]]

    def __post_init__(self):
        if self.per_basis is not None:
            shots = tuple(int(k) for k in self.per_basis)
            if not shots or any(k < 1 for k in shots):
                raise ValueError(f"every basis needs at least one shot, got {shots}")
            object.__setattr__(self, "per_basis", shots)

    @classmethod
    def exact(cls) -> "ShotPlan":
        return cls(None)

    @classmethod
    def uniform(cls, shots: int, num_bases: int) -> "ShotPlan":
        return cls((shots,) * num_bases)

    @property
    def is_exact(self) -> bool:
        return self.per_basis is None

    @property
    def total(self) -> int:
        return 0 if self.per_basis is None else sum(self.per_basis)


def maxcut_diagonal(g: Graph) -> np.ndarray:
    """Diagonal of ``sum w_ij Z_i Z_j`` in the computational basis."""
    idx = np.arange(1 << g.n)
    diag = np.zeros(idx.size)
    for i, j, w in g.edges:
        zi = 1 - 2 * ((idx >> i) & 1)
        zj = 1 - 2 * ((idx >> j) & 1)
        diag += w * zi * zj
    return diag


def qaoa_state(
    g: Graph,
    params: QaoaParams,
    max_qubits: int = MAX_QUBITS,
    diag: Optional[np.ndarray] = None,
) -> StateVector:
    """``prod_l exp(-i beta_l sum X) exp(-i gamma_l H_p) |+>^n``."""
    _check_qubits(g.n, max_qubits)
    if diag is None:
        diag = maxcut_diagonal(g)
    dim = 1 << g.n
    psi = np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128)
    kernels.qaoa_evolve(psi, diag, params.gammas, params.betas, g.n)
    return StateVector(psi, g.n)


def _apply_1q(psi: np.ndarray, n: int, q: int, gate: np.ndarray) -> None:
    view = psi.reshape(1 << (n - 1 - q), 2, 1 << q)
    view[...] = np.einsum("ab,ibj->iaj", gate, view)


def _ry(angle: float) -> np.ndarray:
    c, s = math.cos(angle / 2.0), math.sin(angle / 2.0)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _cz_ladder_signs(n: int) -> np.ndarray:
    idx = np.arange(1 << n)
    sign = np.ones(idx.size)
    for q in range(n - 1):
        both = ((idx >> q) & 1) & ((idx >> (q + 1)) & 1)
        sign[both == 1] *= -1.0
    return sign


def hardware_efficient_state(
    n: int,
    layers: int,
    params: Sequence[float],
    max_qubits: int = MAX_QUBITS,
) -> StateVector:
    """Layers of per-qubit RY rotations followed by a CZ ladder, from ``|0...0>``.

    ``params[layer * n + q]`` is the RY angle on qubit ``q`` in ``layer``.
    """
    _check_qubits(n, max_qubits)
    params = np.asarray(params, dtype=float)
    if params.shape != (n * layers,):
        raise ValueError(f"expected {n * layers} parameters, got {params.size}")
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[0] = 1.0
    cz = _cz_ladder_signs(n)
    for layer in range(layers):
        for q in range(n):
            _apply_1q(psi, n, q, _ry(params[layer * n + q]))
        psi *= cz
    return StateVector(psi, n)


def _rotated_probabilities(state: StateVector, basis: str) -> np.ndarray:
    if all(a in "IZ" for a in basis):
        return state.probabilities()
    psi = state.amplitudes.copy()
    for q, a in enumerate(basis):
        if a in _ROTATE_TO_Z:
            _apply_1q(psi, state.n, q, _ROTATE_TO_Z[a])
    return np.abs(psi) ** 2


def _check_match(state: StateVector, obs: Observable) -> None:
    if state.n != obs.n:
        raise ValueError(f"state has {state.n} qubits, observable {obs.n}")


def exact_expectation(state: StateVector, obs: Observable) -> float:
    _check_match(state, obs)
    total = 0.0
    for g, basis in enumerate(obs.bases):
        probs = _rotated_probabilities(state, basis)
        total += float(obs.coefficients(g) @ (obs.sign_table(g) @ probs))
    return total


def sample_estimate(
    state: StateVector,
    obs: Observable,
    plan: ShotPlan,
    rng: np.random.Generator,
) -> float:
    """Shot-noise estimate: per basis, average the sampled eigenvalues.

    Sampling ``K`` bitstrings is done through their multinomial histogram,
    which has the same distribution as ``K`` independent draws.
    """
    _check_match(state, obs)
    if plan.is_exact:
        return exact_expectation(state, obs)
    if len(plan.per_basis) != obs.num_bases:
        raise ValueError(
            f"shot plan covers {len(plan.per_basis)} bases, observable has {obs.num_bases}"
        )
    total = 0.0
    for g, basis in enumerate(obs.bases):
        probs = _rotated_probabilities(state, basis)
        probs = probs / probs.sum()
        shots = plan.per_basis[g]
        counts = rng.multinomial(shots, probs)
        # Integer sign sums keep constant observables exact.
        sums = obs.sign_table(g).astype(np.int64) @ counts
        total += float(obs.coefficients(g) @ (sums / shots))
    return total
