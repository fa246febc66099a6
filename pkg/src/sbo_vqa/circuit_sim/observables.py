"""Weighted Pauli-sum observables grouped into qubit-wise commuting bases.

Axis strings are read left to right as qubits ``0..n-1``; qubit ``q`` is
bit ``q`` of a computational-basis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .graphs import Graph

_AXES = frozenset("IXYZ")


@dataclass(frozen=True)
class PauliTerm:
    coefficient: float
    axes: str

    def __post_init__(self):
        object.__setattr__(self, "coefficient", float(self.coefficient))
        object.__setattr__(self, "axes", self.axes.upper())
        if not np.isfinite(self.coefficient):
            raise ValueError(f"non-finite coefficient {self.coefficient}")
        if not self.axes or set(self.axes) - _AXES:
            raise ValueError(f"invalid Pauli string {self.axes!r}")

    @property
    def n(self) -> int:
        return len(self.axes)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(q for q, a in enumerate(self.axes) if a != "I")


def _compatible(basis: str, axes: str) -> bool:
    return all(a == "I" or b == "I" or a == b for a, b in zip(basis, axes))


def _merge(basis: str, axes: str) -> str:
    return "".join(b if a == "I" else a for a, b in zip(axes, basis))


class Observable:
    """A Pauli sum with its measurement bases.

    ``bases[g]`` is the per-qubit measurement axis string of group ``g`` and
    ``groups[g]`` the indices of the terms measured in it. Sign tables used
    for exact and sampled expectations are built once here.
    """

    def __init__(self, terms: Sequence[PauliTerm], bases: Sequence[str], groups: Sequence[Sequence[int]]):
        if not terms:
            raise ValueError("observable needs at least one term")
        n = terms[0].n
        if any(t.n != n for t in terms):
            raise ValueError("all terms must act on the same number of qubits")
        seen = sorted(i for grp in groups for i in grp)
        if seen != list(range(len(terms))):
            raise ValueError("every term must belong to exactly one group")
        for basis, grp in zip(bases, groups):
            for i in grp:
                if not _compatible(basis, terms[i].axes) or any(
                    a != "I" and basis[q] != a for q, a in enumerate(terms[i].axes)
                ):
                    raise ValueError(f"term {terms[i].axes} not measurable in basis {basis}")
        self.terms = tuple(terms)
        self.bases = tuple(bases)
        self.groups = tuple(tuple(g) for g in groups)
        self.n = n
        self._signs = None

    @property
    def num_bases(self) -> int:
        return len(self.bases)

    def coefficients(self, group: int) -> np.ndarray:
        return np.array([self.terms[i].coefficient for i in self.groups[group]])

    def sign_table(self, group: int) -> np.ndarray:
        """``(terms_in_group, 2**n)`` int8 table of +/-1 eigenvalues."""
        if self._signs is None:
            idx = np.arange(1 << self.n)
            bits = ((idx[None, :] >> np.arange(self.n)[:, None]) & 1).astype(np.int8)
            parity = 1 - 2 * bits  # (n, 2**n), +1 for bit 0
            tables = []
            for grp in self.groups:
                tab = np.ones((len(grp), idx.size), dtype=np.int8)
                for row, i in enumerate(grp):
                    for q in self.terms[i].support:
                        tab[row] *= parity[q]
                tables.append(tab)
            self._signs = tuple(tables)
        return self._signs[group]

    def to_text(self) -> str:
        return "".join(f"{t.coefficient!r} {t.axes}\n" for t in self.terms)

    @classmethod
    def from_text(cls, text: str) -> "Observable":
        terms = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 2:
                raise ValueError(f"line {lineno}: expected 'coeff axes'")
            try:
                terms.append(PauliTerm(float(fields[0]), fields[1]))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        return group_commuting(terms)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "Observable":
        return cls.from_text(Path(path).read_text())

    def __repr__(self):
        return f"Observable(n={self.n}, terms={len(self.terms)}, bases={self.bases})"


def group_commuting(terms: Iterable[PauliTerm]) -> Observable:
    """Greedy first-fit grouping into qubit-wise commuting sets."""
    terms = list(terms)
    if not terms:
        raise ValueError("observable needs at least one term")
    n = terms[0].n
    bases: list[str] = []
    groups: list[list[int]] = []
    for idx, term in enumerate(terms):
        if term.n != n:
            raise ValueError("all terms must act on the same number of qubits")
        for g, basis in enumerate(bases):
            if _compatible(basis, term.axes):
                bases[g] = _merge(basis, term.axes)
                groups[g].append(idx)
                break
        else:
            bases.append(term.axes)
            groups.append([idx])
    return Observable(terms, bases, groups)


def maxcut_observable(g: Graph) -> Observable:
    """``sum_ij w_ij Z_i Z_j`` over the edges, measured in one Z basis."""
    terms = []
    for i, j, w in g.edges:
        axes = ["I"] * g.n
        axes[i] = axes[j] = "Z"
        terms.append(PauliTerm(w, "".join(axes)))
    if not terms:
        raise ValueError("graph has no edges")
    return Observable(terms, ["Z" * g.n], [list(range(len(terms)))])


def transverse_ising_observable(n: int, field: float = 1.0) -> Observable:
    """Open-chain ``sum Z_q Z_{q+1} + field * sum X_q``; two measurement bases."""
    terms = []
    for q in range(n - 1):
        axes = ["I"] * n
        axes[q] = axes[q + 1] = "Z"
        terms.append(PauliTerm(1.0, "".join(axes)))
    for q in range(n):
        axes = ["I"] * n
        axes[q] = "X"
        terms.append(PauliTerm(field, "".join(axes)))
    return group_commuting(terms)
