"""Problem graphs for MaxCut QAOA: generators and an edge-list text format."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

DEFAULT_RETRY_CAP = 1000


class GraphGenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph on vertices ``0..n-1``.

    ``edges`` holds ``(i, j, w)`` triples with ``i < j``, sorted. ``kappa`` is
    set by the regular-graph generator and otherwise ``None``.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]
    kappa: Optional[int] = None

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"graph needs at least one vertex, got n={self.n}")
        normalized = []
        for i, j, w in self.edges:
            i, j, w = int(i), int(j), float(w)
            if i > j:
                i, j = j, i
            if not (0 <= i < j < self.n):
                raise ValueError(f"edge ({i}, {j}) invalid for n={self.n}")
            if not np.isfinite(w):
                raise ValueError(f"edge ({i}, {j}) has non-finite weight {w}")
            normalized.append((i, j, w))
        normalized.sort()
        pairs = [(i, j) for i, j, _ in normalized]
        if len(set(pairs)) != len(pairs):
            raise ValueError("duplicate edges")
        object.__setattr__(self, "edges", tuple(normalized))

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=int)
        for i, j, _ in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        if not self.edges:
            return False
        rows = [e[0] for e in self.edges]
        cols = [e[1] for e in self.edges]
        adj = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n))
        ncomp, _ = connected_components(adj, directed=False)
        return ncomp == 1

    def to_text(self) -> str:
        lines = [str(self.n)]
        if self.kappa is not None:
            lines.append(f"# kappa {self.kappa}")
        lines.extend(f"{i} {j} {w!r}" for i, j, w in self.edges)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        n = None
        kappa = None
        edges = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 2 and parts[0] == "kappa":
                    kappa = int(parts[1])
                continue
            fields = line.split()
            try:
                if n is None:
                    if len(fields) != 1:
                        raise ValueError("expected vertex count header")
                    n = int(fields[0])
                else:
                    if len(fields) != 3:
                        raise ValueError("expected 'i j w'")
                    edges.append((int(fields[0]), int(fields[1]), float(fields[2])))
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        if n is None:
            raise ValueError("empty graph file")
        return cls(n, tuple(edges), kappa)

    def save(self, path) -> None:
        Path(path).write_text(self.to_text())

    @classmethod
    def load(cls, path) -> "Graph":
        return cls.from_text(Path(path).read_text())


def random_connected_graph(
    n: int,
    edge_prob: float,
    rng: np.random.Generator,
    max_tries: int = DEFAULT_RETRY_CAP,
) -> Graph:
    """Erdos-Renyi G(n, p) with unit weights, resampled until connected."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if not 0.0 < edge_prob <= 1.0:
        raise ValueError(f"edge_prob must be in (0, 1], got {edge_prob}")
    iu, ju = np.triu_indices(n, k=1)
    for _ in range(max_tries):
        keep = rng.random(iu.size) < edge_prob
        g = Graph(n, tuple((int(i), int(j), 1.0) for i, j in zip(iu[keep], ju[keep])))
        if g.is_connected():
            return g
    raise GraphGenerationError(
        f"cannot generate connected graph with n={n}, p={edge_prob} "
        f"after {max_tries} tries"
    )


def _pair_stubs(n: int, kappa: int, rng: np.random.Generator):
    # Pairing model with incremental repair: legal pairs are kept, the stubs of
    # rejected pairs (self-loops, repeats) are reshuffled and paired again.
    edges = set()
    stubs = np.repeat(np.arange(n), kappa)
    while stubs.size:
        rng.shuffle(stubs)
        leftover = []
        for a, b in zip(stubs[0::2], stubs[1::2]):
            a, b = (int(a), int(b)) if a < b else (int(b), int(a))
            if a != b and (a, b) not in edges:
                edges.add((a, b))
            else:
                leftover.extend((a, b))
        if leftover:
            # Stuck when every remaining stub pair is already an edge or a loop.
            pending = sorted(set(leftover))
            if not any(
                u != v and (u, v) not in edges
                for k, u in enumerate(pending)
                for v in pending[k + 1:]
            ):
                return None
        stubs = np.array(leftover, dtype=int)
    return edges


def random_regular_graph(
    n: int,
    kappa: int,
    rng: np.random.Generator,
    max_tries: int = DEFAULT_RETRY_CAP,
) -> Graph:
    """Uniform-ish random simple connected ``kappa``-regular graph."""
    if (n * kappa) % 2:
        raise ValueError(f"n*kappa must be even, got n={n}, kappa={kappa}")
    if not 0 <= kappa < n:
        raise ValueError(f"need 0 <= kappa < n, got n={n}, kappa={kappa}")
    for _ in range(max_tries):
        edges = _pair_stubs(n, kappa, rng)
        if edges is None:
            continue
        g = Graph(n, tuple((i, j, 1.0) for i, j in sorted(edges)), kappa=kappa)
        if g.is_connected():
            return g
    raise GraphGenerationError(
        f"cannot generate connected {kappa}-regular graph on {n} vertices "
        f"after {max_tries} tries"
    )
