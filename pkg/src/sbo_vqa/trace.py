"""Per-iteration run records shared by SBO and the baseline optimizers."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


def _floats(x) -> Optional[list]:
    return None if x is None else np.asarray(x, dtype=float).tolist()


@dataclass
class IterationRecord:
    """One optimizer iteration.

    ``center`` is the iterate the step started from and ``output`` the
    iterate it produced. ``estimate`` is the optimizer's best answer so far,
    the point an error metric should be evaluated at.
    """

    iteration: int
    center: np.ndarray
    samples: np.ndarray
    values: np.ndarray
    output: np.ndarray
    estimate: np.ndarray
    shots: int
    cumulative_shots: int
    eps: Optional[float] = None
    surrogate_min: Optional[float] = None
    added_to_minima: Optional[bool] = None

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "center": _floats(self.center),
            "samples": _floats(self.samples),
            "values": _floats(self.values),
            "output": _floats(self.output),
            "estimate": _floats(self.estimate),
            "shots": self.shots,
            "cumulative_shots": self.cumulative_shots,
            "eps": self.eps,
            "surrogate_min": self.surrogate_min,
            "added_to_minima": self.added_to_minima,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IterationRecord":
        arr = lambda k: np.asarray(d[k], dtype=float)  # noqa: E731
        return cls(
            iteration=d["iteration"],
            center=arr("center"),
            samples=arr("samples"),
            values=arr("values"),
            output=arr("output"),
            estimate=arr("estimate"),
            shots=d["shots"],
            cumulative_shots=d["cumulative_shots"],
            eps=d.get("eps"),
            surrogate_min=d.get("surrogate_min"),
            added_to_minima=d.get("added_to_minima"),
        )


@dataclass
class RunTrace:
    optimizer: str
    theta0: np.ndarray
    records: list[IterationRecord] = field(default_factory=list)
    minima: list[np.ndarray] = field(default_factory=list)
    theta_opt: Optional[np.ndarray] = None

    @property
    def dim(self) -> int:
        return int(np.asarray(self.theta0).size)

    @property
    def total_shots(self) -> int:
        return self.records[-1].cumulative_shots if self.records else 0

    def __len__(self):
        return len(self.records)

    def estimates(self) -> np.ndarray:
        return np.array([r.estimate for r in self.records])

    def to_dict(self) -> dict:
        return {
            "optimizer": self.optimizer,
            "theta0": _floats(self.theta0),
            "theta_opt": _floats(self.theta_opt),
            "total_shots": self.total_shots,
            "minima": [_floats(m) for m in self.minima],
            "records": [r.to_dict() for r in self.records],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunTrace":
        return cls(
            optimizer=d["optimizer"],
            theta0=np.asarray(d["theta0"], dtype=float),
            records=[IterationRecord.from_dict(r) for r in d["records"]],
            minima=[np.asarray(m, dtype=float) for m in d["minima"]],
            theta_opt=None if d["theta_opt"] is None else np.asarray(d["theta_opt"], dtype=float),
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["iter"] + [f"center_{m}" for m in range(self.dim)] + ["eps", "best_w", "shots", "cum_shots"]
        )
        for r in self.records:
            writer.writerow(
                [r.iteration]
                + [repr(float(c)) for c in r.center]
                + ["" if r.eps is None else repr(r.eps)]
                + ["" if r.surrogate_min is None else repr(r.surrogate_min)]
                + [r.shots, r.cumulative_shots]
            )
        return buf.getvalue()
