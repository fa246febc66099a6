"""Statevector simulation of shot-noisy variational cost functions."""

from .graphs import Graph, GraphGenerationError, random_connected_graph, random_regular_graph
from .objectives import HardwareEfficientObjective, QaoaObjective
from .observables import (
    Observable,
    PauliTerm,
    group_commuting,
    maxcut_observable,
    transverse_ising_observable,
)
from .states import (
    MAX_QUBITS,
    QaoaParams,
    QubitLimitError,
    ShotPlan,
    StateVector,
    exact_expectation,
    hardware_efficient_state,
    qaoa_state,
    sample_estimate,
)

__all__ = [
    "Graph",
    "GraphGenerationError",
    "HardwareEfficientObjective",
    "MAX_QUBITS",
    "Observable",
    "PauliTerm",
    "QaoaObjective",
    "QaoaParams",
    "QubitLimitError",
    "ShotPlan",
    "StateVector",
    "exact_expectation",
    "group_commuting",
    "hardware_efficient_state",
    "maxcut_observable",
    "qaoa_state",
    "random_connected_graph",
    "random_regular_graph",
    "sample_estimate",
    "transverse_ising_observable",
]
