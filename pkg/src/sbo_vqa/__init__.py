"""Surrogate-based optimization of shot-noisy variational quantum cost functions."""

from ._accel import backend_name
from .baselines import QuasiNewtonConfig, SpsaConfig, quasi_newton_run, spsa_run
from .objective import FunctionObjective, NoisyObjective, quadratic_bowl
from .sbo import SboConfig, finalize, inner_minimize, latin_hypercube, sbo_iterate, sbo_run
from .surrogate import SamplePoint, SurrogateModel, fit, silverman_bandwidth
from .trace import IterationRecord, RunTrace

__version__ = "0.1.0"

__all__ = [
    "FunctionObjective",
    "IterationRecord",
    "NoisyObjective",
    "QuasiNewtonConfig",
    "RunTrace",
    "SamplePoint",
    "SboConfig",
    "SpsaConfig",
    "SurrogateModel",
    "backend_name",
    "finalize",
    "fit",
    "inner_minimize",
    "latin_hypercube",
    "quadratic_bowl",
    "quasi_newton_run",
    "sbo_iterate",
    "sbo_run",
    "silverman_bandwidth",
    "spsa_run",
]
