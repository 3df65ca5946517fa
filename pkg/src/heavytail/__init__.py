"""Heavy-tailed linear processes: innovations, kernels, FARIMA coefficients,
path simulation, stable limits, point patterns and a verification harness."""
from .dist import DomainError, TailBalancedLaw, TruncatedMoments, TruncationWindow
from .gfp import CoeffSeries, FarimaSpec
from .kernels import InterpKernel, LimitKernel, StepKernel
from .harness import ExperimentSpec, SummaryTable, run_acceptance, run_experiment

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "TailBalancedLaw",
    "TruncatedMoments",
    "TruncationWindow",
    "CoeffSeries",
    "FarimaSpec",
    "InterpKernel",
    "LimitKernel",
    "StepKernel",
    "ExperimentSpec",
    "SummaryTable",
    "run_acceptance",
    "run_experiment",
]
