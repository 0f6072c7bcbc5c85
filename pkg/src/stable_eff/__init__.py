"""Dynamic alpha-stable estimation and market-efficiency indicators."""

__version__ = "0.1.0"

from .discount import DiscrepancyReport, OmegaSelection, discrepancy, ks_uniform, select_omega
from .efficiency import EfficiencyTrace, MomentState, hurst, memory_param, run_trace, update_moments
from .estimators import DiscountFactorSelector, DynamicEfficiencyEstimator, StableQuantileEstimator
from .exceptions import (
    DegenerateSampleError,
    EstimationGap,
    InvalidArgumentError,
    NumericalFailureError,
    StableEffError,
    UndefinedExponentError,
)
from .mcculloch import QuantileSet, estimate, estimate_sample
from .significance import ConfidenceBands, bands, simulate_null
from .stable_dist import StableParams, cdf, charfn_s0, pdf, sample

__all__ = [
    "ConfidenceBands",
    "DegenerateSampleError",
    "DiscountFactorSelector",
    "DiscrepancyReport",
    "DynamicEfficiencyEstimator",
    "EfficiencyTrace",
    "EstimationGap",
    "InvalidArgumentError",
    "MomentState",
    "NumericalFailureError",
    "OmegaSelection",
    "QuantileSet",
    "StableEffError",
    "StableParams",
    "StableQuantileEstimator",
    "UndefinedExponentError",
    "bands",
    "cdf",
    "charfn_s0",
    "discrepancy",
    "estimate",
    "estimate_sample",
    "hurst",
    "ks_uniform",
    "memory_param",
    "pdf",
    "run_trace",
    "sample",
    "select_omega",
    "simulate_null",
    "update_moments",
]
