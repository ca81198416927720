"""Spectral-efficiency optimization for hybrid relay-reflecting intelligent surfaces."""

from .channel import ChannelPair, FadingParams, Geometry, path_loss_linear, rician_matrix, scenario_channels
from .estimator import HrRisOptimizer
from .optimizer import (
    AoConfig,
    AoReport,
    HrRisCoefficients,
    SystemParams,
    alternating_optimize,
    se_exact,
    se_upper,
)
from .sim import ScenarioConfig, run_monte_carlo, sweep

__all__ = [
    "AoConfig",
    "AoReport",
    "ChannelPair",
    "FadingParams",
    "Geometry",
    "HrRisCoefficients",
    "HrRisOptimizer",
    "ScenarioConfig",
    "SystemParams",
    "alternating_optimize",
    "path_loss_linear",
    "rician_matrix",
    "run_monte_carlo",
    "scenario_channels",
    "se_exact",
    "se_upper",
    "sweep",
]
