"""Robust joint beamforming and power-splitting design for SWIPT interference channels."""

from .model import (
    ChannelEstimate,
    ErrorRealization,
    Infeasible,
    InvalidInput,
    Solution,
    SystemParams,
    dbm_to_mw,
    generate_channels,
    harvested_power,
    mw_to_dbm,
    sample_error,
    sinr,
)
from .sdr import algorithm1, solve_sdr
from .socp import algorithm2, solve_socp
from .cccp import algorithm3
from .harness import ExperimentConfig, nonrobust_baseline, run_sweep, verify_robust

__all__ = [
    "ChannelEstimate",
    "ErrorRealization",
    "Infeasible",
    "InvalidInput",
    "Solution",
    "SystemParams",
    "dbm_to_mw",
    "mw_to_dbm",
    "generate_channels",
    "sample_error",
    "sinr",
    "harvested_power",
    "algorithm1",
    "algorithm2",
    "algorithm3",
    "solve_sdr",
    "solve_socp",
    "nonrobust_baseline",
    "verify_robust",
    "run_sweep",
    "ExperimentConfig",
]

__version__ = "0.1.0"
