"""Broadband DOA estimation for sparse uniform linear arrays."""

from ._hsdoa import (
    NumericError,
    ParameterError,
    algorithms,
    estimate,
    estimate_doas,
    estimate_waveforms,
    kkt_residual,
    l1_objective,
    quantization_floor,
    rmse,
    sensing_matrix,
    solve_l1,
    synthesize,
)

__all__ = [
    "NumericError",
    "ParameterError",
    "algorithms",
    "estimate",
    "estimate_doas",
    "estimate_waveforms",
    "kkt_residual",
    "l1_objective",
    "quantization_floor",
    "rmse",
    "sensing_matrix",
    "solve_l1",
    "synthesize",
]
