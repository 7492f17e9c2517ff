"""1-bit massive-MIMO downlink precoding for PSK signaling.

Maximum-safety-margin symbol-wise precoding as a linear program, Wiener-filter
baselines, and a Monte-Carlo uncoded BER harness.
"""

__version__ = "0.1.0"

from .channel import RngStream, draw_channel, draw_noise, perturb_csi
from .lp import LpOptions, LpProblem, LpSolution, LpStatus, estimate_iteration_cost, solve
from .precoding import (
    assemble_msm_lp,
    brute_force_msm,
    build_modified_channel,
    build_real_matrices,
    msm_precode,
    quantize,
    wf_precode,
)
from .pskmod import PskConstellation, detect, map_bits_to_symbols, min_margin, safety_margin
from .sim import BerRecord, SimConfig, run_point, run_sweep

__all__ = [
    "__version__",
    "RngStream",
    "draw_channel",
    "draw_noise",
    "perturb_csi",
    "LpOptions",
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "estimate_iteration_cost",
    "solve",
    "assemble_msm_lp",
    "brute_force_msm",
    "build_modified_channel",
    "build_real_matrices",
    "msm_precode",
    "quantize",
    "wf_precode",
    "PskConstellation",
    "detect",
    "map_bits_to_symbols",
    "min_margin",
    "safety_margin",
    "BerRecord",
    "SimConfig",
    "run_point",
    "run_sweep",
]
