"""Receding-horizon decoding of convolutional codes over prime fields."""

from ._version import __version__
from .block import (
    AdmissibleCapability,
    DensityStats,
    WindowCode,
    WindowDecode,
    admissible_capability,
    build_window_code,
    covering_radius,
    density_stats,
    min_distance,
    ml_decode,
    multiplicity_bound,
    nearest_codewords,
)
from .budget import default_budget
from .channel import ChannelSpec, ExperimentConfig, ExperimentReport, apply_channel, run_experiment
from .decoders import DecodeResult, HorizonParams, cost, cost_bound, exact_decode, receding_horizon_decode
from .errors import BudgetExceeded, DimensionError, NotControllable, NotObservable, SpecError
from .gf import Field, FMatrix, FPolyMatrix, kernel_basis, mat_rank, poly_mat_det, poly_mat_mul, solve_affine
from .io import load_code
from .system import (
    ConvCode,
    PolyGenerator,
    SymbolSeq,
    controllability_indices,
    encode,
    is_codeword,
    new_conv_code,
    verify_realization,
    zero_return_extension,
)

__all__ = [
    "AdmissibleCapability",
    "BudgetExceeded",
    "ChannelSpec",
    "ConvCode",
    "DecodeResult",
    "DensityStats",
    "DimensionError",
    "ExperimentConfig",
    "ExperimentReport",
    "FMatrix",
    "FPolyMatrix",
    "Field",
    "HorizonParams",
    "NotControllable",
    "NotObservable",
    "PolyGenerator",
    "SpecError",
    "SymbolSeq",
    "WindowCode",
    "WindowDecode",
    "__version__",
    "admissible_capability",
    "apply_channel",
    "build_window_code",
    "controllability_indices",
    "cost",
    "cost_bound",
    "covering_radius",
    "default_budget",
    "density_stats",
    "encode",
    "exact_decode",
    "is_codeword",
    "kernel_basis",
    "load_code",
    "mat_rank",
    "min_distance",
    "ml_decode",
    "multiplicity_bound",
    "nearest_codewords",
    "new_conv_code",
    "poly_mat_det",
    "poly_mat_mul",
    "receding_horizon_decode",
    "run_experiment",
    "solve_affine",
    "verify_realization",
    "zero_return_extension",
]
