"""fracrd: pseudospectral fractional reaction-diffusion simulator and
estimate-verification lab on periodic boxes."""

from .errors import FracRDError
from .spectral_core import (
    Field,
    FracPower,
    Grid,
    apply_multiplier,
    field_mean,
    frac_power,
    frac_power_quadrature,
    integral,
    lp_norm,
    make_grid,
)
from .heat_kernel import (
    KernelSpec,
    SmoothingReport,
    heat_kernel_field,
    kernel_diagnostics,
    semigroup_apply,
    smoothing_rate_fit,
)
from .rds_model import (
    Assumption,
    AssumptionReport,
    ReactionModel,
    check_assumption,
    conservative_lift,
    get_model,
    polynomial_model,
)
from .mild_solver import (
    SolverConfig,
    Trajectory,
    detect_blowup,
    load_checkpoint,
    save_checkpoint,
    solve_mild,
)
from .estimate_lab import (
    ExponentLadder,
    NormReport,
    VDiagnostics,
    accumulate_v,
    duality_ladder,
    gn_ratio,
    holder_seminorm,
    maximal_reg_ratio,
    norm_report,
    q_hat,
    stroock_varopoulos_gap,
)

__version__ = "0.1.0"

__all__ = [
    "Assumption",
    "AssumptionReport",
    "ExponentLadder",
    "Field",
    "FracPower",
    "FracRDError",
    "Grid",
    "KernelSpec",
    "NormReport",
    "ReactionModel",
    "SmoothingReport",
    "SolverConfig",
    "Trajectory",
    "VDiagnostics",
    "accumulate_v",
    "apply_multiplier",
    "check_assumption",
    "conservative_lift",
    "detect_blowup",
    "duality_ladder",
    "field_mean",
    "frac_power",
    "frac_power_quadrature",
    "get_model",
    "gn_ratio",
    "heat_kernel_field",
    "holder_seminorm",
    "integral",
    "kernel_diagnostics",
    "load_checkpoint",
    "lp_norm",
    "make_grid",
    "maximal_reg_ratio",
    "norm_report",
    "polynomial_model",
    "q_hat",
    "save_checkpoint",
    "semigroup_apply",
    "smoothing_rate_fit",
    "solve_mild",
    "stroock_varopoulos_gap",
]
