"""Generalized Cape Cod reserving with closed-form MSEP."""

from .chain_ladder import ClFit, ClPrediction, cl_predict, fit_cl, fit_cl_factors, fit_sigma2, pattern_from_factors
from .datasets import load_wuthrich_merz
from .errors import (
    ConfigError,
    DomainError,
    ParseError,
    ReservingError,
    ShapeError,
    SimulationError,
    UnsupportedShapeError,
    ValidationError,
)
from .gcc import (
    GccInput,
    GccResult,
    alpha_weights,
    cc_kappa,
    credibility_decomposition,
    gcc_kappas,
    gcc_predict,
    gcc_reserves,
    individual_kappas,
    omega_weights,
)
from .triangle import (
    ClaimsTriangle,
    IncrementalTriangle,
    PremiumVector,
    latest_diagonal,
    parse_premiums,
    parse_triangle,
    serialize_premiums,
    serialize_triangle,
    to_incremental,
)
from .uncertainty import (
    MsepReport,
    gcc_msep,
    gcc_param_error,
    gcc_process_var,
    mack_param_error,
    mack_process_var,
    q_sensitivities,
    taylor_delta,
)

__version__ = "0.1.0"
