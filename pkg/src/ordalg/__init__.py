"""Order-convolution algebra L1((0, inf), max), its ideals A_p, and multiplier classification."""

__version__ = "0.1.0"

from .symfunc import (
    INF,
    Divergence,
    Endpoint,
    LeadingBehavior,
    NonIntegrableError,
    PartitionError,
    Piece,
    PiecewiseFn,
    Term,
    antiderivative_from_zero,
    differentiate,
    evaluate,
    from_json,
    leading_behavior,
    normalize,
    pointwise,
    symbolically_equal,
    to_json,
)
from .algebra import (
    AlgebraParams,
    Method,
    NormValue,
    NotInL1Error,
    Regime,
    ap_norm,
    gelfand_transform,
    in_ap,
    lp_norm,
    order_convolve,
)
from .multiplier import (
    ConditionResult,
    MultiplierReport,
    Status,
    Verdict,
    Witness,
    classify,
    operator_norm_lower_bound,
    point_eval_constant,
    witness_search,
)
from .dsl import DSLSyntaxError, parse_function, to_dsl
from .kernels import BACKEND

__all__ = [name for name in dir() if not name.startswith("_")]
