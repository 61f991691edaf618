"""Arbitrary-precision root finding with recursive closed-rule iterative maps."""

from .analysis import (
    OrderEstimate,
    bisect_root,
    error_from_steps,
    estimate_order,
    estimate_order_from_steps,
    map_derivatives_at,
    significant_digits,
)
from .bigreal import GUARD_DIGITS, BigReal, bigreal
from .errors import (
    Breakdown,
    CotesrootError,
    DomainError,
    InsufficientData,
    ParseError,
    RoundoffFloor,
    SingularMatrix,
    UnknownIdentifier,
    UnsupportedRule,
)
from .expr import Expression, Jet2, eval_jet, eval_value, parse
from .multivariate import (
    DemoSystem,
    VectorFunction,
    VectorTrajectory,
    demo_system,
    nd_iterate,
    nd_step,
    solve_linear,
)
from .quadrature import RuleSpec, builtin_rule, check_moments, derive_rule
from .solver import (
    SEED_NEWTON,
    SEED_TRAPEZOID,
    MethodId,
    ScalarProblem,
    Termination,
    Trajectory,
    TransformedFunction,
    apply_method,
    apply_t0,
    apply_tn,
    iterate,
    transform_function,
)
from .tables import TableReport, TableRow, run_table

__version__ = "0.1.0"

__all__ = [
    "BigReal",
    "Breakdown",
    "CotesrootError",
    "DemoSystem",
    "DomainError",
    "Expression",
    "GUARD_DIGITS",
    "InsufficientData",
    "Jet2",
    "MethodId",
    "OrderEstimate",
    "ParseError",
    "RoundoffFloor",
    "RuleSpec",
    "ScalarProblem",
    "SEED_NEWTON",
    "SEED_TRAPEZOID",
    "SingularMatrix",
    "TableReport",
    "TableRow",
    "Termination",
    "Trajectory",
    "TransformedFunction",
    "UnknownIdentifier",
    "UnsupportedRule",
    "VectorFunction",
    "VectorTrajectory",
    "apply_method",
    "apply_t0",
    "apply_tn",
    "bigreal",
    "bisect_root",
    "builtin_rule",
    "check_moments",
    "demo_system",
    "derive_rule",
    "error_from_steps",
    "estimate_order",
    "estimate_order_from_steps",
    "eval_jet",
    "eval_value",
    "iterate",
    "map_derivatives_at",
    "nd_iterate",
    "nd_step",
    "parse",
    "run_table",
    "significant_digits",
    "solve_linear",
    "transform_function",
]
