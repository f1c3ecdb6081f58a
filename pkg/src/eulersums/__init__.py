"""Euler sums: high-precision evaluation, closed-form reduction and identity
verification for linear and quadratic Euler sums and star values."""
from .errors import DivergentError, EulerSumError, ToleranceUnreachable, UnsupportedError
from .model import LinearCombo, StarIndex, SumExpr, canonicalize, make_sum, star, star_to_sum, sum_to_star
from .numerics import PrecisionContext
from .parser import ParseError, parse, parse_combo, render, render_combo
from .reduction import Reduction, eval_combo, lookup_linear, reduce
from .series import EvalResult, Strategy, eval_direct, eval_accelerated, eval_star, evaluate
from .suite import Status, SuiteReport, run_full_suite, run_suite, select

__version__ = "0.1.0"

__all__ = [
    "DivergentError",
    "EulerSumError",
    "EvalResult",
    "LinearCombo",
    "ParseError",
    "PrecisionContext",
    "Reduction",
    "StarIndex",
    "Status",
    "Strategy",
    "SuiteReport",
    "SumExpr",
    "ToleranceUnreachable",
    "UnsupportedError",
    "canonicalize",
    "eval_accelerated",
    "eval_combo",
    "eval_direct",
    "eval_star",
    "evaluate",
    "lookup_linear",
    "make_sum",
    "parse",
    "parse_combo",
    "reduce",
    "run_full_suite",
    "run_suite",
    "select",
    "render",
    "render_combo",
    "star",
    "star_to_sum",
    "sum_to_star",
]
