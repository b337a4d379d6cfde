"""approxlie: first-order approximate Lie symmetry analysis for perturbed
PDE systems, instantiated for plane second-grade creeping flow.

The package provides an exact symbolic kernel (expression trees with a
rational canonical form), truncated perturbation series, Lie prolongation
machinery, an invariance-verification engine, the creeping-flow catalog of
generators and closed-form approximately invariant solutions, and a
numeric residual harness with an order-of-accuracy sweep.
"""

from .symbols import TABLE, independent, parameter, function, jet
from .expr import (Expr, add, mul, pow_, sub, div, rat, sym, as_expr, diff,
                   diff_wrt, substitute, free_symbols, jet_symbols,
                   log, exp, sin, cos, arctan,
                   CircularSubstitution, FixpointExceeded)
from .normal import (NormalForm, normalize, is_zero, canonical, collect,
                     DivisionByZeroExpr, NotPolynomial)
from .parser import parse, render, ExprSyntaxError, UnknownFunction, UnknownSymbol

# Registering the model vocabulary at import time pins the global symbol
# numbering (and with it canonical print order) for every session.
from . import creeping as _creeping  # noqa: E402,F401

__all__ = [
    "TABLE", "independent", "parameter", "function", "jet",
    "Expr", "add", "mul", "pow_", "sub", "div", "rat", "sym", "as_expr",
    "diff", "diff_wrt", "substitute", "free_symbols", "jet_symbols",
    "log", "exp", "sin", "cos", "arctan",
    "CircularSubstitution", "FixpointExceeded",
    "NormalForm", "normalize", "is_zero", "canonical", "collect",
    "DivisionByZeroExpr", "NotPolynomial",
    "parse", "render", "ExprSyntaxError", "UnknownFunction", "UnknownSymbol",
]

__version__ = "1.0.0"
