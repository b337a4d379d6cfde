"""Plane second-grade creeping flow: equations, generators, constraint,
stream-function ansatz cases.

Everything model-specific lives here: the three field equations
(continuity and the two momentum balances with their first-order
non-Newtonian terms), the nine admitted approximate point symmetry
generators, the compatibility constraint tying the two arbitrary functions
of the ninth generator, and the three closed-form ansatz families that
solve that constraint.  The expansion order of the shipped catalog is
one; the kernel itself is order-agnostic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Tuple

from . import expr as ex
from . import normal
from .invariance import PdeSystem
from .lie import Generator
from .symbols import TABLE

# ---------------------------------------------------------------------------
# model vocabulary; registration order fixes the global symbol numbering

X = TABLE.independent("x")
Y = TABLE.independent("y")
W = TABLE.independent("w")  # similarity variable
EPS = TABLE.parameter("eps")
RE = TABLE.parameter("Re")

KAPPA = tuple(TABLE.parameter(f"k{i}") for i in range(1, 5))
A = tuple(TABLE.parameter(f"a{i}") for i in range(1, 8))
B = TABLE.parameter("b")
C = tuple(TABLE.parameter(f"c{i}") for i in range(1, 9))
U_SHEAR = TABLE.parameter("u_shear")
V_SUCTION = TABLE.parameter("v_suction")
P_FAR = TABLE.parameter("p_far")

U = TABLE.function("u", (X, Y))
V = TABLE.function("v", (X, Y))
P = TABLE.function("p", (X, Y))
for _name in ("u0", "u1", "v0", "v1", "p0", "p1"):
    TABLE.function(_name, (X, Y))
F1 = TABLE.function("f1", (X, Y))
F2 = TABLE.function("f2", (X,))
for _name in ("U0", "V0", "P0", "U1", "V1", "P1"):
    TABLE.function(_name, (W,))
del _name

CATALOG_ORDER = 1  # shipped model fixes first-order expansions


@dataclass(frozen=True)
class ModelParams:
    """Reynolds number and the small parameter.

    Both stay symbolic during verification; a numeric Reynolds number is
    only needed by the sweep harness.  The model is meaningful for
    eps << 1/Re, which is a documentation note rather than a runtime
    check; reports carry both values so the regime judgment stays with
    the user.
    """

    reynolds: Optional[float] = None

    def __post_init__(self):
        if self.reynolds is not None and not self.reynolds > 0:
            raise ValueError("numeric Reynolds number must be positive")

    def reynolds_expr(self) -> ex.Expr:
        return ex.sym(RE)


# ---------------------------------------------------------------------------
# the field equations

_CONTINUITY = "u_x + v_y"

_X_MOMENTUM = (
    "p_x - (u_xx + u_yy)/Re"
    " - eps*(5*u_x*u_xx + u_x*u_yy + u*u_xxx + v*u_yyy + u*u_xyy"
    " + 2*v_x*v_xx + u_y*u_xy + u_y*v_xx + v*u_xxy)"
)

_Y_MOMENTUM = (
    "p_y - (v_xx - u_xy)/Re"
    " - eps*(5*u_x*u_xy - u_x*v_xx - v*u_xyy + u*v_xxx - v*u_xxx"
    " + 2*u_y*u_yy - v_x*u_xx + v_x*u_yy - u*u_xxy)"
)


def creeping_system(params: ModelParams = ModelParams()) -> PdeSystem:
    """Continuity plus the two momentum balances, leading derivatives
    declared as v_y, p_x, p_y."""
    from .parser import parse

    del params  # Reynolds number stays the symbolic atom in the equations
    return PdeSystem(
        independents=(X, Y),
        dependents=(U, V, P),
        small=EPS,
        equations=(parse(_CONTINUITY), parse(_X_MOMENTUM), parse(_Y_MOMENTUM)),
        leading=((V, (0, 1)), (P, (1, 0)), (P, (0, 1))),
        max_order=3,
        auxiliaries=(F1, F2),
        name="creeping-flow",
    )


# ---------------------------------------------------------------------------
# the nine generators

def _jet(fname: str, index) -> ex.Expr:
    return ex.sym(TABLE.jet(TABLE.find_function(fname), tuple(index)))


def _f1_derivs(f1: Optional[ex.Expr]):
    """(f1_yy, f1_xy, f1_xyy, f1_xxx) for a closed form or the symbolic f1."""
    if f1 is None:
        return (_jet("f1", (0, 2)), _jet("f1", (1, 1)),
                _jet("f1", (1, 2)), _jet("f1", (3, 0)))
    dx = lambda e: ex.diff(e, X)  # noqa: E731
    dy = lambda e: ex.diff(e, Y)  # noqa: E731
    return dy(dy(f1)), dx(dy(f1)), dx(dy(dy(f1))), dx(dx(dx(f1)))


def _f2_value(f2: Optional[ex.Expr]) -> ex.Expr:
    return _jet("f2", (0,)) if f2 is None else f2


def paper_generators(f1: Optional[ex.Expr] = None,
                     f2: Optional[ex.Expr] = None,
                     p: int = CATALOG_ORDER) -> Dict[str, Generator]:
    """The nine admitted generators xi1..xi9, in expanded slot form.

    ``f1``/``f2`` may be closed-form expressions (from an ansatz case) or
    None to keep them as symbolic auxiliary functions; xi9 then needs the
    compatibility constraint as a side condition during verification.
    """
    system = creeping_system()
    scheme = system.scheme(p)
    inds = system.independents
    one = ex.ONE
    u0, u1 = _jet("u0", (0, 0)), _jet("u1", (0, 0))
    v0, v1 = _jet("v0", (0, 0)), _jet("v1", (0, 0))
    p0 = _jet("p0", (0, 0))
    xe, ye = ex.sym(X), ex.sym(Y)
    f1yy, f1xy, f1xyy, f1xxx = _f1_derivs(f1)
    eta9_p = ex.sub(_f2_value(f2),
                    ex.div(ex.add(f1xyy, f1xxx), ex.sym(RE)))

    def G(name, xi=None, eta=None):
        return Generator.build(scheme, inds, p, xi=xi, eta=eta, name=name)

    gens = {
        "xi1": G("xi1", xi={X: (one,)}),
        "xi2": G("xi2", xi={Y: (one,)}),
        "xi3": G("xi3", eta={P: (one,)}),
        "xi4": G("xi4", xi={X: (ex.ZERO, one)}),
        "xi5": G("xi5", xi={Y: (ex.ZERO, one)}),
        "xi6": G("xi6", eta={U: (ex.ZERO, u0), V: (ex.ZERO, v0),
                             P: (ex.ZERO, p0)}),
        "xi7": G("xi7", xi={X: (ex.ZERO, xe), Y: (ex.ZERO, ye)},
                 eta={P: (ex.ZERO, ex.mul(ex.MINUS_ONE, p0))}),
        "xi8": G("xi8", xi={X: (xe,), Y: (ye,)},
                 eta={U: (u0, u1), V: (v0, v1)}),
        "xi9": G("xi9", eta={U: (ex.ZERO, f1yy),
                             V: (ex.ZERO, ex.mul(ex.MINUS_ONE, f1xy)),
                             P: (ex.ZERO, eta9_p)}),
    }
    return gens


def constraint_expr(f1: Optional[ex.Expr] = None,
                    f2: Optional[ex.Expr] = None) -> ex.Expr:
    """df2/dx - (f1_xxxx + 2 f1_xxyy + f1_yyyy)/Re, unevaluated."""
    if f1 is None:
        f1xxxx = _jet("f1", (4, 0))
        f1xxyy = _jet("f1", (2, 2))
        f1yyyy = _jet("f1", (0, 4))
    else:
        def d(e, *vs):
            for v in vs:
                e = ex.diff(e, v)
            return e
        f1xxxx = d(f1, X, X, X, X)
        f1xxyy = d(f1, X, X, Y, Y)
        f1yyyy = d(f1, Y, Y, Y, Y)
    if f2 is None:
        df2 = _jet("f2", (1,))
    else:
        df2 = ex.diff(f2, X)
    biharmonic = ex.add(f1xxxx, ex.mul(ex.rat(2), f1xxyy), f1yyyy)
    return ex.sub(df2, ex.div(biharmonic, ex.sym(RE)))


def constraint_residual(f1: ex.Expr, f2: ex.Expr,
                        params: ModelParams = ModelParams()) -> ex.Expr:
    """Normalized constraint residual for concrete (f1, f2)."""
    del params
    return normal.canonical(constraint_expr(f1, f2))


# ---------------------------------------------------------------------------
# ansatz cases solving the constraint

class InvalidCaseParams(ValueError):
    pass


@dataclass(frozen=True)
class AnsatzCase:
    """Stream-function ansatz f1 = F(x) G(y) + H(x) with f2 from H.

    Cached third derivatives of f1 avoid re-deriving them inside
    verification loops.
    """

    case_id: str
    a: Tuple[ex.Expr, ...]
    b: ex.Expr
    f1: ex.Expr
    f2: ex.Expr
    H: ex.Expr
    degenerate: bool = False
    f1_derivs: tuple = field(default=None)

    def generators(self, p: int = CATALOG_ORDER) -> Dict[str, Generator]:
        return paper_generators(self.f1, self.f2, p)


def ansatz_case(case_id: str, a=None, b=None,
                H: Optional[ex.Expr] = None) -> AnsatzCase:
    """Build one of the three constraint-solving families.

    Case i: cubic F, affine G.  Case ii: (affine-in-x)*trig F with
    exponential G.  Case iii: (affine-in-x)*exponential F with trig G.
    ``a`` may be numbers or expressions; omitted entries stay symbolic.
    ``H`` must satisfy H''' = Re*f2 + a7; the default H = (a7/6) x^3 pairs
    with f2 = 0 exactly.
    """
    case_id = case_id.lower()
    if case_id not in ("i", "ii", "iii"):
        raise InvalidCaseParams(f"unknown ansatz case {case_id!r}")
    av = tuple(ex.as_expr(v) if v is not None else ex.sym(A[i])
               for i, v in enumerate(a if a is not None else [None] * 7))
    if len(av) != 7:
        raise InvalidCaseParams("seven a-coefficients required")
    a1, a2, a3, a4, a5, a6, a7 = av
    xe, ye = ex.sym(X), ex.sym(Y)
    if case_id == "i":
        bv = ex.ZERO if b is None else ex.as_expr(b)
        F = a3 * xe**3 + a4 * xe**2 + a5 * xe + a6
        G = a1 * ye + a2
    else:
        bv = ex.sym(B) if b is None else ex.as_expr(b)
        if isinstance(bv, ex.Rat) and bv.value == 0:
            raise InvalidCaseParams(f"case {case_id} requires b != 0")
        if case_id == "ii":
            F = (a3 + a5 * xe) * ex.cos(bv * xe) + (a4 + a6 * xe) * ex.sin(bv * xe)
            G = a1 * ex.exp(bv * ye) + a2 * ex.exp(-1 * bv * ye)
        else:
            F = (a3 + a5 * xe) * ex.exp(bv * xe) + (a4 + a6 * xe) * ex.exp(-1 * bv * xe)
            G = a1 * ex.cos(bv * ye) + a2 * ex.sin(bv * ye)
    if H is None:
        H = ex.mul(ex.rat(Fraction(1, 6)), a7, ex.pow_(xe, 3))
    H = ex.as_expr(H)
    # f2 = (H''' - a7)/Re keeps H''' = Re f2 + a7 an identity
    H3 = ex.diff(ex.diff(ex.diff(H, X), X), X)
    f2 = ex.div(ex.sub(H3, a7), ex.sym(RE))
    f1 = ex.add(ex.mul(F, G), H)
    degenerate = normal.is_zero(ex.sub(f1, H))
    case = AnsatzCase(case_id, av, bv, normal.canonical(f1),
                      normal.canonical(f2), H, degenerate,
                      f1_derivs=_f1_derivs(f1))
    return case
