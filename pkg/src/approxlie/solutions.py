"""Closed-form approximately invariant solution families and their checks.

The catalog ships five families exactly as displayed in their source:
one from the stretching subalgebra (SCALE_I), three from the translation
subalgebra (TRASL_I/II/III, one per constraint-ansatz case), and the
mud-flow boundary-value specialization (BVP_MUD).  Checks provided:

* full-system residual: the family substituted into the flow equations
  must leave order-0 and order-1 coefficients that normalize to zero; a
  non-zero survivor is reported verbatim, and when every survivor is a
  pure parameter constant an automatic repair by additive constant/linear
  terms is attempted and re-verified (original and repaired forms are kept
  side by side),
* invariant-surface conditions against the matching subalgebra generator,
* similarity reduction: profiles are extracted from the closed forms
  through the similarity representation and substituted into the reduced
  ODE systems,
* boundary conditions for the mud-flow problem at order zero, with the
  order-one slack reported.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from . import expr as ex
from . import normal
from .creeping import (A, EPS, KAPPA, P_FAR, RE, U_SHEAR, V_SUCTION, W,
                       X, Y, ansatz_case, creeping_system, paper_generators)
from .invariance import PdeSystem, surface_conditions
from .lie import Generator
from .parser import parse, render
from .report import VerificationReport
from .series import EpsSeries, equation_series
from .symbols import TABLE

FAMILY_IDS = ("scale_i", "trasl_i", "trasl_ii", "trasl_iii", "bvp_mud")


class UnknownFamily(ValueError):
    pass


class ExtractionFailure(ValueError):
    pass


# ---------------------------------------------------------------------------
# subalgebra generators


def xi_A(k1=None, k2=None, k3=None, f1: Optional[ex.Expr] = None,
         f2: Optional[ex.Expr] = None) -> Generator:
    """Stretching-subalgebra generator: k1*Xi3 + k2*Xi6 + k3*Xi7 + Xi8 + Xi9."""
    g = paper_generators(f1, f2)
    k1 = ex.as_expr(k1 if k1 is not None else KAPPA[0])
    k2 = ex.as_expr(k2 if k2 is not None else KAPPA[1])
    k3 = ex.as_expr(k3 if k3 is not None else KAPPA[2])
    out = g["xi3"].scale(k1).add(g["xi6"].scale(k2)).add(
        g["xi7"].scale(k3)).add(g["xi8"]).add(g["xi9"])
    return replace(out.canonical(), name="xiA")


def xi_B(k1=None, k2=None, k3=None, k4=None, f1: Optional[ex.Expr] = None,
         f2: Optional[ex.Expr] = None) -> Generator:
    """Translation-subalgebra generator:
    Xi1 + k1*Xi2 + k2*Xi3 + k3*Xi4 + k4*Xi5 + Xi9."""
    g = paper_generators(f1, f2)
    k1 = ex.as_expr(k1 if k1 is not None else KAPPA[0])
    k2 = ex.as_expr(k2 if k2 is not None else KAPPA[1])
    k3 = ex.as_expr(k3 if k3 is not None else KAPPA[2])
    k4 = ex.as_expr(k4 if k4 is not None else KAPPA[3])
    out = g["xi1"].add(g["xi2"].scale(k1)).add(g["xi3"].scale(k2)).add(
        g["xi4"].scale(k3)).add(g["xi5"].scale(k4)).add(g["xi9"])
    return replace(out.canonical(), name="xiB")


# ---------------------------------------------------------------------------
# closed forms, verbatim

_T = "arctan(y/x)"
_L = "(log((y/x)^2+1)/2 + log(x))"

_SCALE_I = {
    "u0": f"k1*Re/2*y*{_T} + c2*x + c1*y",
    "u1": (f"((k2-k3)/2*((k1*{_L} + c4)*Re*y + (c1+c3)*x - 2*c2*y)"
           f" - a1*a4*x - (3*a2*a3 + Re/2*(k1*k3+a7))*y)*{_T}"
           f" + (k2-k3)*(c2*x + c1*y)*{_L}"
           f" + c6*x + (c5 - c1*(k2-k3))*y"),
    "v0": f"-k1*Re/2*x*{_T} + (k1*Re/2 - c2)*y + c3*x",
    "v1": (f"(-(k2-k3)/2*((k1*{_L} + c4)*Re*x + 2*c2*x + (c1+c3)*y)"
           f" + a1*a4*y + (3*a2*a3 + Re/2*(k1*k2+a7))*x)*{_T}"
           f" + ((k2-k3)*(c3*x + (k1*Re/2 - c2)*y) - 2*a1*a4*x)*{_L}"
           f" - 3*a1*a3*x^2 + c7*x"
           f" - (c6 - Re/2*(c4*(k2-k3) - k1*k2 - a7) + 3*a2*a3)*y + a1*a5"),
    "p0": f"k1*{_L} + c4",
    "p1": (f"-k1/2*(k2-k3)*{_T}^2 + k1/8*(k2-k3)*log((y/x)^2+1)^2"
           f" + ((k2-k3)*(c3-c1) - 2*a1*a4)/Re*{_T}"
           f" + ((k2-k3)/2*(k1*log(x) + c4) - k1*k3/2 - 3*a2*a3/Re - a7/2)"
           f"*log((y/x)^2+1)"
           f" + k1/2*(k2-k3)*log(x)^2"
           f" + (c4*(k2-k3) - k1*k3 - 6*a2*a3/Re - a7)*log(x)"
           f" + k1*Re*x/(x^2+y^2)*((4*c2-k1*Re)*x + 2*(c1+c3)*y)"
           f" - 6*a1*a3/Re*y + c8"),
}

_O = "(y - k1*x)"
_Q = "(k1^2 + 1)"

_TRASL_COMMON = {
    "u0": f"k2*Re/(2*{_Q}^2)*{_O}^2 + c1*{_O} + c2",
    "v0": f"k1*k2*Re/(2*{_Q}^2)*{_O}^2 + k1*c1*{_O} + c3",
    "p0": f"k1*k2/{_Q}*{_O} + k2*x + c4",
}

# case (i): the omega-polynomial orders carry the ansatz inhomogeneity
_TRASL_I = dict(_TRASL_COMMON, **{
    "u1": (f"-a1*a3/{_Q}^2*{_O}^3"
           f" + (k2*Re*(k1*(3*k1*k3 - 4*k4) - k3)/(2*{_Q}^3)"
           f"    - (a7*Re + 2*(3*a2*a3 - a1*a4*k1))/(2*{_Q}^2))*{_O}^2"
           f" + (k2*Re*(k1*k3 - k4)/{_Q}^2*x + c5)*{_O}"
           f" + c1*(k1*k3 - k4)*x + c6"),
    "v1": (f"-a1*a3*k1/{_Q}^2*{_O}^3"
           f" + (k2*Re*(k4 + k1*(2*(k1^2 - 1)*k3 - 3*k1*k4))/(2*{_Q}^3)"
           f"    - k1*(a7*Re + 2*(3*a2*a3 - a1*a4*k1))/(2*{_Q}^2))*{_O}^2"
           f" + ((k1*k3 - k4)*(k1*k2*Re/{_Q}^2*x - c1) + k1*c5)*{_O}"
           f" - a1*(a3*x^3 + a4*x^2) + (k1*c1*(k1*k3 - k4) - a1*a5)*x + c7"),
    "p1": (f"k2^2*Re^2/{_Q}^2*{_O}^2"
           f" + (k2*(2*c1*Re + k4*k1*(k1*k4 + 2*k3)/{_Q}^2)"
           f"    - (a7*k1*Re + 2*(3*a2*a3*k1 + a1*a4))/(Re*{_Q}))*{_O}"
           f" + 3*a1*a3/(Re*{_Q})*(k1*(x^2 - y^2) - 2*x*y)"
           f" - (a7 + 6*a2*a3/Re + k2*(k1*k4 + k3)/{_Q})*x + c8"),
})

# case (ii) particular blocks: coefficients of sin(b x) and cos(b x)
_EM2 = "a2*exp(-b*y)"
_EP2 = "a1*exp(b*y)"
_II_SU = (f"(({_EM2}*(a5 - a6*k1) + {_EP2}*(a5 + a6*k1))/{_Q}*b*x"
          f" + {_EM2}*(b*(a3 - a4*k1)*{_Q} - a6*(k1^2 - 1) + 2*a5*k1)/{_Q}^2"
          f" + {_EP2}*(b*(a3 + a4*k1)*{_Q} - a6*(k1^2 - 1) - 2*a5*k1)/{_Q}^2)")
_II_CU = (f"(({_EM2}*(a6 + a5*k1) + {_EP2}*(a6 - a5*k1))/{_Q}*b*x"
          f" + {_EM2}*(b*(a4 + a3*k1)*{_Q} + a5*(k1^2 - 1) + 2*a6*k1)/{_Q}^2"
          f" + {_EP2}*(b*(a4 - a3*k1)*{_Q} + a5*(k1^2 - 1) - 2*a6*k1)/{_Q}^2)")
_II_SV = (f"(({_EM2}*(a6 + a5*k1) - {_EP2}*(a6 - a5*k1))/{_Q}*b*x"
          f" + {_EM2}*(b*(a4 + a3*k1)*{_Q} - a6*k1*(k1^2 - 1) + 2*a5*k1^2)/{_Q}^2"
          f" - {_EP2}*(b*(a4 - a3*k1)*{_Q} + a6*k1*(k1^2 - 1) + 2*a5*k1^2)/{_Q}^2)")
_II_CV = (f"(({_EM2}*(a5 - a6*k1) - {_EP2}*(a5 + a6*k1))/{_Q}*b*x"
          f" + {_EM2}*(b*(a3 - a4*k1)*{_Q} - a5*k1*(k1^2 - 1) - 2*a6*k1^2)/{_Q}^2"
          f" - {_EP2}*(b*(a3 + a4*k1)*{_Q} + a5*k1*(k1^2 - 1) - 2*a6*k1^2)/{_Q}^2)")
_II_SP = f"(2*b*({_EM2}*(a5 - a6*k1) + {_EP2}*(a5 + a6*k1))/(Re*{_Q}))"
_II_CP = f"(2*b*({_EM2}*(a6 + a5*k1) + {_EP2}*(a6 - a5*k1))/(Re*{_Q}))"

_II_BLOCK_U = f"({_II_SU}*sin(b*x) - {_II_CU}*cos(b*x))"
_II_BLOCK_V = f"({_II_SV}*sin(b*x) + {_II_CV}*cos(b*x))"
_II_BLOCK_P = f"({_II_SP}*sin(b*x) - {_II_CP}*cos(b*x))"

# shared omega-polynomial part of the translation solutions for the
# homogeneous cases (ii) and (iii)
_TRASL_HOM_U1 = (f"Re*(k2*(k1*(3*k1*k3 - 4*k4) - k3) - a7*{_Q})/(2*{_Q}^3)*{_O}^2"
                 f" + (k2*Re*(k1*k3 - k4)/{_Q}^2*x + c5)*{_O}"
                 f" + c1*(k1*k3 - k4)*x + c6")
_TRASL_HOM_V1 = (f"Re*(k2*(k4 + k1*(2*(k1^2 - 1)*k3 - 3*k1*k4))"
                 f" - a7*k1*{_Q})/(2*{_Q}^3)*{_O}^2"
                 f" + ((k1*k3 - k4)*(k1*k2*Re/{_Q}^2*x - c1) + k1*c5)*{_O}"
                 f" + k1*c1*(k1*k3 - k4)*x + c7")
_TRASL_HOM_P1 = (f"k2^2*Re^2/{_Q}^2*{_O}^2 + 2*k2*(c1*Re - (k1*k3 - k4)/{_Q}^2)*{_O}"
                 f" - (k2*k3 + a7)/{_Q}*x - (k2*k4 + a7*k1)/{_Q}*y + c8")

_TRASL_II = dict(_TRASL_COMMON, **{
    "u1": f"{_TRASL_HOM_U1} + {_II_BLOCK_U}",
    "v1": f"{_TRASL_HOM_V1} + {_II_BLOCK_V}",
    "p1": f"{_TRASL_HOM_P1} + {_II_BLOCK_P}",
})

# case (iii) blocks: coefficients of sin(b y) and cos(b y)
_EM3 = "exp(-b*x)"
_EP3 = "exp(b*x)"
_III_SU = (f"((a6*{_EM3}*(a2 - a1*k1) - a5*{_EP3}*(a2 + a1*k1))/{_Q}*b*x"
           f" + {_EM3}*(b*a4*(a2 - a1*k1)*{_Q}"
           f"   - a6*(a2*(k1^2 - 1) + 2*a1*k1))/{_Q}^2"
           f" - {_EP3}*(b*a3*(a2 + a1*k1)*{_Q}"
           f"   + a5*(a2*(k1^2 - 1) - 2*a1*k1))/{_Q}^2)")
_III_CU = (f"((a6*{_EM3}*(a1 + a2*k1) - a5*{_EP3}*(a1 - a2*k1))/{_Q}*b*x"
           f" + {_EM3}*(b*a4*(a1 + a2*k1)*{_Q}"
           f"   - a6*(a1*(k1^2 - 1) - 2*a2*k1))/{_Q}^2"
           f" - {_EP3}*(b*a3*(a1 - a2*k1)*{_Q}"
           f"   + a5*(a1*(k1^2 - 1) + 2*a2*k1))/{_Q}^2)")
_III_SV = (f"((a6*{_EM3}*(a1 + a2*k1) + a5*{_EP3}*(a1 - a2*k1))/{_Q}*b*x"
           f" + {_EM3}*(b*a4*(a1 + a2*k1)*{_Q}"
           f"   - a6*k1*(a2*(k1^2 - 1) + 2*a1*k1))/{_Q}^2"
           f" + {_EP3}*(b*a3*(a1 - a2*k1)*{_Q}"
           f"   - a5*k1*(a2*(k1^2 - 1) - 2*a1*k1))/{_Q}^2)")
_III_CV = (f"((a6*{_EM3}*(a2 - a1*k1) + a5*{_EP3}*(a2 + a1*k1))/{_Q}*b*x"
           f" + {_EM3}*(b*a4*(a2 - a1*k1)*{_Q}"
           f"   + a6*k1*(a1*(k1^2 - 1) - 2*a2*k1))/{_Q}^2"
           f" + {_EP3}*(b*a3*(a2 + a1*k1)*{_Q}"
           f"   + a5*k1*(a1*(k1^2 - 1) + 2*a2*k1))/{_Q}^2)")
_III_SP = f"(2*b*(a6*{_EM3}*(a2 - a1*k1) - a5*{_EP3}*(a2 + a1*k1))/(Re*{_Q}))"
_III_CP = f"(2*b*(a6*{_EM3}*(a1 + a2*k1) - a5*{_EP3}*(a1 - a2*k1))/(Re*{_Q}))"

_III_BLOCK_U = f"({_III_SU}*sin(b*y) + {_III_CU}*cos(b*y))"
_III_BLOCK_V = f"({_III_SV}*sin(b*y) - {_III_CV}*cos(b*y))"
_III_BLOCK_P = f"({_III_SP}*sin(b*y) + {_III_CP}*cos(b*y))"

_TRASL_III = dict(_TRASL_COMMON, **{
    "u1": f"{_TRASL_HOM_U1} + {_III_BLOCK_U}",
    "v1": f"{_TRASL_HOM_V1} + {_III_BLOCK_V}",
    "p1": f"{_TRASL_HOM_P1} + {_III_BLOCK_P}",
})

_BVP_MUD = {
    "u0": "u_shear*y",
    "u1": "-a1*a4*x*arctan(y/x) + c5*y",
    "v0": "-v_suction*x",
    "v1": ("-3*a1*a3*x^2 + c7*x + a1*a5"
           " + a1*a4*(y*arctan(y/x) - x*log(x^2+y^2))"),
    "p0": "p_far",
    "p1": "-2*a1*a4/Re*arctan(y/x) - 6*a1*a3/Re*y + c8",
}

_FORMS = {
    "scale_i": _SCALE_I,
    "trasl_i": _TRASL_I,
    "trasl_ii": _TRASL_II,
    "trasl_iii": _TRASL_III,
    "bvp_mud": _BVP_MUD,
}

_CASE_OF = {"trasl_i": "i", "trasl_ii": "ii", "trasl_iii": "iii",
            "scale_i": "i", "bvp_mud": "i"}

# default numeric values: generic magnitudes, reproducible, overridable
DEFAULT_NUMERIC = {
    "Re": 1.0,
    "k1": 0.3, "k2": 0.7, "k3": 0.4, "k4": 0.2,
    "a1": 1.0, "a2": 0.5, "a3": 0.25, "a4": 0.1, "a5": 0.2, "a6": 0.3,
    "a7": 0.4,
    "b": 1.0,
    "c1": 1.0, "c2": 0.5, "c3": -0.5, "c4": 0.25, "c5": 0.1, "c6": -0.1,
    "c7": 0.2, "c8": -0.2,
    "u_shear": 1.0, "v_suction": 0.5, "p_far": 0.25,
}

DEFAULT_REGION = {
    "scale_i": ((0.5, 2.5), (-1.0, 1.0)),
    "bvp_mud": ((0.5, 2.5), (-1.0, 1.0)),
    "trasl_i": ((-2.0, 2.0), (-2.0, 2.0)),
    "trasl_ii": ((-2.0, 2.0), (-2.0, 2.0)),
    "trasl_iii": ((-2.0, 2.0), (-2.0, 2.0)),
}

# the zeroth order of the mud-flow family solves the system exactly, so its
# sweep residual is a pure eps^2/eps^3 mix; a smaller first-order amplitude
# keeps the standard eps grid inside the asymptotic slope regime
_FAMILY_NUMERIC_OVERRIDES = {
    "bvp_mud": {"a1": 0.2, "c5": 0.02, "c7": 0.04, "c8": -0.04},
}

_NEEDS_POSITIVE_X = {"scale_i", "bvp_mud"}


@dataclass(frozen=True)
class SolutionFamily:
    """A named closed-form approximate solution of the flow equations."""

    family_id: str
    u: EpsSeries
    v: EpsSeries
    p: EpsSeries
    singular_locus: str
    similarity_variable: str
    numeric_params: Dict[str, float] = field(default_factory=dict)
    repair_note: str = ""

    def components(self, control: bool = False) -> Dict[str, ex.Expr]:
        """Closed forms with the small parameter explicit; ``control``
        truncates to the zeroth order."""
        eps = ex.sym(EPS)
        out = {}
        for name, s in (("u", self.u), ("v", self.v), ("p", self.p)):
            if control:
                out[name] = s.coeffs[0]
            else:
                out[name] = ex.add(s.coeffs[0], ex.mul(eps, s.coeffs[1]))
        return out

    def series_map(self) -> Dict[str, EpsSeries]:
        return {"u": self.u, "v": self.v, "p": self.p}

    def locus_ok(self, x: float, y: float, margin: float = 1e-3) -> bool:
        if self.family_id in _NEEDS_POSITIVE_X:
            return x >= margin and x * x + y * y >= margin ** 2
        return True

    def at_eps_zero(self) -> Dict[str, ex.Expr]:
        return {"u": self.u.coeffs[0], "v": self.v.coeffs[0],
                "p": self.p.coeffs[0]}

    def with_components(self, u: EpsSeries, v: EpsSeries, p: EpsSeries,
                        note: str) -> "SolutionFamily":
        return replace(self, u=u, v=v, p=p, repair_note=note)


def solution_family(family_id: str,
                    params: Optional[Dict[str, object]] = None
                    ) -> SolutionFamily:
    """Catalog lookup; ``params`` substitutes free constants by name
    (numbers or expression strings) and updates the numeric defaults."""
    family_id = family_id.lower()
    forms = _FORMS.get(family_id)
    if forms is None:
        raise UnknownFamily(f"unknown solution family {family_id!r}; "
                            f"expected one of {', '.join(FAMILY_IDS)}")
    subs = {}
    numeric = {k: v for k, v in DEFAULT_NUMERIC.items()}
    numeric.update(_FAMILY_NUMERIC_OVERRIDES.get(family_id, {}))
    for name, val in (params or {}).items():
        s = TABLE.find_var(name)
        if s is None:
            raise UnknownFamily(f"unknown family parameter {name!r}")
        if isinstance(val, str):
            subs[s] = parse(val)
        elif isinstance(val, (int,)):
            subs[s] = ex.rat(val)
            numeric[name] = float(val)
        elif isinstance(val, float):
            numeric[name] = val
        else:
            subs[s] = ex.as_expr(val)

    def build(lo: str, hi: str) -> EpsSeries:
        c0, c1 = parse(forms[lo]), parse(forms[hi])
        if subs:
            c0, c1 = ex.substitute(c0, subs), ex.substitute(c1, subs)
        for c in (c0, c1):
            if EPS in ex.free_symbols(c):
                raise UnknownFamily(
                    "family coefficients must not mention the small parameter")
        return EpsSeries(1, (c0, c1))

    locus = ("x <= 0 excluded (log/arctan branch); origin excluded"
             if family_id in _NEEDS_POSITIVE_X else "none")
    omega = "y/x" if family_id == "scale_i" else (
        "n/a" if family_id == "bvp_mud" else "y - k1*x")
    return SolutionFamily(
        family_id=family_id,
        u=build("u0", "u1"), v=build("v0", "v1"), p=build("p0", "p1"),
        singular_locus=locus, similarity_variable=omega,
        numeric_params=numeric)


# ---------------------------------------------------------------------------
# full-system residual check with repair


def full_residual_series(fam: SolutionFamily,
                         system: Optional[PdeSystem] = None) -> List[EpsSeries]:
    system = system or creeping_system()
    comps = fam.series_map()
    return [equation_series(eq, comps, EPS, 1) for eq in system.equations]


def check_full_residual(fam: SolutionFamily,
                        system: Optional[PdeSystem] = None,
                        repair: bool = True
                        ) -> Tuple[VerificationReport, SolutionFamily]:
    """Substitute the family into the flow equations; orders 0 and 1 must
    vanish.  Returns the report and the family to use downstream (repaired
    when a repair was possible and re-verified)."""
    system = system or creeping_system()
    series = full_residual_series(fam, system)
    survivors = []
    for i, s in enumerate(series):
        for k, coeff in enumerate(s.coeffs):
            c = normal.canonical(coeff)
            if c is not ex.ZERO:
                survivors.append((i, k, c))
    if not survivors:
        return VerificationReport(
            subject=f"{fam.family_id}: full-system residual", status="PASS",
            details="all order-0/order-1 residual coefficients are "
                    "symbolically zero"), fam
    listing = [(f"eq{i + 1}/order{k}", render(c)) for i, k, c in survivors]
    if repair:
        fixed = _attempt_repair(fam, survivors)
        if fixed is not None:
            re_series = full_residual_series(fixed, system)
            if all(normal.is_zero(c) for s in re_series for c in s.coeffs):
                # a PASS report carries no surviving residuals; the original
                # coefficients are still emitted verbatim alongside the
                # repair so the discrepancy is never silently accepted
                survived = "; ".join(f"{lab}: {s}" for lab, s in listing)
                rep = VerificationReport(
                    subject=f"{fam.family_id}: full-system residual",
                    status="PASS",
                    details="original form leaves non-zero coefficients "
                            f"[{survived}]; repaired by additive "
                            "constant/linear terms -- " + fixed.repair_note)
                return rep, fixed
    return VerificationReport(
        subject=f"{fam.family_id}: full-system residual", status="FAIL",
        symbolic_residuals=listing,
        details=f"{len(survivors)} non-zero residual coefficients "
                "(no admissible repair)"), fam


def _attempt_repair(fam: SolutionFamily, survivors) -> Optional[SolutionFamily]:
    """Counter constant survivors with additive linear terms.

    A constant continuity residual c is cancelled by u -= c*x; constant
    momentum residuals (rx, ry) by p -= rx*x + ry*y (a linear-in-omega
    pressure term).  Anything x/y-dependent is out of the repair class.
    """
    for _, _, c in survivors:
        free = ex.free_symbols(c)
        if X in free or Y in free or any(
                getattr(s, "fn", None) for s in free):
            return None
    du = [ex.ZERO, ex.ZERO]
    dp = [ex.ZERO, ex.ZERO]
    notes = []
    for i, k, c in survivors:
        if i == 0:
            du[k] = ex.sub(du[k], ex.mul(c, ex.sym(X)))
            notes.append(f"u[{k}] -= ({render(c)})*x")
        elif i == 1:
            dp[k] = ex.sub(dp[k], ex.mul(c, ex.sym(X)))
            notes.append(f"p[{k}] -= ({render(c)})*x")
        else:
            dp[k] = ex.sub(dp[k], ex.mul(c, ex.sym(Y)))
            notes.append(f"p[{k}] -= ({render(c)})*y")
    u = EpsSeries(1, tuple(ex.add(a, d) for a, d in zip(fam.u.coeffs, du)))
    p = EpsSeries(1, tuple(ex.add(a, d) for a, d in zip(fam.p.coeffs, dp)))
    return fam.with_components(u, fam.v, p, "; ".join(notes))


def catalog_family(family_id: str,
                   params: Optional[Dict[str, object]] = None,
                   system: Optional[PdeSystem] = None,
                   repair: bool = True) -> Tuple[SolutionFamily,
                                                 VerificationReport]:
    """Family plus its full-residual report, repaired when necessary."""
    fam = solution_family(family_id, params)
    rep, fixed = check_full_residual(fam, system, repair=repair)
    return fixed, rep


# ---------------------------------------------------------------------------
# surface conditions


def matching_generator(fam: SolutionFamily) -> Generator:
    """The subalgebra generator the family is invariant under.

    The generator's pressure slot carries -(6 a3 G + a7)/Re for every
    admissible H, while the solution displays use a7 as the un-divided
    constant; the two conventions agree once the ansatz is instantiated
    with a7 -> Re*a7.  The mud-flow family additionally pins the
    parameter identification of :func:`scale_to_bvp_map` (k1 = 0,
    k2 = k3, a7 -> -6 a2 a3 in generator units).
    """
    free = [None] * 6
    if fam.family_id == "bvp_mud":
        case = ansatz_case("i", a=free + [parse("-6*a2*a3")])
        return xi_A(k1=0, k2=ex.sym(KAPPA[2]), f1=case.f1, f2=case.f2)
    case = ansatz_case(_CASE_OF[fam.family_id], a=free + [parse("Re*a7")])
    if fam.family_id == "scale_i":
        return xi_A(f1=case.f1, f2=case.f2)
    return xi_B(f1=case.f1, f2=case.f2)


def check_surface_conditions(fam: SolutionFamily, g: Generator,
                             system: Optional[PdeSystem] = None
                             ) -> VerificationReport:
    """Substitute the closed forms into g's separated surface equations."""
    system = system or creeping_system()
    scheme = system.scheme(1)
    comps = {"u": fam.u, "v": fam.v, "p": fam.p}
    conditions = surface_conditions(g, system)
    residuals = []
    for dep, k, cond in conditions:
        mapping = {}
        for s in ex.jet_symbols(cond):
            tagged = scheme.order_of(s.func)
            if tagged is None:
                continue
            base, order = tagged
            val = comps[base.name].coeffs[order]
            for v, cnt in zip(s.func.args, s.index):
                for _ in range(cnt):
                    val = ex.diff(val, v)
            mapping[s] = val
        r = normal.canonical(ex.substitute(cond, mapping))
        if r is not ex.ZERO:
            residuals.append((f"{dep}/order{k}", render(r)))
    status = "PASS" if not residuals else "FAIL"
    return VerificationReport(
        subject=f"{fam.family_id}: surface conditions vs {g.name}",
        status=status, symbolic_residuals=residuals,
        details="all separated surface equations hold" if not residuals
        else f"{len(residuals)} surface equations violated")


# ---------------------------------------------------------------------------
# similarity reduction


_SCALE_REDUCED = (
    "V0_w - w*U0_w + U0",
    "(w^2+1)*U0_ww + Re*(w*P0_w - k1)",
    "w*(U0_ww + w*V0_ww) - Re*P0_w",
    "V1_w - w*U1_w + U1 + (k2-k3)*U0",
    "(w^2+1)*((w*U0-V0)*U0_www - U1_ww/Re)"
    " + w^2*(2*(w*V0_w-V0)-U0_w)*V0_ww"
    " - w*(2*(w*U0+V0)-(5*w^2+2)*U0_w)*U0_ww"
    " + (k2-k3)*(P0 - (U0-2*w*U0_w)/Re) - k1*k3 - 6*a2*a3/Re - a7 - w*P1_w",
    "w*(w*U0-(w^2+1)*V0)*U0_www + w^3*U0*V0_www - w/Re*(w*V1_ww+U1_ww)"
    " - ((5*w^2+2)*U0_w + w*((w^2-1)*V0_w-7*U0) + 2*(w^2+1)*V0)*U0_ww"
    " - w^2*(w*U0_w-4*U0)*V0_ww + (k2-k3)/Re*(U0_w+2*w*V0_w-V0)"
    " + 2*a1*a4/Re + P1_w",
)

_TRASL_REDUCED = (
    "V0_w - k1*U0_w",
    "(k1^2+1)*U0_ww + Re*(k1*P0_w - k2)",
    "k1*(U0_ww + k1*V0_ww) - Re*P0_w",
    "V1_w - k1*U1_w + (k1*k3-k4)*U0_w",
    "(k1^2+1)*((k1*U0-V0)*U0_www - U1_ww/Re)"
    " + k1^2*(2*k1*V0_w-U0_w)*V0_ww"
    " + k1*((5*k1^2+2)*U0_w + 2*(k1*k3-k4)/Re)*U0_ww"
    " - k1*P1_w + (k1*k3-k4)*P0_w - k2*k3 - a7 + (ALPHA)",
    "k1*(k1*U0-(k1^2+1)*V0)*U0_www + k1^3*U0*V0_www"
    " - k1/Re*(U1_ww+k1*V1_ww)"
    " - (k1*(k1^2-1)*V0_w + (5*k1^2+2)*U0_w - (k1*k3-k4)/Re)*U0_ww"
    " - k1*(k1^2*U0_w - 2*(k1*k3-k4)/Re)*V0_ww + P1_w + (BETA)",
)

_TRASL_ALPHA_BETA = {
    "trasl_i": ("-6*a3/Re*(a1*w+a2)", "2*a1*a4/Re"),
    "trasl_ii": ("0", "0"),
    "trasl_iii": ("0", "0"),
}

# particular parts of the order-1 similarity representations, as closed
# forms in (x, y); the leftover after removing them must be omega-only
_TRASL_BLOCKS = {
    "trasl_i": ("0", "-a1*(a3*x^2 + a4*x + a5)*x",
                "-3*a3/Re*(2*(a1*(y - k1*x) + a2) + k1*a1*x)*x"),
    "trasl_ii": (_II_BLOCK_U, _II_BLOCK_V, _II_BLOCK_P),
    "trasl_iii": (_III_BLOCK_U, _III_BLOCK_V, _III_BLOCK_P),
}


def extract_profiles(fam: SolutionFamily) -> Dict[str, ex.Expr]:
    """Profiles of the similarity variable from the closed forms.

    Inverts the similarity representation; raises
    :class:`ExtractionFailure` when the leftover is not a function of the
    similarity variable alone, instead of guessing.
    """
    if fam.family_id == "bvp_mud":
        raise ExtractionFailure("bvp_mud has no reduced system")
    w = ex.sym(W)
    if fam.family_id == "scale_i":
        sub = {Y: ex.mul(w, ex.sym(X))}
        comp = {f"{n}{k}": ex.substitute(s.coeffs[k], sub)
                for n, s in fam.series_map().items() for k in (0, 1)}
        xe = ex.sym(X)
        lx = ex.log(xe)
        k1, k2, k3 = (ex.sym(k) for k in KAPPA[:3])
        a1, a2, a3, a4, a5, a6, a7 = (ex.sym(a) for a in A)
        re_ = ex.sym(RE)
        prof = {}
        prof["U0"] = ex.div(comp["u0"], xe)
        prof["V0"] = ex.div(comp["v0"], xe)
        prof["P0"] = ex.sub(comp["p0"], ex.mul(k1, lx))
        d = ex.sub(k2, k3)
        prof["U1"] = ex.sub(ex.div(comp["u1"], xe),
                            ex.mul(d, prof["U0"], lx))
        v1_shift = ex.mul(a1, ex.add(ex.mul(ex.rat(3), a3, xe, xe),
                                     ex.mul(ex.rat(2), a4, xe, lx),
                                     ex.mul(ex.MINUS_ONE, a5)))
        prof["V1"] = ex.sub(ex.div(ex.add(comp["v1"], v1_shift), xe),
                            ex.mul(d, prof["V0"], lx))
        p1_shift = ex.add(
            ex.mul(ex.rat(-6), a1, a3, ex.pow_(re_, -1), w, xe),
            ex.mul(ex.rat(Fraction(1, 2)), k1, d, lx, lx),
            ex.mul(ex.sub(ex.mul(d, prof["P0"]),
                          ex.add(ex.mul(k1, k3),
                                 ex.mul(ex.rat(6), a2, a3, ex.pow_(re_, -1)),
                                 a7)), lx))
        prof["P1"] = ex.sub(comp["p1"], p1_shift)
    else:
        sub = {Y: ex.add(w, ex.mul(ex.sym(KAPPA[0]), ex.sym(X)))}
        comp = {f"{n}{k}": ex.substitute(s.coeffs[k], sub)
                for n, s in fam.series_map().items() for k in (0, 1)}
        bu, bv, bp = (ex.substitute(parse(t), sub)
                      for t in _TRASL_BLOCKS[fam.family_id])
        xe = ex.sym(X)
        k1, k2, k3, k4 = (ex.sym(k) for k in KAPPA)
        a7 = ex.sym(A[6])
        drift = ex.sub(ex.mul(k1, k3), k4)
        prof = {}
        prof["U0"] = comp["u0"]
        prof["V0"] = comp["v0"]
        prof["P0"] = ex.sub(comp["p0"], ex.mul(k2, xe))
        prof["U1"] = ex.sub(comp["u1"],
                            ex.add(bu, ex.mul(drift, xe,
                                              ex.diff(prof["U0"], W))))
        prof["V1"] = ex.sub(comp["v1"],
                            ex.add(bv, ex.mul(drift, xe,
                                              ex.diff(prof["V0"], W))))
        p_lin = ex.mul(ex.sub(ex.mul(drift, ex.diff(prof["P0"], W)),
                              ex.add(ex.mul(k2, k3), a7)), xe)
        prof["P1"] = ex.sub(comp["p1"], ex.add(bp, p_lin))
    out = {}
    for name, e in prof.items():
        c = normal.canonical(e)
        bad = {s for s in ex.free_symbols(c) if s is X}
        if bad:
            raise ExtractionFailure(
                f"profile {name} of {fam.family_id} still depends on x: "
                f"{render(c)[:200]}")
        out[name] = c
    return out


def check_reduced_system(fam: SolutionFamily) -> VerificationReport:
    """Extracted profiles substituted into the reduced ODE system."""
    if fam.family_id == "bvp_mud":
        raise ExtractionFailure("bvp_mud has no reduced system")
    profiles = extract_profiles(fam)
    if fam.family_id == "scale_i":
        eqs = [parse(t) for t in _SCALE_REDUCED]
    else:
        alpha, beta = _TRASL_ALPHA_BETA[fam.family_id]
        eqs = [parse(t.replace("(ALPHA)", f"({alpha})")
                     .replace("(BETA)", f"({beta})")) for t in _TRASL_REDUCED]
    mapping = {}
    for name, prof in profiles.items():
        f = TABLE.find_function(name)
        d0 = prof
        d1 = ex.diff(d0, W)
        d2 = ex.diff(d1, W)
        d3 = ex.diff(d2, W)
        for idx, val in (((0,), d0), ((1,), d1), ((2,), d2), ((3,), d3)):
            mapping[TABLE.jet(f, idx)] = val
    residuals = []
    for i, eq in enumerate(eqs):
        r = normal.canonical(ex.substitute(eq, mapping))
        if r is not ex.ZERO:
            residuals.append((f"reduced eq {i + 1}", render(r)))
    status = "PASS" if not residuals else "FAIL"
    return VerificationReport(
        subject=f"{fam.family_id}: reduced ODE system", status=status,
        symbolic_residuals=residuals,
        details="profiles satisfy all six reduced equations"
        if not residuals else f"{len(residuals)} reduced equations violated")


# ---------------------------------------------------------------------------
# boundary value problem


@dataclass(frozen=True)
class BoundaryData:
    """Wall shear, suction gradient, and far-field pressure constants."""

    u_shear: float = 1.0
    v_suction: float = 0.5
    p_far: float = 0.25


def check_bvp(fam: SolutionFamily,
              data: Optional[BoundaryData] = None) -> VerificationReport:
    """Mud-flow boundary conditions at order zero; order-one slack reported.

    Conditions: u(x,0)=O(eps), v(x,0)=-v_suction*x+O(eps), the far-field
    shear profile u -> u_shear*y, dv/dy(x,inf)=O(eps), p -> p_far+O(eps);
    setting eps=0 must reproduce the exact unperturbed solution.
    """
    if fam.family_id != "bvp_mud":
        raise UnknownFamily("check_bvp applies to the bvp_mud family")
    data = data or BoundaryData()
    us = ex.sym(U_SHEAR)
    vs = ex.sym(V_SUCTION)
    pf = ex.sym(P_FAR)
    xe, ye = ex.sym(X), ex.sym(Y)
    at_wall = lambda e: ex.substitute(e, {Y: ex.ZERO})  # noqa: E731
    conds = [
        ("u(x,0)", EpsSeries(1, tuple(at_wall(c) for c in fam.u.coeffs))),
        ("v(x,0) + v_suction*x",
         EpsSeries(1, (ex.add(at_wall(fam.v.coeffs[0]), ex.mul(vs, xe)),
                       at_wall(fam.v.coeffs[1])))),
        ("u - u_shear*y (far field)",
         EpsSeries(1, (ex.sub(fam.u.coeffs[0], ex.mul(us, ye)),
                       fam.u.coeffs[1]))),
        ("dv/dy (y -> inf)",
         EpsSeries(1, tuple(ex.diff(c, Y) for c in fam.v.coeffs))),
        ("p - p_far (far field)",
         EpsSeries(1, (ex.sub(fam.p.coeffs[0], pf), fam.p.coeffs[1]))),
    ]
    failures = []
    slack = []
    for label, series in conds:
        r0 = normal.canonical(series.coeffs[0])
        if r0 is not ex.ZERO:
            failures.append((label + " @order0", render(r0)))
        r1 = normal.canonical(series.coeffs[1])
        if r1 is not ex.ZERO:
            slack.append(f"{label}: order-1 slack {render(r1)[:120]}")
    zero_eps = fam.at_eps_zero()
    recovered = [
        ("u|eps=0 - u_shear*y", ex.sub(zero_eps["u"], ex.mul(us, ye))),
        ("v|eps=0 + v_suction*x", ex.add(zero_eps["v"], ex.mul(vs, xe))),
        ("p|eps=0 - p_far", ex.sub(zero_eps["p"], pf)),
    ]
    for label, e in recovered:
        r = normal.canonical(e)
        if r is not ex.ZERO:
            failures.append((label, render(r)))
    status = "PASS" if not failures else "FAIL"
    details = (f"boundary data u_shear={data.u_shear}, "
               f"v_suction={data.v_suction}, p_far={data.p_far}; "
               "order-0 boundary conditions exact; eps=0 recovers the "
               "unperturbed solution")
    if slack:
        details += "; " + "; ".join(slack)
    return VerificationReport(
        subject=f"{fam.family_id}: boundary value problem", status=status,
        symbolic_residuals=failures, details=details)


def scale_to_bvp_map() -> Dict[str, str]:
    """Parameter identification taking SCALE_I onto the mud-flow solution.

    Derived by imposing the approximate boundary conditions on the scale
    family: the admissible choice is k1 = 0, k2 = k3 (common value
    immaterial), c1 = u_shear, c2 = 0, c3 = -v_suction, c4 = p_far,
    c6 = 0, and a7 = -6*a2*a3/Re, with c5, c7, c8, a1, a3, a4, a5 free.
    """
    return {
        "k1": "0", "k2": "k3", "c1": "u_shear", "c2": "0",
        "c3": "-v_suction", "c4": "p_far", "c6": "0",
        "a7": "-6*a2*a3/Re",
    }
