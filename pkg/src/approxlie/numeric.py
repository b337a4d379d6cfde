"""Floating-point evaluation, a finite-difference derivative oracle, and
the order-of-accuracy sweep for solution residuals.

Evaluation is IEEE double with a deterministic operation order (canonical
construction order); an extended-precision mode backed by ``mpmath``
serves the small-eps tail of sweeps where squared residuals approach the
double rounding floor.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from statistics import linear_regression
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from . import expr as ex
from .symbols import Symbol, TransSymbol, VarSymbol

SINGULARITY_FLOOR = 1e-300


class MissingBinding(KeyError):
    pass


class NumericSingularity(ArithmeticError):
    pass


_DOUBLE_FNS = {
    "log": math.log, "exp": math.exp, "sin": math.sin, "cos": math.cos,
    "arctan": math.atan,
}


def _extended_fns():
    import mpmath
    mpmath.mp.dps = 31
    return {
        "log": mpmath.log, "exp": mpmath.exp, "sin": mpmath.sin,
        "cos": mpmath.cos, "arctan": mpmath.atan,
    }, mpmath.mpf


def eval_expr(e: ex.Expr, bindings: Dict, mode: str = "double") -> float:
    """Evaluate with symbols bound by object or by printed name."""
    if mode == "double":
        fns, lift = _DOUBLE_FNS, float
    elif mode == "extended":
        fns, lift = _extended_fns()
    else:
        raise ValueError(f"unknown evaluation mode {mode!r}")
    named = {}
    for k, v in bindings.items():
        named[k.name if isinstance(k, Symbol) else k] = v
    memo: Dict[tuple, object] = {}

    def rec(x: ex.Expr):
        got = memo.get(x.key)
        if got is not None:
            return got
        if isinstance(x, ex.Rat):
            r = lift(x.value.numerator) / lift(x.value.denominator)
        elif isinstance(x, ex.Sym):
            s = x.sym
            if isinstance(s, TransSymbol):
                r = fns[s.fn](rec(s.arg))
            else:
                if s.name not in named:
                    raise MissingBinding(f"no binding for {s.name!r}")
                r = lift(named[s.name])
        elif isinstance(x, ex.Sum):
            r = lift(0)
            for t in x.terms:
                r = r + rec(t)
        elif isinstance(x, ex.Prod):
            r = lift(x.coeff.numerator) / lift(x.coeff.denominator)
            for f in x.factors:
                r = r * rec(f)
        elif isinstance(x, ex.Pow):
            b = rec(x.base)
            if x.exponent < 0 and abs(b) < SINGULARITY_FLOOR:
                raise NumericSingularity(
                    f"division by {b!r} while evaluating")
            r = b ** x.exponent
        else:  # pragma: no cover
            raise TypeError(f"cannot evaluate {x!r}")
        memo[x.key] = r
        return r

    return rec(e)


def spot_eval_zero(e: ex.Expr, n: int = 8, seed: int = 1729) -> float:
    """Scale-aware numeric check of a symbolically-zero expression.

    Evaluates the unnormalized tree at ``n`` random generic points and
    returns the worst |value| / max(1, sum of |term| magnitudes); anything
    above ~1e-9 indicates an over-aggressive rewrite.
    """
    if e is ex.ZERO:
        return 0.0
    rng = random.Random(seed)
    syms = [s for s in ex.free_symbols(e)
            if not isinstance(s, TransSymbol)]
    syms.sort(key=lambda s: s.key)
    worst = 0.0
    for _ in range(n):
        binds = {s: rng.uniform(0.7, 1.6) for s in syms}
        val = abs(eval_expr(e, binds))
        scale = _term_scale(e, binds)
        worst = max(worst, val / max(1.0, scale))
    return worst


def _term_scale(e: ex.Expr, binds) -> float:
    if isinstance(e, ex.Sum):
        return sum(abs(eval_expr(t, binds)) for t in e.terms)
    return abs(eval_expr(e, binds))


def fd_check(e: ex.Expr, v: VarSymbol, point: Dict, h: float = 1e-5,
             mode: str = "double") -> float:
    """Relative error of the symbolic derivative against a central difference."""
    name = v.name
    up = dict(point)
    dn = dict(point)
    up[name] = point[name] + h
    dn[name] = point[name] - h
    fd = (eval_expr(e, up, mode) - eval_expr(e, dn, mode)) / (2 * h)
    exact = eval_expr(ex.diff(e, v), point, mode)
    return abs(fd - exact) / max(1.0, abs(exact))


# ---------------------------------------------------------------------------
# sampling and the eps sweep


@dataclass(frozen=True)
class SamplePlan:
    """Rectangular (x, y) sampling box with a seeded point count."""

    region: Tuple[Tuple[float, float], Tuple[float, float]]
    count: int = 64
    seed: int = 42

    def points(self, locus_ok: Optional[Callable[[float, float], bool]] = None,
               margin: float = 1e-3) -> List[Tuple[float, float]]:
        (x0, x1), (y0, y1) = self.region
        rng = random.Random(self.seed)
        out = []
        guard = 0
        while len(out) < self.count:
            guard += 1
            if guard > 1000 * self.count:
                raise ValueError(
                    "sampling box lies (almost) entirely on the singular locus")
            x = rng.uniform(x0, x1)
            y = rng.uniform(y0, y1)
            if locus_ok is not None and not locus_ok(x, y):
                continue
            out.append((x, y))
        return out


@dataclass
class SweepResult:
    """Residual norms per eps value and the fitted log-log slope."""

    subject: str
    eps_values: List[float]
    per_equation: List[List[float]]  # per eps: one max per equation
    max_norms: List[float]
    slope: Optional[float]
    status: str  # "OK" | "EXACT"

    def csv_rows(self) -> List[List[str]]:
        rows = [["eps", "residual_eq1", "residual_eq2", "residual_eq3", "max"]]
        for eps, eqs, m in zip(self.eps_values, self.per_equation,
                               self.max_norms):
            rows.append([repr(eps)] + [f"{v:.16e}" for v in eqs]
                        + [f"{m:.16e}"])
        return rows

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "eps": self.eps_values,
            "per_equation": self.per_equation,
            "max_norms": self.max_norms,
            "slope": self.slope,
            "status": self.status,
        }


def residual_expressions(system, components: Dict[str, ex.Expr]) -> List[ex.Expr]:
    """Equations with every dependent jet replaced by derivatives of the
    given closed-form components (which may contain the small parameter)."""
    out = []
    for eq in system.equations:
        mapping = {}
        for s in ex.jet_symbols(eq):
            if s.func.name not in components:
                continue
            val = components[s.func.name]
            for v, cnt in zip(s.func.args, s.index):
                for _ in range(cnt):
                    val = ex.diff(val, v)
            mapping[s] = val
        out.append(ex.substitute(eq, mapping))
    return out


def eps_sweep(family, system, eps_list: Sequence[float], plan: SamplePlan,
              control: bool = False, mode: str = "double",
              extra_bindings: Optional[Dict[str, float]] = None) -> SweepResult:
    """Max full-system residual over samples per eps, with slope fit.

    ``control=True`` truncates the family to its zeroth-order part, which
    should drop the observed order from p+1 to 1.  Families that solve the
    system exactly report status EXACT and no slope.
    """
    if not eps_list:
        raise ValueError("eps list must not be empty")
    if any(not 0 < e < 1 for e in eps_list):
        raise ValueError("eps values must lie in (0, 1)")
    if list(eps_list) != sorted(eps_list, reverse=True):
        raise ValueError("eps values must be descending")
    comps = family.components(control=control)
    residuals = residual_expressions(system, comps)
    binds_base = dict(family.numeric_params)
    if extra_bindings:
        binds_base.update(extra_bindings)
    pts = plan.points(family.locus_ok)
    per_eq: List[List[float]] = []
    max_norms: List[float] = []
    for eps in eps_list:
        eq_max = [0.0] * len(residuals)
        for (x, y) in pts:
            binds = dict(binds_base)
            binds.update({"x": x, "y": y, system.small.name: eps})
            for i, r in enumerate(residuals):
                val = abs(float(eval_expr(r, binds, mode)))
                if val > eq_max[i]:
                    eq_max[i] = val
        per_eq.append(eq_max)
        max_norms.append(max(eq_max))
    floor = 100 * (2.220446049250313e-16 if mode == "double" else 1e-30)
    usable = [(math.log(e), math.log(m))
              for e, m in zip(eps_list, max_norms) if m > floor]
    if len(usable) >= 2:
        slope, _ = linear_regression([u[0] for u in usable],
                                     [u[1] for u in usable])
        status = "OK"
    else:
        slope = None
        status = "EXACT" if all(m < 1e-12 for m in max_norms) else "OK"
    return SweepResult(getattr(family, "family_id", "family"),
                       list(eps_list), per_eq, max_norms, slope, status)
