"""Truncated power series in the small parameter, dependent-variable
expansion, and the recursion operator that generates order-(k+1)
infinitesimal coefficients from order-k ones.

An :class:`EpsSeries` holds exact expression coefficients of eps^0..eps^p;
all arithmetic drops terms beyond order p.  ``expand_dependent`` replaces
every jet of a declared dependent ``u`` by the series of jets of its
expansion coefficients ``u0, u1, ...`` (the order tag is part of the
function name, so mixed-order accidents cannot be constructed).

The recursion operator R acts as a derivation:

    R[u_(k)j]   = (k+1) u_(k+1)j
    R[f_(k)^(tau)] = f_(k+1)^(tau) + sum_i f_(k)^(tau+e_i) u_(1)i

for order-tagged coefficient families f (``FamilySymbol``), extended to
sums by linearity and to products by the Leibniz rule; everything else is
constant under R.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

from . import expr as ex
from . import normal
from .symbols import FamilySymbol, FunctionSymbol, JetSymbol, TABLE, VarSymbol


class OrderMismatch(ValueError):
    pass


class OrderOverflow(ValueError):
    pass


class UnknownDependent(ValueError):
    pass


@dataclass(frozen=True)
class EpsSeries:
    """Truncated series sum_k eps^k coeffs[k]; coefficients are eps-free."""

    order: int
    coeffs: Tuple[ex.Expr, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.order + 1:
            raise ValueError("coefficient count must be order + 1")

    @staticmethod
    def constant(e: ex.Expr, p: int) -> "EpsSeries":
        return EpsSeries(p, (e,) + (ex.ZERO,) * p)

    @staticmethod
    def zero(p: int) -> "EpsSeries":
        return EpsSeries(p, (ex.ZERO,) * (p + 1))

    def is_zero(self) -> bool:
        return all(normal.is_zero(c) for c in self.coeffs)

    def add(self, other: "EpsSeries") -> "EpsSeries":
        self._check(other)
        return EpsSeries(self.order, tuple(
            ex.add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def sub(self, other: "EpsSeries") -> "EpsSeries":
        self._check(other)
        return EpsSeries(self.order, tuple(
            ex.sub(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def mul(self, other: "EpsSeries") -> "EpsSeries":
        """Cauchy product truncated at the common order."""
        self._check(other)
        p = self.order
        out = []
        for k in range(p + 1):
            out.append(ex.add(*[ex.mul(self.coeffs[i], other.coeffs[k - i])
                                for i in range(k + 1)]))
        return EpsSeries(p, tuple(out))

    def scale(self, e) -> "EpsSeries":
        e = ex.as_expr(e)
        return EpsSeries(self.order, tuple(ex.mul(e, c) for c in self.coeffs))

    def neg(self) -> "EpsSeries":
        return self.scale(ex.MINUS_ONE)

    def map(self, fn) -> "EpsSeries":
        return EpsSeries(self.order, tuple(fn(c) for c in self.coeffs))

    def shift(self) -> "EpsSeries":
        """Multiply by eps, truncating: coefficient p falls off the end."""
        return EpsSeries(self.order, (ex.ZERO,) + self.coeffs[:-1])

    def to_expr(self, small: VarSymbol) -> ex.Expr:
        s = ex.sym(small)
        return ex.add(*[ex.mul(ex.pow_(s, k), c) if k else c
                        for k, c in enumerate(self.coeffs)])

    def canonical(self) -> "EpsSeries":
        return self.map(normal.canonical)

    def _check(self, other: "EpsSeries"):
        if self.order != other.order:
            raise OrderMismatch(
                f"series orders differ: {self.order} vs {other.order}")


def series_add(a: EpsSeries, b: EpsSeries) -> EpsSeries:
    return a.add(b)


def series_mul(a: EpsSeries, b: EpsSeries) -> EpsSeries:
    return a.mul(b)


def series_from_expr(e: ex.Expr, small: VarSymbol, p: int) -> EpsSeries:
    """Split an expression polynomial in the small parameter into a series,
    discarding orders beyond p."""
    parts = normal.collect(e, {small})
    coeffs = [ex.ZERO] * (p + 1)
    for mono, coeff in parts.items():
        if mono is ex.ONE:
            k = 0
        elif isinstance(mono, ex.Sym):
            k = 1
        else:  # Pow(eps, n)
            k = mono.exponent
        if k <= p:
            coeffs[k] = ex.add(coeffs[k], coeff)
    return EpsSeries(p, tuple(coeffs))


# ---------------------------------------------------------------------------
# dependent-variable expansion


class ExpansionScheme:
    """Names and order bookkeeping of the expansion u = sum eps^k u_(k).

    The order-k coefficient of dependent ``u`` is the function symbol
    ``u{k}`` over the same arguments.
    """

    def __init__(self, dependents, max_order: int):
        self.dependents: Tuple[FunctionSymbol, ...] = tuple(dependents)
        self.max_order = max_order
        self._coeff: Dict[Tuple[str, int], FunctionSymbol] = {}
        self._order_of: Dict[str, Tuple[FunctionSymbol, int]] = {}
        for dep in self.dependents:
            for k in range(max_order + 1):
                f = TABLE.function(f"{dep.name}{k}", dep.args)
                self._coeff[(dep.name, k)] = f
                self._order_of[f.name] = (dep, k)

    def coeff_fn(self, dep: FunctionSymbol, k: int) -> FunctionSymbol:
        if k > self.max_order:
            raise OrderOverflow(f"order {k} exceeds declared maximum "
                                f"{self.max_order}")
        return self._coeff[(dep.name, k)]

    def order_of(self, f: FunctionSymbol) -> Optional[Tuple[FunctionSymbol, int]]:
        return self._order_of.get(f.name)

    def is_coeff_fn(self, f: FunctionSymbol) -> bool:
        return f.name in self._order_of

    def jet_series(self, dep: FunctionSymbol, index, p: int) -> EpsSeries:
        return EpsSeries(p, tuple(
            ex.sym(TABLE.jet(self.coeff_fn(dep, k), index))
            for k in range(p + 1)))


def expand_dependent(e: ex.Expr, system, p: int) -> EpsSeries:
    """Expand every dependent-variable jet of ``e`` and truncate at p.

    ``system`` must expose ``dependents``, ``small``, ``auxiliaries`` and
    ``scheme(p)`` (see the invariance module).  Jets of functions that are
    neither declared dependents, their expansion coefficients, nor declared
    auxiliaries raise :class:`UnknownDependent`.
    """
    scheme: ExpansionScheme = system.scheme(p)
    allowed = {f.name for f in system.auxiliaries}
    dep_by_name = {d.name: d for d in system.dependents}
    mapping = {}
    for s in ex.jet_symbols(e):
        dep = dep_by_name.get(s.func.name)
        if dep is not None:
            mapping[s] = scheme.jet_series(dep, s.index, p).to_expr(system.small)
        elif scheme.is_coeff_fn(s.func) or s.func.name in allowed:
            continue
        else:
            raise UnknownDependent(
                f"function {s.func.name!r} is not declared in the system")
    expanded = ex.substitute(e, mapping) if mapping else e
    return series_from_expr(expanded, system.small, p)


# ---------------------------------------------------------------------------
# recursion operator


def recursion_R(e: ex.Expr, scheme: ExpansionScheme) -> ex.Expr:
    """One application of the recursion operator R (see module docstring).

    ``e`` must be polynomial in order-tagged symbols: expansion-coefficient
    values ``u_(k)j`` (zero-index jets of the scheme's coefficient
    functions) and :class:`FamilySymbol` atoms; variables and parameters
    are constants.  Raises :class:`OrderOverflow` when a shift would pass
    the scheme's declared maximum order.
    """
    active = []
    for s in ex.free_symbols(e):
        if isinstance(s, FamilySymbol):
            active.append((s, _family_image(s, scheme)))
        elif isinstance(s, JetSymbol):
            tagged = scheme.order_of(s.func)
            if tagged is None:
                continue
            if s.order != 0:
                raise ValueError(
                    f"R acts on point values only; got derivative {s.name!r}")
            dep, k = tagged
            nxt = scheme.coeff_fn(dep, k + 1)
            active.append((s, ex.mul(ex.rat(k + 1),
                                     ex.sym(TABLE.jet(nxt, s.index)))))
    parts = []
    for s, image in active:
        d = ex.diff_wrt(e, s)
        if d is not ex.ZERO:
            parts.append(ex.mul(d, image))
    return ex.add(*parts) if parts else ex.ZERO


def _family_image(s: FamilySymbol, scheme: ExpansionScheme) -> ex.Expr:
    if s.order + 1 > scheme.max_order:
        raise OrderOverflow(
            f"family order {s.order + 1} exceeds maximum {scheme.max_order}")
    shifted = ex.sym(TABLE.family(s.base, s.order + 1, s.udiff, s.coords))
    chain = []
    for i, coord in enumerate(s.coords):
        ud = list(s.udiff)
        ud[i] += 1
        bumped = TABLE.family(s.base, s.order, tuple(ud), s.coords)
        chain.append(ex.mul(ex.sym(bumped), _order1_partner(coord, scheme)))
    return ex.add(shifted, *chain)


def _order1_partner(coord, scheme: ExpansionScheme) -> ex.Expr:
    """u_(1)j matching a zero-order coordinate u_(0)j."""
    if not isinstance(coord, JetSymbol) or coord.order != 0:
        raise ValueError(f"family coordinate {coord!r} must be a point value")
    tagged = scheme.order_of(coord.func)
    if tagged is None or tagged[1] != 0:
        raise ValueError(
            f"family coordinate {coord!r} is not a zero-order expansion symbol")
    dep, _ = tagged
    return ex.sym(TABLE.jet(scheme.coeff_fn(dep, 1), coord.index))


def equation_series(eq: ex.Expr, components: Dict[str, "EpsSeries"],
                    small: VarSymbol, p: int) -> EpsSeries:
    """Evaluate an equation over closed-form component series.

    ``components[f]`` is the series of dependent ``f``; its jets become
    derivative series of the coefficients.  Walking the tree with series
    arithmetic truncates early, so nonlinear terms never touch coefficient
    orders their eps-prefactor would discard.
    """
    dcache: Dict[Tuple[str, Tuple[int, ...]], EpsSeries] = {}

    def dseries(s: JetSymbol) -> EpsSeries:
        key = (s.func.name, s.index)
        got = dcache.get(key)
        if got is None:
            coeffs = components[s.func.name].coeffs
            out = []
            for c in coeffs:
                for v, cnt in zip(s.func.args, s.index):
                    for _ in range(cnt):
                        c = ex.diff(c, v)
                out.append(c)
            got = EpsSeries(p, tuple(out))
            dcache[key] = got
        return got

    memo: Dict[tuple, EpsSeries] = {}

    def rec(x: ex.Expr) -> EpsSeries:
        got = memo.get(x.key)
        if got is not None:
            return got
        if isinstance(x, ex.Rat):
            r = EpsSeries.constant(x, p)
        elif isinstance(x, ex.Sym):
            s = x.sym
            if s is small:
                r = EpsSeries.constant(ex.ONE, p).shift()
            elif isinstance(s, JetSymbol) and s.func.name in components:
                r = dseries(s)
            else:
                r = EpsSeries.constant(x, p)
        elif isinstance(x, ex.Sum):
            r = EpsSeries.zero(p)
            for t in x.terms:
                r = r.add(rec(t))
        elif isinstance(x, ex.Prod):
            # fold factors with the most leading zeros first: their shifts
            # truncate the partial products the earliest
            parts = sorted((rec(f) for f in x.factors),
                           key=_leading_zeros, reverse=True)
            r = EpsSeries.constant(ex.rat(x.coeff), p)
            for s in parts:
                r = r.mul(s)
        elif isinstance(x, ex.Pow):
            base = rec(x.base)
            r = _series_pow(base, x.exponent, p)
        else:  # pragma: no cover
            raise TypeError(f"cannot expand {x!r}")
        memo[x.key] = r
        return r

    return rec(eq)


def _leading_zeros(s: EpsSeries) -> int:
    n = 0
    for c in s.coeffs:
        if c is ex.ZERO:
            n += 1
        else:
            break
    return n


def _series_pow(base: EpsSeries, n: int, p: int) -> EpsSeries:
    if all(c is ex.ZERO for c in base.coeffs[1:]):
        return EpsSeries.constant(ex.pow_(base.coeffs[0], n), p)
    if n >= 0:
        out = EpsSeries.constant(ex.ONE, p)
        for _ in range(n):
            out = out.mul(base)
        return out
    return _series_pow(_series_inv(base, p), -n, p)


def _series_inv(base: EpsSeries, p: int) -> EpsSeries:
    c0 = base.coeffs[0]
    if c0 is ex.ZERO:
        raise ZeroDivisionError("series with zero leading coefficient")
    inv0 = ex.pow_(c0, -1)
    out = [inv0]
    for k in range(1, p + 1):
        acc = ex.ZERO
        for i in range(1, k + 1):
            acc = ex.add(acc, ex.mul(base.coeffs[i], out[k - i]))
        out.append(ex.mul(ex.MINUS_ONE, inv0, acc))
    return EpsSeries(p, tuple(out))


def abstract_tilde_coefficients(base: str, coords, scheme: ExpansionScheme,
                                p: int):
    """Expanded infinitesimal coefficients of an abstract family.

    Starting from the order-0 family symbol ``base_(0)(x, u_(0))``, iterate
    ``tilde_(k+1) = R[tilde_(k)] / (k+1)`` up to order p.  ``coords`` are
    the zero-order expansion symbols the family may depend on.
    """
    coords = tuple(coords)
    cur = ex.sym(TABLE.family(base, 0, (0,) * len(coords), coords))
    out = [cur]
    for k in range(p):
        cur = ex.mul(ex.rat(Fraction(1, k + 1)), recursion_R(cur, scheme))
        out.append(cur)
    return out


def instantiate_family(e: ex.Expr, slices: Dict[str, list]) -> ex.Expr:
    """Replace family symbols by concrete Taylor slices.

    ``slices[base][k]`` is the coefficient of the k-th power of the small
    parameter, as an expression in the family's zero-order coordinates;
    formal u-derivatives on a symbol are applied to the slice, and slices
    beyond the provided list are zero.  The order-k family member equals
    k! times the Taylor slice: iterating R applies no 1/k weights itself,
    so the factorial is what the recursion's 1/(k+1) divisions consume
    when they rebuild the expansion.
    """
    from math import factorial

    mapping = {}
    for s in ex.free_symbols(e):
        if not isinstance(s, FamilySymbol):
            continue
        given = slices.get(s.base, [])
        if s.order < len(given):
            val = ex.mul(ex.rat(factorial(s.order)), given[s.order])
        else:
            val = ex.ZERO
        for coord, cnt in zip(s.coords, s.udiff):
            for _ in range(cnt):
                val = ex.diff_wrt(val, coord)
        mapping[s] = val
    return ex.substitute(e, mapping) if mapping else e
