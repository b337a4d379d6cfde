"""Canonical rational normal form and the zero test built on it.

A :class:`NormalForm` is a polynomial numerator over a *factored* monic
denominator.  Atoms and jet symbols are treated as algebraically
independent after the construction-time rewrites (see ``expr``), which is
exactly strong enough to decide zero for every expression class used by
the flow model: rational functions of coordinates and parameters mixed
with ``arctan``, the two-element ``log`` basis, exponentials, and sines
and cosines of a common argument.

Reduction policy: rational content lives in the numerator, denominator
factors are monic under the global monomial order, and cancellation uses
exact multivariate division against each stored factor (so repeated
factors like ``(x^2+y^2)^k`` cancel without a general multivariate gcd).
A full gcd pass is deliberately not attempted; an uncancelled common
factor costs size, never correctness, since the zero test only consults
the numerator.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, Tuple

from . import expr as ex
from .poly import Poly, grlex_key
from .symbols import Symbol, TransSymbol

DenFactors = Tuple[Tuple[Poly, int], ...]


class DivisionByZeroExpr(ZeroDivisionError):
    """A denominator normalized to the zero polynomial."""


class NotPolynomial(ValueError):
    """Collected indeterminates occur inside a denominator or atom argument."""


class NormalForm:
    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: DenFactors):
        self.num = num
        if num.is_zero():
            den = ()
        self.den = den

    # -- constructors ---------------------------------------------------

    @staticmethod
    def const(c) -> "NormalForm":
        return NormalForm(Poly.const(c), ())

    @staticmethod
    def symbol(s: Symbol) -> "NormalForm":
        return NormalForm(Poly.symbol(s), ())

    # -- queries ----------------------------------------------------------

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def den_factors(self) -> DenFactors:
        return self.den

    def __eq__(self, other):
        return (isinstance(other, NormalForm) and self.num == other.num
                and self.den == other.den)

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"NormalForm({self.to_expr()!r})"

    def signed_content(self):
        """(rational content with leading sign, primitive part as Expr).

        Only available for denominator-free forms; otherwise
        ``(1, None)`` so callers fall back to sign canonicalization.
        """
        if self.den or self.num.is_zero():
            return Fraction(1), None
        c, prim = self.num.primitive()
        return c, NormalForm(prim, ()).to_expr()

    def canonical_sign(self):
        """(sign, expr) with the numerator's leading coefficient positive."""
        _, lead = self.num.leading()
        s = 1 if lead > 0 else -1
        canon = self if s == 1 else NormalForm(self.num.neg(), self.den)
        return s, canon.to_expr()

    # -- arithmetic -------------------------------------------------------

    def add(self, other: "NormalForm") -> "NormalForm":
        if self.is_zero():
            return other
        if other.is_zero():
            return self
        if not self.den and not other.den:
            return NormalForm(self.num.add(other.num), ())
        union = _merge_max(self.den, other.den)
        a = self.num.mul(_complement(union, self.den))
        b = other.num.mul(_complement(union, other.den))
        return _reduced(a.add(b), union)

    def neg(self) -> "NormalForm":
        return NormalForm(self.num.neg(), self.den)

    def sub(self, other: "NormalForm") -> "NormalForm":
        return self.add(other.neg())

    def mul(self, other: "NormalForm") -> "NormalForm":
        if self.is_zero() or other.is_zero():
            return NormalForm(Poly({}), ())
        den = _merge_add(self.den, other.den)
        return _reduced(self.num.mul(other.num), den)

    def inv(self) -> "NormalForm":
        if self.num.is_zero():
            raise DivisionByZeroExpr("inverse of zero expression")
        c, mono, rest = self.num.split_monomial()
        scale = Fraction(1) / c
        new_den = [(Poly.symbol(s), e) for s, e in mono]
        if rest is not None:
            lc, monic = rest.monic()
            scale /= lc
            new_den.append((monic, 1))
        num = Poly.const(scale)
        for f, e in self.den:
            num = num.mul(f.pow(e))
        return _reduced(num, _sort_den(new_den))

    def pow(self, n: int) -> "NormalForm":
        if n == 0:
            return NormalForm.const(1)
        if n < 0:
            return self.inv().pow(-n)
        den = tuple((f, e * n) for f, e in self.den)
        return NormalForm(self.num.pow(n), den)

    # -- conversion ---------------------------------------------------------

    def to_expr(self) -> "ex.Expr":
        out = poly_to_expr(self.num)
        if self.den:
            out = ex.mul(out, *[ex.pow_(poly_to_expr(f), -e)
                                for f, e in self.den])
        return out


def poly_to_expr(p: Poly) -> "ex.Expr":
    terms = []
    for m, c in p.sorted_terms():
        factors = [ex.pow_(ex.sym(s), e) for s, e in m]
        terms.append(ex.mul(ex.rat(c), *factors))
    return ex.add(*terms) if terms else ex.ZERO


def _sort_den(factors: Iterable[Tuple[Poly, int]]) -> DenFactors:
    return tuple(sorted((fe for fe in factors if fe[1] != 0),
                        key=lambda fe: fe[0].canonical_key()))


def _merge_max(a: DenFactors, b: DenFactors) -> DenFactors:
    d = {f.canonical_key(): (f, e) for f, e in a}
    for f, e in b:
        k = f.canonical_key()
        if k in d:
            d[k] = (f, max(d[k][1], e))
        else:
            d[k] = (f, e)
    return _sort_den(d.values())


def _merge_add(a: DenFactors, b: DenFactors) -> DenFactors:
    d = {f.canonical_key(): (f, e) for f, e in a}
    for f, e in b:
        k = f.canonical_key()
        if k in d:
            d[k] = (f, d[k][1] + e)
        else:
            d[k] = (f, e)
    return _sort_den(d.values())


def _complement(union: DenFactors, have: DenFactors) -> Poly:
    hd = {f.canonical_key(): e for f, e in have}
    out = Poly.const(1)
    for f, e in union:
        missing = e - hd.get(f.canonical_key(), 0)
        if missing:
            out = out.mul(f.pow(missing))
    return out


def _reduced(num: Poly, den: DenFactors) -> NormalForm:
    if num.is_zero():
        return NormalForm(num, ())
    out = []
    for f, e in den:
        while e > 0:
            q = num.exact_div(f)
            if q is None:
                break
            num = q
            e -= 1
        if e:
            out.append((f, e))
    return NormalForm(num, tuple(out))


# ---------------------------------------------------------------------------
# normalize / zero test / collect


def normalize(e: "ex.Expr") -> NormalForm:
    """Canonical rational form; ``normalize(e).is_zero()`` decides zero."""
    memo: Dict[tuple, NormalForm] = {}

    def rec(x) -> NormalForm:
        got = memo.get(x.key)
        if got is not None:
            return got
        if isinstance(x, ex.Rat):
            r = NormalForm.const(x.value)
        elif isinstance(x, ex.Sym):
            r = NormalForm.symbol(x.sym)
        elif isinstance(x, ex.Sum):
            r = NormalForm.const(0)
            for t in x.terms:
                r = r.add(rec(t))
        elif isinstance(x, ex.Prod):
            r = NormalForm.const(x.coeff)
            for f in x.factors:
                r = r.mul(rec(f))
        elif isinstance(x, ex.Pow):
            r = rec(x.base).pow(x.exponent)
        else:  # pragma: no cover
            raise TypeError(f"cannot normalize {x!r}")
        memo[x.key] = r
        return r

    return rec(e)


def is_zero(e: "ex.Expr") -> bool:
    return normalize(e).is_zero()


def canonical(e: "ex.Expr") -> "ex.Expr":
    """Unique expression representative of the normal form."""
    return normalize(e).to_expr()


def collect(e: "ex.Expr", inds) -> "dict[ex.Expr, ex.Expr]":
    """Coefficients of ``e`` as a polynomial in the given indeterminates.

    Returns monomial-expression -> coefficient-expression, monomials in
    descending graded-lexicographic order; the sum of products rebuilds
    ``e``.  Raises :class:`NotPolynomial` if an indeterminate hides in a
    denominator or inside a transcendental argument.
    """
    inds = {s.sym if isinstance(s, ex.Sym) else s for s in inds}
    nf = normalize(e)
    for f, _ in nf.den:
        if f.symbols() & inds:
            raise NotPolynomial("indeterminate appears in a denominator")
    for s in nf.num.symbols() | {s for f, _ in nf.den for s in f.symbols()}:
        if isinstance(s, TransSymbol):
            if ex.free_symbols(s.arg) & inds:
                raise NotPolynomial(
                    "indeterminate appears inside a transcendental argument")
    groups: Dict[tuple, tuple] = {}
    coeffs: Dict[tuple, Dict] = {}
    for m, c in nf.num.terms.items():
        m_in = tuple((s, k) for s, k in m if s in inds)
        m_out = tuple((s, k) for s, k in m if s not in inds)
        groups[m_in] = m_in
        d = coeffs.setdefault(m_in, {})
        d[m_out] = d.get(m_out, Fraction(0)) + c
    out = {}
    for m_in in sorted(groups.values(), key=grlex_key):
        mono_expr = ex.mul(*[ex.pow_(ex.sym(s), k) for s, k in m_in]) \
            if m_in else ex.ONE
        coeff_nf = NormalForm(Poly.from_dict(coeffs[m_in]), nf.den)
        out[mono_expr] = coeff_nf.to_expr()
    return out
