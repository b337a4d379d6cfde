"""Immutable symbolic expression trees with exact rational coefficients.

Nodes: rational constants, symbol leaves, sums, products, integer powers.
Constructors always return lightly-canonicalized trees: sums and products
are flattened and sorted by structural key, like terms and like factors are
merged, and rational arithmetic is folded.  No distribution happens here --
full expansion to a canonical rational form is the job of ``normal``.

Transcendental atoms are created through :func:`trans`, which canonicalizes
the argument (unique representative of its rational normal form) and applies
the fixed rewrite rules the atom registry carries:

* ``exp``: zero argument folds to 1; an integer rational content ``n`` of
  the argument is pulled out as a power, so ``exp(2*b*y) == exp(b*y)^2`` and
  ``exp(-t) == exp(t)^-1`` share one generator;
* ``sin``/``arctan`` are odd, ``cos`` is even in the argument sign;
* ``log`` splits multiplicatively: monomial factors of the argument come
  out as integer multiples of ``log`` of single atoms and the remaining
  primitive polynomial part keeps its own atom, so
  ``log((y/x)^2 + 1) == log(x^2 + y^2) - 2*log(x)``.

These rewrites are exact identities on the sampling domains used here
(positive arguments for ``log``); sign conventions follow the principal
branch.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Set

from .symbols import (FamilySymbol, JetSymbol, Symbol, TransSymbol, TABLE,
                      VarSymbol)

ZERO_KEY = (0, 0, 1)


class ExprError(ValueError):
    pass


class CircularSubstitution(ExprError):
    pass


class FixpointExceeded(ExprError):
    pass


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    raise TypeError(f"expected exact rational, got {type(v).__name__}")


class Expr:
    __slots__ = ("key", "_hash")

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other or (isinstance(other, Expr) and self.key == other.key)

    def __repr__(self):
        from .parser import render
        return render(self)

    # Arithmetic sugar; accepts ints and Fractions on either side.

    def __add__(self, other):
        return add(self, as_expr(other))

    __radd__ = __add__

    def __sub__(self, other):
        return add(self, mul(MINUS_ONE, as_expr(other)))

    def __rsub__(self, other):
        return add(as_expr(other), mul(MINUS_ONE, self))

    def __mul__(self, other):
        return mul(self, as_expr(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return mul(self, pow_(as_expr(other), -1))

    def __rtruediv__(self, other):
        return mul(as_expr(other), pow_(self, -1))

    def __pow__(self, n):
        return pow_(self, n)

    def __neg__(self):
        return mul(MINUS_ONE, self)


class Rat(Expr):
    __slots__ = ("value",)

    def __init__(self, value: Fraction):
        self.value = value
        self.key = (0, value.numerator, value.denominator)
        self._hash = hash(self.key)


class Sym(Expr):
    __slots__ = ("sym",)

    def __init__(self, sym: Symbol):
        self.sym = sym
        self.key = (1,) + sym.key
        self._hash = hash(self.key)


class Pow(Expr):
    __slots__ = ("base", "exponent")

    def __init__(self, base: Expr, exponent: int):
        self.base = base
        self.exponent = exponent
        self.key = (2, base.key, exponent)
        self._hash = hash(self.key)


class Prod(Expr):
    """coeff * f1 * f2 * ...; factors sorted, none Rat/Prod, len >= 1."""

    __slots__ = ("coeff", "factors")

    def __init__(self, coeff: Fraction, factors: tuple):
        self.coeff = coeff
        self.factors = factors
        self.key = (3, coeff.numerator, coeff.denominator,
                    tuple(f.key for f in factors))
        self._hash = hash(self.key)


class Sum(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        self.terms = terms
        self.key = (4, tuple(t.key for t in terms))
        self._hash = hash(self.key)


_RAT_CACHE: Dict[Fraction, Rat] = {}
_SYM_CACHE: Dict[Symbol, Sym] = {}


def rat(v) -> Rat:
    f = _as_fraction(v)
    got = _RAT_CACHE.get(f)
    if got is None:
        got = Rat(f)
        _RAT_CACHE[f] = got
    return got


def sym(s: Symbol) -> Sym:
    got = _SYM_CACHE.get(s)
    if got is None:
        got = Sym(s)
        _SYM_CACHE[s] = got
    return got


ZERO = rat(0)
ONE = rat(1)
MINUS_ONE = rat(-1)


def as_expr(v) -> Expr:
    if isinstance(v, Expr):
        return v
    if isinstance(v, Symbol):
        return sym(v)
    return rat(v)


def _split_coeff(e: Expr):
    """Split a non-Sum node into (rational coefficient, residual factor)."""
    if isinstance(e, Rat):
        return e.value, ONE
    if isinstance(e, Prod):
        if len(e.factors) == 1:
            return e.coeff, e.factors[0]
        return e.coeff, Prod(Fraction(1), e.factors)
    return Fraction(1), e


def add(*terms) -> Expr:
    """Flattened, like-term-merged sum."""
    const = Fraction(0)
    buckets: Dict[tuple, list] = {}
    stack = list(terms)
    for t in stack:
        if isinstance(t, Sum):
            for u in t.terms:
                c, r = _split_coeff(u)
                if r is ONE:
                    const += c
                else:
                    b = buckets.get(r.key)
                    if b is None:
                        buckets[r.key] = [c, r]
                    else:
                        b[0] += c
        elif isinstance(t, Rat):
            const += t.value
        else:
            c, r = _split_coeff(t)
            if r is ONE:
                const += c
            else:
                b = buckets.get(r.key)
                if b is None:
                    buckets[r.key] = [c, r]
                else:
                    b[0] += c
    out = []
    for _, (c, r) in sorted(buckets.items()):
        if c == 0:
            continue
        out.append(r if c == 1 else _make_prod(c, r))
    if const != 0 or not out:
        out.insert(0, rat(const))
    if len(out) == 1:
        return out[0]
    return Sum(tuple(out))


def _make_prod(coeff: Fraction, e: Expr) -> Expr:
    if isinstance(e, Prod):
        return Prod(coeff * e.coeff, e.factors)
    return Prod(coeff, (e,))


def mul(*factors) -> Expr:
    """Flattened product; equal bases merge into integer powers."""
    coeff = Fraction(1)
    powers: Dict[tuple, list] = {}

    def feed(base: Expr, exp: int):
        nonlocal coeff
        if isinstance(base, Rat):
            coeff *= base.value ** exp
            return
        if isinstance(base, Pow):
            feed(base.base, base.exponent * exp)
            return
        if isinstance(base, Prod):
            coeff *= base.coeff ** exp
            for f in base.factors:
                feed(f, exp)
            return
        b = powers.get(base.key)
        if b is None:
            powers[base.key] = [exp, base]
        else:
            b[0] += exp

    for f in factors:
        feed(f, 1)
    if coeff == 0:
        return ZERO
    out = []
    for _, (e, base) in sorted(powers.items()):
        if e == 0:
            continue
        out.append(base if e == 1 else Pow(base, e))
    if not out:
        return rat(coeff)
    if coeff == 1 and len(out) == 1:
        return out[0]
    return Prod(coeff, tuple(out))


def pow_(base: Expr, n) -> Expr:
    if not isinstance(n, int):
        if isinstance(n, Fraction) and n.denominator == 1:
            n = n.numerator
        elif isinstance(n, Rat) and n.value.denominator == 1:
            n = n.value.numerator
        else:
            raise ExprError("only integer exponents are supported")
    if n == 0:
        return ONE
    if n == 1:
        return base
    if isinstance(base, Rat):
        if base.value == 0 and n < 0:
            raise ZeroDivisionError("0 raised to a negative power")
        return rat(base.value ** n)
    if isinstance(base, Pow):
        return pow_(base.base, base.exponent * n)
    if isinstance(base, Prod):
        return mul(rat(base.coeff ** n), *[pow_(f, n) for f in base.factors])
    return Pow(base, n)


def sub(a: Expr, b: Expr) -> Expr:
    return add(a, mul(MINUS_ONE, b))


def div(a: Expr, b: Expr) -> Expr:
    return mul(a, pow_(b, -1))


# ---------------------------------------------------------------------------
# transcendental atoms


def trans(fn: str, arg: Expr) -> Expr:
    """Canonical transcendental atom of ``arg``, after the rewrite rules."""
    from . import normal

    nf = normal.normalize(arg)
    if fn == "exp":
        if nf.is_zero():
            return ONE
        c, prim = nf.signed_content()
        if c.denominator == 1 and prim is not None:
            return pow_(_intern(fn, prim), c.numerator)
        s, canon = nf.canonical_sign()
        return pow_(_intern(fn, canon), s)
    if fn in ("sin", "arctan"):
        if nf.is_zero():
            return ZERO
        s, canon = nf.canonical_sign()
        return mul(rat(s), _intern(fn, canon))
    if fn == "cos":
        if nf.is_zero():
            return ONE
        _, canon = nf.canonical_sign()
        return _intern(fn, canon)
    if fn == "log":
        return _log_atom(nf)
    raise ExprError(f"unknown transcendental function {fn!r}")


def _intern(fn: str, canon_expr: Expr) -> Expr:
    return sym(TABLE.transcendental(fn, canon_expr, canon_expr.key))


def _log_atom(nf) -> Expr:
    """log of a rational form, split over monomial factors when safe."""
    from . import normal

    if nf.is_zero():
        raise ExprError("log of zero")
    num, den = nf.num, nf.den_factors()
    terms = []
    c, mono, rest = num.split_monomial()
    if c < 0:
        # negative leading content: keep the whole argument opaque
        arg = nf.to_expr()
        if isinstance(arg, Rat) and arg.value == 1:
            return ZERO
        return _intern("log", arg)
    if c != 1:
        terms.append(_intern("log", rat(c)))
    for s, e in mono:
        terms.append(mul(rat(e), _intern("log", sym(s))))
    if rest is not None:
        terms.append(_intern("log", normal.NormalForm(rest, ()).to_expr()))
    for poly, e in den:
        cc, mm, rr = poly.split_monomial()
        if cc != 1:
            terms.append(mul(MINUS_ONE, rat(e), _intern("log", rat(cc))))
        for s, k in mm:
            terms.append(mul(rat(-e * k), _intern("log", sym(s))))
        if rr is not None:
            terms.append(mul(rat(-e),
                             _intern("log", normal.NormalForm(rr, ()).to_expr())))
    if not terms:
        return ZERO
    return add(*terms)


def log(arg) -> Expr:
    return trans("log", as_expr(arg))


def exp(arg) -> Expr:
    return trans("exp", as_expr(arg))


def sin(arg) -> Expr:
    return trans("sin", as_expr(arg))


def cos(arg) -> Expr:
    return trans("cos", as_expr(arg))


def arctan(arg) -> Expr:
    return trans("arctan", as_expr(arg))


# ---------------------------------------------------------------------------
# differentiation

_TRANS_DERIV = {
    "log": lambda a: pow_(a, -1),
    "sin": lambda a: trans("cos", a),
    "cos": lambda a: mul(MINUS_ONE, trans("sin", a)),
    "arctan": lambda a: pow_(add(ONE, pow_(a, 2)), -1),
}


def _trans_deriv(s: TransSymbol) -> Expr:
    # d exp(t) = exp(t) dt; the others read their rule off the registry.
    if s.fn == "exp":
        return sym(s)
    return _TRANS_DERIV[s.fn](s.arg)


def diff(e: Expr, var: VarSymbol, promote_jets=True) -> Expr:
    """Exact partial derivative with respect to an independent variable.

    Jet symbols of functions declaring ``var`` promote their multi-index
    (total-derivative semantics).  With ``promote_jets=False`` they are
    held constant instead, giving the explicit partial on point
    expressions; a callable ``promote_jets`` decides per jet symbol.
    Parameters are constants; transcendental atoms follow their registry
    rule plus the chain rule.
    """
    if not isinstance(var, VarSymbol) or not var.is_independent:
        raise ExprError(f"{var!r} is not an independent variable")
    if callable(promote_jets):
        promote = promote_jets
    else:
        promote = (lambda s: True) if promote_jets else (lambda s: False)
    memo: Dict[tuple, Expr] = {}

    def rec(x: Expr) -> Expr:
        got = memo.get(x.key)
        if got is not None:
            return got
        if isinstance(x, Rat):
            r = ZERO
        elif isinstance(x, Sym):
            s = x.sym
            if isinstance(s, VarSymbol):
                r = ONE if s is var else ZERO
            elif isinstance(s, JetSymbol):
                if var in s.func.args and promote(s):
                    i = s.func.args.index(var)
                    idx = list(s.index)
                    idx[i] += 1
                    r = sym(TABLE.jet(s.func, idx))
                else:
                    r = ZERO
            elif isinstance(s, TransSymbol):
                da = rec(s.arg)
                r = ZERO if da is ZERO else mul(_trans_deriv(s), da)
            elif isinstance(s, FamilySymbol):
                raise ExprError(
                    "coefficient-family symbols have no spatial derivative")
            else:  # pragma: no cover
                raise ExprError(f"cannot differentiate {s!r}")
        elif isinstance(x, Sum):
            r = add(*[rec(t) for t in x.terms])
        elif isinstance(x, Prod):
            parts = []
            for i, f in enumerate(x.factors):
                df = rec(f)
                if df is ZERO:
                    continue
                rest = x.factors[:i] + x.factors[i + 1:]
                parts.append(mul(rat(x.coeff), df, *rest))
            r = add(*parts) if parts else ZERO
        elif isinstance(x, Pow):
            db = rec(x.base)
            if db is ZERO:
                r = ZERO
            else:
                r = mul(rat(x.exponent), pow_(x.base, x.exponent - 1), db)
        else:  # pragma: no cover
            raise ExprError(f"unknown node {x!r}")
        memo[x.key] = r
        return r

    return rec(e)


def diff_wrt(e: Expr, target: Symbol) -> Expr:
    """Formal partial derivative treating ``target`` as a coordinate.

    All other symbols (including other jet symbols of the same function)
    are held constant; transcendental atoms chain through their argument.
    Family symbols differentiate against their declared zero-order
    coordinates by bumping the u-derivative multi-index.
    """
    memo: Dict[tuple, Expr] = {}

    def rec(x: Expr) -> Expr:
        got = memo.get(x.key)
        if got is not None:
            return got
        if isinstance(x, Rat):
            r = ZERO
        elif isinstance(x, Sym):
            s = x.sym
            if s is target:
                r = ONE
            elif isinstance(s, TransSymbol):
                da = rec(s.arg)
                r = ZERO if da is ZERO else mul(_trans_deriv(s), da)
            elif isinstance(s, FamilySymbol) and target in s.coords:
                i = s.coords.index(target)
                ud = list(s.udiff)
                ud[i] += 1
                r = sym(TABLE.family(s.base, s.order, ud, s.coords))
            else:
                r = ZERO
        elif isinstance(x, Sum):
            r = add(*[rec(t) for t in x.terms])
        elif isinstance(x, Prod):
            parts = []
            for i, f in enumerate(x.factors):
                df = rec(f)
                if df is ZERO:
                    continue
                rest = x.factors[:i] + x.factors[i + 1:]
                parts.append(mul(rat(x.coeff), df, *rest))
            r = add(*parts) if parts else ZERO
        elif isinstance(x, Pow):
            db = rec(x.base)
            r = ZERO if db is ZERO else mul(rat(x.exponent),
                                            pow_(x.base, x.exponent - 1), db)
        else:  # pragma: no cover
            raise ExprError(f"unknown node {x!r}")
        memo[x.key] = r
        return r

    return rec(e)


# ---------------------------------------------------------------------------
# substitution and symbol scans


def substitute(e: Expr, rules, fixpoint: bool = False,
               max_rounds: int = 12) -> Expr:
    """Simultaneous one-pass substitution of whole symbols.

    ``rules`` is an ordered iterable of ``(Symbol | Sym, Expr)`` pairs (or a
    dict).  Replacements are not re-scanned within a pass; with
    ``fixpoint=True`` passes repeat until the expression stabilizes.  A rule
    whose replacement mentions its own symbol makes a fixpoint impossible
    and raises :class:`CircularSubstitution`; more than ``max_rounds``
    passes raises :class:`FixpointExceeded`.
    """
    if isinstance(rules, dict):
        items = list(rules.items())
    else:
        items = list(rules)
    mapping: Dict[Symbol, Expr] = {}
    for pat, rep in items:
        s = pat.sym if isinstance(pat, Sym) else pat
        if not isinstance(s, Symbol):
            raise ExprError("substitution patterns must be whole symbols")
        mapping[s] = as_expr(rep)
    if not mapping:
        return e
    if fixpoint:
        for s, rep in mapping.items():
            if s in free_symbols(rep):
                raise CircularSubstitution(
                    f"rule for {s!r} mentions itself; no fixpoint exists")
    for _ in range(max_rounds):
        out = _subst_once(e, mapping)
        if not fixpoint or out is e or out.key == e.key:
            return out
        e = out
    raise FixpointExceeded(f"substitution did not stabilize in {max_rounds} rounds")


def _subst_once(e: Expr, mapping: Dict[Symbol, Expr]) -> Expr:
    memo: Dict[tuple, Expr] = {}

    def rec(x: Expr) -> Expr:
        got = memo.get(x.key)
        if got is not None:
            return got
        if isinstance(x, Rat):
            r = x
        elif isinstance(x, Sym):
            rep = mapping.get(x.sym)
            if rep is not None:
                r = rep
            elif isinstance(x.sym, TransSymbol):
                new_arg = rec(x.sym.arg)
                r = x if new_arg is x.sym.arg else trans(x.sym.fn, new_arg)
            else:
                r = x
        elif isinstance(x, Sum):
            ts = [rec(t) for t in x.terms]
            r = x if all(a is b for a, b in zip(ts, x.terms)) else add(*ts)
        elif isinstance(x, Prod):
            fs = [rec(f) for f in x.factors]
            if all(a is b for a, b in zip(fs, x.factors)):
                r = x
            else:
                r = mul(rat(x.coeff), *fs)
        elif isinstance(x, Pow):
            b = rec(x.base)
            r = x if b is x.base else pow_(b, x.exponent)
        else:  # pragma: no cover
            raise ExprError(f"unknown node {x!r}")
        memo[x.key] = r
        return r

    return rec(e)


def free_symbols(e: Expr, into_args: bool = True) -> Set[Symbol]:
    """All symbols of ``e``; with ``into_args`` transcendental arguments
    are scanned too (the atoms themselves are always included)."""
    out: Set[Symbol] = set()
    seen = set()

    def rec(x: Expr):
        if x.key in seen:
            return
        seen.add(x.key)
        if isinstance(x, Sym):
            out.add(x.sym)
            if into_args and isinstance(x.sym, TransSymbol):
                rec(x.sym.arg)
        elif isinstance(x, Sum):
            for t in x.terms:
                rec(t)
        elif isinstance(x, Prod):
            for f in x.factors:
                rec(f)
        elif isinstance(x, Pow):
            rec(x.base)

    rec(e)
    return out


def jet_symbols(e: Expr, into_args: bool = True):
    return {s for s in free_symbols(e, into_args) if isinstance(s, JetSymbol)}
