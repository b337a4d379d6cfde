"""Sparse multivariate polynomials over interned symbols.

Coefficients are exact rationals; monomials are sorted tuples of
``(symbol, exponent)`` pairs with positive exponents.  The monomial order
is graded lexicographic over the global symbol order (lower symbol key =
more important variable).  Construction applies one rewrite: even powers
of a ``sin`` atom reduce through ``sin^2 = 1 - cos^2`` against the paired
``cos`` atom, which keeps sine degree at most one per monomial and makes
the Pythagorean identity decidable by coefficient comparison.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Dict, Iterator, Optional, Tuple

from .symbols import Symbol, TransSymbol, TABLE

Monomial = Tuple[Tuple[Symbol, int], ...]

EMPTY: Monomial = ()


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        sa, ea = a[i]
        sb, eb = b[j]
        if sa is sb:
            out.append((sa, ea + eb))
            i += 1
            j += 1
        elif sa.key < sb.key:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_div(a: Monomial, b: Monomial) -> Optional[Monomial]:
    """a / b, or None when b does not divide a."""
    out = []
    i = 0
    for sb, eb in b:
        while i < len(a) and a[i][0].key < sb.key:
            out.append(a[i])
            i += 1
        if i >= len(a) or a[i][0] is not sb or a[i][1] < eb:
            return None
        if a[i][1] > eb:
            out.append((sb, a[i][1] - eb))
        i += 1
    out.extend(a[i:])
    return tuple(out)


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def grlex_key(m: Monomial):
    """Sort key; ascending sort yields monomials from largest to smallest."""
    return (-mono_degree(m), tuple((s.key, -e) for s, e in m))


class Poly:
    """Immutable sparse polynomial: dict monomial -> nonzero Fraction."""

    __slots__ = ("terms", "_key", "_hash")

    def __init__(self, terms: Dict[Monomial, Fraction]):
        self.terms = terms
        self._key = None
        self._hash = None

    @staticmethod
    def from_dict(d: Dict[Monomial, Fraction]) -> "Poly":
        return Poly(_reduce_trig({m: c for m, c in d.items() if c != 0}))

    @staticmethod
    def const(c) -> "Poly":
        c = Fraction(c)
        return Poly({EMPTY: c} if c != 0 else {})

    @staticmethod
    def symbol(s: Symbol, e: int = 1) -> "Poly":
        return Poly.from_dict({((s, e),): Fraction(1)})

    # -- identity ------------------------------------------------------

    def canonical_key(self):
        if self._key is None:
            self._key = tuple(sorted(
                ((tuple((s.key, e) for s, e in m), c.numerator, c.denominator)
                 for m, c in self.terms.items())))
        return self._key

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.canonical_key())
        return self._hash

    def __eq__(self, other):
        return isinstance(other, Poly) and self.terms == other.terms

    def __repr__(self):
        from .normal import NormalForm
        return f"Poly({NormalForm(self, ()).to_expr()!r})"

    # -- queries ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and EMPTY in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get(EMPTY, Fraction(0))

    def symbols(self):
        out = set()
        for m in self.terms:
            for s, _ in m:
                out.add(s)
        return out

    def leading(self) -> Tuple[Monomial, Fraction]:
        m = min(self.terms, key=grlex_key)
        return m, self.terms[m]

    def sorted_terms(self) -> Iterator[Tuple[Monomial, Fraction]]:
        for m in sorted(self.terms, key=grlex_key):
            yield m, self.terms[m]

    # -- arithmetic -----------------------------------------------------

    def add(self, other: "Poly") -> "Poly":
        if not self.terms:
            return other
        if not other.terms:
            return self
        d = dict(self.terms)
        for m, c in other.terms.items():
            v = d.get(m)
            if v is None:
                d[m] = c
            else:
                v = v + c
                if v == 0:
                    del d[m]
                else:
                    d[m] = v
        return Poly(d)

    def neg(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def sub(self, other: "Poly") -> "Poly":
        return self.add(other.neg())

    def mul(self, other: "Poly") -> "Poly":
        if not self.terms or not other.terms:
            return Poly({})
        if other.is_const():
            return self.scale(other.const_value())
        if self.is_const():
            return other.scale(self.const_value())
        d: Dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                v = d.get(m)
                d[m] = c1 * c2 if v is None else v + c1 * c2
        return Poly.from_dict(d)

    def scale(self, c: Fraction) -> "Poly":
        if c == 0:
            return Poly({})
        if c == 1:
            return self
        return Poly({m: v * c for m, v in self.terms.items()})

    def pow(self, n: int) -> "Poly":
        if n < 0:
            raise ValueError("negative power on a bare polynomial")
        out = Poly.const(1)
        base = self
        while n:
            if n & 1:
                out = out.mul(base)
            base = base.mul(base) if n > 1 else base
            n >>= 1
        return out

    def deriv(self, s: Symbol) -> "Poly":
        d: Dict[Monomial, Fraction] = {}
        for m, c in self.terms.items():
            for i, (g, e) in enumerate(m):
                if g is s:
                    if e == 1:
                        nm = m[:i] + m[i + 1:]
                    else:
                        nm = m[:i] + ((g, e - 1),) + m[i + 1:]
                    v = d.get(nm)
                    d[nm] = c * e if v is None else v + c * e
                    break
        return Poly.from_dict(d)

    # -- normalization helpers -------------------------------------------

    def content(self) -> Fraction:
        """Positive rational content (gcd of coefficients); 0 for zero."""
        if not self.terms:
            return Fraction(0)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, abs(c.numerator))
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def signed_content(self) -> Fraction:
        """Content carrying the sign of the leading coefficient."""
        c = self.content()
        if c == 0:
            return c
        _, lead = self.leading()
        return c if lead > 0 else -c

    def monic(self) -> Tuple[Fraction, "Poly"]:
        """(leading coefficient, self / leading coefficient)."""
        if not self.terms:
            return Fraction(1), self
        _, lc = self.leading()
        return lc, self.scale(1 / lc)

    def primitive(self) -> Tuple[Fraction, "Poly"]:
        """(signed content, primitive part with positive leading coeff)."""
        c = self.signed_content()
        if c == 0:
            return Fraction(0), self
        return c, self.scale(1 / c)

    def split_monomial(self):
        """Factor as ``c * prod(sym^e) * rest``.

        ``c`` is the signed content, the monomial part is the gcd of all
        monomials, ``rest`` is the remaining primitive polynomial (``None``
        when it is 1).  Used by the logarithm rewrite.
        """
        if not self.terms:
            return Fraction(0), (), None
        common: Optional[Dict[Symbol, int]] = None
        for m in self.terms:
            d = dict(m)
            if common is None:
                common = d
            else:
                common = {s: min(e, d[s]) for s, e in common.items() if s in d}
            if not common:
                common = {}
                break
        mono = tuple(sorted(common.items(), key=lambda p: p[0].key))
        c, prim = self.primitive()
        if mono:
            stripped = {}
            for m, v in prim.terms.items():
                stripped[mono_div(m, mono)] = v
            prim = Poly(stripped)
        rest = None if prim.is_const() else prim
        return c, mono, rest

    def exact_div(self, other: "Poly") -> Optional["Poly"]:
        """self / other when the division is exact, else None."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        if other.is_const():
            return self.scale(1 / other.const_value())
        rem = dict(self.terms)
        out: Dict[Monomial, Fraction] = {}
        lm, lc = other.leading()
        # division terminates (leading monomial strictly decreases in a
        # well-order); the guard only cuts off pathological blowups, and a
        # cutoff merely skips a cancellation, never changes a value
        guard = 200000
        while rem:
            guard -= 1
            if guard < 0:
                return None
            m = min(rem, key=grlex_key)
            q = mono_div(m, lm)
            if q is None:
                return None
            qc = rem[m] / lc
            out[q] = out.get(q, Fraction(0)) + qc
            for m2, c2 in other.terms.items():
                t = mono_mul(q, m2)
                v = rem.get(t, Fraction(0)) - qc * c2
                if v == 0:
                    rem.pop(t, None)
                else:
                    rem[t] = v
        return Poly.from_dict(out)


def _reduce_trig(d: Dict[Monomial, Fraction]) -> Dict[Monomial, Fraction]:
    """Rewrite sin(t)^(2k+r) -> (1 - cos(t)^2)^k sin(t)^r in every monomial."""
    if not any(isinstance(s, TransSymbol) and s.fn == "sin" and e >= 2
               for m in d for s, e in m):
        return d
    out: Dict[Monomial, Fraction] = {}
    work = list(d.items())
    while work:
        m, c = work.pop()
        hit = None
        for i, (s, e) in enumerate(m):
            if isinstance(s, TransSymbol) and s.fn == "sin" and e >= 2:
                hit = (i, s, e)
                break
        if hit is None:
            v = out.get(m)
            if v is None:
                out[m] = c
            else:
                v = v + c
                if v == 0:
                    del out[m]
                else:
                    out[m] = v
            continue
        i, s, e = hit
        k, r = divmod(e, 2)
        cos = TABLE.paired_trig(s)
        base = m[:i] + (((s, r),) if r else ()) + m[i + 1:]
        # (1 - cos^2)^k expanded by binomials
        for j in range(k + 1):
            binom = _binomial(k, j) * (-1) ** j
            nm = mono_mul(base, ((cos, 2 * j),)) if j else base
            work.append((nm, c * binom))
    return out


def _binomial(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out
