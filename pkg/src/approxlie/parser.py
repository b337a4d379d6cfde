"""Text grammar for expressions: parse and deterministic printing.

Grammar (ASCII)::

    expr   := term (('+'|'-') term)*
    term   := unary (('*'|'/') unary)*
    unary  := ('-'|'+') unary | power
    power  := atom ('^' exponent)*        exponent: [-]INT or ([-]INT)
    atom   := INT | NAME | NAME '(' expr ')' | '(' expr ')'

Names resolve against the symbol registry: registered variables and
parameters match whole; a bare function name is its zero-index jet; a
name with an underscore such as ``u0_xyy`` is a derivative suffix over
the function's declared arguments.  ``log``, ``exp``, ``sin``, ``cos``
and ``arctan`` take one parenthesized argument; any other applied name
is an error.  Printing follows canonical construction order, so output
is reproducible and round-trips structurally.
"""

from __future__ import annotations

from . import expr as ex
from .symbols import TABLE, TRANS_FUNCTIONS, TransSymbol


class ExprSyntaxError(ValueError):
    """Malformed input; ``position`` is the 1-based offset of the fault."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (offset {position})")
        self.position = position


class UnknownFunction(ValueError):
    pass


class UnknownSymbol(ValueError):
    pass


_OPS = set("+-*/^()")


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in _OPS:
            toks.append((c, c, i + 1))
            i += 1
            continue
        if c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            toks.append(("int", text[i:j], i + 1))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            toks.append(("name", text[i:j], i + 1))
            i = j
            continue
        raise ExprSyntaxError(f"unexpected character {c!r}", i + 1)
    toks.append(("end", "", n + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def next(self):
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def expect(self, kind: str):
        t = self.next()
        if t[0] != kind:
            raise ExprSyntaxError(f"expected {kind!r}, found {t[1]!r}", t[2])
        return t

    def parse(self) -> "ex.Expr":
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ExprSyntaxError(f"unexpected {t[1]!r}", t[2])
        return e

    def expr(self):
        e = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.next()[0]
            rhs = self.term()
            e = ex.add(e, rhs) if op == "+" else ex.sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek()[0] in ("*", "/"):
            op = self.next()[0]
            rhs = self.unary()
            e = ex.mul(e, rhs) if op == "*" else ex.div(e, rhs)
        return e

    def unary(self):
        t = self.peek()
        if t[0] in ("+", "-"):
            self.next()
            e = self.unary()
            return e if t[0] == "+" else ex.mul(ex.MINUS_ONE, e)
        return self.power()

    def power(self):
        e = self.atom()
        while self.peek()[0] == "^":
            self.next()
            e = ex.pow_(e, self.exponent())
        return e

    def exponent(self) -> int:
        t = self.peek()
        if t[0] == "(":
            self.next()
            n = self.exponent()
            self.expect(")")
            return n
        sign = 1
        if t[0] in ("+", "-"):
            self.next()
            sign = -1 if t[0] == "-" else 1
            t = self.peek()
        if t[0] != "int":
            raise ExprSyntaxError("exponent must be an integer", t[2])
        self.next()
        return sign * int(t[1])

    def atom(self):
        t = self.next()
        if t[0] == "int":
            return ex.rat(int(t[1]))
        if t[0] == "(":
            e = self.expr()
            self.expect(")")
            return e
        if t[0] == "name":
            name = t[1]
            if self.peek()[0] == "(":
                if name not in TRANS_FUNCTIONS:
                    raise UnknownFunction(
                        f"{name!r} is not a registered transcendental function")
                self.next()
                arg = self.expr()
                self.expect(")")
                return ex.trans(name, arg)
            return self.resolve(name, t[2])
        raise ExprSyntaxError(f"unexpected {t[1]!r}", t[2])

    def resolve(self, name: str, pos: int) -> "ex.Expr":
        v = TABLE.find_var(name)
        if v is not None:
            return ex.sym(v)
        f = TABLE.find_function(name)
        if f is not None:
            return ex.sym(TABLE.jet(f, (0,) * len(f.args)))
        if "_" in name:
            base, _, suffix = name.partition("_")
            f = TABLE.find_function(base)
            if f is not None and suffix:
                idx = [0] * len(f.args)
                rest = suffix
                args = sorted(f.args, key=lambda a: -len(a.name))
                while rest:
                    for a in args:
                        if rest.startswith(a.name):
                            idx[f.args.index(a)] += 1
                            rest = rest[len(a.name):]
                            break
                    else:
                        raise UnknownSymbol(
                            f"bad derivative suffix {suffix!r} on {base!r}")
                return ex.sym(TABLE.jet(f, idx))
        raise UnknownSymbol(f"unknown symbol {name!r} (offset {pos})")


def parse(text: str) -> "ex.Expr":
    """Parse the documented grammar into a canonical expression."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printing

_PREC_SUM, _PREC_PROD, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4


def render(e: "ex.Expr") -> str:
    return _render(e, _PREC_SUM)


def _render(e, prec: int) -> str:
    if isinstance(e, ex.Rat):
        s = str(e.value)
        need = prec >= _PREC_POW or (e.value < 0 and prec >= _PREC_PROD)
        return f"({s})" if need else s
    if isinstance(e, ex.Sym):
        s = e.sym
        if isinstance(s, TransSymbol):
            return f"{s.fn}({_render(s.arg, _PREC_SUM)})"
        return s.name
    if isinstance(e, ex.Pow):
        b = _render(e.base, _PREC_ATOM)
        r = f"{b}^{e.exponent}" if e.exponent >= 0 else f"{b}^({e.exponent})"
        return r
    if isinstance(e, ex.Prod):
        parts = []
        if e.coeff == -1:
            sign = "-"
        elif e.coeff == 1:
            sign = ""
        else:
            sign = ""
            parts.append(_render(ex.rat(e.coeff), _PREC_PROD))
        parts.extend(_render(f, _PREC_PROD) for f in e.factors)
        s = sign + "*".join(parts)
        return f"({s})" if prec >= _PREC_POW or (sign and prec >= _PREC_PROD) \
            else s
    if isinstance(e, ex.Sum):
        first, rest = e.terms[0], e.terms[1:]
        out = [_render(first, _PREC_SUM + 0)]
        for t in rest:
            neg = _negated(t)
            if neg is not None:
                out.append(" - " + _render(neg, _PREC_PROD))
            else:
                out.append(" + " + _render(t, _PREC_PROD))
        s = "".join(out)
        return f"({s})" if prec > _PREC_SUM else s
    raise TypeError(f"cannot render {e!r}")


def _negated(t):
    """The positive counterpart when t has a negative leading sign."""
    if isinstance(t, ex.Rat) and t.value < 0:
        return ex.rat(-t.value)
    if isinstance(t, ex.Prod) and t.coeff < 0:
        return ex.mul(ex.rat(-t.coeff), *t.factors)
    return None
