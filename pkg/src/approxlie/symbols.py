"""Symbol registry: the indeterminates every other layer builds on.

Four kinds of symbols can appear as leaves of an expression tree:

* independent variables and parameters (plain named atoms),
* jet symbols ``u0_xyy`` -- a function symbol together with a derivative
  multi-index over that function's declared arguments,
* transcendental atoms ``log(...)``, ``exp(...)``, ``sin(...)``,
  ``cos(...)``, ``arctan(...)`` with a canonicalized argument expression,
* coefficient-family symbols used by the series recursion operator.

Symbols are interned: structural identity implies object identity.  Every
symbol carries a precomputed sort ``key`` inducing a deterministic total
order.  Plain atoms are ordered by registration order; jet symbols by
(function, multi-index); transcendental atoms structurally by their
argument.  The polynomial layer's monomial order is graded lexicographic
over these keys, so canonical output is reproducible run to run as long as
the base vocabulary is registered in a fixed order (the model module does
this at import time).
"""

from __future__ import annotations

from typing import Optional, Tuple

TRANS_FUNCTIONS = ("log", "exp", "sin", "cos", "arctan")


class SymbolError(ValueError):
    pass


class Symbol:
    """Base class for expression leaves usable as polynomial generators."""

    __slots__ = ("name", "key", "_hash")

    def __repr__(self):
        return self.name

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        return self is other

    def __lt__(self, other):
        return self.key < other.key


class VarSymbol(Symbol):
    """Independent variable or parameter."""

    __slots__ = ("is_independent",)

    def __init__(self, name: str, reg_id: int, is_independent: bool):
        self.name = name
        self.is_independent = is_independent
        self.key = (0, reg_id)
        self._hash = hash(("var", name))


class FunctionSymbol:
    """A named unknown function of declared independent variables.

    Not itself an expression leaf; it appears in expressions through its
    jet symbols (the zero multi-index being the bare function value).
    """

    __slots__ = ("name", "args", "reg_id")

    def __init__(self, name: str, args: Tuple[VarSymbol, ...], reg_id: int):
        self.name = name
        self.args = args
        self.reg_id = reg_id

    def __repr__(self):
        return f"{self.name}({', '.join(a.name for a in self.args)})"


class JetSymbol(Symbol):
    """Derivative coordinate of a function symbol.

    ``index`` counts derivatives per declared argument; all-zero index is
    the undifferentiated function value.  Mixed derivatives commute by
    construction since the index is just a multiset.
    """

    __slots__ = ("func", "index")

    def __init__(self, func: FunctionSymbol, index: Tuple[int, ...]):
        self.func = func
        self.index = index
        suffix = "".join(a.name * k for a, k in zip(func.args, index))
        self.name = func.name + ("_" + suffix if suffix else "")
        self.key = (1, func.reg_id, sum(index), index)
        self._hash = hash(("jet", func.name, index))

    @property
    def order(self) -> int:
        return sum(self.index)


class TransSymbol(Symbol):
    """Registered transcendental atom with a canonical argument."""

    __slots__ = ("fn", "arg")

    def __init__(self, fn: str, arg, arg_key):
        self.fn = fn
        self.arg = arg
        self.name = None  # rendered lazily by the printer
        self.key = (2, TRANS_FUNCTIONS.index(fn), arg_key)
        self._hash = hash(("trans", fn, arg_key))


class FamilySymbol(Symbol):
    """Order-tagged coefficient function f_(k) with formal u-derivatives.

    ``udiff`` is a multi-index over ``coords``, the zero-order expansion
    symbols the family may be differentiated against.
    """

    __slots__ = ("base", "order", "udiff", "coords")

    def __init__(self, base: str, order: int, udiff: Tuple[int, ...],
                 coords: Tuple[Symbol, ...]):
        self.base = base
        self.order = order
        self.udiff = udiff
        self.coords = coords
        suffix = "".join(f"[{c.name}]" * k for c, k in zip(coords, udiff))
        self.name = f"{base}({order})" + suffix
        self._hash = hash(("family", base, order, udiff))
        self.key = (3, base, order, udiff)


class SymbolTable:
    """Process-wide interning table with deterministic registration ids."""

    def __init__(self):
        self._vars = {}
        self._funcs = {}
        self._jets = {}
        self._trans = {}
        self._families = {}
        self._counter = 0

    def _next_id(self) -> int:
        self._counter += 1
        return self._counter

    # -- plain atoms -------------------------------------------------

    def independent(self, name: str) -> VarSymbol:
        return self._var(name, True)

    def parameter(self, name: str) -> VarSymbol:
        return self._var(name, False)

    def _var(self, name: str, is_independent: bool) -> VarSymbol:
        got = self._vars.get(name)
        if got is not None:
            if got.is_independent != is_independent:
                raise SymbolError(
                    f"symbol {name!r} already registered with a different kind")
            return got
        if name in self._funcs:
            raise SymbolError(f"name {name!r} already used by a function symbol")
        v = VarSymbol(name, self._next_id(), is_independent)
        self._vars[name] = v
        return v

    # -- function / jet symbols --------------------------------------

    def function(self, name: str, args) -> FunctionSymbol:
        got = self._funcs.get(name)
        if got is not None:
            if tuple(a.name for a in got.args) != tuple(a.name for a in args):
                raise SymbolError(
                    f"function {name!r} already registered with other arguments")
            return got
        if name in self._vars:
            raise SymbolError(f"name {name!r} already used by a variable")
        f = FunctionSymbol(name, tuple(args), self._next_id())
        self._funcs[name] = f
        return f

    def jet(self, func: FunctionSymbol, index) -> JetSymbol:
        index = tuple(index)
        if len(index) != len(func.args) or any(k < 0 for k in index):
            raise SymbolError(f"bad derivative index {index} for {func!r}")
        key = (func.name, index)
        got = self._jets.get(key)
        if got is None:
            got = JetSymbol(func, index)
            self._jets[key] = got
        return got

    # -- transcendental atoms ----------------------------------------

    def transcendental(self, fn: str, arg, arg_key) -> TransSymbol:
        if fn not in TRANS_FUNCTIONS:
            raise SymbolError(f"unknown transcendental function {fn!r}")
        key = (fn, arg_key)
        got = self._trans.get(key)
        if got is None:
            got = TransSymbol(fn, arg, arg_key)
            self._trans[key] = got
        return got

    def paired_trig(self, sym: TransSymbol) -> TransSymbol:
        """cos atom matching a sin atom (and vice versa), same argument."""
        other = {"sin": "cos", "cos": "sin"}[sym.fn]
        return self.transcendental(other, sym.arg, sym.key[2])

    # -- coefficient families ----------------------------------------

    def family(self, base: str, order: int, udiff, coords) -> FamilySymbol:
        udiff = tuple(udiff)
        coords = tuple(coords)
        key = (base, order, udiff)
        got = self._families.get(key)
        if got is None:
            got = FamilySymbol(base, order, udiff, coords)
            self._families[key] = got
        return got

    # -- lookups ------------------------------------------------------

    def find_var(self, name: str) -> Optional[VarSymbol]:
        return self._vars.get(name)

    def find_function(self, name: str) -> Optional[FunctionSymbol]:
        return self._funcs.get(name)


TABLE = SymbolTable()

independent = TABLE.independent
parameter = TABLE.parameter
function = TABLE.function
jet = TABLE.jet
