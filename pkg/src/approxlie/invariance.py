"""On-shell reduction, the approximate invariance condition, determining
equations, and pass/fail verification of concrete generators.

The invariance residual of a generator is the prolonged action applied to
each equation, expanded in the small parameter, reduced on the solution
manifold, and truncated.  Reduction substitutes every leading derivative
(and its differential consequences) by lower-ranked jet coordinates.  The
base rules come from solving each expansion-order equation for its
declared leading derivative; cross-derivative compatibilities between
rules of one function are then completed into additional rules (for the
creeping system this produces the vorticity and biharmonic consequences),
and the build fails loudly if any compatibility refuses to close.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from . import expr as ex
from . import normal
from .lie import Generator, ProlongedGenerator, prolong
from .report import VerificationReport
from .series import EpsSeries, ExpansionScheme, expand_dependent
from .symbols import FunctionSymbol, JetSymbol, TABLE, VarSymbol


class NotAffine(ValueError):
    pass


class InconsistentChoice(ValueError):
    pass


MAX_COMPLETION_ROUNDS = 12
MAX_RULE_DEPTH = 12


@dataclass(frozen=True)
class PdeSystem:
    """Equation list with declared structure.

    ``leading`` names, per equation, the dependent and derivative index the
    equation is solved for on-shell; every equation must be affine in its
    leading derivative.  ``auxiliaries`` are known-function placeholders
    (arbitrary but fixed) that expansion leaves untouched.
    """

    independents: Tuple[VarSymbol, ...]
    dependents: Tuple[FunctionSymbol, ...]
    small: VarSymbol
    equations: Tuple[ex.Expr, ...]
    leading: Tuple[Tuple[FunctionSymbol, Tuple[int, ...]], ...]
    max_order: int = 3
    auxiliaries: Tuple[FunctionSymbol, ...] = ()
    name: str = "system"

    _schemes: dict = field(default_factory=dict, compare=False, hash=False)

    def scheme(self, p: int) -> ExpansionScheme:
        got = self._schemes.get(p)
        if got is None:
            got = ExpansionScheme(self.dependents, p)
            self._schemes[p] = got
        return got

    def at_zero(self) -> "PdeSystem":
        """The unperturbed system: small parameter set to zero."""
        eqs = tuple(ex.substitute(e, {self.small: ex.ZERO})
                    for e in self.equations)
        return PdeSystem(self.independents, self.dependents, self.small,
                         eqs, self.leading, self.max_order, self.auxiliaries,
                         name=f"{self.name}(0)")


def _symbol_rank(s: JetSymbol, scheme: ExpansionScheme):
    tagged = scheme.order_of(s.func)
    k = tagged[1] if tagged else -1
    return (k, s.func.reg_id, s.order, s.index)


class OnShellRules:
    """Triangular substitution rules defining the solution manifold.

    Base rules map a jet symbol to an expression in strictly lower-ranked
    symbols; any derivative of a ruled symbol reduces on demand by
    differentiating the rule, with results memoized.  Rule priority is
    insertion order.  The rule set is immutable once built; the memo only
    ever stores recomputable equal values, so sharing one instance across
    concurrent verifications is safe.
    """

    def __init__(self, system: PdeSystem, p: int):
        self.system = system
        self.p = p
        self.scheme = system.scheme(p)
        self.rules: Dict[JetSymbol, ex.Expr] = {}
        self._order: List[JetSymbol] = []
        self._memo: Dict[JetSymbol, ex.Expr] = {}

    # -- construction ------------------------------------------------------

    def add_rule(self, lhs: JetSymbol, rhs: ex.Expr):
        self.rules[lhs] = self.reduce_expr(rhs)
        self._order.append(lhs)
        self._memo = {}

    def _find_base(self, s: JetSymbol) -> Optional[JetSymbol]:
        for lhs in self._order:
            if lhs.func is s.func and all(
                    a >= b for a, b in zip(s.index, lhs.index)):
                return lhs
        return None

    # -- reduction ---------------------------------------------------------

    def reduce_symbol(self, s: JetSymbol, _depth: int = 0) -> Optional[ex.Expr]:
        """Fully reduced value of a ruled symbol, or None if s is free."""
        got = self._memo.get(s)
        if got is not None:
            return got
        base = self._find_base(s)
        if base is None:
            return None
        if _depth > MAX_RULE_DEPTH:
            raise InconsistentChoice(
                f"rule recursion exceeded {MAX_RULE_DEPTH} at {s.name}")
        val = self.rules[base]
        for v, extra in zip(s.func.args,
                            (a - b for a, b in zip(s.index, base.index))):
            for _ in range(extra):
                val = ex.diff(val, v)
        val = self.reduce_expr(val, _depth + 1)
        self._memo[s] = val
        return val

    def reduce_expr(self, e: ex.Expr, _depth: int = 0,
                    canonical: bool = True) -> ex.Expr:
        """Substitute ruled symbols until none remain; canonicalize unless
        the raw substituted tree is wanted (numeric guards evaluate it)."""
        while True:
            mapping = {}
            for s in ex.jet_symbols(e):
                r = self.reduce_symbol(s, _depth)
                if r is not None:
                    mapping[s] = r
            if not mapping:
                return normal.canonical(e) if canonical else e
            e = ex.substitute(e, mapping)

    def reduce_series(self, s: EpsSeries, canonical: bool = True) -> EpsSeries:
        return s.map(lambda c: self.reduce_expr(c, canonical=canonical))


def _solve_affine(e: ex.Expr, s: JetSymbol) -> ex.Expr:
    """Solve e == 0 for s, requiring e affine in s."""
    parts = normal.collect(e, {s})
    lin = None
    const = ex.ZERO
    for mono, coeff in parts.items():
        if mono is ex.ONE:
            const = coeff
        elif isinstance(mono, ex.Sym) and mono.sym is s:
            lin = coeff
        else:
            raise NotAffine(f"equation is not affine in {s.name}")
    if lin is None or normal.is_zero(lin):
        raise NotAffine(f"equation does not involve {s.name}")
    return normal.canonical(ex.mul(ex.MINUS_ONE, const, ex.pow_(lin, -1)))


def onshell_rules(system: PdeSystem, p: int, jet_depth: int = 4,
                  modulo: Sequence[ex.Expr] = ()) -> OnShellRules:
    """Build the reduction rules for the expanded system at order p.

    ``modulo`` expressions are extra constraints (e.g. on auxiliary
    functions), each solved for its own highest-ranked jet symbol.  After
    the base rules, cross-derivative compatibilities are completed into
    new rules; the final set is verified confluent and to annihilate every
    expanded equation.
    """
    del jet_depth  # consequences are generated on demand
    seen = set()
    for i, (dep, index) in enumerate(system.leading):
        if (dep.name, index) in seen:
            raise InconsistentChoice(
                f"leading derivative {dep.name}{index} declared twice")
        for dn, di in seen:
            if dn == dep.name and (all(a >= b for a, b in zip(index, di))
                                   or all(a <= b for a, b in zip(index, di))):
                raise InconsistentChoice(
                    f"leading derivatives {dep.name}{di} and {dep.name}{index}"
                    " are derivatives of one another")
        seen.add((dep.name, index))
    rules = OnShellRules(system, p)
    scheme = system.scheme(p)

    expanded: List[Tuple[int, int, ex.Expr]] = []
    for i, eq in enumerate(system.equations):
        s = expand_dependent(eq, system, p)
        for k in range(p + 1):
            expanded.append((i, k, s.coeffs[k]))

    for m in modulo:
        jets = sorted(ex.jet_symbols(m), key=lambda s: _symbol_rank(s, scheme))
        if not jets:
            raise NotAffine("modulo constraint contains no jet symbol")
        lead = jets[-1]
        rules.add_rule(lead, _solve_affine(m, lead))

    for k in range(p + 1):
        for i, _ in enumerate(system.equations):
            dep, index = system.leading[i]
            lhs = TABLE.jet(scheme.coeff_fn(dep, k), index)
            eq_k = next(c for (ei, ek, c) in expanded if ei == i and ek == k)
            rhs = _solve_affine(rules.reduce_expr(eq_k), lhs)
            rules.add_rule(lhs, rhs)

    _complete(rules)

    # completion may have added rules that earlier right-hand sides can use;
    # re-reduce so the stored set is fully triangular
    for lhs in list(rules.rules):
        rules.rules[lhs] = rules.reduce_expr(rules.rules[lhs])
    rules._memo = {}

    for i, k, c in expanded:
        if not normal.is_zero(rules.reduce_expr(c)):
            raise InconsistentChoice(
                f"equation {i} at order {k} does not vanish under its own rules")
    return rules


def _complete(rules: OnShellRules):
    """Close the rule set under cross-derivative compatibilities."""
    scheme = rules.scheme
    for _ in range(MAX_COMPLETION_ROUNDS):
        new_rule = None
        items = list(rules.rules.items())
        for a in range(len(items)):
            for b in range(a + 1, len(items)):
                (s1, r1), (s2, r2) = items[a], items[b]
                if s1.func is not s2.func:
                    continue
                target = tuple(max(x, y) for x, y in zip(s1.index, s2.index))
                d1 = _derive(r1, s1, target)
                d2 = _derive(r2, s2, target)
                gap = rules.reduce_expr(ex.sub(d1, d2))
                if normal.is_zero(gap):
                    continue
                jets = sorted(ex.jet_symbols(gap),
                              key=lambda s: _symbol_rank(s, scheme))
                if not jets:
                    raise InconsistentChoice(
                        f"incompatible rules for {s1.name}/{s2.name}: "
                        f"residual {gap!r}")
                lead = jets[-1]
                new_rule = (lead, _solve_affine(gap, lead))
                break
            if new_rule:
                break
        if new_rule is None:
            return
        rules.add_rule(*new_rule)
    raise InconsistentChoice(
        f"rule completion did not close in {MAX_COMPLETION_ROUNDS} rounds")


def _derive(rhs: ex.Expr, lhs: JetSymbol, target: Tuple[int, ...]) -> ex.Expr:
    out = rhs
    for v, extra in zip(lhs.func.args,
                        (t - i for t, i in zip(target, lhs.index))):
        for _ in range(extra):
            out = ex.diff(out, v)
    return out


# ---------------------------------------------------------------------------
# invariance residual and determining equations


def invariance_residual(system: PdeSystem, g: Generator, p: int,
                        rules: Optional[OnShellRules] = None,
                        prolonged: Optional[ProlongedGenerator] = None,
                        modulo: Sequence[ex.Expr] = (),
                        canonical: bool = True) -> List[EpsSeries]:
    """Prolonged action on each equation, on-shell reduced, truncated at p."""
    if g.order != p:
        raise ValueError(f"generator order {g.order} != requested order {p}")
    if rules is None:
        rules = onshell_rules(system, p, modulo=modulo)
    if prolonged is None:
        prolonged = prolong(g, system.max_order)
    out = []
    for eq in system.equations:
        res = EpsSeries.zero(p)
        for v in system.independents:
            dv = ex.diff(eq, v, promote_jets=False)
            if dv is ex.ZERO:
                continue
            res = res.add(g.xi_series(v).mul(expand_dependent(dv, system, p)))
        for s in sorted(ex.jet_symbols(eq), key=lambda t: t.key):
            if s.func.name not in {d.name for d in system.dependents}:
                continue
            w = ex.diff_wrt(eq, s)
            dep = next(d for d in system.dependents if d.name == s.func.name)
            coeff = prolonged.coeff(dep, s.index)
            res = res.add(coeff.mul(expand_dependent(w, system, p)))
        out.append(rules.reduce_series(res, canonical=canonical))
    return out


@dataclass
class DeterminingSet:
    """Surviving determining equations per equation index and order."""

    entries: List[Tuple[int, int, ex.Expr, ex.Expr]] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.entries

    def to_text(self) -> str:
        if self.empty:
            return "determining set: empty (generator verified)\n"
        lines = ["determining set:"]
        for eq, k, mono, coeff in self.entries:
            lines.append(f"  eq {eq + 1}, order {k}, monomial {mono!r}: {coeff!r}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> list:
        return [{"equation": eq + 1, "order": k, "monomial": repr(mono),
                 "coefficient": repr(coeff)}
                for eq, k, mono, coeff in self.entries]


def determining_equations(residuals: List[EpsSeries],
                          system: PdeSystem) -> DeterminingSet:
    """Collect each order's residual in the free jet monomials."""
    out = DeterminingSet()
    for i, series in enumerate(residuals):
        scheme = system.scheme(series.order)
        for k, coeff in enumerate(series.coeffs):
            inds = {s for s in ex.jet_symbols(coeff)
                    if scheme.is_coeff_fn(s.func)}
            parts = normal.collect(coeff, inds)
            for mono, c in parts.items():
                if not normal.is_zero(c):
                    out.entries.append((i, k, mono, normal.canonical(c)))
    return out


def verify_generator(system: PdeSystem, g: Generator,
                     modulo: Optional[Sequence[ex.Expr]] = None,
                     rules: Optional[OnShellRules] = None,
                     numeric_guard: bool = True) -> VerificationReport:
    """PASS iff the determining set of g on the system is empty."""
    modulo = tuple(modulo or ())
    if rules is None:
        rules = onshell_rules(system, g.order, modulo=modulo)
    raw = invariance_residual(system, g, g.order, rules=rules, canonical=False)
    res = [s.map(normal.canonical) for s in raw]
    det = determining_equations(res, system)
    name = g.name or "generator"
    if det.empty:
        numeric_max = _numeric_spot_check(raw) if numeric_guard else None
        status = "PASS" if numeric_max is None or numeric_max < 1e-9 else "FAIL"
        return VerificationReport(
            subject=name, status=status, symbolic_residuals=[],
            numeric_max=numeric_max,
            details="empty determining set" if status == "PASS" else
            "symbolic zero but numeric spot check failed")
    residuals = [(f"eq{eq + 1}/order{k}/{mono!r}", repr(coeff))
                 for eq, k, mono, coeff in det.entries]
    return VerificationReport(
        subject=name, status="FAIL", symbolic_residuals=residuals,
        details=f"{len(det.entries)} surviving determining coefficients")


def _numeric_spot_check(residuals: List[EpsSeries], n: int = 8) -> float:
    """Evaluate symbolically-zero residuals at random points as a guard."""
    from .numeric import spot_eval_zero
    worst = 0.0
    for series in residuals:
        for coeff in series.coeffs:
            worst = max(worst, spot_eval_zero(coeff, n))
    return worst


# ---------------------------------------------------------------------------
# invariant-surface conditions


def surface_conditions(g: Generator, system: PdeSystem,
                       p: Optional[int] = None):
    """The m*(p+1) separated invariant-surface equations of g.

    Returns (dependent name, order, expression) triples; an expression
    without jet symbols that is not zero flags a generator with no
    strictly invariant profile for that dependent.
    """
    if p is None:
        p = g.order
    scheme = system.scheme(p)
    out = []
    for dep in system.dependents:
        total = EpsSeries.zero(p)
        for v in system.independents:
            e_v = tuple(1 if a is v else 0 for a in dep.args)
            total = total.add(
                g.xi_series(v).mul(scheme.jet_series(dep, e_v, p)))
        total = total.sub(g.eta_series(dep))
        for k, c in enumerate(total.coeffs):
            out.append((dep.name, k, normal.canonical(c)))
    return out
