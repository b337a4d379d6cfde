"""Approximate Lie point generators, total derivatives on the expanded jet
space, prolongation to derivative coordinates, and the commutator.

A :class:`Generator` stores per-order infinitesimal slots in expanded
form: ``xi[v][k]`` and ``eta[dep][k]`` are expressions in the base
coordinates and the expansion symbols up to order k.  Prolongation runs on
series (expand-then-prolong): every coefficient of the extended generator
is a truncated series, and the recursion

    eta_{a, tau+e_v} = D_v eta_{a,tau} - sum_j (D_v xi_j) u_{a, tau+e_j}

is evaluated with series products truncated at the ambient order.  The
total derivative D_v is the coefficient-wise jet-promoting derivative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from . import expr as ex
from . import normal
from .series import EpsSeries, ExpansionScheme
from .symbols import FunctionSymbol, TABLE, VarSymbol


class JetDepthExceeded(ValueError):
    pass


class UnsupportedOrder(ValueError):
    pass


class OrderMismatch(ValueError):
    pass


def total_derivative(e: ex.Expr, v: VarSymbol, jet_depth: int = 4,
                     is_coordinate=None) -> ex.Expr:
    """Jet-promoting derivative D/Dx_v, truncated at ``jet_depth``.

    The operator only carries jet coordinates up to ``jet_depth``; an input
    containing a coordinate at that depth would need the next one, which
    the truncated operator lacks.  ``is_coordinate`` restricts the check to
    jets of selected functions (auxiliary known functions differentiate
    freely); by default every jet counts.
    """
    for s in ex.jet_symbols(e):
        if s.order >= jet_depth and (is_coordinate is None or is_coordinate(s)):
            raise JetDepthExceeded(
                f"{s.name} at depth {s.order} needs a coordinate beyond "
                f"jet depth {jet_depth}")
    return ex.diff(e, v)


@dataclass(frozen=True)
class Generator:
    """Per-order infinitesimals of an approximate point generator."""

    scheme: ExpansionScheme
    order: int
    xi: Dict[VarSymbol, Tuple[ex.Expr, ...]]
    eta: Dict[FunctionSymbol, Tuple[ex.Expr, ...]]
    name: str = ""

    @staticmethod
    def build(scheme: ExpansionScheme, independents, order: int,
              xi: Optional[dict] = None, eta: Optional[dict] = None,
              name: str = "") -> "Generator":
        """Normalize slot dictionaries: missing slots are zero.

        Order-k slots may depend on expansion symbols of order at most k;
        anything deeper is rejected (it could never arise from expanding a
        point generator).
        """
        p = order

        def check(slots):
            for k, slot in enumerate(slots):
                for s in ex.jet_symbols(slot):
                    tagged = scheme.order_of(s.func)
                    if tagged is not None and tagged[1] > k:
                        raise ValueError(
                            f"order-{k} slot depends on {s.name} "
                            f"(expansion order {tagged[1]})")
            return slots

        nxi = {}
        for v in independents:
            slots = (xi or {}).get(v, ())
            slots = tuple(ex.as_expr(s) for s in slots)
            nxi[v] = check(slots + (ex.ZERO,) * (p + 1 - len(slots)))
        neta = {}
        for dep in scheme.dependents:
            slots = (eta or {}).get(dep, ())
            slots = tuple(ex.as_expr(s) for s in slots)
            neta[dep] = check(slots + (ex.ZERO,) * (p + 1 - len(slots)))
        return Generator(scheme, p, nxi, neta, name)

    # -- series views ---------------------------------------------------

    def xi_series(self, v: VarSymbol) -> EpsSeries:
        return EpsSeries(self.order, self.xi[v])

    def eta_series(self, dep: FunctionSymbol) -> EpsSeries:
        return EpsSeries(self.order, self.eta[dep])

    @property
    def independents(self):
        return tuple(self.xi.keys())

    # -- algebra ----------------------------------------------------------

    def scale(self, c) -> "Generator":
        c = ex.as_expr(c)
        return Generator(
            self.scheme, self.order,
            {v: tuple(ex.mul(c, s) for s in slots)
             for v, slots in self.xi.items()},
            {d: tuple(ex.mul(c, s) for s in slots)
             for d, slots in self.eta.items()},
            name=f"({self.name})*" if self.name else "")

    def add(self, other: "Generator") -> "Generator":
        self._check(other)
        return Generator(
            self.scheme, self.order,
            {v: tuple(ex.add(a, b) for a, b in zip(self.xi[v], other.xi[v]))
             for v in self.xi},
            {d: tuple(ex.add(a, b) for a, b in zip(self.eta[d], other.eta[d]))
             for d in self.eta},
            name="")

    def shift_eps(self) -> "Generator":
        """Multiply by the small parameter, truncating at the ambient order."""
        return Generator(
            self.scheme, self.order,
            {v: (ex.ZERO,) + slots[:-1] for v, slots in self.xi.items()},
            {d: (ex.ZERO,) + slots[:-1] for d, slots in self.eta.items()},
            name=f"eps*{self.name}" if self.name else "")

    def order_zero_part(self) -> "Generator":
        """The unexpanded-system generator: order-0 slots at p = 0."""
        scheme0 = ExpansionScheme(self.scheme.dependents, 0)
        return Generator(
            scheme0, 0,
            {v: (slots[0],) for v, slots in self.xi.items()},
            {d: (slots[0],) for d, slots in self.eta.items()},
            name=f"{self.name}|0" if self.name else "")

    def is_zero(self) -> bool:
        return all(normal.is_zero(s) for slots in self.xi.values()
                   for s in slots) and \
            all(normal.is_zero(s) for slots in self.eta.values()
                for s in slots)

    def canonical(self) -> "Generator":
        return Generator(
            self.scheme, self.order,
            {v: tuple(normal.canonical(s) for s in slots)
             for v, slots in self.xi.items()},
            {d: tuple(normal.canonical(s) for s in slots)
             for d, slots in self.eta.items()},
            self.name)

    def same_as(self, other: "Generator") -> bool:
        self._check(other)
        return all(normal.is_zero(ex.sub(a, b))
                   for v in self.xi for a, b in zip(self.xi[v], other.xi[v])) \
            and all(normal.is_zero(ex.sub(a, b))
                    for d in self.eta for a, b in zip(self.eta[d], other.eta[d]))

    def _check(self, other: "Generator"):
        if self.order != other.order:
            raise OrderMismatch(
                f"generator orders differ: {self.order} vs {other.order}")


@dataclass(frozen=True)
class ProlongedGenerator:
    """Generator plus series coefficients for jet directions up to order r."""

    base: Generator
    max_jet: int
    eta_deriv: Dict[Tuple[str, Tuple[int, ...]], EpsSeries]

    def coeff(self, dep: FunctionSymbol, index: Tuple[int, ...]) -> EpsSeries:
        if sum(index) == 0:
            return self.base.eta_series(dep)
        return self.eta_deriv[(dep.name, tuple(index))]


MAX_PROLONGATION = 3


def prolong(g: Generator, r: int, jet_depth: int = 4) -> ProlongedGenerator:
    """Prolongation of g to jet coordinates of order <= r."""
    if r > MAX_PROLONGATION:
        raise UnsupportedOrder(
            f"prolongation order {r} exceeds supported maximum "
            f"{MAX_PROLONGATION}")
    p = g.order
    inds = g.independents
    coeffs: Dict[Tuple[str, Tuple[int, ...]], EpsSeries] = {}

    coord = lambda s: g.scheme.is_coeff_fn(s.func)  # noqa: E731

    def series_td(s: EpsSeries, v: VarSymbol) -> EpsSeries:
        return EpsSeries(p, tuple(
            total_derivative(c, v, jet_depth, is_coordinate=coord)
            for c in s.coeffs))

    dxi: Dict[Tuple[VarSymbol, VarSymbol], EpsSeries] = {}

    def get(dep: FunctionSymbol, index: Tuple[int, ...]) -> EpsSeries:
        if sum(index) == 0:
            return g.eta_series(dep)
        key = (dep.name, index)
        got = coeffs.get(key)
        if got is not None:
            return got
        # peel the highest-position derivative: deterministic recursion path
        pos = max(i for i, k in enumerate(index) if k > 0)
        v = dep.args[pos]
        prev = list(index)
        prev[pos] -= 1
        prev = tuple(prev)
        out = series_td(get(dep, prev), v)
        for j, vj in enumerate(inds):
            dk = dxi.get((vj, v))
            if dk is None:
                dk = series_td(g.xi_series(vj), v)
                dxi[(vj, v)] = dk
            bump = list(prev)
            bump[dep.args.index(vj)] += 1
            ujet = g.scheme.jet_series(dep, tuple(bump), p)
            out = out.sub(dk.mul(ujet))
        out = out.map(normal.canonical)
        coeffs[key] = out
        return out

    for dep in g.scheme.dependents:
        for index in _indices_up_to(len(dep.args), r):
            get(dep, index)
    return ProlongedGenerator(g, r, coeffs)


def _indices_up_to(n: int, r: int):
    def gen(total, slots):
        if slots == 1:
            yield (total,)
            return
        for first in range(total + 1):
            for rest in gen(total - first, slots - 1):
                yield (first,) + rest

    for total in range(1, r + 1):
        for idx in gen(total, n):
            yield idx


# ---------------------------------------------------------------------------
# commutator on the expanded coordinates


def commutator(g1: Generator, g2: Generator) -> Generator:
    """[g1, g2] = g1 g2 - g2 g1, truncated at the ambient order.

    Both generators act on the expanded coordinates: the x-legs carry
    series coefficients, the u_(k)-legs the per-order eta slots.  Applying
    a generator to an eps-free scalar yields a series; the bracket's
    u-direction series are re-sliced into per-order slots, dropping
    anything beyond the truncation order.
    """
    g1._check(g2)
    p = g1.order
    scheme = g1.scheme
    inds = g1.independents

    # coefficients are point functions of (x, u_(k)); expansion symbols are
    # coordinates, while jets of auxiliary functions ride along with x
    promote = lambda s: not scheme.is_coeff_fn(s.func)  # noqa: E731

    def apply_to(g: Generator, h: ex.Expr) -> EpsSeries:
        out = EpsSeries.zero(p)
        for v in inds:
            dh = ex.diff(h, v, promote_jets=promote)
            if dh is ex.ZERO:
                continue
            out = out.add(g.xi_series(v).scale(dh))
        for dep in scheme.dependents:
            for k in range(p + 1):
                coord = TABLE.jet(scheme.coeff_fn(dep, k), (0,) * len(dep.args))
                dh = ex.diff_wrt(h, coord)
                if dh is ex.ZERO:
                    continue
                out = out.add(EpsSeries.constant(
                    ex.mul(g.eta[dep][k], dh), p))
        return out

    def apply_series(g: Generator, s: EpsSeries) -> EpsSeries:
        out = EpsSeries.zero(p)
        for k, c in enumerate(s.coeffs):
            if c is ex.ZERO:
                continue
            term = apply_to(g, c)
            for _ in range(k):
                term = term.shift()
            out = out.add(term)
        return out

    xi = {}
    for v in inds:
        sv = apply_series(g1, g2.xi_series(v)).sub(
            apply_series(g2, g1.xi_series(v)))
        xi[v] = tuple(normal.canonical(c) for c in sv.coeffs)
    eta = {}
    for dep in scheme.dependents:
        total = EpsSeries.zero(p)
        for k in range(p + 1):
            term = apply_to(g1, g2.eta[dep][k]).sub(
                apply_to(g2, g1.eta[dep][k]))
            for _ in range(k):
                term = term.shift()
            total = total.add(term)
        eta[dep] = tuple(normal.canonical(c) for c in total.coeffs)
    return Generator(scheme, p, xi, eta, name="")
