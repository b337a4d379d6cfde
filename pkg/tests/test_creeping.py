"""The flow-model catalog: equations, generators, constraint, ansatz."""

from fractions import Fraction

import pytest

from approxlie import expr as ex
from approxlie import normal
from approxlie.creeping import (EPS, RE, X, Y, InvalidCaseParams, ansatz_case,
                                constraint_expr, constraint_residual,
                                paper_generators)
from approxlie.parser import parse
from approxlie.series import EpsSeries, equation_series, expand_dependent
from approxlie.symbols import TABLE


class TestSystemShape:
    def test_unperturbed_is_classical_form(self, system):
        at_zero = [ex.substitute(eq, {EPS: ex.ZERO})
                   for eq in system.equations]
        expected = [
            parse("u_x + v_y"),
            parse("p_x - (u_xx + u_yy)/Re"),
            parse("p_y - (v_xx - u_xy)/Re"),
        ]
        for got, want in zip(at_zero, expected):
            assert normal.is_zero(ex.sub(got, want))

    def test_eps_part_coefficient_multisets(self, system):
        from approxlie.normal import collect
        for i in (1, 2):
            eps_coeff = collect(system.equations[i], {EPS})[ex.sym(EPS)]
            cleared = normal.canonical(ex.mul(ex.sym(RE), eps_coeff))
            assert isinstance(cleared, ex.Sum)
            assert len(cleared.terms) == 9
            coeffs = sorted(abs(t.coeff) for t in cleared.terms)
            assert coeffs == sorted([5, 1, 1, 1, 1, 2, 1, 1, 1])

    def test_stagnation_flow_exact_for_all_eps(self, system):
        comps = {"u": EpsSeries(1, (parse("c1*x"), ex.ZERO)),
                 "v": EpsSeries(1, (parse("-c1*y"), ex.ZERO)),
                 "p": EpsSeries(1, (parse("c4"), ex.ZERO))}
        # exact at every order: substitute the closed form with eps symbolic
        from approxlie.numeric import residual_expressions
        closed = {"u": parse("c1*x"), "v": parse("-c1*y"), "p": parse("c4")}
        for r in residual_expressions(system, closed):
            assert normal.is_zero(r)
        for eq in system.equations:
            series = equation_series(eq, comps, EPS, 1)
            for c in series.coeffs:
                assert normal.is_zero(c)


class TestExpansionOracle:
    """Brute-force term-by-term expansion of the second equation, kept
    independent of the expression kernel: each displayed term carries its
    rational coefficient, its power of 1/Re, its eps prefactor, and its
    factor list; the expansion distributes f -> sum_k eps^k f_k by hand."""

    TERMS = [
        (Fraction(1), 0, 0, (("p", (1, 0)),)),
        (Fraction(-1), -1, 0, (("u", (2, 0)),)),
        (Fraction(-1), -1, 0, (("u", (0, 2)),)),
        (Fraction(-5), 0, 1, (("u", (1, 0)), ("u", (2, 0)))),
        (Fraction(-1), 0, 1, (("u", (1, 0)), ("u", (0, 2)))),
        (Fraction(-1), 0, 1, (("u", (0, 0)), ("u", (3, 0)))),
        (Fraction(-1), 0, 1, (("v", (0, 0)), ("u", (0, 3)))),
        (Fraction(-1), 0, 1, (("u", (0, 0)), ("u", (1, 2)))),
        (Fraction(-2), 0, 1, (("v", (1, 0)), ("v", (2, 0)))),
        (Fraction(-1), 0, 1, (("u", (0, 1)), ("u", (1, 1)))),
        (Fraction(-1), 0, 1, (("u", (0, 1)), ("v", (2, 0)))),
        (Fraction(-1), 0, 1, (("v", (0, 0)), ("u", (2, 1)))),
    ]

    def expand(self, p=1):
        """{eps_order: {sorted jet-name tuple: (coeff, re_power)}}"""
        out = {k: {} for k in range(p + 1)}
        for coeff, re_pow, eps_base, factors in self.TERMS:
            choices = [([], 0)]
            for f, idx in factors:
                choices = [(c + [(f, idx, k)], tot + k)
                           for c, tot in choices for k in range(p + 1)]
            for choice, tot in choices:
                k_total = eps_base + tot
                if k_total > p:
                    continue
                key = tuple(sorted((f"{f}{k}", idx) for f, idx, k in choice))
                bucket = out[k_total]
                prev = bucket.get(key)
                if prev is None:
                    bucket[key] = (coeff, re_pow)
                else:
                    assert prev[1] == re_pow
                    bucket[key] = (prev[0] + coeff, re_pow)
        return out

    @staticmethod
    def _engine_table(system, k):
        from approxlie.normal import collect
        series = expand_dependent(system.equations[1], system, 1)
        scheme = system.scheme(1)
        coeff = series.coeffs[k]
        inds = {s for s in ex.jet_symbols(coeff)
                if scheme.is_coeff_fn(s.func)}
        table = {}
        for mono, c in collect(coeff, inds).items():
            if normal.is_zero(c):
                continue
            syms = []
            stack = [mono]
            for node in stack:
                if isinstance(node, ex.Sym):
                    syms.append((node.sym, 1))
                elif isinstance(node, ex.Pow):
                    syms.append((node.base.sym, node.exponent))
                elif isinstance(node, ex.Prod):
                    stack.extend(node.factors)
            key = tuple(sorted((s.func.name, s.index)
                               for s, e in syms for _ in range(e)))
            table[key] = c
        return table

    def test_counts_match(self, system):
        oracle = self.expand(1)
        assert len(oracle[0]) == 3
        assert len(oracle[1]) == 12
        for k in (0, 1):
            assert len(self._engine_table(system, k)) == len(oracle[k])

    def test_every_coefficient_matches(self, system):
        re_sym = ex.sym(RE)
        oracle = self.expand(1)
        for k in (0, 1):
            engine = self._engine_table(system, k)
            for key, (fr, re_pow) in oracle[k].items():
                assert key in engine, f"missing {key} at order {k}"
                want = ex.mul(ex.rat(fr), ex.pow_(re_sym, re_pow))
                assert normal.is_zero(ex.sub(engine[key], want)), \
                    f"coefficient mismatch for {key} at order {k}"


class TestGenerators:
    def test_slot_examples(self, generators):
        g7 = generators["xi7"]
        assert normal.is_zero(ex.sub(g7.xi[X][1], parse("x")))
        assert normal.is_zero(ex.sub(g7.xi[Y][1], parse("y")))
        p = TABLE.find_function("p")
        assert normal.is_zero(ex.add(g7.eta[p][1], parse("p0")))
        g2 = generators["xi2"]
        assert g2.xi[Y][0] is ex.ONE
        assert all(c is ex.ZERO for c in g2.xi[X])
        g9 = generators["xi9"]
        u = TABLE.find_function("u")
        assert normal.is_zero(ex.sub(g9.eta[u][1], parse("f1_yy")))

    def test_xi9_slots_with_concrete_case(self, case_i):
        gens = paper_generators(case_i.f1, case_i.f2)
        u = TABLE.find_function("u")
        f1yy = ex.diff(ex.diff(case_i.f1, Y), Y)
        assert normal.is_zero(ex.sub(gens["xi9"].eta[u][1], f1yy))


class TestConstraint:
    def test_case_i_residual_zero_symbolically(self, case_i):
        assert constraint_residual(case_i.f1, case_i.f2) is ex.ZERO

    def test_case_ii_iii_residual_zero_symbolically(self, case_ii, case_iii):
        assert constraint_residual(case_ii.f1, case_ii.f2) is ex.ZERO
        assert constraint_residual(case_iii.f1, case_iii.f2) is ex.ZERO

    def test_quartic_violates(self):
        r = constraint_residual(parse("x^4"), ex.ZERO)
        assert normal.is_zero(ex.sub(r, parse("-24/Re")))

    def test_symbolic_form(self):
        e = constraint_expr()
        assert normal.is_zero(ex.sub(
            e, parse("f2_x - (f1_xxxx + 2*f1_xxyy + f1_yyyy)/Re")))


class TestAnsatz:
    def test_degenerate_case_flagged(self):
        case = ansatz_case("i", a=[0, 0, 1, 0, 0, 0, 0], H=ex.ZERO)
        # F = x^3 but G = 0: f1 collapses to H
        assert case.degenerate

    def test_case_ii_cos_exp(self):
        case = ansatz_case("ii", a=[1, 0, 1, 0, 0, 0, 0], b=1, H=ex.ZERO)
        assert normal.is_zero(ex.sub(case.f1, parse("cos(x)*exp(y)")))
        assert constraint_residual(case.f1, case.f2) is ex.ZERO

    def test_case_iii_exp_sin(self):
        case = ansatz_case("iii", a=[0, 1, 0, 1, 0, 0, 0], b=1, H=ex.ZERO)
        assert normal.is_zero(ex.sub(case.f1, parse("exp(-x)*sin(y)")))
        assert constraint_residual(case.f1, case.f2) is ex.ZERO

    def test_b_zero_rejected(self):
        with pytest.raises(InvalidCaseParams):
            ansatz_case("ii", b=0)

    def test_default_h_pairs_with_zero_f2(self, case_i):
        assert case_i.f2 is ex.ZERO
        h3 = ex.diff(ex.diff(ex.diff(case_i.H, X), X), X)
        # H''' = Re*f2 + a7 holds identically
        assert normal.is_zero(ex.sub(h3, ex.add(
            ex.mul(ex.sym(RE), case_i.f2), ex.sym(TABLE.find_var("a7")))))
