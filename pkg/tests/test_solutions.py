"""Solution catalog: subalgebra generators, closed forms, residual checks
with repair, surface conditions, similarity reductions, and the BVP."""

import pytest

from approxlie import expr as ex
from approxlie import normal
from approxlie.creeping import KAPPA, RE, X, Y, paper_generators
from approxlie.invariance import verify_generator
from approxlie.parser import parse
from approxlie.solutions import (ExtractionFailure, FAMILY_IDS, UnknownFamily,
                                 catalog_family, check_bvp,
                                 check_full_residual, check_reduced_system,
                                 check_surface_conditions, extract_profiles,
                                 matching_generator, scale_to_bvp_map,
                                 solution_family, xi_A, xi_B)


class TestSubalgebraGenerators:
    def test_xi_a_is_the_stated_combination(self, case_i, generators):
        from approxlie.creeping import paper_generators
        gens = paper_generators(case_i.f1, case_i.f2)
        combo = gens["xi3"].scale(ex.sym(KAPPA[0])) \
            .add(gens["xi6"].scale(ex.sym(KAPPA[1]))) \
            .add(gens["xi7"].scale(ex.sym(KAPPA[2]))) \
            .add(gens["xi8"]).add(gens["xi9"])
        assert xi_A(f1=case_i.f1, f2=case_i.f2).same_as(combo)

    def test_xi_a_slot_examples(self, case_i):
        g = xi_A(f1=case_i.f1, f2=case_i.f2)
        assert normal.is_zero(ex.sub(g.xi[X][1], parse("k3*x")))
        assert normal.is_zero(ex.sub(g.xi[X][0], parse("x")))

    def test_xi_a_degenerates_to_scaling(self, generators):
        g = xi_A(k1=0, k2=0, k3=0, f1=ex.ZERO, f2=ex.ZERO)
        assert g.same_as(generators["xi8"])

    def test_xi_b_slot_examples(self, case_i, system):
        g = xi_B(f1=case_i.f1, f2=case_i.f2)
        assert g.xi[X][0] is ex.ONE
        assert normal.is_zero(ex.sub(g.xi[Y][0], parse("k1")))
        p = system.dependents[2]
        f1 = case_i.f1
        expected = ex.sub(case_i.f2, ex.div(ex.add(
            ex.diff(ex.diff(ex.diff(f1, X), Y), Y),
            ex.diff(ex.diff(ex.diff(f1, X), X), X)), ex.sym(RE)))
        assert normal.is_zero(ex.sub(g.eta[p][1], expected))

    def test_xi_b_trivial_reduction(self, generators):
        g = xi_B(k1=0, k2=0, k3=0, k4=0, f1=ex.ZERO, f2=ex.ZERO)
        assert g.same_as(generators["xi1"])

    def test_both_verify(self, system, rules, case_i):
        for g in (xi_A(f1=case_i.f1, f2=case_i.f2),
                  xi_B(f1=case_i.f1, f2=case_i.f2)):
            rep = verify_generator(system, g, rules=rules)
            assert rep.passed, f"{g.name} failed"


class TestFamilies:
    def test_unknown_family(self):
        with pytest.raises(UnknownFamily):
            solution_family("nope")

    def test_scale_stagnation_reduction(self):
        zeros = {n: 0 for n in
                 ("k1", "k2", "k3", "c1", "c3", "c4", "c5", "c6", "c7", "c8",
                  "a1", "a2", "a3", "a4", "a5", "a7")}
        fam = solution_family("scale_i", params=zeros)
        assert normal.is_zero(ex.sub(fam.u.coeffs[0], parse("c2*x")))
        assert normal.is_zero(ex.sub(fam.v.coeffs[0], parse("-c2*y")))
        assert fam.p.coeffs[0] is ex.ZERO
        for s in (fam.u, fam.v, fam.p):
            assert normal.is_zero(s.coeffs[1])

    def test_trasl_i_zeroth_order_display(self):
        fam = solution_family("trasl_i")
        want = parse("k2*Re/(2*(k1^2+1)^2)*(y-k1*x)^2 + c1*(y-k1*x) + c2")
        assert normal.is_zero(ex.sub(fam.u.coeffs[0], want))

    def test_bvp_zeroth_order_is_exact_solution(self):
        fam = solution_family("bvp_mud")
        z = fam.at_eps_zero()
        assert normal.is_zero(ex.sub(z["u"], parse("u_shear*y")))
        assert normal.is_zero(ex.sub(z["v"], parse("-v_suction*x")))
        assert normal.is_zero(ex.sub(z["p"], parse("p_far")))


class TestFullResiduals:
    @pytest.mark.parametrize("fid", ["scale_i", "trasl_ii", "trasl_iii",
                                     "bvp_mud"])
    def test_verbatim_families_pass(self, system, fid):
        fam = solution_family(fid)
        rep, fixed = check_full_residual(fam, system, repair=False)
        assert rep.passed
        assert fixed.repair_note == ""

    def test_trasl_i_typo_reported_and_repaired(self, system):
        fam = solution_family("trasl_i")
        rep_plain, _ = check_full_residual(fam, system, repair=False)
        assert not rep_plain.passed
        labels = [lab for lab, _ in rep_plain.symbolic_residuals]
        assert labels == ["eq2/order1", "eq3/order1"]
        # survivors are pure parameter constants; the x-coefficient is
        # -k1 times the y-coefficient (a pressure-gradient direction)
        (_, rx), (_, ry) = rep_plain.symbolic_residuals
        ratio = ex.add(parse(f"({rx})"),
                       ex.mul(parse("k1"), parse(f"({ry})")))
        assert normal.is_zero(ratio)

        rep, fixed = check_full_residual(fam, system, repair=True)
        assert rep.passed
        assert not rep.symbolic_residuals  # PASS reports carry no survivors
        assert "repaired" in rep.details
        # the original coefficients stay on record verbatim
        assert rx in rep.details and ry in rep.details
        assert fixed.repair_note
        re_rep, _ = check_full_residual(fixed, system, repair=False)
        assert re_rep.passed

    def test_repaired_coefficient_closed_form(self, system):
        # the repair amounts to replacing k4*k1*(k1*k4+2*k3) by
        # (1-k1^2)*k4 - 2*k1*k3 in the omega-coefficient of p[1]
        _, fixed = check_full_residual(solution_family("trasl_i"), system)
        direct = solution_family("trasl_i")
        delta = ex.sub(fixed.p.coeffs[1], direct.p.coeffs[1])
        lam = parse("k2*((k1^2*k4^2 + 2*k1*k3*k4) - ((1-k1^2)*k4 - 2*k1*k3))"
                    "/(k1^2+1)^2")
        want = ex.mul(ex.MINUS_ONE, lam, parse("(y - k1*x)"))
        assert normal.is_zero(ex.sub(delta, want))


class TestSurfaceChecks:
    @pytest.mark.parametrize("fid", FAMILY_IDS)
    def test_matched_pairs_pass(self, system, fid):
        fam, _ = catalog_family(fid, system=system)
        rep = check_surface_conditions(fam, matching_generator(fam), system)
        assert rep.passed, rep.symbolic_residuals[:3]

    def test_mismatched_pair_fails(self, system):
        fam, _ = catalog_family("trasl_i", system=system)
        scale_gen = matching_generator(catalog_family("scale_i",
                                                      system=system)[0])
        rep = check_surface_conditions(fam, scale_gen, system)
        assert not rep.passed
        assert rep.symbolic_residuals


class TestReducedSystems:
    @pytest.mark.parametrize("fid", ["scale_i", "trasl_i", "trasl_ii",
                                     "trasl_iii"])
    def test_profiles_satisfy_reduced_system(self, system, fid):
        fam, _ = catalog_family(fid, system=system)
        rep = check_reduced_system(fam)
        assert rep.passed, rep.symbolic_residuals[:3]

    def test_scale_profile_extraction(self, system):
        fam, _ = catalog_family("scale_i", system=system)
        prof = extract_profiles(fam)
        want = parse("k1*Re/2*w*arctan(w) + c2 + c1*w")
        assert normal.is_zero(ex.sub(prof["U0"], want))

    def test_unrepaired_trasl_i_fails_reduced_system(self):
        fam = solution_family("trasl_i")  # verbatim, typo intact
        rep = check_reduced_system(fam)
        assert not rep.passed
        labels = [lab for lab, _ in rep.symbolic_residuals]
        assert set(labels) <= {"reduced eq 5", "reduced eq 6"}

    def test_extraction_failure_reported(self, system):
        fam, _ = catalog_family("scale_i", system=system)
        broken = fam.with_components(
            ex_series_plus(fam.u, parse("x^2")), fam.v, fam.p, "tampered")
        with pytest.raises(ExtractionFailure):
            extract_profiles(broken)

    def test_bvp_has_no_reduced_system(self, system):
        fam, _ = catalog_family("bvp_mud", system=system)
        with pytest.raises(ExtractionFailure):
            check_reduced_system(fam)


def ex_series_plus(series, extra):
    from approxlie.series import EpsSeries
    return EpsSeries(series.order,
                     (ex.add(series.coeffs[0], extra),) + series.coeffs[1:])


class TestBvp:
    def test_bvp_passes(self, system):
        fam, _ = catalog_family("bvp_mud", system=system)
        rep = check_bvp(fam)
        assert rep.passed
        # order-0 wall conditions exact, order-1 slack is reported
        assert "slack" in rep.details

    def test_wall_condition_order1_vanishes_for_u(self, system):
        # u(x,0) order-1: -a1*a4*x*arctan(0) + c5*0 == 0 exactly
        fam, _ = catalog_family("bvp_mud", system=system)
        u1_wall = ex.substitute(fam.u.coeffs[1], {Y: ex.ZERO})
        assert normal.is_zero(u1_wall)

    def test_scale_to_bvp_map_reproduces_family(self, system):
        mapping = scale_to_bvp_map()
        mapped = solution_family("scale_i", params=mapping)
        bvp = solution_family("bvp_mud")
        for a, b in ((mapped.u, bvp.u), (mapped.v, bvp.v), (mapped.p, bvp.p)):
            for ca, cb in zip(a.coeffs, b.coeffs):
                assert normal.is_zero(ex.sub(ca, cb))

    def test_bvp_on_other_family_rejected(self, system):
        fam, _ = catalog_family("scale_i", system=system)
        with pytest.raises(UnknownFamily):
            check_bvp(fam)
