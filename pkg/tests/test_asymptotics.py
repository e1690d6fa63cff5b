import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from edgewave import asymptotics as A
from edgewave import pi2k_profile
from edgewave.fredholm import dlog_det_ds
from edgewave.specfun import alpha, chi0

ks = st.integers(1, 3)
reals = st.floats(-3.0, 3.0, allow_nan=False)


def _slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


class TestTheta:
    def test_examples(self):
        assert A.theta(1, 1.0, 0.0) == pytest.approx(4 / 7, abs=1e-15)
        assert A.theta(1, 1.0, -1.0) == pytest.approx(-3 / 7, abs=1e-15)

    @settings(max_examples=60, deadline=None)
    @given(ks, st.floats(0.01, 10), st.floats(0.1, 5), reals)
    def test_scaling(self, k, eta, lam, y):
        lhs = A.theta(k, lam * eta, y * lam ** (2 * k + 1))
        rhs = lam ** ((4 * k + 3) / 2) * A.theta(k, eta, y)
        assert lhs == pytest.approx(rhs, rel=1e-11, abs=1e-11)

    def test_domain(self):
        with pytest.raises(ValueError):
            A.theta(1, 0.0, 1.0)


class TestCoefficients:
    @settings(max_examples=60, deadline=None)
    @given(ks, st.fractions(-3, 3, max_denominator=9), st.fractions(-3, 3, max_denominator=9))
    def test_b0_exact(self, k, r, y):
        b = A.b_coefficients(k, r, y)
        assert all(isinstance(v, Fraction) for v in b)
        assert b[0] == -alpha(k) * r ** (2 * k + 1) - y
        assert len(b) == 2 * k + 2

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_origin(self, k):
        b = A.b_coefficients(k, 0, 0)
        assert all(v == 0 for v in b[:-1])
        assert b[-1] == Fraction(4, 4 * k + 3)
        data = A.gfunction_data(k, 0, 0)
        for eta in (0.3, 1.0, 4.0):
            assert A.g1(data, eta) == pytest.approx(A.theta(k, eta, 0.0), rel=1e-14)

    @settings(max_examples=40, deadline=None)
    @given(st.fractions(-3, 3, max_denominator=9), st.fractions(-3, 3, max_denominator=9))
    def test_k1_closed_forms(self, r, y):
        b = A.b_coefficients(1, r, y)
        assert b[1] == Fraction(5, 2) * r * r
        assert A.d1_coefficient(1, r, y) == Fraction(5, 32) * r**4 + r * y / 2

    def test_float_path(self):
        b = A.b_coefficients(2, 0.5, -1.0)
        exact = A.b_coefficients(2, Fraction(1, 2), -1)
        np.testing.assert_allclose([float(v) for v in b], [float(v) for v in exact], rtol=1e-15)

    @pytest.mark.parametrize(
        "v,expected", [(-1.0, "algebraic"), (0.0, "transition"), (None, "exponential")]
    )
    def test_region(self, v, expected):
        k, lam, delta = 1, 100.0, 1 / 6
        thr = lam ** (-k - 1 + delta)
        target = 2 * thr if v is None else v
        r = 0.3
        y = target - float(alpha(k)) * r**3
        assert A.region_classify(k, lam, r, y, delta) == expected

    def test_region_lambda(self):
        with pytest.raises(ValueError):
            A.region_classify(1, 0.0, 0.0, 0.0)


class TestG1:
    @settings(max_examples=60, deadline=None)
    @given(ks, reals, reals, st.floats(0.01, 5))
    def test_factorization(self, k, r, y, t):
        data = A.gfunction_data(k, r, y)
        eta = r + t
        assert A.g1(data, eta) == pytest.approx(math.sqrt(t) * A.p1(data, eta), rel=1e-9, abs=1e-9)

    @settings(max_examples=60, deadline=None)
    @given(ks, reals, reals, st.floats(-5, 5))
    def test_p1_tilde_routes(self, k, r, y, eta):
        data = A.gfunction_data(k, r, y)
        a, b = A.p1_tilde(data, eta), A.p1_tilde_from_b(data, eta)
        assert a == pytest.approx(b, rel=1e-9, abs=1e-8 * max(1.0, abs(eta)) ** (2 * k + 1))

    @settings(max_examples=40, deadline=None)
    @given(ks, reals, reals, st.floats(0.2, 3))
    def test_p1_tilde_is_derivative(self, k, r, y, t):
        data = A.gfunction_data(k, r, y)
        eta, h = r + t, 1e-5
        dg = (A.g1(data, eta + h) - A.g1(data, eta - h)) / (2 * h)
        assert dg == pytest.approx(A.p1_tilde(data, eta) / math.sqrt(t), rel=1e-6, abs=1e-6)

    @settings(max_examples=40, deadline=None)
    @given(ks, reals, reals)
    def test_p1_tilde_at_r(self, k, r, y):
        data = A.gfunction_data(k, r, y)
        assert A.p1_tilde(data, r) == pytest.approx(-float(data.b[0]) / 2, abs=1e-10 * max(1, abs(r)) ** (2 * k + 1))

    def test_branch(self):
        with pytest.raises(ValueError):
            A.g1(A.gfunction_data(1, 1.0, 0.0), 1.0)

    def test_matching_slope_k1(self):
        data = A.gfunction_data(1, -1, 0)
        etas = np.logspace(2, 4, 9)
        rem = [A.matching_remainder(data, e, "g1") for e in etas]
        assert abs(_slope(etas, rem) + 1.5) < 0.1

    def test_matching_family_name(self):
        with pytest.raises(ValueError):
            A.matching_remainder(A.gfunction_data(1, -1, 0), 100.0, "g3")


class TestSign:
    @pytest.mark.parametrize("k,r,y", [(1, -1.0, 0.0), (1, 0.5, -1.0)])
    def test_examples(self, k, r, y):
        rep = A.lemma41_sign_check(k, r, y, samples=1000)
        assert rep.ok and rep.samples == 1000 and rep.first_violation is None

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_boundary_case(self, k):
        r = 0.7
        y = -float(alpha(k)) * r ** (2 * k + 1)
        data = A.gfunction_data(k, r, y)
        assert abs(A.p1_tilde(data, r)) < 1e-14
        assert A.lemma41_sign_check(k, r, y, samples=500).ok

    def test_precondition(self):
        with pytest.raises(ValueError):
            A.lemma41_sign_check(1, 1.0, 0.0)

    @settings(max_examples=40, deadline=None)
    @given(ks, st.floats(-3, 3), st.floats(0, 5))
    def test_random(self, k, r, gap):
        y = -float(alpha(k)) * r ** (2 * k + 1) - gap
        assume(abs(r) + abs(y) > 1e-3)
        assert A.lemma41_sign_check(k, r, y, samples=200).ok


class TestConformal:
    @pytest.mark.parametrize("k,r,y", [(1, -1.0, 0.0), (2, 0.5, -1.0), (1, 0.2, 1.0)])
    def test_f1_derivative_at_zero(self, k, r, y):
        data = A.gfunction_data(k, r, y)
        h = 1e-6
        assert (A.conformal_f1(data, h) - A.conformal_f1(data, -h)) / (2 * h) == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("k,r,y", [(1, -1.0, 0.0), (2, 0.5, -1.0), (1, 0.2, 1.5)])
    def test_f1_routes(self, k, r, y):
        data = A.gfunction_data(k, r, y)
        b0 = float(data.b[0])
        for eta in np.linspace(0.05, 0.5, 5) * math.copysign(1, b0):
            assert A.conformal_f1(data, eta) == pytest.approx(A.conformal_f1_from_g1(data, eta), rel=1e-10)

    def test_f1_undefined(self):
        data = A.gfunction_data(1, 1, -Fraction(5, 4))
        with pytest.raises(ValueError):
            A.conformal_f1_from_g1(data, 0.1)

    @settings(max_examples=40, deadline=None)
    @given(ks, reals, reals, reals, st.floats(0.0, 3.0))
    def test_f2_independent_of_y(self, k, r, y1, y2, t):
        a = A.gfunction_data(k, r, y1)
        b = A.gfunction_data(k, r, y2)
        assert A.conformal_f2(a, r + t) == A.conformal_f2(b, r + t)

    @pytest.mark.parametrize("k,y", [(1, 1.0), (1, -2.0), (2, 0.7), (3, 3.0)])
    def test_f3_derivative(self, k, y):
        fam = A.g2_family(k, y)
        h = 1e-6
        d = (A.conformal_f3(k, fam.r0 + 2 * h, fam.r0) - A.conformal_f3(k, fam.r0 + h, fam.r0)) / h
        d0 = 2 * d - (A.conformal_f3(k, fam.r0 + h, fam.r0) / h)  # one-sided, second order
        assert d0 == pytest.approx((1.5 * fam.p2(fam.r0)) ** (2 / 3), rel=1e-5)
        assert A.conformal_f3(k, fam.r0 + 0.3, fam.r0) ** 1.5 == pytest.approx(1.5 * fam.g2(fam.r0 + 0.3), rel=1e-12)

    def test_f3_branch(self):
        with pytest.raises(ValueError):
            A.conformal_f3(1, -2.0, -1.0)


class TestG2:
    @settings(max_examples=40, deadline=None)
    @given(ks, st.floats(-5, 5).filter(lambda v: abs(v) > 1e-6))
    def test_p2_positive_at_r0(self, k, y):
        fam = A.g2_family(k, y)
        assert fam.p2(fam.r0) > 0

    def test_r0_examples(self):
        assert A.g2_family(1, 1.25).r0 == pytest.approx(-1.0, abs=1e-15)
        assert A.g2_family(1, 0.0).r0 == 0.0

    @pytest.mark.parametrize("k", [1, 2])
    def test_coefficients(self, k):
        fam = A.g2_family(k, 0.8)
        for j, c in enumerate(fam.p2_coefficients):
            g = math.gamma(j + 1.5) / (math.gamma(j + 1) * math.gamma(1.5))
            assert c == pytest.approx(4 / (4 * k + 3) * g * fam.r0**j, rel=1e-14)

    @pytest.mark.parametrize("k,y", [(1, Fraction(5, 4)), (2, Fraction(63, 64)), (1, -2)])
    def test_matching_slope(self, k, y):
        data = A.gfunction_data(k, -1, y)
        etas = np.logspace(2, 4, 9)
        rem = [A.matching_remainder(data, e, "g2") for e in etas]
        assert abs(_slope(etas, rem) + 1.5) < 0.1

    def test_matching_trivial_at_y0(self):
        # r0 = 0 makes g2 = theta exactly
        data = A.gfunction_data(1, -1, 0)
        assert A.matching_remainder(data, 500.0, "g2") < 1e-60

    @pytest.mark.parametrize("k,r", [(1, 0.7), (1, -1.3), (2, 0.4), (3, -0.9)])
    def test_g1_equals_g2_when_b0_vanishes(self, k, r):
        y = -float(alpha(k)) * r ** (2 * k + 1)
        data = A.gfunction_data(k, r, y)
        fam = A.g2_family(k, y)
        assert fam.r0 == pytest.approx(r, abs=1e-14)
        for eta in np.linspace(r + 0.01, r + 5, 40):
            assert A.g1(data, eta) == pytest.approx(fam.g2(eta), rel=1e-12, abs=1e-12)

    def test_d2_from_matching(self):
        # extended precision: theta and g2 cancel through eta^(11/2)
        fam = A.g2_family(2, 0.6)
        eta = A._HP.mpf(10) ** 6
        g, d2 = A._g2_hp(2, 0.6, eta)
        rem = A._theta_hp(2, eta, A._to_hp(0.6)) - g
        assert float(rem * A._HP.sqrt(eta)) == pytest.approx(fam.d2, rel=1e-5)
        assert float(d2) == pytest.approx(fam.d2, rel=1e-14)


class TestKappa:
    def test_zero_when_b0_zero(self):
        r = -0.8
        y = -1.25 * r**3
        assert A.kappa0(1, r, y) == pytest.approx(0.0, abs=1e-15)

    def test_domain(self):
        with pytest.raises(ValueError):
            A.kappa0(1, 0.3, -1.0)
        assert A.gfunction_data(1, 0.3, -1.0).kappa0 is None

    @settings(max_examples=40, deadline=None)
    @given(ks, reals, reals)
    def test_nonpositive_when_b0_nonnegative(self, k, r, y):
        data = A.gfunction_data(k, r, y)
        if data.b[0] >= 0 and float(data.b[1]) > 0:
            assert A.kappa(data) <= 0
        if data.kappa0 is not None and data.b[0] >= 0:
            assert data.kappa0 <= 0

    @pytest.mark.parametrize("k,y", [(1, 1.0), (2, 2.5)])
    def test_agrees_with_kappa_near_r0(self, k, y):
        r0 = A.g2_family(k, y).r0
        ratios = []
        for d in (1e-1, 1e-2, 1e-3):
            data = A.gfunction_data(k, r0 + d, y)
            ratios.append(A.kappa(data) / data.kappa0)
        errs = [abs(v - 1) for v in ratios]
        assert errs[-1] < 1e-2 and errs[0] > errs[1] > errs[2]

    @pytest.mark.parametrize("k,y", [(1, 1.0), (2, 2.5)])
    def test_f2_slope_matches_kappa0_slope(self, k, y):
        r0 = A.g2_family(k, y).r0
        for d in (1e-2, 1e-4):
            r, h = r0 + d, 1e-6
            data = A.gfunction_data(k, r, y)
            f2p = (A.conformal_f2(data, r + h) - A.conformal_f2(data, r)) / h
            dk = (A.kappa0(k, r + h, y) - A.kappa0(k, r - h, y)) / (2 * h)
            assert f2p / dk == pytest.approx(1.0, abs=10 * d + 1e-4)


class TestChi:
    @pytest.mark.parametrize("k,x", [(1, 3.0), (1, 125 * 1.25), (2, 7.0)])
    def test_seam(self, k, x):
        s0 = -((x / float(alpha(k))) ** (1 / (2 * k + 1)))
        assert abs(A.chi_variable(k, s0, x)) < 1e-12
        assert abs(A._chi_rational(k, s0, x)) < 1e-12
        assert abs(A.conformal_f3(k, s0, s0)) == 0.0

    @pytest.mark.parametrize("k,x", [(1, 3.0), (1, 125 * 1.25), (2, 7.0), (3, 0.5)])
    def test_slopes_agree(self, k, x):
        s0 = -((x / float(alpha(k))) ** (1 / (2 * k + 1)))
        h = 1e-7
        left = (A.chi_variable(k, s0, x) - A.chi_variable(k, s0 - h, x)) / h
        right = (A.chi_variable(k, s0 + h, x) - A.chi_variable(k, s0, x)) / h
        assert left == pytest.approx(right, rel=1e-6)
        assert A.chi_derivative(k, s0 - 1e-12, x) == pytest.approx(A.chi_derivative(k, s0 + 1e-12, x), rel=1e-9)

    def test_rational_branch_example(self):
        a = 1.25
        x = 125 * a
        s = -6.0  # s0 = -5
        direct = (a * s**3 + x) / (3 ** (1 / 3) * a ** (1 / 9) * x ** (2 / 9))
        assert A.chi_variable(1, s, x) == pytest.approx(direct, rel=1e-14)
        assert A.chi_variable(1, s, x) < 0

    def test_k0_is_linear(self):
        for s in (-3.0, -1.0, 0.5):
            assert A.chi_variable(0, s, 2.0) == pytest.approx(2 ** (2 / 3) * (s + 1.0), rel=1e-12, abs=1e-14)

    def test_domain(self):
        with pytest.raises(ValueError):
            A.chi_variable(1, -1.0, 0.0)


class TestTheorem:
    @pytest.mark.parametrize("s", [-2.0, -7.5, -30.0])
    def test_k0_reduction(self, s):
        br = A.theorem_expansion(0, s, 0.0, allow_missing_Ih=True)
        u = 2 ** (2 / 3) * abs(s)
        assert br.total == pytest.approx(-(u**3) / 12 - math.log(u) / 8 + chi0(), rel=1e-14)

    def test_k1_against_t1_form(self, pi2):
        s, x = -10.0, 3.0
        Ih = pi2k_profile.I_h(pi2, x).value
        br = A.theorem_expansion(1, s, x, Ih_value=Ih)
        cor = A.k1_t1_expansion(s, x, J0=Ih)
        t = cor.terms
        pairs = [
            (br.quartic_power, t["s7"]), (br.cross, t["s4"]), (br.quadratic, t["s1"]), (br.log_term, t["log"]),
            (br.Ih_term, t["J0"]), (br.power_x, t["J1"]), (br.log_x, t["log_x"]), (br.const_block, t["const"]),
        ]
        for a, b in pairs:
            assert a == pytest.approx(b, rel=1e-13, abs=1e-15)
        assert t["s5"] == t["s3"] == t["s2"] == 0.0

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-40, -2), st.floats(-50, 50))
    def test_identity_with_t1_form(self, s, x):
        assume(abs(1.25 * s**3 + x) > 1e-3)
        br = A.theorem_expansion(1, s, x, Ih_value=0.01)
        cor = A.k1_t1_expansion(s, x, J0=0.01)
        assert br.total == pytest.approx(cor.total, rel=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(ks, st.floats(-30, -1), st.floats(-100, 100), st.floats(-1, 1))
    def test_fields_sum(self, k, s, x, Ih):
        assume(abs(float(alpha(k)) * s ** (2 * k + 1) + x) > 1e-6)
        br = A.theorem_expansion(k, s, x, Ih_value=Ih)
        assert br.total == math.fsum(br.terms().values())

    def test_window_tag(self):
        assert "outside_window" in A.theorem_expansion(1, -2.0, 100.0, Ih_value=0.0).tags
        assert A.theorem_expansion(1, -5.0, 3.0, Ih_value=0.0).tags == ()

    def test_missing_Ih(self):
        with pytest.raises(ValueError):
            A.theorem_expansion(1, -5.0, 1.0)
        assert "Ih_zero" in A.theorem_expansion(1, -5.0, 1.0, allow_missing_Ih=True).tags

    def test_positive_s(self):
        with pytest.raises(ValueError):
            A.theorem_expansion(1, 1.0, 1.0, Ih_value=0.0)

    def test_log_simplification_bounded_x(self):
        # dropping x inside the log costs x / (8 alpha |s|^(2k+1)) + ...
        x = 3.0
        for s in (-10.0, -20.0, -40.0):
            full = A.theorem_expansion(1, s, x, Ih_value=0.0).log_term
            simp = A.theorem_expansion(1, s, x, Ih_value=0.0, simplify_log=True).log_term
            assert abs(full - simp) == pytest.approx(x / (8 * 1.25 * abs(s) ** 3), rel=0.05)


class TestTransition:
    def test_decreasing(self):
        d = [abs(A.transition_eval(1, -v, -(v**0.3))) for v in (20.0, 40.0, 80.0)]
        assert d[0] > d[1] > d[2]

    def test_Ih_contribution_small(self):
        # I_h at x near alpha |s|^3 is the far tail
        s = -40.0
        x = 1.25 * 40.0**3
        Ih = pi2k_profile.I_h_tail(x).value
        assert abs(Ih) < 1e-8
        base = A.transition_eval(1, s, -(40.0**0.3))
        assert A.transition_eval(1, s, -(40.0**0.3), Ih_value=0.0) == pytest.approx(base, abs=1e-8)

    def test_simplified_log_not_small_here(self):
        # alpha s^3 + x is O(|s|^(2k/3)) in this regime, so dropping x is not a small change
        full = A.transition_eval(1, -40.0, -3.0)
        simp = A.transition_eval(1, -40.0, -3.0, simplify_log=True)
        assert abs(full - simp) > 0.1

    @pytest.mark.parametrize("s,st_", [(-20.0, 1.0), (-20.0, -100.0), (5.0, -1.0)])
    def test_window(self, s, st_):
        with pytest.raises(ValueError):
            A.transition_eval(1, s, st_)


class TestScaffold:
    @pytest.mark.parametrize("sign", [1, -1])
    @pytest.mark.parametrize("s", [-1e3, -1e4, -1e5])
    def test_relation(self, s, sign):
        rec = A.proof_scaffold(1, s, sign)
        assert rec.relation_defect_s1 < 1e-12 and rec.relation_defect_s2 < 1e-12
        assert rec.x0 == pytest.approx(sign * abs(s) ** 3)

    @pytest.mark.parametrize("sign", [1, -1])
    def test_cancellation_rate(self, sign):
        S = np.logspace(3, 5, 7)
        c = [abs(A.proof_scaffold(1, -v, sign).cancellation) for v in S]
        assert abs(_slope(S, c) + 1 / 3) < 0.03

    @pytest.mark.parametrize("k", [1, 2])
    def test_s1_expansion(self, k):
        S = np.logspace(2, 4, 5)
        rem = [A.s1_expansion_remainder(k, -v) for v in S]
        assert _slope(S, rem) == pytest.approx(-4 * k - 7 / 3, abs=0.1)
        rec = A.proof_scaffold(k, -1e3, 1)
        assert rec.s1 == pytest.approx(A.s1_four_term(k, -1e3), rel=1e-14)

    def test_arguments(self):
        with pytest.raises(ValueError):
            A.proof_scaffold(1, -10.0, 0)
        with pytest.raises(ValueError):
            A.proof_scaffold(1, 10.0, 1)


class TestLemmaApproximants:
    def test_algebraic_ratio(self):
        k, x = 1, 400.0
        a = 1.25
        v = -math.sqrt(x)
        s = -(((x - v) / a) ** (1 / 3))
        res = A.lemma_approximants(k, s, x, "dFds_algebraic")
        assert res.tags == ()
        assert res.leading == pytest.approx(v * v / 4, rel=1e-10)
        ratio = abs(res.leading / res.correction)
        assert ratio == pytest.approx(2 * x**1.5 / (3 * a * s * s), rel=1e-10)
        assert ratio > 10

    def test_transition_at_seam(self, hm):
        from edgewave.painleve2 import hamiltonian_pII

        x = 20.0
        s0 = -((x / 1.25) ** (1 / 3))
        res = A.lemma_approximants(1, s0, x, "dFds_transition")
        assert res.value == pytest.approx(A.chi_derivative(1, s0, x) * hamiltonian_pII(hm, 0.0), rel=1e-12)

    @pytest.mark.parametrize("s,x", [(-3.0, 2.0), (-1.5, 1.0), (0.5, 2.0)])
    def test_k0_chain_rule(self, s, x):
        u = 2 ** (2 / 3) * (s + x / 2)
        res = A.lemma_approximants(0, s, x, "dFds_transition")
        assert res.value == pytest.approx(2 ** (2 / 3) * dlog_det_ds(u), abs=1e-5)

    def test_dFdx_is_x_derivative(self, pi2):
        s, x, h = -6.0, 2.0, 1e-3
        F = lambda xx: A.theorem_expansion(1, s, xx, Ih_value=pi2k_profile.I_h(pi2, xx).value).total  # noqa: E731
        fd = (F(x + h) - F(x - h)) / (2 * h)
        res = A.lemma_approximants(1, s, x, "dFdx", h=pi2.h_at)
        assert res.value == pytest.approx(fd, abs=1e-6)
        assert "h_asy_fallback" in A.lemma_approximants(1, s, x, "dFdx").tags

    def test_region_tag(self):
        assert "outside_region" in A.lemma_approximants(1, -1.0, 10.0, "dFds_algebraic").tags

    def test_unknown(self):
        with pytest.raises(ValueError):
            A.lemma_approximants(1, -1.0, 1.0, "dFdy")
