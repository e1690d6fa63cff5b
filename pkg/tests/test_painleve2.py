import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edgewave import painleve2
from edgewave.fredholm import log_det
from edgewave.painleve2 import hamiltonian_pII, solve_hastings_mcleod, tw_via_hamiltonian, tw_via_integral
from edgewave.specfun import airy_ai, chi0


class TestProfile:
    def test_interior_residual(self, hm):
        D2 = painleve2._d2_matrix(hm.grid.size, hm.grid[1] - hm.grid[0])
        r = (D2 @ hm.q - hm.grid * hm.q - 2 * hm.q**3)[1:-1]
        assert np.max(np.abs(r)) < 1e-10

    def test_positive(self, hm):
        assert np.all(hm.q > 0)

    def test_boundaries(self, hm):
        assert abs(hm.q[-1] - airy_ai(hm.L)) < 1e-8
        assert abs(hm.q[0] / math.sqrt(hm.L / 2) - 1) < 0.02

    def test_examples(self, hm):
        assert abs(hm(-8.0) - 2.0) < 1e-3
        assert abs(hm(4.0) - airy_ai(4.0)) < 1e-6

    def test_frozen_oracle(self, hm, oracles):
        # scipy solve_bvp on [-10, 10]
        for x, ref in oracles["hastings_mcleod"].items():
            x = float(x)
            assert abs(hm(x) - ref["q"]) < 1e-8
            assert abs(hm(x, 1) - ref["qprime"]) < 1e-8
            assert abs(hamiltonian_pII(hm, x) - ref["H"]) < 1e-8

    def test_window_independence(self):
        a = solve_hastings_mcleod(8.0, 2000)
        b = solve_hastings_mcleod(10.0, 2500)
        xs = np.linspace(-6.0, 6.0, 241)
        assert np.max(np.abs(a(xs) - b(xs))) < 1e-7

    @pytest.mark.parametrize("L,n", [(5.0, 1000), (15.0, 1000), (10.0, 100)])
    def test_bad_arguments(self, L, n):
        with pytest.raises(ValueError):
            solve_hastings_mcleod(L, n)

    def test_divergence_carries_residual(self):
        with pytest.raises(painleve2.NewtonDivergence) as info:
            solve_hastings_mcleod(12.0, 400, maxiter=1)
        assert info.value.residual > 0
        assert "window" in str(info.value)


class TestHamiltonian:
    def test_derivative_identity(self, hm):
        h, x = 1e-3, -3.0
        dH = (hamiltonian_pII(hm, x + h) - hamiltonian_pII(hm, x - h)) / (2 * h)
        assert abs(dH + hm(x) ** 2) < 1e-6

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-10.0, 10.0))
    def test_derivative_identity_everywhere(self, x):
        hm = pytest.importorskip("edgewave.acceptance").hm_profile()
        h = 1e-3
        dH = (hamiltonian_pII(hm, x + h) - hamiltonian_pII(hm, x - h)) / (2 * h)
        assert abs(dH + hm(x) ** 2) < 1e-6

    def test_decay(self, hm):
        assert 0 <= hamiltonian_pII(hm, 6.0) < 1e-8

    def test_left_behaviour(self, hm):
        assert abs(hamiltonian_pII(hm, -6.0) - (9.0 + 1.0 / 48.0)) < 2e-3

    def test_outside_window(self, hm):
        with pytest.raises(ValueError):
            hamiltonian_pII(hm, hm.L + 1)


class TestTracyWidom:
    def test_far_right(self, hm):
        # log F(2) = -1.12e-4: small but not below 1e-7
        assert abs(tw_via_integral(hm, 2.0) - log_det(2.0)) < 1e-7

    def test_against_determinant(self, hm):
        assert abs(tw_via_integral(hm, -4.0) - log_det(-4.0)) < 1e-6

    def test_asymptote(self, hm):
        s = -8.0
        assert abs(tw_via_integral(hm, s) - (-abs(s) ** 3 / 12 - math.log(8.0) / 8 + chi0())) < 0.01

    def test_two_routes_agree(self, hm):
        for s in np.linspace(-6.0, 1.0, 15):
            assert abs(tw_via_integral(hm, s) - tw_via_hamiltonian(hm, s)) < 1e-6

    def test_margin(self, hm):
        with pytest.raises(ValueError):
            tw_via_integral(hm, hm.L - 2.0)
