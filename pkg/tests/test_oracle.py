import cmath
import math

import numpy as np
import pytest

from jostlab import oracle
from jostlab import potential as pot


WELL4 = pot.Step(((0.0, 1.0, -4.0),))


class TestWellBoundStates:
    def test_no_state_below_threshold(self):
        # a half-line well needs sqrt(v0) * width > pi/2 to bind
        assert oracle.well_bound_states(0.1, 1.0) == []
        assert oracle.well_bound_states((math.pi / 2) ** 2 * 0.99, 1.0) == []

    def test_state_appears_above_threshold(self):
        assert len(oracle.well_bound_states((math.pi / 2) ** 2 * 1.01, 1.0)) == 1

    def test_satisfies_matching_condition(self):
        # kappa = -q cot(q w), q = sqrt(v0 - kappa^2)
        for kappa in oracle.well_bound_states(60.0, 1.0):
            q = math.sqrt(60.0 - kappa**2)
            assert kappa == pytest.approx(-q / math.tan(q), abs=1e-9)

    def test_descending_and_positive(self):
        ks = oracle.well_bound_states(100.0, 1.0)
        assert ks == sorted(ks, reverse=True)
        assert all(k > 0 for k in ks)

    def test_width_scaling(self):
        # V_s(x) = s^2 V(s x): kappa scales by s
        base = oracle.well_bound_states(4.0, 1.0)
        scaled = oracle.well_bound_states(16.0, 0.5)
        assert scaled == pytest.approx([2 * k for k in base], rel=1e-10)


class TestFdSpectrum:
    def test_zero_potential_empty(self):
        zero = pot.Step(((0.0, 1.0, 0.0),))
        assert oracle.fd_spectrum(zero).eigenvalues == ()

    def test_shallow_well_empty(self):
        shallow = pot.Step(((0.0, 1.0, -0.1),))
        assert oracle.fd_spectrum(shallow).eigenvalues == ()

    def test_well_matches_transcendental(self):
        kappa = oracle.well_bound_states(4.0, 1.0)[0]
        lams = oracle.fd_spectrum(WELL4).eigenvalues
        assert len(lams) == 1
        assert lams[0] == pytest.approx(-(kappa**2), rel=1e-4)

    def test_deep_well_count(self):
        deep = pot.Step(((0.0, 1.0, -100.0),))
        lams = oracle.fd_spectrum(deep).eigenvalues
        kappas = oracle.well_bound_states(100.0, 1.0)
        assert len(lams) == len(kappas)
        for kap, lam in zip(kappas, sorted(lams, key=lambda z: z.real)):
            assert lam == pytest.approx(-(kap**2), rel=1e-3)

    def test_second_order_convergence(self):
        kappa = oracle.well_bound_states(4.0, 1.0)[0]
        exact = -(kappa**2)
        errs = [
            abs(oracle.fd_spectrum(WELL4, L=20, n=n).eigenvalues[0] - exact)
            for n in (1000, 2000)
        ]
        assert 3.5 <= errs[0] / errs[1] <= 4.5

    def test_domain_length_insensitive(self):
        a = oracle.fd_spectrum(WELL4, L=20, n=4000).eigenvalues[0]
        b = oracle.fd_spectrum(WELL4, L=30, n=6000).eigenvalues[0]
        assert abs(a - b) < 1e-6

    def test_complex_well_eigenvalue_in_disk(self):
        spec = pot.Step(((0.0, 1.0, -4.0 * cmath.exp(0.25j * math.pi)),))
        lams = oracle.fd_spectrum(spec).eigenvalues
        assert lams
        m1 = spec.l1()
        for lam in lams:
            assert abs(lam) <= m1 * m1 * (1 + 1e-2)
            assert cmath.sqrt(lam).imag > 0 or abs(lam.imag) > 0
