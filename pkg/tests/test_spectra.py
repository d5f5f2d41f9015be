import cmath
import math

import numpy as np
import pytest

from jostlab import jost, oracle, spectra
from jostlab import potential as pot


ZERO_POT = pot.Step(((0.0, 1.0, 0.0),))
WELL4 = pot.Step(((0.0, 1.0, -4.0),))
PHASE_WELL = pot.Step(((0.0, 1.0, -4.0 * cmath.exp(0.25j * math.pi)),))


class TestSearchRegion:
    def test_lower_half_plane_rejected(self):
        with pytest.raises(ValueError):
            spectra.SearchRegion(-1, 1, -0.1, 1)

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            spectra.SearchRegion(1, -1, 0.1, 1)

    def test_default_region_covers_disk(self):
        reg = spectra.default_region(WELL4)
        m1 = WELL4.l1()
        assert reg.re_hi >= m1 and reg.re_lo <= -m1 and reg.im_hi >= m1
        assert reg.im_lo > 0

    def test_split_covers_parent(self):
        reg = spectra.SearchRegion(-1, 1, 0.1, 1)
        parts = reg.split()
        assert min(p.re_lo for p in parts) == reg.re_lo
        assert max(p.re_hi for p in parts) == reg.re_hi
        assert min(p.im_lo for p in parts) == reg.im_lo
        assert max(p.im_hi for p in parts) == reg.im_hi


class TestWindingSynthetic:
    # winding_number accepts a bare evaluator, so analytic toys give exact counts
    def box(self):
        return spectra.SearchRegion(-1.0, 1.0, 0.1, 2.0)

    def test_entire_no_zero(self):
        assert spectra.winding_number(None, self.box(), evaluator=lambda k: cmath.exp(k)) == 0

    def test_single_zero(self):
        f = lambda k: (k - 0.3 - 0.9j) * cmath.exp(0.2 * k)
        assert spectra.winding_number(None, self.box(), evaluator=f) == 1

    def test_double_zero(self):
        f = lambda k: (k - 0.2 - 1.1j) ** 2
        assert spectra.winding_number(None, self.box(), evaluator=f) == 2

    def test_zero_outside(self):
        f = lambda k: k - (2.5 + 0.5j)
        assert spectra.winding_number(None, self.box(), evaluator=f) == 0

    def test_zero_near_edge_retries(self):
        # zero sits essentially on the box boundary; perturbation retries win
        f = lambda k: k - (0.3 + (2.0 + 1e-9) * 1j)
        w = spectra.winding_number(None, self.box(), evaluator=f)
        assert w in (0, 1)


class TestWindingPotentials:
    def test_zero_potential(self):
        assert spectra.winding_number(ZERO_POT, spectra.SearchRegion(-1, 1, 1e-6, 1)) == 0

    def test_well_full_region(self):
        assert spectra.winding_number(WELL4, spectra.default_region(WELL4)) == 1

    def test_completeness_matches_find_spectrum(self):
        for spec in (WELL4, PHASE_WELL):
            pts = spectra.find_spectrum(spec)
            w = spectra.winding_number(spec, spectra.default_region(spec))
            assert w == sum(p.multiplicity for p in pts)


class TestFindSpectrum:
    def test_zero_potential_empty(self):
        assert spectra.find_spectrum(ZERO_POT) == []

    def test_well_matches_transcendental_oracle(self):
        pts = spectra.find_spectrum(WELL4)
        assert len(pts) == 1
        kappa = oracle.well_bound_states(4.0, 1.0)
        assert len(kappa) == 1
        assert pts[0].k == pytest.approx(1j * kappa[0], abs=1e-9)
        assert pts[0].residual <= 1e-10

    def test_deep_well_two_states(self):
        deep = pot.Step(((0.0, 1.0, -60.0),))
        pts = spectra.find_spectrum(deep)
        kappas = sorted(oracle.well_bound_states(60.0, 1.0))
        assert len(pts) == len(kappas)
        found = sorted(p.k.imag for p in pts)
        assert found == pytest.approx(kappas, rel=1e-8)

    def test_complex_well_matches_fd(self):
        pts = spectra.find_spectrum(PHASE_WELL)
        fd = oracle.fd_spectrum(PHASE_WELL).eigenvalues
        assert len(pts) == len(fd)
        for p in pts:
            assert min(abs(p.lam - lam) / abs(lam) for lam in fd) < 1e-4

    def test_disk_bound(self):
        m1 = PHASE_WELL.l1()
        for p in spectra.find_spectrum(PHASE_WELL):
            assert abs(p.lam) <= m1 * m1 * (1 + 1e-8)
            assert abs(p.k) <= m1 * (1 + 1e-8)

    def test_dilation_scaling(self):
        # V_s(x) = s^2 V(s x) rescales every zero by exactly s
        s = 2.0
        base = WELL4
        dilated = pot.Step(((0.0, 1.0 / s, -4.0 * s * s),))
        k_base = spectra.find_spectrum(base)[0].k
        k_dil = spectra.find_spectrum(dilated)[0].k
        assert k_dil == pytest.approx(s * k_base, rel=1e-6)

    def test_synthetic_double_zero_reported_as_cluster(self):
        z0 = 0.21 + 0.83j
        f = lambda k: (k - z0) ** 2
        reg = spectra.SearchRegion(-1, 1, 0.05, 1.5)
        with pytest.warns(UserWarning):
            pts = spectra.find_spectrum(None, region=reg, evaluator=f)
        assert sum(p.multiplicity for p in pts) == 2
        assert all(abs(p.k - z0) < 1e-5 for p in pts)

    def test_synthetic_three_zeros(self):
        zs = [0.5 + 0.4j, -0.6 + 0.9j, 0.1 + 1.4j]
        f = lambda k: np.prod([k - z for z in zs])
        reg = spectra.SearchRegion(-1, 1, 0.05, 2.0)
        pts = spectra.find_spectrum(None, region=reg, evaluator=f, residual_tol=1e-8)
        assert len(pts) == 3
        for z in zs:
            assert min(abs(p.k - z) for p in pts) < 1e-9
