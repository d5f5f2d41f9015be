import cmath
import math

import numpy as np
import pytest

from jostlab import blaschke, jost, spectra, traceform
from jostlab import potential as pot


class TestContourSpec:
    def test_radius_positive(self):
        with pytest.raises(ValueError):
            traceform.ContourSpec(radius=0.0)

    def test_node_floor(self):
        with pytest.raises(ValueError):
            traceform.ContourSpec(radius=1.0, n_interval=32)


class TestContourLogIntegral:
    def test_constant_one(self):
        c = traceform.ContourSpec(radius=2.0)
        out = traceform.contour_log_integral(lambda k: 1.0 + 0j, c)
        assert abs(out.total) < 1e-12

    def test_blaschke_single_zero(self):
        # zeros {i}, R = 4: real part must equal 2 pi 16 * 1 - (2 pi/3)(-1)
        zs = blaschke.ZeroSet((1j,))
        c = traceform.ContourSpec(radius=4.0)
        out = traceform.contour_log_integral(lambda k: blaschke.blaschke_eval(zs, k), c)
        expected = 32 * math.pi + 2 * math.pi / 3
        assert out.total.real == pytest.approx(expected, rel=1e-8)

    def test_blaschke_two_zeros(self):
        zs = blaschke.ZeroSet((1j, 1 + 1j))
        c = traceform.ContourSpec(radius=6.0)
        out = traceform.contour_log_integral(lambda k: blaschke.blaschke_eval(zs, k), c)
        expected = 2 * math.pi * 36 * 2 - (2 * math.pi / 3) * 1
        assert out.total.real == pytest.approx(expected, rel=1e-8)

    def test_randomized_zero_sets(self):
        rng = np.random.default_rng(42)
        for _ in range(5):
            n = rng.integers(1, 6)
            zeros = tuple(
                complex(rng.uniform(-2, 2), rng.uniform(0.05, 2)) for _ in range(n)
            )
            zs = blaschke.ZeroSet(zeros)
            R = 4 * zs.max_modulus
            c = traceform.ContourSpec(radius=R)
            out = traceform.contour_log_integral(
                lambda k: blaschke.blaschke_eval(zs, k), c
            )
            assert out.total.real == pytest.approx(
                traceform.blaschke_side(zs, R), rel=1e-7, abs=1e-9
            )

    def test_zero_on_contour_detected(self):
        z = 2.0 * cmath.exp(1j * math.pi / 3)
        c = traceform.ContourSpec(radius=2.0)
        with pytest.raises(traceform.UnwrapError):
            traceform.contour_log_integral(lambda k: k - z, c)


class TestTraceReport:
    def test_zero_potential(self):
        r = traceform.trace_report(pot.Step(((0.0, 1.0, 0.0),)))
        assert r.lhs == r.rhs == 0.0

    def test_real_well(self):
        spec = pot.Step(((0.0, 1.0, -4.0),))
        r = traceform.trace_report(spec)
        assert r.discrepancy <= 1e-5 * (1 + abs(r.lhs))
        assert r.radius >= 2 * spec.l1()

    def test_complex_well(self):
        spec = pot.Step(((0.0, 1.0, -4.0 * cmath.exp(0.25j * math.pi)),))
        r = traceform.trace_report(spec)
        assert r.discrepancy <= 1e-3 * (1 + abs(r.lhs))

    def test_analytic_ratio_vanishes(self):
        # a/B has no zeros in the upper half-plane, so its log-integral is 0
        spec = pot.Step(((0.0, 1.0, -4.0),))
        ev = jost.make_evaluator(spec)
        sp = spectra.find_spectrum(spec, evaluator=ev)
        zs = blaschke.ZeroSet(tuple(s.k for s in sp))
        R = 2 * spec.l1()

        def ratio(k):
            return ev(k) / blaschke.blaschke_eval(zs, k)

        c = traceform.ContourSpec(radius=R)
        out = traceform.contour_log_integral(ratio, c)
        scale = abs(traceform.blaschke_side(zs, R))
        assert abs(out.total.real) <= 1e-5 * (1 + scale)

    def test_r_independence(self):
        # the identity holds at every radius beyond the zeros
        spec = pot.Step(((0.0, 1.0, -4.0),))
        ev = jost.make_evaluator(spec)
        sp = spectra.find_spectrum(spec, evaluator=ev)
        base_R = 2 * spec.l1()
        for R in (base_R, 1.05 * base_R):
            c = traceform.ContourSpec(radius=R)
            r = traceform.trace_report(spec, spectrum=sp, evaluator=ev, contour=c)
            assert r.discrepancy <= 1e-5 * (1 + abs(r.lhs))

    def test_discrepancy_shrinks_under_refinement(self):
        spec = pot.Step(((0.0, 1.0, -4.0),))
        ev = jost.make_evaluator(spec)
        sp = spectra.find_spectrum(spec, evaluator=ev)
        coarse = traceform.trace_report(
            spec, spectrum=sp, evaluator=ev,
            contour=traceform.ContourSpec(radius=8.0, n_interval=64, n_arc=64),
            rel_tol=1e-3, max_doublings=0,
        )
        fine = traceform.trace_report(
            spec, spectrum=sp, evaluator=ev,
            contour=traceform.ContourSpec(radius=8.0, n_interval=128, n_arc=128),
            rel_tol=1e-3, max_doublings=0,
        )
        assert fine.discrepancy <= coarse.discrepancy

    def test_arc_estimate_bounded_and_stable(self):
        spec = pot.Step(((0.0, 1.0, -4.0),))
        ev = jost.make_evaluator(spec)
        sp = spectra.find_spectrum(spec, evaluator=ev)
        m1 = spec.l1()
        R = 2 * m1
        vals = []
        for n in (160, 320):
            c = traceform.ContourSpec(radius=R, n_interval=n, n_arc=n)
            r = traceform.trace_report(spec, spectrum=sp, evaluator=ev, contour=c)
            vals.append(abs(r.arc_part) / (math.pi * R * R * m1))
        assert np.isfinite(vals[0])
        assert vals[1] == pytest.approx(vals[0], rel=0.1)

    def test_interval_estimate_constant(self):
        spec = pot.Step(((0.0, 1.0, -4.0),))
        p = 0.5
        m = pot.moments(spec, p)
        r = traceform.trace_report(spec)
        ratio = abs(r.interval_part) / (r.radius**2 * m.weighted * m.l1**p)
        assert np.isfinite(ratio)
