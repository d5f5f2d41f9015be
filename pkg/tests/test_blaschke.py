import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jostlab import blaschke


def zero_sets(min_size=1, max_size=8):
    zs = st.complex_numbers(
        min_magnitude=0.05, max_magnitude=2.0, allow_nan=False, allow_infinity=False
    ).filter(lambda z: z.imag > 0.01)
    return st.lists(zs, min_size=min_size, max_size=max_size).map(
        lambda lst: blaschke.ZeroSet(tuple(lst))
    )


class TestZeroSet:
    def test_rejects_lower_half_plane(self):
        with pytest.raises(ValueError):
            blaschke.ZeroSet((1j, 1 - 1j))

    def test_rejects_real_zero(self):
        with pytest.raises(ValueError):
            blaschke.ZeroSet((2.0 + 0j,))

    def test_sorted_by_modulus(self):
        zs = blaschke.ZeroSet((2j, 0.5j, 1 + 1j))
        assert [abs(z) for z in zs.zeros] == sorted(abs(z) for z in zs.zeros)

    def test_max_modulus(self):
        zs = blaschke.ZeroSet((0.5j, 1 + 1j))
        assert zs.max_modulus == pytest.approx(math.sqrt(2))


class TestPowerSums:
    def test_single_i(self):
        s = blaschke.power_sums(blaschke.ZeroSet((1j,)))
        assert (s.s1, s.s2, s.s3) == (1.0, 0.0, -1.0)

    def test_single_one_plus_i(self):
        s = blaschke.power_sums(blaschke.ZeroSet((1 + 1j,)))
        assert (s.s1, s.s2, s.s3) == (1.0, 2.0, 2.0)

    def test_additivity(self):
        s = blaschke.power_sums(blaschke.ZeroSet((1j, 1 + 1j)))
        assert (s.s1, s.s2, s.s3) == (2.0, 2.0, 1.0)


class TestEval:
    def test_zero_at_zero(self):
        zs = blaschke.ZeroSet((1j,))
        assert blaschke.blaschke_eval(zs, 1j) == 0

    def test_value_at_origin(self):
        # (0 - i)/(0 + i) * i/|i| = -i
        zs = blaschke.ZeroSet((1j,))
        assert blaschke.blaschke_eval(zs, 0.0) == pytest.approx(-1j)

    def test_two_zero_product(self):
        zs = blaschke.ZeroSet((1j, 1 + 1j))
        k = 5.0 + 0j
        expected = ((k - 1j) / (k + 1j)) * 1j
        z = 1 + 1j
        expected *= (k - z) / (k - z.conjugate()) * (z / abs(z))
        assert blaschke.blaschke_eval(zs, k) == pytest.approx(expected, rel=1e-14)
        assert abs(blaschke.blaschke_eval(zs, k)) == pytest.approx(1.0, abs=1e-12)

    def test_pole_rejected(self):
        zs = blaschke.ZeroSet((1j,))
        with pytest.raises(ValueError):
            blaschke.blaschke_eval(zs, -1j)


@settings(max_examples=200, deadline=None)
@given(zero_sets(), st.floats(-50, 50).filter(lambda t: abs(t) > 1e-3))
def test_unimodular_on_real_axis(zs, t):
    assert abs(blaschke.blaschke_eval(zs, t)) == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    zero_sets(),
    st.complex_numbers(min_magnitude=1e-3, max_magnitude=30, allow_nan=False).filter(
        lambda z: z.imag > 1e-6
    ),
)
def test_contractive_in_upper_half_plane(zs, k):
    assert abs(blaschke.blaschke_eval(zs, k)) <= 1 + 1e-10


class TestLogBlaschke:
    def test_matches_product_modulus(self):
        zs = blaschke.ZeroSet((0.3 + 0.7j, 1.2j, -1 + 0.4j))
        for k in (3.0 + 1j, -2 + 2j, 5j):
            lg = blaschke.log_blaschke(zs, k)
            assert math.exp(lg.real) == pytest.approx(
                abs(blaschke.blaschke_eval(zs, k)), rel=1e-12
            )

    def test_exp_recovers_product(self):
        zs = blaschke.ZeroSet((1j, 1 + 1j))
        k = 4 + 3j
        assert cmath.exp(blaschke.log_blaschke(zs, k)) == pytest.approx(
            blaschke.blaschke_eval(zs, k), rel=1e-12
        )


class TestExpansion:
    def test_expansion_accuracy_at_4x(self):
        zs = blaschke.ZeroSet((0.5j, 1 + 1j, -0.7 + 0.3j))
        r = 4 * zs.max_modulus
        for th in np.linspace(0.3, math.pi - 0.3, 7):
            k = r * cmath.exp(1j * th)
            err = abs(blaschke.log_blaschke(zs, k) - blaschke.expansion(zs, k))
            assert err <= blaschke.expansion_remainder_bound(zs, k)

    def test_remainder_slope(self):
        # |log B - truncation| should decay like |k|^{-4}
        zs = blaschke.ZeroSet((0.5j, 1 + 1j))
        radii = zs.max_modulus * np.geomspace(6, 200, 12)
        errs = []
        for r in radii:
            k = r * cmath.exp(1j * math.pi / 3)
            errs.append(abs(blaschke.log_blaschke(zs, k) - blaschke.expansion(zs, k)))
        slope = np.polyfit(np.log(radii), np.log(errs), 1)[0]
        assert slope <= -4 + 0.1

    def test_winding_counts_zeros(self):
        # closed-loop argument change of B around a box equals 2 pi (count)
        zs = blaschke.ZeroSet((0.5j, 1 + 1j))
        corners = [-2 - 0j + 0.1j, 2 + 0.1j, 2 + 2j, -2 + 2j]
        total = 0.0
        n = 4000
        pts = []
        for a, b in zip(corners, corners[1:] + corners[:1]):
            pts.extend(a + (b - a) * t for t in np.linspace(0, 1, n, endpoint=False))
        vals = [blaschke.blaschke_eval(zs, p) for p in pts]
        vals.append(vals[0])
        for va, vb in zip(vals, vals[1:]):
            total += cmath.phase(vb / va)
        assert total / (2 * math.pi) == pytest.approx(2.0, abs=1e-6)
