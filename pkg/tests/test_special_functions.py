import math

import numpy as np
import pytest
from scipy import special

from chasym.special_functions import (EULER_GAMMA, QuadratureError,
                                      QuadratureSpec, airy_ai, arg_gamma_imag,
                                      integrate, integrate_pv)


class TestAiry:
    def test_value_at_zero(self):
        # Maclaurin oracle: Ai(0) = 3^(-2/3)/Gamma(2/3)
        ai, aip = airy_ai(0.0)
        assert ai == pytest.approx(0.3550280538878172, abs=1e-12)
        assert aip == pytest.approx(-0.2588194037928068, abs=1e-12)

    def test_matches_leading_asymptotic_at_8(self):
        ai, _ = airy_ai(8.0)
        lead = 1.0 / (2.0 * math.sqrt(math.pi)) * 8.0 ** -0.25 \
            * math.exp(-2.0 / 3.0 * 8.0 ** 1.5)
        assert abs(ai / lead - 1.0) < 0.01

    def test_superexponential_decay(self):
        assert airy_ai(12.0)[0] < 1e-10

    def test_window_enforced(self):
        with pytest.raises(ValueError):
            airy_ai(12.5)
        with pytest.raises(ValueError):
            airy_ai(-20.5)

    def test_accuracy_against_scipy_across_window(self):
        s = np.linspace(-20.0, 12.0, 1601)
        for si in s:
            ai, aip = airy_ai(float(si))
            ref, refp, _, _ = special.airy(float(si))
            assert abs(ai - ref) <= 1e-10 * max(1.0, abs(ref))
            assert abs(aip - refp) <= 1e-10 * max(1.0, abs(refp))

    def test_airy_equation_residual(self):
        # Richardson-extrapolated second difference keeps the probe error
        # below the 1e-8 budget
        d = 4e-4
        for s in np.linspace(-6.0, 6.0, 121):
            s = float(s)
            v = airy_ai(s)[0]

            def second(dd):
                return (airy_ai(s - dd)[0] - 2.0 * v + airy_ai(s + dd)[0]) / dd ** 2

            vpp = (4.0 * second(d / 2) - second(d)) / 3.0
            assert abs(vpp - s * v) < 1e-8


class TestArgGammaImag:
    def test_at_zero(self):
        assert arg_gamma_imag(0.0) == pytest.approx(-0.5 * math.pi, abs=1e-15)

    def test_against_complex_gamma_oracle(self):
        # oracle: scipy loggamma on the imaginary axis; the modulus identity
        # |Gamma(i nu)|^2 = pi/(nu sinh(pi nu)) pins the same branch
        for nu in (0.11497, 0.0254, 0.5, 1.0, -0.25, 2.0):
            ref = complex(special.loggamma(complex(0.0, nu))).imag
            assert arg_gamma_imag(nu) == pytest.approx(ref, abs=1e-12)

    def test_frozen_value_near_slope_one(self):
        assert arg_gamma_imag(0.11497) == pytest.approx(-1.6365540237812737,
                                                        abs=1e-12)

    def test_euler_constant(self):
        assert EULER_GAMMA == pytest.approx(0.5772156649, abs=1e-10)

    def test_odd_plus_offset(self):
        for nu in np.linspace(0.05, 3.0, 17):
            total = arg_gamma_imag(float(nu)) + arg_gamma_imag(float(-nu))
            assert total == pytest.approx(-math.pi, abs=1e-12)


class TestIntegrate:
    def test_endpoint_log(self):
        spec = QuadratureSpec(singularity_points=(0.0,))
        assert integrate(math.log, 0.0, 1.0, spec) == pytest.approx(-1.0, abs=1e-10)

    def test_reflection_log_kernel(self):
        # frozen from an independent QUADPACK evaluation with interior split
        q0, k0 = 0.5, 0.2429
        f = lambda x: math.log(4 * x * x / (q0 * q0 + 4 * x * x)) / (1 + 4 * x * x)
        spec = QuadratureSpec(singularity_points=(0.0,))
        assert integrate(f, -k0, k0, spec) == pytest.approx(-1.0821319865608163,
                                                            abs=1e-9)

    def test_lorentzian_over_line(self):
        val = integrate(lambda x: 1.0 / (1.0 + x * x), -math.inf, math.inf)
        assert val == pytest.approx(math.pi, abs=1e-10)

    def test_linearity(self):
        f = lambda x: math.exp(-x * x)
        g = lambda x: 1.0 / (1.0 + x * x)
        both = integrate(lambda x: 2.5 * f(x) - 1.5 * g(x), 0.0, 3.0)
        parts = 2.5 * integrate(f, 0.0, 3.0) - 1.5 * integrate(g, 0.0, 3.0)
        assert both == pytest.approx(parts, abs=5e-10)

    def test_budget_exhaustion_carries_estimate(self):
        spec = QuadratureSpec(rel_tol=1e-14, abs_tol=1e-16, max_subdivisions=2)
        with pytest.raises(QuadratureError) as err:
            integrate(lambda x: math.log(abs(math.sin(20 * x)) + 1e-14), 0.0, 3.0,
                      spec)
        assert math.isfinite(err.value.estimate)
        assert err.value.error_bound > 0.0

    def test_requires_ordered_interval(self):
        with pytest.raises(ValueError):
            integrate(math.sin, 1.0, -1.0)


class TestIntegratePV:
    def test_odd_pole(self):
        assert integrate_pv(lambda x: 1.0 / x, 0.0, -1.0, 1.0) == pytest.approx(
            0.0, abs=1e-12)

    def test_log_over_pole(self):
        # pairing gives (1/xi) log((k0-xi)/(k0+xi)); the integral equals
        # -pi^2/4 for every k0 (series oracle)
        k0 = 0.2429
        f = lambda x: math.log((k0 - x) / k0) / x
        spec = QuadratureSpec(singularity_points=(k0,))
        assert integrate_pv(f, 0.0, -k0, k0, spec) == pytest.approx(
            -math.pi ** 2 / 4.0, abs=1e-9)

    def test_exponential_over_pole(self):
        # term-wise series oracle: 2 * sum_{odd n} 1/(n n!)
        ref = sum(2.0 / (n * math.factorial(n)) for n in range(1, 25, 2))
        val = integrate_pv(lambda x: math.exp(x) / x, 0.0, -1.0, 1.0)
        assert val == pytest.approx(ref, abs=1e-11)

    def test_asymmetric_window_remainder(self):
        # pole at 0 inside (-1, 2): pairing on (-1, 1) plus remainder (1, 2)
        val = integrate_pv(lambda x: 1.0 / x, 0.0, -1.0, 2.0)
        assert val == pytest.approx(math.log(2.0), abs=1e-10)

    def test_center_must_be_interior(self):
        with pytest.raises(ValueError):
            integrate_pv(lambda x: 1.0 / x, 2.0, -1.0, 1.0)
