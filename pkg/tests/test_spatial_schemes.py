import math

import numpy as np
import pytest

from chasym.spatial_schemes import (GridField, SchemeCoefficients,
                                    ccd_centered_pair, ccd_derivatives,
                                    ccd_gradient_centered,
                                    dispersion_error_functional,
                                    helmholtz_solve, modified_wavenumber)

CF = SchemeCoefficients()

# The zero-derivative closure of the upwind pair leaks an O(1) boundary
# error that decays geometrically (factor ~0.72 per node); interior checks
# therefore stay this many nodes away from each edge.
MARGIN = 110


def field(x0, h, values):
    return GridField(x0, h, np.asarray(values, dtype=float))


def sin_field(h, half_width=30.0):
    n = int(round(2 * half_width / h)) + 1
    x = -half_width + h * np.arange(n)
    return x, field(-half_width, h, np.sin(x))


class TestCoefficients:
    def test_constant_annihilation(self):
        assert abs(CF.c1 + CF.c2 + CF.c3) < 1e-10

    def test_first_moment(self):
        # derivative consistency: -(2 c1 + c2) equals a1 + 1 + a3
        assert (-(2.0 * CF.c1 + CF.c2) / (CF.a1 + 1.0 + CF.a3)
                == pytest.approx(1.0, abs=1e-9))


class TestUpwindPair:
    def test_constant_annihilated(self):
        u = field(0.0, 0.1, np.full(201, 7.0))
        ux, uxx = ccd_derivatives(u, np.ones(201))
        assert np.abs(ux.values).max() < 2e-8
        assert np.abs(uxx.values).max() < 2e-7

    def test_linear_exact_in_interior(self):
        h = 0.1
        n = 401
        x = h * np.arange(n)
        u = field(0.0, h, x)
        ux, uxx = ccd_derivatives(u, np.ones(n))
        sl = slice(MARGIN, n - MARGIN)
        assert np.abs(ux.values[sl] - 1.0).max() < 1e-10
        assert np.abs(uxx.values[sl]).max() < 1e-9

    @pytest.mark.parametrize("signs_value", [1, -1])
    def test_relations_satisfied_by_solution(self, signs_value):
        # independent restatement of the two coupled relations
        rng = np.random.default_rng(3)
        h = 0.2
        n = 64
        u = field(0.0, h, rng.normal(size=n))
        signs = np.full(n, signs_value)
        ux, uxx = ccd_derivatives(u, signs)
        v, dx, dxx = u.values, ux.values, uxx.values
        scale = max(np.abs(dx).max(), np.abs(dxx).max(), 1.0)
        for i in range(2, n - 2):
            if signs_value > 0:
                r1 = (CF.a1 * dx[i - 1] + dx[i] + CF.a3 * dx[i + 1]
                      - (CF.c1 * v[i - 2] + CF.c2 * v[i - 1] + CF.c3 * v[i]) / h
                      + h * (CF.b1 * dxx[i - 1] + CF.b2 * dxx[i] + CF.b3 * dxx[i + 1]))
            else:
                r1 = (CF.a3 * dx[i - 1] + dx[i] + CF.a1 * dx[i + 1]
                      + (CF.c3 * v[i] + CF.c2 * v[i + 1] + CF.c1 * v[i + 2]) / h
                      - h * (CF.b3 * dxx[i - 1] + CF.b2 * dxx[i] + CF.b1 * dxx[i + 1]))
            r2 = (-0.125 * dxx[i - 1] + dxx[i] - 0.125 * dxx[i + 1]
                  - 3.0 * (v[i - 1] - 2.0 * v[i] + v[i + 1]) / h ** 2
                  + 9.0 / (8.0 * h) * (-dx[i - 1] + dx[i + 1]))
            assert abs(r1) < 1e-12 * scale
            assert abs(r2) < 1e-12 * scale

    def test_interior_error_constant_matches_wavenumber_expansion(self):
        # the coupled pair's own leading dispersion coefficient is
        # 1.02681172e-5 (exact rational expansion of the printed constants)
        h = 0.2
        x, u = sin_field(h)
        ux, _ = ccd_derivatives(u, np.ones(u.n))
        sl = slice(MARGIN, u.n - MARGIN)
        err = np.abs(ux.values[sl] - np.cos(x[sl])).max()
        assert err / h ** 6 == pytest.approx(1.02681172e-5, rel=0.08)

    def test_observed_order_at_least_5p8(self):
        errs = {}
        for h in (0.4, 0.2, 0.1):
            x, u = sin_field(h, half_width=60.0)
            ux, _ = ccd_derivatives(u, np.ones(u.n))
            sl = slice(MARGIN, u.n - MARGIN)
            errs[h] = np.abs(ux.values[sl] - np.cos(x[sl])).max()
        order1 = math.log2(errs[0.4] / errs[0.2])
        order2 = math.log2(errs[0.2] / errs[0.1])
        assert order1 >= 5.8
        assert order2 >= 5.8

    def test_mirror_symmetry(self):
        rng = np.random.default_rng(5)
        n = 80
        vals = rng.normal(size=n)
        u = field(0.0, 0.3, vals)
        ur = field(0.0, 0.3, vals[::-1])
        ux, uxx = ccd_derivatives(u, np.ones(n))
        mx, mxx = ccd_derivatives(ur, -np.ones(n))
        assert np.allclose(ux.values, -mx.values[::-1], atol=1e-11)
        assert np.allclose(uxx.values, mxx.values[::-1], atol=1e-11)

    def test_size_guard(self):
        with pytest.raises(ValueError):
            GridField(0.0, 0.1, np.ones(4))
        u = field(0.0, 0.1, np.ones(8))
        with pytest.raises(ValueError):
            ccd_derivatives(u, np.ones(7))


class TestCenteredPair:
    def test_constant(self):
        p = field(0.0, 0.25, np.full(41, 3.0))
        assert np.abs(ccd_gradient_centered(p).values).max() < 1e-12

    def test_quadratic(self):
        h = 0.1
        x = -5.0 + h * np.arange(201)
        p = field(-5.0, h, x ** 2)
        px = ccd_gradient_centered(p)
        assert np.abs(px.values - 2.0 * x).max() < 1e-9

    def test_degree_six_exactness(self):
        h = 0.05
        x = h * np.arange(121)
        p = field(0.0, h, x ** 6)
        px = ccd_gradient_centered(p)
        scale = max(1.0, np.abs(px.values).max())
        assert np.abs(px.values - 6.0 * x ** 5).max() < 1e-8 * scale

    def test_sixth_order_convergence(self):
        errs = {}
        for h in (0.4, 0.2):
            x, u = sin_field(h)
            px = ccd_gradient_centered(u)
            m = u.n // 4
            errs[h] = np.abs(px.values[m:-m] - np.cos(x[m:-m])).max()
        ratio = errs[0.4] / errs[0.2]
        assert abs(ratio / 64.0 - 1.0) < 0.15

    def test_second_derivative(self):
        x, u = sin_field(0.1)
        _, pxx = ccd_centered_pair(u)
        m = u.n // 4
        assert np.abs(pxx.values[m:-m] + np.sin(x[m:-m])).max() < 1e-9


class TestHelmholtz:
    def test_constant_solution(self):
        g = field(0.0, 0.1, np.full(101, 2.5))
        p = helmholtz_solve(g, (2.5, 2.5))
        assert np.abs(p.values - 2.5).max() < 1e-12

    def test_zero(self):
        g = field(0.0, 0.1, np.zeros(101))
        p = helmholtz_solve(g, (0.0, 0.0))
        assert np.abs(p.values).max() == 0.0

    def test_manufactured_sixth_order(self):
        errs = {}
        for h in (0.2, 0.1, 0.05):
            n = int(round(2 * math.pi / h)) + 1
            x = h * np.arange(n)
            g = field(0.0, h, 2.0 * np.sin(x))
            p = helmholtz_solve(g, (math.sin(x[0]), math.sin(x[-1])))
            errs[h] = np.abs(p.values - np.sin(x)).max()
        assert errs[0.2] / errs[0.1] > 2 ** 6 * 0.7
        assert errs[0.1] / errs[0.05] > 2 ** 5
        assert errs[0.05] < 1e-11

    def test_linear_in_data(self):
        rng = np.random.default_rng(9)
        g1 = rng.normal(size=61)
        g2 = rng.normal(size=61)
        h = 0.15
        pa = helmholtz_solve(field(0.0, h, g1), (0.3, -0.2)).values
        pb = helmholtz_solve(field(0.0, h, g2), (-1.0, 0.5)).values
        pc = helmholtz_solve(field(0.0, h, 2.0 * g1 + 3.0 * g2),
                             (2 * 0.3 + 3 * -1.0, 2 * -0.2 + 3 * 0.5)).values
        assert np.allclose(pc, 2.0 * pa + 3.0 * pb, atol=1e-11)


class TestWavenumber:
    def test_zero_mode(self):
        wk = modified_wavenumber(0.0)
        assert wk.alpha_prime_h == 0.0

    def test_small_wavenumber_consistency(self):
        wk = modified_wavenumber(0.1)
        assert abs(wk.alpha_prime_h.real - 0.1) < 1e-7

    def test_half_pi(self):
        wk = modified_wavenumber(math.pi / 2.0)
        assert abs(wk.alpha_prime_h.real - math.pi / 2.0) < 0.01

    def test_domain(self):
        with pytest.raises(ValueError):
            modified_wavenumber(-0.1)
        with pytest.raises(ValueError):
            modified_wavenumber(3.5)

    def test_leading_dispersion_coefficient(self):
        # (theta - Re a'h)/theta^7 approaches 1.02681172e-5 from the exact
        # series of the printed constants
        th = 0.05
        gap = th - modified_wavenumber(th).alpha_prime_h.real
        assert gap / th ** 7 == pytest.approx(1.02681172e-5, rel=1e-3)


class TestDispersionFunctional:
    def test_zero_weight_gives_zero(self):
        assert dispersion_error_functional(CF, 64, weight=lambda th: 0.0) == 0.0

    def test_positive_and_anchored(self):
        e = dispersion_error_functional(CF, 512)
        assert e > 0.0
        assert e == pytest.approx(2.62685971e-4, rel=1e-4)

    def test_near_stationary_in_c3(self):
        # re-impose constant annihilation + first moment on (c1, c2)
        def with_c3(c3):
            c1 = c3 - (CF.a1 + 1.0 + CF.a3)
            return SchemeCoefficients(a1=CF.a1, a3=CF.a3, b1=CF.b1, b2=CF.b2,
                                      b3=CF.b3, c1=c1, c2=-c3 - c1, c3=c3)

        e0 = dispersion_error_functional(CF, 512)
        assert dispersion_error_functional(with_c3(CF.c3 + 1e-3), 512) >= e0
        assert dispersion_error_functional(with_c3(CF.c3 - 1e-3), 512) >= e0

    def test_sample_floor(self):
        with pytest.raises(ValueError):
            dispersion_error_functional(CF, 8)
