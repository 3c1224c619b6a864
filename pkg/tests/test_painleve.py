import math

import numpy as np
import pytest
from scipy import integrate as scipy_integrate
from scipy import special

from chasym.painleve import (PiiFamily, boundary_values, collocation_residual,
                             connection_params, evaluate, solve_bvp,
                             write_solution_csv)


def shooting_oracle(r, s_start=8.0, s_stop=-6.0):
    """Independent shooting reference: integrate backward from v = r Ai."""
    ai, aip, _, _ = special.airy(s_start)
    sol = scipy_integrate.solve_ivp(
        lambda s, y: [y[1], 2.0 * y[0] ** 3 + s * y[0]],
        [s_start, s_stop], [r * ai, r * aip], method="DOP853",
        rtol=1e-12, atol=1e-14, dense_output=True)
    return sol.sol


@pytest.fixture(scope="module")
def hm():
    return solve_bvp(PiiFamily.HASTINGS_MCLEOD, 1.0)


@pytest.fixture(scope="module")
def ablowitz():
    r = 1.0 / math.sqrt(13.0)
    with pytest.warns(UserWarning, match="resonant"):
        # [-12, 8] is a resonant truncation interval at this r; the solver
        # steps the left end outward and says so
        return solve_bvp(PiiFamily.ABLOWITZ_SEGUR, r)


class TestConnectionParams:
    def test_d_squared_at_sqrt13(self):
        cp = connection_params(1.0 / math.sqrt(13.0))
        assert cp.d ** 2 == pytest.approx(math.log(13.0 / 12.0) / math.pi,
                                          abs=1e-12)

    def test_theta0_matches_gamma_oracle(self):
        cp = connection_params(1.0 / math.sqrt(13.0))
        d2 = cp.d ** 2
        arg = complex(special.loggamma(complex(1.0, -0.5 * d2))).imag
        ref = 1.5 * d2 * math.log(2.0) + arg - 0.25 * math.pi
        assert cp.theta0 == pytest.approx(ref, abs=1e-12)
        assert cp.theta0 == pytest.approx(-0.7515553239214611, abs=1e-12)

    def test_small_r_limit(self):
        cp = connection_params(1e-8)
        assert cp.d < 1e-7
        assert cp.theta0 == pytest.approx(-0.25 * math.pi, abs=1e-8)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -1.0, 1.3])
    def test_domain(self, bad):
        with pytest.raises(ValueError):
            connection_params(bad)


class TestBoundaryValues:
    def test_hastings_mcleod(self):
        v_l, v_r = boundary_values(PiiFamily.HASTINGS_MCLEOD, 1.0, -12.0, 8.0)
        assert v_l == pytest.approx(math.sqrt(6.0), abs=1e-14)
        assert v_r == pytest.approx(special.airy(8.0)[0], abs=1e-16)

    def test_ablowitz_segur_right(self):
        r = 1.0 / math.sqrt(13.0)
        _, v_r = boundary_values(PiiFamily.ABLOWITZ_SEGUR, r, -12.0, 8.0)
        assert v_r == pytest.approx(special.airy(8.0)[0] / math.sqrt(13.0),
                                    rel=1e-10)

    def test_ablowitz_segur_left_tracks_true_solution(self):
        # cross-check of B_- against long-range integration of the equation
        r = 1.0 / math.sqrt(13.0)
        v_l, _ = boundary_values(PiiFamily.ABLOWITZ_SEGUR, r, -12.0, 8.0)
        ref = shooting_oracle(r, s_stop=-12.5)(-12.0)[0]
        assert v_l == pytest.approx(ref, abs=5e-4)

    def test_interval_orientation(self):
        with pytest.raises(ValueError):
            boundary_values(PiiFamily.HASTINGS_MCLEOD, 1.0, 1.0, 8.0)
        with pytest.raises(ValueError):
            boundary_values(PiiFamily.HASTINGS_MCLEOD, 1.0, -8.0, -1.0)


class TestHastingsMcleod:
    def test_value_at_zero_vs_shooting(self, hm):
        v0, _ = evaluate(hm, 0.0)
        ref = shooting_oracle(1.0, s_stop=-1.0)(0.0)[0]
        assert v0 == pytest.approx(ref, abs=1e-6)
        assert v0 == pytest.approx(0.3670615515, abs=2e-9)

    def test_residual_invariant(self, hm):
        assert collocation_residual(hm) < 1e-8

    def test_left_asymptote(self, hm):
        v, _ = evaluate(hm, -10.0)
        assert abs(v / math.sqrt(5.0) - 1.0) < 0.02

    def test_positive(self, hm):
        assert hm.v.min() >= -1e-8

    def test_interval_enlargement_stable(self, hm):
        big = solve_bvp(PiiFamily.HASTINGS_MCLEOD, 1.0, s_L=-16.0, s_R=10.0,
                        n=2601)
        assert abs(evaluate(big, 0.0)[0] - evaluate(hm, 0.0)[0]) < 1e-6

    def test_error_estimate_recorded(self, hm):
        assert 0.0 <= hm.error_estimate < 1e-6


class TestAblowitzSegur:
    def test_residual_invariant(self, ablowitz):
        assert collocation_residual(ablowitz) < 1e-8

    def test_matches_true_solution_to_truncation_level(self, ablowitz):
        # the truncated problem departs from the whole-line solution at the
        # level of the B_- boundary error (~2e-4), not better
        r = 1.0 / math.sqrt(13.0)
        ref = shooting_oracle(r, s_stop=-1.0)(0.0)
        v0, vp0 = evaluate(ablowitz, 0.0)
        assert v0 == pytest.approx(ref[0], abs=1e-3)
        assert vp0 == pytest.approx(ref[1], abs=1e-3)

    def test_zero_reflection_gives_zero(self):
        sol = solve_bvp(PiiFamily.ABLOWITZ_SEGUR, 1e-12, n=401)
        assert np.abs(sol.v).max() < 1e-10

    def test_boundary_match(self, ablowitz):
        params = connection_params(ablowitz.r)
        s_l = ablowitz.s_left
        expected = (params.d * abs(s_l) ** -0.25
                    * math.sin(2.0 / 3.0 * abs(s_l) ** 1.5
                               - 0.75 * params.d ** 2 * math.log(abs(s_l))
                               - params.theta0))
        assert ablowitz.v[0] == pytest.approx(expected, abs=1e-12)


class TestEvaluate:
    def test_nodes_exact(self, hm):
        j = len(hm.s_grid) // 3
        v, vp = evaluate(hm, float(hm.s_grid[j]))
        assert v == hm.v[j]
        assert vp == hm.v_prime[j]

    def test_midpoint_consistency(self, hm):
        # compare quintic interpolation against a solve with a node there
        s_mid = float(0.5 * (hm.s_grid[1000] + hm.s_grid[1001]))
        v_int, _ = evaluate(hm, s_mid)
        dense = solve_bvp(PiiFamily.HASTINGS_MCLEOD, 1.0, n=4001)
        v_ref, _ = evaluate(dense, s_mid)
        assert v_int == pytest.approx(v_ref, abs=1e-6)

    def test_zero_solution_midpoints(self):
        sol = solve_bvp(PiiFamily.ABLOWITZ_SEGUR, 1e-12, n=401)
        v, vp = evaluate(sol, 0.123)
        assert abs(v) < 1e-10 and abs(vp) < 1e-9

    def test_range_guard(self, hm):
        with pytest.raises(ValueError):
            evaluate(hm, hm.s_right + 0.1)
        with pytest.raises(ValueError):
            evaluate(hm, hm.s_left - 0.1)

    def test_min_nodes(self):
        with pytest.raises(ValueError):
            solve_bvp(PiiFamily.HASTINGS_MCLEOD, 1.0, n=100)


def test_csv_dump(tmp_path, hm):
    path = tmp_path / "pii.csv"
    write_solution_csv(hm, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "s,v,vp"
    assert len(lines) == len(hm.s_grid) + 1
    first = [float(tok) for tok in lines[1].split(",")]
    assert first[0] == hm.s_grid[0]
