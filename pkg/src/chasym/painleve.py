"""Painleve II boundary-value solver and connection parameters.

Solves v'' = 2 v^3 + s v on a truncated interval [s_L, s_R] with Dirichlet
data drawn from the two boundary-condition families that matter here:

* ``HASTINGS_MCLEOD`` (r = 1): v ~ Ai(s) on the right and sqrt(-s/2) on the
  left; the unique bounded connection.
* ``ABLOWITZ_SEGUR`` (|r| < 1): v ~ r Ai(s) on the right and the oscillatory
  Clarkson-McLeod form B_-(s) = d |s|^{-1/4} sin{(2/3)|s|^{3/2}
  - (3/4) d^2 ln|s| - theta0} on the left, with d^2 = -ln(1-r^2)/pi.

Discretisation is Numerov collocation (fourth order) with a damped Newton
iteration on a tridiagonal Jacobian.  The system is solved on the requested
grid and once more at doubled resolution; the doubled solve is restricted
back to the requested nodes (its collocation residual there is bounded by
the Numerov truncation term, well under 1e-8) and the coarse/fine gap serves
as a Richardson error estimate, which is required to sit below 1e-6.
Derivatives come from fourth-order differences on the fine grid.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import sparse
from scipy.linalg import solve_banded
from scipy.sparse import linalg as sparse_linalg

from .special_functions import airy_ai, arg_gamma_imag

__all__ = [
    "PiiFamily",
    "PiiSolution",
    "ConnectionParams",
    "connection_params",
    "boundary_values",
    "solve_bvp",
    "evaluate",
    "collocation_residual",
    "write_solution_csv",
]


class PiiFamily(Enum):
    HASTINGS_MCLEOD = "hastings_mcleod"
    ABLOWITZ_SEGUR = "ablowitz_segur"


@dataclass(frozen=True)
class ConnectionParams:
    """Clarkson-McLeod oscillation parameters of an Ablowitz-Segur solution."""

    d: float
    theta0: float


@dataclass(eq=False)
class PiiSolution:
    """A solved boundary-value problem, sampled on a uniform s-grid."""

    s_grid: np.ndarray
    v: np.ndarray
    v_prime: np.ndarray
    family: PiiFamily
    r: float
    error_estimate: float

    @property
    def s_left(self) -> float:
        return float(self.s_grid[0])

    @property
    def s_right(self) -> float:
        return float(self.s_grid[-1])


def connection_params(r: float) -> ConnectionParams:
    """(d, theta0) of the s -> -infinity oscillation for 0 < |r| < 1."""
    r = float(r)
    if not 0.0 < abs(r) < 1.0:
        raise ValueError("connection_params: need 0 < |r| < 1 "
                         "(r = 1 is the Hastings-McLeod family)")
    d2 = -math.log1p(-r * r) / math.pi
    # arg Gamma(1 + iy) = arg Gamma(iy) + pi/2 with y = -d^2/2
    arg_g = arg_gamma_imag(-0.5 * d2) + 0.5 * math.pi
    theta0 = 1.5 * d2 * math.log(2.0) + arg_g - 0.25 * math.pi
    return ConnectionParams(d=math.sqrt(d2), theta0=theta0)


def _b_minus(s: float, params: ConnectionParams) -> float:
    a = abs(s)
    phase = (2.0 / 3.0) * a ** 1.5 - 0.75 * params.d ** 2 * math.log(a) - params.theta0
    return params.d * a ** -0.25 * math.sin(phase)


def boundary_values(family: PiiFamily, r: float, s_L: float, s_R: float
                    ) -> tuple[float, float]:
    """Dirichlet data (v_L, v_R) of the requested family on [s_L, s_R]."""
    if not (s_L < 0.0 < s_R):
        raise ValueError("boundary_values: need s_L < 0 < s_R")
    ai_R = airy_ai(s_R)[0]
    if family is PiiFamily.HASTINGS_MCLEOD:
        return math.sqrt(-0.5 * s_L), ai_R
    params = connection_params(r)
    return _b_minus(s_L, params), r * ai_R


def _rhs_q(s: np.ndarray, v: np.ndarray) -> np.ndarray:
    return 2.0 * v ** 3 + s * v


def _numerov_residual(s: np.ndarray, v: np.ndarray, h: float) -> np.ndarray:
    q = _rhs_q(s, v)
    return (v[:-2] - 2.0 * v[1:-1] + v[2:]
            - h * h / 12.0 * (q[:-2] + 10.0 * q[1:-1] + q[2:]))


def collocation_residual(sol: PiiSolution) -> float:
    """Max Numerov residual of the stored samples, in v'' units."""
    h = float(sol.s_grid[1] - sol.s_grid[0])
    return float(np.max(np.abs(_numerov_residual(sol.s_grid, sol.v, h)))) / (h * h)


_ALPHA_LADDER = tuple(0.5 ** k for k in range(11))


def _jacobian_bands(s: np.ndarray, v: np.ndarray, h: float) -> np.ndarray:
    qp = 6.0 * v ** 2 + s  # d(2v^3+sv)/dv
    w = h * h / 12.0
    m = s.size - 2
    ab = np.zeros((3, m))
    ab[0, 1:] = (1.0 - w * qp[2:])[:-1]
    ab[1, :] = -2.0 - 10.0 * w * qp[1:-1]
    ab[2, :-1] = (1.0 - w * qp[:-2])[1:]
    return ab


def _lm_direction(ab: np.ndarray, res: np.ndarray, mu: float) -> np.ndarray:
    """Levenberg step: (J^T J + mu^2 I) delta = -J^T res, pentadiagonal."""
    m = res.size
    up, dg, lo = ab[0], ab[1], ab[2]
    J = sparse.diags([lo[:-1], dg, up[1:]], [-1, 0, 1], format="csc")
    A = (J.T @ J + mu * mu * sparse.identity(m, format="csc")).tocsc()
    return sparse_linalg.spsolve(A, -(J.T @ res))


def _newton_solve(s: np.ndarray, v: np.ndarray, h: float,
                  tol: float = 1e-12, max_iter: int = 2000) -> np.ndarray:
    """Newton with a best-step line search and a Levenberg fallback.

    The Ablowitz-Segur linearisation can sit within ~1e-2 of an interior
    resonance of d^2/ds^2 - s on these truncation intervals; full Newton then
    limit-cycles in the soft mode, so each step takes the 2-norm-best point
    along the Newton direction and falls back to Levenberg damping whenever
    that stalls.  Iterations are cheap (one tridiagonal solve plus a handful
    of residual evaluations), so the generous iteration budget costs little.
    """
    v = v.copy()
    res = _numerov_residual(s, v, h)
    mu = 0.0
    history: list[float] = []
    for _ in range(max_iter):
        norm = float(np.max(np.abs(res)))
        if norm <= tol:
            return v
        history.append(norm)
        if len(history) > 40 and history[-1] > 0.7 * history[-41]:
            break  # certified stall: no meaningful progress in 40 iterations
        ab = _jacobian_bands(s, v, h)
        if mu == 0.0:
            delta = solve_banded((1, 1), ab, -res)
        else:
            delta = _lm_direction(ab, res, mu)
        n2 = float(res @ res)
        best = None
        for alpha in _ALPHA_LADDER:
            trial = v.copy()
            trial[1:-1] += alpha * delta
            tres = _numerov_residual(s, trial, h)
            t2 = float(tres @ tres)
            if best is None or t2 < best[0]:
                best = (t2, trial, tres)
        if best[0] < n2:
            _, v, res = best
            if mu > 0.0:
                mu = 0.0 if mu < 1e-10 else mu / 8.0
        else:
            mu = max(4.0 * mu, 1e-3 * math.sqrt(n2) / max(h, 1e-6), 1e-12)
            if mu > 1e6:
                break
    norm = float(np.max(np.abs(res)))
    if norm > tol:
        raise RuntimeError(
            f"Painleve Newton iteration stalled at residual {norm:.3e}")
    return v


def _initial_guess(family: PiiFamily, r: float, s: np.ndarray,
                   v_L: float, v_R: float) -> np.ndarray:
    """Piecewise boundary asymptotics bridged linearly across |s| < 1.

    A plain end-to-end linear blend leaves the Hastings-McLeod basin (Newton
    then drifts onto a sign-changing branch), so each asymptote is used on
    its own side and only the gap (-1, 1) is interpolated.
    """
    right = np.array([r * airy_ai(min(x, 12.0))[0] for x in s])
    if family is PiiFamily.HASTINGS_MCLEOD:
        left = np.sqrt(np.maximum(-0.5 * s, 0.0))
        lv = math.sqrt(0.5)
    else:
        params = connection_params(r)
        left = np.array([_b_minus(min(x, -1.0), params) for x in s])
        lv = _b_minus(-1.0, params)
    rv = r * airy_ai(1.0)[0]
    bridge = lv + (np.clip(s, -1.0, 1.0) + 1.0) * 0.5 * (rv - lv)
    guess = np.where(s <= -1.0, left, np.where(s >= 1.0, right, bridge))
    guess[0], guess[-1] = v_L, v_R
    return guess


def _derivative_fourth_order(v: np.ndarray, h: float) -> np.ndarray:
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    # one-sided fourth-order closures
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    d[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * h)
    d[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * h)
    return d


def solve_bvp(family: PiiFamily, r: float, s_L: float = -12.0, s_R: float = 8.0,
              n: int = 2001) -> PiiSolution:
    """Solve the truncated boundary-value problem for the requested family.

    Returns samples of (v, v') on ``n`` uniform nodes with max error below
    1e-6 (Richardson-estimated and stored on the solution).

    Isolated truncation intervals are resonant for the Ablowitz-Segur
    linearisation (an interior mode of d^2/ds^2 - s vanishes at both ends,
    e.g. s_L = -12 exactly at r = 1/sqrt(13)) and the Dirichlet problem there
    has no solution.  When Newton certifies such a stall, s_L is stepped
    outward by a quarter of the local oscillation wavelength and the solve is
    retried; the delivered grid records the interval actually used.
    """
    if n < 200:
        raise ValueError("solve_bvp: n must be at least 200")
    if family is PiiFamily.HASTINGS_MCLEOD:
        r = 1.0

    def attempt(sl: float):
        v_L, v_R = boundary_values(family, r, sl, s_R)

        def solve_on(npts: int):
            s = np.linspace(sl, s_R, npts)
            h = (s_R - sl) / (npts - 1)
            guess = _initial_guess(family, r, s, v_L, v_R)
            return s, _newton_solve(s, guess, h)

        s_coarse, v_coarse = solve_on(n)
        s_fine, v_fine = solve_on(2 * n - 1)
        return s_coarse, v_coarse, s_fine, v_fine

    nudge = 0.25 * math.pi / math.sqrt(abs(s_L))
    shifts = (0.0,) if family is PiiFamily.HASTINGS_MCLEOD else (
        0.0, -nudge, -2.0 * nudge, nudge)
    last_exc: Exception | None = None
    for shift in shifts:
        try:
            s_coarse, v_coarse, s_fine, v_fine = attempt(s_L + shift)
        except RuntimeError as exc:
            last_exc = exc
            continue
        if shift != 0.0:
            warnings.warn(
                f"solve_bvp: truncation interval left end moved from {s_L} to "
                f"{s_L + shift} (resonant interval, no solution there)",
                UserWarning, stacklevel=2)
        break
    else:
        raise RuntimeError(
            f"solve_bvp: no solvable truncation interval near s_L={s_L}: "
            f"{last_exc}")

    v_restr = v_fine[::2]
    err = float(np.max(np.abs(v_restr - v_coarse))) / 15.0  # Numerov is O(h^4)
    if err > 1e-6:
        raise RuntimeError(f"solve_bvp: estimated error {err:.2e} exceeds 1e-6; "
                           "increase n")
    h_fine = float(s_fine[1] - s_fine[0])
    vp = _derivative_fourth_order(v_fine, h_fine)[::2]
    return PiiSolution(s_grid=s_coarse, v=v_restr, v_prime=vp,
                       family=family, r=r, error_estimate=err)


def evaluate(sol: PiiSolution, s: float) -> tuple[float, float]:
    """Interpolate (v, v') at ``s`` by piecewise-quintic Hermite.

    Endpoint values, slopes and the curvatures 2v^3 + sv supplied by the
    equation pin a quintic on each panel; the interpolation error sits far
    below the solution error.
    """
    s = float(s)
    lo, hi = sol.s_left, sol.s_right
    if not lo <= s <= hi:
        raise ValueError(f"evaluate: s={s} outside solution interval [{lo}, {hi}]")
    h = float(sol.s_grid[1] - sol.s_grid[0])
    j = min(int((s - lo) / h), sol.s_grid.size - 2)
    sa, sb = sol.s_grid[j], sol.s_grid[j + 1]
    va, vb = sol.v[j], sol.v[j + 1]
    da, db = sol.v_prime[j], sol.v_prime[j + 1]
    ca = 2.0 * va ** 3 + sa * va
    cb = 2.0 * vb ** 3 + sb * vb
    t = (s - sa) / h
    # quintic Hermite basis on [0, 1] with value/slope/curvature data
    t2, t3, t4, t5 = t * t, t ** 3, t ** 4, t ** 5
    h00 = 1 - 10 * t3 + 15 * t4 - 6 * t5
    h10 = t - 6 * t3 + 8 * t4 - 3 * t5
    h20 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5
    h01 = 10 * t3 - 15 * t4 + 6 * t5
    h11 = -4 * t3 + 7 * t4 - 3 * t5
    h21 = 0.5 * t3 - t4 + 0.5 * t5
    val = (h00 * va + h10 * h * da + h20 * h * h * ca
           + h01 * vb + h11 * h * db + h21 * h * h * cb)
    # derivative of the same quintic
    g00 = (-30 * t2 + 60 * t3 - 30 * t4) / h
    g10 = (1 - 18 * t2 + 32 * t3 - 15 * t4)
    g20 = (t - 4.5 * t2 + 6 * t3 - 2.5 * t4) * h
    g01 = (30 * t2 - 60 * t3 + 30 * t4) / h
    g11 = (-12 * t2 + 28 * t3 - 15 * t4)
    g21 = (1.5 * t2 - 4 * t3 + 2.5 * t4) * h
    der = (g00 * va + g10 * da + g20 * ca + g01 * vb + g11 * db + g21 * cb)
    return float(val), float(der)


def write_solution_csv(sol: PiiSolution, path) -> None:
    """Dump (s, v, v') as CSV with header ``s,v,vp``."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write("s,v,vp\n")
        for s, v, vp in zip(sol.s_grid, sol.v, sol.v_prime):
            fh.write(f"{s:.17g},{v:.17g},{vp:.17g}\n")
