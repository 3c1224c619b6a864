"""Closed-form long-time evaluators for the six wave regions.

For slope zeta = x/t the half-plane splits into a soliton ray, two
oscillatory sectors, a fast-decay sector, and two width-O(t^{1/3})
transition strips around x = 2t and x = -t/4.  Everything is specialised to
the delta-potential scattering data, so each evaluator is an explicit
function of (x, t, q0) -- the oscillatory phase constants involve the
quadratures and the Gamma-argument series from `special_functions`, and the
transition strips take a solved Painleve II boundary-value problem as input.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .initial_data import make_profile
from .painleve import PiiFamily, PiiSolution, evaluate as pii_evaluate
from .special_functions import (QuadratureSpec, arg_gamma_imag, integrate,
                                integrate_pv)

__all__ = [
    "REGION_LABELS",
    "RegionPartition",
    "PhaseConstants",
    "CoalescenceWarning",
    "classify",
    "soliton_speed",
    "stationary_points",
    "modulation_params",
    "phase_delta0",
    "phases_region3",
    "delta1_transition",
    "eval_soliton",
    "soliton_parametric",
    "envelope_region2",
    "eval_region2",
    "eval_region3",
    "eval_transition1",
    "eval_transition2",
    "transition2_reflection_modulus",
]

REGION_LABELS = ("soliton_i1", "soliton_i2", "osc1", "osc2", "fast_decay",
                 "trans1", "trans2")

_PHASE_QUAD = QuadratureSpec(rel_tol=1e-11, abs_tol=1e-13, max_subdivisions=8000)


class CoalescenceWarning(UserWarning):
    """Emitted when region-(iii) amplitudes are evaluated near zeta = -1/4."""


@dataclass(frozen=True)
class RegionPartition:
    """Labelled x-intervals of the asymptotic classification at time t.

    ``soliton_i2`` holds a pair of intervals (between the sector edge and the
    soliton ray, and beyond the ray); all other labels map to one interval.
    Overlaps between neighbouring entries are intentional -- the regimes are
    asymptotic descriptions, not a partition.
    """

    t: float
    epsilon: float
    C: float
    q0: float
    intervals: dict

    def interval_list(self, label: str) -> list[tuple[float, float]]:
        iv = self.intervals[label]
        return list(iv) if label == "soliton_i2" else [iv]


def soliton_speed(q0: float) -> float:
    """Soliton ray slope c1 = 2/(1 - q0^2) (equals 2/(1 - 4 mu1^2))."""
    return 2.0 / (1.0 - q0 * q0)


def classify(t: float, epsilon: float, C: float, q0: float) -> RegionPartition:
    """Region intervals for given (t, epsilon, C, q0)."""
    if t <= 0.0:
        raise ValueError("classify: t must be positive")
    if epsilon <= 0.0 or C <= 0.0:
        raise ValueError("classify: epsilon and C must be positive")
    c1 = soliton_speed(q0)
    tw = C * t ** (1.0 / 3.0)
    intervals = {
        "soliton_i1": ((c1 - epsilon) * t, (c1 + epsilon) * t),
        "soliton_i2": (((2.0 + epsilon) * t, (c1 - epsilon) * t),
                       ((c1 + epsilon) * t, math.inf)),
        "osc1": (0.0, (2.0 - epsilon) * t),
        "osc2": ((-0.25 + epsilon) * t, 0.0),
        "fast_decay": (-math.inf, (-0.25 - epsilon) * t),
        "trans1": (2.0 * t - tw, 2.0 * t + tw),
        "trans2": (-0.25 * t - tw, -0.25 * t + tw),
    }
    return RegionPartition(t=t, epsilon=epsilon, C=C, q0=q0, intervals=intervals)


# ---------------------------------------------------------------------------
# stationary-phase data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhaseConstants:
    """Cached per-slope constants of the oscillatory formulas."""

    zeta: float
    k0: float
    k1: float | None
    nu0: float
    nu1: float | None
    delta0: float | None
    deltabar0: float | None
    delta1: float | None


def stationary_points(zeta: float) -> tuple[float, float | None]:
    """Stationary wavenumbers k0 (and k1 for -1/4 < zeta < 0).

    The printed k0 formula is 0/0 at zeta = 0; the rationalised equivalent
    k0 = sqrt((2 - zeta)/(1 + zeta + sqrt(1 + 4 zeta)))/2 is exact on the
    whole sector and is what we evaluate.
    """
    z = float(zeta)
    if not -0.25 < z < 2.0:
        raise ValueError(f"stationary_points: zeta={z} outside (-1/4, 2)")
    root = math.sqrt(1.0 + 4.0 * z)
    k0 = 0.5 * math.sqrt((2.0 - z) / (1.0 + z + root))
    k1 = 0.5 * math.sqrt(-(1.0 + z + root) / z) if z < 0.0 else None
    return k0, k1


def modulation_params(zeta: float, q0: float) -> tuple[float, float | None]:
    """Logarithmic modulation exponents nu0 (and nu1 when k1 exists)."""
    k0, k1 = stationary_points(zeta)

    def nu(k: float) -> float:
        # equals -(1/2pi) log(1 - |R(k)|^2) for the delta-potential R
        return -math.log(4.0 * k * k / (q0 * q0 + 4.0 * k * k)) / (2.0 * math.pi)

    return nu(k0), (nu(k1) if k1 is not None else None)


def _slope_factor0(z: float) -> float:
    """32 zeta (root-1-zeta)(1+4 zeta-root)/(root-1)^3, cancellation-free.

    Rationalising each difference against its conjugate gives
    2 (2-z)(1+4z)(root+1)^3 / ((1+z+root)(1+4z+root)), identical for all
    z in (-1/4, 2) and finite (value 8) at z = 0.
    """
    root = math.sqrt(1.0 + 4.0 * z)
    return (2.0 * (2.0 - z) * (1.0 + 4.0 * z) * (root + 1.0) ** 3
            / ((1.0 + z + root) * (1.0 + 4.0 * z + root)))


def _log_weight(q0: float):
    def g(xi: float) -> float:
        return math.log(4.0 * xi * xi / (q0 * q0 + 4.0 * xi * xi))
    return g


def _pole_weight(q0: float):
    def w(xi: float) -> float:
        return 2.0 * q0 * q0 / ((q0 * q0 + 4.0 * xi * xi) * xi)
    return w


@lru_cache(maxsize=4096)
def phase_delta0(zeta: float, q0: float) -> float:
    """Phase shift of the first oscillatory region at slope zeta.

    Sum of the arctangent branch term, the nu0-weighted logarithm of the
    algebraic slope factor, two finite quadratures (one principal-value) of
    reflection-coefficient logs, and arg Gamma(i nu0).
    """
    z = float(zeta)
    if not 0.0 < z < 2.0:
        raise ValueError(f"phase_delta0: zeta={z} outside (0, 2)")
    q0 = float(q0)
    k0, _ = stationary_points(z)
    nu0, _ = modulation_params(z, q0)
    slope_factor = _slope_factor0(z)
    g = _log_weight(q0)
    w = _pole_weight(q0)
    quad_log = integrate(lambda xi: g(xi) / (1.0 + 4.0 * xi * xi), -k0, k0,
                         QuadratureSpec(_PHASE_QUAD.rel_tol, _PHASE_QUAD.abs_tol,
                                        _PHASE_QUAD.max_subdivisions, (0.0,)))
    quad_pv = integrate_pv(lambda xi: w(xi) * math.log(k0 - xi), 0.0, -k0, k0,
                           QuadratureSpec(_PHASE_QUAD.rel_tol, _PHASE_QUAD.abs_tol,
                                          _PHASE_QUAD.max_subdivisions, (k0,)))
    return (0.25 * math.pi
            - (math.atan(-2.0 * k0 / q0) + math.pi)
            - nu0 * math.log(slope_factor)
            + 4.0 * math.atan(q0 / (2.0 * k0))
            + 4.0 * k0 * math.log((1.0 + q0) / (1.0 - q0))
            + 4.0 * k0 / math.pi * quad_log
            + quad_pv / math.pi
            + arg_gamma_imag(nu0))


def _three_piece_log(q0: float, k0: float, k1: float) -> float:
    g = _log_weight(q0)
    f = lambda xi: g(xi) / (1.0 + 4.0 * xi * xi)
    spec_mid = QuadratureSpec(_PHASE_QUAD.rel_tol, _PHASE_QUAD.abs_tol,
                              _PHASE_QUAD.max_subdivisions, (0.0,))
    left = integrate(f, -math.inf, -k1, _PHASE_QUAD)
    mid = integrate(f, -k0, k0, spec_mid)
    right = integrate(f, k1, math.inf, _PHASE_QUAD)
    return left + mid + right


def _i_integral(q0: float, k0: float, k1: float, kref: float) -> float:
    """(int_{-inf}^{-k1} + PV int_{-k0}^{k0}) log(kref-xi) w + int_{k1}^{inf} log(xi-kref) w."""
    w = _pole_weight(q0)
    left = integrate(lambda xi: math.log(kref - xi) * w(xi), -math.inf, -k1,
                     _PHASE_QUAD)
    mid_pts = (kref,) if abs(kref - k0) < 1e-14 else ()
    mid = integrate_pv(lambda xi: math.log(kref - xi) * w(xi), 0.0, -k0, k0,
                       QuadratureSpec(_PHASE_QUAD.rel_tol, _PHASE_QUAD.abs_tol,
                                      _PHASE_QUAD.max_subdivisions, mid_pts))
    right_pts = (kref,) if abs(kref - k1) < 1e-14 else ()
    right = integrate(lambda xi: math.log(xi - kref) * w(xi), k1, math.inf,
                      QuadratureSpec(_PHASE_QUAD.rel_tol, _PHASE_QUAD.abs_tol,
                                     _PHASE_QUAD.max_subdivisions, right_pts))
    return left + mid + right


@lru_cache(maxsize=4096)
def phases_region3(zeta: float, q0: float) -> tuple[float, float]:
    """Phase shifts (deltabar0, delta1) of the second oscillatory region."""
    z = float(zeta)
    if not -0.25 < z < 0.0:
        raise ValueError(f"phases_region3: zeta={z} outside (-1/4, 0)")
    q0 = float(q0)
    k0, k1 = stationary_points(z)
    nu0, nu1 = modulation_params(z, q0)
    root = math.sqrt(1.0 + 4.0 * z)
    factor0 = _slope_factor0(z)
    factor1 = (32.0 * z * (root + 1.0 + z) * (1.0 + 4.0 * z + root)
               / -((root + 1.0) ** 3))
    three = _three_piece_log(q0, k0, k1)
    i0 = _i_integral(q0, k0, k1, k0)
    i1 = _i_integral(q0, k0, k1, k1)
    coupling = math.log((k1 - k0) / (k1 + k0))
    deltabar0 = (0.25 * math.pi
                 - (math.atan(-2.0 * k0 / q0) + math.pi)
                 + arg_gamma_imag(nu0)
                 - nu0 * math.log(factor0)
                 + 4.0 * math.atan(q0 / (2.0 * k0))
                 + 4.0 * k0 * math.log((1.0 + q0) / (1.0 - q0))
                 + 4.0 * k0 / math.pi * three
                 + i0 / math.pi
                 + 2.0 * nu1 * coupling)
    delta1 = (0.25 * math.pi
              + math.atan(-2.0 * k1 / q0) + math.pi
              + arg_gamma_imag(nu1)
              - nu1 * math.log(factor1)
              - 4.0 * math.atan(q0 / (2.0 * k1))
              + 4.0 * k1 * math.log((1.0 + q0) / (1.0 - q0))
              + 4.0 * k1 / math.pi * three
              - i1 / math.pi
              - 2.0 * nu0 * coupling)
    return deltabar0, delta1


@lru_cache(maxsize=256)
def delta1_transition(q0: float) -> float:
    """Constant phase offset of the second transition strip.

    Five contributions: a semi-infinite quadrature of the reflection log, an
    arctangent branch term, two elementary logs/arctangents, and a
    principal-value integral over the whole line with the pole at sqrt(3)/2.
    """
    q0 = float(q0)
    if not 0.0 < q0 < 1.0:
        raise ValueError("delta1_transition: q0 must lie in (0, 1)")
    g = _log_weight(q0)
    quad_half = integrate(lambda xi: g(xi) / (1.0 + 4.0 * xi * xi), 0.0, math.inf,
                          QuadratureSpec(_PHASE_QUAD.rel_tol, _PHASE_QUAD.abs_tol,
                                         _PHASE_QUAD.max_subdivisions, (0.0,)))
    c = 0.5 * math.sqrt(3.0)
    quad_pv = integrate_pv(lambda xi: g(xi) / (xi - c), c, -math.inf, math.inf,
                           QuadratureSpec(_PHASE_QUAD.rel_tol, _PHASE_QUAD.abs_tol,
                                          _PHASE_QUAD.max_subdivisions, (0.0,)))
    return (-4.0 * math.sqrt(3.0) / math.pi * quad_half
            + math.atan(-math.sqrt(3.0) / q0) + math.pi
            - 4.0 * math.atan(q0 / math.sqrt(3.0))
            - 2.0 * math.sqrt(3.0) * math.log((1.0 + q0) / (1.0 - q0))
            + quad_pv / math.pi)


# ---------------------------------------------------------------------------
# evaluators
# ---------------------------------------------------------------------------

def soliton_parametric(y: float, t: float, q0: float) -> tuple[float, float]:
    """Parametric point (x, u) of the single soliton at parameter y."""
    c1 = soliton_speed(q0)
    th = y - c1 * t
    amp = 4.0 * q0 * q0 / (1.0 - q0 * q0) ** 2
    u = amp / (math.exp(q0 * th) + 0.25 * math.exp(-q0 * th)
               + (1.0 + q0 * q0) / (1.0 - q0 * q0))
    e = math.exp(-q0 * th - math.log(2.0))
    ratio = (1.0 + e * (1.0 + q0) / (1.0 - q0)) / (1.0 + e * (1.0 - q0) / (1.0 + q0))
    return y + math.log(ratio), u


def eval_soliton(x: float, t: float, q0: float) -> float:
    """Soliton-region value at (x, t) by inverting the parametric map.

    x - y is pinched between 0 and 2 log((1+q0)/(1-q0)), so the root of
    x(y) = x is bracketed analytically and found with a safeguarded solver.
    """
    span = 2.0 * math.log((1.0 + q0) / (1.0 - q0))
    lo, hi = x - span - 1.0, x + 1.0
    f = lambda y: soliton_parametric(y, t, q0)[0] - x
    flo, fhi = f(lo), f(hi)
    grow = 1.0
    while flo > 0.0 or fhi < 0.0:  # monotone map: only float fuzz lands here
        grow *= 2.0
        lo -= grow
        hi += grow
        flo, fhi = f(lo), f(hi)
        if grow > 1e6:
            raise RuntimeError("eval_soliton: bracketing failed")
    y = brentq(f, lo, hi, xtol=1e-13, rtol=8.9e-16)
    return soliton_parametric(y, t, q0)[1]


def envelope_region2(zeta: float, q0: float, t: float) -> float:
    """Amplitude envelope of the first oscillatory region."""
    k0, _ = stationary_points(zeta)
    nu0, _ = modulation_params(zeta, q0)
    return math.sqrt(2.0 * k0 * nu0 /
                     ((0.25 + k0 * k0) * (0.75 - k0 * k0) * t))


def eval_region2(x: float, t: float, q0: float) -> float:
    """Leading modulated oscillation in 0 <= x/t < 2."""
    z = x / t
    if not 0.0 <= z < 2.0:
        raise ValueError(f"eval_region2: x/t={z} outside [0, 2)")
    zq = max(z, 1e-14)  # the phase constants are continuous at zeta -> 0+
    k0, _ = stationary_points(zq)
    nu0, _ = modulation_params(zq, q0)
    d0 = phase_delta0(zq, q0)
    omega = 2.0 * k0 ** 3 / (0.25 + k0 * k0) ** 2
    return -envelope_region2(zq, q0, t) * math.sin(
        omega * t - nu0 * math.log(t) + d0)


def eval_region3(x: float, t: float, q0: float) -> float:
    """Two-mode modulated oscillation in -1/4 < x/t < 0.

    The second mode enters with the printed sign pattern
    sin(... + nu1 log t - delta1).  Within |zeta + 1/4| < 1e-3 the amplitude
    denominators blow up and a CoalescenceWarning is attached.
    """
    z = x / t
    if not -0.25 < z < 0.0:
        raise ValueError(f"eval_region3: x/t={z} outside (-1/4, 0)")
    if abs(z + 0.25) < 1e-3:
        warnings.warn("eval_region3: zeta within 1e-3 of the -1/4 coalescence; "
                      "amplitudes are not reliable here", CoalescenceWarning,
                      stacklevel=2)
    k0, k1 = stationary_points(z)
    nu0, nu1 = modulation_params(z, q0)
    dbar0, d1 = phases_region3(z, q0)
    amp0 = math.sqrt(2.0 * k0 * nu0 / ((0.25 + k0 * k0) * (0.75 - k0 * k0) * t))
    amp1 = math.sqrt(2.0 * k1 * nu1 / ((0.25 + k1 * k1) * (k1 * k1 - 0.75) * t))
    ph0 = 2.0 * k0 ** 3 / (0.25 + k0 * k0) ** 2 * t - nu0 * math.log(t) + dbar0
    ph1 = 2.0 * k1 ** 3 / (0.25 + k1 * k1) ** 2 * t + nu1 * math.log(t) - d1
    return -amp0 * math.sin(ph0) - amp1 * math.sin(ph1)


def eval_transition1(x: float, t: float, q0: float, sol: PiiSolution) -> float:
    """Painleve description of the strip around x = 2t.

    ``sol`` must be the Hastings-McLeod family: the boundary datum is
    -R(0) Ai = Ai since R(0) = -1 for every q0.
    """
    if sol.family is not PiiFamily.HASTINGS_MCLEOD:
        raise ValueError("eval_transition1 needs the Hastings-McLeod solution")
    s = 6.0 ** (-1.0 / 3.0) * (x / t - 2.0) * t ** (2.0 / 3.0)
    v, vp = pii_evaluate(sol, s)
    return -((4.0 / 3.0) ** (2.0 / 3.0)) * t ** (-2.0 / 3.0) * (v * v - vp)


def transition2_reflection_modulus(q0: float) -> float:
    """|R(sqrt(3)/2)| = q0/sqrt(q0^2 + 3), the Ablowitz-Segur parameter."""
    return q0 / math.sqrt(q0 * q0 + 3.0)


def eval_transition2(x: float, t: float, q0: float, sol: PiiSolution) -> float:
    """Painleve description of the strip around x = -t/4."""
    if sol.family is not PiiFamily.ABLOWITZ_SEGUR:
        raise ValueError("eval_transition2 needs an Ablowitz-Segur solution")
    r_expected = transition2_reflection_modulus(q0)
    if not math.isclose(sol.r, r_expected, rel_tol=1e-9):
        raise ValueError(f"eval_transition2: solution r={sol.r} does not match "
                         f"|R(sqrt3/2)|={r_expected} for q0={q0}")
    s1 = -((16.0 / 3.0) ** (1.0 / 3.0)) * (x / t + 0.25) * t ** (2.0 / 3.0)
    v, _ = pii_evaluate(sol, s1)
    psi = (-0.75 * math.sqrt(3.0) * t
           - 3.0 ** (5.0 / 6.0) / 2.0 ** (4.0 / 3.0) * s1 * t ** (1.0 / 3.0)
           + delta1_transition(q0))
    return 12.0 ** (1.0 / 6.0) * t ** (-1.0 / 3.0) * v * math.sin(psi)
