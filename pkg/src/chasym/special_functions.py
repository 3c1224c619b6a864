"""Airy function, Gamma argument on the imaginary axis, and adaptive quadrature.

The phase constants of the oscillatory wave regions are built from three
numerical primitives:

* ``airy_ai`` -- Ai(s) and Ai'(s) on the window [-20, 12], by Maclaurin
  series around 0 stitched to the standard asymptotic expansions,
* ``arg_gamma_imag`` -- arg Gamma(i*nu) through the classical series
  arg Gamma(1+iy) = -gamma*y + sum_n (y/(1+n) - atan(y/(1+n))),
* ``integrate`` / ``integrate_pv`` -- adaptive Gauss-Kronrod quadrature with
  declared-singularity handling (endpoint logs by a sqrt substitution,
  simple poles by symmetric pairing, infinite ranges by x = t/(1-t**2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from heapq import heappush, heappop
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "EULER_GAMMA",
    "QuadratureSpec",
    "QuadratureError",
    "airy_ai",
    "arg_gamma_imag",
    "integrate",
    "integrate_pv",
]

EULER_GAMMA = 0.5772156649015329

# Ai(0) = 3**(-2/3)/Gamma(2/3), Ai'(0) = -3**(-1/3)/Gamma(1/3)
_AI_ZERO = 0.3550280538878172
_AIP_ZERO = -0.2588194037928068

# Maclaurin window.  On the positive side the series is accurate (absolute
# error ~ Bi(s)*eps) up to ~6; on the negative side cancellation limits it to
# ~ -7.25, below which the oscillatory asymptotic series has already converged
# past 1e-11.  Both representations agree to better than 1e-10 at the seams.
_SERIES_POS_CUT = 6.0
_SERIES_NEG_CUT = -7.25
_AIRY_WINDOW = (-20.0, 12.0)


def airy_ai(s: float) -> tuple[float, float]:
    """Airy function of the first kind.

    Returns ``(Ai(s), Ai'(s))`` for s in the supported window [-20, 12].

    Raises
    ------
    ValueError
        If ``s`` lies outside the supported accuracy window.
    """
    s = float(s)
    if not (_AIRY_WINDOW[0] <= s <= _AIRY_WINDOW[1]):
        raise ValueError(f"airy_ai: s={s} outside supported window {_AIRY_WINDOW}")
    if s > _SERIES_POS_CUT:
        return _airy_asym_right(s)
    if s < _SERIES_NEG_CUT:
        return _airy_asym_left(s)
    return _airy_series(s)


def _airy_series(s: float) -> tuple[float, float]:
    # Ai = Ai(0)*f + Ai'(0)*g with f'' = s f, f(0)=1, f'(0)=0 and
    # g(0)=0, g'(0)=1.  All four sums share the cube recurrence.
    s3 = s * s * s
    f = tf = 1.0
    g = tg = s
    fp = tfp = 0.5 * s * s  # first nonzero term of f' is s^2/2
    gp = tgp = 1.0
    k = 0
    while True:
        tf *= s3 / ((3 * k + 2) * (3 * k + 3))
        tg *= s3 / ((3 * k + 3) * (3 * k + 4))
        tgp *= s3 / ((3 * k + 1) * (3 * k + 3))
        if k > 0:
            tfp *= s3 * (k + 1) / (k * (3 * k + 2) * (3 * k + 3))
        f += tf
        g += tg
        gp += tgp
        if k > 0:
            fp += tfp
        k += 1
        if max(abs(tf), abs(tg), abs(tfp), abs(tgp)) < 1e-18 and k > 4:
            break
        if k > 200:  # unreachable inside the window
            break
    ai = _AI_ZERO * f + _AIP_ZERO * g
    aip = _AI_ZERO * fp + _AIP_ZERO * gp
    return ai, aip


def _u_v_terms(zeta: float, nmax: int = 60):
    """Coefficients u_k/zeta^k and v_k/zeta^k of the Airy asymptotic series."""
    u = 1.0
    terms_u = [1.0]
    terms_v = [1.0]
    for k in range(nmax):
        u *= (6 * k + 1) * (6 * k + 3) * (6 * k + 5) / (216.0 * (k + 1) * (2 * k + 1))
        t = u / zeta ** (k + 1)
        terms_u.append(t)
        terms_v.append(-(6 * (k + 1) + 1) / (6 * (k + 1) - 1) * t)
        if abs(t) < 1e-18:
            break
        if k > 2 and abs(t) > abs(terms_u[-2]):  # past optimal truncation
            terms_u.pop()
            terms_v.pop()
            break
    return terms_u, terms_v


def _airy_asym_right(s: float) -> tuple[float, float]:
    zeta = 2.0 / 3.0 * s ** 1.5
    tu, tv = _u_v_terms(zeta)
    su = math.fsum(t if k % 2 == 0 else -t for k, t in enumerate(tu))
    sv = math.fsum(t if k % 2 == 0 else -t for k, t in enumerate(tv))
    pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    ai = pref * s ** -0.25 * su
    aip = -pref * s ** 0.25 * sv
    return ai, aip


def _airy_asym_left(s: float) -> tuple[float, float]:
    z = -s
    zeta = 2.0 / 3.0 * z ** 1.5
    w = zeta - 0.25 * math.pi
    tu, tv = _u_v_terms(zeta)
    ue = math.fsum((-1) ** k * t for k, t in enumerate(tu[0::2]))
    uo = math.fsum((-1) ** k * t for k, t in enumerate(tu[1::2]))
    ve = math.fsum((-1) ** k * t for k, t in enumerate(tv[0::2]))
    vo = math.fsum((-1) ** k * t for k, t in enumerate(tv[1::2]))
    ai = (math.cos(w) * ue + math.sin(w) * uo) / (math.sqrt(math.pi) * z ** 0.25)
    aip = (math.sin(w) * ve - math.cos(w) * vo) * z ** 0.25 / math.sqrt(math.pi)
    return ai, aip


def arg_gamma_imag(nu: float) -> float:
    """arg Gamma(i*nu) by the series for arg Gamma(1+iy) minus pi/2.

    The series term y/m - atan(y/m) decays like y^3/(3 m^3); it is truncated
    once below 1e-15 in magnitude and an integral tail estimate is added.
    """
    nu = float(nu)
    if not math.isfinite(nu):
        raise ValueError("arg_gamma_imag: nu must be finite")
    if nu == 0.0:
        return -0.5 * math.pi
    # |nu|^3/(3 M^3) < 1e-15  =>  M > |nu| * (1e15/3)^(1/3)
    M = max(64, int(abs(nu) * 6.94e4) + 1)
    m = np.arange(1, M + 1, dtype=float)
    x = nu / m
    terms = x - np.arctan(x)
    series = math.fsum(terms[::-1])
    tail = nu ** 3 / (6.0 * M * (M + 1))
    return -EULER_GAMMA * nu + series + tail - 0.5 * math.pi


# ----------------------------------------------------------------------------
# adaptive quadrature
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and declared singular locations for `integrate`.

    ``singularity_points`` are abscissae where the integrand has an
    integrable (log-type) singularity; the interval is split there and a
    sqrt substitution is applied on the adjacent panels.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 4000
    singularity_points: tuple[float, ...] = ()

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        object.__setattr__(self, "singularity_points",
                           tuple(float(p) for p in self.singularity_points))


class QuadratureError(RuntimeError):
    """Raised when the adaptive rule cannot reach the requested tolerance.

    Carries the best available ``estimate`` and its ``error_bound``.
    """

    def __init__(self, message: str, estimate: float, error_bound: float):
        super().__init__(f"{message} (best estimate {estimate:.16g}, "
                         f"error bound {error_bound:.3g})")
        self.estimate = estimate
        self.error_bound = error_bound


# 15-point Kronrod extension of 7-point Gauss (QUADPACK dqk15 constants).
_XGK = np.array([
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
])
_WGK = np.array([
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278,
])
_WG = np.array([
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189,
    0.4179591836734694,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # ascending, 15 nodes
_W_KRON = np.concatenate([_WGK[:-1], _WGK[::-1]])
_W_GAUSS = np.zeros(15)
_W_GAUSS[1:-1:2] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    c = 0.5 * (a + b)
    hw = 0.5 * (b - a)
    xs = c + hw * _NODES
    fx = np.array([f(x) for x in xs], dtype=float)
    if not np.all(np.isfinite(fx)):
        raise QuadratureError("non-finite integrand value", math.nan, math.inf)
    kron = hw * float(_W_KRON @ fx)
    gauss = hw * float(_W_GAUSS @ fx)
    return kron, abs(kron - gauss)


def _adaptive(f, a: float, b: float, spec: QuadratureSpec) -> tuple[float, float]:
    """Error-directed bisection with the GK15 rule on panels."""
    val, err = _gk15(f, a, b)
    heap = [(-err, a, b, val, err)]
    total, total_err = val, err
    n = 1
    while total_err > max(spec.abs_tol, spec.rel_tol * abs(total)):
        if n >= spec.max_subdivisions:
            raise QuadratureError("max_subdivisions exceeded", total, total_err)
        _, pa, pb, pval, perr = heappop(heap)
        pm = 0.5 * (pa + pb)
        if pm <= pa or pm >= pb:  # panel at float resolution; accept as is
            heappush(heap, (0.0, pa, pb, pval, 0.0))
            total_err -= perr
            continue
        lv, le = _gk15(f, pa, pm)
        rv, re = _gk15(f, pm, pb)
        total += lv + rv - pval
        total_err += le + re - perr
        heappush(heap, (-le, pa, pm, lv, le))
        heappush(heap, (-re, pm, pb, rv, re))
        n += 1
    return total, total_err


def _map_infinite(f, a: float, b: float):
    """Substitute x = t/(1-t^2) to bring infinite endpoints to (-1, 1)."""
    def t_of_x(x: float) -> float:
        if math.isinf(x):
            return math.copysign(1.0, x)
        if x == 0.0:
            return 0.0
        return (-1.0 + math.sqrt(1.0 + 4.0 * x * x)) / (2.0 * x)

    def g(t: float) -> float:
        om = 1.0 - t * t
        x = t / om
        return f(x) * (1.0 + t * t) / (om * om)

    return g, t_of_x(a), t_of_x(b)


def _integrate_piece(f, a: float, b: float, spec: QuadratureSpec,
                     sing_lo: bool, sing_hi: bool) -> tuple[float, float]:
    """One singularity-free-interior panel; endpoints may carry log singularities."""
    if sing_lo and sing_hi:
        m = 0.5 * (a + b)
        v1, e1 = _integrate_piece(f, a, m, spec, True, False)
        v2, e2 = _integrate_piece(f, m, b, spec, False, True)
        return v1 + v2, e1 + e2
    if sing_lo:
        w = math.sqrt(b - a)
        return _adaptive(lambda tau: 2.0 * tau * f(a + tau * tau), 0.0, w, spec)
    if sing_hi:
        w = math.sqrt(b - a)
        return _adaptive(lambda tau: 2.0 * tau * f(b - tau * tau), 0.0, w, spec)
    return _adaptive(f, a, b, spec)


def integrate(f: Callable[[float], float], a: float, b: float,
              spec: QuadratureSpec | None = None) -> float:
    """Adaptive integral of ``f`` over (a, b).

    Infinite endpoints are allowed.  Points listed in
    ``spec.singularity_points`` split the interval, and panels touching a
    declared point use the substitution x = p +/- tau^2, which regularises
    integrable log singularities.
    """
    spec = spec or QuadratureSpec()
    if not a < b:
        raise ValueError("integrate: requires a < b")
    interior = sorted(p for p in spec.singularity_points if a < p < b)
    cuts = [a, *interior, b]
    declared = set(spec.singularity_points)
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if math.isinf(lo) or math.isinf(hi):
            g, tlo, thi = _map_infinite(f, lo, hi)
            v, e = _integrate_piece(g, tlo, thi, spec,
                                    sing_lo=(lo in declared),
                                    sing_hi=(hi in declared))
        else:
            v, e = _integrate_piece(f, lo, hi, spec,
                                    sing_lo=(lo in declared),
                                    sing_hi=(hi in declared))
        total += v
        total_err += e
    if not math.isfinite(total):
        raise QuadratureError("integral did not evaluate finitely", total, total_err)
    return total


def integrate_pv(f: Callable[[float], float], center: float, a: float, b: float,
                 spec: QuadratureSpec | None = None) -> float:
    """Cauchy principal value of ``f`` with a simple pole at ``center``.

    The symmetric window (center-R, center+R) with R = min(center-a, b-center)
    is folded to g(xi) = f(center+xi) + f(center-xi) on (0, R), where the pole
    cancels; the leftover outer piece is integrated directly.  Declared
    singular points are remapped into the folded coordinate.
    """
    spec = spec or QuadratureSpec()
    if not (a < center < b):
        raise ValueError("integrate_pv: center must lie inside (a, b)")
    R = min(center - a, b - center)

    def paired(xi: float) -> float:
        return f(center + xi) + f(center - xi)

    folded_pts = sorted({abs(p - center) for p in spec.singularity_points
                         if p != center and abs(p - center) <= R})
    folded_spec = QuadratureSpec(spec.rel_tol, spec.abs_tol,
                                 spec.max_subdivisions, tuple(folded_pts))
    total = integrate(paired, 0.0, R, folded_spec)

    # outer remainder, at most one side
    if center - a < b - center:
        lo, hi = center + R, b
    else:
        lo, hi = a, center - R
    if hi > lo:
        outer_pts = tuple(p for p in spec.singularity_points if lo < p < hi)
        outer_spec = QuadratureSpec(spec.rel_tol, spec.abs_tol,
                                    spec.max_subdivisions, outer_pts)
        total += integrate(f, lo, hi, outer_spec)
    return total
