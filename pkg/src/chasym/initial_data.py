"""Closed-form initial data for the delta-potential Camassa-Holm run.

A single parameter q0 in (0, 1) fixes the initial profile u(x, 0), the
momentum w(x, 0) = u - u_xx + 1, the straightening coordinate y(x), and the
spectral data (one bound state plus a nontrivial reflection coefficient).
All formulas are piecewise in x with the branch point at x = log(1 + A),
A = q0/(1 - q0); the profile is C^1 there but not smooth, which is the
fingerprint of the underlying delta potential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ScatteringProfile", "make_profile", "u_initial", "w_initial", "y_of_x"]


@dataclass(frozen=True)
class ScatteringProfile:
    """Spectral data attached to the closed-form initial condition.

    ``mu1`` is the single discrete eigenvalue parameter and ``gamma1`` its
    norming constant; ``reflection`` is R(k) = -q0/(q0 + 2ik).
    """

    q0: float
    A: float
    mu1: float
    gamma1: float

    @property
    def junction(self) -> float:
        """Branch point log(1 + A) of the piecewise formulas."""
        return math.log1p(self.A)

    def reflection(self, k):
        """Reflection coefficient R(k) = -q0/(q0 + 2ik); accepts arrays."""
        k = np.asarray(k)
        return -self.q0 / (self.q0 + 2j * k)

    def reflection_abs2(self, k):
        """|R(k)|^2 = q0^2 / (q0^2 + 4 k^2)."""
        k = np.asarray(k, dtype=float)
        return self.q0 ** 2 / (self.q0 ** 2 + 4.0 * k * k)


def make_profile(q0: float) -> ScatteringProfile:
    """Build the scattering profile for q0 in (0, 1)."""
    q0 = float(q0)
    if not 0.0 < q0 < 1.0:
        raise ValueError(f"make_profile: q0 must lie in (0, 1), got {q0}")
    A = q0 / (1.0 - q0)
    return ScatteringProfile(q0=q0, A=A, mu1=0.5 * q0, gamma1=math.sqrt(0.5 * q0))


def _dispatch(x, fn_hi, fn_lo, junction):
    """Evaluate the piecewise branches, scalar or vectorised."""
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    out = np.empty_like(xa)
    hi = xa >= junction
    if hi.any():
        out[hi] = fn_hi(xa[hi])
    if (~hi).any():
        out[~hi] = fn_lo(xa[~hi])
    return float(out[0]) if scalar else out


def u_initial(x, profile: ScatteringProfile):
    """Initial wave profile u(x, 0).

    Right branch A(A+1+log(e^x - A))/e^x, left branch the mirror through the
    (1+A)^2 e^{-x} expression; both are evaluated in log1p form so the far
    field underflows cleanly instead of overflowing.
    """
    A = profile.A
    one_pa2 = (1.0 + A) ** 2

    def hi(xs):
        # log(e^x - A) = x + log1p(-A e^-x)
        return A * (A + 1.0 + xs + np.log1p(-A * np.exp(-xs))) * np.exp(-xs)

    def lo(xs):
        # log((1+A)^2 e^-x - A) = -x + 2 log(1+A) + log1p(-A e^x/(1+A)^2)
        lg = -xs + 2.0 * np.log1p(A) + np.log1p(-A * np.exp(xs) / one_pa2)
        return A * (A + 1.0 + lg) * np.exp(xs) / one_pa2

    return _dispatch(x, hi, lo, profile.junction)


def w_initial(x, profile: ScatteringProfile):
    """Initial momentum w(x, 0) = u - u_xx + 1; strictly positive, -> 1."""
    A = profile.A
    one_pa2 = (1.0 + A) ** 2

    def hi(xs):
        return (1.0 / (1.0 - A * np.exp(-xs))) ** 2

    def lo(xs):
        return (one_pa2 / (one_pa2 - A * np.exp(xs))) ** 2

    return _dispatch(x, hi, lo, profile.junction)


def y_of_x(x, profile: ScatteringProfile):
    """Straightening coordinate y(x); strictly increasing, y - x -> 0 at +inf."""
    A = profile.A
    one_pa2 = (1.0 + A) ** 2

    def hi(xs):
        arg = -A * np.exp(-xs)
        # branch condition x >= log(1+A) guarantees e^x - A >= 1
        assert np.all(arg > -1.0), "y_of_x: e^x - A must stay positive"
        return xs + np.log1p(arg)

    def lo(xs):
        return xs - 2.0 * np.log1p(A) - np.log1p(-A * np.exp(xs) / one_pa2)

    return _dispatch(x, hi, lo, profile.junction)
