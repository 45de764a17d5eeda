"""Phase-space vocabulary for the isothermal two-phase flow model.

The model evolves (v, u, lambda) with pressure p = a^2(lambda)/v, where
v > 0 is the specific volume, u the velocity and lambda in [0, 1] the
vapor mass fraction.  All functions here are pure formulas: wave curves,
signed wave strengths and characteristic speeds.  Rarefactions carry
positive strength, shocks negative strength.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass


class CurveMembershipError(ValueError):
    """Raised when a state pair does not lie on the requested wave curve."""


# Relative tolerance on the u-residual when checking curve membership.
MEMBERSHIP_RTOL = 1e-9

# Strengths below this magnitude emit no wave front.
STRENGTH_ZERO = 1e-14


@dataclass(frozen=True)
class State:
    """A point (v, u, lam) of the phase space (0, inf) x R x [0, 1]."""

    v: float
    u: float
    lam: float

    def __post_init__(self):
        if not self.v > 0.0:
            raise ValueError(f"specific volume must be positive, got {self.v}")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"vapor fraction must lie in [0, 1], got {self.lam}")


@dataclass(frozen=True)
class WaveStrengths:
    """Signed strengths of the three waves of a Riemann fan."""

    eps1: float
    eps2: float
    eps3: float

    def total(self):
        return abs(self.eps1) + abs(self.eps2) + abs(self.eps3)


def h(eps):
    """Identity for nonnegative strengths, sinh on the shock side.

    Continuous, strictly increasing, C^1 at 0 with h'(0) = 1.
    """
    return eps if eps >= 0.0 else math.sinh(eps)


def dh(eps):
    """Derivative of h: 1 on [0, inf), cosh on (-inf, 0)."""
    return 1.0 if eps >= 0.0 else math.cosh(eps)


class PressureModel:
    """Pressure law p(v, lam) = a^2(lam)/v with a > 0 strictly increasing.

    The default coefficient is the affine-in-lambda squared form
    a^2(lam) = k0 + lam*(k1 - k0) with 0 < k0 < k1.  Arbitrary monotone
    coefficients can be supplied as a sampled table via ``from_table``;
    the table is interpolated piecewise-linearly in a and validated at
    load time.
    """

    def __init__(self, k0=1.0, k1=4.0):
        if not 0.0 < k0 < k1:
            raise ValueError(f"need 0 < k0 < k1, got k0={k0}, k1={k1}")
        self.k0 = float(k0)
        self.k1 = float(k1)
        self._table = None
        self.a_min = self.a(0.0)
        self.a_max = self.a(1.0)

    @classmethod
    def from_table(cls, lams, a_values):
        """Build a model from sampled (lam, a) pairs, interpolated linearly."""
        lams = [float(x) for x in lams]
        a_values = [float(x) for x in a_values]
        if len(lams) != len(a_values) or len(lams) < 2:
            raise ValueError("table needs at least two (lam, a) samples")
        if lams[0] != 0.0 or lams[-1] != 1.0:
            raise ValueError("table must cover lam in [0, 1] inclusive")
        for x0, x1 in zip(lams, lams[1:]):
            if not x1 > x0:
                raise ValueError("table lam samples must be strictly increasing")
        for y0, y1 in zip(a_values, a_values[1:]):
            if not y1 > y0:
                raise ValueError("table a samples must be strictly increasing")
        if a_values[0] <= 0.0:
            raise ValueError("coefficient a must be positive")
        model = cls.__new__(cls)
        model.k0 = a_values[0] ** 2
        model.k1 = a_values[-1] ** 2
        model._table = (lams, a_values)
        model.a_min = a_values[0]
        model.a_max = a_values[-1]
        return model

    def a(self, lam):
        """Coefficient a(lam) > 0."""
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"vapor fraction must lie in [0, 1], got {lam}")
        if self._table is None:
            return math.sqrt(self.k0 + lam * (self.k1 - self.k0))
        xs, ys = self._table
        if lam == xs[-1]:
            return ys[-1]
        i = bisect_right(xs, lam) - 1
        t = (lam - xs[i]) / (xs[i + 1] - xs[i])
        return ys[i] + t * (ys[i + 1] - ys[i])

    def a2(self, lam):
        aa = self.a(lam)
        return aa * aa

    def pressure(self, v, lam):
        """p(v, lam) = a^2(lam)/v."""
        if not v > 0.0:
            raise ValueError(f"specific volume must be positive, got {v}")
        return self.a2(lam) / v

    def char_speed(self, state):
        """c = sqrt(-p_v) = a(lam)/v, the positive characteristic speed."""
        return self.a(state.lam) / state.v

    def eigenvalues(self, state):
        """(e1, e2, e3) = (-a/v, 0, a/v); strictly hyperbolic ordering."""
        c = self.char_speed(state)
        return (-c, 0.0, c)

    def riemann_invariants(self, state):
        """Diagnostic only: the pairs (u - a log v, lam), (u, p), (u + a log v, lam)."""
        aa = self.a(state.lam)
        lv = math.log(state.v)
        return (
            (state.u - aa * lv, state.lam),
            (state.u, self.pressure(state.v, state.lam)),
            (state.u + aa * lv, state.lam),
        )


def strength2(a_left, a_right):
    """Contact strength 2*(a_r - a_l)/(a_r + a_l)."""
    return 2.0 * (a_right - a_left) / (a_right + a_left)


def curve_phi13(family, v, base, pm):
    """u-coordinate of the shock-rarefaction curve of the given family through base.

    Evaluated in the strength form u_o + 2 a(lam_o) h(eps); the branch-wise
    log / (v - v_o)/sqrt(v v_o) formulas agree with it identically.
    """
    if family not in (1, 3):
        raise ValueError(f"family must be 1 or 3, got {family}")
    if not v > 0.0:
        raise ValueError(f"specific volume must be positive, got {v}")
    if family == 1:
        eps = 0.5 * math.log(v / base.v)
    else:
        eps = 0.5 * math.log(base.v / v)
    return base.u + 2.0 * pm.a(base.lam) * h(eps)


def curve_phi2(lam_target, base, pm):
    """Contact curve: volume scaled by a^2(lam)/a^2(lam_o), u and p preserved."""
    ratio = pm.a2(lam_target) / pm.a2(base.lam)
    return State(base.v * ratio, base.u, lam_target)


def apply_wave(family, left, eps, pm):
    """Right state of a wave of the given family and signed strength through `left`."""
    if family == 2:
        raise ValueError("use curve_phi2 for contact waves")
    if family == 1:
        v = left.v * math.exp(2.0 * eps)
    elif family == 3:
        v = left.v * math.exp(-2.0 * eps)
    else:
        raise ValueError(f"family must be 1 or 3, got {family}")
    u = left.u + 2.0 * pm.a(left.lam) * h(eps)
    return State(v, u, left.lam)


def strengths_from_states(family, left, right, pm, rtol=MEMBERSHIP_RTOL):
    """Signed strength of the wave joining two states on a single curve.

    Families 1 and 3 are checked through the u-residual of the curve,
    family 2 through equality of u and of pressure.
    """
    scale_u = max(1.0, abs(left.u), abs(right.u))
    if family in (1, 3):
        if left.lam != right.lam:
            raise CurveMembershipError("1- and 3-waves do not jump lambda")
        u_curve = curve_phi13(family, right.v, left, pm)
        if abs(right.u - u_curve) > rtol * scale_u:
            raise CurveMembershipError(
                f"states not on a {family}-curve: u residual {right.u - u_curve:.3e}"
            )
        if family == 1:
            return 0.5 * math.log(right.v / left.v)
        return 0.5 * math.log(left.v / right.v)
    if family == 2:
        if abs(right.u - left.u) > rtol * scale_u:
            raise CurveMembershipError("velocity must be continuous across a contact")
        p_l = pm.pressure(left.v, left.lam)
        p_r = pm.pressure(right.v, right.lam)
        if abs(p_r - p_l) > rtol * max(p_l, p_r):
            raise CurveMembershipError("pressure must be continuous across a contact")
        return strength2(pm.a(left.lam), pm.a(right.lam))
    raise ValueError(f"family must be 1, 2 or 3, got {family}")
