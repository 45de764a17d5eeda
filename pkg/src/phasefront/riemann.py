"""Exact Riemann solver for the two-phase p-system.

The fan between two states consists of a 1-wave, a stationary contact
carrying the lambda jump, and a 3-wave.  The strengths satisfy

    eps3 - eps1 = (1/2) log(p_r / p_l)
    2 (a_l h(eps1) + a_r h(eps3)) = u_r - u_l

which reduces to one strictly monotone scalar equation in eps1.  Shock
fronts move at their Rankine-Hugoniot speed -/+ a/sqrt(v_l v_r) and
satisfy the Lax inequalities; rarefaction fronts in the tracking scheme
move at the characteristic speed of their right state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    STRENGTH_ZERO,
    State,
    WaveStrengths,
    apply_wave,
    curve_phi2,
    dh,
    h,
    strength2,
    strengths_from_states,
)


class RiemannConvergenceError(RuntimeError):
    """The strength iteration did not converge (pathological input states)."""


@dataclass(frozen=True)
class WaveSpeed:
    """Speed data of one wave of a fan.

    Shocks and contacts have head == tail; rarefactions carry their edge
    characteristic speeds.  kind is 'shock', 'rarefaction', 'contact' or
    'none' for an absent wave.
    """

    kind: str
    head: float = 0.0
    tail: float = 0.0


@dataclass(frozen=True)
class RiemannFan:
    """Solution of a Riemann problem: states, strengths and wave speeds."""

    left: State
    mid1: State
    mid2: State
    right: State
    strengths: WaveStrengths
    speeds: tuple


def _speed_13(family, eps, left, right, pm):
    if eps == 0.0:
        return WaveSpeed("none")
    a = pm.a(left.lam)
    if eps < 0.0:
        s = a / math.sqrt(left.v * right.v)
        if family == 1:
            s = -s
        return WaveSpeed("shock", s, s)
    sign = -1.0 if family == 1 else 1.0
    return WaveSpeed("rarefaction", sign * a / left.v, sign * a / right.v)


def solve(left, right, pm, tol=1e-12, max_iter=200):
    """Exact fan between two states; residuals below `tol` on both relations."""
    a_l = pm.a(left.lam)
    a_r = pm.a(right.lam)
    p_l = pm.pressure(left.v, left.lam)
    p_r = pm.pressure(right.v, right.lam)
    delta = 0.5 * math.log(p_r / p_l)
    du = right.u - left.u

    def g(e1):
        return 2.0 * (a_l * h(e1) + a_r * h(e1 + delta)) - du

    def dg(e1):
        return 2.0 * (a_l * dh(e1) + a_r * dh(e1 + delta))

    # g is strictly increasing with slope >= 2(a_l + a_r), so the root is
    # within |g(0)| / (2(a_l + a_r)) of the origin; pad to a safe bracket.
    g0 = g(0.0)
    half = abs(g0) / (2.0 * (a_l + a_r))
    lo = -half - 1e-12
    hi = half + 1e-12
    eps1 = min(max(-g0 / dg(0.0), lo), hi)
    converged = False
    for _ in range(max_iter):
        val = g(eps1)
        if abs(val) <= tol:
            converged = True
            break
        if val > 0.0:
            hi = eps1
        else:
            lo = eps1
        step = eps1 - val / dg(eps1)
        eps1 = step if lo < step < hi else 0.5 * (lo + hi)
    if not converged:
        raise RiemannConvergenceError(
            f"no convergence after {max_iter} iterations for {left} -> {right}"
        )

    eps3 = eps1 + delta
    if abs(eps1) < STRENGTH_ZERO:
        eps1 = 0.0
    if abs(eps3) < STRENGTH_ZERO:
        eps3 = 0.0
    eps2 = strength2(a_l, a_r)
    if abs(eps2) < STRENGTH_ZERO:
        eps2 = 0.0

    mid1 = apply_wave(1, left, eps1, pm) if eps1 != 0.0 else State(left.v, left.u, left.lam)
    mid2 = curve_phi2(right.lam, mid1, pm)
    speeds = (
        _speed_13(1, eps1, left, mid1, pm),
        WaveSpeed("contact") if eps2 != 0.0 else WaveSpeed("none"),
        _speed_13(3, eps3, mid2, right, pm),
    )
    return RiemannFan(left, mid1, mid2, right, WaveStrengths(eps1, eps2, eps3), speeds)


def wave_speed(family, left, right, pm):
    """Front propagation speed used by the tracking scheme.

    Shocks move at the Rankine-Hugoniot speed of the jump, rarefaction
    fronts at the characteristic speed of their right state, contacts
    stand still.  The side states must lie on a common curve.
    """
    if family == 2:
        strengths_from_states(2, left, right, pm)
        return 0.0
    eps = strengths_from_states(family, left, right, pm)
    a = pm.a(left.lam)
    if eps < 0.0:
        s = a / math.sqrt(left.v * right.v)
        return -s if family == 1 else s
    c = a / right.v
    return -c if family == 1 else c


def rarefaction_edge_speeds(family, left, right, pm):
    """Characteristic speeds at both edges of a rarefaction (head, tail pair)."""
    eps = strengths_from_states(family, left, right, pm)
    if eps < 0.0:
        raise ValueError("edge speeds are defined for rarefactions only")
    a = pm.a(left.lam)
    sign = -1.0 if family == 1 else 1.0
    return (sign * a / left.v, sign * a / right.v)


def split_rarefaction(eps, eta):
    """Split a rarefaction into N = floor(eps/eta) + 1 equal parts below eta."""
    if not eps > 0.0:
        raise ValueError(f"rarefaction strength must be positive, got {eps}")
    if not eta > 0.0:
        raise ValueError(f"splitting cap must be positive, got {eta}")
    n = int(math.floor(eps / eta)) + 1
    return [eps / n] * n
