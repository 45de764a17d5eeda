"""Numerics behind the interaction estimates: the reflected-wave root
function, the damping coefficient d(m), the shock/rarefaction threshold
curve x_o(z), and grid certificates for the inequalities used by the
functional decrease argument.

All scalar root-finds use bracketing bisection with Newton acceleration;
the brackets come from explicit sign evaluations of the residuals.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import riemann
from .model import State, apply_wave, dh, h
from ._rootfind import bracketed_root, expand_bracket

# Ratios |tau|/min(|a|,|b|) are not sampled closer to the axes than this;
# on the axes the continuous extension |tau_a(0,b)| is used instead.
AXIS_EXCLUSION = 1e-6


def reflected_strength(a, b, xtol=1e-13):
    """Strength tau of the reflected wave when same-family waves a, b interact.

    Unique root of h(tau) + h(tau + a + b) - h(a) - h(b) = 0; satisfies
    |tau| < min(|a|, |b|) for a*b != 0 and tau(a, 0) = tau(0, b) = 0.
    """
    if a == 0.0 or b == 0.0:
        return 0.0
    rhs = h(a) + h(b)
    s = a + b

    def f(t):
        return h(t) + h(t + s) - rhs

    def df(t):
        return dh(t) + dh(t + s)

    half = min(abs(a), abs(b)) * (1.0 + 1e-9) + 1e-30
    lo, hi = -half, half
    if f(lo) * f(hi) > 0.0:
        lo, hi = expand_bracket(f, 0.0, half)
    return bracketed_root(f, lo, hi, df=df, xtol=xtol)


def _reflected_strength_grid(A, B, iters=90):
    """Vectorized bisection for the reflected strength over numpy grids."""

    def h_arr(x):
        return np.where(x >= 0.0, x, np.sinh(np.minimum(x, 0.0)))

    rhs = h_arr(A) + h_arr(B)
    s = A + B
    half = np.minimum(np.abs(A), np.abs(B)) * (1.0 + 1e-9) + 1e-30
    lo = -half
    hi = half
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        val = h_arr(mid) + h_arr(mid + s) - rhs
        neg = val < 0.0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    tau = 0.5 * (lo + hi)
    return np.where((A == 0.0) | (B == 0.0), 0.0, tau)


def axis_ratio_limit(b):
    """Continuous extension of |tau(a, b)|/|a| as a -> 0: |1 - h'(b)|/(1 + h'(b))."""
    d = dh(b)
    return abs(1.0 - d) / (1.0 + d)


def c_of_m(m):
    """(cosh m - 1)/(cosh m + 1); lower bound for d(m) and the SR->SS damping."""
    if m < 0.0:
        raise ValueError(f"strength budget must be nonnegative, got {m}")
    cm = math.cosh(m)
    return (cm - 1.0) / (cm + 1.0)


@lru_cache(maxsize=256)
def damping_coefficient(m, grid=201, refine_rounds=4):
    """Worst-case ratio |tau(a, b)| / min(|a|, |b|) over the square |a|,|b| <= m.

    Grid maximization with local refinement around the running maximizer;
    the a -> 0 and b -> 0 edges enter through the analytic derivative
    limit, whose maximum over the square is c(m).  The result increases
    with m, vanishes quadratically as m -> 0 and tends to 1 from below.
    """
    if not m > 0.0:
        raise ValueError(f"strength budget must be positive, got {m}")

    def ratio_max_on(av, bv):
        A, B = np.meshgrid(av, bv, indexing="ij")
        tau = _reflected_strength_grid(A, B)
        ratio = np.abs(tau) / np.minimum(np.abs(A), np.abs(B))
        k = int(np.argmax(ratio))
        i, j = divmod(k, B.shape[1])
        return float(ratio[i, j]), float(A[i, j]), float(B[i, j])

    def axis_values(lo, hi):
        return np.array([x for x in np.linspace(lo, hi, grid) if abs(x) >= AXIS_EXCLUSION])

    best, a_best, b_best = ratio_max_on(axis_values(-m, m), axis_values(-m, m))
    span = 2.0 * m / (grid - 1)
    for _ in range(refine_rounds):
        a_lo, a_hi = max(-m, a_best - span), min(m, a_best + span)
        b_lo, b_hi = max(-m, b_best - span), min(m, b_best + span)
        cand = ratio_max_on(axis_values(a_lo, a_hi), axis_values(b_lo, b_hi))
        if cand[0] > best:
            best, a_best, b_best = cand
        span *= 2.0 / (grid - 1)

    return max(best, c_of_m(m))


def k_of_m(m, d=None):
    """(1 - sqrt(d(m))) / (2 - sqrt(d(m))); k(0) = 1/2 and k decreases in m."""
    if m == 0.0:
        return 0.5
    if d is None:
        d = damping_coefficient(m)
    root = math.sqrt(d)
    return (1.0 - root) / (2.0 - root)


def threshold_f(x, z):
    """Residual sinh(x - z) - sinh(z) + x of the SS/SR threshold relation."""
    return math.sinh(x - z) - math.sinh(z) + x


def threshold_x0(z, xtol=1e-13):
    """Rarefaction size that exactly cancels a shock of size z.

    Unique root of sinh(x - z) - sinh(z) + x = 0, bracketed by [z, 2z]
    since f(z, z) = z - sinh(z) <= 0 and f(2z, z) = 2z >= 0; strictly
    increasing in z, with x_o(z) - 2z -> 0 as z -> infinity.
    """
    if z < 0.0:
        raise ValueError(f"shock magnitude must be nonnegative, got {z}")
    if z == 0.0:
        return 0.0

    def f(x):
        return threshold_f(x, z)

    def df(x):
        return math.cosh(x - z) + 1.0

    return bracketed_root(f, z, 2.0 * z, df=df, xtol=xtol)


def phi_fabrizio(z, c):
    """sinh(cz) - sinh(z) + (1 + c) z; nonnegative while cosh(z) <= (1+c)/(1-c)."""
    return math.sinh(c * z) - math.sinh(z) + (1.0 + c) * z


def z_cap(c):
    """Largest z with cosh(z) <= (1 + c)/(1 - c)."""
    return math.acosh((1.0 + c) / (1.0 - c))


@dataclass(frozen=True)
class DampingCurve:
    """Sampled damping coefficient with its closed-form companions."""

    m_grid: tuple
    d_values: tuple
    c_values: tuple
    k_values: tuple
    grid_resolution: int

    def rows(self):
        return list(zip(self.m_grid, self.d_values, self.c_values, self.k_values))


def damping_curve(m_values, grid=201):
    """Evaluate (m, d(m), c(m), k(m)) along a grid of budgets."""
    ms = [float(m) for m in m_values]
    ds = [damping_coefficient(m, grid=grid) for m in ms]
    cs = [c_of_m(m) for m in ms]
    ks = [k_of_m(m, d=d) for m, d in zip(ms, ds)]
    return DampingCurve(tuple(ms), tuple(ds), tuple(cs), tuple(ks), grid)


@dataclass
class CertificateReport:
    """Outcome of the appendix inequality certificates."""

    passed: bool
    checks: dict
    failures: list
    grid_hash: str
    tol: float


@dataclass(frozen=True)
class CertificateGrid:
    """Grid specification for verify_appendix_inequalities."""

    c_values: tuple = (0.1, 0.25, 0.5, 0.75, 0.9)
    n_z: int = 400
    m: float = 1.5
    n_samples: int = 400
    seed: int = 20240901
    tol: float = 1e-10


def _sr_ss_fan(alpha, beta, pm):
    """Resolve a 3-rarefaction (size beta) hit from behind by a 3-shock (alpha < 0)."""
    left = State(1.0, 0.0, 0.5)
    mid = apply_wave(3, left, beta, pm)
    right = apply_wave(3, mid, alpha, pm)
    return riemann.solve(left, right, pm)


def verify_appendix_inequalities(spec=None, pm=None):
    """Certify the appendix estimates on a grid; failures pinpoint the node.

    Checks, at tolerance spec.tol:
      * phi(z, c) >= -tol wherever cosh(z) <= (1+c)/(1-c);
      * for sampled shock/rarefaction interactions with shock size <= m
        that produce two outgoing shocks: the reflected wave is below
        c(m) times either incoming size, the shock-variation growth is
        bounded by (2c-1) times the rarefaction, and the rarefaction
        does not exceed the threshold x_o(shock size);
      * rarefactions larger than the threshold yield an outgoing
        rarefaction instead (threshold sharpness).
    """
    from .model import PressureModel

    if spec is None:
        spec = CertificateGrid()
    if pm is None:
        pm = PressureModel(1.0, 4.0)

    failures = []
    checks = {}
    tol = spec.tol

    # phi(z, c) >= 0 on the constrained strip, certified numerically.
    n_phi = 0
    for c in spec.c_values:
        zc = z_cap(c)
        for z in np.linspace(0.0, zc, spec.n_z):
            n_phi += 1
            val = phi_fabrizio(float(z), c)
            if val < -tol:
                failures.append(("phi_nonnegative", {"c": c, "z": float(z)}, val))
    checks["phi_nonnegative"] = n_phi

    # SR -> SS sweep through the Riemann solver.
    rng = np.random.default_rng(spec.seed)
    cm = c_of_m(spec.m)
    n_ss = 0
    n_sharp = 0
    for _ in range(spec.n_samples):
        z = float(rng.uniform(0.05, spec.m))
        x0 = threshold_x0(z)
        beta = float(rng.uniform(0.02, 0.98)) * x0
        fan = _sr_ss_fan(-z, beta, pm)
        e1, e3 = fan.strengths.eps1, fan.strengths.eps3
        n_ss += 1
        node = {"alpha": -z, "beta": beta}
        if not (e1 < 0.0 and e3 < 0.0):
            failures.append(("ss_outcome", node, (e1, e3)))
            continue
        if abs(e1) > cm * beta + tol:
            failures.append(("reflected_vs_rarefaction", node, abs(e1) - cm * beta))
        if abs(e1) > cm * z + tol:
            failures.append(("reflected_vs_shock", node, abs(e1) - cm * z))
        if abs(e1) + abs(e3) - z > (2.0 * cm - 1.0) * beta + tol:
            failures.append(
                ("shock_variation", node, abs(e1) + abs(e3) - z - (2.0 * cm - 1.0) * beta)
            )
        if not beta <= x0 + tol:
            failures.append(("threshold_bound", node, beta - x0))
        # Just above the threshold the outgoing same-family wave rarefies.
        beta_hi = x0 * (1.0 + float(rng.uniform(0.01, 0.5)))
        fan_hi = _sr_ss_fan(-z, beta_hi, pm)
        n_sharp += 1
        if not fan_hi.strengths.eps3 > -tol:
            failures.append(("threshold_sharpness", {"alpha": -z, "beta": beta_hi},
                             fan_hi.strengths.eps3))
    checks["sr_ss_sweep"] = n_ss
    checks["threshold_sharpness"] = n_sharp

    payload = repr((spec.c_values, spec.n_z, spec.m, spec.n_samples, spec.seed, spec.tol))
    grid_hash = hashlib.sha256(payload.encode()).hexdigest()
    return CertificateReport(not failures, checks, failures, grid_hash, tol)
