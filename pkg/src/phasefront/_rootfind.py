"""Safeguarded scalar root finding: bisection with Newton acceleration.

Every scalar equation in this package has a strictly monotone residual, so
a sign-change bracket plus bisection is guaranteed to converge; a Newton
step is taken whenever it stays inside the current bracket.
"""

from __future__ import annotations


class RootFindError(RuntimeError):
    pass


def bracketed_root(f, lo, hi, df=None, xtol=1e-13, ftol=0.0, max_iter=200):
    """Root of f in [lo, hi], where f(lo) and f(hi) have opposite signs.

    Converges to |interval| <= xtol or |f| <= ftol.  `df`, if given, enables
    Newton acceleration; steps leaving the bracket fall back to bisection.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise RootFindError(f"no sign change on [{lo}, {hi}]: f={flo:.3e}, {fhi:.3e}")

    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        fx = f(x)
        if fx == 0.0 or abs(fx) <= ftol:
            return x
        if (fx > 0.0) == (fhi > 0.0):
            hi, fhi = x, fx
        else:
            lo, flo = x, fx
        if hi - lo <= xtol:
            return 0.5 * (lo + hi)
        x_new = None
        if df is not None:
            d = df(x)
            if d != 0.0:
                cand = x - fx / d
                if lo < cand < hi:
                    x_new = cand
        x = 0.5 * (lo + hi) if x_new is None else x_new
    return x


def expand_bracket(f, x0, step, lo_limit=None, hi_limit=None, max_expand=200):
    """Grow [x0 - step, x0 + step] geometrically until f changes sign."""
    lo = x0 - step
    hi = x0 + step
    if lo_limit is not None:
        lo = max(lo, lo_limit)
    if hi_limit is not None:
        hi = min(hi, hi_limit)
    flo = f(lo)
    fhi = f(hi)
    for _ in range(max_expand):
        if flo * fhi <= 0.0:
            return lo, hi
        step *= 2.0
        lo = x0 - step
        hi = x0 + step
        if lo_limit is not None:
            lo = max(lo, lo_limit)
        if hi_limit is not None:
            hi = min(hi, hi_limit)
        flo = f(lo)
        fhi = f(hi)
    raise RootFindError(f"could not bracket a root around {x0}")
