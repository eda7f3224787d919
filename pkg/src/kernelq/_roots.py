"""Bracketed root finding: bisection with Newton polishing."""
from __future__ import annotations

import math
from typing import Callable, Optional

from .errors import NoConvergence

EXPAND_CAP = 2.0**60


def expand_upper(f: Callable[[float], float], lo: float, limit: float = math.inf,
                 start: float = 2.0) -> float:
    """Return ``hi > lo`` with ``f(hi) >= 0``, assuming ``f(lo) < 0``.

    Doubles from ``start``; when a finite ``limit`` (a pole of ``f``)
    would be crossed the candidate moves halfway towards it instead.
    """
    hi = max(start, lo)
    while True:
        if hi >= limit:
            hi = 0.5 * (lo + limit)
        if f(hi) >= 0:
            return hi
        lo = hi
        if hi > EXPAND_CAP or (limit < math.inf and limit - hi < 1e-15 * limit):
            raise NoConvergence(f"no sign change found below {min(hi, limit):.6g}")
        hi = 2.0 * hi


def safe_newton(f: Callable[[float], float], df: Optional[Callable[[float], float]],
                lo: float, hi: float, ftol: float = 1e-13, maxiter: int = 400) -> float:
    """Root of ``f`` in ``[lo, hi]`` where ``f(lo) < 0 <= f(hi)`` or the reverse.

    Newton steps are taken when they stay inside the current bracket,
    otherwise the bracket is bisected. Stops when ``|f| < ftol`` or the
    bracket collapses to machine precision.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise NoConvergence(f"root not bracketed by [{lo}, {hi}]")
    # orient so that f(neg) < 0 < f(pos)
    neg, pos = (lo, hi) if flo < 0 else (hi, lo)
    x = 0.5 * (lo + hi)
    for _ in range(maxiter):
        fx = f(x)
        if abs(fx) < ftol:
            return x
        if fx < 0:
            neg = x
        else:
            pos = x
        step_ok = False
        if df is not None:
            d = df(x)
            if d != 0 and math.isfinite(d):
                xn = x - fx / d
                a, b = min(neg, pos), max(neg, pos)
                if a < xn < b:
                    x, step_ok = xn, True
        if not step_ok:
            xm = 0.5 * (neg + pos)
            if xm == neg or xm == pos:
                return x
            x = xm
        if abs(pos - neg) <= 4 * math.ulp(max(abs(pos), abs(neg))):
            return x
    raise NoConvergence(f"no convergence after {maxiter} iterations near {x}")
