"""Galton-Watson tree functions and the characteristic roots of the kernels.

The tree function ``T_A`` of an offspring law ``A`` is the small root of
``T = z A(T)``. Its coefficients are the size distribution of a
Galton-Watson tree, which is also the law of the length of an
inter-empty period of a queue fed by ``A``. The roots ``beta``,
``gamma`` and ``delta`` locate the dominant poles of the stationary
generating functions and therefore the exponential tail decay.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._roots import expand_upper, safe_newton
from .errors import (
    BeyondRadius,
    DegenerateLinear,
    NeverEmpty,
    NoConvergence,
    NoPoleSingularity,
    Unstable,
)
from .pgf import Pgf
from .series import TruncatedSeries, divide

ROOT_TOL = 1e-12
RADIUS_TOL = 1e-12
BRACKET_START = 1.0 + 1e-9


def _check_offspring(a: Pgf) -> None:
    lam = a.mean()
    if lam >= 1.0:
        raise Unstable(f"mean arrivals {lam:.6g} >= 1")
    if a.p0 <= 0.0:
        raise NeverEmpty("P(A = 0) = 0: the queue never empties")


@dataclass(frozen=True)
class TreeFunction:
    """``T_A`` with its tangency abscissa ``tau`` and radius ``rho = tau / A(tau)``.

    For a linear offspring law ``a0 + a1 x`` there is no tangency:
    ``tau`` is infinite and ``rho = 1 / a1`` (infinite when ``a1 = 0``),
    the point where ``T_A(z) = a0 z / (1 - a1 z)`` blows up.
    """

    offspring: Pgf
    tau: float
    rho: float

    @property
    def is_linear(self) -> bool:
        return math.isinf(self.tau)

    def __call__(self, z: float) -> float:
        return tree_eval(self, z)


def build_tree_function(a: Pgf) -> TreeFunction:
    _check_offspring(a)
    if a.is_linear:
        a1 = a.deriv(0.0)
        return TreeFunction(a, math.inf, math.inf if a1 == 0 else 1.0 / a1)

    # x A'(x) - A(x) is increasing on x > 0 and equals lambda - 1 < 0 at x = 1
    def f(x):
        return x * a.deriv(x) - a.eval(x)

    def df(x):
        return x * a.deriv2(x)

    hi = expand_upper(f, 1.0, a.radius)
    tau = safe_newton(f, df, 1.0, hi, ftol=1e-14)
    return TreeFunction(a, tau, tau / a.eval(tau))


def tree_eval(t: TreeFunction, z: float) -> float:
    """Small root of ``x = z A(x)`` for ``0 <= z <= rho``."""
    a = t.offspring
    if z < 0:
        raise BeyondRadius(f"tree function evaluated at negative argument {z}")
    if t.is_linear:
        if z >= t.rho:
            raise BeyondRadius(f"z = {z} is at or beyond the pole {t.rho}")
        a0, a1 = a.eval(0.0), a.deriv(0.0)
        return a0 * z / (1.0 - a1 * z)
    if z > t.rho + RADIUS_TOL:
        raise BeyondRadius(f"z = {z} exceeds the radius {t.rho}")
    if z == 0.0:
        return 0.0
    if z >= t.rho - RADIUS_TOL:
        return t.tau

    # g(0) = -z a0 < 0 and g(tau) = A(tau) (rho - z) > 0
    def g(x):
        return x - z * a.eval(x)

    def dg(x):
        return 1.0 - z * a.deriv(x)

    return safe_newton(g, dg, 0.0, t.tau, ftol=1e-13)


def tree_deriv(t: TreeFunction, z: float) -> float:
    """``T_A'(z) = A(T) / (1 - z A'(T))`` for ``0 <= z < rho``."""
    if z >= t.rho - RADIUS_TOL and not t.is_linear:
        raise BeyondRadius(f"T_A' is infinite at the radius {t.rho}")
    x = tree_eval(t, z)
    a = t.offspring
    return a.eval(x) / (1.0 - z * a.deriv(x))


def tree_series(t: TreeFunction, order: int) -> TruncatedSeries:
    """Coefficients of ``T_A`` by the fixed-point iteration ``T <- z A(T)``.

    Pass ``k`` makes coefficient ``k`` exact, so each pass only works at
    order ``k``.
    """
    if order < 1:
        raise ValueError("tree_series needs order >= 1")
    a = t.offspring
    w = np.zeros(order + 1)
    for k in range(1, order + 1):
        cur = TruncatedSeries(w[:k])
        w[1 : k + 1] = a.compose(cur).coeffs
    return TruncatedSeries(w)


def empty_probability_series(t: TreeFunction, t_max: int) -> TruncatedSeries:
    """Coefficients of ``1 / (1 - T_A(z))``: entry ``t`` is ``P(X_t = 0)`` from empty."""
    if t_max == 0:
        return TruncatedSeries([1.0])
    one = TruncatedSeries.constant(1.0, t_max)
    return divide(one, one - tree_series(t, t_max))


def second_fixed_point(a: Pgf) -> float:
    """``beta > 1`` with ``A(beta) = beta``."""
    _check_offspring(a)
    if a.is_linear:
        raise DegenerateLinear("A is linear: u = A(u) has no root beyond 1 (beta = +inf)")

    def h(u):
        return a.eval(u) - u

    def dh(u):
        return a.deriv(u) - 1.0

    hi = expand_upper(h, BRACKET_START, a.radius)
    return safe_newton(h, dh, BRACKET_START, hi, ftol=ROOT_TOL)


def geometric_kernel_root(a: Pgf, p: float) -> float:
    """``gamma > 1`` with ``A(gamma) S(1/gamma) = 1`` where ``S(x) = 1 - p + p x``.

    Solved in the cleared form ``A(u) ((1 - p) u + p) = u``.
    """
    lam = a.mean()
    if not 0.0 < p <= 1.0:
        raise Unstable(f"service probability {p} outside (0, 1]")
    if lam >= p:
        raise Unstable(f"mean arrivals {lam:.6g} >= service probability {p:.6g}")
    if a.p0 <= 0.0:
        raise NeverEmpty("P(A = 0) = 0: the queue never empties")
    if a.is_linear and p == 1.0:
        raise DegenerateLinear("A is linear and service is deterministic: gamma = +inf")

    def h(u):
        return a.eval(u) * ((1.0 - p) * u + p) - u

    def dh(u):
        return a.deriv(u) * ((1.0 - p) * u + p) + a.eval(u) * (1.0 - p) - 1.0

    hi = expand_upper(h, BRACKET_START, a.radius)
    return safe_newton(h, dh, BRACKET_START, hi, ftol=ROOT_TOL)


def tree_compose_series(a: Pgf, b: Pgf, order: int, tol: float = 1e-13,
                        max_iter: int = 200) -> TruncatedSeries:
    """Series of ``W(v) = T_A(B(v))``, the solution of ``W = B(v) A(W)``.

    Series Newton iteration seeded with the scalar ``T_A(B(0))``.
    """
    if a.mean() + b.mean() >= 1.0:
        raise Unstable(f"total load {a.mean() + b.mean():.6g} >= 1")
    t = build_tree_function(a)
    bs = b.as_series(order)
    w = TruncatedSeries.constant(tree_eval(t, b.p0), order)
    for _ in range(max_iter):
        resid = w - bs * a.compose(w)
        if np.max(np.abs(resid.coeffs)) < tol:
            return w
        w = w - divide(resid, 1.0 - bs * a.compose_deriv(w))
    raise NoConvergence(f"series Newton for T_A(B(v)) did not converge in {max_iter} steps")


def composite_tree_root(a: Pgf, b: Pgf) -> float:
    """``delta > 1`` with ``T_A(B(delta)) = delta``.

    The search is confined to ``B(v) <= rho(T_A)``. When the curve
    ``T_A(B(v))`` reaches the branch point before crossing the diagonal
    there is no pole and :class:`NoPoleSingularity` is raised.
    """
    lam_a, lam_b = a.mean(), b.mean()
    if lam_a + lam_b >= 1.0:
        raise Unstable(f"total load {lam_a + lam_b:.6g} >= 1")
    t = build_tree_function(a)
    if b.is_linear and b.deriv(0.0) == 0.0:
        raise DegenerateLinear("B is a point mass at 0: no low-priority traffic")

    # v_max solves B(v_max) = rho
    if math.isinf(t.rho):
        v_max = b.radius
    else:
        hi = expand_upper(lambda v: b.eval(v) - t.rho, 1.0, b.radius)
        v_max = safe_newton(lambda v: b.eval(v) - t.rho, b.deriv, 1.0, hi, ftol=1e-15)

    def h(v):
        return v - tree_eval(t, b.eval(v))

    def dh(v):
        try:
            return 1.0 - tree_deriv(t, b.eval(v)) * b.deriv(v)
        except BeyondRadius:
            return -math.inf

    if math.isinf(v_max):
        # T_A(B(v)) has no finite singularity: expand the bracket instead
        try:
            hi = expand_upper(lambda v: -h(v), BRACKET_START)
        except NoConvergence:
            raise DegenerateLinear("v = T_A(B(v)) has no root beyond 1 (delta = +inf)") from None
    elif t.is_linear:
        # T_A(B(v)) has a pole at v_max: approach it until h turns negative
        gap = v_max - 1.0
        hi = v_max - gap / 2
        while h(hi) >= 0:
            gap /= 2
            hi = v_max - gap / 2
            if gap < 1e-15 * v_max:
                raise NoConvergence("could not bracket delta below the pole of T_A(B(v))")
    else:
        # T_A(rho) = tau, so h(v_max) = v_max - tau
        if v_max - t.tau > 0:
            raise NoPoleSingularity(
                f"T_A(B(v)) reaches its branch point at v = {v_max:.6g} before crossing v")
        hi = v_max
    return safe_newton(h, dh, BRACKET_START, hi, ftol=ROOT_TOL)
