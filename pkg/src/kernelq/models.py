"""Stationary analysis of the four discrete-time queueing models.

Each model yields the generating function of the stationary queue
length (as a truncated series, except for the tandem queue), the exact
tail ``P(X >= R)``, and the pair ``(C, r)`` of the asymptotic
equivalent ``P(X >= R) ~ C r**-R``.

Stationary series are built with the factor ``(u - 1)`` cancelled
analytically: for a distribution ``F`` the series ``(F(u) - 1)/(u - 1)``
has coefficients ``P(F > n)`` (see :func:`series.survival`), so no
division by a series vanishing at ``u = 1`` is ever performed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from . import kernel
from .errors import (
    DegenerateBoundary,
    InputError,
    NearPole,
    NeverEmpty,
    NonFiniteResult,
    Unstable,
)
from .pgf import Pgf
from .series import TruncatedSeries, divide, survival, tail_transform

MIN_ORDER_MARGIN = 16


@dataclass(frozen=True)
class SingleDeterministic:
    arrivals: Pgf

    def check(self) -> None:
        lam = self.arrivals.mean()
        if lam >= 1.0:
            raise Unstable(f"mean arrivals {lam:.6g} >= 1")


@dataclass(frozen=True)
class RandomService:
    arrivals: Pgf
    p: float

    def check(self) -> None:
        lam = self.arrivals.mean()
        if not 0.0 < self.p <= 1.0:
            raise InputError(f"service probability {self.p} outside (0, 1]")
        if lam >= self.p:
            raise Unstable(f"mean arrivals {lam:.6g} >= service probability {self.p:.6g}")


@dataclass(frozen=True)
class PriorityLowFlow:
    """Low-priority flow ``B`` sharing one server with high-priority flow ``A``."""

    arrivals_hi: Pgf
    arrivals_lo: Pgf

    def check(self) -> None:
        _check_joint(self.arrivals_hi, self.arrivals_lo)


@dataclass(frozen=True)
class TandemSecondQueue:
    """Second queue of a tandem fed by queue 1 (arrivals ``A``) and external ``B``."""

    arrivals_1: Pgf
    arrivals_2: Pgf

    def check(self) -> None:
        _check_joint(self.arrivals_1, self.arrivals_2)


ModelSpec = Union[SingleDeterministic, RandomService, PriorityLowFlow, TandemSecondQueue]


def _check_joint(a: Pgf, b: Pgf) -> None:
    load = a.mean() + b.mean()
    if load >= 1.0:
        raise Unstable(f"total load {load:.6g} >= 1")


@dataclass(frozen=True)
class StationaryAnalysis:
    pgf: Optional[TruncatedSeries]
    tail: Optional[np.ndarray]
    asym_prefactor: float
    asym_base: float
    doob_prefactor: float
    doob_base: float

    def asymptotic(self, r):
        return self.asym_prefactor * np.power(self.asym_base, -np.asarray(r, dtype=float))

    def doob(self, r):
        return self.doob_prefactor * np.power(self.doob_base, -np.asarray(r, dtype=float))


def pk_random_service(a: Pgf, p: float, order: int) -> TruncatedSeries:
    """Stationary PGF under Bernoulli(p) service.

    ``Pi(u) = (1 - lam/p) p A(u) (u - 1) / (u - A(u)((1 - p)u + p))``.
    Writing ``Abar(u) = (A(u) - 1)/(u - 1)`` the denominator divided by
    ``u - 1`` is ``p - Abar(u)((1 - p)u + p)``, with constant term ``p a0``.
    """
    RandomService(a, p).check()
    if a.p0 <= 0.0:
        raise NeverEmpty("P(A = 0) = 0: the queue never empties")
    lam = a.mean()
    aser = a.as_series(order)
    abar = survival(aser)
    service = TruncatedSeries.constant(p, order) + TruncatedSeries.variable(order) * (1.0 - p)
    den = p - abar * service
    return divide(aser * ((1.0 - lam / p) * p), den)


def pk_single(a: Pgf, order: int) -> TruncatedSeries:
    """Pollaczek-Khinchine: ``Pi(u) = (1 - lam) A(u)(u - 1)/(u - A(u))``."""
    SingleDeterministic(a).check()
    return pk_random_service(a, 1.0, order)


def priority_low_pgf(a: Pgf, b: Pgf, order: int) -> TruncatedSeries:
    """Stationary PGF of the low-priority backlog.

    ``Pi(v) = (1 - lam_A - lam_B) B(v)(1 - v)(W - 1) / ((1 - B(v))(v - W))``
    with ``W = T_A(B(v))``. Cancelling ``(v - 1)`` twice gives
    ``c B Wbar / (Bbar (1 - Wbar))`` where ``Fbar = (F - 1)/(v - 1)``.
    """
    _check_joint(a, b)
    if a.p0 <= 0.0:
        raise NeverEmpty("P(A = 0) = 0: the high-priority flow never empties")
    if not 0.0 < b.p0 < 1.0:
        raise DegenerateBoundary(f"P(B = 0) = {b.p0} must lie strictly inside (0, 1)")
    c = 1.0 - a.mean() - b.mean()
    bser = b.as_series(order)
    w = kernel.tree_compose_series(a, b, order)
    wbar = survival(w)
    bbar = survival(bser)
    return divide(bser * wbar * c, bbar * (1.0 - wbar))


def asym_single(a: Pgf) -> tuple:
    """``C = (1 - lam) beta / (A'(beta) - 1)``, base ``beta``."""
    SingleDeterministic(a).check()
    beta = kernel.second_fixed_point(a)
    lam = a.mean()
    return (1.0 - lam) * beta / (a.deriv(beta) - 1.0), beta


def asym_random_service(a: Pgf, p: float) -> tuple:
    RandomService(a, p).check()
    g = kernel.geometric_kernel_root(a, p)
    lam = a.mean()
    s_inv = 1.0 - p + p / g
    num = (1.0 - lam / p) * (a.eval(g) - 1.0)
    den = (g - 1.0) * (a.deriv(g) * s_inv - a.eval(g) * p / g**2)
    return num / den, g


def _composite_slope(a: Pgf, b: Pgf, delta: float) -> float:
    """``(T_A o B)'(delta)``."""
    t = kernel.build_tree_function(a)
    return kernel.tree_deriv(t, b.eval(delta)) * b.deriv(delta)


def asym_priority(a: Pgf, b: Pgf) -> tuple:
    _check_joint(a, b)
    d = kernel.composite_tree_root(a, b)
    c = 1.0 - a.mean() - b.mean()
    bd = b.eval(d)
    return c * bd * (d - 1.0) / ((1.0 - bd) * (1.0 - _composite_slope(a, b, d))), d


def asym_tandem(a: Pgf, b: Pgf) -> tuple:
    _check_joint(a, b)
    d = kernel.composite_tree_root(a, b)
    c = 1.0 - a.mean() - b.mean()
    return c * d * (d - 1.0) / ((1.0 - b.eval(d)) * (1.0 - _composite_slope(a, b, d))), d


def doob_reference(m: ModelSpec) -> tuple:
    """``(prefactor, base)`` of the martingale-style reference curve."""
    m.check()
    if isinstance(m, SingleDeterministic):
        beta = kernel.second_fixed_point(m.arrivals)
        return beta, beta
    if isinstance(m, RandomService):
        g = kernel.geometric_kernel_root(m.arrivals, m.p)
        return g, g
    if isinstance(m, PriorityLowFlow):
        return 1.0, kernel.composite_tree_root(m.arrivals_hi, m.arrivals_lo)
    if isinstance(m, TandemSecondQueue):
        return 1.0, kernel.composite_tree_root(m.arrivals_1, m.arrivals_2)
    raise TypeError(f"unknown model {m!r}")


def closed_form_phi(a: Pgf, u: float, z: float, pole_eps: float = 1e-9) -> float:
    """Transient bivariate GF ``sum_t sum_n P(X_t = n) u^n z^t`` of the single queue."""
    if not 0.0 < u <= 1.0 or not 0.0 <= z < 1.0:
        raise InputError(f"closed_form_phi needs 0 < u <= 1 and 0 <= z < 1, got ({u}, {z})")
    t = kernel.build_tree_function(a)
    au = a.eval(u)
    den = 1.0 - z * au / u
    if abs(den) <= pole_eps:
        raise NearPole(f"1 - z A(u)/u = {den:.3g} at (u, z) = ({u}, {z})")
    empty = 1.0 / (1.0 - kernel.tree_eval(t, z))
    return (1.0 + empty * z * au * (1.0 - 1.0 / u)) / den


def analyze(m: ModelSpec, order: int = 128, r_max: int = 40) -> StationaryAnalysis:
    if r_max < 0 or r_max > order - MIN_ORDER_MARGIN:
        raise InputError(f"r_max = {r_max} must satisfy 0 <= r_max <= order - {MIN_ORDER_MARGIN}")
    m.check()
    if isinstance(m, SingleDeterministic):
        pgf = pk_single(m.arrivals, order)
        c, r = asym_single(m.arrivals)
    elif isinstance(m, RandomService):
        pgf = pk_random_service(m.arrivals, m.p, order)
        c, r = asym_random_service(m.arrivals, m.p)
    elif isinstance(m, PriorityLowFlow):
        pgf = priority_low_pgf(m.arrivals_hi, m.arrivals_lo, order)
        c, r = asym_priority(m.arrivals_hi, m.arrivals_lo)
    elif isinstance(m, TandemSecondQueue):
        pgf = None
        c, r = asym_tandem(m.arrivals_1, m.arrivals_2)
    else:
        raise TypeError(f"unknown model {m!r}")
    tail = None if pgf is None else tail_transform(pgf).coeffs[: r_max + 1].copy()
    dp, db = doob_reference(m)
    if not (math.isfinite(c) and math.isfinite(r)):
        raise NonFiniteResult(f"asymptotic constants C = {c}, base = {r}")
    return StationaryAnalysis(pgf, tail, c, r, dp, db)
