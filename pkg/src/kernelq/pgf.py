"""Distributions on the naturals and their generating functions.

Two kinds are supported: :class:`FiniteSupport` (arbitrary masses on
``0..d``, evaluated exactly as a polynomial anywhere on the real line)
and :class:`GeometricShifted` (geometric on ``1, 2, ...``, used for the
number of slots a packet spends in service under Bernoulli service).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import InputError, InvalidProbability, OutOfDomain, UnsupportedKind
from .series import TruncatedSeries, compose_outer_poly, divide

NORMALIZATION_TOL = 1e-12


class Pgf:
    """Common interface. Subclasses are frozen dataclasses."""

    radius: float = math.inf

    def eval(self, x: float) -> float:
        raise NotImplementedError

    def deriv(self, x: float) -> float:
        raise NotImplementedError

    def deriv2(self, x: float) -> float:
        raise NotImplementedError

    def __call__(self, x: float) -> float:
        return self.eval(x)

    def mean(self) -> float:
        return self.deriv(1.0)

    @property
    def p0(self) -> float:
        """P(X = 0)."""
        raise NotImplementedError

    @property
    def is_linear(self) -> bool:
        """True when the PGF is a polynomial of degree at most one."""
        return False

    def as_series(self, order: int) -> TruncatedSeries:
        raise NotImplementedError

    def compose(self, inner: TruncatedSeries) -> TruncatedSeries:
        """Series of ``self(inner(u))``."""
        raise NotImplementedError

    def compose_deriv(self, inner: TruncatedSeries) -> TruncatedSeries:
        """Series of ``self'(inner(u))``."""
        raise NotImplementedError


@dataclass(frozen=True)
class FiniteSupport(Pgf):
    probs: tuple

    def __post_init__(self):
        probs = tuple(float(x) for x in self.probs)
        if not probs:
            raise InvalidProbability("empty mass function")
        if any(not math.isfinite(x) or x < 0 for x in probs):
            raise InvalidProbability(f"masses must be finite and non-negative: {probs}")
        if abs(math.fsum(probs) - 1.0) > NORMALIZATION_TOL:
            raise InvalidProbability(f"masses sum to {math.fsum(probs)!r}, not 1")
        # drop trailing zeros so the degree is meaningful
        d = len(probs)
        while d > 1 and probs[d - 1] == 0.0:
            d -= 1
        object.__setattr__(self, "probs", probs[:d])

    @property
    def degree(self) -> int:
        return len(self.probs) - 1

    @property
    def p0(self) -> float:
        return self.probs[0]

    @property
    def is_linear(self) -> bool:
        return self.degree <= 1

    def eval(self, x: float) -> float:
        return float(P.polyval(x, self.probs))

    def deriv(self, x: float) -> float:
        return float(P.polyval(x, P.polyder(self.probs))) if self.degree else 0.0

    def deriv2(self, x: float) -> float:
        return float(P.polyval(x, P.polyder(self.probs, 2))) if self.degree > 1 else 0.0

    def mean(self) -> float:
        return math.fsum(k * p for k, p in enumerate(self.probs))

    def as_series(self, order: int) -> TruncatedSeries:
        c = np.zeros(order + 1)
        n = min(order + 1, len(self.probs))
        c[:n] = self.probs[:n]
        return TruncatedSeries(c)

    def compose(self, inner: TruncatedSeries) -> TruncatedSeries:
        return compose_outer_poly(TruncatedSeries(self.probs), inner)

    def compose_deriv(self, inner: TruncatedSeries) -> TruncatedSeries:
        if self.degree == 0:
            return TruncatedSeries.constant(0.0, inner.order)
        return compose_outer_poly(TruncatedSeries(P.polyder(self.probs)), inner)


@dataclass(frozen=True)
class GeometricShifted(Pgf):
    """Geometric law on ``{1, 2, ...}``: ``G(s) = p s / (1 - (1-p) s)``."""

    p: float

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise InvalidProbability(f"geometric parameter must lie in (0, 1], got {self.p}")

    @property
    def radius(self) -> float:
        return math.inf if self.p == 1.0 else 1.0 / (1.0 - self.p)

    @property
    def p0(self) -> float:
        return 0.0

    def _den(self, x: float) -> float:
        if abs(x) >= self.radius:
            raise OutOfDomain(f"{x} is at or beyond the pole {self.radius}")
        return 1.0 - (1.0 - self.p) * x

    def eval(self, x: float) -> float:
        return self.p * x / self._den(x)

    def deriv(self, x: float) -> float:
        return self.p / self._den(x) ** 2

    def deriv2(self, x: float) -> float:
        return 2.0 * self.p * (1.0 - self.p) / self._den(x) ** 3

    def mean(self) -> float:
        return 1.0 / self.p

    def as_series(self, order: int) -> TruncatedSeries:
        n = np.arange(order + 1)
        c = self.p * (1.0 - self.p) ** np.maximum(n - 1, 0)
        c[0] = 0.0
        return TruncatedSeries(c)

    def compose(self, inner: TruncatedSeries) -> TruncatedSeries:
        return divide(inner * self.p, 1.0 - inner * (1.0 - self.p))

    def compose_deriv(self, inner: TruncatedSeries) -> TruncatedSeries:
        den = 1.0 - inner * (1.0 - self.p)
        return divide(TruncatedSeries.constant(self.p, inner.order), den * den)


def finite(probs: Sequence[float]) -> FiniteSupport:
    return FiniteSupport(tuple(probs))


def point_mass(k: int = 0) -> FiniteSupport:
    probs = [0.0] * (k + 1)
    probs[k] = 1.0
    return FiniteSupport(tuple(probs))


def bimodal(p: float, m: int) -> FiniteSupport:
    """``(1 - p) + p u**m``: a batch of ``m`` packets with probability ``p``."""
    if not 0.0 <= p <= 1.0:
        raise InvalidProbability(f"p must lie in [0, 1], got {p}")
    if int(m) != m or m < 1:
        raise InputError(f"batch size must be a positive integer, got {m}")
    probs = [0.0] * (int(m) + 1)
    probs[0] = 1.0 - p
    probs[int(m)] += p
    return FiniteSupport(tuple(probs))


def bernoulli_service(p: float) -> FiniteSupport:
    """Service PGF ``S(u) = 1 - p + p u``."""
    if not 0.0 < p <= 1.0:
        raise InvalidProbability(f"service probability must lie in (0, 1], got {p}")
    return bimodal(p, 1)


def product(a: Pgf, b: Pgf) -> FiniteSupport:
    """Law of the independent sum, i.e. the PGF ``a(u) b(u)``."""
    if not (isinstance(a, FiniteSupport) and isinstance(b, FiniteSupport)):
        raise UnsupportedKind("product is defined for finite-support distributions only")
    return FiniteSupport(tuple(np.convolve(a.probs, b.probs)))


def _prob(x) -> float:
    # exact fractions such as "2/30" are accepted as strings
    if isinstance(x, str):
        return float(Fraction(x))
    if isinstance(x, bool):
        raise TypeError("probability must be a number")
    return float(x)


def from_json(obj) -> FiniteSupport:
    """Parse ``{"type": "bimodal", "p": .., "m": ..}`` or ``{"type": "finite", "probs": [..]}``."""
    if not isinstance(obj, dict) or "type" not in obj:
        raise InputError(f"PGF must be an object with a 'type' field, got {obj!r}")
    kind = obj["type"]
    try:
        if kind == "bimodal":
            return bimodal(_prob(obj["p"]), obj["m"])
        if kind == "finite":
            return finite([_prob(x) for x in obj["probs"]])
    except KeyError as exc:
        raise InputError(f"PGF of type {kind!r} is missing field {exc}") from None
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad PGF field: {exc}") from None
    raise InputError(f"unknown PGF type {kind!r}")


def to_json(d: Pgf) -> dict:
    if isinstance(d, FiniteSupport):
        return {"type": "finite", "probs": list(d.probs)}
    raise UnsupportedKind("only finite-support distributions have a JSON form")
