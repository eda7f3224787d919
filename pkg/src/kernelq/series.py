"""Truncated power series with real coefficients.

A :class:`TruncatedSeries` of order ``n`` holds the coefficients of
``u**0 .. u**n``. Binary operations between series of different orders
truncate to the smaller order.
"""
from __future__ import annotations

from typing import Iterable, Union

import numpy as np

from .errors import NonFiniteResult, NonUnitDenominator, NotADistribution, ZeroOrder

DEFAULT_ORDER = 128
MAX_ORDER = 512
UNIT_EPS = 1e-12

Number = Union[int, float]


class TruncatedSeries:
    """Immutable power series truncated at ``order`` (inclusive)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[Number]):
        c = np.array(coeffs, dtype=float).ravel()
        if c.size == 0:
            raise ZeroOrder("a series needs at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise NonFiniteResult("series coefficient is NaN or infinite")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def constant(cls, value: Number, order: int) -> "TruncatedSeries":
        c = np.zeros(order + 1)
        c[0] = value
        return cls(c)

    @classmethod
    def variable(cls, order: int) -> "TruncatedSeries":
        """The series ``u`` itself."""
        c = np.zeros(order + 1)
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def order(self) -> int:
        return self._c.size - 1

    def __len__(self) -> int:
        return self._c.size

    def __getitem__(self, n):
        return self._c[n]

    def __iter__(self):
        return iter(self._c.tolist())

    def __repr__(self) -> str:
        head = ", ".join(f"{x:.6g}" for x in self._c[:6])
        more = ", ..." if self._c.size > 6 else ""
        return f"TruncatedSeries([{head}{more}], order={self.order})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    __hash__ = None

    def truncate(self, order: int) -> "TruncatedSeries":
        if order >= self.order:
            return self
        return TruncatedSeries(self._c[: order + 1])

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return add(self, other)
        c = self._c.copy()
        c[0] += other
        return TruncatedSeries(c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self._c)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return mul(self, other)
        return TruncatedSeries(self._c * float(other))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return divide(self, other)
        return TruncatedSeries(self._c / float(other))

    def __call__(self, x: float) -> float:
        return evaluate(self, x)

    def shift(self, k: int = 1) -> "TruncatedSeries":
        """Multiply by ``u**k`` keeping the same order."""
        c = np.zeros_like(self._c)
        if k <= self.order:
            c[k:] = self._c[: self._c.size - k]
        return TruncatedSeries(c)

    def degree(self) -> int:
        """Index of the last nonzero coefficient (0 for the zero series)."""
        nz = np.flatnonzero(self._c)
        return int(nz[-1]) if nz.size else 0


def _aligned(a: TruncatedSeries, b: TruncatedSeries):
    n = min(a.order, b.order) + 1
    return a.coeffs[:n], b.coeffs[:n]


def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    x, y = _aligned(a, b)
    return TruncatedSeries(x + y)


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """Cauchy product truncated at the smaller order."""
    x, y = _aligned(a, b)
    return TruncatedSeries(np.convolve(x, y)[: x.size])


def divide(num: TruncatedSeries, den: TruncatedSeries) -> TruncatedSeries:
    """Quotient ``q`` with ``q * den == num`` up to the common order."""
    n, d = _aligned(num, den)
    d0 = d[0]
    if abs(d0) <= UNIT_EPS:
        raise NonUnitDenominator(f"denominator constant term {d0!r} is not invertible")
    q = np.zeros(n.size)
    q[0] = n[0] / d0
    for k in range(1, n.size):
        # q_k = (n_k - sum_{j=1..k} d_j q_{k-j}) / d_0
        q[k] = (n[k] - d[1 : k + 1] @ q[k - 1 :: -1]) / d0
    return TruncatedSeries(q)


def compose_outer_poly(p: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """Evaluate the polynomial ``p`` at the series ``inner`` by Horner's rule.

    ``p`` is read as an exact polynomial of degree ``p.degree()``; the
    result has the order of ``inner``. ``inner`` may have a nonzero
    constant term.
    """
    coeffs = p.coeffs[: p.degree() + 1]
    x = inner.coeffs
    acc = np.zeros(x.size)
    acc[0] = coeffs[-1]
    for c in coeffs[-2::-1]:
        acc = np.convolve(acc, x)[: x.size]
        acc[0] += c
    return TruncatedSeries(acc)


def derivative(s: TruncatedSeries) -> TruncatedSeries:
    if s.order == 0:
        raise ZeroOrder("cannot differentiate an order-0 series")
    c = s.coeffs
    return TruncatedSeries(c[1:] * np.arange(1, c.size))


def evaluate(s: TruncatedSeries, x: float) -> float:
    return float(np.polynomial.polynomial.polyval(x, s.coeffs))


def survival(s: TruncatedSeries) -> TruncatedSeries:
    """Coefficients ``1 - sum_{k<=n} s_k``.

    This is the series ``(1 - s(u)) / (1 - u)``; for a probability
    distribution entry ``n`` is ``P(X > n)``. Computed by cumulative
    sums so that no division by ``1 - u`` takes place.
    """
    return TruncatedSeries(1.0 - np.cumsum(s.coeffs))


def tail_transform(pgf_series: TruncatedSeries, tol: float = 1e-12) -> TruncatedSeries:
    """Coefficients of ``E(u) = (1 - u*Pi(u)) / (1 - u)``: entry R is ``P(X >= R)``."""
    c = pgf_series.coeffs
    if np.any(c < -tol):
        raise NotADistribution(f"negative mass {c.min():.3g}")
    total = float(c.sum())
    if abs(total - 1.0) > 1e-6:
        raise NotADistribution(f"masses sum to {total!r}, not 1")
    c = np.clip(c, 0.0, None)
    out = np.empty_like(c)
    out[0] = 1.0
    out[1:] = 1.0 - np.cumsum(c[:-1])
    return TruncatedSeries(out)
