"""Exact iteration of the queue-length distribution on a truncated state space.

Each step applies one slot of the dynamics (service, then arrivals) to
the whole distribution vector. Mass that would exceed ``n_max`` is put
in state ``n_max``; the amount is reported as ``clipped_mass_rate``.
Iteration from the empty state stops when the total-variation distance
between consecutive distributions drops below ``tol``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import InputError, NoConvergence, Unstable
from .pgf import FiniteSupport, Pgf

DEFAULT_N_MAX = 200
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 1_000_000
UNSTABLE_CLIP_RATE = 1e-6


@dataclass(frozen=True)
class OracleResult:
    dist: np.ndarray
    iterations: int
    final_tv: float
    clipped_mass_rate: float

    def marginal(self, axis: str = "X") -> np.ndarray:
        if self.dist.ndim == 1:
            if axis != "X":
                raise InputError("a one-dimensional result only has axis X")
            return self.dist
        if axis == "X":
            return self.dist.sum(axis=1)
        if axis == "Y":
            return self.dist.sum(axis=0)
        raise InputError(f"axis must be 'X' or 'Y', got {axis!r}")


def _masses(a: Pgf) -> np.ndarray:
    if not isinstance(a, FiniteSupport):
        raise InputError("the oracle needs finite-support arrivals")
    return np.asarray(a.probs, dtype=float)


def _arrive(served: np.ndarray, masses: np.ndarray, axis: int) -> tuple:
    """Convolve ``served`` with the arrival law along ``axis``, clipping at the top.

    Returns the new array and the mass pushed into the boundary.
    """
    n = served.shape[axis]
    out = np.zeros_like(served)
    clipped = 0.0
    src = np.moveaxis(served, axis, 0)
    dst = np.moveaxis(out, axis, 0)
    for k, w in enumerate(masses):
        if w == 0.0:
            continue
        if k == 0:
            dst += w * src
            continue
        if k < n:
            dst[k:] += w * src[: n - k]
        over = w * src[max(n - k, 0):]
        if over.size:
            dst[n - 1] += over.sum(axis=0)
            clipped += float(over.sum())
    return out, clipped


def step_1d(dist: np.ndarray, masses: np.ndarray, service_p: float = 1.0) -> tuple:
    """One slot of ``X' = (X - S)_+ + A`` with ``S`` Bernoulli(service_p)."""
    served = np.empty_like(dist)
    served[:] = dist * (1.0 - service_p)
    served[0] += dist[0] * service_p
    served[:-1] += dist[1:] * service_p
    return _arrive(served, masses, 0)


def step_priority(dist: np.ndarray, a: np.ndarray, b: np.ndarray) -> tuple:
    """One slot of the two-flow priority queue, ``dist[x, y]``.

    The server takes a flow-1 packet when ``x > 0``, a flow-2 packet
    otherwise.
    """
    served = np.zeros_like(dist)
    served[:-1, :] += dist[1:, :]
    served[0, 0] += dist[0, 0]
    served[0, :-1] += dist[0, 1:]
    out, c1 = _arrive(served, a, 0)
    out, c2 = _arrive(out, b, 1)
    return out, c1 + c2


def step_tandem(dist: np.ndarray, a: np.ndarray, b: np.ndarray) -> tuple:
    """One slot of the tandem: queue 1 forwards its served packet to queue 2."""
    served = np.zeros_like(dist)
    # x = 0: only queue 2 serves
    served[0, 0] += dist[0, 0]
    served[0, :-1] += dist[0, 1:]
    # x > 0: queue 2 serves one and receives one from queue 1
    served[:-1, 1:] += dist[1:, 1:]
    served[:-1, 1] += dist[1:, 0]
    out, c1 = _arrive(served, a, 0)
    out, c2 = _arrive(out, b, 1)
    return out, c1 + c2


def _tv(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p - q).sum())


def _iterate(step: Callable, dist: np.ndarray, tol: float, max_iter: int) -> OracleResult:
    if tol <= 0:
        raise InputError("tolerance must be positive")
    for it in range(1, max_iter + 1):
        new, clipped = step(dist)
        tv = _tv(new, dist)
        dist = new
        if tv < tol:
            if clipped > UNSTABLE_CLIP_RATE:
                raise Unstable(
                    f"{clipped:.3g} of the mass hits the truncation boundary each slot")
            dist.setflags(write=False)
            return OracleResult(dist, it, tv, clipped)
    raise NoConvergence(f"total variation still {tv:.3g} after {max_iter} iterations")


def _check_n_max(n_max: int, *laws: np.ndarray) -> None:
    if n_max < max(len(m) - 1 for m in laws):
        raise InputError(f"n_max = {n_max} is below the largest arrival batch")


def stationary_1d(a: Pgf, service_p: float = 1.0, n_max: int = DEFAULT_N_MAX,
                  tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER) -> OracleResult:
    masses = _masses(a)
    if not 0.0 < service_p <= 1.0:
        raise InputError(f"service probability {service_p} outside (0, 1]")
    _check_n_max(n_max, masses)
    dist = np.zeros(n_max + 1)
    dist[0] = 1.0
    return _iterate(lambda d: step_1d(d, masses, service_p), dist, tol, max_iter)


def _grid(n_max: int) -> np.ndarray:
    dist = np.zeros((n_max + 1, n_max + 1))
    dist[0, 0] = 1.0
    return dist


def stationary_2d_priority(a: Pgf, b: Pgf, n_max: int = DEFAULT_N_MAX,
                           tol: float = DEFAULT_TOL,
                           max_iter: int = DEFAULT_MAX_ITER) -> OracleResult:
    ma, mb = _masses(a), _masses(b)
    _check_n_max(n_max, ma, mb)
    return _iterate(lambda d: step_priority(d, ma, mb), _grid(n_max), tol, max_iter)


def stationary_2d_tandem(a: Pgf, b: Pgf, n_max: int = DEFAULT_N_MAX,
                         tol: float = DEFAULT_TOL,
                         max_iter: int = DEFAULT_MAX_ITER) -> OracleResult:
    ma, mb = _masses(a), _masses(b)
    _check_n_max(n_max, ma, mb)
    return _iterate(lambda d: step_tandem(d, ma, mb), _grid(n_max), tol, max_iter)


def iter_transient_1d(a: Pgf, service_p: float = 1.0, n_max: int = DEFAULT_N_MAX) -> Iterator[np.ndarray]:
    """Yield the law of ``X_0, X_1, ...`` for the initially empty queue."""
    masses = _masses(a)
    _check_n_max(n_max, masses)
    dist = np.zeros(n_max + 1)
    dist[0] = 1.0
    while True:
        yield dist.copy()
        dist, _ = step_1d(dist, masses, service_p)


def transient_1d(a: Pgf, service_p: float, t: int, n_max: int | None = None) -> np.ndarray:
    """Law of ``X_t`` from the empty state.

    With the default ``n_max`` (largest batch times ``t``) nothing is
    ever clipped and the result is exact.
    """
    if n_max is None:
        n_max = max(len(_masses(a)) - 1, 1) * max(t, 1)
    for k, dist in enumerate(iter_transient_1d(a, service_p, n_max)):
        if k == t:
            return dist


def tail_of(result: OracleResult, axis: str = "X") -> np.ndarray:
    """``P(component >= R)`` for ``R = 0..n_max``."""
    m = result.marginal(axis)
    tail = np.cumsum(m[::-1])[::-1]
    return tail / tail[0]
