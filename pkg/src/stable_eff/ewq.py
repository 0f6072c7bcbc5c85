"""Exponentially weighted quantiles (EWQ).

Observations are kept in a flat array sorted by value, each with the
probability it carries in the discounted empirical distribution. A new
observation decays all existing probabilities by ``omega`` and is inserted
at its sorted position with probability ``1 - omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidArgumentError

__all__ = [
    "WeightedSample",
    "weights",
    "build",
    "batch",
    "update",
    "quantile",
    "quantiles",
    "ewq_cdf",
]

PRUNE_THRESHOLD = 1e-15
# slack so both scans agree when p sits on a cumulative boundary
_SCAN_EPS = 1e-12


def _check_omega(omega):
    if not 0.0 < omega < 1.0:
        raise InvalidArgumentError(f"omega must lie in (0, 1), got {omega}")


def weights(t: int, omega: float) -> np.ndarray:
    """Normalised exponential weights ``(1-w)/(1-w**t) * w**(t-i)``, ``i = 1..t``."""
    if t < 1:
        raise InvalidArgumentError(f"t must be at least 1, got {t}")
    _check_omega(omega)
    log_w = math.log(omega)
    # -expm1 keeps 1 - w**t accurate when omega is close to 1
    norm = (1.0 - omega) / -math.expm1(t * log_w)
    ages = np.arange(t - 1, -1, -1, dtype=float)
    return norm * np.exp(ages * log_w)


@dataclass
class WeightedSample:
    """Sorted observations with their EWQ probabilities.

    ``values`` is non-decreasing; ``probs[k]`` is the probability of
    ``values[k]``. ``t`` counts absorbed observations.
    """

    values: np.ndarray
    probs: np.ndarray
    omega: float
    t: int
    prune: bool = False
    last_index: int = field(default=-1, compare=False)

    def __len__(self):
        return self.values.size

    def copy(self) -> "WeightedSample":
        return WeightedSample(
            self.values.copy(), self.probs.copy(), self.omega, self.t, self.prune, self.last_index
        )

    @property
    def total(self) -> float:
        return float(self.probs.sum())

    def entries(self):
        """List of ``(value, prob)`` pairs in ascending value order."""
        return list(zip(self.values.tolist(), self.probs.tolist()))


def _from_weighted(values, probs, omega, t, prune):
    order = np.argsort(values, kind="stable")
    ws = WeightedSample(values[order], probs[order], omega, t, prune)
    if prune:
        _prune(ws)
    return ws


def build(values, omega: float, prune: bool = False) -> WeightedSample:
    """Sorted sample of the first observations with normalised weights."""
    values = np.asarray(values, dtype=float).ravel()
    if values.size == 0:
        raise InvalidArgumentError("cannot build a weighted sample from no observations")
    _check_omega(omega)
    return _from_weighted(values, weights(values.size, omega), omega, values.size, prune)


def batch(values, omega: float, t0: int, prune: bool = False) -> WeightedSample:
    """Closed form of ``build(values[:t0])`` followed by one ``update`` per later value.

    The first ``t0`` observations keep their normalised weights, decayed by
    ``omega ** (t - t0)``; later ones carry ``(1 - omega) * omega ** (t - i)``.
    """
    values = np.asarray(values, dtype=float).ravel()
    t = values.size
    if not 1 <= t0 <= t:
        raise InvalidArgumentError(f"t0 must lie in [1, {t}], got {t0}")
    _check_omega(omega)
    log_w = math.log(omega)
    probs = np.empty(t)
    probs[:t0] = weights(t0, omega) * math.exp((t - t0) * log_w)
    ages = np.arange(t - t0 - 1, -1, -1, dtype=float)
    probs[t0:] = (1.0 - omega) * np.exp(ages * log_w)
    return _from_weighted(values, probs, omega, t, prune)


def _prune(ws: WeightedSample):
    keep = ws.probs >= PRUNE_THRESHOLD
    if not keep.all():
        ws.values = ws.values[keep]
        ws.probs = ws.probs[keep]


def update(ws: WeightedSample, x: float, inplace: bool = False) -> WeightedSample:
    """Decay every probability by ``omega`` and insert ``x`` with ``1 - omega``.

    Returns a new sample unless ``inplace`` is true.
    """
    if not inplace:
        ws = ws.copy()
    w = ws.omega
    probs = ws.probs * w
    # after existing ties, so the insertion is stable in time
    k = int(np.searchsorted(ws.values, x, side="right"))
    ws.values = np.insert(ws.values, k, x)
    ws.probs = np.insert(probs, k, 1.0 - w)
    ws.t += 1
    ws.last_index = k
    if ws.prune:
        _prune(ws)
    return ws


def _lower_scan(cum, p):
    # first index whose cumulative probability reaches p
    k = int(np.searchsorted(cum, p - _SCAN_EPS, side="left"))
    return min(k, cum.size - 1)


def _upper_scan(probs, p):
    # smallest tau with sum_{i > tau} probs[i] <= 1 - p
    tail = np.cumsum(probs[::-1])[::-1]  # tail[k] = sum_{i >= k}
    upper = np.append(tail[1:], 0.0)  # upper[k] = sum_{i > k}
    # upper is non-increasing; count the entries still above 1 - p
    k = int(np.count_nonzero(upper > 1.0 - p + _SCAN_EPS))
    return min(k, probs.size - 1)


def quantile(ws: WeightedSample, p: float) -> float:
    """Generalised inverse of the EWQ distribution function at ``p``.

    Probabilities above one half are answered from the upper tail.
    """
    if not 0.0 < p < 1.0:
        raise InvalidArgumentError(f"p must lie in (0, 1), got {p}")
    if p > 0.5:
        return float(ws.values[_upper_scan(ws.probs, p)])
    return float(ws.values[_lower_scan(np.cumsum(ws.probs), p)])


def quantiles(ws: WeightedSample, ps) -> np.ndarray:
    """Several quantiles sharing one cumulative pass per tail."""
    ps = np.asarray(ps, dtype=float)
    if np.any((ps <= 0.0) | (ps >= 1.0)):
        raise InvalidArgumentError("probabilities must lie in (0, 1)")
    cum = np.cumsum(ws.probs)
    tail = np.cumsum(ws.probs[::-1])[::-1]
    upper = np.append(tail[1:], 0.0)
    n = ws.probs.size
    out = np.empty(ps.shape)
    for idx, p in np.ndenumerate(ps):
        if p > 0.5:
            k = int(np.count_nonzero(upper > 1.0 - p + _SCAN_EPS))
        else:
            k = int(np.searchsorted(cum, p - _SCAN_EPS, side="left"))
        out[idx] = ws.values[min(k, n - 1)]
    return out


def ewq_cdf(ws: WeightedSample, x: float) -> float:
    """Total probability of entries with value ``<= x``."""
    k = int(np.searchsorted(ws.values, x, side="right"))
    if k == 0:
        return 0.0
    return float(min(ws.probs[:k].sum(), 1.0))
