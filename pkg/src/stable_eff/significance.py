"""Monte-Carlo confidence bands under the efficient-market null.

The null model is a geometric Brownian motion. One simulated path of the
same warm-up length as the data, followed by ``eval_len`` further dates,
goes through the full estimation pipeline; the band at level ``p`` is the
pair of empirical quantiles at ``(1-p)/2`` and ``(1+p)/2`` of the
per-date estimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from .efficiency import run_trace
from .exceptions import InvalidArgumentError

__all__ = [
    "NullEstimates",
    "ConfidenceBands",
    "simulate_gbm_returns",
    "simulate_null",
    "bands",
    "DEFAULT_LEVELS",
    "DEFAULT_EVAL_LEN",
    "INDICATORS",
]

DEFAULT_LEVELS = (0.95, 0.99, 0.995)
DEFAULT_EVAL_LEN = 4000
INDICATORS = ("H", "m", "alpha")
TRADING_DAYS = 252


def simulate_gbm_returns(n, seed=None, drift=0.0, volatility=1.0, dt=1.0 / TRADING_DAYS):
    """Daily log-returns of a geometric Brownian motion.

    Drift and volatility are annual; the defaults give a driftless unit
    volatility price sampled daily.
    """
    rng = np.random.default_rng(seed)
    mean = (drift - 0.5 * volatility**2) * dt
    return mean + volatility * np.sqrt(dt) * rng.standard_normal(n)


@dataclass
class NullEstimates:
    """Per-date estimates of the indicators on simulated null data."""

    H: np.ndarray
    m: np.ndarray
    alpha: np.ndarray

    def __len__(self):
        return self.H.size

    def get(self, name):
        return getattr(self, name)


def _one_path(warmup_len, eval_len, omega, seed, tables):
    x = simulate_gbm_returns(warmup_len + eval_len, seed)
    trace = run_trace(x, omega, warmup_len, compute_pit=False, tables=tables)
    # drop the warm-up row so exactly eval_len dates remain
    return trace.H[1:], trace.m[1:], trace.alpha[1:]


def simulate_null(
    warmup_len: int,
    eval_len: int = DEFAULT_EVAL_LEN,
    omega: float = 0.956,
    seed=0,
    n_paths: int = 1,
    tables=None,
    n_jobs=None,
) -> NullEstimates:
    """Estimate ``H``, ``m`` and ``alpha`` on ``eval_len`` simulated null dates.

    With ``n_paths > 1`` independent paths are simulated (seeds spawned
    from ``seed``) and their estimates pooled.
    """
    if warmup_len < 3 or eval_len < 1 or n_paths < 1:
        raise InvalidArgumentError("warmup_len >= 3, eval_len >= 1 and n_paths >= 1 required")
    if n_paths == 1:
        seeds = [seed]
    else:
        seeds = np.random.SeedSequence(seed).spawn(n_paths)
    parts = Parallel(n_jobs=n_jobs)(
        delayed(_one_path)(warmup_len, eval_len, omega, s, tables) for s in seeds
    )
    return NullEstimates(*(np.concatenate([p[i] for p in parts]) for i in range(3)))


@dataclass
class ConfidenceBands:
    """Lower and upper null quantiles per indicator and confidence level."""

    levels: tuple
    lower: dict = field(default_factory=dict)
    upper: dict = field(default_factory=dict)

    def band(self, name, level):
        k = self._level_index(level)
        return float(self.lower[name][k]), float(self.upper[name][k])

    def _level_index(self, level):
        for k, lv in enumerate(self.levels):
            if abs(lv - level) < 1e-12:
                return k
        raise InvalidArgumentError(f"level {level} not among {self.levels}")

    def rejects(self, name, values, level):
        """True where a value falls outside the band; NaN never rejects."""
        lo, hi = self.band(name, level)
        v = np.asarray(values, dtype=float)
        with np.errstate(invalid="ignore"):
            return (v < lo) | (v > hi)

    def rows(self):
        """``(indicator, level, lower, upper)`` tuples."""
        for name in self.lower:
            for k, lv in enumerate(self.levels):
                yield name, lv, float(self.lower[name][k]), float(self.upper[name][k])

    @classmethod
    def from_rows(cls, rows):
        levels = sorted({float(r[1]) for r in rows})
        out = cls(tuple(levels))
        for name, lv, lo, hi in rows:
            k = levels.index(float(lv))
            out.lower.setdefault(name, np.full(len(levels), np.nan))[k] = float(lo)
            out.upper.setdefault(name, np.full(len(levels), np.nan))[k] = float(hi)
        return out


def bands(estimates, levels=DEFAULT_LEVELS, min_count: int = 1000) -> ConfidenceBands:
    """Empirical ``(1-p)/2`` and ``(1+p)/2`` quantiles of each indicator.

    ``estimates`` is a :class:`NullEstimates` or a mapping from indicator
    name to values. NaN estimates are ignored.
    """
    levels = tuple(sorted(float(p) for p in levels))
    if any(not 0.0 < p < 1.0 for p in levels):
        raise InvalidArgumentError("confidence levels must lie in (0, 1)")
    if isinstance(estimates, NullEstimates):
        estimates = {name: estimates.get(name) for name in INDICATORS}
    out = ConfidenceBands(levels)
    for name, values in estimates.items():
        v = np.asarray(values, dtype=float)
        v = v[np.isfinite(v)]
        if v.size < min_count:
            raise InvalidArgumentError(
                f"{name}: {v.size} finite estimates, at least {min_count} required"
            )
        probs = np.array([[(1 - p) / 2, (1 + p) / 2] for p in levels])
        q = np.quantile(v, probs.ravel(), method="inverted_cdf").reshape(-1, 2)
        out.lower[name] = q[:, 0]
        out.upper[name] = q[:, 1]
    return out
