"""Dynamic Hurst exponent and fLsm memory parameter.

The Hurst exponent compares exponentially weighted second moments of
one-step and two-step log-price increments. The memory parameter removes
the tail component ``1/alpha`` from it, with ``alpha`` taken from the
dynamic stable estimate on the same dates and the same discount factor.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import ewq, mcculloch
from .exceptions import (
    DegenerateSampleError,
    EstimationGap,
    InvalidArgumentError,
    NumericalFailureError,
    UndefinedExponentError,
)
from .stable_dist import QUAD_TOL, StableParams, cdf, clamp_probability

__all__ = [
    "MomentState",
    "update_moments",
    "hurst",
    "memory_param",
    "EfficiencyTrace",
    "run_trace",
    "MIN_WARMUP",
]

logger = logging.getLogger(__name__)

MIN_WARMUP = 30


@dataclass
class MomentState:
    """Running weighted sums of squared one- and two-step increments.

    ``t`` counts absorbed log-prices; ``prev1`` is the latest, ``prev2``
    the one before.
    """

    m1: float = 0.0
    m2: float = 0.0
    t: int = 0
    prev1: float = math.nan
    prev2: float = math.nan

    @classmethod
    def from_prices(cls, prices, omega):
        state = cls()
        for x in np.asarray(prices, dtype=float):
            update_moments(state, x, omega, inplace=True)
        return state


def update_moments(state: MomentState, x: float, omega: float, inplace=False) -> MomentState:
    """Absorb the next log-price.

    ``m1 <- omega m1 + (x - prev1)**2`` and ``m2 <- omega m2 + (x - prev2)**2``,
    each once enough prices exist for the increment.
    """
    if not inplace:
        state = MomentState(state.m1, state.m2, state.t, state.prev1, state.prev2)
    x = float(x)
    if state.t >= 1:
        state.m1 = omega * state.m1 + (x - state.prev1) ** 2
    if state.t >= 2:
        state.m2 = omega * state.m2 + (x - state.prev2) ** 2
    state.prev2, state.prev1 = state.prev1, x
    state.t += 1
    return state


def hurst(state: MomentState) -> float:
    """Two-scale Hurst estimate ``0.5 * log2((t-1) m2 / ((t-2) m1))``."""
    t = state.t
    if t < 3:
        raise InvalidArgumentError(f"need at least 3 log-prices, got {t}")
    if state.m1 <= 0.0 or state.m2 <= 0.0:
        raise UndefinedExponentError(
            f"degenerate increments (m1={state.m1:g}, m2={state.m2:g})"
        )
    return 0.5 * math.log2((t - 1) * state.m2 / ((t - 2) * state.m1))


def memory_param(h, alpha):
    """``h - 1/alpha``; zero for an efficient market."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any((alpha <= 0.0) | (alpha > 2.0)):
        raise InvalidArgumentError("alpha must lie in (0, 2]")
    out = np.asarray(h, dtype=float) - 1.0 / alpha
    return float(out) if out.ndim == 0 else out


_COLUMNS = ("alpha", "beta", "gamma", "mu0", "H", "m", "pit")


@dataclass
class EfficiencyTrace:
    """Per-date estimates from the first estimation date to the last.

    Arrays are aligned; ``index`` holds 1-based positions in the return
    series. Failed estimates are NaN and listed in ``gaps``.
    """

    index: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray
    gamma: np.ndarray
    mu0: np.ndarray
    H: np.ndarray
    m: np.ndarray
    pit: np.ndarray
    omega: float
    dates: list | None = None
    gaps: list = field(default_factory=list)

    columns = _COLUMNS

    def __len__(self):
        return self.index.size

    def params_at(self, k) -> StableParams:
        return StableParams(self.alpha[k], self.beta[k], self.gamma[k], self.mu0[k])

    def as_array(self) -> np.ndarray:
        """``(n_dates, 7)`` array in :attr:`columns` order."""
        return np.column_stack([getattr(self, c) for c in _COLUMNS])

    def date_labels(self):
        if self.dates is not None:
            return list(self.dates)
        return [int(i) for i in self.index]

    @property
    def failed_dates(self) -> int:
        return len({g.index for g in self.gaps})


def _estimate_params(ws, tables):
    return mcculloch.estimate(mcculloch.QuantileSet.from_weighted(ws), tables)


def run_trace(
    returns,
    omega: float,
    t0: int,
    dates=None,
    compute_pit: bool = True,
    tables=None,
    prune: bool = False,
    tol: float = QUAD_TOL,
) -> EfficiencyTrace:
    """Estimate the dynamic stable law, ``H`` and ``m`` on every date from ``t0``.

    Parameters
    ----------
    returns : array_like
        Log-returns ``X_1..X_T``.
    omega : float
        Discount factor shared by the quantile and moment estimators.
    t0 : int
        Number of returns in the warm-up; the first row is date ``t0``.
    dates : sequence, optional
        Labels aligned with ``returns``.
    compute_pit : bool
        Whether to evaluate ``Z_t = F_{t-1}(X_t)`` with the previous
        date's stable cdf. Costs one quadrature per date.

    Returns
    -------
    EfficiencyTrace
        ``T - t0 + 1`` rows.
    """
    x = np.asarray(returns, dtype=float).ravel()
    n = x.size
    if not np.all(np.isfinite(x)):
        raise InvalidArgumentError("returns must be finite")
    if not 0.0 < omega < 1.0:
        raise InvalidArgumentError(f"omega must lie in (0, 1), got {omega}")
    if not 3 <= t0 <= n:
        raise InvalidArgumentError(f"t0 must lie in [3, {n}], got {t0}")
    if t0 < MIN_WARMUP:
        warnings.warn(
            f"warm-up of {t0} returns is below the recommended {MIN_WARMUP}",
            stacklevel=2,
        )
    if dates is not None and len(dates) != n:
        raise InvalidArgumentError("dates and returns differ in length")
    tables = tables or mcculloch.default_tables()

    rows = n - t0 + 1
    out = {c: np.full(rows, np.nan) for c in _COLUMNS}
    gaps = []

    def label(t):
        return dates[t - 1] if dates is not None else None

    def record(t, exc):
        gap = EstimationGap(t, label(t), exc)
        gaps.append(gap)
        logger.debug("%s", gap)

    # parameters forecasting the first row
    prev = None
    if compute_pit:
        try:
            prev = _estimate_params(ewq.build(x[: t0 - 1], omega), tables)
        except DegenerateSampleError as exc:
            record(t0 - 1, exc)

    ws = ewq.build(x[:t0], omega, prune=prune)
    log_prices = np.concatenate(([0.0], np.cumsum(x)))
    state = MomentState.from_prices(log_prices[: t0 + 1], omega)

    for k in range(rows):
        t = t0 + k
        if k > 0:
            ewq.update(ws, x[t - 1], inplace=True)
            update_moments(state, log_prices[t], omega, inplace=True)
        if compute_pit and prev is not None:
            try:
                out["pit"][k] = clamp_probability(cdf(x[t - 1], prev, tol))
            except NumericalFailureError as exc:
                record(t, exc)
        try:
            params = _estimate_params(ws, tables)
        except DegenerateSampleError as exc:
            record(t, exc)
            params = None
        else:
            out["alpha"][k] = params.alpha
            out["beta"][k] = params.beta
            out["gamma"][k] = params.gamma
            out["mu0"][k] = params.mu0
        try:
            out["H"][k] = hurst(state)
        except UndefinedExponentError as exc:
            record(t, exc)
        if params is not None and math.isfinite(out["H"][k]):
            out["m"][k] = out["H"][k] - 1.0 / params.alpha
        prev = params

    index = np.arange(t0, n + 1)
    return EfficiencyTrace(
        index=index,
        omega=omega,
        dates=[dates[i - 1] for i in index] if dates is not None else None,
        gaps=gaps,
        **out,
    )
