"""Selection of the discount factor from probability integral transforms.

A good sequence of density forecasts yields PITs that look uniform on
every sufficiently long window. The criterion is the largest
length-scaled Kolmogorov-Smirnov distance over all windows of at least
``nu`` dates; the chosen discount factor minimises it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed

from . import mcculloch
from .efficiency import run_trace
from .exceptions import InvalidArgumentError
from .stable_dist import QUAD_TOL, clamp_probability

__all__ = [
    "DiscrepancyReport",
    "OmegaSelection",
    "ks_uniform",
    "discrepancy",
    "default_grid",
    "select_omega",
    "DEFAULT_NU",
    "MAX_FAILED_FRACTION",
]

DEFAULT_NU = 22
MAX_FAILED_FRACTION = 0.05


def ks_uniform(z) -> float:
    """Distance between sorted PITs and the grid ``(u - s) / (t - s)``.

    The grid runs from 0 to 1 over the window, so ``k`` is 0 for evenly
    spaced values that include both endpoints.
    """
    z = np.sort(np.asarray(z, dtype=float).ravel())
    n = z.size
    if n < 2:
        raise InvalidArgumentError("window needs at least two PIT values")
    grid = np.arange(n) / (n - 1)
    return float(np.max(np.abs(grid - z)))


@dataclass
class DiscrepancyReport:
    """Criterion value with the window attaining it (inclusive, 0-based)."""

    omega: float | None
    d: float
    start: int
    stop: int

    @property
    def length(self) -> int:
        return self.stop - self.start + 1


def discrepancy(z, nu: int = DEFAULT_NU, omega=None) -> DiscrepancyReport:
    """Maximum of ``sqrt(len) * k`` over every window of at least ``nu`` PITs.

    Each start keeps its window sorted while the end advances, so every
    window costs one insertion instead of a full sort.
    """
    z = clamp_probability(np.asarray(z, dtype=float).ravel())
    n = z.size
    if nu < 2:
        raise InvalidArgumentError(f"nu must be at least 2, got {nu}")
    if n < nu:
        raise InvalidArgumentError(f"need at least nu={nu} PIT values, got {n}")
    best, best_s, best_t = -1.0, 0, nu - 1
    for s in range(n - nu + 1):
        window = np.sort(z[s : s + nu - 1])
        for t in range(s + nu - 1, n):
            window = np.insert(window, np.searchsorted(window, z[t]), z[t])
            m = t - s + 1
            grid = np.arange(m) / (m - 1)
            val = math.sqrt(m) * float(np.max(np.abs(grid - window)))
            if val > best:
                best, best_s, best_t = val, s, t
    return DiscrepancyReport(omega, best, best_s, best_t)


def default_grid(start=0.900, stop=0.990, step=0.001) -> np.ndarray:
    """Inclusive grid of candidate discount factors, rounded to the step's decimals."""
    if not (0.0 < start <= stop < 1.0) or step <= 0:
        raise InvalidArgumentError(f"invalid grid {start}:{stop}:{step}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    decimals = max(0, -int(math.floor(math.log10(step))) + 1)
    return np.round(start + step * np.arange(count), decimals)


@dataclass
class OmegaSelection:
    """Outcome of the grid search."""

    omega: float
    reports: list = field(default_factory=list)
    disqualified: dict = field(default_factory=dict)

    def table(self):
        """``(omega, d)`` pairs for every qualified candidate, in grid order."""
        return [(r.omega, r.d) for r in self.reports]


def _evaluate(returns, omega, t0, nu, tables, tol, prune):
    trace = run_trace(returns, omega, t0, tables=tables, tol=tol, prune=prune)
    failed = trace.failed_dates / len(trace)
    if failed > MAX_FAILED_FRACTION:
        return omega, None, f"estimation failed on {failed:.1%} of dates"
    # the first row's forecast uses a warm-up one return short
    pits = trace.pit[1:]
    pits = pits[np.isfinite(pits)]
    if pits.size < nu:
        return omega, None, f"only {pits.size} PIT values, fewer than nu={nu}"
    return omega, discrepancy(pits, nu, omega), None


def select_omega(
    returns,
    grid,
    t0: int,
    nu: int = DEFAULT_NU,
    tables=None,
    tol: float = QUAD_TOL,
    prune: bool = False,
    n_jobs=None,
) -> OmegaSelection:
    """Pick the discount factor minimising the PIT discrepancy.

    Ties go to the larger discount factor. Candidates whose trace fails on
    more than 5% of dates are disqualified.
    """
    grid = np.atleast_1d(np.asarray(grid, dtype=float))
    if grid.size == 0:
        raise InvalidArgumentError("empty omega grid")
    if np.any((grid <= 0.0) | (grid >= 1.0)):
        raise InvalidArgumentError("every omega must lie in (0, 1)")
    tables = tables or mcculloch.default_tables()
    results = Parallel(n_jobs=n_jobs)(
        delayed(_evaluate)(returns, float(w), t0, nu, tables, tol, prune) for w in grid
    )
    reports, disqualified = [], {}
    for omega, report, reason in results:
        if report is None:
            disqualified[omega] = reason
        else:
            reports.append(report)
    if not reports:
        raise InvalidArgumentError(f"every candidate was disqualified: {disqualified}")
    best = min(reports, key=lambda r: (r.d, -r.omega))
    return OmegaSelection(best.omega, reports, disqualified)
