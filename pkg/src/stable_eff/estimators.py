"""scikit-learn style wrappers around the estimation pipeline."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from . import mcculloch
from .discount import DEFAULT_NU, default_grid, select_omega
from .efficiency import EfficiencyTrace, run_trace
from .exceptions import InvalidArgumentError
from .stable_dist import QUAD_TOL, cdf, pdf

__all__ = [
    "check_returns",
    "check_omega",
    "check_t0",
    "StableQuantileEstimator",
    "DynamicEfficiencyEstimator",
    "DiscountFactorSelector",
]


def check_returns(X, min_samples=1) -> np.ndarray:
    """Flatten a 1-D series or single-column 2-D array of finite floats."""
    arr = np.asarray(X)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    try:
        arr = check_array(arr, dtype=np.float64, ensure_min_samples=min_samples)
    except ValueError as exc:
        raise InvalidArgumentError(str(exc)) from exc
    if arr.shape[1] != 1:
        raise InvalidArgumentError(f"expected a single series, got {arr.shape[1]} columns")
    return arr.ravel()


def check_omega(omega) -> float:
    omega = float(omega)
    if not 0.0 < omega < 1.0:
        raise InvalidArgumentError(f"omega must lie in (0, 1), got {omega}")
    return omega


def check_t0(t0, n) -> int:
    """Default to a tenth of the series, at least 30 returns when available."""
    if t0 is None:
        t0 = min(n, max(30, n // 10))
    t0 = int(t0)
    if not 3 <= t0 <= n:
        raise InvalidArgumentError(f"t0 must lie in [3, {n}], got {t0}")
    return t0


class StableQuantileEstimator(BaseEstimator):
    """Static quantile fit of a stable law.

    After ``fit``, ``transform`` maps values to cdf values and
    ``score_samples`` returns log densities.
    """

    def __init__(self, quad_tol=QUAD_TOL):
        self.quad_tol = quad_tol

    def fit(self, X, y=None):
        x = check_returns(X, min_samples=5)
        self.params_ = mcculloch.estimate_sample(x)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        return cdf(check_returns(X), self.params_, self.quad_tol)

    def score_samples(self, X):
        check_is_fitted(self, "params_")
        with np.errstate(divide="ignore"):
            return np.log(pdf(check_returns(X), self.params_, self.quad_tol))


class DynamicEfficiencyEstimator(TransformerMixin, BaseEstimator):
    """Discounted stable fit plus Hurst and memory indicators.

    Parameters
    ----------
    omega : float
        Discount factor in (0, 1).
    t0 : int, optional
        Warm-up length; see :func:`check_t0` for the default.
    compute_pit : bool
        Also produce one-step-ahead PIT values.

    Attributes
    ----------
    trace_ : EfficiencyTrace
        Estimates on the fitted series.
    """

    def __init__(self, omega=0.956, t0=None, compute_pit=True, prune=False, quad_tol=QUAD_TOL):
        self.omega = omega
        self.t0 = t0
        self.compute_pit = compute_pit
        self.prune = prune
        self.quad_tol = quad_tol

    def _run(self, x):
        return run_trace(
            x,
            check_omega(self.omega),
            check_t0(self.t0, x.size),
            compute_pit=self.compute_pit,
            prune=self.prune,
            tol=self.quad_tol,
        )

    def fit(self, X, y=None):
        x = check_returns(X, min_samples=3)
        self.trace_ = self._run(x)
        self.n_features_in_ = 1
        return self

    def transform(self, X):
        """``(n_dates, 7)`` array of alpha, beta, gamma, mu0, H, m, pit."""
        check_is_fitted(self, "trace_")
        return self._run(check_returns(X, min_samples=3)).as_array()

    def get_feature_names_out(self, input_features=None):
        return np.array(EfficiencyTrace.columns, dtype=object)


class DiscountFactorSelector(BaseEstimator):
    """Grid search for the discount factor with the PIT discrepancy."""

    def __init__(self, grid=None, t0=None, nu=DEFAULT_NU, prune=False, quad_tol=QUAD_TOL, n_jobs=None):
        self.grid = grid
        self.t0 = t0
        self.nu = nu
        self.prune = prune
        self.quad_tol = quad_tol
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        x = check_returns(X, min_samples=3)
        grid = default_grid() if self.grid is None else np.asarray(self.grid, dtype=float)
        t0 = check_t0(self.t0, x.size)
        sel = select_omega(
            x, grid, t0, nu=self.nu, tol=self.quad_tol, prune=self.prune, n_jobs=self.n_jobs
        )
        self.omega_ = sel.omega
        self.reports_ = sel.reports
        self.disqualified_ = sel.disqualified
        self.best_estimator_ = DynamicEfficiencyEstimator(
            sel.omega, t0, prune=self.prune, quad_tol=self.quad_tol
        ).fit(x)
        self.n_features_in_ = 1
        return self
