"""McCulloch's quantile estimator for stable parameters.

Five quantiles are reduced to the location/scale free statistics
``v_alpha`` and ``v_beta``, which the published lookup tables map to
``alpha`` and ``beta``. Two more tables then give the scale and the
location. Tables are interpolated bilinearly and clamped at their edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from . import ewq
from .exceptions import DegenerateSampleError, InvalidArgumentError
from .stable_dist import ALPHA_ONE_TOL, StableParams

__all__ = [
    "QuantileSet",
    "McCullochTables",
    "default_tables",
    "v_stats",
    "alpha_beta",
    "scale_location",
    "estimate",
    "estimate_sample",
]

PROBS = (0.05, 0.25, 0.50, 0.75, 0.95)
ALPHA_MIN = 0.6
ALPHA_MAX = 2.0
ALPHA_ONE_NUDGE = 1e-6


@dataclass(frozen=True)
class QuantileSet:
    """Quantiles at probabilities 5%, 25%, 50%, 75% and 95%."""

    q05: float
    q25: float
    q50: float
    q75: float
    q95: float

    def __post_init__(self):
        vals = self.as_array()
        if not np.all(np.isfinite(vals)):
            raise InvalidArgumentError("quantiles must be finite")
        if np.any(np.diff(vals) < 0):
            raise InvalidArgumentError(f"quantiles must be non-decreasing, got {vals.tolist()}")

    def as_array(self) -> np.ndarray:
        return np.array([self.q05, self.q25, self.q50, self.q75, self.q95])

    @classmethod
    def from_array(cls, values):
        return cls(*(float(v) for v in values))

    @classmethod
    def from_sample(cls, x):
        """Empirical quantiles: the ``ceil(n p)``-th order statistic."""
        x = np.asarray(x, dtype=float).ravel()
        if x.size == 0:
            raise InvalidArgumentError("empty sample")
        return cls.from_array(np.quantile(x, PROBS, method="inverted_cdf"))

    @classmethod
    def from_weighted(cls, ws: ewq.WeightedSample):
        """Quantiles of an exponentially weighted sample."""
        return cls.from_array(ewq.quantiles(ws, PROBS))

    def affine(self, scale, shift):
        if scale <= 0:
            raise InvalidArgumentError("scale must be positive")
        return QuantileSet.from_array(scale * self.as_array() + shift)


class _Table:
    def __init__(self, name, rows, cols, values):
        rows = np.asarray(rows, dtype=float)
        values = np.asarray(values, dtype=float)
        order = np.argsort(rows)
        self.name = name
        self.rows = rows[order]
        self.cols = np.asarray(cols, dtype=float)
        self.values = values[order]
        self._interp = RegularGridInterpolator((self.rows, self.cols), self.values)

    def __call__(self, row, col):
        r = min(max(row, self.rows[0]), self.rows[-1])
        c = min(max(col, self.cols[0]), self.cols[-1])
        return float(self._interp((r, c)))


def _parse_tables(text):
    tables = {}
    name = cols = None
    rows, vals = [], []

    def flush():
        if name is not None:
            tables[name] = _Table(name, rows, cols, vals)

    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            flush()
            name, cols, rows, vals = line.strip("[]"), None, [], []
        elif line.startswith("cols"):
            cols = [float(tok) for tok in line.split()[1:]]
        else:
            nums = [float(tok) for tok in line.split()]
            if cols is None or len(nums) != len(cols) + 1:
                raise InvalidArgumentError(f"malformed table row in [{name}]: {raw!r}")
            rows.append(nums[0])
            vals.append(nums[1:])
    flush()
    missing = {"phi1", "phi2", "phi3", "phi4"} - tables.keys()
    if missing:
        raise InvalidArgumentError(f"table file lacks {sorted(missing)}")
    return tables


class McCullochTables:
    """The four lookup functions, loaded from a plain-text grid file."""

    def __init__(self, phi1, phi2, phi3, phi4):
        self.phi1 = phi1
        self.phi2 = phi2
        self.phi3 = phi3
        self.phi4 = phi4

    @classmethod
    def load(cls, path=None):
        if path is None:
            text = resources.files("stable_eff").joinpath("data/mcculloch_tables.txt").read_text()
        else:
            text = Path(path).read_text()
        t = _parse_tables(text)
        return cls(t["phi1"], t["phi2"], t["phi3"], t["phi4"])

    @property
    def gaussian_v_alpha(self) -> float:
        """Smallest tabulated ``v_alpha``; the Gaussian boundary."""
        return float(self.phi1.rows[0])


@lru_cache(maxsize=1)
def default_tables() -> McCullochTables:
    return McCullochTables.load()


def v_stats(q: QuantileSet):
    """Return ``(v_alpha, v_beta)`` for a quantile set."""
    spread = q.q95 - q.q05
    iqr = q.q75 - q.q25
    if not (iqr > 0 and spread > 0):
        raise DegenerateSampleError(
            f"zero quantile spread (q75-q25={iqr:g}, q95-q05={spread:g})"
        )
    v_alpha = spread / iqr
    v_beta = (q.q95 + q.q05 - 2.0 * q.q50) / spread
    return v_alpha, min(max(v_beta, -1.0), 1.0)


def alpha_beta(v_alpha, v_beta, tables=None):
    """Look up ``(alpha, beta)``.

    ``v_alpha`` below the Gaussian node is clamped to it, giving ``alpha = 2``.
    """
    tables = tables or default_tables()
    sign = -1.0 if v_beta < 0 else 1.0
    vb = abs(v_beta)
    alpha = tables.phi1(v_alpha, vb)
    beta = sign * tables.phi2(v_alpha, vb)
    alpha = min(max(alpha, ALPHA_MIN), ALPHA_MAX)
    beta = min(max(beta, -1.0), 1.0)
    return alpha, beta


def scale_location(q: QuantileSet, alpha, beta, tables=None):
    """Return ``(gamma, zeta, mu0, mu)`` given the shape estimates."""
    tables = tables or default_tables()
    sign = -1.0 if beta < 0 else 1.0
    v_gamma = tables.phi3(alpha, abs(beta))
    v_zeta = sign * tables.phi4(alpha, abs(beta))
    gamma = (q.q75 - q.q25) / v_gamma
    zeta = gamma * v_zeta + q.q50
    if abs(alpha - 1.0) <= ALPHA_ONE_TOL:
        mu = zeta
        mu0 = mu + beta * (2.0 / math.pi) * gamma * math.log(gamma)
    else:
        mu0 = zeta
        mu = zeta - beta * gamma * math.tan(math.pi * alpha / 2.0)
    return gamma, zeta, mu0, mu


def estimate(q: QuantileSet, tables=None) -> StableParams:
    """Full S0 parameter estimate from five quantiles."""
    tables = tables or default_tables()
    v_alpha, v_beta = v_stats(q)
    alpha, beta = alpha_beta(v_alpha, v_beta, tables)
    if abs(alpha - 1.0) <= ALPHA_ONE_TOL:
        # keep downstream conversions off the tan(pi alpha / 2) pole
        alpha = 1.0 + ALPHA_ONE_NUDGE if alpha >= 1.0 else 1.0 - ALPHA_ONE_NUDGE
    gamma, _, mu0, _ = scale_location(q, alpha, beta, tables)
    return StableParams(alpha, beta, gamma, mu0)


def estimate_sample(x, tables=None) -> StableParams:
    """Static estimate from the empirical quantiles of ``x``."""
    return estimate(QuantileSet.from_sample(x), tables)
