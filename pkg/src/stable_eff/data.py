"""Price ingestion and the dated log-return series."""

from __future__ import annotations

import csv
import datetime as dt
import logging
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .efficiency import MIN_WARMUP
from .exceptions import InvalidArgumentError

__all__ = ["ReturnSeries", "InputError", "ingest", "MAX_BAD_FRACTION"]

logger = logging.getLogger(__name__)

MAX_BAD_FRACTION = 0.01


class InputError(InvalidArgumentError):
    """Rejected input file; ``diagnostics`` lists ``(row, reason)`` pairs."""

    def __init__(self, message, diagnostics=()):
        self.diagnostics = list(diagnostics)
        detail = "; ".join(f"row {r}: {why}" for r, why in self.diagnostics[:10])
        super().__init__(f"{message}: {detail}" if detail else message)


@dataclass
class ReturnSeries:
    """Log-returns ``log(P_t / P_{t-1})`` labelled by the date of ``P_t``.

    ``t0_index`` is the 1-based position of the first estimation date, so
    the warm-up holds ``t0_index`` returns.
    """

    dates: list
    log_returns: np.ndarray
    t0_index: int | None = None

    def __post_init__(self):
        self.log_returns = np.asarray(self.log_returns, dtype=float)
        if len(self.dates) != self.log_returns.size:
            raise InvalidArgumentError("dates and returns differ in length")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise InvalidArgumentError("dates must be strictly increasing")
        if not np.all(np.isfinite(self.log_returns)):
            raise InvalidArgumentError("returns must be finite")
        if self.t0_index is not None:
            self.t0_index = self._check_t0(self.t0_index)

    def __len__(self):
        return self.log_returns.size

    def _check_t0(self, t0):
        if not 3 <= t0 <= len(self):
            raise InvalidArgumentError(f"t0 index must lie in [3, {len(self)}], got {t0}")
        if t0 < MIN_WARMUP:
            warnings.warn(f"warm-up of {t0} returns is below {MIN_WARMUP}", stacklevel=3)
        return int(t0)

    def locate(self, when) -> int:
        """1-based index of the first return dated on or after ``when``."""
        if isinstance(when, str):
            when = dt.date.fromisoformat(when)
        for i, d in enumerate(self.dates, start=1):
            if d >= when:
                return i
        raise InvalidArgumentError(f"no return on or after {when}")

    def with_t0(self, t0) -> "ReturnSeries":
        """Copy with ``t0`` given as a 1-based index, a date or an ISO string."""
        if isinstance(t0, (str, dt.date)):
            t0 = self.locate(t0)
        return ReturnSeries(self.dates, self.log_returns, int(t0))

    @property
    def warmup_len(self) -> int:
        if self.t0_index is None:
            raise InvalidArgumentError("t0 is not set")
        return self.t0_index

    @property
    def eval_len(self) -> int:
        return len(self) - self.warmup_len


def _parse_row(row):
    raw_date = (row.get("date") or "").strip()
    raw_close = (row.get("close") or "").strip()
    if not raw_date:
        raise ValueError("missing date")
    if not raw_close:
        raise ValueError("missing close")
    day = dt.date.fromisoformat(raw_date[:10])
    close = float(raw_close)
    if not math.isfinite(close) or close <= 0:
        raise ValueError(f"non-positive or non-finite close {raw_close!r}")
    return day, close


def ingest(csv_path, t0=None) -> ReturnSeries:
    """Read ``date,close`` rows and return the log-return series.

    Header names are matched case-insensitively. Rows may come in any
    order. Unparseable rows, non-positive closes and duplicate dates are
    reported with their row numbers; more than 1% of bad rows aborts.
    """
    path = Path(csv_path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise InputError(f"{path}: empty file")
        names = {n.strip().lower(): n for n in reader.fieldnames}
        if "date" not in names or "close" not in names:
            raise InputError(f"{path}: header must contain 'date' and 'close'")
        good, bad, seen = [], [], {}
        for rownum, row in enumerate(reader, start=2):
            row = {k.strip().lower(): v for k, v in row.items() if k is not None}
            try:
                day, close = _parse_row(row)
            except ValueError as exc:
                bad.append((rownum, str(exc)))
                continue
            if day in seen:
                bad.append((rownum, f"duplicate date {day} (first at row {seen[day]})"))
                continue
            seen[day] = rownum
            good.append((day, close))
    total = len(good) + len(bad)
    if total == 0:
        raise InputError(f"{path}: no data rows")
    if bad:
        if len(bad) > MAX_BAD_FRACTION * total:
            raise InputError(f"{path}: {len(bad)} of {total} rows rejected", bad)
        for rownum, why in bad:
            logger.warning("%s row %d skipped: %s", path, rownum, why)
    good.sort()
    if len(good) < 2:
        raise InputError(f"{path}: at least two valid prices are needed")
    closes = np.array([c for _, c in good])
    series = ReturnSeries([d for d, _ in good[1:]], np.diff(np.log(closes)))
    return series.with_t0(t0) if t0 is not None else series
