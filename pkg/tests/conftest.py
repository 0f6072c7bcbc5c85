import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


@pytest.fixture
def write_prices(tmp_path):
    """Write a ``date,close`` CSV and return its path."""

    def _write(closes, start="2020-01-01", name="prices.csv", header="date,close"):
        import datetime as dt

        d0 = dt.date.fromisoformat(start)
        lines = [header]
        for i, c in enumerate(closes):
            lines.append(f"{d0 + dt.timedelta(days=i)},{c}")
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n")
        return path

    return _write


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(lines):
        terminalreporter.write_line(lines[cid])
