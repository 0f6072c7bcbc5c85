"""Command line entry point: ``stable-eff <command> [options]``.

Commands
--------
select-omega  grid search for the discount factor
trace         per-date stable parameters, H, m, PIT and rejection flags
bands         null confidence bands for H, m and alpha
density       stable density curves on chosen dates
report        min / max / last value of each indicator over the trace

Every command writes CSV files and a JSON manifest into ``--out``.
Exit codes: 0 success, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .data import ReturnSeries, ingest
from .discount import DEFAULT_NU, default_grid, select_omega
from .efficiency import run_trace
from .exceptions import InvalidArgumentError, NumericalFailureError, StableEffError
from .significance import (
    DEFAULT_EVAL_LEN,
    DEFAULT_LEVELS,
    INDICATORS,
    ConfidenceBands,
    bands,
    simulate_null,
)
from .stable_dist import QUAD_TOL, pdf

logger = logging.getLogger("stable_eff")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERICAL = 3

TRACE_COLUMNS = ("alpha", "beta", "gamma", "mu0", "H", "m", "pit")
REPORT_INDICATORS = ("H", "m", "alpha")


@dataclass
class RunConfig:
    """Options shared by every command."""

    omega: float | str = "auto"
    grid: tuple = (0.900, 0.990, 0.001)
    nu: int = DEFAULT_NU
    t0: str | int | None = None
    levels: tuple = DEFAULT_LEVELS
    eval_dates: int = DEFAULT_EVAL_LEN
    n_paths: int = 1
    seed: int = 0
    prune: bool = False
    quad_tol: float = QUAD_TOL
    n_jobs: int | None = None

    def validate(self):
        if self.omega != "auto":
            self.omega = float(self.omega)
            if not 0.0 < self.omega < 1.0:
                raise InvalidArgumentError(f"omega must lie in (0, 1) or be 'auto', got {self.omega}")
        self.grid = tuple(float(v) for v in self.grid)
        if len(self.grid) != 3:
            raise InvalidArgumentError("grid needs start, stop and step")
        default_grid(*self.grid)
        self.levels = tuple(sorted(float(p) for p in self.levels))
        if not self.levels or any(not 0.0 < p < 1.0 for p in self.levels):
            raise InvalidArgumentError("confidence levels must lie in (0, 1)")
        if int(self.nu) < 2:
            raise InvalidArgumentError("nu must be at least 2")
        self.nu = int(self.nu)
        if int(self.eval_dates) < 1000:
            raise InvalidArgumentError("eval dates must be at least 1000")
        self.eval_dates = int(self.eval_dates)
        if int(self.n_paths) < 1:
            raise InvalidArgumentError("n_paths must be at least 1")
        self.n_paths = int(self.n_paths)
        self.seed = int(self.seed)
        self.quad_tol = float(self.quad_tol)
        if not self.quad_tol > 0:
            raise InvalidArgumentError("quadrature tolerance must be positive")
        return self


# ---------------------------------------------------------------- formatting


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return "" if math.isnan(v) else repr(v)
    return str(v)


def _parse_float(s: str) -> float:
    return math.nan if s == "" else float(s)


def _write_csv(path: Path, header, rows):
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _sha256(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out: Path, command, config: RunConfig, inputs, outputs, extra=None):
    manifest = {
        "command": command,
        "version": __version__,
        "seed": config.seed,
        "config": dataclasses.asdict(config),
        "inputs": {str(p): _sha256(p) for p in inputs},
        "outputs": [p.name for p in outputs],
    }
    if extra:
        manifest.update(extra)
    path = out / f"{command}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=str) + "\n")
    return path


# ------------------------------------------------------------------ pipeline


def _load_series(args, config) -> ReturnSeries:
    if args.input is None:
        raise InvalidArgumentError("--input is required")
    if config.t0 is None:
        raise InvalidArgumentError("--t0 is required")
    t0 = config.t0
    if isinstance(t0, str) and t0.isdigit():
        t0 = int(t0)
    return ingest(args.input, t0=t0)


def _date_str(d):
    return d.isoformat() if hasattr(d, "isoformat") else str(d)


def _resolve_omega(series, config):
    if config.omega != "auto":
        return float(config.omega), None
    sel = select_omega(
        series.log_returns,
        default_grid(*config.grid),
        series.t0_index,
        nu=config.nu,
        tol=config.quad_tol,
        prune=config.prune,
        n_jobs=config.n_jobs,
    )
    return sel.omega, sel


def _null_bands(warmup_len, omega, config) -> ConfidenceBands:
    est = simulate_null(
        warmup_len,
        config.eval_dates,
        omega,
        seed=config.seed,
        n_paths=config.n_paths,
        n_jobs=config.n_jobs,
    )
    return bands(est, config.levels)


def _trace(series, omega, config):
    return run_trace(
        series.log_returns,
        omega,
        series.t0_index,
        dates=[_date_str(d) for d in series.dates],
        tol=config.quad_tol,
        prune=config.prune,
    )


def summarize(dates, columns, indicators=REPORT_INDICATORS):
    """Rows ``(indicator, min, date_of_min, max, date_of_max, value_at_T)``."""
    rows = []
    for name in indicators:
        v = np.asarray(columns[name], dtype=float)
        if not np.any(np.isfinite(v)):
            rows.append((name, math.nan, "", math.nan, "", v[-1] if v.size else math.nan))
            continue
        i_min = int(np.nanargmin(v))
        i_max = int(np.nanargmax(v))
        rows.append((name, v[i_min], dates[i_min], v[i_max], dates[i_max], v[-1]))
    return rows


def read_trace_csv(path):
    """Return ``(dates, columns)`` from a trace CSV written by ``trace``."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        dates, cols = [], {c: [] for c in TRACE_COLUMNS}
        for row in reader:
            dates.append(row["date"])
            for c in TRACE_COLUMNS:
                cols[c].append(_parse_float(row[c]))
    return dates, {c: np.array(v) for c, v in cols.items()}


# ------------------------------------------------------------------ commands


def cmd_select_omega(args, config, out: Path):
    series = _load_series(args, config)
    sel = select_omega(
        series.log_returns,
        default_grid(*config.grid),
        series.t0_index,
        nu=config.nu,
        tol=config.quad_tol,
        prune=config.prune,
        n_jobs=config.n_jobs,
    )
    # PIT positions start one date after t0
    pit_dates = [_date_str(d) for d in series.dates[series.t0_index :]]
    path = out / "select_omega.csv"
    _write_csv(
        path,
        ["omega", "d", "window_start", "window_end"],
        (
            (r.omega, r.d, pit_dates[r.start], pit_dates[r.stop])
            for r in sel.reports
        ),
    )
    print(f"omega* = {sel.omega:g}")
    for r in sel.reports:
        print(f"{r.omega:.3f}\t{r.d:.6f}")
    for w, why in sel.disqualified.items():
        print(f"{w:.3f}\tdisqualified: {why}")
    _write_manifest(
        out,
        "select-omega",
        config,
        [args.input],
        [path],
        {"omega_star": sel.omega, "disqualified": {str(k): v for k, v in sel.disqualified.items()}},
    )
    return sel


def cmd_bands(args, config, out: Path):
    series = _load_series(args, config)
    omega, _ = _resolve_omega(series, config)
    cb = _null_bands(series.warmup_len, omega, config)
    path = out / "bands.csv"
    _write_csv(path, ["indicator", "level", "lower", "upper"], cb.rows())
    _write_manifest(
        out, "bands", config, [args.input], [path],
        {"omega": omega, "warmup_len": series.warmup_len},
    )
    return cb


def _read_bands(path) -> ConfidenceBands:
    with open(path, newline="") as fh:
        rows = [
            (r["indicator"], float(r["level"]), float(r["lower"]), float(r["upper"]))
            for r in csv.DictReader(fh)
        ]
    return ConfidenceBands.from_rows(rows)


def cmd_trace(args, config, out: Path):
    series = _load_series(args, config)
    omega, _ = _resolve_omega(series, config)
    trace = _trace(series, omega, config)
    header = ["date", *TRACE_COLUMNS]
    cb = None
    if not args.no_flags:
        cb = _read_bands(args.bands) if args.bands else _null_bands(series.warmup_len, omega, config)
        flag_cols = [(name, lv) for name in INDICATORS for lv in cb.levels]
        header += [f"reject_{name}_{lv:g}" for name, lv in flag_cols]
        flags = [cb.rejects(name, getattr(trace, name), lv) for name, lv in flag_cols]
    rows = []
    for k, d in enumerate(trace.date_labels()):
        row = [d, *(getattr(trace, c)[k] for c in TRACE_COLUMNS)]
        if cb is not None:
            row += [int(f[k]) for f in flags]
        rows.append(row)
    path = out / "trace.csv"
    _write_csv(path, header, rows)
    inputs = [args.input] + ([args.bands] if args.bands else [])
    gaps = [{"date": g.date, "error": str(g.cause)} for g in trace.gaps]
    _write_manifest(out, "trace", config, inputs, [path], {"omega": omega, "gaps": gaps})
    return trace


def cmd_density(args, config, out: Path):
    series = _load_series(args, config)
    omega, _ = _resolve_omega(series, config)
    trace = _trace(series, omega, config)
    labels = trace.date_labels()
    wanted = args.dates.split(",") if args.dates else [labels[0], labels[-1]]
    rows = []
    for d in wanted:
        d = d.strip()
        if d not in labels:
            raise InvalidArgumentError(f"date {d} is not an estimation date")
        k = labels.index(d)
        if not math.isfinite(trace.alpha[k]):
            raise InvalidArgumentError(f"no stable estimate on {d}")
        params = trace.params_at(k)
        half = args.width * params.gamma
        xs = np.linspace(params.mu0 - half, params.mu0 + half, args.points)
        ys = pdf(xs, params, config.quad_tol)
        rows.extend((d, x, y) for x, y in zip(xs, ys))
    path = out / "density.csv"
    _write_csv(path, ["date", "x", "pdf"], rows)
    _write_manifest(out, "density", config, [args.input], [path], {"omega": omega, "dates": wanted})
    return rows


def cmd_report(args, config, out: Path):
    if args.from_trace:
        dates, cols = read_trace_csv(args.from_trace)
        inputs, omega = [args.from_trace], None
    else:
        series = _load_series(args, config)
        omega, _ = _resolve_omega(series, config)
        trace = _trace(series, omega, config)
        dates = trace.date_labels()
        cols = {c: getattr(trace, c) for c in TRACE_COLUMNS}
        inputs = [args.input]
    rows = summarize(dates, cols)
    path = out / "report.csv"
    _write_csv(
        path, ["indicator", "min", "date_of_min", "max", "date_of_max", "value_at_T"], rows
    )
    for name, vmin, dmin, vmax, dmax, last in rows:
        print(f"{name}\t{vmin:.3f}\t{dmin}\t{vmax:.3f}\t{dmax}\t{last:.3f}")
    _write_manifest(out, "report", config, inputs, [path], {"omega": omega})
    return rows


COMMANDS = {
    "select-omega": cmd_select_omega,
    "trace": cmd_trace,
    "bands": cmd_bands,
    "density": cmd_density,
    "report": cmd_report,
}


# ------------------------------------------------------------------- parsing


def _grid_arg(s):
    parts = s.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("grid must look like start:stop:step")
    return tuple(float(p) for p in parts)


def _levels_arg(s):
    return tuple(float(p) for p in s.split(","))


def _common(p):
    p.add_argument("--input", help="CSV with 'date' and 'close' columns")
    p.add_argument("--config", help="YAML or JSON file of options; flags override it")
    p.add_argument("--omega", help="discount factor, or 'auto' to select it")
    p.add_argument("--t0", help="first estimation date (ISO) or 1-based return index")
    p.add_argument("--nu", type=int, help="minimum PIT window (default 22)")
    p.add_argument("--grid", type=_grid_arg, help="omega grid start:stop:step")
    p.add_argument("--levels", type=_levels_arg, help="confidence levels, comma separated")
    p.add_argument("--eval-dates", dest="eval_dates", type=int, help="simulated null dates")
    p.add_argument("--n-paths", dest="n_paths", type=int, help="independent null paths")
    p.add_argument("--seed", type=int, help="random seed for the null simulation")
    p.add_argument("--prune", action="store_true", default=None, help="drop weights below 1e-15")
    p.add_argument("--quad-tol", dest="quad_tol", type=float, help="quadrature tolerance")
    p.add_argument("--n-jobs", dest="n_jobs", type=int, help="parallel workers")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="stable-eff",
        description="Dynamic alpha-stable estimation and market-efficiency indicators.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _common(p)
        if name == "trace":
            p.add_argument("--no-flags", dest="no_flags", action="store_true")
            p.add_argument("--bands", help="reuse a bands.csv instead of simulating")
        if name == "density":
            p.add_argument("--dates", help="comma separated estimation dates (default first,last)")
            p.add_argument("--points", type=int, default=401)
            p.add_argument("--width", type=float, default=10.0, help="half-width in units of gamma")
        if name == "report":
            p.add_argument("--from-trace", dest="from_trace", help="summarise an existing trace.csv")
    return parser


_CONFIG_FIELDS = {f.name for f in dataclasses.fields(RunConfig)}


def make_config(args) -> RunConfig:
    values = {}
    if args.config:
        loaded = yaml.safe_load(Path(args.config).read_text()) or {}
        if not isinstance(loaded, dict):
            raise InvalidArgumentError("config file must hold a mapping")
        unknown = set(loaded) - _CONFIG_FIELDS
        if unknown:
            raise InvalidArgumentError(f"unknown config keys {sorted(unknown)}")
        values.update(loaded)
    for name in _CONFIG_FIELDS:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if isinstance(values.get("grid"), str):
        values["grid"] = _grid_arg(values["grid"])
    if isinstance(values.get("levels"), str):
        values["levels"] = _levels_arg(values["levels"])
    if values.get("t0") is not None and not isinstance(values["t0"], (int, str)):
        values["t0"] = str(values["t0"])
    return RunConfig(**values).validate()


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        config = make_config(args)
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        COMMANDS[args.command](args, config, out)
    except NumericalFailureError as exc:
        print(f"stable-eff {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (StableEffError, OSError, ValueError, KeyError) as exc:
        print(f"stable-eff {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
