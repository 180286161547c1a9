"""Command line: ``pspline-ci fit | band | coverage``.

Every failure prints one ``error: ...`` line on stderr and exits with status 2.
The default output directory can be set with ``PSPLINE_CI_OUT``.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .basis import KnotVector, make_knots
from .config import ConfigError, parse_config
from .coverage import ExperimentConfig, run_experiment
from .fit import Dataset, FitResult, fit
from .intervals import IterativeBC, ThetaReduced, build_band, parse_method
from .svg import band_svg, coverage_svg

ENV_OUT = "PSPLINE_CI_OUT"


class CLIError(Exception):
    pass


def _default_out() -> str:
    return os.environ.get(ENV_OUT, ".")


def read_xy_csv(path, x_column: str, y_column: str) -> Dataset:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CLIError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        for col in (x_column, y_column):
            if col not in header:
                raise CLIError(f"{path}: missing column {col!r} (have {', '.join(header)})")
        ix, iy = header.index(x_column), header.index(y_column)
        xs, ys = [], []
        for line_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise CLIError(f"{path}: row {line_no} has {len(row)} fields, expected {len(header)}")
            for i, dest in ((ix, xs), (iy, ys)):
                try:
                    dest.append(float(row[i]))
                except ValueError:
                    raise CLIError(f"{path}: row {line_no}: non-numeric value {row[i]!r} in column {header[i]!r}") from None
    if len(xs) < 3:
        raise CLIError(f"{path}: need at least 3 rows, got {len(xs)}")
    return Dataset(np.array(xs), np.array(ys))


def _knots_dict(k: KnotVector) -> dict:
    return {"interior": list(k.interior), "a": k.a, "b": k.b, "order": k.order}


def _write(path: Path, text: str, written: list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    written.append(str(path))


def _safe(label: str) -> str:
    return label.replace("=", "-").replace(":", "-")


def _fit_payload(res: FitResult, data: Dataset, args) -> dict:
    return {
        "source": str(args.csv),
        "x_column": args.x,
        "y_column": args.y,
        "n": data.n,
        "knots": _knots_dict(res.knots),
        "selection": args.alpha,
        "alpha": res.alpha,
        "alpha_at_boundary": bool(res.at_boundary),
        "sigma2": None if np.isnan(res.sigma2_hat) else res.sigma2_hat,
        "edf": res.edf,
        "coefficients": res.beta_hat.tolist(),
        "x": data.xs.tolist(),
        "y": data.ys.tolist(),
    }


def load_fit(path) -> tuple[FitResult, dict]:
    """Rebuild a :class:`FitResult` from a ``fit.json`` written by ``pspline-ci fit``."""
    with open(path, encoding="utf-8") as fh:
        meta = json.load(fh)
    k = meta["knots"]
    knots = KnotVector(tuple(k["interior"]), k["a"], k["b"], k["order"])
    data = Dataset(np.array(meta["x"]), np.array(meta["y"]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = fit(data, knots, alpha=meta["alpha"])
    return res, meta


def _grid(text: str, res: FitResult):
    if text in ("design", ""):
        return None
    if text.startswith("uniform:"):
        n = int(text.split(":", 1)[1])
        return np.linspace(res.knots.a, res.knots.b, n)
    raise CLIError(f"unknown grid {text!r} (use 'design' or 'uniform:N')")


def _methods_from_args(args) -> list:
    methods = [ThetaReduced(t) for t in (args.theta or [])]
    methods += [IterativeBC(n) for n in (args.nbc or [])]
    for m in args.method or []:
        try:
            methods.append(parse_method(m))
        except ValueError as e:
            raise CLIError(str(e)) from None
    return methods


def _emit_bands(res: FitResult, methods, overlays, tau, grid_spec, out: Path, xlabel, ylabel, written):
    grid = _grid(grid_spec, res)
    over = [build_band(res, m, tau, grid) for m in overlays]
    bands = []
    for m in methods:
        band = build_band(res, m, tau, grid)
        stem = f"band_{_safe(m.label)}"
        _write(out / f"{stem}.csv", band.to_csv(), written)
        _write(out / f"{stem}.json", band.to_json() + "\n", written)
        _write(out / f"{stem}.svg", band_svg(res.xs, res.y, band, overlay=over, xlabel=xlabel, ylabel=ylabel), written)
        bands.append(band)
    return bands


def cmd_fit(args) -> list[str]:
    data = read_xy_csv(args.csv, args.x, args.y)
    knots = make_knots((data.xs.min(), data.xs.max()), args.knots, args.order, args.knots_include_boundary)
    alpha = args.alpha if args.alpha == "reml" else float(args.alpha)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        res = fit(data, knots, alpha)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out = Path(args.out)
    written: list[str] = []
    _write(out / "fit.json", json.dumps(_fit_payload(res, data, args), indent=2) + "\n", written)
    buf = ["x,fitted"] + [f"{x!r},{f!r}" for x, f in zip(data.xs.tolist(), (res.X @ res.beta_hat).tolist())]
    _write(out / "fitted.csv", "\n".join(buf) + "\n", written)
    methods = _methods_from_args(args)
    if methods:
        overlays = [parse_method(m) for m in args.overlay or []]
        _emit_bands(res, methods, overlays, args.tau, args.grid, out, args.x, args.y, written)
    return written


def cmd_band(args) -> list[str]:
    res, meta = load_fit(args.fit)
    methods = _methods_from_args(args)
    if not methods:
        raise CLIError("no interval methods requested (use --theta, --nbc or --method)")
    try:
        overlays = [parse_method(m) for m in args.overlay or []]
    except ValueError as e:
        raise CLIError(str(e)) from None
    written: list[str] = []
    out = Path(args.out)
    _emit_bands(res, methods, overlays, args.tau, args.grid, out, meta["x_column"], meta["y_column"], written)
    return written


def cmd_coverage(args) -> list[str]:
    t0 = time.perf_counter()
    raw = Path(args.config).read_bytes()
    text = raw.decode("utf-8")
    if args.seed is not None:
        text += f"\nrun.seed = {args.seed}\n"
    if args.replicates is not None:
        text += f"\nrun.replicates = {args.replicates}\n"
    cfg = parse_config(text)
    exp = ExperimentConfig.from_mapping(cfg)
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    report = run_experiment(exp, workers=workers)
    out = Path(args.out)
    written: list[str] = []
    for m in report.methods:
        _write(out / f"coverage_{_safe(m)}.csv", report.subset(m).to_csv(), written)
    _write(out / "coverage.json", report.to_json() + "\n", written)
    _write(out / "coverage.svg", coverage_svg(report), written)
    manifest = {
        "command": "coverage",
        "config": str(args.config),
        "config_sha256": hashlib.sha256(raw).hexdigest(),
        "master_seed": exp.master_seed,
        "replicates": exp.replicates,
        "workers": workers,
        "boundary_alpha_replicates": report.boundary_count,
        "software_version": __version__,
        "duration_seconds": round(time.perf_counter() - t0, 3),
        "outputs": sorted(written),
    }
    _write(out / "manifest.json", json.dumps(manifest, indent=2) + "\n", written)
    return written


def _add_band_flags(p):
    p.add_argument("--theta", type=float, action="append", help="reduced-smoothing band at theta*alpha* (repeatable)")
    p.add_argument("--nbc", type=int, action="append", help="iterative bias-corrected band with N_BC rounds (repeatable)")
    p.add_argument("--method", action="append", help="method string: theta=0.1, iter:5, hodges, hodges-origvar")
    p.add_argument("--overlay", action="append", help="band drawn as dashed bounds on every plot, e.g. iter:5")
    p.add_argument("--tau", type=float, default=0.05, help="1 - confidence level (default 0.05)")
    p.add_argument("--grid", default="design", help="'design' (default) or 'uniform:N'")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pspline-ci", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit a penalized spline to two CSV columns")
    p.add_argument("csv")
    p.add_argument("--x", required=True, help="predictor column")
    p.add_argument("--y", required=True, help="response column")
    p.add_argument("--knots", type=int, default=24, help="number of equally spaced interior knots")
    p.add_argument("--knots-include-boundary", action="store_true", help="count --knots including both endpoints")
    p.add_argument("--order", type=int, default=4, help="B-spline order (4 = cubic)")
    p.add_argument("--alpha", default="reml", help="'reml' (default) or a fixed smoothing parameter")
    p.add_argument("--out", default=_default_out())
    _add_band_flags(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("band", help="confidence bands from a fit.json")
    p.add_argument("fit", help="fit.json written by 'pspline-ci fit'")
    p.add_argument("--out", default=_default_out())
    _add_band_flags(p)
    p.set_defaults(func=cmd_band)

    p = sub.add_parser("coverage", help="Monte Carlo coverage experiment from a config file")
    p.add_argument("config")
    p.add_argument("--out", default=_default_out())
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: all cores)")
    p.add_argument("--seed", type=int, default=None, help="override run.seed")
    p.add_argument("--replicates", type=int, default=None, help="override run.replicates")
    p.set_defaults(func=cmd_coverage)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        written = args.func(args)
    except (CLIError, ConfigError, ValueError, OSError, np.linalg.LinAlgError) as e:
        msg = " ".join(str(e).split())
        print(f"error: {msg}", file=sys.stderr)
        return 2
    for path in written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
