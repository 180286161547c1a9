"""Monte Carlo coverage of confidence bands.

Each replicate ``r`` draws its data from the stream ``(master_seed, r)``,
fits by REML and builds every requested band on a fixed grid. All methods
in one run see the same replicates, so method comparisons are paired.
Results are gathered in replicate order, which makes the output identical
for any number of worker processes.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial

import numpy as np

from .basis import KnotVector
from .fit import fit
from .intervals import IterativeBC, ThetaReduced, build_band
from .simgen import generate_dataset


@dataclass(frozen=True)
class ExperimentConfig:
    target: object
    sampler: object
    noise: object
    knots: KnotVector
    master_seed: int
    methods: tuple = (ThetaReduced(1.0), ThetaReduced(0.2), ThetaReduced(0.1), ThetaReduced(0.0))
    replicates: int = 1000
    level: float = 0.95
    grid_points: int = 101

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("need at least one replicate")
        if not 0.0 < self.level < 1.0:
            raise ValueError(f"level must lie in (0, 1), got {self.level}")
        if not self.methods:
            raise ValueError("need at least one interval method")
        object.__setattr__(self, "methods", tuple(self.methods))

    @classmethod
    def from_mapping(cls, cfg: dict) -> "ExperimentConfig":
        from .config import build_knots, build_noise, build_sampler, build_target

        return cls(
            target=build_target(cfg),
            sampler=build_sampler(cfg),
            noise=build_noise(cfg),
            knots=build_knots(cfg),
            master_seed=cfg["run.seed"],
            methods=cfg["run.methods"],
            replicates=cfg["run.replicates"],
            level=cfg["run.level"],
            grid_points=cfg["run.grid_points"],
        )

    def evaluation_grid(self) -> np.ndarray | None:
        """Design points for fixed designs, else a uniform grid over the knot domain."""
        if not self.sampler.random:
            return self.sampler.sample()
        return np.linspace(self.knots.a, self.knots.b, self.grid_points)


@dataclass
class CoverageReport:
    grid: np.ndarray
    methods: tuple[str, ...]
    hits: dict[str, np.ndarray] = field(repr=False)
    mean_half_width: dict[str, np.ndarray] = field(repr=False)
    alpha_star: np.ndarray = field(repr=False)
    at_boundary: np.ndarray = field(repr=False)
    master_seed: int = 0
    level: float = 0.95

    @property
    def replicates(self) -> int:
        return self.alpha_star.size

    @property
    def boundary_count(self) -> int:
        return int(self.at_boundary.sum())

    def coverage(self, method: str) -> np.ndarray:
        return self.hits[method].sum(axis=0) / self.replicates

    def mc_se(self, method: str) -> np.ndarray:
        c = self.coverage(method)
        return np.sqrt(c * (1.0 - c) / self.replicates)

    def min_coverage(self, method: str) -> tuple[float, float]:
        """Lowest coverage over the grid and the grid point where it occurs."""
        c = self.coverage(method)
        j = int(np.argmin(c))
        return float(c[j]), float(self.grid[j])

    def subset(self, method: str) -> "CoverageReport":
        return replace(
            self,
            methods=(method,),
            hits={method: self.hits[method]},
            mean_half_width={method: self.mean_half_width[method]},
        )

    def alpha_summary(self) -> dict:
        q = np.quantile(self.alpha_star, [0.0, 0.25, 0.5, 0.75, 1.0])
        return dict(zip(["min", "q25", "median", "q75", "max"], (float(v) for v in q)))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "method", "coverage", "mc_se", "mean_half_width"])
        for m in self.methods:
            for row in zip(self.grid, self.coverage(m), self.mc_se(m), self.mean_half_width[m]):
                w.writerow([repr(float(row[0])), m, *(repr(float(v)) for v in row[1:])])
        return buf.getvalue()

    def to_json(self) -> str:
        d = {
            "level": self.level,
            "replicates": self.replicates,
            "master_seed": self.master_seed,
            "boundary_alpha_replicates": self.boundary_count,
            "alpha_star": self.alpha_summary(),
            "x": self.grid.tolist(),
            "methods": {
                m: {
                    "coverage": self.coverage(m).tolist(),
                    "mc_se": self.mc_se(m).tolist(),
                    "mean_half_width": self.mean_half_width[m].tolist(),
                    "min_coverage": self.min_coverage(m)[0],
                    "argmin_x": self.min_coverage(m)[1],
                }
                for m in self.methods
            },
        }
        return json.dumps(d, indent=2)


def run_replicate(config: ExperimentConfig, r: int):
    """Coverage indicators and half-widths, one row per method, for replicate ``r``."""
    data = generate_dataset(config.target, config.sampler, config.noise, (config.master_seed, r))
    grid = config.evaluation_grid() if config.sampler.random else None
    truth = config.target(data.xs if grid is None else grid)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = fit(data, config.knots, "reml")
    tau = 1.0 - config.level
    hits, widths = [], []
    for m in config.methods:
        band = build_band(res, m, tau, grid)
        hits.append((band.lower <= truth) & (truth <= band.upper))
        widths.append(band.half_width)
    return res.alpha, res.at_boundary, np.array(hits), np.array(widths)


def _run_chunk(config, indices):
    return [run_replicate(config, r) for r in indices]


def run_experiment(config: ExperimentConfig, workers: int = 1) -> CoverageReport:
    """Repeat generate / fit / band / check over all replicates."""
    idx = list(range(1, config.replicates + 1))
    if workers <= 1:
        results = _run_chunk(config, idx)
    else:
        chunks = [idx[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(partial(_run_chunk, config), chunks))
        by_rep = {}
        for ch, part in zip(chunks, parts):
            by_rep.update(zip(ch, part))
        results = [by_rep[r] for r in idx]
    alphas = np.array([a for a, _, _, _ in results])
    flags = np.array([f for _, f, _, _ in results])
    H = np.stack([h for _, _, h, _ in results])  # (R, methods, grid)
    W = np.stack([w for _, _, _, w in results])
    labels = tuple(m.label for m in config.methods)
    grid = config.evaluation_grid()
    return CoverageReport(
        grid=grid,
        methods=labels,
        hits={m: H[:, i, :] for i, m in enumerate(labels)},
        mean_half_width={m: W[:, i, :].mean(axis=0) for i, m in enumerate(labels)},
        alpha_star=alphas,
        at_boundary=flags,
        master_seed=config.master_seed,
        level=config.level,
    )


def _as_method(v):
    if isinstance(v, (ThetaReduced, IterativeBC)) or hasattr(v, "label"):
        return v
    raise TypeError(f"not an interval method: {v!r}")


def sweep(config: ExperimentConfig, axis: str, values, workers: int = 1) -> list[CoverageReport]:
    """One report per ``theta`` (``axis="theta"``) or ``n_bc`` (``axis="n_bc"``) value.

    All values are evaluated on the same replicates.
    """
    if not len(values):
        raise ValueError("empty sweep axis")
    if axis == "theta":
        methods = [ThetaReduced(float(v)) for v in values]
    elif axis == "n_bc":
        methods = [IterativeBC(int(v)) for v in values]
    elif axis == "methods":
        methods = [_as_method(v) for v in values]
    else:
        raise ValueError(f"unknown sweep axis {axis!r}")
    rep = run_experiment(replace(config, methods=tuple(methods)), workers)
    return [rep.subset(m.label) for m in methods]


@dataclass(frozen=True)
class Comparison:
    method_a: str
    method_b: str
    grid: np.ndarray
    difference: np.ndarray
    paired_se: np.ndarray

    @property
    def max_abs_difference(self) -> float:
        return float(np.max(np.abs(self.difference)))


def compare_methods(reports, pairing) -> list[Comparison]:
    """Per-grid coverage differences ``a - b`` with paired Monte Carlo SEs.

    ``reports`` is one report or a list of reports that must share the grid,
    seed and replicate count; ``pairing`` is a list of ``(label_a, label_b)``.
    """
    if isinstance(reports, CoverageReport):
        reports = [reports]
    base = reports[0]
    hits = {}
    for rep in reports:
        if rep.grid.shape != base.grid.shape or not np.array_equal(rep.grid, base.grid):
            raise ValueError("reports have mismatched evaluation grids")
        if rep.master_seed != base.master_seed or rep.replicates != base.replicates:
            raise ValueError("reports do not share replicate streams")
        hits.update(rep.hits)
    out = []
    for a, b in pairing:
        a, b = getattr(a, "label", a), getattr(b, "label", b)
        d = hits[a].astype(float) - hits[b].astype(float)
        diff = d.mean(axis=0)
        se = np.sqrt(d.var(axis=0) / d.shape[0])
        out.append(Comparison(a, b, base.grid, diff, se))
    return out
