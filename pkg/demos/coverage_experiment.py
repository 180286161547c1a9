"""Monte Carlo coverage of the broken-stick experiment.

Run:  python3 demos/coverage_experiment.py [--replicates 1000] [--workers N]

Each replicate draws 101 noisy points from the smoothed broken stick, picks
alpha by REML and builds every band. The penalized band undercovers where
the curve turns sharply; shrinking theta or iterating the bias correction
pulls coverage back toward 95%.
"""

import argparse
import os
import time
from pathlib import Path

from pspline_ci.basis import make_knots
from pspline_ci.coverage import ExperimentConfig, run_experiment
from pspline_ci.intervals import IterativeBC, ThetaReduced
from pspline_ci.simgen import BrokenStick, ConstantNoise, EquallySpaced
from pspline_ci.svg import coverage_svg


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--replicates", type=int, default=1000)
    ap.add_argument("--seed", type=int, default=12345)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--out", default="demo_out")
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    methods = (ThetaReduced(1.0), ThetaReduced(0.2), ThetaReduced(0.1), ThetaReduced(0.0), IterativeBC(1), IterativeBC(5))
    cfg = ExperimentConfig(
        BrokenStick(), EquallySpaced(101), ConstantNoise(0.1), make_knots((0.0, 5.0), 24, 4),
        master_seed=args.seed, methods=methods, replicates=args.replicates,
    )
    t0 = time.perf_counter()
    rep = run_experiment(cfg, workers=args.workers)
    print(f"{rep.replicates} replicates in {time.perf_counter() - t0:.1f}s, "
          f"{rep.boundary_count} with alpha* on the search boundary")
    print(f"{'method':>10}  {'min cov':>7}  {'at x':>5}  {'mean cov':>8}")
    for m in rep.methods:
        v, x = rep.min_coverage(m)
        print(f"{m:>10}  {v:7.3f}  {x:5.2f}  {rep.coverage(m).mean():8.3f}")
    (out / "coverage.svg").write_text(coverage_svg(rep))
    print(f"wrote {out / 'coverage.svg'}")


if __name__ == "__main__":
    main()
