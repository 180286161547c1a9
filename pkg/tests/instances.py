"""Random small penalized-spline problems shared by several test modules."""

import warnings

import numpy as np

from pspline_ci.basis import make_knots
from pspline_ci.fit import BoundaryWarning, Dataset, fit


def small_instance(rng: np.random.Generator, reml: bool = True):
    n = int(rng.integers(20, 51))
    p = int(rng.integers(6, 13))
    knots = make_knots((0.0, 1.0), p - 4, 4)
    # one uniform draw per stratum keeps X'X well conditioned
    xs = (np.arange(n) + rng.uniform(0.0, 1.0, n)) / n
    xs[0], xs[-1] = 0.0, 1.0
    ys = np.sin(2 * np.pi * xs) + rng.normal(0, 0.3, n)
    if reml:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", BoundaryWarning)
            return fit(Dataset(xs, ys), knots)
    return fit(Dataset(xs, ys), knots, alpha=float(10 ** rng.uniform(-4, 1)))


def small_instances(count: int = 100, seed: int = 20240613, reml: bool = True):
    rng = np.random.default_rng(seed)
    return [small_instance(rng, reml) for _ in range(count)]
