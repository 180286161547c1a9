"""Synthetic data: smoothed broken-stick target, design samplers, Gaussian noise.

Random numbers come from numpy's counter-based Philox bit generator keyed by
``SeedSequence([master_seed, replicate])``. Normal deviates are drawn by the
inverse CDF and Beta deviates as a ratio of two gamma deviates, so a given
``(seed, replicate)`` pair yields the same stream on any machine and in any
worker.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

from .fit import Dataset

DOMAIN = (0.0, 5.0)


def make_rng(seed) -> np.random.Generator:
    """Philox generator for an int seed or a ``(master_seed, replicate)`` tuple."""
    if isinstance(seed, np.random.Generator):
        return seed
    key = list(seed) if isinstance(seed, (tuple, list)) else [seed]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in key])))


def standard_normal(rng: np.random.Generator, size) -> np.ndarray:
    # 53-bit uniforms shifted off 0 and 1 before the inverse normal CDF
    u = (rng.integers(0, 2**53, size=size, dtype=np.int64) + 0.5) * 2.0**-53
    return special.ndtri(u)


def beta_variates(rng: np.random.Generator, a: float, b: float, size) -> np.ndarray:
    g1 = rng.standard_gamma(a, size=size)
    g2 = rng.standard_gamma(b, size=size)
    return g1 / (g1 + g2)


@dataclass(frozen=True)
class BrokenStick:
    """Piecewise-linear function with corners rounded by tangent parabolas.

    Each corner ``c`` is replaced on ``[c - h, c + h]`` by the parabola that
    matches value and slope of the incoming line at ``c - h`` and the slope
    of the outgoing line at ``c + h``.
    """

    slopes: tuple[float, ...] = (1.0, -0.5, 1.5)
    corners: tuple[float, ...] = (1.0, 3.0)
    intercept: float = 0.0
    half_width: float = 0.2
    domain: tuple[float, float] = DOMAIN

    def __post_init__(self):
        if len(self.slopes) != len(self.corners) + 1:
            raise ValueError("need exactly one more slope than corners")
        c = np.asarray(self.corners, dtype=float)
        h = self.half_width
        edges = np.concatenate([[self.domain[0]], np.repeat(c, 2) + np.tile([-h, h], c.size), [self.domain[1]]])
        if h < 0 or np.any(np.diff(edges) < 0):
            raise ValueError("blend windows must be disjoint and inside the domain")

    def _corner_values(self) -> np.ndarray:
        v = [self.intercept]
        knots = [self.domain[0], *self.corners]
        for i, c in enumerate(self.corners):
            v.append(v[-1] + self.slopes[i] * (c - knots[i]))
        return np.array(v)

    def raw(self, x) -> np.ndarray:
        """The unsmoothed broken stick."""
        x = np.asarray(x, dtype=float)
        starts = np.array([self.domain[0], *self.corners])
        vals = self._corner_values()
        seg = np.searchsorted(np.asarray(self.corners), x, side="right")
        return vals[seg] + np.asarray(self.slopes)[seg] * (x - starts[seg])

    def __call__(self, x) -> np.ndarray:
        x0 = np.asarray(x, dtype=float)
        x = np.atleast_1d(x0)
        lo, hi = self.domain
        if np.any((x < lo) | (x > hi)):
            raise ValueError(f"x outside the target domain [{lo}, {hi}]")
        out = self.raw(x)
        h = self.half_width
        if h == 0:
            return out.reshape(x0.shape)
        for i, c in enumerate(self.corners):
            m1, m2 = self.slopes[i], self.slopes[i + 1]
            left = c - h
            w = (x >= left) & (x <= c + h)
            u = x[w] - left
            out[w] = self.raw(left) + m1 * u + (m2 - m1) / (4.0 * h) * u**2
        return out.reshape(x0.shape)


@dataclass(frozen=True)
class CustomTarget:
    func: Callable
    name: str = "custom"
    domain: tuple[float, float] = DOMAIN

    def __call__(self, x) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)


def smoothed_broken_stick(x, **params) -> np.ndarray:
    return BrokenStick(**params)(x)


@dataclass(frozen=True)
class EquallySpaced:
    n: int = 101
    domain: tuple[float, float] = DOMAIN
    random = False

    def sample(self, rng=None) -> np.ndarray:
        return np.linspace(self.domain[0], self.domain[1], self.n)


@dataclass(frozen=True)
class ScaledBeta:
    n: int = 101
    shape1: float = 0.8
    shape2: float = 0.8
    scale: float = 5.0
    random = True

    @property
    def domain(self) -> tuple[float, float]:
        return (0.0, self.scale)

    def sample(self, rng) -> np.ndarray:
        return np.sort(self.scale * beta_variates(make_rng(rng), self.shape1, self.shape2, self.n))


def sample_design(sampler, seed=None, min_points: int | None = None) -> np.ndarray:
    if min_points is not None and sampler.n < min_points:
        raise ValueError(f"design has n = {sampler.n} < {min_points} basis functions")
    return sampler.sample(make_rng(seed) if sampler.random else None)


@dataclass(frozen=True)
class ConstantNoise:
    sigma: float = 0.1

    def __post_init__(self):
        if self.sigma < 0:
            raise ValueError("noise SD must be nonnegative")

    def sd(self, x) -> np.ndarray:
        return np.full(np.shape(x), float(self.sigma))


@dataclass(frozen=True)
class LinearNoise:
    """``sigma(x) = slope * x + intercept``."""

    slope: float
    intercept: float

    def sd(self, x) -> np.ndarray:
        s = self.slope * np.asarray(x, dtype=float) + self.intercept
        if np.any(s <= 0):
            raise ValueError("linear noise SD is not positive over the design")
        return s


def generate_dataset(target, sampler, noise, seed) -> Dataset:
    """Draw one dataset ``y_i = f(x_i) + sigma(x_i) e_i``; deterministic in ``seed``."""
    rng = make_rng(seed)
    xs = sampler.sample(rng) if sampler.random else sampler.sample()
    sd = noise.sd(xs)
    ys = target(xs) + sd * standard_normal(rng, xs.size)
    return Dataset(xs, ys, sd)
