"""Pointwise confidence bands for penalized spline fits.

Every band here is built from a coefficient estimator that is linear in
``y``, ``beta_tilde = G y``. Its covariance is ``sigma^2 G G'`` and the
band at ``x`` is ``B(x)' beta_tilde +/- z * sigma * ||G' B(x)||``.
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .basis import build_design
from .fit import FitResult, _factor


@dataclass(frozen=True)
class ThetaReduced:
    """Refit at ``theta * alpha*``; ``theta=1`` is the fully penalized band, ``theta=0`` unpenalized."""

    theta: float

    def __post_init__(self):
        if not 0.0 <= self.theta <= 1.0:
            raise ValueError(f"theta must lie in [0, 1], got {self.theta}")

    @property
    def label(self) -> str:
        return f"theta={self.theta:g}"


@dataclass(frozen=True)
class Hodges:
    """Simple-shift bias correction.

    ``original_variance=True`` keeps the variance of the uncorrected fit,
    which is known to undercover; the default uses the corrected fit's variance.
    """

    original_variance: bool = False

    @property
    def label(self) -> str:
        return "hodges-origvar" if self.original_variance else "hodges"


@dataclass(frozen=True)
class IterativeBC:
    """``n_bc`` rounds of plug-in bias correction."""

    n_bc: int

    def __post_init__(self):
        if int(self.n_bc) != self.n_bc or self.n_bc < 1:
            raise ValueError(f"n_bc must be an integer >= 1, got {self.n_bc}")

    @property
    def label(self) -> str:
        return f"iter:{self.n_bc}"


IntervalMethod = ThetaReduced | Hodges | IterativeBC

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def parse_method(text: str) -> IntervalMethod:
    """Parse ``theta=0.1``, ``iter:5``, ``hodges`` or ``hodges-origvar``."""
    s = text.strip().lower()
    if m := re.fullmatch(rf"theta\s*[=:]\s*({_NUM})", s):
        return ThetaReduced(float(m.group(1)))
    if m := re.fullmatch(r"(?:iter|nbc|bc)\s*[=:]\s*(\d+)", s):
        return IterativeBC(int(m.group(1)))
    if s == "hodges":
        return Hodges()
    if s == "hodges-origvar":
        return Hodges(original_variance=True)
    raise ValueError(f"unknown interval method {text!r}")


@dataclass(frozen=True)
class ConfidenceBand:
    grid: np.ndarray
    estimate: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    sd: np.ndarray
    level: float
    method: IntervalMethod
    alpha_star: float
    coef: np.ndarray | None = None

    @property
    def half_width(self) -> np.ndarray:
        return self.upper - self.estimate

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "estimate", "lower", "upper"])
        for row in zip(self.grid, self.estimate, self.lower, self.upper):
            w.writerow([repr(float(v)) for v in row])
        return buf.getvalue()

    def metadata(self) -> dict:
        m = self.method
        meta = {
            "method": m.label,
            "level": self.level,
            "alpha_star": self.alpha_star,
            "theta": getattr(m, "theta", None),
            "n_bc": 1 if isinstance(m, Hodges) else getattr(m, "n_bc", None),
            "n_points": int(self.grid.size),
        }
        return meta

    def to_json(self) -> str:
        d = self.metadata()
        d.update(
            x=self.grid.tolist(),
            estimate=self.estimate.tolist(),
            lower=self.lower.tolist(),
            upper=self.upper.tolist(),
        )
        return json.dumps(d, indent=2)


def read_band_csv(text: str) -> dict[str, np.ndarray]:
    """Columns of a band CSV as float arrays keyed by header name."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if header != ["x", "estimate", "lower", "upper"]:
        raise ValueError(f"unexpected band CSV header {header}")
    cols = np.array(body, dtype=float).reshape(-1, 4)
    return {h: cols[:, i] for i, h in enumerate(header)}


def write_band_csv(cols: dict[str, np.ndarray]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "estimate", "lower", "upper"])
    for row in zip(cols["x"], cols["estimate"], cols["lower"], cols["upper"]):
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def z_quantile(tau: float) -> float:
    return float(stats.norm.ppf(1.0 - tau / 2.0))


def _critical_value(fit: FitResult, tau: float, t_dist: bool) -> float:
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    if t_dist:
        return float(stats.t.ppf(1.0 - tau / 2.0, fit.n - fit.edf))
    return z_quantile(tau)


def variance_of_fit(X, D, alpha: float, sigma2: float, basis_grid) -> np.ndarray:
    """``sigma2 * B(x)' A^{-1} X'X A^{-1} B(x)`` for each row ``B(x)`` of ``basis_grid``."""
    c = _factor(X, D, alpha)
    W = X @ c.solve(np.asarray(basis_grid).T)
    return sigma2 * np.einsum("ij,ij->j", W, W)


def _band(fit, G, method, tau, x_grid, t_dist, coef=None) -> ConfidenceBand:
    if x_grid is None:
        g, Bg = fit.xs, fit.X
    else:
        g = np.asarray(x_grid, dtype=float).reshape(-1)
        Bg = build_design(fit.knots, g)
    if coef is None:
        coef = G @ fit.y
    est = Bg @ coef
    sd = np.sqrt(fit.sigma2_hat) * np.linalg.norm(Bg @ G, axis=1)
    hw = _critical_value(fit, tau, t_dist) * sd
    return ConfidenceBand(g, est, est - hw, est + hw, sd, 1.0 - tau, method, fit.alpha, coef)


def shrinkage_matrix(fit: FitResult) -> np.ndarray:
    """``M = alpha* A^{-1} D``, the map from coefficients to (minus) their plug-in bias."""
    c = _factor(fit.X, fit.D, fit.alpha)
    return fit.alpha * c.solve(fit.D)


def theta_band(fit: FitResult, theta: float, tau: float = 0.05, x_grid=None, t_dist: bool = False):
    """Band from the refit at ``theta * alpha*`` with ``sigma2`` taken from the ``alpha*`` fit."""
    method = ThetaReduced(theta)
    if theta == 1.0:
        G = fit.a_inv_xt
    else:
        c = _factor(fit.X, fit.D, theta * fit.alpha)
        G = c.solve(fit.X.T)
    return _band(fit, G, method, tau, x_grid, t_dist)


def hodges_band(
    fit: FitResult, tau: float = 0.05, x_grid=None, original_variance: bool = False, t_dist: bool = False
):
    """Simple-shift band centred at ``(I + M) beta_1``."""
    M = shrinkage_matrix(fit)
    G = (np.eye(M.shape[0]) + M) @ fit.a_inv_xt
    method = Hodges(original_variance)
    coef = fit.beta_hat + M @ fit.beta_hat
    band = _band(fit, G, method, tau, x_grid, t_dist, coef)
    if not original_variance:
        return band
    ref = _band(fit, fit.a_inv_xt, method, tau, x_grid, t_dist)
    hw = ref.half_width
    return ConfidenceBand(
        band.grid, band.estimate, band.estimate - hw, band.estimate + hw, ref.sd,
        band.level, method, fit.alpha, band.coef,
    )


def iterate_bias_correction(beta_1: np.ndarray, M: np.ndarray, n_bc: int) -> np.ndarray:
    """Run ``beta <- beta_1 + M beta`` ``n_bc`` times starting from ``beta_1``.

    Works column-wise: with ``beta_1 = I`` it yields ``sum_{j<=n_bc} M^j``.
    """
    beta = beta_1
    for _ in range(n_bc):
        beta = beta_1 + M @ beta
    return beta


def iterative_band(fit: FitResult, n_bc: int, tau: float = 0.05, x_grid=None, t_dist: bool = False):
    """Band from ``n_bc`` plug-in bias-correction iterations starting at ``beta_1``."""
    method = IterativeBC(n_bc)
    M = shrinkage_matrix(fit)
    coef = iterate_bias_correction(fit.beta_hat, M, n_bc)
    L = iterate_bias_correction(np.eye(M.shape[0]), M, n_bc)
    return _band(fit, L @ fit.a_inv_xt, method, tau, x_grid, t_dist, coef)


def build_band(fit: FitResult, method: IntervalMethod, tau: float = 0.05, x_grid=None, t_dist=False):
    if isinstance(method, ThetaReduced):
        return theta_band(fit, method.theta, tau, x_grid, t_dist)
    if isinstance(method, Hodges):
        return hodges_band(fit, tau, x_grid, method.original_variance, t_dist)
    if isinstance(method, IterativeBC):
        return iterative_band(fit, method.n_bc, tau, x_grid, t_dist)
    raise TypeError(f"not an interval method: {method!r}")


def band_coverage_indicator(band: ConfidenceBand, truth) -> np.ndarray:
    """``lower <= f(x) <= upper`` at every grid point."""
    f = np.asarray(truth, dtype=float).reshape(-1)
    if f.shape != band.grid.shape:
        raise ValueError(f"truth has {f.size} values but the band grid has {band.grid.size}")
    return (band.lower <= f) & (f <= band.upper)
