"""Penalized least squares, REML smoothing selection and noise variance."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg, optimize

from .basis import KnotVector, build_design, build_penalty

LOG10_ALPHA_BOUNDS = (-8.0, 8.0)
GRID_POINTS = 41


class SingularSystemError(np.linalg.LinAlgError):
    """``X'X + alpha D`` is not positive definite."""


class BoundaryWarning(UserWarning):
    """The REML optimum sits on the edge of the search range."""


@dataclass(frozen=True)
class Dataset:
    xs: np.ndarray
    ys: np.ndarray
    noise_sd: np.ndarray | None = None

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float).reshape(-1)
        ys = np.asarray(self.ys, dtype=float).reshape(-1)
        if xs.shape != ys.shape:
            raise ValueError(f"xs and ys differ in length ({xs.size} vs {ys.size})")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        if self.noise_sd is not None:
            object.__setattr__(self, "noise_sd", np.asarray(self.noise_sd, dtype=float).reshape(-1))

    @property
    def n(self) -> int:
        return self.xs.size


@dataclass(frozen=True)
class AlphaSelection:
    alpha: float
    criterion: float
    at_boundary: bool


@dataclass(frozen=True)
class FitResult:
    """A penalized spline fit at a single smoothing strength.

    ``a_inv_xt`` is ``(X'X + alpha D)^{-1} X'`` so that ``beta_hat = a_inv_xt @ y``.
    """

    alpha: float
    beta_hat: np.ndarray
    sigma2_hat: float
    a_inv_xt: np.ndarray
    edf: float
    knots: KnotVector
    xs: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    X: np.ndarray = field(repr=False)
    D: np.ndarray = field(repr=False)
    null_dim: int = 2
    at_boundary: bool = False

    @property
    def n(self) -> int:
        return self.y.size

    def predict(self, x) -> np.ndarray:
        return build_design(self.knots, x) @ self.beta_hat


def null_space_dim(D: np.ndarray, rtol: float = 1e-9) -> int:
    """Number of eigenvalues of ``D`` that are zero relative to the largest."""
    ev = np.linalg.eigvalsh(D)
    top = max(ev[-1], 0.0)
    if top == 0.0:
        return D.shape[0]
    return int(np.sum(ev <= rtol * top))


def _penalty_eig(D: np.ndarray):
    """Eigenpairs of ``D`` with the null-space eigenvalues set exactly to zero."""
    ev, U = np.linalg.eigh(D)
    m0 = null_space_dim(D)
    ev[:m0] = 0.0
    return ev, U


class _Factor:
    """Cholesky factor of ``X'X + alpha D``, formed in the eigenbasis of ``D``.

    Rounding in ``D`` along its null directions would otherwise be
    amplified by ``alpha`` and swamp ``X'X`` once ``alpha`` is large.
    """

    def __init__(self, X: np.ndarray, D: np.ndarray, alpha: float):
        self.ev, self.U = _penalty_eig(D)
        XU = X @ self.U
        A = XU.T @ XU + np.diag(alpha * self.ev)
        try:
            self.c = linalg.cho_factor(A, lower=True, check_finite=False)
        except linalg.LinAlgError:
            rank = np.linalg.matrix_rank(X)
            raise SingularSystemError(
                f"X'X + alpha*D is singular at alpha={alpha:g}: X has rank {rank} "
                f"for {X.shape[1]} coefficients"
                + (" and the penalty does not cover the deficient directions" if alpha > 0 else "")
            ) from None

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """``(X'X + alpha D)^{-1} rhs``."""
        return self.U @ linalg.cho_solve(self.c, self.U.T @ rhs, check_finite=False)

    def roughness(self, beta: np.ndarray) -> float:
        """``beta' D beta`` with the null directions contributing exactly zero."""
        return float(self.ev @ (self.U.T @ beta) ** 2)

    @property
    def logdet(self) -> float:
        return 2.0 * float(np.sum(np.log(np.diag(self.c[0]))))


def _factor(X: np.ndarray, D: np.ndarray, alpha: float) -> _Factor:
    return _Factor(X, D, alpha)


def solve_penalized(X: np.ndarray, D: np.ndarray, y: np.ndarray, alpha: float) -> np.ndarray:
    """Minimizer of ``||y - X b||^2 + alpha b' D b`` by Cholesky factorization."""
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return _factor(X, D, alpha).solve(X.T @ y)


def _penalized_rss(X, c: _Factor, y, alpha, beta):
    r = y - X @ beta
    return float(r @ r) + alpha * c.roughness(beta)


def _log_pdet(D: np.ndarray, m0: int) -> float:
    ev = np.linalg.eigvalsh(D)
    return float(np.sum(np.log(ev[m0:])))


def reml_criterion(X: np.ndarray, D: np.ndarray, y: np.ndarray, alpha: float) -> float:
    """Profiled restricted log-likelihood of the mixed-model form.

    ``-0.5 [(n - m0)(1 + log(2 pi RSS_pen / (n - m0))) + log|A| - log pdet(alpha D)]``,
    with ``m0 = dim ker D`` and ``RSS_pen = ||y - X b||^2 + alpha b' D b``.
    Terms not depending on ``alpha`` are dropped.
    """
    if not alpha > 0:
        raise ValueError(f"REML needs alpha > 0, got {alpha}")
    n, p = X.shape
    m0 = null_space_dim(D)
    c = _factor(X, D, alpha)
    beta = c.solve(X.T @ y)
    rss = _penalized_rss(X, c, y, alpha, beta)
    logdet_a = c.logdet
    logpdet = (p - m0) * np.log(alpha) + _log_pdet(D, m0)
    return _reml_from_parts(n, m0, rss, float(y @ y), logdet_a, logpdet)


def _reml_from_parts(n, m0, rss, yty, logdet_a, logpdet):
    dof = n - m0
    # exact fits (e.g. constant y) would send log(rss) to -inf
    rss = max(rss, 1e-300, 1e-20 * yty)
    return -0.5 * (dof * (1.0 + np.log(2.0 * np.pi * rss / dof)) + logdet_a - logpdet)


class RemlProfile:
    """REML criterion for one ``(X, D, y)`` evaluated cheaply over many ``alpha``.

    Uses the generalized eigenproblem ``D v = s X'X v`` with ``V' X'X V = I``
    so that ``|A| = |X'X| prod(1 + alpha s)`` and
    ``RSS_pen = RSS_0 + sum(b^2 alpha s / (1 + alpha s))`` with ``b = V' X' y``
    and ``RSS_0`` the unpenalized residual sum of squares.
    Falls back to a factorization per ``alpha`` when ``X'X`` is singular.
    """

    def __init__(self, X, D, y):
        self.X, self.D, self.y = X, D, np.asarray(y, dtype=float)
        self.n, self.p = X.shape
        self.m0 = null_space_dim(D)
        self.yty = float(self.y @ self.y)
        self._logpdet_d = _log_pdet(D, self.m0)
        XtX = X.T @ X
        try:
            s, V = linalg.eigh(D, XtX, check_finite=False)
        except linalg.LinAlgError:
            self._fast = False
            return
        self._fast = True
        s = np.clip(s, 0.0, None)
        s[: self.m0] = 0.0
        self._s = s
        b = V.T @ (X.T @ self.y)
        self._b2 = b**2
        r0 = self.y - X @ (V @ b)
        self._rss0 = float(r0 @ r0)
        self._logdet_xtx = float(np.linalg.slogdet(XtX)[1])

    def __call__(self, alpha: float) -> float:
        if not self._fast:
            return reml_criterion(self.X, self.D, self.y, alpha)
        q = 1.0 + alpha * self._s
        rss = self._rss0 + float(np.sum(self._b2 * (alpha * self._s) / q))
        logdet_a = self._logdet_xtx + float(np.sum(np.log(q)))
        logpdet = (self.p - self.m0) * np.log(alpha) + self._logpdet_d
        return _reml_from_parts(self.n, self.m0, rss, self.yty, logdet_a, logpdet)


def select_alpha(
    X,
    D,
    y,
    bounds: tuple[float, float] = LOG10_ALPHA_BOUNDS,
    grid_points: int = GRID_POINTS,
    xtol: float = 1e-6,
) -> AlphaSelection:
    """Maximize the REML criterion over ``alpha``.

    A log10-spaced grid locates the best bracket, then golden-section search
    refines ``log10(alpha)`` inside it. If the best grid point is an
    endpoint, that endpoint is returned with ``at_boundary=True`` and a
    :class:`BoundaryWarning` is issued.
    """
    prof = RemlProfile(X, D, y)
    if prof.p - prof.m0 == 0:
        warnings.warn("penalty has no penalized directions; alpha is irrelevant", BoundaryWarning)
        return AlphaSelection(10.0 ** bounds[0], float("nan"), True)
    g = np.linspace(bounds[0], bounds[1], grid_points)
    vals = np.array([prof(10.0**v) for v in g])
    j = int(np.argmax(vals))
    if j == 0 or j == grid_points - 1:
        warnings.warn(
            f"REML criterion is maximal at the search boundary alpha=1e{g[j]:g}",
            BoundaryWarning,
        )
        return AlphaSelection(float(10.0 ** g[j]), float(vals[j]), True)
    res = optimize.minimize_scalar(
        lambda v: -prof(10.0**v),
        bracket=(g[j - 1], g[j], g[j + 1]),
        method="golden",
        tol=xtol,
    )
    best, fbest = (res.x, -res.fun) if -res.fun >= vals[j] else (g[j], vals[j])
    return AlphaSelection(float(10.0**best), float(fbest), False)


def estimate_sigma2(X, D, y, alpha: float, divisor: str = "null") -> float:
    """Noise variance estimate at a given ``alpha``.

    ``divisor="null"`` (default) gives ``RSS_pen / (n - m0)``, the estimate
    that goes with the REML criterion. ``"edf"`` gives
    ``||y - X b||^2 / (n - tr H)`` and ``"params"`` gives
    ``||y - X b||^2 / (n - p)``.
    """
    n, p = X.shape
    c = _factor(X, D, alpha)
    beta = c.solve(X.T @ y)
    if divisor == "null":
        m0 = null_space_dim(D)
        if n <= m0:
            raise ValueError(f"n = {n} does not exceed the penalty null-space dimension {m0}")
        return _penalized_rss(X, c, y, alpha, beta) / (n - m0)
    r = y - X @ beta
    if divisor == "edf":
        edf = float(np.trace(c.solve(X.T @ X)))
        dof = n - edf
    elif divisor == "params":
        dof = n - p
    else:
        raise ValueError(f"unknown divisor {divisor!r}")
    if dof <= 0:
        raise ValueError(f"no residual degrees of freedom (n = {n})")
    return float(r @ r) / dof


def fit(
    dataset: Dataset,
    knots: KnotVector,
    alpha: float | str = "reml",
    sigma2_divisor: str = "null",
    **select_kw,
) -> FitResult:
    """Fit a penalized spline with a fixed ``alpha`` or one chosen by REML."""
    X = build_design(knots, dataset.xs)
    D = build_penalty(knots)
    y = dataset.ys
    m0 = null_space_dim(D)
    at_boundary = False
    if isinstance(alpha, str):
        if alpha.lower() != "reml":
            raise ValueError(f"unknown smoothing selection {alpha!r}")
        sel = select_alpha(X, D, y, **select_kw)
        a, at_boundary = sel.alpha, sel.at_boundary
    else:
        a = float(alpha)
        if a < 0:
            raise ValueError(f"alpha must be >= 0, got {a}")
    a_inv_xt = _factor(X, D, a).solve(X.T)
    beta = a_inv_xt @ y
    edf = float(np.trace(X @ a_inv_xt))
    if dataset.n <= m0 or (sigma2_divisor == "params" and dataset.n <= X.shape[1]):
        warnings.warn(f"exact interpolating fit (edf = {edf:g}, n = {dataset.n}); sigma^2 undefined")
        s2 = float("nan")
    else:
        s2 = estimate_sigma2(X, D, y, a, sigma2_divisor)
    if edf >= dataset.n - 1e-8 and not np.isnan(s2):
        warnings.warn(f"exact interpolating fit (edf = {edf:g}, n = {dataset.n})")
    return FitResult(a, beta, s2, a_inv_xt, edf, knots, dataset.xs, y, X, D, m0, at_boundary)
