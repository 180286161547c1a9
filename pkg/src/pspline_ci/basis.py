"""Clamped B-spline bases and the integrated squared second-derivative penalty."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class KnotVector:
    """Clamped knot sequence on ``[a, b]``.

    Parameters
    ----------
    interior : tuple of float
        Strictly increasing interior knots, all strictly inside ``(a, b)``.
    a, b : float
        Domain endpoints.
    order : int
        Spline order ``k`` (polynomial degree ``k - 1``; ``k = 4`` is cubic).
    """

    interior: tuple[float, ...]
    a: float
    b: float
    order: int = 4

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"invalid domain [{self.a}, {self.b}]")
        if self.order < 2:
            raise ValueError(f"spline order must be >= 2, got {self.order}")
        t = np.asarray(self.interior, dtype=float)
        if t.size and (np.any(np.diff(t) <= 0) or t[0] <= self.a or t[-1] >= self.b):
            raise ValueError("interior knots must be strictly increasing inside (a, b)")
        object.__setattr__(self, "interior", tuple(float(v) for v in t))

    @property
    def domain(self) -> tuple[float, float]:
        return (self.a, self.b)

    @property
    def full(self) -> np.ndarray:
        """Full knot sequence with each boundary knot repeated ``order`` times."""
        k = self.order
        return np.concatenate([np.full(k, self.a), self.interior, np.full(k, self.b)])

    @property
    def n_basis(self) -> int:
        return len(self.interior) + self.order


def make_knots(domain, n_interior: int, order: int = 4, include_boundary: bool = False) -> KnotVector:
    """Equally spaced clamped knots.

    With ``include_boundary=True`` the count is read as the total number of
    distinct knots including both endpoints, so ``n_interior - 2`` interior
    knots are placed.
    """
    a, b = (float(v) for v in domain)
    if not a < b:
        raise ValueError(f"invalid domain [{a}, {b}]")
    m = n_interior - 2 if include_boundary else n_interior
    if m < 1:
        raise ValueError(f"need at least one interior knot, got {m}")
    j = np.arange(1, m + 1)
    return KnotVector(tuple(a + j * (b - a) / (m + 1)), a, b, order)


def _check_inside(knots: KnotVector, x: np.ndarray) -> None:
    bad = np.flatnonzero(~((x >= knots.a) & (x <= knots.b)))
    if bad.size:
        i = int(bad[0])
        raise ValueError(
            f"x[{i}] = {x[i]!r} lies outside the basis domain [{knots.a}, {knots.b}]"
        )


def _cox_de_boor(t: np.ndarray, k: int, x: np.ndarray, right: float) -> list[np.ndarray]:
    """Tables of all B-splines of orders 1..k at ``x``; entry ``j`` has order ``j + 1``."""
    nt = len(t)
    # order 1: indicator of [t_i, t_{i+1}); at x == right use the last nonempty interval
    B = ((t[None, :-1] <= x[:, None]) & (x[:, None] < t[None, 1:])).astype(x.dtype)
    at_right = x == right
    if np.any(at_right):
        last = np.flatnonzero(t[:-1] < t[1:])[-1]
        B[at_right] = 0.0
        B[at_right, last] = 1.0
    tables = [B]
    for m in range(2, k + 1):
        nb = nt - m
        left_den = t[m - 1 : m - 1 + nb] - t[:nb]
        right_den = t[m : m + nb] - t[1 : 1 + nb]
        with np.errstate(divide="ignore", invalid="ignore"):
            wl = np.where(left_den > 0, (x[:, None] - t[None, :nb]) / left_den, 0.0)
            wr = np.where(right_den > 0, (t[None, m : m + nb] - x[:, None]) / right_den, 0.0)
        prev = tables[-1]
        B = wl * prev[:, :nb] + wr * prev[:, 1 : nb + 1]
        tables.append(B)
    return tables


def _differentiate(t: np.ndarray, k: int, tables: list[np.ndarray], deriv: int) -> np.ndarray:
    """Apply the derivative recurrence ``deriv`` times starting from order ``k - deriv``."""
    cur = tables[k - deriv - 1]
    for m in range(k - deriv + 1, k + 1):
        nb = len(t) - m
        d1 = t[m - 1 : m - 1 + nb] - t[:nb]
        d2 = t[m : m + nb] - t[1 : 1 + nb]
        c1 = np.divide(m - 1, d1, out=np.zeros_like(d1), where=d1 > 0)
        c2 = np.divide(m - 1, d2, out=np.zeros_like(d2), where=d2 > 0)
        cur = c1 * cur[:, :nb] - c2 * cur[:, 1 : nb + 1]
    return cur


def eval_basis(knots: KnotVector, x, deriv: int = 0) -> np.ndarray:
    """Evaluate all basis functions (or a derivative) at ``x``.

    Parameters
    ----------
    knots : KnotVector
    x : float or array_like
        Points inside ``[a, b]``. The right endpoint belongs to the last
        nonempty knot interval.
    deriv : int
        Derivative order, ``0 <= deriv < order``.

    Returns
    -------
    ndarray
        Shape ``(p,)`` for scalar ``x``, otherwise ``(len(x), p)``.
    """
    k = knots.order
    if not 0 <= deriv < k:
        raise ValueError(f"derivative order {deriv} not in [0, {k - 1}]")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    _check_inside(knots, xa)
    t = knots.full
    tables = _cox_de_boor(t, k, xa, knots.b)
    out = tables[-1] if deriv == 0 else _differentiate(t, k, tables, deriv)
    return out[0] if np.ndim(x) == 0 else out


def build_design(knots: KnotVector, xs) -> np.ndarray:
    """Design matrix whose ``i``-th row is ``B(x_i)``."""
    return eval_basis(knots, np.asarray(xs, dtype=float).reshape(-1), 0)


def _legendre(n: int, x):
    """``P_n(x)`` and ``P_n'(x)`` by the three-term recurrence (``n >= 1``)."""
    p0, p1 = np.ones_like(x), x
    for j in range(2, n + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    return p1, n * (p0 - x * p1) / (1 - x * x)


def _gauss_legendre(n: int):
    """Gauss-Legendre nodes and weights on ``[-1, 1]`` in extended precision."""
    x = np.polynomial.legendre.leggauss(n)[0].astype(np.longdouble)
    for _ in range(3):
        p, dp = _legendre(n, x)
        x = x - p / dp
    dp = _legendre(n, x)[1]
    return x, 2 / ((1 - x * x) * dp * dp)


def build_penalty(knots: KnotVector, n_gauss: int | None = None) -> np.ndarray:
    """Penalty ``D_ij = int_a^b B_i''(x) B_j''(x) dx``.

    Integrated by Gauss-Legendre quadrature on each knot interval. The
    integrand is a polynomial of degree ``2 (k - 3)`` there, so the default
    ``k - 2`` points per interval (2 for cubics) is exact. Orders below 3
    have piecewise-zero second derivatives and give the zero matrix.
    Evaluation and accumulation run in extended precision (where the
    platform has it) and are rounded to float64 once at the end.
    """
    k = knots.order
    p = knots.n_basis
    if k < 3:
        return np.zeros((p, p))
    if n_gauss is None:
        n_gauss = k - 2
    nodes, weights = _gauss_legendre(n_gauss)
    t = knots.full.astype(np.longdouble)
    brk = np.unique(t)
    lo, hi = brk[:-1], brk[1:]
    half = (hi - lo) / 2
    xq = ((hi + lo) / 2)[:, None] + half[:, None] * nodes[None, :]
    wq = half[:, None] * weights[None, :]
    xq = np.clip(xq.ravel(), t[0], t[-1])
    B2 = _differentiate(t, k, _cox_de_boor(t, k, xq, t[-1]), 2)
    D = B2.T @ (wq.ravel()[:, None] * B2)
    return ((D + D.T) / 2).astype(float)
