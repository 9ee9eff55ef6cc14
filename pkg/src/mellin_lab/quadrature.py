"""Log-axis discretisation and the quadrature rules everything else is built on.

All integrals over R+ are taken after the substitution u = log r, so the
workhorse here is a trapezoidal rule on a uniform u-grid, refined first by
doubling the range and then by halving the step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergent

__all__ = [
    "LogGrid",
    "QuadratureConfig",
    "LineIntegral",
    "trapezoid_adaptive",
    "trapezoid_weights",
    "fourier_sum",
    "gauss_legendre_panels",
    "integrate_interval",
    "integrate_halfline",
]


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid on the log axis; nodes are exp(u_min + j*h)."""

    u_min: float = -10.0
    u_max: float = 10.0
    h: float = 0.25

    def __post_init__(self):
        if not (self.h > 0):
            raise ValueError(f"step h must be positive, got {self.h}")
        if not (self.u_min < self.u_max):
            raise ValueError("u_min must be smaller than u_max")
        if self.size < 2:
            raise ValueError("grid needs at least two nodes")

    @classmethod
    def from_range(cls, x_min: float, x_max: float, n: int) -> "LogGrid":
        """Grid with n nodes spanning [x_min, x_max] on R+."""
        lo, hi = math.log(x_min), math.log(x_max)
        return cls(lo, hi, (hi - lo) / (n - 1))

    @property
    def size(self) -> int:
        # tiny slack so that u_max is kept when (u_max-u_min)/h is integral
        return int(math.floor((self.u_max - self.u_min) / self.h + 1e-9)) + 1

    @property
    def u(self) -> np.ndarray:
        return self.u_min + self.h * np.arange(self.size)

    @property
    def x(self) -> np.ndarray:
        return np.exp(self.u)

    def describe(self) -> dict:
        return {"u_min": self.u_min, "u_max": self.u_max, "h": self.h, "nodes": self.size}


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    max_halvings: int = 12
    max_expansions: int = 8

    def __post_init__(self):
        if not (self.abs_tol > 0):
            raise ValueError("abs_tol must be positive")
        if self.max_halvings < 0 or self.max_expansions < 0:
            raise ValueError("refinement budgets must be nonnegative")

    def describe(self) -> dict:
        return {
            "abs_tol": self.abs_tol,
            "max_halvings": self.max_halvings,
            "max_expansions": self.max_expansions,
        }


@dataclass
class LineIntegral:
    """Value of an adaptive log-axis integral plus where refinement stopped."""

    value: object
    u_min: float
    u_max: float
    h: float
    last_change: float

    def describe(self) -> dict:
        return {"u_min": self.u_min, "u_max": self.u_max, "h": self.h,
                "last_change": self.last_change}


def trapezoid_weights(n: int, h: float) -> np.ndarray:
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


def _checked(vals, where):
    vals = np.asarray(vals)
    if not np.all(np.isfinite(vals)):
        raise NonConvergent(f"integrand produced non-finite values ({where})")
    return vals


def _trap(F, lo, n, h):
    u = lo + h * np.arange(n)
    vals = _checked(F(u), f"u in [{u[0]:.6g}, {u[-1]:.6g}]")
    total = vals.sum(axis=0) - 0.5 * (vals[0] + vals[-1])
    return h * total


def _change(a, b) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def trapezoid_adaptive(F, grid: LogGrid, cfg: QuadratureConfig) -> LineIntegral:
    """Integrate F over the whole u-axis.

    F maps a 1-d array of u to an array whose first axis runs over u; extra
    axes are integrated component-wise and the stopping test uses the largest
    component change. The range is doubled until successive estimates differ
    by less than abs_tol, then the step is halved under the same test.
    """
    lo, h, n = grid.u_min, grid.h, grid.size
    est = _trap(F, lo, n, h)
    change = math.inf
    for _ in range(cfg.max_expansions):
        add = n // 2
        lo, n = lo - add * h, n + 2 * add
        new = _trap(F, lo, n, h)
        change = _change(new, est)
        est = new
        if change < cfg.abs_tol:
            break
    else:
        if cfg.max_expansions > 0:
            raise NonConvergent(
                f"range expansion did not settle below {cfg.abs_tol:g} "
                f"(last change {change:.3g}, u in [{lo:.6g}, {lo + (n - 1) * h:.6g}])"
            )
    hi = lo + (n - 1) * h
    for _ in range(cfg.max_halvings):
        mid = lo + h * (np.arange(n - 1) + 0.5)
        vals = _checked(F(mid), "midpoints")
        new = 0.5 * est + 0.5 * h * vals.sum(axis=0)
        h, n = 0.5 * h, 2 * n - 1
        change = _change(new, est)
        est = new
        if change < cfg.abs_tol:
            break
    else:
        if cfg.max_halvings > 0:
            raise NonConvergent(
                f"step halving did not settle below {cfg.abs_tol:g} "
                f"(last change {change:.3g}, h={h:.3g})"
            )
    return LineIntegral(est, lo, hi, h, change)


def fourier_sum(values, u0: float, h: float, t, block: int = 256) -> np.ndarray:
    """Return sum_j values[j] * exp(i t_m (u0 + j h)) for every t_m.

    values are already multiplied by their quadrature weights. The u-axis is
    cut into blocks so the bulk of the work is one dense matrix product
    instead of n_u * n_t complex exponentials.
    """
    values = np.asarray(values, dtype=complex)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    n = values.size
    nb = -(-n // block)
    padded = np.zeros(nb * block, dtype=complex)
    padded[:n] = values
    blocks = padded.reshape(nb, block).T
    local = h * np.arange(block)
    starts = u0 + h * block * np.arange(nb)
    out = np.empty(t.size, dtype=complex)
    # chunk over t to bound memory for long u-axes
    step = max(1, int(4_000_000 // max(nb, block)))
    for s in range(0, t.size, step):
        tt = t[s:s + step]
        inner = np.exp(1j * np.outer(tt, local)) @ blocks
        out[s:s + step] = np.sum(inner * np.exp(1j * np.outer(tt, starts)), axis=1)
    return out


_GL5_X, _GL5_W = np.polynomial.legendre.leggauss(5)


def gauss_legendre_panels(edges) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the 5-point Gauss-Legendre rule on each panel."""
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    nodes = (mid[:, None] + half[:, None] * _GL5_X[None, :]).ravel()
    weights = (half[:, None] * _GL5_W[None, :]).ravel()
    return nodes, weights


def integrate_interval(F, a: float, b: float, cfg: QuadratureConfig,
                       panels: int = 8):
    """Composite Gauss-Legendre on [a, b], doubling panels until settled."""
    if b <= a:
        return 0.0
    x, w = gauss_legendre_panels(np.linspace(a, b, panels + 1))
    est = np.tensordot(w, _checked(F(x), "interval"), axes=(0, 0))
    for _ in range(cfg.max_halvings):
        panels *= 2
        x, w = gauss_legendre_panels(np.linspace(a, b, panels + 1))
        new = np.tensordot(w, _checked(F(x), "interval"), axes=(0, 0))
        change = _change(new, est)
        est = new
        if change < cfg.abs_tol:
            return est
    raise NonConvergent(f"panel doubling on [{a:g}, {b:g}] did not settle")


def integrate_halfline(F, a: float, cfg: QuadratureConfig, width: float = 8.0):
    """Integral of F over [a, inf): Gauss-Legendre on [a, a + width], then the
    rest through t = b/s, s in (0, 1], which keeps algebraic tails finite.

    F must decay at least like t^{-2} for the mapped piece to be smooth.
    """
    b = a + width
    head = integrate_interval(F, a, b, cfg)

    def mapped(s):
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore", under="ignore"):
            return _checked(F(b / s), "halfline") * (b / s ** 2)

    try:
        tail = integrate_interval(mapped, 0.0, 1.0, cfg)
    except NonConvergent:
        raise NonConvergent(f"tail integral from {a:g} did not settle below {cfg.abs_tol:g}") from None
    return head + tail
