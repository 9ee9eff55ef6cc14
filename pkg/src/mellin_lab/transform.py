"""Forward and inverse Mellin transforms on the critical line c + it."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import DEFAULT_CFG, PositiveAxisSignal, xnorm
from .errors import NonConvergent, OscillationWarning
from .quadrature import (
    LogGrid,
    QuadratureConfig,
    fourier_sum,
    gauss_legendre_panels,
    trapezoid_adaptive,
    trapezoid_weights,
)

__all__ = [
    "MellinSpectrum",
    "default_t_grid",
    "mellin_forward",
    "mellin_inverse",
    "plancherel_ratio",
    "consistency_check",
    "spectrum_rule",
    "band_knots",
    "interpolant_exp_integral",
    "settled_rule",
    "X1_GRID",
    "X2_GRID",
]

# X1 starts small and grows; X2 starts wide because the symmetric truncations
# of non-integrable members (lin_c) only settle like 1/rho.
X1_GRID = LogGrid(-10.0, 10.0, 0.25)
X2_GRID = LogGrid(-640.0, 640.0, 0.25)
CESARO_K = 4
CESARO_DELTA = 1.0
SPREAD_THRESHOLD = 1e-6
NODES_PER_UNIT = 64


@dataclass
class MellinSpectrum:
    """t -> M_c[f](c + it), either as a closed form or sampled on a uniform grid.

    Between grid nodes the spectrum is linearly interpolated and it is taken
    to be zero outside the sampled range. ``support_T`` forces zero for
    |t| > T.
    """

    c: float
    evaluate: Optional[Callable[[np.ndarray], np.ndarray]] = None
    support_T: Optional[float] = None
    t_grid: Optional[np.ndarray] = None
    values: Optional[np.ndarray] = None
    continuous: bool = True
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.evaluate is None and self.t_grid is None:
            raise ValueError("spectrum needs an evaluator or sampled values")
        if self.t_grid is not None:
            self.t_grid = np.asarray(self.t_grid, dtype=float)
            self.values = np.asarray(self.values, dtype=complex)
            if self.values.shape != self.t_grid.shape:
                raise ValueError("t_grid and values differ in shape")
            if not np.all(np.isfinite(self.values)):
                raise ValueError("sampled spectrum contains non-finite values")
        if self.support_T is not None and self.support_T < 0:
            raise ValueError("support_T must be nonnegative")

    @property
    def sampled(self) -> bool:
        return self.evaluate is None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.evaluate is not None:
            v = np.asarray(self.evaluate(t), dtype=complex) * np.ones_like(t)
        else:
            v = (np.interp(t, self.t_grid, self.values.real, left=0.0, right=0.0)
                 + 1j * np.interp(t, self.t_grid, self.values.imag, left=0.0, right=0.0))
        if self.support_T is not None:
            v = np.where(np.abs(t) > self.support_T, 0.0, v)
        return v

    def map(self, fn) -> "MellinSpectrum":
        """New spectrum with values fn(t, S(t)); keeps representation and support."""
        if self.evaluate is not None:
            ev = self.evaluate
            return MellinSpectrum(self.c, lambda t: fn(t, ev(t)), self.support_T,
                                  continuous=self.continuous, meta=dict(self.meta))
        return MellinSpectrum(self.c, None, self.support_T, self.t_grid,
                              fn(self.t_grid, self.values), self.continuous, dict(self.meta))

    def sample(self, t_grid) -> "MellinSpectrum":
        t_grid = np.asarray(t_grid, dtype=float)
        return MellinSpectrum(self.c, None, self.support_T, t_grid, self(t_grid),
                              self.continuous, dict(self.meta))

    def with_support(self, T: Optional[float]) -> "MellinSpectrum":
        return MellinSpectrum(self.c, self.evaluate, T, self.t_grid, self.values,
                              self.continuous, dict(self.meta))


def default_t_grid(T_guess: float, step: float = 0.01, factor: float = 4.0) -> np.ndarray:
    """Symmetric grid on [-factor*T, factor*T] with ±T_guess landing on nodes."""
    if T_guess <= 0:
        raise ValueError("T_guess must be positive")
    dt = T_guess / math.ceil(T_guess / step)
    n = int(round(factor * T_guess / dt))
    return dt * np.arange(-n, n + 1)


def _fourier_trapezoid(weighted, lo, n, h, t):
    u = lo + h * np.arange(n)
    vals = np.asarray(weighted(u), dtype=complex)
    if not np.all(np.isfinite(vals)):
        raise NonConvergent(f"integrand not finite on u in [{u[0]:.6g}, {u[-1]:.6g}]")
    return fourier_sum(vals * trapezoid_weights(n, h), lo, h, t)


def _alias_free_step(h, t):
    # the trapezoid sum is 2π/h-periodic in t; keep the period above 2 max|t|
    tmax = float(np.max(np.abs(t))) if np.size(t) else 0.0
    return h if tmax == 0 else min(h, math.pi / tmax)


def _forward_x1(weighted, t, grid, cfg):
    h = _alias_free_step(grid.h, t)
    lo = grid.u_min
    n = int(math.floor((grid.u_max - grid.u_min) / h + 1e-9)) + 1
    est = _fourier_trapezoid(weighted, lo, n, h, t)
    change = math.inf
    for _ in range(cfg.max_expansions):
        add = n // 2
        lo, n = lo - add * h, n + 2 * add
        new = _fourier_trapezoid(weighted, lo, n, h, t)
        change = float(np.max(np.abs(new - est)))
        est = new
        if change < cfg.abs_tol:
            break
    else:
        if cfg.max_expansions:
            raise NonConvergent(
                f"X1 transform tail did not fall below {cfg.abs_tol:g} "
                f"(last change {change:.3g} at |u| <= {abs(lo):.6g})"
            )
    for _ in range(cfg.max_halvings):
        h, n = 0.5 * h, 2 * n - 1
        new = _fourier_trapezoid(weighted, lo, n, h, t)
        change = float(np.max(np.abs(new - est)))
        est = new
        if change < cfg.abs_tol:
            break
    else:
        if cfg.max_halvings:
            raise NonConvergent(f"X1 transform step halving stalled at h={h:g}")
    return est, {"u_min": lo, "u_max": lo + (n - 1) * h, "h": h, "last_change": change}


def _truncations(weighted, t, X, h, K, delta):
    """Symmetric truncations ∫_{-X_k}^{X_k} for X_k = X - (K-1-k)*delta, k = 0..K-1."""
    per = int(round(delta / h))
    inner_X = X - (K - 1) * delta
    m = int(round(inner_X / h))
    out = [_fourier_trapezoid(weighted, -m * h, 2 * m + 1, h, t)]
    for k in range(1, K):
        a = inner_X + (k - 1) * delta
        right = _fourier_trapezoid(weighted, a, per + 1, h, t)
        left = _fourier_trapezoid(weighted, -a - delta, per + 1, h, t)
        out.append(out[-1] + right + left)
    return np.array(out)


def _forward_x2(weighted, t, grid, cfg, K, delta, spread_threshold):
    per = max(1, math.ceil(delta / _alias_free_step(grid.h, t)))
    h = delta / per
    X = max(abs(grid.u_min), abs(grid.u_max), K * delta)
    X = delta * math.ceil(X / delta)
    trunc = _truncations(weighted, t, X, h, K, delta)
    est = trunc.mean(axis=0)
    converged = cfg.max_expansions == 0
    change = math.inf
    for _ in range(cfg.max_expansions):
        X *= 2
        trunc = _truncations(weighted, t, X, h, K, delta)
        new = trunc.mean(axis=0)
        change = float(np.max(np.abs(new - est)))
        est = new
        if change < cfg.abs_tol:
            converged = True
            break
    if converged:
        for _ in range(cfg.max_halvings):
            h *= 0.5
            trunc = _truncations(weighted, t, X, h, K, delta)
            new = trunc.mean(axis=0)
            change = float(np.max(np.abs(new - est)))
            est = new
            if change < cfg.abs_tol:
                break
    spread = float(np.max(np.abs(trunc - est)))
    meta = {"u_half_width": X, "h": h, "last_change": change, "cesaro_K": K,
            "cesaro_delta": delta, "cesaro_spread": spread, "range_converged": converged}
    if spread > spread_threshold or not converged:
        msg = (f"symmetric truncations not settled: Cesàro spread {spread:.3g}, "
               f"last change {change:.3g} at rho = exp({X:g})")
        meta["warning"] = msg
        warnings.warn(msg, OscillationWarning, stacklevel=3)
    return est, meta


def mellin_forward(f: PositiveAxisSignal, c: float, t_grid, cfg: QuadratureConfig = DEFAULT_CFG,
                   sense: str = "X1", grid: Optional[LogGrid] = None, *,
                   cesaro_K: int = CESARO_K, cesaro_delta: float = CESARO_DELTA,
                   spread_threshold: float = SPREAD_THRESHOLD) -> MellinSpectrum:
    """Sample t -> M_c[f](c + it) on ``t_grid``.

    sense="X1" integrates over the whole log axis to abs_tol and raises
    NonConvergent if the tail does not die out. sense="X2" forms the
    symmetric truncations over [1/rho, rho] for rho = exp(k*delta) and
    returns the mean of the last ``cesaro_K`` of them; an unsettled sequence
    is reported through ``meta["warning"]`` and an OscillationWarning.
    """
    t = np.asarray(t_grid, dtype=float)
    weighted = lambda u: f.weighted(u, c)
    sense = sense.upper()
    if sense == "X1":
        vals, meta = _forward_x1(weighted, t, grid or X1_GRID, cfg)
    elif sense == "X2":
        vals, meta = _forward_x2(weighted, t, grid or X2_GRID, cfg,
                                 cesaro_K, cesaro_delta, spread_threshold)
    else:
        raise ValueError(f"unknown transform sense {sense!r}")
    meta.update({"sense": sense, "signal": f.label})
    return MellinSpectrum(c=c, t_grid=t, values=vals, meta=meta)


def spectrum_rule(S: MellinSpectrum, refine: int = 1):
    """Quadrature nodes and S-weighted weights for ∫_{-T}^{T} S(t) g(t) dt.

    Sampled spectra get a 5-point Gauss rule on every grid cell, which
    integrates the linear interpolant times smooth g essentially exactly;
    the interpolant uses one-sided values at ±T.
    Closed-form spectra get NODES_PER_UNIT nodes per unit of t.
    """
    T = S.support_T
    if T is None:
        raise ValueError("spectrum_rule needs support_T")
    if T == 0:
        return np.zeros(0), np.zeros(0, dtype=complex)
    if S.sampled:
        knots, vals = _band_nodes(S, T)
        edges = knots
        if refine > 1:
            edges = np.concatenate(
                [np.linspace(a, b, refine + 1)[:-1] for a, b in zip(edges[:-1], edges[1:])]
                + [[T]]
            )
        t, w = gauss_legendre_panels(edges)
        s = np.interp(t, knots, vals.real) + 1j * np.interp(t, knots, vals.imag)
        return t, w * s
    panels = max(4, math.ceil(NODES_PER_UNIT * 2 * T / 5)) * refine
    t, w = gauss_legendre_panels(np.linspace(-T, T, panels + 1))
    return t, w * S(t)


def _open_band(tg, T):
    tol = 1e-9 * max(T, 1.0)
    return (tg > -T + tol) & (tg < T - tol)


def _band_nodes(S, T):
    """Knots of the open band plus one-sided values at ±T.

    A node sitting exactly on a jump of the band edge holds the midpoint of
    the jump; the edge values are therefore extrapolated linearly from the
    two nearest interior nodes.
    """
    inside = _open_band(S.t_grid, T)
    ti, vi = S.t_grid[inside], S.values[inside]
    if ti.size < 2:
        raise ValueError(f"t-grid has fewer than two nodes inside (-{T:g}, {T:g})")
    lo = vi[0] + (-T - ti[0]) * (vi[1] - vi[0]) / (ti[1] - ti[0])
    hi = vi[-1] + (T - ti[-1]) * (vi[-1] - vi[-2]) / (ti[-1] - ti[-2])
    return np.concatenate([[-T], ti, [T]]), np.concatenate([[lo], vi, [hi]])


def band_knots(S: MellinSpectrum):
    """Knots and values of the linear interpolant a sampled band-limited spectrum stands for."""
    if S.support_T is None or not S.sampled:
        raise ValueError("band_knots needs a sampled spectrum with support_T")
    return _band_nodes(S, S.support_T)


_SERIES_RADIUS = 0.5
_SERIES_TERMS = 16
_FACT = np.array([math.factorial(k + 2) for k in range(_SERIES_TERMS)], dtype=float)


def _cell_factors(w):
    """P(w) = (e^w − 1 − w)/w² and Q(w) = (w e^w − e^w + 1)/w², series near 0."""
    small = np.abs(w) < _SERIES_RADIUS
    ws = np.where(small, 1.0, w)
    em1 = np.expm1(ws)
    P = (em1 - ws) / ws ** 2
    Q = (ws * em1 + ws - em1) / ws ** 2
    if np.any(small):
        wk = w[small]
        Ps = np.zeros_like(wk)
        Qs = np.zeros_like(wk)
        for k in range(_SERIES_TERMS - 1, -1, -1):
            Ps = Ps * wk + 1.0 / _FACT[k]
            Qs = Qs * wk + (k + 1) / _FACT[k]
        P[small], Q[small] = Ps, Qs
    return P, Q


def interpolant_exp_integral(knots, vals, z) -> np.ndarray:
    """∫ s(t) e^{z t} dt over [knots[0], knots[-1]] for the piecewise-linear s through (knots, vals).

    Exact cell by cell for every complex z, so large |Im z| needs no extra
    nodes: the cell [a, b] contributes h e^{za} (s_a P(zh) + s_b Q(zh)).
    """
    knots = np.asarray(knots, dtype=float)
    vals = np.asarray(vals, dtype=complex)
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    a, h = knots[:-1], np.diff(knots)
    # P and Q depend on z h only: group the cells by width (a uniform grid has one or three)
    widths, group = np.unique(np.round(h / h.max(), 12), return_inverse=True)
    cells = []
    for g in range(widths.size):
        sel = group == g
        hg = float(np.mean(h[sel]))
        cells.append((hg, a[sel], hg * vals[:-1][sel], hg * vals[1:][sel]))
    flat = z.ravel()
    out = np.zeros(flat.size, dtype=complex)
    chunk = max(1, 2_000_000 // max(a.size, 1))
    for s0 in range(0, flat.size, chunk):
        zz = flat[s0:s0 + chunk]
        for hg, ag, sa, sb in cells:
            P, Q = _cell_factors(zz * hg)
            E = np.exp(np.outer(zz, ag))
            out[s0:s0 + chunk] += P * (E @ sa) + Q * (E @ sb)
    return out.reshape(z.shape)


def _inverse_values(S, u, cfg):
    """(1/2π) ∫ S(t) e^{-itu} dt for each u: exp(c u) times the inverse transform."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    if S.support_T is not None:
        if S.sampled:
            knots, vals = band_knots(S)
            return interpolant_exp_integral(knots, vals, -1j * u) / (2 * math.pi)
        t, ws = spectrum_rule(S)
        return _direct(t, ws, u)
    if S.sampled:
        tg, vals = S.t_grid, S.values
        edge = max(abs(vals[0]), abs(vals[-1]))
        if edge > 1e3 * cfg.abs_tol:
            raise NonConvergent(
                f"spectrum not resolved by its grid: |S| = {edge:.3g} at |t| = {abs(tg[-1]):g}"
            )
        dt = tg[1] - tg[0]
        w = trapezoid_weights(tg.size, dt) * vals
        return fourier_sum(w, tg[0], dt, -u) / (2 * math.pi)
    grid = LogGrid(-20.0, 20.0, 0.05)
    res = trapezoid_adaptive(lambda t: S(t)[:, None] * np.exp(-1j * np.outer(t, u)), grid, cfg)
    return res.value / (2 * math.pi)


def _direct(t, ws, u):
    return (np.exp(-1j * np.outer(u, t)) @ ws) / (2 * math.pi)


def settled_rule(S: MellinSpectrum, u, cfg: QuadratureConfig = DEFAULT_CFG):
    """spectrum_rule refined until (1/2π)∫ S e^{-itu} dt moves by < abs_tol at the given u.

    The change is measured on x^{-c} times the integral, i.e. on the signal
    values themselves.
    """
    u = np.asarray(u, dtype=float)
    weight = np.exp(-S.c * u)
    refine = 1
    t, ws = spectrum_rule(S, refine)
    est = _direct(t, ws, u)
    for _ in range(cfg.max_halvings):
        refine *= 2
        t2, ws2 = spectrum_rule(S, refine)
        new = _direct(t2, ws2, u)
        if np.max(np.abs(weight * (new - est))) < cfg.abs_tol:
            return t, ws
        t, ws, est = t2, ws2, new
    raise NonConvergent("inverse transform over [-T, T] did not settle")


def mellin_inverse(S: MellinSpectrum, x_grid: LogGrid, cfg: QuadratureConfig = DEFAULT_CFG
                   ) -> PositiveAxisSignal:
    """The signal x -> x^{-c}/(2π) ∫ S(c+it) x^{-it} dt.

    With support_T the integral runs over [-T, T] only. A sampled spectrum
    is integrated exactly as its linear interpolant; for a closed form the
    node count is doubled until the values on ``x_grid`` move by less than
    abs_tol and the returned signal evaluates with that settled rule.
    """
    c = S.c
    if S.support_T is not None and not S.sampled:
        t, ws = settled_rule(S, x_grid.u, cfg)
        log_form = lambda u: _direct(t, ws, np.atleast_1d(np.asarray(u, dtype=float)))
    else:
        _inverse_values(S, x_grid.u, cfg)
        log_form = lambda u: _inverse_values(S, u, cfg)

    def evaluate(x):
        x = np.asarray(x, dtype=float)
        u = np.log(np.atleast_1d(x))
        return (np.exp(-c * u) * log_form(u)).reshape(x.shape)

    spec = S if math.isfinite(c) else None
    return PositiveAxisSignal(evaluate=evaluate, c=c, known_spectrum=spec,
                              label="inverse", log_form=log_form)


def plancherel_ratio(f: PositiveAxisSignal, c: float, cfg: QuadratureConfig = DEFAULT_CFG,
                     t_grid=None, grid: Optional[LogGrid] = None) -> float:
    """‖f‖_{X²_c} divided by (2π)^{-1/2} ‖M²_c f‖_{L²}; ideally 1."""
    if t_grid is None:
        T = getattr(f.known_spectrum, "support_T", None) or 6.0
        g = default_t_grid(T, factor=2.0)
        # band edges sit on nodes of g; move them to cell midpoints, where
        # the trapezoid rule treats a jump of |S|^2 exactly
        t_grid = g[:-1] + 0.5 * (g[1] - g[0])
    lhs = xnorm(f, c, 2, grid or X1_GRID, cfg)
    S = mellin_forward(f, c, t_grid, cfg, sense="X2")
    t = S.t_grid
    energy = np.sum(trapezoid_weights(t.size, t[1] - t[0]) * np.abs(S.values) ** 2)
    rhs = math.sqrt(energy / (2 * math.pi))
    return lhs / rhs


def consistency_check(f: PositiveAxisSignal, c: float, t_grid,
                      cfg: QuadratureConfig = DEFAULT_CFG) -> float:
    """Largest |X1-sense − X2-sense| transform difference over ``t_grid``."""
    a = mellin_forward(f, c, t_grid, cfg, sense="X1")
    b = mellin_forward(f, c, t_grid, cfg, sense="X2")
    return float(np.max(np.abs(a.values - b.values)))
