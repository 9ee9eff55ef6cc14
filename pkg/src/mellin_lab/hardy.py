"""Norms on Mellin–Hardy strips and the pointwise, sampling and spectral estimates they give."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import DEFAULT_CFG, xnorm
from .errors import MellinLabError, NormDivergent, RatioViolation
from .polar import PolarFunction
from .quadrature import LogGrid, QuadratureConfig
from .transform import X1_GRID, mellin_forward

__all__ = [
    "HardyNormEstimate",
    "hardy_norm",
    "theta_ladder",
    "PointwiseBoundReport",
    "pointwise_bound_check",
    "geometric_sequence",
    "nikolski_check",
    "BoundaryDecayReport",
    "boundary_decay_check",
    "SpectralDecayReport",
    "spectral_decay_relation",
]


def theta_ladder(a: float, count: int) -> np.ndarray:
    """θ_j = a (1 − 2^{-j}), j = 1..count, accumulating at the strip edge."""
    return a * (1.0 - 2.0 ** -np.arange(1, count + 1))


@dataclass
class HardyNormEstimate:
    a: float
    c: float
    p: float
    value: float
    theta_grid: list
    per_theta: list  # (θ, norm at +θ, norm at −θ, symmetrised average)
    grid: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"a": self.a, "c": self.c, "p": self.p, "value": self.value,
                "theta_grid": list(self.theta_grid),
                "per_theta": [list(row) for row in self.per_theta], "grid": self.grid}


def hardy_norm(f: PolarFunction, a: float, c: float, p: float = 2,
               theta_count: int = 8, cfg: QuadratureConfig = DEFAULT_CFG,
               grid: LogGrid = X1_GRID) -> HardyNormEstimate:
    """Largest symmetrised ray norm ((‖f(·,θ)‖^p + ‖f(·,−θ)‖^p)/2)^{1/p} on the θ ladder."""
    if p not in (1, 2):
        raise ValueError("Hardy norms are implemented for p in {1, 2}")
    if not (0 < a <= f.strip_a):
        raise ValueError(f"a={a} must lie in (0, strip_a={f.strip_a}]")
    thetas = theta_ladder(a, theta_count)
    rows = []
    for th in thetas:
        try:
            plus = xnorm(f.ray(float(th), c), c, p, grid, cfg)
            minus = xnorm(f.ray(float(-th), c), c, p, grid, cfg)
        except MellinLabError as exc:
            raise NormDivergent(f"ray norm at θ=±{th:g} failed: {exc}") from exc
        avg = (0.5 * (plus ** p + minus ** p)) ** (1.0 / p)
        rows.append((float(th), plus, minus, avg))
    value = max(r[3] for r in rows) if rows else 0.0
    return HardyNormEstimate(float(a), float(c), float(p), float(value),
                             [float(t) for t in thetas], rows, grid.describe())


@dataclass
class PointwiseBoundReport:
    max_ratio: float
    constant: float
    hardy_value: float
    argmax: tuple
    n_probes: int

    def to_dict(self) -> dict:
        return {"max_ratio": self.max_ratio, "constant": self.constant,
                "hardy_value": self.hardy_value, "argmax": list(self.argmax),
                "n_probes": self.n_probes}


def _default_probes(a1):
    rs = np.exp(0.5 * np.arange(-12, 13))
    ths = np.linspace(-a1, a1, 9)
    R, TH = np.meshgrid(rs, ths)
    return list(zip(R.ravel(), TH.ravel()))


def pointwise_bound_check(f: PolarFunction, a: float, a1: float, c: float, p: float = 2,
                          probes: Optional[Sequence] = None,
                          norm: Optional[HardyNormEstimate] = None,
                          cfg: QuadratureConfig = DEFAULT_CFG) -> PointwiseBoundReport:
    """max r^c |f(r,θ)| / ((4/(π(a − a1)))^{1/p} ‖f‖_H) over probes with |θ| ≤ a1."""
    if not (0 < a1 < a):
        raise ValueError("need 0 < a1 < a")
    probes = _default_probes(a1) if probes is None else list(probes)
    if any(abs(th) > a1 for _, th in probes):
        raise ValueError("probes must satisfy |θ| <= a1")
    norm = norm or hardy_norm(f, a, c, p, cfg=cfg)
    const = (4.0 / (math.pi * (a - a1))) ** (1.0 / p)
    r = np.array([q[0] for q in probes], float)
    th = np.array([q[1] for q in probes], float)
    lhs = np.abs(f.weighted(np.log(r), th, c))
    rhs = const * norm.value
    if rhs > 0:
        ratios = lhs / rhs
    else:
        ratios = np.where(lhs > 0, np.inf, 0.0)
    i = int(np.argmax(ratios))
    return PointwiseBoundReport(float(ratios[i]), const, norm.value,
                                (float(r[i]), float(th[i])), len(probes))


def geometric_sequence(delta: float, factor: float = 2.1, N: int = 50):
    """t_n = exp(factor·δ·n) for n = −N..N, returned with the offset −N."""
    n = np.arange(-N, N + 1)
    return np.exp(factor * delta * n), -N


def nikolski_check(f: PolarFunction, a: float, c: float, p: float, delta: float,
                   t_seq, index_offset: int = 0, norm: Optional[HardyNormEstimate] = None,
                   cfg: QuadratureConfig = DEFAULT_CFG, rtol: float = 1e-12):
    """(lhs, rhs) of the sampling inequality over the sequence t_seq.

    lhs = (Σ t_n^{cp} |f(t_n, 0)|^p)^{1/p}, rhs = (2/(πδ))^{1/p} ‖f‖_H. Each
    ratio t_{n+1}/t_n must exceed e^{2δ}(1 + rtol); the margin keeps a
    sequence built as exp(2δn) from passing on rounding noise.
    """
    if not (0 < delta < a):
        raise ValueError("need 0 < delta < a")
    t = np.asarray(t_seq, dtype=float)
    if np.any(t <= 0):
        raise ValueError("sample points must be positive")
    required = math.exp(2 * delta)
    for i in range(t.size - 1):
        ratio = t[i + 1] / t[i]
        if not ratio > required * (1 + rtol):
            raise RatioViolation(index_offset + i, float(ratio), required)
    vals = np.abs(f.weighted(np.log(t), np.zeros_like(t), c)) ** p
    lhs = math.fsum(vals.tolist()) ** (1.0 / p)
    norm = norm or hardy_norm(f, a, c, p, cfg=cfg)
    rhs = (2.0 / (math.pi * delta)) ** (1.0 / p) * norm.value
    return lhs, rhs


@dataclass
class BoundaryDecayReport:
    max_value: float
    values: list  # (r, θ, r^c |f|)
    scale: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.max_value <= self.threshold

    def to_dict(self) -> dict:
        return {"max_value": self.max_value, "values": [list(v) for v in self.values],
                "scale": self.scale, "threshold": self.threshold, "passed": self.passed}


def boundary_decay_check(f: PolarFunction, a: float, a1: float, c: float,
                         grid: LogGrid = LogGrid(-12.0, 12.0, 0.5), n_theta: int = 9,
                         rel_threshold: float = 1e-6) -> BoundaryDecayReport:
    """r^c |f(r,θ)| at the two grid ends for θ sampled in [−a1, a1].

    The threshold is rel_threshold times the largest r^c|f| over the whole
    grid and the same θ samples.
    """
    if not (0 < a1 < a):
        raise ValueError("need 0 < a1 < a")
    ths = np.linspace(-a1, a1, n_theta)
    U, TH = np.meshgrid(grid.u, ths)
    mag = np.abs(f.weighted(U, TH, c))
    scale = float(np.max(mag))
    rows = []
    for u in (grid.u[0], grid.u[-1]):
        v = np.abs(f.weighted(np.full(ths.shape, u), ths, c))
        rows.extend((float(math.exp(u)), float(th), float(x)) for th, x in zip(ths, v))
    worst = max(r[2] for r in rows)
    return BoundaryDecayReport(worst, rows, scale, rel_threshold * scale)


@dataclass
class SpectralDecayReport:
    alpha: float
    p: float
    deviation: float
    normaliser: float
    t_grid: list
    rows: list = field(default_factory=list)  # (t, |M0|, e^{-α|t|}|M_ε|)

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "p": self.p, "deviation": self.deviation,
                "normaliser": self.normaliser, "n_t": len(self.t_grid)}


def spectral_decay_relation(f: PolarFunction, a: float, c: float, p: float, alpha: float,
                            t_grid=None, cfg: QuadratureConfig = DEFAULT_CFG
                            ) -> SpectralDecayReport:
    """Largest | |M[f(·,0)](t)| − e^{−α|t|} |M[f(·,εα)](t)| |, ε = sign t (ε=+1 at t=0).

    The deviation is divided by max |M[f(·,0)]|. p=1 uses the absolutely
    convergent transform, p=2 the symmetric-truncation one.
    """
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    if not (0 < alpha < a):
        raise ValueError("need 0 < alpha < a")
    t = np.linspace(-10.0, 10.0, 201) if t_grid is None else np.asarray(t_grid, float)
    sense = "X1" if p == 1 else "X2"
    spec = lambda th: np.abs(mellin_forward(f.ray(th, c), c, t, cfg, sense=sense).values)
    m0, mp, mm = spec(0.0), spec(alpha), spec(-alpha)
    shifted = np.exp(-alpha * np.abs(t)) * np.where(t >= 0, mp, mm)
    peak = float(np.max(m0)) if m0.size else 0.0
    diff = np.abs(m0 - shifted)
    dev = float(np.max(diff) / peak) if peak > 0 else float(np.max(diff, initial=0.0))
    rows = list(zip(t.tolist(), m0.tolist(), shifted.tolist()))
    return SpectralDecayReport(float(alpha), float(p), dev, peak, t.tolist(), rows)
