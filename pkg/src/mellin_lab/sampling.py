"""Exponential sampling: reconstruction from samples on the nodes exp(k/T).

On the log axis u = log x the series is Whittaker–Shannon interpolation of
G(u) = x^c g(x) from the samples G(k/T), and everything here is evaluated in
that form so that large |log x| never overflows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .core import DEFAULT_CFG, PositiveAxisSignal
from .distance import dist_tail
from .errors import DomainError, MissingSample
from .polar import PolarFunction
from .quadrature import QuadratureConfig
from .transform import MellinSpectrum, mellin_forward

__all__ = [
    "lin_kernel",
    "sample_signal",
    "reconstruct",
    "reconstruct_weighted",
    "truncation_allowance",
    "remainder_bound",
    "SamplingReport",
    "sampling_report",
    "DecayReport",
    "remainder_measure",
    "default_probes",
    "TAYLOR_CUTOFF",
]

TAYLOR_CUTOFF = 1e-6
# the truncation allowance sums omitted terms out to this multiple of n
ALLOWANCE_SPAN = 16


def _sinc_log(v):
    """sin(πv)/(πv) with the series 1 − (πv)²/6 near v = 0."""
    v = np.asarray(v, dtype=float)
    small = np.abs(v) < TAYLOR_CUTOFF
    safe = np.where(small, 1.0, v)
    out = np.sin(math.pi * safe) / (math.pi * safe)
    return np.where(small, 1.0 - (math.pi * v) ** 2 / 6.0, out)


def lin_kernel(c: float, x):
    """x^{-c} sinc(log x), with value 1 at x = 1."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x > 0)):
        raise DomainError("lin kernel is defined for x > 0 only")
    lx = np.log(x)
    out = np.exp(-c * lx) * _sinc_log(lx)
    return out if out.ndim else float(out)


def sample_signal(g: PositiveAxisSignal, T: float, n: int, weighted: bool = False) -> dict:
    """{k: g(exp(k/T))} for |k| <= n; with weighted=True the values carry exp(c k/T)."""
    k = np.arange(-n, n + 1)
    u = k / T
    vals = g.weighted(u) if weighted else g(np.exp(u))
    return {int(kk): complex(v) for kk, v in zip(k, np.asarray(vals))}


def _gather(samples: Mapping, n: int) -> np.ndarray:
    vals = np.empty(2 * n + 1, dtype=complex)
    for i, k in enumerate(range(-n, n + 1)):
        try:
            vals[i] = samples[k]
        except KeyError:
            raise MissingSample(k) from None
    return vals


def _fsum_rows(terms: np.ndarray) -> np.ndarray:
    # compensated summation along the last axis, real and imaginary parts apart
    re = np.array([math.fsum(row) for row in terms.real.reshape(-1, terms.shape[-1])])
    im = np.array([math.fsum(row) for row in terms.imag.reshape(-1, terms.shape[-1])])
    return (re + 1j * im).reshape(terms.shape[:-1])


def reconstruct_weighted(weighted_samples: Mapping, T: float, u, n: int) -> np.ndarray:
    """Σ_{|k|<=n} G_k sinc(T u − k) where G_k = exp(c k/T) g(exp(k/T))."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    G = _gather(weighted_samples, n)
    k = np.arange(-n, n + 1)
    terms = G[None, :] * _sinc_log(T * u[:, None] - k[None, :])
    return _fsum_rows(terms)


def reconstruct(samples: Mapping, c: float, T: float, x, n: int):
    """Σ_{|k|<=n} g(e^{k/T}) lin_{c/T}(e^{-k} x^T) from raw samples g(e^{k/T})."""
    if not (T > 0):
        raise ValueError("T must be positive")
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr > 0)):
        raise DomainError("reconstruction points must be positive")
    u = np.log(np.atleast_1d(x_arr))
    raw = _gather(samples, n)
    k = np.arange(-n, n + 1)
    # lin_{c/T}(e^{-k} x^T) = exp(-(c/T)(T u − k)) sinc(T u − k)
    arg = T * u[:, None] - k[None, :]
    terms = raw[None, :] * np.exp(-(c / T) * arg) * _sinc_log(arg)
    out = _fsum_rows(terms)
    return out.reshape(x_arr.shape) if x_arr.ndim else complex(out[0])


def truncation_allowance(g: PositiveAxisSignal, c: float, T: float, u, n: int,
                         span: int = ALLOWANCE_SPAN) -> np.ndarray:
    """Σ_{n<|k|<=span·n} |G_k| |sinc(T u − k)|, the weighted size of the omitted terms."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    k = np.concatenate([np.arange(-span * n, -n), np.arange(n + 1, span * n + 1)])
    G = np.abs(np.asarray(g.weighted(k / T, c)))
    out = np.empty(u.size)
    for i, ui in enumerate(u):
        out[i] = math.fsum((G * np.abs(_sinc_log(T * ui - k))).tolist())
    return out


def remainder_bound(g_spectrum: MellinSpectrum, c: float, T: float, x,
                    cfg: QuadratureConfig = DEFAULT_CFG):
    """(x^{-c}/π) ∫_{|t| > πT} |S(t)| dt."""
    tail = dist_tail(g_spectrum, math.pi * T, 1, cfg)
    x = np.asarray(x, dtype=float)
    out = np.exp(-c * np.log(x)) * tail / math.pi
    return out if out.ndim else float(out)


def default_probes(u_min: float = -5.0, u_max: float = 5.0, step: float = 0.0137) -> np.ndarray:
    """Log-spaced probes whose step is incommensurate with the sample spacing."""
    return np.exp(np.arange(u_min, u_max + 1e-12, step))


@dataclass
class SamplingReport:
    T: float
    c: float
    n: int
    x_probes: list
    max_abs_error: float
    bound: float
    truncation: float
    slack: float
    decay_slope: Optional[float] = None

    def to_dict(self) -> dict:
        return {"T": self.T, "c": self.c, "n": self.n, "n_probes": len(self.x_probes),
                "x_min": min(self.x_probes), "x_max": max(self.x_probes),
                "max_abs_error": self.max_abs_error, "bound": self.bound,
                "truncation": self.truncation, "slack": self.slack,
                "decay_slope": self.decay_slope}


def _spectrum_of(g: PositiveAxisSignal, c, T, cfg, spectrum):
    if spectrum is not None:
        return spectrum
    if g.known_spectrum is not None:
        return g.known_spectrum
    half = max(8.0 * math.pi * T, 40.0)
    t = 0.01 * np.arange(-round(half / 0.01), round(half / 0.01) + 1)
    return mellin_forward(g, c, t, cfg, sense="X2")


def sampling_report(g: PositiveAxisSignal, c: float, T: float, n: int = 400,
                    x_probes=None, cfg: QuadratureConfig = DEFAULT_CFG,
                    spectrum: Optional[MellinSpectrum] = None) -> SamplingReport:
    """Reconstruction error of g at the probes against remainder bound + truncation allowance.

    Errors and allowances are absolute values on the unweighted scale. The
    slack is the smallest bound(x) + allowance(x) − error(x) over the probes.
    """
    x = default_probes(-3.0, 3.0) if x_probes is None else np.asarray(x_probes, dtype=float)
    u = np.log(x)
    G = sample_signal(g, T, n, weighted=True)
    approx = reconstruct_weighted(G, T, u, n)
    scale = np.exp(-c * u)
    err = np.abs(np.asarray(g.weighted(u, c)) - approx) * scale
    S = _spectrum_of(g, c, T, cfg, spectrum)
    bound = remainder_bound(S, c, T, x, cfg)
    trunc = truncation_allowance(g, c, T, u, n) * scale
    slack = float(np.min(bound + trunc - err))
    return SamplingReport(float(T), float(c), int(n), x.tolist(), float(np.max(err)),
                          float(np.max(bound)), float(np.max(trunc)), slack)


@dataclass
class DecayReport:
    a: float
    c: float
    n: int
    rows: list  # dicts: T, measure, dist_bound, truncation, slack
    decay_slope: float
    reference_slope: float
    meta: dict = field(default_factory=dict)

    @property
    def slope_rel_error(self) -> float:
        return abs(self.decay_slope - self.reference_slope) / abs(self.reference_slope)

    @property
    def min_slack(self) -> float:
        return min(r["slack"] for r in self.rows)

    def to_dict(self) -> dict:
        return {"a": self.a, "c": self.c, "n": self.n, "rows": self.rows,
                "decay_slope": self.decay_slope, "reference_slope": self.reference_slope,
                "slope_rel_error": self.slope_rel_error, "min_slack": self.min_slack,
                "meta": self.meta}


def remainder_measure(f, a: float, c: float, T_list: Sequence[float],
                      n: int = 400, x_probes=None, cfg: QuadratureConfig = DEFAULT_CFG,
                      spectrum: Optional[MellinSpectrum] = None) -> DecayReport:
    """sup_x x^c |g(x) − series(x)| per T for g = f(·,0), with its log-linear slope in T.

    Each measure is compared with (1/π) dist_1(g, band πT) plus the
    weighted truncation allowance, and the fitted slope with −aπ. ``f`` may
    also be a plain PositiveAxisSignal; the sums are then symmetric partial
    sums and nothing is claimed about convergence of the full series.
    """
    T_list = [float(T) for T in T_list]
    if len(T_list) < 3 or any(b <= a_ for a_, b in zip(T_list, T_list[1:])):
        raise ValueError("T_list must be increasing with at least three entries")
    g = f.restriction(c) if isinstance(f, PolarFunction) else f
    x = default_probes() if x_probes is None else np.asarray(x_probes, dtype=float)
    u = np.log(x)
    exact = np.asarray(g.weighted(u, c))
    S = _spectrum_of(g, c, max(T_list), cfg, spectrum)
    rows = []
    for T in T_list:
        G = sample_signal(g, T, n, weighted=True)
        measure_vals = np.abs(exact - reconstruct_weighted(G, T, u, n))
        measure = float(np.max(measure_vals))
        dist_b = dist_tail(S, math.pi * T, 1, cfg) / math.pi
        trunc = float(np.max(truncation_allowance(g, c, T, u, n)))
        rows.append({"T": T, "measure": measure, "dist_bound": dist_b,
                     "truncation": trunc, "slack": dist_b + trunc - measure})
    Ts = np.array(T_list)
    logs = np.log(np.array([max(r["measure"], np.finfo(float).tiny) for r in rows]))
    slope = float(np.polyfit(Ts, logs, 1)[0])
    return DecayReport(float(a), float(c), int(n), rows, slope, -a * math.pi,
                       {"n_probes": int(x.size), "u_range": [float(u[0]), float(u[-1])]})
