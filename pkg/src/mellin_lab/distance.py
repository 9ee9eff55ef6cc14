"""Spectral tail distances to bandlimited spaces and the exponential bounds for Hardy members."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .core import DEFAULT_CFG
from .errors import NonConvergent, UnsupportedCombination
from .hardy import HardyNormEstimate, hardy_norm
from .polar import PolarFunction
from .quadrature import QuadratureConfig, gauss_legendre_panels, integrate_halfline, integrate_interval
from .transform import MellinSpectrum, mellin_forward

__all__ = [
    "DistanceReport",
    "dist_tail",
    "theorem6_bound",
    "theorem6_case",
    "distance_audit",
    "audit_t_grid",
    "SUP_SPAN",
]

# closed-form spectra without support: q = inf sup is taken on |v| in [σ, σ + SUP_SPAN]
SUP_SPAN = 64.0


@dataclass
class DistanceReport:
    q: float
    sigma: float
    c: float
    dist_value: float
    bound_value: Optional[float] = None
    bound_kind: Optional[str] = None
    p: Optional[float] = None
    a: Optional[float] = None
    note: str = ""

    @property
    def slack(self) -> Optional[float]:
        if self.bound_value is None:
            return None
        return self.bound_value - self.dist_value

    def to_dict(self) -> dict:
        return {"q": self.q, "sigma": self.sigma, "c": self.c, "p": self.p, "a": self.a,
                "dist_value": self.dist_value, "bound_value": self.bound_value,
                "bound_kind": self.bound_kind, "slack": self.slack, "note": self.note}


def _sampled_tail(psi: MellinSpectrum, sigma, q, cfg):
    t, v = psi.t_grid, psi.values
    mag = np.abs(v)
    peak = float(np.max(mag)) if mag.size else 0.0
    hi = float(np.max(np.abs(t)))
    T = psi.support_T
    if (T is None or T > hi) and peak > 0:
        edge = max(mag[0], mag[-1])
        if edge > 1e3 * cfg.abs_tol:
            raise NonConvergent(
                f"spectrum not resolved by its grid: |ψ| = {edge:.3g} at |v| = {hi:g}"
            )
    top = hi if T is None else min(T, hi)
    if top <= sigma:
        return 0.0
    if math.isinf(q):
        sel = (np.abs(t) >= sigma) & (np.abs(t) <= top)
        ends = np.abs(psi(np.array([-sigma, sigma])))
        return float(max(np.max(mag[sel], initial=0.0), np.max(ends)))
    total = 0.0
    for sgn in (1.0, -1.0):
        inner = np.sort(sgn * t[(sgn * t > sigma) & (sgn * t < top)])
        edges = np.concatenate([[sigma], inner, [top]])
        x, w = gauss_legendre_panels(edges)
        total += float(np.sum(w * np.abs(psi(sgn * x)) ** q))
    return total ** (1.0 / q)


def _closed_tail(psi: MellinSpectrum, sigma, q, cfg):
    T = psi.support_T
    if T is not None and T <= sigma:
        return 0.0
    if math.isinf(q):
        top = T if T is not None else sigma + SUP_SPAN
        v = np.linspace(sigma, top, int(math.ceil((top - sigma) / 0.01)) + 1)
        return float(max(np.max(np.abs(psi(v))), np.max(np.abs(psi(-v)))))
    total = 0.0
    for sgn in (1.0, -1.0):
        F = lambda x, s=sgn: np.abs(psi(s * x)) ** q
        if T is not None:
            total += float(integrate_interval(F, sigma, T, cfg, panels=max(8, math.ceil(4 * (T - sigma)))))
        else:
            total += float(integrate_halfline(F, sigma, cfg))
    return total ** (1.0 / q)


def dist_tail(psi: MellinSpectrum, sigma: float, q: float, cfg: QuadratureConfig = DEFAULT_CFG
              ) -> float:
    """(∫_{|v| ≥ σ} |ψ(v)|^q dv)^{1/q}, or sup_{|v| ≥ σ} |ψ| for q = inf.

    Sampled spectra are integrated as their linear interpolant, clipped at
    ±σ; the grid must have decayed at its ends. A q = inf sup needs ψ to be
    declared continuous.
    """
    if not (sigma > 0):
        raise ValueError("σ must be positive")
    if not (q >= 1):
        raise ValueError("q must lie in [1, inf]")
    if math.isinf(q) and not psi.continuous:
        raise ValueError("the q = inf distance needs a spectrum declared continuous")
    if psi.sampled:
        return _sampled_tail(psi, sigma, q, cfg)
    return _closed_tail(psi, sigma, q, cfg)


def theorem6_case(p: float, q: float) -> str:
    """Tag of the bound that covers (p, q); UnsupportedCombination otherwise."""
    if p == 1 and q >= 1:
        return "H1_general_q"
    if p == 2 and q == 2:
        return "H2_q2"
    if p == 2 and 1 <= q < 2:
        return "H2_q_lt_2"
    raise UnsupportedCombination(f"no bound for p={p}, q={q}")


def theorem6_bound(hardy: HardyNormEstimate, sigma: float, q: float,
                   p: Optional[float] = None) -> float:
    """Exponential bound on the distance to the bandlimited space of band σ.

    Covered: p = 1 with any q in [1, inf]; p = 2 with q = 2; p = 2 with
    1 <= q < 2. The strip half-width is hardy.a.
    """
    p = hardy.p if p is None else p
    kind = theorem6_case(p, q)
    a, norm = hardy.a, hardy.value
    decay = math.exp(-a * sigma)
    if kind == "H1_general_q":
        factor = 1.0 if math.isinf(q) else (2.0 / (a * q)) ** (1.0 / q)
        return 2.0 * norm * factor * decay
    if kind == "H2_q2":
        return 2.0 * math.sqrt(math.pi) * norm * decay
    factor = ((2.0 - q) / (q * a)) ** (1.0 / q - 0.5)
    return 2.0 * math.sqrt(math.pi) * factor * norm * decay


def _sup_note(psi, sigma, q) -> str:
    if not math.isinf(q):
        return ""
    if psi.sampled:
        return f"grid supremum over the sampled t values with |t| >= {sigma:g}"
    top = psi.support_T if psi.support_T is not None else sigma + SUP_SPAN
    return f"grid supremum, step 0.01 on {sigma:g} <= |t| <= {top:g}"


def audit_t_grid(half_width: float = 40.0, step: float = 0.01) -> np.ndarray:
    n = int(round(half_width / step))
    return step * np.arange(-n, n + 1)


def distance_audit(f: PolarFunction, a: float, c: float, p: float, sigma_list: Sequence[float],
                   q: float, cfg: QuadratureConfig = DEFAULT_CFG, *,
                   hardy: Optional[HardyNormEstimate] = None,
                   spectrum: Optional[MellinSpectrum] = None,
                   t_grid=None) -> list:
    """Distance of f(·,0) to bandlimited spaces against the exponential bound, per σ.

    ψ is the transform of f(·,0) (absolutely convergent for p = 1,
    symmetric truncations for p = 2) sampled on ``t_grid`` unless a
    ``spectrum`` known to be that transform is supplied.
    """
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    hardy = hardy or hardy_norm(f, a, c, p, cfg=cfg)
    if spectrum is None:
        t = audit_t_grid() if t_grid is None else np.asarray(t_grid, float)
        spectrum = mellin_forward(f.restriction(c), c, t, cfg, sense="X1" if p == 1 else "X2")
    out = []
    for sigma in sigma_list:
        bound, kind = theorem6_bound(hardy, sigma, q, p), theorem6_case(p, q)
        dist = dist_tail(spectrum, sigma, q, cfg)
        out.append(DistanceReport(float(q), float(sigma), float(c), dist, bound, kind,
                                  float(p), float(a), _sup_note(spectrum, sigma, q)))
    return out
