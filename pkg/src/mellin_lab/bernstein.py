"""Polar extension of Mellin-bandlimited signals, growth certificates and band tests."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import DEFAULT_CFG, PositiveAxisSignal
from .errors import NoDecay, UnboundedSpectrum
from .polar import PolarFunction, cr_residual
from .quadrature import LogGrid, QuadratureConfig, integrate_interval
from .transform import (MellinSpectrum, band_knots, default_t_grid, interpolant_exp_integral,
                        mellin_forward, settled_rule)

__all__ = [
    "ProbeLattice",
    "DEFAULT_LATTICE",
    "GrowthCertificate",
    "extend",
    "growth_certify",
    "Theorem3Report",
    "theorem3_check",
    "bandwidth_estimate",
    "spectrum_l1_constant",
    "PWReport",
    "pw_roundtrip",
    "pw_reverse",
]

EDGE_DECAY_REL = 1e-6
BAND_MARGIN = 0.1


@dataclass(frozen=True)
class ProbeLattice:
    """Points (exp(k*r_step), θ) for k in k_range and θ in thetas."""

    k_min: int = -12
    k_max: int = 12
    r_step: float = 0.5
    thetas: tuple = (-3.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 3.0)

    def points(self):
        rs = [math.exp(k * self.r_step) for k in range(self.k_min, self.k_max + 1)]
        return [(r, float(th)) for th in self.thetas for r in rs]

    def arrays(self):
        pts = self.points()
        return np.array([p[0] for p in pts]), np.array([p[1] for p in pts])

    def describe(self) -> dict:
        return {"r": f"exp({self.r_step:g}*k)", "k_min": self.k_min, "k_max": self.k_max,
                "thetas": [float(t) for t in self.thetas]}


DEFAULT_LATTICE = ProbeLattice()


@dataclass
class GrowthCertificate:
    T: float
    c: float
    C_f: float
    probe_max_violation: float
    probes: dict
    C_claimed: Optional[float] = None

    @property
    def holds(self) -> bool:
        return self.probe_max_violation <= 0

    def to_dict(self) -> dict:
        return {"T": self.T, "c": self.c, "C_f": self.C_f, "C_claimed": self.C_claimed,
                "probe_max_violation": self.probe_max_violation, "holds": self.holds,
                "probes": self.probes}


def extend(S: MellinSpectrum, c: Optional[float] = None,
           cfg: QuadratureConfig = DEFAULT_CFG, u_check=None) -> PolarFunction:
    """f(r, θ) = (1/2π) ∫_{-T}^{T} S(t) (r e^{iθ})^{-c-it} dt on the whole half-plane.

    A sampled S is its linear interpolant and is integrated exactly against
    the exponential, at any (r, θ). A closed-form S gets the Gauss rule
    mellin_inverse settles on, refined against the values at ``u_check``
    (default: the nodes of [-10, 10] step 1/4); far outside that window the
    fixed rule no longer resolves the oscillation. Either way f(., 0) and the
    inverse transform agree to roundoff.
    """
    if S.support_T is None:
        raise UnboundedSpectrum("extension needs a spectrum with support_T set")
    if c is not None and not math.isclose(c, S.c, rel_tol=0, abs_tol=1e-15):
        raise ValueError(f"spectrum has weight {S.c}, extension asked for {c}")
    c = S.c
    if S.sampled:
        knots, vals = band_knots(S)

        def log_form(u, theta):
            u, theta = np.broadcast_arrays(np.asarray(u, float), np.asarray(theta, float))
            z = theta - 1j * u
            return np.exp(-1j * c * theta) * interpolant_exp_integral(knots, vals, z) / (2 * math.pi)

        return _polar_from_log(log_form, c, S.support_T)

    if u_check is None:
        u_check = LogGrid(-10.0, 10.0, 0.25).u
    t, ws = settled_rule(S, u_check, cfg)
    ws = ws / (2 * math.pi)

    def log_form(u, theta):
        # exp(c u) f(e^u, θ) = e^{-icθ} (1/2π) Σ w S(t) e^{t(θ - iu)}
        u, theta = np.broadcast_arrays(np.asarray(u, float), np.asarray(theta, float))
        flat_u, flat_th = u.ravel(), theta.ravel()
        out = np.empty(flat_u.size, dtype=complex)
        chunk = max(1, 2_000_000 // max(t.size, 1))
        for s in range(0, flat_u.size, chunk):
            z = flat_th[s:s + chunk] - 1j * flat_u[s:s + chunk]
            out[s:s + chunk] = np.exp(np.outer(z, t)) @ ws
        out *= np.exp(-1j * c * flat_th)
        return out.reshape(u.shape)

    return _polar_from_log(log_form, c, S.support_T)


def _polar_from_log(log_form, c, T):
    def evaluate(r, theta):
        u = np.log(np.asarray(r, float))
        return np.exp(-c * u) * log_form(u, theta)

    return PolarFunction(evaluate=evaluate, strip_a=math.inf, c=c,
                         label=f"extend(T={T:g})", log_form=log_form)


def growth_certify(f: PolarFunction, c: float, T: float,
                   probes: ProbeLattice = DEFAULT_LATTICE,
                   C_claimed: Optional[float] = None, rtol: float = 1e-12) -> GrowthCertificate:
    """Largest |f(r,θ)| r^c e^{-T|θ|} over the lattice.

    With a claimed constant, the violation is the excess of the measured
    maximum over C_claimed*(1 + rtol); rtol absorbs summation rounding when
    the claim is met with equality (as at r=1, θ=0 for nonnegative spectra).
    Without a claim the violation is 0.
    """
    r, th = probes.arrays()
    vals = np.abs(f.weighted(np.log(r), th, c)) * np.exp(-T * np.abs(th))
    C_f = float(np.max(vals))
    viol = 0.0 if C_claimed is None else C_f - C_claimed * (1 + rtol)
    return GrowthCertificate(T=float(T), c=float(c), C_f=C_f, probe_max_violation=float(viol),
                             probes=probes.describe(), C_claimed=C_claimed)


def spectrum_l1_constant(S: MellinSpectrum, cfg: QuadratureConfig = DEFAULT_CFG) -> float:
    """(1/2π) ∫_{-T}^{T} |S(t)| dt with the same rule the extension uses."""
    if S.support_T is None:
        raise UnboundedSpectrum("the growth constant needs support_T")
    _, ws = settled_rule(S, LogGrid(-10.0, 10.0, 0.25).u, cfg)
    return float(np.sum(np.abs(ws)) / (2 * math.pi))


@dataclass
class Theorem3Report:
    c: float
    p: float
    T: float
    window: dict
    ratios: dict
    norm0: float
    edge_values: dict
    edge_threshold: float

    @property
    def max_ratio(self) -> float:
        return max(self.ratios.values())

    @property
    def edge_max(self) -> float:
        return max(self.edge_values.values())

    @property
    def decays(self) -> bool:
        return self.edge_max <= self.edge_threshold

    def to_dict(self) -> dict:
        return {"c": self.c, "p": self.p, "T": self.T, "window": self.window,
                "ratios": {f"{k:g}": v for k, v in sorted(self.ratios.items())},
                "max_ratio": self.max_ratio, "norm0": self.norm0,
                "edge_values": {f"{k:g}": v for k, v in sorted(self.edge_values.items())},
                "edge_threshold": self.edge_threshold, "decays": self.decays}


def _window_norm(f: PolarFunction, theta, c, p, window: LogGrid, cfg):
    F = lambda u: np.abs(f.weighted(u, np.full(np.shape(u), theta), c)) ** p
    panels = max(8, math.ceil(2 * (window.u_max - window.u_min)))
    return float(integrate_interval(F, window.u_min, window.u_max, cfg, panels)) ** (1.0 / p)


def theorem3_check(f: PolarFunction, c: float, p: float, T: float,
                   thetas: Sequence[float] = (-1.0, -0.5, 0.5, 1.0),
                   cfg: QuadratureConfig = DEFAULT_CFG,
                   window: LogGrid = LogGrid(-12.0, 12.0, 0.5)) -> Theorem3Report:
    """Ratios ‖f(·,θ)‖ / (e^{T|θ|} ‖f(·,0)‖) in X^p_c and edge values of r^c f.

    Norms are integrals over the fixed log window [u_min, u_max] by
    composite Gauss-Legendre: bandlimited extensions decay only like a power
    of 1/|log r|, so whole-axis integrals would not settle. The edge values
    at the window ends, relative to ‖f(·,0)‖, quantify what the window omits.
    """
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    norm0 = _window_norm(f, 0.0, c, p, window, cfg)
    ratios, edges = {}, {}
    edge_u = np.array([window.u_min, window.u_max])
    for th in sorted(set(float(x) for x in thetas) | {0.0}):
        n = norm0 if th == 0 else _window_norm(f, th, c, p, window, cfg)
        ratios[th] = 1.0 if th == 0 else (n / (math.exp(T * abs(th)) * norm0) if norm0 > 0 else 0.0)
        edge = float(np.max(np.abs(f.weighted(edge_u, np.full(2, th), c))))
        edges[th] = edge / norm0 if norm0 > 0 else edge
    return Theorem3Report(float(c), float(p), float(T),
                          {"u_min": window.u_min, "u_max": window.u_max, "rule": "gauss-legendre"},
                          ratios, norm0, edges, EDGE_DECAY_REL)


def bandwidth_estimate(S: MellinSpectrum, eta: float = 1e-4) -> float:
    """Smallest grid T̂ with |S(t)| < eta*max|S| at every node |t| > T̂."""
    if not S.sampled:
        raise ValueError("bandwidth_estimate needs a sampled spectrum")
    mag = np.abs(S.values)
    peak = float(np.max(mag)) if mag.size else 0.0
    if peak == 0:
        return 0.0
    t = S.t_grid
    above = np.abs(t[mag >= eta * peak])
    T_hat = float(np.max(above))
    if T_hat >= float(np.max(np.abs(t))) - 1e-12:
        raise NoDecay(
            f"|S| stays above {eta:g}*max up to the grid edge |t| = {T_hat:g}"
        )
    return T_hat


@dataclass
class PWReport:
    c: float
    T: float
    restriction_error: float
    restriction_tol: float
    cr_relative: float
    cr_tol: float
    certificate: GrowthCertificate
    C_l1: float
    T_hat: Optional[float]
    reverse_ok: bool
    reverse_note: str = ""
    meta: dict = field(default_factory=dict)

    @property
    def checks(self) -> dict:
        return {
            "restriction": self.restriction_error <= self.restriction_tol,
            "polar_analytic": self.cr_relative <= self.cr_tol,
            "growth": self.certificate.holds,
            "reverse_band": self.reverse_ok,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        return {"c": self.c, "T": self.T, "restriction_error": self.restriction_error,
                "restriction_tol": self.restriction_tol, "cr_relative": self.cr_relative,
                "cr_tol": self.cr_tol, "certificate": self.certificate.to_dict(),
                "C_l1": self.C_l1, "T_hat": self.T_hat, "reverse_ok": self.reverse_ok,
                "reverse_note": self.reverse_note, "checks": self.checks,
                "passed": self.passed, "meta": self.meta}


def _band_check(S, T, eta):
    try:
        T_hat = bandwidth_estimate(S, eta)
    except NoDecay as exc:
        return None, False, f"NoDecay: {exc}"
    if T_hat > T + BAND_MARGIN:
        return T_hat, False, f"NoDecay: |S| above threshold up to {T_hat:g} > T + {BAND_MARGIN:g}"
    return T_hat, True, ""


def _cr_relative(f, probes, step):
    r, th = probes.arrays()
    scale = float(np.max(np.abs(f(r, th))))
    res = cr_residual(f, probes.points(), step)
    return res / scale if scale > 0 else res


def pw_roundtrip(phi: PositiveAxisSignal, c: float, T: float,
                 cfg: QuadratureConfig = DEFAULT_CFG, *,
                 probes: ProbeLattice = DEFAULT_LATTICE, eta: float = 1e-4,
                 restriction_tol: float = 1e-5, cr_tol: float = 1e-6,
                 cr_step: float = 1e-5, n_check: int = 201) -> PWReport:
    """Transform, extend and test a signal claimed to be bandlimited to [-T, T].

    The reverse direction is judged on the transform of φ itself, which is
    the restriction of the extension wherever check (a) passes.
    """
    S = mellin_forward(phi, c, default_t_grid(T), cfg, sense="X2")
    x = np.exp(np.linspace(math.log(0.1), math.log(10.0), n_check))
    T_hat, reverse_ok, note = _band_check(S, T, eta)
    band = S.with_support(T)
    f = extend(band, c, cfg)
    ref = np.asarray(phi(x), dtype=complex)
    got = f(x, np.zeros_like(x))
    sup = float(np.max(np.abs(ref)))
    err = float(np.max(np.abs(got - ref)) / sup) if sup > 0 else float(np.max(np.abs(got)))
    C_l1 = spectrum_l1_constant(band, cfg)
    cert = growth_certify(f, c, T, probes, C_claimed=C_l1)
    meta = {k: v for k, v in S.meta.items() if k != "signal"}
    meta["signal"] = phi.label
    return PWReport(float(c), float(T), err, restriction_tol, _cr_relative(f, probes, cr_step),
                    cr_tol, cert, C_l1, T_hat, reverse_ok, note, meta)


def pw_reverse(f: PolarFunction, c: float, T: float, cfg: QuadratureConfig = DEFAULT_CFG,
               eta: float = 1e-4) -> tuple:
    """Band test of f(·, 0): (T̂ or None, passed, note)."""
    S = mellin_forward(f.restriction(c), c, default_t_grid(T), cfg, sense="X2")
    return _band_check(S, T, eta)
