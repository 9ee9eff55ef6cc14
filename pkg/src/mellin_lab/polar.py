"""Polar-analytic calculus on the half-plane {(r, θ): r > 0, θ real}.

A point (r, θ) stands for r e^{iθ} without identifying θ modulo 2π, so
functions such as log r + iθ are single valued here.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .core import PositiveAxisSignal
from .errors import DomainError
from .quadrature import gauss_legendre_panels

__all__ = [
    "PolarFunction",
    "PolarDerivative",
    "Segment",
    "Curve",
    "d_pol",
    "cr_residual",
    "cr_convergence",
    "polar_mellin_derivative",
    "line_integral",
    "curve_sup",
    "to_strip",
    "from_strip",
    "strip_cr_residual",
    "DEFAULT_STEP",
    "LADDER_STEPS",
]

DEFAULT_STEP = 1e-5
# step-halving ladder for observed-order tests; at 1e-5 the O(h^2) term is
# already under roundoff and the order cannot be seen
LADDER_STEPS = (1e-2, 5e-3, 2.5e-3)


@dataclass(frozen=True)
class PolarFunction:
    """f(r, θ) on the strip |θ| < strip_a (all θ when strip_a is inf).

    ``log_form(u, θ)``, if given, returns exp(c*u) * f(exp(u), θ) for the
    function's own c and is used wherever norms are taken along rays.
    """

    evaluate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    strip_a: float = math.inf
    c: Optional[float] = None
    label: str = ""
    log_form: Optional[Callable] = field(default=None, compare=False)

    def __post_init__(self):
        if not (self.strip_a > 0):
            raise ValueError("strip half-width must be positive")
        if self.log_form is not None and self.c is None:
            raise ValueError("log_form needs the weight c it refers to")

    def __call__(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        return np.asarray(self.evaluate(r, theta), dtype=complex)

    def weighted(self, u, theta, c: Optional[float] = None) -> np.ndarray:
        """exp(c*u) * f(exp(u), θ)."""
        u = np.asarray(u, dtype=float)
        c = self.c if c is None else c
        if c is None:
            raise ValueError("weight c not given and function carries none")
        if self.log_form is not None:
            base = np.asarray(self.log_form(u, theta), dtype=complex)
            return base if c == self.c else np.exp((c - self.c) * u) * base
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            return np.exp(c * u) * self(np.exp(u), theta)

    def ray(self, theta: float, c: Optional[float] = None) -> PositiveAxisSignal:
        """The signal r -> f(r, θ) with weight c."""
        c = self.c if c is None else c
        if c is None:
            raise ValueError("weight c not given and function carries none")
        if abs(theta) >= self.strip_a:
            raise DomainError(f"θ={theta} outside the strip |θ| < {self.strip_a}")
        th = float(theta)
        return PositiveAxisSignal(
            evaluate=lambda r: self(r, th),
            c=c,
            label=f"{self.label}(., {th:g})",
            log_form=lambda u: self.weighted(u, th, c),
        )

    def restriction(self, c: Optional[float] = None) -> PositiveAxisSignal:
        return self.ray(0.0, c)

    def scaled(self, lam) -> "PolarFunction":
        ev, lf = self.evaluate, self.log_form
        return PolarFunction(
            evaluate=lambda r, th: lam * ev(r, th),
            strip_a=self.strip_a,
            c=self.c,
            label=f"{lam}*{self.label}",
            log_form=None if lf is None else (lambda u, th: lam * lf(u, th)),
        )


@dataclass(frozen=True)
class PolarDerivative:
    """D_pol f at one point: the r-form value plus its cross-checks."""

    value: complex
    theta_form: complex
    diagonal: complex
    discrepancy: float
    threshold: float

    @property
    def analytic(self) -> bool:
        return self.discrepancy <= self.threshold

    def __complex__(self):
        return complex(self.value)


def _check_point(f: PolarFunction, r, theta, step_r, step_t):
    if not (r > step_r):
        raise DomainError(f"r={r:g} too close to 0 for step {step_r:g}")
    if abs(theta) + step_t >= f.strip_a:
        raise DomainError(
            f"θ={theta:g} within {step_t:g} of the strip edge {f.strip_a:g}"
        )


def _steps(r, step):
    return max(step * r, 1e-9), step


def _partials(f, r, theta, step_r, step_t):
    rr = np.array([r + step_r, r - step_r, r, r])
    tt = np.array([theta, theta, theta + step_t, theta - step_t])
    v = f(rr, tt)
    return (v[0] - v[1]) / (2 * step_r), (v[2] - v[3]) / (2 * step_t)


def d_pol(f: PolarFunction, r0: float, theta0: float, step: float = DEFAULT_STEP
          ) -> PolarDerivative:
    """Polar derivative e^{-iθ} ∂f/∂r by central differences.

    Two independent realisations are attached for comparison: the θ-form
    -i e^{-iθ} (∂f/∂θ)/r and the difference quotient along the diagonal
    approach (r ± h_r, θ ± h_θ) against r e^{iθ}. ``analytic`` is False when
    either differs from the r-form by more than 10 step² times the local
    scale.
    """
    sr, st = _steps(r0, step)
    _check_point(f, r0, theta0, sr, st)
    dr, dt = _partials(f, r0, theta0, sr, st)
    rot = np.exp(-1j * theta0)
    value = complex(rot * dr)
    theta_form = complex(-1j * rot * dt / r0)

    ends = f(np.array([r0 + sr, r0 - sr]), np.array([theta0 + st, theta0 - st]))
    w_plus = (r0 + sr) * np.exp(1j * (theta0 + st))
    w_minus = (r0 - sr) * np.exp(1j * (theta0 - st))
    diagonal = complex((ends[0] - ends[1]) / (w_plus - w_minus))

    f0 = complex(f(np.array([r0]), np.array([theta0]))[0])
    scale = max(abs(value), abs(theta_form), abs(f0) / r0, np.finfo(float).tiny)
    disc = max(abs(value - theta_form), abs(value - diagonal))
    return PolarDerivative(value, theta_form, diagonal, float(disc), 10 * step ** 2 * scale)


def cr_residual(f: PolarFunction, probes: Sequence, step: float = DEFAULT_STEP) -> float:
    """max over probes of |∂_θ u + r ∂_r v| + |∂_θ v − r ∂_r u|."""
    worst = 0.0
    for r, theta in probes:
        sr, st = _steps(r, step)
        _check_point(f, r, theta, sr, st)
        dr, dt = _partials(f, r, theta, sr, st)
        res = abs(dt.real + r * dr.imag) + abs(dt.imag - r * dr.real)
        worst = max(worst, float(res))
    return worst


def cr_convergence(f: PolarFunction, probes: Sequence, steps: Sequence[float] = LADDER_STEPS):
    """Residuals on a step ladder and the observed orders between rungs."""
    res = [cr_residual(f, probes, s) for s in steps]
    orders = []
    for (s0, e0), (s1, e1) in zip(zip(steps, res), zip(steps[1:], res[1:])):
        if e0 > 0 and e1 > 0:
            orders.append(math.log(e0 / e1) / math.log(s0 / s1))
        else:
            orders.append(math.inf)
    return res, orders


def polar_mellin_derivative(f: PolarFunction, c: float, r: float, theta: float,
                            step: float = DEFAULT_STEP) -> PolarDerivative:
    """Θ_c f = r e^{iθ} D_pol f + c f, carrying the D_pol cross-checks along."""
    d = d_pol(f, r, theta, step)
    z = r * np.exp(1j * theta)
    f0 = complex(f(np.array([r]), np.array([theta]))[0])
    lift = lambda w: complex(z * w + c * f0)
    return PolarDerivative(lift(d.value), lift(d.theta_form), lift(d.diagonal),
                           abs(z) * d.discrepancy, abs(z) * d.threshold)


# ---------------------------------------------------------------- curves

@dataclass(frozen=True)
class Segment:
    """s in [0, 1] -> (r(s), θ(s)) with its velocity (r'(s), θ'(s))."""

    path: Callable[[np.ndarray], tuple]
    velocity: Callable[[np.ndarray], tuple]
    kind: str = "param"
    spec: dict = field(default_factory=dict, compare=False)

    @property
    def start(self):
        r, t = self.path(np.array([0.0]))
        return float(r[0]), float(t[0])

    @property
    def end(self):
        r, t = self.path(np.array([1.0]))
        return float(r[0]), float(t[0])

    @classmethod
    def straight(cls, p0, p1, kind="param") -> "Segment":
        """Straight in the (r, θ) coordinates."""
        (r0, t0), (r1, t1) = map(lambda p: (float(p[0]), float(p[1])), (p0, p1))
        dr, dt = r1 - r0, t1 - t0
        return cls(
            path=lambda s: (r0 + dr * np.asarray(s), t0 + dt * np.asarray(s)),
            velocity=lambda s: (np.full(np.shape(s), dr), np.full(np.shape(s), dt)),
            kind=kind,
            spec={"kind": "param", "start": [r0, t0], "end": [r1, t1]},
        )

    @classmethod
    def hline(cls, theta, r0, r1) -> "Segment":
        seg = cls.straight((r0, theta), (r1, theta), kind="hline")
        return Segment(seg.path, seg.velocity, "hline",
                       {"kind": "hline", "theta": float(theta), "r0": float(r0), "r1": float(r1)})

    @classmethod
    def vline(cls, r, theta0, theta1) -> "Segment":
        seg = cls.straight((r, theta0), (r, theta1), kind="vline")
        return Segment(seg.path, seg.velocity, "vline",
                       {"kind": "vline", "r": float(r), "theta0": float(theta0),
                        "theta1": float(theta1)})

    @classmethod
    def from_dict(cls, d: dict) -> "Segment":
        kind = d.get("kind")
        try:
            if kind == "hline":
                return cls.hline(d["theta"], d["r0"], d["r1"])
            if kind == "vline":
                return cls.vline(d["r"], d["theta0"], d["theta1"])
            if kind == "param":
                return cls.straight(d["start"], d["end"])
        except KeyError as exc:
            raise ValueError(f"{kind} segment lacks field {exc.args[0]!r}") from None
        raise ValueError(f"unknown segment kind {kind!r}")


@dataclass(frozen=True)
class Curve:
    segments: tuple
    closed: bool = False

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValueError("curve needs at least one segment")
        for a, b in zip(segs, segs[1:]):
            if not np.allclose(a.end, b.start, rtol=0, atol=1e-12):
                raise ValueError(f"segments do not join: {a.end} vs {b.start}")
        if self.closed and not np.allclose(segs[-1].end, segs[0].start, rtol=0, atol=1e-12):
            raise ValueError("closed curve does not return to its start")
        s = np.linspace(0.0, 1.0, 33)
        for seg in segs:
            r, _ = seg.path(s)
            if np.any(np.asarray(r) <= 0):
                raise ValueError("curve leaves the half-plane r > 0")

    @classmethod
    def rectangle(cls, r0, r1, theta0, theta1) -> "Curve":
        """Positively oriented boundary of [r0, r1] x [theta0, theta1]."""
        return cls((
            Segment.hline(theta0, r0, r1),
            Segment.vline(r1, theta0, theta1),
            Segment.hline(theta1, r1, r0),
            Segment.vline(r0, theta1, theta0),
        ), closed=True)

    @classmethod
    def polyline(cls, points, closed=False) -> "Curve":
        pts = list(points)
        if closed:
            pts = pts + [pts[0]]
        return cls(tuple(Segment.straight(p, q) for p, q in zip(pts, pts[1:])), closed)

    @classmethod
    def from_json(cls, src) -> "Curve":
        """Build from a dict, a JSON string, or a path to a JSON file."""
        if isinstance(src, dict):
            obj = src
        else:
            text = str(src)
            if not text.lstrip().startswith("{"):
                with open(text) as fh:
                    text = fh.read()
            obj = json.loads(text)
        segs = tuple(Segment.from_dict(d) for d in obj["segments"])
        return cls(segs, bool(obj.get("closed", False)))

    def to_dict(self) -> dict:
        return {"segments": [s.spec for s in self.segments], "closed": self.closed}

    def _nodes(self, n_panels):
        s, w = gauss_legendre_panels(np.linspace(0.0, 1.0, n_panels + 1))
        for seg in self.segments:
            r, th = seg.path(s)
            dr, dth = seg.velocity(s)
            yield np.asarray(r, float), np.asarray(th, float), np.asarray(dr), np.asarray(dth), w

    def length(self, n_panels: int = 64) -> float:
        """Length of the image curve r e^{iθ} in the plane."""
        total = 0.0
        for r, th, dr, dth, w in self._nodes(n_panels):
            total += float(np.sum(w * np.abs(dr + 1j * r * dth)))
        return total


def line_integral(f: PolarFunction, curve: Curve, n_panels: int = 64) -> complex:
    """∫_γ f(r, θ) e^{iθ} (dr + i r dθ), 5-point Gauss on n_panels per segment."""
    total = 0j
    for r, th, dr, dth, w in curve._nodes(n_panels):
        integrand = f(r, th) * np.exp(1j * th) * (dr + 1j * r * dth)
        total += complex(np.sum(w * integrand))
    return total


def curve_sup(f: PolarFunction, curve: Curve, n_panels: int = 64) -> float:
    """max |f| over the quadrature nodes of the curve."""
    return max(float(np.max(np.abs(f(r, th)))) for r, th, *_ in curve._nodes(n_panels))


# ---------------------------------------------------- strip correspondence

def to_strip(f: PolarFunction, c: float) -> Callable:
    """g(x + iy) = exp(c (x + iy)) f(exp(x), y)."""
    def g(z):
        z = np.asarray(z, dtype=complex)
        x, y = z.real, z.imag
        return np.exp(1j * c * y) * f.weighted(x, y, c)
    return g


def from_strip(g: Callable, c: float, strip_a: float = math.inf, label: str = "") -> PolarFunction:
    """f(r, θ) = r^{-c} e^{-icθ} g(log r + iθ)."""
    def evaluate(r, theta):
        u = np.log(r)
        return np.exp(-c * u - 1j * c * theta) * g(u + 1j * theta)
    return PolarFunction(
        evaluate=evaluate,
        strip_a=strip_a,
        c=c,
        label=label or "from_strip",
        log_form=lambda u, theta: np.exp(-1j * c * np.asarray(theta)) * g(np.asarray(u) + 1j * np.asarray(theta)),
    )


def strip_cr_residual(g: Callable, points, step: float = DEFAULT_STEP) -> float:
    """max |∂g/∂y − i ∂g/∂x| over complex points (zero for holomorphic g)."""
    worst = 0.0
    for z in points:
        z = complex(z)
        v = np.asarray(g(np.array([z + step, z - step, z + 1j * step, z - 1j * step])))
        gx = (v[0] - v[1]) / (2 * step)
        gy = (v[2] - v[3]) / (2 * step)
        worst = max(worst, float(abs(gy - 1j * gx)))
    return worst
