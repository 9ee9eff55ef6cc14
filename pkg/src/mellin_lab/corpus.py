"""Named test signals with their closed-form spectra and declared memberships.

Each entry is a kind (exp, log-gauss, linc, ...) plus parameters. Entries can
be added from JSON descriptors in the directory named by MELLIN_LAB_CORPUS_DIR:

    {"id": "narrow-gauss", "kind": "log-gauss", "params": {"width": 0.5}}
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy.special import loggamma

from .core import PositiveAxisSignal
from .errors import ConfigError, DomainError, UnknownCorpus
from .polar import PolarFunction, from_strip
from .transform import MellinSpectrum, default_t_grid

__all__ = [
    "CorpusEntry",
    "KINDS",
    "get",
    "corpus_list",
    "corpus_ids",
    "hardy_corpus",
    "register",
    "load_descriptor",
    "CORPUS_ENV",
]

CORPUS_ENV = "MELLIN_LAB_CORPUS_DIR"


@dataclass(frozen=True)
class CorpusEntry:
    """A registered signal family member.

    ``c_range`` is an open interval of admissible weights. ``hardy_a`` is the
    strip half-width at which the entry is declared a Hardy member (None if
    it is not one); ``band`` is the Mellin band for bandlimited entries and
    ``spectral_rate`` the exact exponential decay rate of the spectrum when
    it is one.
    """

    id: str
    kind: str
    params: dict
    description: str
    c_range: tuple
    memberships: tuple
    closed_form_spectrum: bool
    polar_analytic: bool
    band: Optional[float] = None
    hardy_a: Optional[float] = None
    hardy_p: tuple = ()
    spectral_rate: Optional[float] = None
    source: str = "builtin"
    _build: Callable = field(default=None, compare=False, repr=False)

    def check_c(self, c: float) -> None:
        lo, hi = self.c_range
        if not (lo < c < hi):
            raise DomainError(f"{self.id}: c={c} outside the admissible range ({lo}, {hi})")

    def _parts(self, c):
        self.check_c(c)
        return self._build(c)

    def signal(self, c: float) -> PositiveAxisSignal:
        return self._parts(c)["signal"]

    def polar(self, c: float) -> PolarFunction:
        f = self._parts(c).get("polar")
        if f is None:
            raise DomainError(f"{self.id} has no polar-analytic extension")
        return f

    def spectrum(self, c: float) -> Optional[MellinSpectrum]:
        return self._parts(c)["signal"].known_spectrum

    def to_dict(self) -> dict:
        lo, hi = self.c_range
        return {
            "id": self.id,
            "kind": self.kind,
            "params": dict(sorted(self.params.items())),
            "description": self.description,
            "c_range": [_fmt_bound(lo), _fmt_bound(hi)],
            "memberships": list(self.memberships),
            "closed_form_spectrum": self.closed_form_spectrum,
            "polar_analytic": self.polar_analytic,
            "band": self.band,
            "hardy_a": self.hardy_a,
            "hardy_p": list(self.hardy_p),
            "spectral_rate": self.spectral_rate,
            "source": self.source,
        }


def _fmt_bound(v):
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


# ---------------------------------------------------------------- builders
# each returns {"signal": PositiveAxisSignal, "polar": PolarFunction | None}

def _from_log(c, G, label, spectrum=None, polar=None):
    sig = PositiveAxisSignal(
        evaluate=lambda x: np.exp(-c * np.log(x)) * G(np.log(x)),
        c=c, known_spectrum=spectrum, label=label, log_form=G,
    )
    return {"signal": sig, "polar": polar}


def _exp(c, scale=1.0):
    lam = float(scale)

    def spec(t):
        s = c + 1j * np.asarray(t, float)
        return np.exp(loggamma(s) - s * math.log(lam))

    def G(u):
        with np.errstate(over="ignore"):
            return np.exp(c * u - lam * np.exp(u))

    def ev(r, th):
        return np.exp(-lam * r * np.exp(1j * th))

    def lf(u, th):
        z = np.asarray(u) + 1j * np.asarray(th)
        with np.errstate(over="ignore"):
            return np.exp(c * np.asarray(u) - lam * np.exp(z))

    S = MellinSpectrum(c, spec, meta={"closed_form": "Gamma(c+it) * scale^-(c+it)"})
    polar = PolarFunction(ev, c=c, label="exp", log_form=lf)
    sig = PositiveAxisSignal(lambda x: np.exp(-lam * x), c, S, "exp", G)
    return {"signal": sig, "polar": polar}


def _power(c, t0=1.0):
    s = -c - 1j * float(t0)

    def ev(r, th):
        return np.exp(s * (np.log(r) + 1j * np.asarray(th)))

    polar = PolarFunction(ev, c=c, label="power",
                          log_form=lambda u, th: np.exp(c * np.asarray(u) + s * (np.asarray(u) + 1j * np.asarray(th))))
    sig = PositiveAxisSignal(lambda x: np.exp(s * np.log(x)), c, None, "power",
                             lambda u: np.exp(-1j * float(t0) * np.asarray(u)))
    return {"signal": sig, "polar": polar}


def _log_gauss(c, width=1.0):
    w = float(width)
    g = lambda z: np.exp(-(np.asarray(z) / w) ** 2)
    S = MellinSpectrum(c, lambda t: w * math.sqrt(math.pi) * np.exp(-(w * np.asarray(t)) ** 2 / 4),
                       meta={"closed_form": "width*sqrt(pi)*exp(-(width t)^2/4)"})
    return _from_log(c, lambda u: g(u).real, "log-gauss", S, from_strip(g, c, label="log-gauss"))


def _linc(c, T=math.pi):
    T = float(T)
    g = lambda z: np.sinc(T * np.asarray(z) / math.pi)
    S = MellinSpectrum(c, lambda t: np.where(np.abs(t) <= T, math.pi / T, 0.0), support_T=T,
                       continuous=False, meta={"closed_form": "(pi/T) indicator(|t| <= T)"})
    return _from_log(c, lambda u: g(u).real, "linc", S, from_strip(g, c, label="linc"))


def _sinc2(c, T=1.0):
    T = float(T)
    g = lambda z: np.sinc(T * np.asarray(z) / (2 * math.pi)) ** 2
    S = MellinSpectrum(c, lambda t: (2 * math.pi / T) * np.clip(1 - np.abs(t) / T, 0, None),
                       support_T=T, meta={"closed_form": "(2 pi/T)(1 - |t|/T)_+"})
    return _from_log(c, lambda u: g(u).real, "sinc2", S, from_strip(g, c, label="sinc2"))


def _lorentz(c, b=1.0):
    b = float(b)
    g = lambda z: (b / math.pi) / (np.asarray(z) ** 2 + b * b)
    S = MellinSpectrum(c, lambda t: np.exp(-b * np.abs(np.asarray(t, float))),
                       meta={"closed_form": "exp(-b |t|)"})
    return _from_log(c, lambda u: g(u).real, "lorentz", S,
                     from_strip(g, c, strip_a=b, label="lorentz"))


def _slow_tail(c):
    # ψ(t) = 1 / (1 + t²) is the transform of e^{-|u|}/2, which has a corner at u = 0
    S = MellinSpectrum(c, lambda t: 1.0 / (1.0 + np.asarray(t, float) ** 2),
                       meta={"closed_form": "1/(1+t^2)"})
    return _from_log(c, lambda u: 0.5 * np.exp(-np.abs(u)), "slow-tail", S, None)


_SHAPES = {
    # name: (spectrum, support factor or None, continuous)
    "box": (lambda t, T: np.where(np.abs(t) <= T, 1.0, 0.0), 1.0, False),
    "triangle": (lambda t, T: np.clip(1 - np.abs(t) / T, 0, None), 1.0, True),
    "gauss": (lambda t, T: np.exp(-(t / T) ** 2), None, True),
}


def _spectrum_defined(c, shape="triangle", T=1.0):
    """Signal given by its spectrum; values come from the inversion integral."""
    from .bernstein import extend

    if shape not in _SHAPES:
        raise ConfigError(f"unknown spectrum shape {shape!r}; expected one of {sorted(_SHAPES)}")
    fn, support, cont = _SHAPES[shape]
    T = float(T)
    S = MellinSpectrum(c, lambda t: fn(np.asarray(t, float), T),
                       support_T=None if support is None else support * T, continuous=cont,
                       meta={"closed_form": f"{shape}(T={T:g})"})
    # sampled so that the extension integrates the interpolant exactly at every u;
    # box and triangle are linear between the nodes, the gauss shape is cut at 8T
    if S.support_T is None:
        f = extend(S.sample(default_t_grid(8 * T, factor=1.0)).with_support(8 * T))
    else:
        f = extend(S.sample(default_t_grid(S.support_T, factor=1.0)))
    ray = f.restriction(c)
    sig = PositiveAxisSignal(ray.evaluate, c, S, "spectrum-defined", ray.log_form)
    return {"signal": sig, "polar": f}


KINDS = {
    "exp": _exp,
    "power": _power,
    "log-gauss": _log_gauss,
    "linc": _linc,
    "sinc2": _sinc2,
    "lorentz": _lorentz,
    "slow-tail": _slow_tail,
    "spectrum-defined": _spectrum_defined,
}

_INF = math.inf
_ANY_C = (-_INF, _INF)


def _kind_meta(kind: str, params: dict) -> dict:
    """Declared properties of a kind with the given parameters."""
    if kind == "exp":
        return dict(c_range=(0.0, _INF), memberships=("X_c", "X^2_c"), closed_form_spectrum=True,
                    polar_analytic=True)
    if kind == "power":
        return dict(c_range=_ANY_C, memberships=(), closed_form_spectrum=False, polar_analytic=True)
    if kind == "log-gauss":
        return dict(c_range=_ANY_C, memberships=("X_c", "X^2_c", "H^1_c", "H^2_c"),
                    closed_form_spectrum=True, polar_analytic=True,
                    hardy_a=params.get("a"), hardy_p=(1, 2) if params.get("a") else ())
    if kind == "linc":
        T = float(params.get("T", math.pi))
        return dict(c_range=_ANY_C, memberships=("X^2_c", f"B^2_c,{T:.6g}"),
                    closed_form_spectrum=True, polar_analytic=True, band=T)
    if kind == "sinc2":
        T = float(params.get("T", 1.0))
        return dict(c_range=_ANY_C, memberships=("X_c", "X^2_c", f"B^1_c,{T:.6g}", f"B^2_c,{T:.6g}"),
                    closed_form_spectrum=True, polar_analytic=True, band=T)
    if kind == "lorentz":
        return dict(c_range=_ANY_C, memberships=("X_c", "X^2_c", "H^1_c", "H^2_c"),
                    closed_form_spectrum=True, polar_analytic=True,
                    spectral_rate=float(params.get("b", 1.0)),
                    hardy_a=params.get("a"), hardy_p=(1, 2) if params.get("a") else ())
    if kind == "slow-tail":
        return dict(c_range=_ANY_C, memberships=("X_c", "X^2_c"), closed_form_spectrum=True,
                    polar_analytic=False)
    if kind == "spectrum-defined":
        shape = params.get("shape", "triangle")
        T = float(params.get("T", 1.0))
        band = T if shape in ("box", "triangle") else None
        mem = ("X^2_c",) + ((f"B^2_c,{T:.6g}",) if band else ())
        return dict(c_range=_ANY_C, memberships=mem, closed_form_spectrum=True,
                    polar_analytic=True, band=band)
    raise UnknownCorpus(f"unknown evaluator kind {kind!r}")


_BUILD_PARAMS = {
    "exp": {"scale"}, "power": {"t0"}, "log-gauss": {"width"}, "linc": {"T"},
    "sinc2": {"T"}, "lorentz": {"b"}, "slow-tail": set(), "spectrum-defined": {"shape", "T"},
}


def _make(id_, kind, params, description, source="builtin") -> CorpusEntry:
    if kind not in KINDS:
        raise UnknownCorpus(f"unknown evaluator kind {kind!r}")
    params = dict(params or {})
    allowed = _BUILD_PARAMS[kind] | {"a"}
    extra = set(params) - allowed
    if extra:
        raise ConfigError(f"{id_}: unknown parameters {sorted(extra)} for kind {kind}")
    build_params = {k: v for k, v in params.items() if k != "a"}
    meta = _kind_meta(kind, params)
    return CorpusEntry(id=id_, kind=kind, params=params, description=description,
                       source=source, _build=_builder(kind, build_params), **meta)


def _builder(kind, build_params):
    fn = KINDS[kind]
    return lambda c: fn(c, **build_params)


_BUILTIN = [
    ("exp", "exp", {}, "e^{-x}; spectrum Gamma(c+it), needs c > 0"),
    ("power", "power", {"t0": 1.0}, "(r e^{i theta})^{-c-i t0}; polar-analytic, not integrable"),
    ("log-gauss", "log-gauss", {}, "x^{-c} exp(-log^2 x); spectrum sqrt(pi) exp(-t^2/4)"),
    ("linc", "linc", {}, "x^{-c} sinc(log x); spectrum indicator of [-pi, pi]"),
    ("sinc2", "sinc2", {}, "x^{-c} sinc^2(log x / 2pi); triangle spectrum on [-1, 1]"),
    ("log-gauss-hardy", "log-gauss", {"a": 1.0},
     "x^{-c} exp(-(log r + i theta)^2) on the strip |theta| < 1"),
    ("lorentz-hardy", "lorentz", {"b": 1.0, "a": 0.9},
     "x^{-c} (1/pi)/(log^2 x + 1); spectrum exp(-|t|), poles at theta = ±1, declared on |theta| < 0.9"),
    ("slow-tail", "slow-tail", {}, "x^{-c} e^{-|log x|}/2; spectrum 1/(1+t^2), not polar-analytic"),
    ("spectrum-defined", "spectrum-defined", {"shape": "triangle", "T": 1.0},
     "signal defined by its spectrum through the inversion integral"),
]

_REGISTRY: dict = {}
_loaded_dir: Optional[str] = None


def register(entry: CorpusEntry) -> None:
    _REGISTRY[entry.id] = entry


for _id, _kind, _params, _desc in _BUILTIN:
    register(_make(_id, _kind, _params, _desc))
_BUILTIN_IDS = frozenset(_REGISTRY)


def load_descriptor(path) -> CorpusEntry:
    path = Path(path)
    try:
        d = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read corpus descriptor {path}: {exc}") from exc
    for key in ("id", "kind"):
        if key not in d:
            raise ConfigError(f"corpus descriptor {path} lacks {key!r}")
    return _make(str(d["id"]), str(d["kind"]), d.get("params", {}),
                 str(d.get("description", "")), source=str(path))


def _sync_user_dir() -> None:
    global _loaded_dir
    target = os.environ.get(CORPUS_ENV) or None
    if target == _loaded_dir:
        return
    # load everything first so that a bad descriptor leaves the registry untouched
    entries = []
    if target:
        for p in sorted(Path(target).glob("*.json")):
            entry = load_descriptor(p)
            if entry.id in _BUILTIN_IDS:
                raise ConfigError(f"descriptor {p} redefines builtin corpus id {entry.id!r}")
            entries.append(entry)
    for k in [k for k in _REGISTRY if k not in _BUILTIN_IDS]:
        del _REGISTRY[k]
    for entry in entries:
        register(entry)
    _loaded_dir = target


def get(corpus_id: str) -> CorpusEntry:
    _sync_user_dir()
    try:
        return _REGISTRY[corpus_id]
    except KeyError:
        raise UnknownCorpus(f"no corpus entry {corpus_id!r}; known: {', '.join(sorted(_REGISTRY))}") from None


def corpus_ids() -> list:
    _sync_user_dir()
    return sorted(_REGISTRY)


def corpus_list(filter: str = "") -> list:
    """Alphabetical list of entry metadata dicts whose id contains ``filter``."""
    return [get(k).to_dict() for k in corpus_ids() if filter in k]


def hardy_corpus() -> list:
    """Entries declared as Hardy members, alphabetically."""
    return [get(k) for k in corpus_ids() if get(k).hardy_a is not None]
