"""mellin-lab: run transforms and verification pipelines on corpus signals.

Configuration comes from an optional JSON file (``--config``) with keys
command, corpus_id, c, parameters, output_path and format; command-line
flags override it. Exit status: 0 success, 2 a verification failed (some
slack below −tol or a check false), 1 any operational error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import corpus as corpus_mod
from . import io as rio
from .bernstein import DEFAULT_LATTICE, extend, growth_certify, pw_roundtrip, spectrum_l1_constant
from .core import DEFAULT_CFG
from .distance import audit_t_grid, distance_audit
from .errors import ConfigError, MellinLabError
from .hardy import hardy_norm
from .polar import LADDER_STEPS, Curve, cr_convergence, curve_sup, line_integral
from .quadrature import LogGrid, QuadratureConfig
from .sampling import remainder_measure, sampling_report
from .transform import default_t_grid, mellin_forward, mellin_inverse

__all__ = ["RunConfig", "run", "main", "COMMANDS", "build_parser"]

_REQ = object()


def _floats(v):
    if isinstance(v, str):
        v = json.loads(v) if v.strip().startswith("[") else [x for x in v.split(",") if x.strip()]
    if isinstance(v, (int, float)):
        v = [v]
    return [float(x) for x in v]


def _steps(v):
    return tuple(_floats(v))


# command -> {parameter: (type, default)}; _REQ marks required keys and
# None means "taken from the corpus entry"
COMMANDS = {
    "transform": {"sense": (str, "X1"), "t_min": (float, -10.0), "t_max": (float, 10.0),
                  "t_step": (float, 0.01)},
    "invert": {"spectrum_csv": (str, None), "x_min": (float, 0.1), "x_max": (float, 10.0),
               "n_x": (int, 201)},
    "polar-check": {"steps": (_steps, LADDER_STEPS), "min_order": (float, 1.8),
                    "integral_tol": (float, 1e-8), "curve": (str, None), "n_panels": (int, 64),
                    "rect": (_floats, None)},
    "extend": {"T": (float, None), "r_min": (float, 0.1), "r_max": (float, 10.0), "n_r": (int, 41),
               "thetas": (_floats, [-1.0, -0.5, 0.0, 0.5, 1.0])},
    "pw-verify": {"T": (float, None), "eta": (float, 1e-4), "restriction_tol": (float, 1e-5)},
    "hardy": {"a": (float, None), "p": (float, 2.0), "theta_count": (int, 8)},
    "distance": {"a": (float, None), "p": (float, 2.0), "q": (float, 2.0),
                 "sigma_list": (_floats, [1.0, 2.0, 4.0]), "spectrum": (str, "computed"),
                 "t_half": (float, 40.0)},
    "sample": {"T": (float, _REQ), "n": (int, 400), "x_min": (float, 0.2), "x_max": (float, 5.0),
               "n_x": (int, 201), "spectrum": (str, "closed")},
    "decay": {"a": (float, None), "T_list": (_floats, [1.0, 1.5, 2.0, 2.5]), "n": (int, 400),
              "spectrum": (str, "closed")},
    "corpus": {"filter": (str, "")},
}

_DEFAULT_FORMAT = {"pw-verify": "json", "polar-check": "json", "corpus": "json"}
_CFG_KEYS = {"abs_tol": float, "max_halvings": int, "max_expansions": int}


@dataclass
class RunConfig:
    command: str
    corpus_id: Optional[str]
    c: Optional[float]
    parameters: dict = field(default_factory=dict)
    output_path: Optional[str] = None
    format: Optional[str] = None
    tol: float = 1e-8
    serial: bool = True

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.command != "corpus":
            if not self.corpus_id:
                raise ConfigError("corpus_id is required")
            if self.c is None:
                raise ConfigError("c is required")
            self.c = float(self.c)
        self.format = self.format or _DEFAULT_FORMAT.get(self.command, "csv")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, not {self.format!r}")
        spec = COMMANDS[self.command]
        params = {}
        unknown = set(self.parameters) - set(spec) - set(_CFG_KEYS)
        if unknown:
            raise ConfigError(f"unknown parameters for {self.command}: {sorted(unknown)}")
        for key, (typ, default) in spec.items():
            if key in self.parameters and self.parameters[key] is not None:
                try:
                    params[key] = typ(self.parameters[key])
                except (TypeError, ValueError) as exc:
                    raise ConfigError(f"parameter {key}: {exc}") from None
            elif default is _REQ:
                raise ConfigError(f"parameter {key!r} is required for {self.command}")
            else:
                params[key] = default
        for key, typ in _CFG_KEYS.items():
            if key in self.parameters and self.parameters[key] is not None:
                params[key] = typ(self.parameters[key])
        self.parameters = params
        return self

    def quadrature(self) -> QuadratureConfig:
        kw = {k: self.parameters[k] for k in _CFG_KEYS if k in self.parameters}
        return QuadratureConfig(**kw) if kw else DEFAULT_CFG

    def echo(self) -> dict:
        return {"command": self.command, "corpus_id": self.corpus_id, "c": self.c,
                "parameters": self.parameters, "format": self.format, "tol": self.tol,
                "mode": "serial"}


@dataclass
class Outcome:
    report: dict
    csv_text: str
    slacks: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def failed(self, tol: float) -> bool:
        bad_slack = any(v is None or v < -tol for v in self.slacks.values())
        return bad_slack or not all(self.checks.values())


# ---------------------------------------------------------------- commands

def _need(value, what):
    if value is None:
        raise ConfigError(f"{what} not given and not declared by the corpus entry")
    return value


def _cmd_transform(cfg: RunConfig, entry):
    P, q = cfg.parameters, cfg.quadrature()
    h = P["t_step"]
    t = h * np.arange(round(P["t_min"] / h), round(P["t_max"] / h) + 1)
    S = mellin_forward(entry.signal(cfg.c), cfg.c, t, q, sense=P["sense"])
    meta = {"corpus_id": entry.id, "sense": S.meta.get("sense")}
    vals = S.values
    report = {"t": S.t_grid, "re": vals.real, "im": vals.imag,
              "meta": {k: v for k, v in S.meta.items()}}
    return Outcome(report, rio.spectrum_csv(S, meta=meta))


def _cmd_invert(cfg: RunConfig, entry):
    P, q = cfg.parameters, cfg.quadrature()
    if P["spectrum_csv"]:
        S = rio.read_spectrum_csv(P["spectrum_csv"])
        if not math.isclose(S.c, cfg.c, abs_tol=1e-15):
            raise ConfigError(f"spectrum file has c={S.c}, run has c={cfg.c}")
        source = "file"
    else:
        S = entry.spectrum(cfg.c)
        if S is None:
            raise ConfigError(f"{entry.id} has no closed-form spectrum; pass spectrum_csv")
        source = "closed"
    grid = LogGrid.from_range(P["x_min"], P["x_max"], P["n_x"])
    g = mellin_inverse(S, grid, q)
    x = grid.x
    vals = np.asarray(g(x), dtype=complex)
    ref = np.asarray(entry.signal(cfg.c)(x), dtype=complex)
    peak = float(np.max(np.abs(ref)))
    err = float(np.max(np.abs(vals - ref)) / peak) if peak > 0 else float(np.max(np.abs(vals)))
    report = {"source": source, "x": x, "re": vals.real, "im": vals.imag,
              "sup_relative_error": err}
    text = rio.table_csv(["x", "re", "im"], zip(x.tolist(), vals.real.tolist(), vals.imag.tolist()),
                         {"corpus_id": entry.id, "c": cfg.c, "source": source,
                          "sup_relative_error": err})
    return Outcome(report, text)


def _cmd_polar(cfg: RunConfig, entry):
    P = cfg.parameters
    f = entry.polar(cfg.c)
    th_max = 0.5 if math.isinf(f.strip_a) else min(0.5, 0.5 * f.strip_a)
    probes = [(r, th) for r in (0.5, 1.0, 2.0) for th in (-th_max, 0.0, th_max)]
    residuals, orders = cr_convergence(f, probes, P["steps"])
    if P["curve"]:
        curve = Curve.from_json(P["curve"])
    else:
        r0, r1, t0, t1 = P["rect"] or (0.5, 2.0, -th_max, th_max)
        curve = Curve.rectangle(r0, r1, t0, t1)
    integral = complex(line_integral(f, curve, P["n_panels"]))
    scale = curve.length(P["n_panels"]) * curve_sup(f, curve, P["n_panels"])
    rel = abs(integral) / scale if scale > 0 else abs(integral)
    min_order = float(min(orders))
    report = {"residuals": list(residuals), "orders": list(orders), "steps": list(P["steps"]),
              "probes": [list(p) for p in probes], "curve": curve.to_dict(),
              "closed": curve.closed, "integral": integral, "integral_relative": rel}
    slacks = {"order_slack": min_order - P["min_order"]}
    if curve.closed:
        slacks["integral_slack"] = P["integral_tol"] - rel
    report["slacks"] = slacks
    rows = [(s, r, o) for s, r, o in zip(P["steps"], residuals, [float("nan")] + list(orders))]
    text = rio.table_csv(["step", "cr_residual", "observed_order"], rows,
                         {"corpus_id": entry.id, "integral_relative": rel, "slacks": slacks})
    return Outcome(report, text, slacks)


def _band_spectrum(entry, c, T, q):
    S = entry.spectrum(c)
    if S is None:
        S = mellin_forward(entry.signal(c), c, default_t_grid(T), q, sense="X2")
    return S.with_support(T)


def _cmd_extend(cfg: RunConfig, entry):
    P, q = cfg.parameters, cfg.quadrature()
    T = _need(P["T"] if P["T"] is not None else entry.band, "T")
    S = _band_spectrum(entry, cfg.c, T, q)
    f = extend(S, cfg.c, q)
    C = spectrum_l1_constant(S, q)
    cert = growth_certify(f, cfg.c, T, DEFAULT_LATTICE, C_claimed=C)
    r = np.exp(np.linspace(math.log(P["r_min"]), math.log(P["r_max"]), P["n_r"]))
    R, TH = np.meshgrid(r, np.asarray(P["thetas"]), indexing="ij")
    vals = np.asarray(f(R.ravel(), TH.ravel()))
    rows = zip(R.ravel().tolist(), TH.ravel().tolist(), vals.real.tolist(), vals.imag.tolist())
    report = {"T": T, "certificate": cert.to_dict(), "C_l1": C}
    slacks = {"growth_slack": -cert.probe_max_violation}
    text = rio.table_csv(["r", "theta", "re", "im"], rows,
                         {"corpus_id": entry.id, "c": cfg.c, "T": T, "C_f": cert.C_f,
                          "certificate_holds": cert.holds})
    return Outcome(report, text, slacks, {"growth": cert.holds})


def _cmd_pw(cfg: RunConfig, entry):
    P, q = cfg.parameters, cfg.quadrature()
    T = _need(P["T"] if P["T"] is not None else entry.band, "T")
    rep = pw_roundtrip(entry.signal(cfg.c), cfg.c, T, q, eta=P["eta"],
                       restriction_tol=P["restriction_tol"])
    d = rep.to_dict()
    rows = [("restriction", rep.restriction_error, rep.restriction_tol, rep.checks["restriction"]),
            ("polar_analytic", rep.cr_relative, rep.cr_tol, rep.checks["polar_analytic"]),
            ("growth", rep.certificate.C_f, rep.certificate.C_claimed, rep.checks["growth"]),
            ("reverse_band", rep.T_hat if rep.T_hat is not None else float("nan"), T + 0.1,
             rep.checks["reverse_band"])]
    text = rio.table_csv(["check", "value", "limit", "passed"], rows, {"corpus_id": entry.id, "T": T})
    return Outcome(d, text, {}, rep.checks)


def _hardy_a(P, entry):
    return _need(P["a"] if P["a"] is not None else entry.hardy_a, "a")


def _cmd_hardy(cfg: RunConfig, entry):
    P, q = cfg.parameters, cfg.quadrature()
    est = hardy_norm(entry.polar(cfg.c), _hardy_a(P, entry), cfg.c, P["p"], P["theta_count"], q)
    return Outcome(est.to_dict(), rio.hardy_table(est))


def _cmd_distance(cfg: RunConfig, entry):
    P, q = cfg.parameters, cfg.quadrature()
    a = _hardy_a(P, entry)
    if P["spectrum"] == "closed":
        S = _need(entry.spectrum(cfg.c), "closed-form spectrum")
    elif P["spectrum"] == "computed":
        S = None
    else:
        raise ConfigError("spectrum must be 'computed' or 'closed'")
    reps = distance_audit(entry.polar(cfg.c), a, cfg.c, P["p"], P["sigma_list"], P["q"], q,
                          spectrum=S, t_grid=audit_t_grid(P["t_half"]))
    slacks = {f"sigma={r.sigma:g}": r.slack for r in reps}
    report = {"rows": [r.to_dict() for r in reps], "a": a, "p": P["p"], "q": P["q"]}
    text = rio.audit_table(reps, {"corpus_id": entry.id, "c": cfg.c, "a": a, "p": P["p"],
                                  "spectrum": P["spectrum"]})
    return Outcome(report, text, slacks)


def _spectrum_choice(P, entry, c):
    if P["spectrum"] == "closed":
        return entry.spectrum(c)
    if P["spectrum"] == "computed":
        return None
    raise ConfigError("spectrum must be 'computed' or 'closed'")


def _cmd_sample(cfg: RunConfig, entry):
    P, q = cfg.parameters, cfg.quadrature()
    x = np.exp(np.linspace(math.log(P["x_min"]), math.log(P["x_max"]), P["n_x"]))
    g = entry.signal(cfg.c)
    S = _spectrum_choice(P, entry, cfg.c)
    if S is None:
        g = replace(g, known_spectrum=None)
    rep = sampling_report(g, cfg.c, P["T"], P["n"], x, q, S)
    text = rio.sampling_table([rep], {"corpus_id": entry.id, "c": cfg.c,
                                      "truncation": rep.truncation})
    return Outcome(rep.to_dict(), text, {"slack": rep.slack})


def _cmd_decay(cfg: RunConfig, entry):
    # the reference slope uses the spectrum's own decay rate when the entry has one
    P, q = cfg.parameters, cfg.quadrature()
    a = P["a"] if P["a"] is not None else (entry.spectral_rate or entry.hardy_a)
    a = _need(a, "a")
    f = entry.polar(cfg.c) if entry.polar_analytic else entry.signal(cfg.c)
    rep = remainder_measure(f, a, cfg.c, P["T_list"], P["n"], None, q,
                            _spectrum_choice(P, entry, cfg.c))
    slacks = {f"T={r['T']:g}": r["slack"] for r in rep.rows}
    text = rio.decay_table(rep, {"corpus_id": entry.id, "c": cfg.c, "a": a})
    return Outcome(rep.to_dict(), text, slacks)


def _cmd_corpus(cfg: RunConfig, entry):
    items = corpus_mod.corpus_list(cfg.parameters["filter"])
    rows = [(d["id"], d["kind"], f"({d['c_range'][0]}, {d['c_range'][1]})",
             " ".join(d["memberships"]), d["closed_form_spectrum"], d["polar_analytic"],
             "" if d["band"] is None else d["band"], "" if d["hardy_a"] is None else d["hardy_a"])
            for d in items]
    text = rio.table_csv(["id", "kind", "c_range", "memberships", "closed_form_spectrum",
                          "polar_analytic", "band", "hardy_a"], rows)
    return Outcome({"entries": items}, text)


_DISPATCH = {
    "transform": _cmd_transform, "invert": _cmd_invert, "polar-check": _cmd_polar,
    "extend": _cmd_extend, "pw-verify": _cmd_pw, "hardy": _cmd_hardy,
    "distance": _cmd_distance, "sample": _cmd_sample, "decay": _cmd_decay,
    "corpus": _cmd_corpus,
}


def run(config: RunConfig, stdout=None) -> int:
    """Validate, dispatch, write the report; return the exit status."""
    stdout = stdout or sys.stdout
    config.validate()
    entry = corpus_mod.get(config.corpus_id) if config.command != "corpus" else None
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = _DISPATCH[config.command](config, entry)
    notes = sorted({f"{w.category.__name__}: {w.message}" for w in caught})
    failed = out.failed(config.tol)
    if config.format == "json":
        body = dict(out.report)
        body.update({"config": config.echo(), "slacks": out.slacks, "checks": out.checks,
                     "warnings": notes, "status": "fail" if failed else "ok"})
        text = rio.dumps_json(body)
    else:
        text = out.csv_text
    if config.output_path:
        rio.write_text(text, config.output_path)
    else:
        stdout.write(text)
    return 2 if failed else 0


# ---------------------------------------------------------------- argparse

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mellin-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, spec in COMMANDS.items():
        sp = sub.add_parser(name, help=f"run {name}")
        if name != "corpus":
            sp.add_argument("corpus_id", nargs="?", default=None, help="corpus entry id")
            sp.add_argument("--c", type=float, default=None, help="weight c")
        sp.add_argument("--config", default=None, help="JSON run configuration")
        sp.add_argument("-o", "--output", default=None, help="report path (stdout if omitted)")
        sp.add_argument("--format", choices=("csv", "json"), default=None)
        sp.add_argument("--tol", type=float, default=None, help="slack tolerance (default 1e-8)")
        sp.add_argument("--serial", action="store_true",
                        help="serial evaluation (always the case; kept for scripts)")
        for key in spec:
            sp.add_argument("--" + key.replace("_", "-"), dest="p_" + key, default=None,
                            help=f"{key} (default {_show_default(spec[key][1])})")
        for key in _CFG_KEYS:
            sp.add_argument("--" + key.replace("_", "-"), dest="p_" + key, default=None)
    return ap


def _show_default(d):
    if d is _REQ:
        return "required"
    if d is None:
        return "from corpus entry"
    return d


def _config_from_args(ns) -> RunConfig:
    base = {}
    if ns.config:
        try:
            with open(ns.config, encoding="utf-8") as fh:
                base = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {ns.config}: {exc}") from None
        if base.get("command", ns.command) != ns.command:
            raise ConfigError(f"config is for command {base['command']!r}, not {ns.command!r}")
    params = dict(base.get("parameters", {}))
    for k, v in vars(ns).items():
        if k.startswith("p_") and v is not None:
            params[k[2:]] = v
    tol = ns.tol if ns.tol is not None else base.get("tol", 1e-8)
    return RunConfig(
        command=ns.command,
        corpus_id=getattr(ns, "corpus_id", None) or base.get("corpus_id"),
        c=getattr(ns, "c", None) if getattr(ns, "c", None) is not None else base.get("c"),
        parameters=params,
        output_path=ns.output or base.get("output_path"),
        format=ns.format or base.get("format"),
        tol=float(tol),
    )


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        return run(_config_from_args(ns))
    except (MellinLabError, ValueError, OSError) as exc:
        diag = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(diag, sort_keys=True) + "\n")
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
