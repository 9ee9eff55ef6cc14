"""Report serialization: spectrum CSV, table CSVs and deterministic JSON."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .transform import MellinSpectrum

__all__ = [
    "fmt",
    "to_jsonable",
    "dumps_json",
    "write_json",
    "spectrum_csv",
    "write_spectrum_csv",
    "read_spectrum_csv",
    "table_csv",
    "hardy_table",
    "audit_table",
    "sampling_table",
    "decay_table",
    "write_text",
]


def fmt(x) -> str:
    """Shortest round-trip text for a float; 'inf', '-inf', 'nan' spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(x)


def to_jsonable(obj):
    """Plain JSON types; numpy scalars and arrays unwrapped, non-finite floats as strings."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else fmt(x)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": to_jsonable(obj.real), "im": to_jsonable(obj.imag)}
    if obj is None or isinstance(obj, str):
        return obj
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    return str(obj)


def dumps_json(obj) -> str:
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_text(text: str, path) -> None:
    # newline="" keeps the bytes identical across platforms
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)


def write_json(obj, path) -> None:
    write_text(dumps_json(obj), path)


def _header(meta: Optional[dict]) -> str:
    if not meta:
        return ""
    lines = []
    for k in sorted(meta):
        v = meta[k]
        text = json.dumps(to_jsonable(v), sort_keys=True) if not isinstance(v, str) else v
        lines.append(f"# {k}: {text}\n")
    return "".join(lines)


def table_csv(columns: Sequence[str], rows: Iterable[Sequence], meta: Optional[dict] = None) -> str:
    buf = io.StringIO()
    buf.write(_header(meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def spectrum_csv(S: MellinSpectrum, t_grid=None, meta: Optional[dict] = None) -> str:
    """Columns t, re, im. The c value, support and spectrum metadata go in '#' lines."""
    t = S.t_grid if t_grid is None else np.asarray(t_grid, dtype=float)
    if t is None:
        raise ValueError("a closed-form spectrum needs a t grid to be written")
    vals = S(t)
    head = {"c": S.c, "support_T": S.support_T, "continuous": S.continuous}
    head.update({f"meta.{k}": v for k, v in S.meta.items()})
    head.update(meta or {})
    return table_csv(["t", "re", "im"], ((float(a), float(v.real), float(v.imag))
                                         for a, v in zip(t, vals)), head)


def write_spectrum_csv(S: MellinSpectrum, path, t_grid=None, meta: Optional[dict] = None) -> None:
    write_text(spectrum_csv(S, t_grid, meta), path)


def read_spectrum_csv(path) -> MellinSpectrum:
    meta = {}
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition(":")
            val = val.strip()
            try:
                meta[key.strip()] = json.loads(val)
            except json.JSONDecodeError:
                meta[key.strip()] = val
        elif line.strip():
            body.append(line)
    reader = csv.reader(body)
    header = next(reader, None)
    if header != ["t", "re", "im"]:
        raise ValueError(f"{path}: expected columns t,re,im, found {header}")
    for row in reader:
        rows.append([float(x) for x in row])
    if "c" not in meta:
        raise ValueError(f"{path}: missing '# c:' header line")
    arr = np.array(rows, dtype=float).reshape(-1, 3)
    support = meta.get("support_T")
    extra = {k[5:]: v for k, v in meta.items() if k.startswith("meta.")}
    return MellinSpectrum(float(meta["c"]), None, None if support is None else float(support),
                          arr[:, 0], arr[:, 1] + 1j * arr[:, 2],
                          bool(meta.get("continuous", True)), extra)


def hardy_table(est) -> str:
    rows = [(th, plus, minus, avg) for th, plus, minus, avg in est.per_theta]
    meta = {"a": est.a, "c": est.c, "p": est.p, "value": est.value, "grid": est.grid}
    return table_csv(["theta", "norm_plus", "norm_minus", "avg"], rows, meta)


def audit_table(reports, meta: Optional[dict] = None) -> str:
    rows = [(r.sigma, r.q, r.dist_value, r.bound_value, r.slack) for r in reports]
    return table_csv(["sigma", "q", "dist", "bound", "slack"], rows, meta)


def sampling_table(reports, meta: Optional[dict] = None) -> str:
    rows = [(r.T, r.n, r.max_abs_error, r.bound, r.slack) for r in reports]
    return table_csv(["T", "n", "max_abs_error", "bound", "slack"], rows, meta)


def decay_table(report, meta: Optional[dict] = None) -> str:
    """Rows of a decay measurement; 'bound' is the distance bound, the slack also counts truncation."""
    head = {"decay_slope": report.decay_slope, "reference_slope": report.reference_slope}
    head.update(meta or {})
    rows = [(r["T"], report.n, r["measure"], r["dist_bound"], r["slack"]) for r in report.rows]
    return table_csv(["T", "n", "max_abs_error", "bound", "slack"], rows, head)
