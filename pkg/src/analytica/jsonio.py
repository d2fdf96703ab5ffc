"""Canonical JSON for forms, restrictions, towers, and reports.

The emitter is deliberately hand-rolled so output is byte-stable across
platforms and worker counts: floats print through {:.17g} (with -0.0
collapsed to 0 and infinities as the strings "inf"/"-inf"), rationals in
vectors print as "p/q" strings, and form coefficients split into explicit
num/den integers.  Dict insertion order is preserved, never sorted.
"""

from __future__ import annotations

import json
import math
import os
from fractions import Fraction

from ._linalg import frac
from .forms import HomogeneousForm
from .geometry import Hyperplane
from .interpolation import HyperplaneRestriction


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0.0:
        return "0"
    return format(float(x), ".17g")


def format_fraction(x) -> str:
    x = frac(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def _write(value, out: list, level: int, indent: int) -> None:
    pad = " " * (indent * (level + 1))
    close_pad = " " * (indent * level)
    if isinstance(value, dict):
        if not value:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(value.items()):
            if not isinstance(k, str):
                raise TypeError(f"JSON object keys must be strings, got {k!r}")
            out.append(pad + json.dumps(k) + ": ")
            _write(v, out, level + 1, indent)
            out.append(",\n" if i < len(value) - 1 else "\n")
        out.append(close_pad + "}")
    elif isinstance(value, (list, tuple)):
        items = list(value)
        if not items:
            out.append("[]")
            return
        simple = all(
            not isinstance(v, (dict, list, tuple)) for v in items
        ) and len(items) <= 16
        if simple:
            out.append("[")
            for i, v in enumerate(items):
                _write(v, out, level + 1, indent)
                if i < len(items) - 1:
                    out.append(", ")
            out.append("]")
            return
        out.append("[\n")
        for i, v in enumerate(items):
            out.append(pad)
            _write(v, out, level + 1, indent)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(close_pad + "]")
    elif isinstance(value, str):
        out.append(json.dumps(value))
    elif value is None:
        out.append("null")
    elif value is True:
        out.append("true")
    elif value is False:
        out.append("false")
    elif isinstance(value, int):
        out.append(str(value))
    elif isinstance(value, float):
        out.append(format_float(value))
    elif isinstance(value, Fraction):
        out.append(json.dumps(format_fraction(value)))
    else:
        raise TypeError(f"cannot serialize {type(value).__name__}")


def dumps(value, indent: int = 2) -> str:
    out: list[str] = []
    _write(value, out, 0, indent)
    return "".join(out)


# ---------------------------------------------------------------------------
# converters


def vector_to_data(v) -> list:
    out = []
    for x in v:
        if isinstance(x, float):
            out.append(x)
        else:
            out.append(format_fraction(x))
    return out


def vector_from_data(data) -> tuple:
    return tuple(frac(Fraction(x) if isinstance(x, str) else x) for x in data)


def form_to_data(f: HomogeneousForm) -> dict:
    terms = []
    for idx in sorted(f.coefficients, reverse=True):
        c = f.coefficients[idx]
        terms.append({"exp": list(idx), "num": c.numerator, "den": c.denominator})
    return {"n": f.dimension, "d": f.degree, "terms": terms}


def form_from_data(data: dict) -> HomogeneousForm:
    terms = {
        tuple(t["exp"]): Fraction(t["num"], t.get("den", 1)) for t in data["terms"]
    }
    return HomogeneousForm(data["n"], data["d"], terms)


def restrictions_to_data(restrictions) -> dict:
    rs = list(restrictions)
    if not rs:
        raise ValueError("no restrictions to serialize")
    return {
        "d": rs[0].degree,
        "restrictions": [
            {
                "normal": vector_to_data(r.hyperplane.normal),
                "chart": [vector_to_data(row) for row in r.chart],
                "form": form_to_data(r.form),
            }
            for r in rs
        ],
    }


def restrictions_from_data(data: dict) -> list[HyperplaneRestriction]:
    out = []
    for entry in data["restrictions"]:
        plane = Hyperplane(vector_from_data(entry["normal"]))
        chart = tuple(vector_from_data(row) for row in entry["chart"])
        out.append(HyperplaneRestriction(plane, chart, form_from_data(entry["form"])))
    return out


def tower_result_to_data(result, line_radii=()) -> dict:
    return {
        "kind": "tower",
        "R": len(result.tower.forms) - 1,
        "ok": result.ok,
        "mode": result.mode,
        "forms": [form_to_data(g) for g in result.tower.forms],
        "diagnostics": {
            "per_degree_residual": list(result.per_degree_residual),
            "line_radii": list(line_radii),
            "failures": [
                {"degree": fl.degree, "kind": fl.kind, "detail": fl.detail}
                for fl in result.failures
            ],
        },
    }


def reconstruction_to_data(result) -> dict:
    data = {
        "ok": result.ok,
        "degree": result.degree,
        "mode": result.mode,
        "planes_used": result.planes_used,
        "max_residual": float(result.max_residual),
        "form": form_to_data(result.form),
    }
    if result.witness is not None:
        data["witness"] = vector_to_data(result.witness)
    return data


def _witness_to_data(w):
    if w is None:
        return None
    return vector_to_data(w)


def scan_report_to_data(report) -> dict:
    config = dict(report.config)
    return {
        "kind": "sphere-scan",
        "checked": report.checked,
        "passed": report.passed,
        "residuals": [
            max((rep.residual for _, rep in outcome.parts), default=0.0)
            for outcome in report.outcomes
        ],
        "failures": [
            {
                "index": fl.index,
                "sphere": {
                    "c": vector_to_data(fl.sphere.c),
                    "basis": [vector_to_data(b) for b in fl.sphere.basis],
                },
                "part": fl.part,
                "verdict": fl.verdict,
                "witness": _witness_to_data(fl.witness),
                "residual": float(fl.residual),
            }
            for fl in report.failures
        ],
        "skipped": list(report.skipped),
        "config": config,
    }


def certify_report_to_data(report) -> dict:
    return {
        "kind": "certify",
        "verdict": report.verdict,
        "order": report.order,
        "theta": report.theta,
        "eta": report.eta,
        "cone_residual": float(report.cone_residual),
        "sweep_residuals": [float(r) for r in report.sweep_residuals],
        "plane": {
            "base": vector_to_data(report.plane.base_point),
            "basis": [vector_to_data(b) for b in report.plane.basis],
        },
        "tower": [form_to_data(g) for g in report.tower.forms],
        "findings": [
            {
                "kind": fi.kind,
                "degree": fi.degree,
                "witness": _witness_to_data(fi.witness),
                "detail": fi.detail,
            }
            for fi in report.findings
        ],
        "plane_reports": [
            {
                "verdict": rep.verdict,
                "residual": float(rep.residual),
                "witness": _witness_to_data(rep.witness),
                "mode": rep.mode,
                "fit_degree": rep.fit_degree,
                "window": float(rep.window),
                "detail": rep.detail,
            }
            for rep in report.plane_reports
        ],
        "diagnostics": {
            "per_degree_residual": list(report.per_degree_residual),
            "cone_residuals": list(report.cone_residuals),
            "line_radii": list(report.line_radii),
        },
        "config": dict(report.config),
    }


# ---------------------------------------------------------------------------
# plot data


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return format_float(v).strip('"')
    return str(v)


def _write_csv(path: str, header: str, rows) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(_csv_cell(v) for v in row) + "\n")


def emit_plot_data(data: dict, directory: str) -> list[str]:
    """Write the plottable series of a report as CSV files and return the
    paths written.  Tower reports yield one file per diagnostic line with
    columns t,f,T (the function and the partial sums along t*p); scan
    reports yield a single file of per-sphere residuals, header-only when
    nothing was checked; counterexample reports yield one file per value
    series (t,value)."""
    os.makedirs(directory, exist_ok=True)
    written: list[str] = []
    kind = data.get("kind")
    if kind == "tower":
        for i, line in enumerate(data.get("lines", ())):
            path = os.path.join(directory, f"line_{i}.csv")
            _write_csv(path, "t,f,T", line["rows"])
            written.append(path)
    elif kind == "sphere-scan":
        path = os.path.join(directory, "spheres.csv")
        rows = [(i, float(r)) for i, r in enumerate(data.get("residuals", ()))]
        _write_csv(path, "index,residual", rows)
        written.append(path)
    elif kind == "counterexample":
        for series in data.get("series", ()):
            path = os.path.join(directory, f"{series['label']}.csv")
            _write_csv(path, "t,value", series["rows"])
            written.append(path)
    else:
        diag = data.get("diagnostics", {})
        for key in ("per_degree_residual", "cone_residuals", "line_radii"):
            series = diag.get(key, data.get(key))
            if not series:
                continue
            path = os.path.join(directory, f"{key}.csv")
            _write_csv(path, "index,value", ((i, float(v)) for i, v in enumerate(series)))
            written.append(path)
    return written
