"""Canonical JSON and CSV output with a small report schema."""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .exceptions import ValidationError
from .spectrum import SpectrumReport

__all__ = ["to_plain", "canonical_json", "spectrum_csv", "REPORT_SCHEMAS", "validate_report", "write_report"]

# required keys of the ``result`` block, per report kind
REPORT_SCHEMAS: dict[str, set[str]] = {
    "spectrum": {"operator_label", "truncation", "eigenvalues", "multiplicities", "metadata"},
    "cohomology": {"betti", "twisted", "euler", "flags", "metadata"},
    "integer": {"value"},
    "mean_curvature": {"label", "points", "values"},
    "form": {"n", "coefficients"},
    "scalar": {"value"},
    "conformal_shift": {"betti_twisted", "betti_untwisted", "residual"},
    "acceptance": {"suite", "passed", "checks"},
}


def to_plain(obj):
    """Convert numpy scalars/arrays, tuples and complex numbers to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e16:
        return f"{x:.1f}"
    return format(x, ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(obj[k], indent, level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + _encode(v, indent, level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    return json.dumps(obj)


def canonical_json(obj, indent: int = 2) -> str:
    """Sorted keys and floats at 17 significant digits, so equal inputs give equal bytes."""
    return _encode(to_plain(obj), indent, 0) + "\n"


def spectrum_csv(report: SpectrumReport) -> str:
    lines = ["eigenvalue,multiplicity"]
    lines += [f"{format(float(ev), '.17g')},{int(m)}" for ev, m in zip(report.eigenvalues, report.multiplicities)]
    return "\n".join(lines) + "\n"


def validate_report(doc: dict) -> None:
    """Check a parsed report against :data:`REPORT_SCHEMAS`."""
    for key in ("kind", "command", "result"):
        if key not in doc:
            raise ValidationError(f"report is missing {key!r}")
    kind = doc["kind"]
    if kind not in REPORT_SCHEMAS:
        raise ValidationError(f"unknown report kind {kind!r}")
    missing = REPORT_SCHEMAS[kind] - set(doc["result"])
    if missing:
        raise ValidationError(f"{kind} report is missing {sorted(missing)}")
    if kind == "spectrum":
        res = doc["result"]
        if len(res["eigenvalues"]) != len(res["multiplicities"]):
            raise ValidationError("spectrum report has mismatched lengths")


def write_report(doc: dict, out: str | Path | None, fmt: str = "json", spectrum: SpectrumReport | None = None) -> str:
    """Render ``doc`` (or the spectrum as CSV) and write it to ``out`` if given."""
    if fmt == "csv":
        if spectrum is None:
            raise ValidationError("csv output is only available for spectra")
        text = spectrum_csv(spectrum)
    elif fmt == "json":
        text = canonical_json(doc)
        validate_report(json.loads(text))
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    if out is not None:
        Path(out).write_text(text)
    return text
