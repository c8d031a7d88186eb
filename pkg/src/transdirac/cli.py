"""Command-line workbench: ``transdirac run`` and ``transdirac acceptance``.

A run is described by a flat JSON config such as
``{"command": "circle-dirac", "M": 5}``.  Exit status is 0 on success,
2 on invalid input and 3 when a computed quantity breaks its contract.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import acceptance, cohomology, euler, forms, torus, transversal
from .exceptions import ContractViolation, ValidationError
from .fourier import TrigSeries
from .io import write_report
from .spectrum import RANK_RTOL

__all__ = ["RunConfig", "COMMANDS", "run", "run_acceptance", "main"]

RESERVED = ("command", "tol", "out", "format", "threads")
REQUIRED = object()


# parameter coercion


def _int(v, key):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or v != int(v):
        raise ValidationError(f"{key} must be an integer, got {v!r}")
    return int(v)


def _float(v, key):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(f"{key} must be a finite number, got {v!r}")
    return float(v)


def _bool(v, key):
    if not isinstance(v, bool):
        raise ValidationError(f"{key} must be true or false")
    return v


def _str(v, key):
    if not isinstance(v, str):
        raise ValidationError(f"{key} must be a string")
    return v


def _series(v, key):
    if not isinstance(v, dict) or set(v) - {"a0", "cos", "sin", "period"}:
        raise ValidationError(f"{key} must be an object with keys a0, cos, sin, period")
    try:
        return TrigSeries(**v)
    except TypeError as exc:
        raise ValidationError(f"{key}: {exc}") from None


def _complex(v, key):
    if isinstance(v, list) and len(v) == 2:
        return complex(_float(v[0], key), _float(v[1], key))
    return complex(_float(v, key))


def _matrix(v, key):
    if not isinstance(v, list) or not v or not all(isinstance(row, list) and row for row in v):
        raise ValidationError(f"{key} must be a nonempty list of rows")
    if len({len(row) for row in v}) != 1:
        raise ValidationError(f"{key} rows have different lengths")
    arr = np.array([[_complex(x, key) for x in row] for row in v])
    return arr.real.copy() if not arr.imag.any() else arr


def _points(v, key):
    arr = np.asarray(v, dtype=float) if isinstance(v, list) else None
    if arr is None or arr.ndim != 2 or not np.all(np.isfinite(arr)):
        raise ValidationError(f"{key} must be a list of coordinate lists")
    return arr


def _form(v, key):
    if not isinstance(v, dict):
        raise ValidationError(f"{key} must map comma-separated indices to coefficients")
    out = {}
    for k, c in v.items():
        try:
            idx = tuple(int(i) for i in k.split(",")) if k.strip() else ()
        except ValueError:
            raise ValidationError(f"bad multi-index {k!r}") from None
        out[idx] = _complex(c, key)
    return out


SIN_Y = {"a0": 0.0, "cos": [], "sin": [1.0]}
H_DEFAULT = {"a0": 0.0, "cos": [], "sin": [0.3], "period": 1.0}


# command handlers: each returns (kind, result, spectrum-or-None)


def _spectrum(rep):
    return "spectrum", rep.to_dict(), rep


def _cmd_circle_dirac(p, tol):
    return _spectrum(torus.circle_dirac(p["M"]))


def _cmd_dirac_t2(p, tol):
    return _spectrum(torus.dirac_t2(p["M"]))


def _cmd_harmonic_dims(p, tol):
    n, M = p["n"], p["M"]
    if n < 1:
        raise ValidationError("n must be positive")
    return "integer", {"value": [torus.harmonic_dims(n, M, r) for r in range(n + 1)]}, None


def _cmd_warped_dl(p, tol):
    return _spectrum(transversal.warped_torus_DL(p["g"], p["N"]))


def _cmd_warped_dq(p, tol):
    return _spectrum(transversal.warped_torus_DQ(p["g"], p["n"], p["N"]))


def _cmd_slope_dq(p, tol):
    return _spectrum(transversal.slope_distribution_DQ(p["r"], p["M"]))


def _cmd_mean_curvature(p, tol):
    geometry = p["geometry"]
    if geometry == "warped":
        frame = transversal.warped_torus_frame(p["g"])
    elif geometry == "heisenberg":
        frame = transversal.heisenberg_frame()
    else:
        raise ValidationError(f"unknown geometry {geometry!r}; use 'warped' or 'heisenberg'")
    field_ = transversal.mean_curvature(frame, p["which"], p["points"])
    return "mean_curvature", {"label": field_.label, "points": field_.points, "values": field_.values,
                              "max_norm": field_.max_norm()}, None


def _cmd_heat_supertrace(p, tol):
    D = p["matrix"]
    values = [torus.heat_supertrace_index(D, t) for t in p["t"]]
    for t, v in zip(p["t"], values):
        if abs(v - round(v)) > (tol or 1e-8):
            raise ContractViolation(f"supertrace at t={t} is not an integer: {v!r}",
                                    residual="supertrace_integrality", value=abs(v - round(v)))
    return "scalar", {"value": int(round(values[0])), "supertrace": values, "t": list(p["t"])}, None


def _cohomology_report(c, twisted, tol):
    rep = cohomology.cohomology_dims(c, twisted=twisted, rtol=tol or RANK_RTOL)
    return "cohomology", rep.to_dict(), None


def _cmd_carriere(p, tol):
    c = cohomology.carriere_model(p["lambda"], p["N"])
    cohomology.validate_complex(c)
    kind, result, _ = _cohomology_report(c, p["twisted"], tol)
    result["taut"] = cohomology.is_taut(c)
    return kind, result, None


def _cmd_conformal_shift(p, tol):
    h = p["h"]
    shift = cohomology.conformal_shift(p["lambda"], p["N"], h)
    cohomology.validate_complex(shift.complex)
    rtol = tol or RANK_RTOL
    return "conformal_shift", {
        "betti_twisted": cohomology.cohomology_dims(shift.complex, True, rtol).betti,
        "betti_untwisted": cohomology.cohomology_dims(shift.complex, False, rtol).betti,
        "residual": shift.residual,
    }, None


def _cmd_strata_euler(p, tol):
    ds = euler.load_dataset(p["dataset"])
    if not isinstance(ds, euler.StrataDataset):
        raise ValidationError(f"dataset {p['dataset']!r} is not a strata dataset")
    return "integer", {"value": euler.strata_euler(ds.records, p["rho"], ds.abelian_group())}, None


def _cmd_lefschetz_euler(p, tol):
    name = p["action"]
    if name == "z4_rotation":
        action = euler.z4_rotation_action()
    elif name == "negation":
        action = euler.negation_action(p["n"])
    else:
        raise ValidationError(f"unknown action {name!r}; use 'z4_rotation' or 'negation'")
    return "integer", {"value": euler.lefschetz_euler(action, p["rho"])}, None


def _cmd_gauss_bonnet(p, tol):
    ds = euler.load_dataset(p["dataset"])
    if not isinstance(ds, euler.FoliationDataset):
        raise ValidationError(f"dataset {p['dataset']!r} is not a foliation dataset")
    return "integer", {"value": euler.basic_gauss_bonnet(ds.records)}, None


def _cmd_hodge_star(p, tol):
    if np.iscomplexobj(p["metric"]):
        raise ValidationError("metric entries must be real")
    m = forms.MetricPoint(p["metric"], p["orientation"])
    a = forms.Form(m.n, p["form"])
    star = {"hodge": forms.hodge_star, "bigstar": forms.bigstar}.get(p["star"])
    if star is None:
        raise ValidationError(f"unknown star {p['star']!r}; use 'hodge' or 'bigstar'")
    out = star(m, a)
    coeffs = {",".join(map(str, idx)): [c.real, c.imag] for idx, c in sorted(out.coeffs.items())}
    return "form", {"n": m.n, "coefficients": coeffs}, None


# name -> (handler, {param: (coercer, default)})
COMMANDS: dict[str, tuple] = {
    "circle-dirac": (_cmd_circle_dirac, {"M": (_int, REQUIRED)}),
    "dirac-t2": (_cmd_dirac_t2, {"M": (_int, REQUIRED)}),
    "harmonic-dims": (_cmd_harmonic_dims, {"n": (_int, 2), "M": (_int, REQUIRED)}),
    "warped-dl": (_cmd_warped_dl, {"g": (_series, SIN_Y), "N": (_int, 256)}),
    "warped-dq": (_cmd_warped_dq, {"g": (_series, SIN_Y), "n": (_int, REQUIRED), "N": (_int, 256)}),
    "slope-dq": (_cmd_slope_dq, {"r": (_float, REQUIRED), "M": (_int, REQUIRED)}),
    "mean-curvature": (_cmd_mean_curvature, {"geometry": (_str, REQUIRED), "which": (_str, REQUIRED),
                                             "points": (_points, REQUIRED), "g": (_series, SIN_Y)}),
    "heat-supertrace": (_cmd_heat_supertrace, {"matrix": (_matrix, REQUIRED),
                                               "t": (lambda v, k: [_float(x, k) for x in v], [0.1, 1.0, 10.0])}),
    "carriere": (_cmd_carriere, {"lambda": (_float, REQUIRED), "N": (_int, REQUIRED), "twisted": (_bool, True)}),
    "conformal-shift": (_cmd_conformal_shift, {"lambda": (_float, REQUIRED), "N": (_int, REQUIRED),
                                               "h": (_series, H_DEFAULT)}),
    "strata-euler": (_cmd_strata_euler, {"dataset": (_str, REQUIRED), "rho": (_str, REQUIRED)}),
    "lefschetz-euler": (_cmd_lefschetz_euler, {"action": (_str, "z4_rotation"), "n": (_int, 2),
                                               "rho": (_str, REQUIRED)}),
    "gauss-bonnet": (_cmd_gauss_bonnet, {"dataset": (_str, REQUIRED)}),
    "hodge-star": (_cmd_hodge_star, {"metric": (_matrix, REQUIRED), "orientation": (_int, 1),
                                     "form": (_form, REQUIRED), "star": (_str, "hodge")}),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    tol: float | None = None
    out: str | None = None
    format: str = "json"
    threads: int = 1

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValidationError(f"unknown command {self.command!r}; known: {', '.join(sorted(COMMANDS))}")
        if self.tol is not None and not (isinstance(self.tol, (int, float)) and self.tol > 0):
            raise ValidationError(f"tolerance must be positive, got {self.tol!r}")
        if self.format not in ("json", "csv"):
            raise ValidationError(f"format must be json or csv, got {self.format!r}")
        if isinstance(self.threads, bool) or not isinstance(self.threads, int) or self.threads < 1:
            raise ValidationError("threads must be a positive integer")

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        if not isinstance(raw, dict) or "command" not in raw:
            raise ValidationError("config must be a JSON object with a 'command' key")
        command = raw["command"]
        if command not in COMMANDS:
            raise ValidationError(f"unknown command {command!r}; known: {', '.join(sorted(COMMANDS))}")
        schema = COMMANDS[command][1]
        unknown = sorted(set(raw) - set(RESERVED) - set(schema))
        if unknown:
            raise ValidationError(f"unknown config keys for {command}: {unknown}")
        params = {}
        for key, (coerce, default) in schema.items():
            if key in raw:
                params[key] = coerce(raw[key], key)
            elif default is REQUIRED:
                raise ValidationError(f"{command} needs {key!r}")
            else:
                params[key] = coerce(default, key)
        return cls(command, params, raw.get("tol"), raw.get("out"), raw.get("format", "json"),
                   raw.get("threads", 1))

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except OSError as exc:
            raise ValidationError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(raw)

    def echo(self) -> dict:
        out = {}
        for k, v in self.params.items():
            if isinstance(v, TrigSeries):
                v = v.to_dict()
            elif isinstance(v, np.ndarray):
                v = v.tolist()
            elif isinstance(v, dict):
                v = {",".join(map(str, i)): c for i, c in v.items()}
            out[k] = v
        return out


def run(config: RunConfig) -> str:
    """Execute one command and return the rendered report (also written to ``config.out``)."""
    handler = COMMANDS[config.command][0]
    kind, result, spectrum = handler(config.params, config.tol)
    doc = {"kind": kind, "command": config.command, "config": config.echo(), "result": result}
    return write_report(doc, config.out, config.format, spectrum)


def run_acceptance(suite: str, threads: int = 1, stream=None, out: str | None = None) -> bool:
    stream = stream or sys.stdout
    checks = acceptance.checks_for(suite)
    start = time.perf_counter()
    results = acceptance.run_checks(checks, threads)
    if suite == "all":
        results.append(acceptance.runtime_result(time.perf_counter() - start))
    for r in results:
        print(acceptance.format_result(r), file=stream)
    passed = sum(r.passed for r in results)
    print(f"{suite}: {passed}/{len(results)} checks passed", file=stream)
    if out is not None:
        doc = {"kind": "acceptance", "command": "acceptance",
               "result": {"suite": suite, "passed": passed == len(results),
                          "checks": [{"id": r.cid, "passed": r.passed, "title": r.title} for r in results]}}
        write_report(doc, out)
    return passed == len(results)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="transdirac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="action", required=True)
    r = sub.add_parser("run", help="run one command from a JSON config")
    r.add_argument("--config", required=True)
    r.add_argument("--out")
    r.add_argument("--format", choices=("json", "csv"))
    r.add_argument("--tol", type=float)
    r.add_argument("--threads", type=int)
    a = sub.add_parser("acceptance", help="run an acceptance suite")
    a.add_argument("--suite", choices=acceptance.SUITES, default="all")
    a.add_argument("--threads", type=int, default=1)
    a.add_argument("--out")
    return parser


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.action == "acceptance":
            if args.threads < 1:
                raise ValidationError("threads must be a positive integer")
            return 0 if run_acceptance(args.suite, args.threads, out=args.out) else 1
        raw = RunConfig.load(args.config)
        overrides = {k: getattr(args, k) for k in ("out", "format", "tol", "threads") if getattr(args, k) is not None}
        config = RunConfig(raw.command, raw.params, **{**{"tol": raw.tol, "out": raw.out, "format": raw.format,
                                                          "threads": raw.threads}, **overrides})
        text = run(config)
        if config.out is None:
            sys.stdout.write(text)
        return 0
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except ContractViolation as exc:
        print(f"contract violation [{exc.residual}={exc.value}]: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
