"""Command-line front end: ``steady``, ``sweep``, ``preset <name>`` and ``validate``.

Configs are single JSON documents with a required ``"schema": 1`` field and
flat keys; anything unknown is rejected before computation starts. Rates and
detunings are in units of kappa (the resonator decay rate). The optional
``kappa`` key is a physical scale that multiplies dimensional quantities on
output only.

Exit status: 0 success, 2 config error, 3 solver error, 4 validation failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

from . import __version__, kernels
from .errors import ConfigError, DualCavityError
from .model import PARAM_NAMES, SystemParams
from .sweep import (
    AXIS_NAMES,
    NUMERIC_STATES,
    OBSERVABLES,
    PRESET_NOTES,
    PRESETS,
    Axis,
    SweepResult,
    SweepSpec,
    evaluate_point,
    figure_preset,
    run_sweep,
)
from .table import ResultTable

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VALIDATION = 4

SCHEMA_VERSION = 1
STEADY_OBSERVABLES = (
    "photon_number_1",
    "photon_number_2",
    "atom_excitation",
    "edge_c1",
    "edge_c2",
    "edge_c3",
    "fill",
)
# quantities with units of frequency; everything else is dimensionless
DIMENSIONAL = set(PARAM_NAMES) | {"delta", "omega", "spectral_gap"}

CONFIG_KEYS = set(PARAM_NAMES) | {
    "schema",
    "delta",
    "omega",
    "kappa",
    "n_max",
    "methods",
    "observables",
    "axes",
    "family",
    "numeric_state",
    "out",
    "format",
}
AXIS_KEYS = {"name", "start", "stop", "points"}
FAMILY_KEYS = {"name", "values"}


@dataclasses.dataclass(frozen=True)
class RunConfig:
    spec: SweepSpec
    kappa: float = 1.0
    out: str | None = None
    format: str = "csv"


def _reject_duplicates(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise ConfigError(f"duplicate key {key!r}")
        seen[key] = value
    return seen


def _number(doc: dict, key: str) -> float:
    value = doc[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{key!r} must be a finite number, got {value!r}")
    return float(value)


def _strings(doc: dict, key: str, allowed) -> tuple[str, ...]:
    value = doc[key]
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list) or not value or any(v not in allowed for v in value):
        raise ConfigError(f"{key!r} must be a non-empty list drawn from {list(allowed)}, got {value!r}")
    return tuple(value)


def _unknown(doc: dict, allowed: set, where: str) -> None:
    extra = sorted(set(doc) - allowed)
    if extra:
        raise ConfigError(f"unknown key(s) in {where}: {extra}")


def _axis(entry) -> Axis:
    if not isinstance(entry, dict):
        raise ConfigError(f"each axis must be an object, got {entry!r}")
    _unknown(entry, AXIS_KEYS, "axis")
    missing = AXIS_KEYS - set(entry)
    if missing:
        raise ConfigError(f"axis is missing {sorted(missing)}")
    points = entry["points"]
    if isinstance(points, bool) or not isinstance(points, int) or points < 2:
        raise ConfigError(f"axis {entry['name']!r} needs an integer 'points' >= 2, got {points!r}")
    if entry["name"] not in AXIS_NAMES:
        raise ConfigError(f"unknown axis {entry['name']!r}; choose from {list(AXIS_NAMES)}")
    return Axis(entry["name"], _number(entry, "start"), _number(entry, "stop"), points)


def parse_config(doc, defaults: dict | None = None) -> RunConfig:
    """Validate a decoded JSON document and resolve it into a RunConfig.

    ``defaults`` supplies values for keys the document leaves out (used by
    ``steady`` to request all point observables with the numeric method).

    Raises
    ------
    ConfigError
        On any schema violation, unknown key or invalid value.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    _unknown(doc, CONFIG_KEYS, "config")
    if doc.get("schema") != SCHEMA_VERSION:
        raise ConfigError(f"config needs \"schema\": {SCHEMA_VERSION}, got {doc.get('schema')!r}")
    doc = {**(defaults or {}), **doc}

    params = {}
    for key in ("delta", "omega", *PARAM_NAMES):
        if key in doc:
            params[key] = _number(doc, key)
    kappa = _number(doc, "kappa") if "kappa" in doc else 1.0
    if kappa <= 0:
        raise ConfigError(f"'kappa' scale must be positive, got {kappa}")
    try:
        base = SystemParams().replace(**params)
    except DualCavityError as exc:
        raise ConfigError(str(exc)) from None

    axes = doc.get("axes", [])
    if not isinstance(axes, list):
        raise ConfigError("'axes' must be a list")
    family = doc.get("family")
    if family is not None:
        if not isinstance(family, dict):
            raise ConfigError("'family' must be an object with 'name' and 'values'")
        _unknown(family, FAMILY_KEYS, "family")
        values = family.get("values")
        if not isinstance(values, list) or not values:
            raise ConfigError("'family.values' must be a non-empty list")
        family = (family.get("name"), tuple(_number({"v": v}, "v") for v in values))

    n_max = doc.get("n_max", 1)
    if isinstance(n_max, bool) or not isinstance(n_max, int) or n_max < 1:
        raise ConfigError(f"'n_max' must be a positive integer, got {n_max!r}")
    fmt = doc.get("format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"'format' must be 'csv' or 'json', got {fmt!r}")
    out = doc.get("out")
    if out is not None and not isinstance(out, str):
        raise ConfigError("'out' must be a path string")
    try:
        spec = SweepSpec(
            base=base,
            axes=tuple(_axis(a) for a in axes),
            methods=_strings(doc, "methods", ("analytic", "numeric")) if "methods" in doc else ("analytic",),
            observables=_strings(doc, "observables", OBSERVABLES) if "observables" in doc else ("fill",),
            n_max=n_max,
            family=family,
            numeric_state=doc.get("numeric_state", "dominant"),
        )
    except DualCavityError as exc:
        raise ConfigError(str(exc)) from None
    if spec.numeric_state not in NUMERIC_STATES:
        raise ConfigError(f"'numeric_state' must be one of {list(NUMERIC_STATES)}")
    return RunConfig(spec, kappa, out, fmt)


def load_config(path, defaults: dict | None = None) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return parse_config(doc, defaults)


def _scale(name: str, value, kappa: float):
    if value is None or kappa == 1.0 or name not in DIMENSIONAL:
        return value
    return value * kappa


def _metadata(spec: SweepSpec, kappa: float, columns, methods_by_column, curve: str, command: str) -> dict:
    return {
        "tool": "dualcavity",
        "version": __version__,
        "command": command,
        "config": spec.as_dict(),
        "kappa_scale": kappa,
        "units": "kappa" if kappa == 1.0 else "absolute (kappa scale applied)",
        "curve": curve,
        "column_methods": {c: methods_by_column.get(c) for c in columns},
    }


def tables_from_sweep(result: SweepResult, kappa: float = 1.0, command: str = "sweep") -> dict[str, ResultTable]:
    """One ResultTable per curve, keyed by curve label (``""`` without a family)."""
    spec = result.spec
    axis_names = [a.name for a in spec.axes]
    value_columns = [(obs, m) for obs in spec.observables for m in spec.methods]
    columns = axis_names + [f"{obs}_{m}" for obs, m in value_columns]
    methods_by_column = {f"{obs}_{m}": m for obs, m in value_columns}
    tables = {}
    for curve in result.curve_labels():
        by_index = {}
        for rec in result.records:
            if rec.curve == curve:
                by_index.setdefault(rec.index, {})[rec.method] = rec
        rows, errors = [], []
        for index in sorted(by_index):
            recs = by_index[index]
            coords = next(iter(recs.values())).coords
            row = [_scale(a, coords[a], kappa) for a in axis_names]
            for obs, m in value_columns:
                rec = recs[m]
                row.append(_scale(obs, rec.values.get(obs), kappa))
                if obs in rec.errors:
                    errors.append({"index": index, "coords": coords, "method": m, "observable": obs,
                                   "code": rec.errors[obs]})
            rows.append(row)
        meta = _metadata(spec, kappa, columns, methods_by_column, curve, command)
        tables[curve] = ResultTable(columns, rows, meta, errors)
    return tables


def steady_table(cfg: RunConfig) -> ResultTable:
    """Single numeric steady-state record: populations, edges, fill and spectral gap."""
    spec = dataclasses.replace(cfg.spec, axes=(), family=None, methods=("numeric",))
    rec = evaluate_point(spec, {}, "numeric")
    columns = [f"{obs}_numeric" for obs in spec.observables] + ["spectral_gap_numeric"]
    row = [rec.values.get(obs) for obs in spec.observables]
    gap = rec.diagnostics.get("spectral_gap")
    row.append(_scale("spectral_gap", gap, cfg.kappa))
    errors = [{"index": 0, "coords": {}, "method": "numeric", "observable": obs, "code": code}
              for obs, code in sorted(rec.errors.items())]
    meta = _metadata(spec, cfg.kappa, columns, {c: "numeric" for c in columns}, "", "steady")
    meta["diagnostics"] = {k: v for k, v in sorted(rec.diagnostics.items()) if v is not None}
    return ResultTable(columns, [row], meta, errors)


def _curve_path(out: Path, curve: str) -> Path:
    return out if not curve else out.with_name(f"{out.stem}_{curve}{out.suffix}")


def _emit(tables: dict[str, ResultTable], out, fmt: str, stdout) -> list[Path]:
    if out is None:
        if len(tables) > 1:
            raise ConfigError("this run produces several curves; pass --out so each gets its own file")
        table = next(iter(tables.values()))
        stdout.write(table.to_json() if fmt == "json" else table.to_csv())
        return []
    out = Path(out)
    if out.suffix == "":
        out = out.with_suffix("." + fmt)
    out.parent.mkdir(parents=True, exist_ok=True)
    written = []
    for curve, table in tables.items():
        written += table.write(_curve_path(out, curve), fmt)
    return written


def _report_errors(tables: dict[str, ResultTable], stderr) -> int:
    errors = [dict(e, curve=c) for c, t in tables.items() for e in t.errors]
    for e in errors:
        stderr.write(json.dumps({"error": e["code"], "curve": e["curve"], "index": e["index"],
                                 "method": e["method"], "observable": e["observable"]}, sort_keys=True) + "\n")
    return EXIT_SOLVER if errors else EXIT_OK


def _resolve(args, defaults=None) -> RunConfig:
    if args.config is None:
        cfg = parse_config({"schema": SCHEMA_VERSION}, defaults)
    else:
        cfg = load_config(args.config, defaults)
    if args.n_max is not None:
        if args.n_max < 1:
            raise ConfigError(f"--n-max must be >= 1, got {args.n_max}")
        cfg = dataclasses.replace(cfg, spec=dataclasses.replace(cfg.spec, n_max=args.n_max))
    if args.out is not None:
        cfg = dataclasses.replace(cfg, out=args.out)
    if args.format is not None:
        cfg = dataclasses.replace(cfg, format=args.format)
    return cfg


def cmd_steady(args, stdout, stderr) -> int:
    cfg = _resolve(args, {"observables": list(STEADY_OBSERVABLES), "methods": ["numeric"]})
    tables = {"": steady_table(cfg)}
    _emit(tables, cfg.out, cfg.format, stdout)
    return _report_errors(tables, stderr)


def cmd_sweep(args, stdout, stderr) -> int:
    cfg = _resolve(args)
    if args.jobs < 1:
        raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
    tables = tables_from_sweep(run_sweep(cfg.spec, jobs=args.jobs), cfg.kappa)
    _emit(tables, cfg.out, cfg.format, stdout)
    return _report_errors(tables, stderr)


def cmd_preset(args, stdout, stderr) -> int:
    if args.name not in PRESETS:
        raise ConfigError(f"unknown preset {args.name!r}; choose from {sorted(PRESETS)}")
    spec = figure_preset(args.name)
    if args.n_max is not None:
        if args.n_max < 1:
            raise ConfigError(f"--n-max must be >= 1, got {args.n_max}")
        spec = dataclasses.replace(spec, n_max=args.n_max)
    if args.methods:
        spec = dataclasses.replace(spec, methods=tuple(args.methods))
    if args.jobs < 1:
        raise ConfigError(f"--jobs must be >= 1, got {args.jobs}")
    if args.name in PRESET_NOTES:
        stderr.write(f"note: {PRESET_NOTES[args.name]}\n")
    fmt = args.format or "csv"
    out = args.out if args.out is not None else f"{args.name}.{fmt}"
    tables = tables_from_sweep(run_sweep(spec, jobs=args.jobs), command=f"preset {args.name}")
    for path in _emit(tables, out, fmt, stdout):
        stderr.write(f"wrote {path}\n")
    return _report_errors(tables, stderr)


def cmd_validate(args, stdout, stderr) -> int:
    from .validation import run_all

    results = run_all(seed=args.seed, tolerance_scale=args.tolerance_scale)
    failed = 0
    for check, passed, detail in results:
        if check.kind == "finding":
            status = "NOTE" if not passed else "ok"
        else:
            status = "PASS" if passed else "FAIL"
            failed += not passed
        stdout.write(f"{status:4s}  [{check.module}] {check.name}: {detail}\n")
    total = sum(c.kind != "finding" for c, _, _ in results)
    stdout.write(f"{total - failed}/{total} properties pass (backend: {kernels.BACKEND})\n")
    return EXIT_VALIDATION if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dualcavity", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def io_flags(p, config=True):
        if config:
            p.add_argument("--config", help="JSON config file (requires \"schema\": 1)")
        p.add_argument("--out", help="output file; curves get a _<label> suffix")
        p.add_argument("--format", choices=("csv", "json"), help="output format (default csv)")
        p.add_argument("--n-max", type=int, dest="n_max", help="resonator Fock truncation")

    p = sub.add_parser("steady", help="numeric steady state at one parameter point")
    io_flags(p)
    p.set_defaults(func=cmd_steady)

    p = sub.add_parser("sweep", help="parameter sweep described by a config")
    io_flags(p)
    p.add_argument("--jobs", type=int, default=1, help="worker threads (default 1)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("preset", help="sweep reproducing a named figure panel")
    p.add_argument("name", help=f"one of {', '.join(sorted(PRESETS))}")
    io_flags(p, config=False)
    p.add_argument("--methods", nargs="+", choices=("analytic", "numeric"))
    p.add_argument("--jobs", type=int, default=1, help="worker threads (default 1)")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("validate", help="run the invariant suite")
    p.add_argument("--seed", type=int, default=20240601)
    # test hook: a scale of 0 makes every tolerance-based property fail
    p.add_argument("--tolerance-scale", type=float, default=1.0, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args, stdout, stderr)
    except ConfigError as exc:
        stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return EXIT_CONFIG
    except DualCavityError as exc:
        stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
