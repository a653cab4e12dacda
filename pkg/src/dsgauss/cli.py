"""Command-line interface: verify, classify, sweep and catalog listing.

Exit codes: 0 = success, 1 = usage or input-parsing error, 2 = geometric
validation failure.  Reports embed the differentiation mode and tolerance
used, numbers are serialized with 17 significant digits, and output files
are written atomically, so identical configurations produce byte-identical
output.

The environment variable DSGAUSS_THREADS (default 1) sets the worker
count used to evaluate sweep steps concurrently; all other computation is
deterministic and single-process.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import analyzer, catalog
from .analyzer import ClassificationError, classify
from .dsl import ParseError, SchemaError, SurfaceSpec, load_surface, sample_grid
from .geometry import (
    GeometryError,
    build_frames,
    codazzi_field,
    shape_fields,
)
from .ioutil import atomic_write, dumps_csv, dumps_json
from .minkowski import DegenerateFrame

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_GEOMETRY = 2

CODAZZI_TOL = {"jet": 1e-6, "fd": 1e-3}
GRAM_TOL = 1e-9
MEMBERSHIP_TOL = 1e-9
MAX_SKIP_FRACTION = 0.2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_param(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise UsageError(f"--param expects NAME=VALUE, got {text!r}")
    name, _, value = text.partition("=")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise UsageError(f"--param {name}: {value!r} is not a number") from None


def _parse_grid(text: str) -> tuple[int, int]:
    try:
        a, _, b = text.lower().partition("x")
        return int(a), int(b)
    except ValueError:
        raise UsageError(f"--grid expects NUxNV, got {text!r}") from None


def _resolve_surface(args) -> tuple[SurfaceSpec, str]:
    if (args.catalog is None) == (args.surface is None):
        raise UsageError("exactly one of --catalog or --surface is required")
    params = dict(args.param or [])
    if args.catalog is not None:
        spec = catalog.instantiate(args.catalog, params)
        surface_id = args.catalog
    else:
        try:
            with open(args.surface, "rb") as fh:
                spec = load_surface(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {args.surface}: {exc}") from None
        if params:
            raise UsageError("--param applies to catalog surfaces only")
        surface_id = os.path.basename(args.surface)
    if args.grid is not None:
        from dataclasses import replace

        spec = replace(spec, grid=args.grid)
    return spec, surface_id


def _emit(args, text: str):
    if args.out:
        atomic_write(args.out, text)
    else:
        sys.stdout.write(text)


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            continue
        else:
            out[key] = v
    return out


def cmd_verify(args) -> int:
    spec, surface_id = _resolve_surface(args)
    ff = build_frames(spec, mode=args.mode)
    n = ff.npoints
    member_max = float(np.nanmax(ff.membership_defect))
    if not np.isfinite(member_max):
        member_max = float("inf")
    reasons = [r for r in ff.reasons if r]
    n_notspace = sum(1 for r in reasons if r == "NotSpacelike")
    n_frame = sum(1 for r in reasons if r in ("DegenerateFrame", "FrameDiscontinuity", "NonFinite"))

    checks = [
        {
            "name": "membership",
            "value": member_max,
            "threshold": MEMBERSHIP_TOL,
            "pass": bool(member_max <= MEMBERSHIP_TOL),
            "error": None if member_max <= MEMBERSHIP_TOL else "NotInDeSitter",
        },
        {
            "name": "spacelike",
            "value": n_notspace,
            "threshold": 0,
            "pass": n_notspace == 0,
            "error": None if n_notspace == 0 else "NotSpacelike",
        },
    ]

    if ff.valid.any():
        m = ff.valid
        gram_max = float(ff.gram_defect[m].max())
        cod = codazzi_field(ff, shape_fields(ff))
        cod_max = float(cod[m].max())
        frame_ok = (n_frame <= MAX_SKIP_FRACTION * n) and gram_max <= GRAM_TOL
        checks.append(
            {
                "name": "frame",
                "value": gram_max,
                "threshold": GRAM_TOL,
                "pass": bool(frame_ok),
                "error": None if frame_ok else "DegenerateFrame",
            }
        )
        cod_tol = CODAZZI_TOL[args.mode]
        checks.append(
            {
                "name": "codazzi",
                "value": cod_max,
                "threshold": cod_tol,
                "pass": bool(cod_max <= cod_tol),
                "error": None if cod_max <= cod_tol else "CodazziViolation",
            }
        )
    else:
        checks.append(
            {"name": "frame", "value": None, "threshold": GRAM_TOL, "pass": False,
             "error": "DegenerateFrame"}
        )

    ok = all(c["pass"] for c in checks)
    report = {
        "surface": {"id": surface_id, "params": dict(sorted(spec.params.items()))},
        "grid": [spec.grid[0], spec.grid[1]],
        "mode": args.mode,
        "membership_defect": member_max,
        "checks": checks,
        "skipped_points": [
            {"u": float(ff.u[i]), "v": float(ff.v[i]), "reason": ff.reasons[i]}
            for i in np.nonzero(~ff.valid)[0]
        ],
        "pass": ok,
    }
    if args.format == "csv":
        flat = _flatten({"surface.id": surface_id, "mode": args.mode,
                         "membership_defect": member_max, "pass": ok})
        for c in checks:
            flat[f"check.{c['name']}.value"] = c["value"]
            flat[f"check.{c['name']}.pass"] = c["pass"]
        _emit(args, dumps_csv(list(flat), [list(flat.values())]))
    else:
        _emit(args, dumps_json(report))
    return EXIT_OK if ok else EXIT_GEOMETRY


def cmd_classify(args) -> int:
    spec, surface_id = _resolve_surface(args)
    report = classify(spec, mode=args.mode, tol=args.tol, surface_id=surface_id)
    doc = report.to_dict()
    if args.format == "csv":
        flat = _flatten(doc)
        _emit(args, dumps_csv(list(flat), [list(flat.values())]))
    else:
        _emit(args, dumps_json(doc))
    return EXIT_OK


SWEEP_COLUMNS = [
    "param",
    "K_mean",
    "K_std",
    "f_mean",
    "f_std",
    "lambda_or_nan",
    "residual_eigen_max",
    "quasi_minimal",
    "status",
]


def _sweep_row(name: str, pname: str, value: float, base_params: dict, args) -> list:
    params = dict(base_params)
    params[pname] = value
    try:
        spec = catalog.instantiate(name, params)
        if args.grid is not None:
            from dataclasses import replace

            spec = replace(spec, grid=args.grid)
        rep = classify(spec, mode=args.mode, tol=args.tol, surface_id=name)
    except catalog.ConstraintViolation as exc:
        return [value, None, None, None, None, float("nan"), None, None,
                f"skipped:{exc.inequality}"]
    except (ClassificationError, GeometryError, DegenerateFrame) as exc:
        return [value, None, None, None, None, float("nan"), None, None,
                f"skipped:{type(exc).__name__}"]
    a = rep.aggregates
    lam = rep.lam if rep.lam is not None else float("nan")
    return [
        value,
        a["K_mean"],
        a["K_std"],
        a["f_mean"],
        a["f_std"],
        lam,
        a["residual_eigen_max"],
        rep.quasi_minimal,
        "ok",
    ]


def cmd_sweep(args) -> int:
    if args.catalog is None:
        raise UsageError("sweep requires --catalog")
    entry = catalog.get(args.catalog)
    if args.sweep_param not in entry.param_names:
        raise UsageError(
            f"{args.catalog} has no parameter {args.sweep_param!r}; "
            f"available: {list(entry.param_names)}"
        )
    if args.steps < 1:
        raise UsageError("steps must be >= 1")
    base_params = dict(args.param or [])
    values = np.linspace(args.lo, args.hi, args.steps)

    workers = max(1, int(os.environ.get("DSGAUSS_THREADS", "1")))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(
                pool.map(
                    lambda v: _sweep_row(args.catalog, args.sweep_param, float(v), base_params, args),
                    values,
                )
            )
    else:
        rows = [_sweep_row(args.catalog, args.sweep_param, float(v), base_params, args) for v in values]

    if args.format == "json":
        _emit(args, dumps_json([dict(zip(SWEEP_COLUMNS, row)) for row in rows]))
    else:
        _emit(args, dumps_csv(SWEEP_COLUMNS, rows))
    return EXIT_OK


def cmd_catalog(args) -> int:
    entries = [catalog.get(name) for name in catalog.names()]
    if args.format == "json":
        payload = []
        for e in entries:
            payload.append(
                {
                    "name": e.name,
                    "description": e.description,
                    "params": dict(sorted(e.defaults.items())),
                    "constraints": [ineq for ineq, _ in e.constraints],
                    "expected": {
                        k: {"value": v, "provenance": prov} for k, (v, prov) in e.expected.items()
                    },
                }
            )
        _emit(args, dumps_json(payload))
    elif args.format == "csv":
        rows = []
        for e in entries:
            expected = "; ".join(f"{k}={v} [{prov}]" for k, (v, prov) in e.expected.items())
            constraints = "; ".join(ineq for ineq, _ in e.constraints)
            rows.append([e.name, e.description, str(dict(sorted(e.defaults.items()))),
                         constraints, expected])
        _emit(args, dumps_csv(["name", "description", "defaults", "constraints", "expected"], rows))
    else:
        lines = []
        for e in entries:
            lines.append(f"{e.name}: {e.description}")
            if e.param_names:
                defaults = ", ".join(f"{k}={v}" for k, v in sorted(e.defaults.items()))
                lines.append(f"  params: {defaults}")
            for ineq, _ in e.constraints:
                lines.append(f"  constraint: {ineq}")
            for k, (v, prov) in e.expected.items():
                lines.append(f"  expected {k}: {v} [{prov}]")
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="dsgauss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_input=True):
        if with_input:
            p.add_argument("--catalog", help="catalog surface name")
            p.add_argument("--surface", help="path to a surface JSON document")
            p.add_argument("--param", action="append", type=_parse_param, metavar="K=V",
                           help="catalog parameter (repeatable)")
            p.add_argument("--grid", type=_parse_grid, metavar="NUxNV",
                           help="override the sample grid")
        p.add_argument("--mode", choices=("jet", "fd"), default="jet",
                       help="differentiation mode (default jet)")
        p.add_argument("--tol", type=float, default=None,
                       help="verdict tolerance (default 1e-5 jet, 1e-3 fd)")
        p.add_argument("--out", help="output path (default stdout)")

    p_verify = sub.add_parser("verify", help="geometric validity checks")
    common(p_verify)
    p_verify.add_argument("--format", choices=("json", "csv"), default="json")
    p_verify.set_defaults(func=cmd_verify)

    p_classify = sub.add_parser("classify", help="full Gauss-map classification")
    common(p_classify)
    p_classify.add_argument("--format", choices=("json", "csv"), default="json")
    p_classify.set_defaults(func=cmd_classify)

    p_sweep = sub.add_parser("sweep", help="classify across a parameter range")
    common(p_sweep)
    p_sweep.add_argument("sweep_param", metavar="PARAM", help="parameter to sweep")
    p_sweep.add_argument("lo", type=float, metavar="MIN")
    p_sweep.add_argument("hi", type=float, metavar="MAX")
    p_sweep.add_argument("steps", type=int, metavar="STEPS")
    p_sweep.add_argument("--format", choices=("csv", "json"), default="csv")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cat = sub.add_parser("catalog", help="list built-in surfaces")
    common(p_cat, with_input=False)
    p_cat.add_argument("--format", choices=("text", "json", "csv"), default="text")
    p_cat.set_defaults(func=cmd_catalog)

    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.tol is not None and args.tol <= 0:
            raise UsageError("--tol must be positive")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, SchemaError, catalog.UnknownEntry, catalog.ConstraintViolation) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ClassificationError, GeometryError, DegenerateFrame) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
