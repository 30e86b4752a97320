"""Command-line front end.

    zcritical verify [--suite all|manifold|bundle|family]
    zcritical solve-dhym --model t2|t4
    zcritical charge eval --name dhym --model t2
    zcritical charge list [--dimension n]
    zcritical report [--out DIR]

Common flags: ``--config``, ``--seed``, ``--tol identity=value``, ``--out``, ``--grid``.
The exit status is 0 iff every selected report has its expected outcome.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import report as rep
from .charge import (builtin_charges, cp1_topology, evaluate_charge, lookup_charge, phase,
                     torus_line_bundle_topology, torus_topology)
from .config import RunConfig
from .errors import ConfigError, ZCriticalError
from .suites import SUITES, run_solver, run_suite

logger = logging.getLogger("zcritical")


def _common(p):
    p.add_argument("--config", help="INI configuration (default: packaged default.ini)")
    p.add_argument("--seed", type=int, help="override [run] seed")
    p.add_argument("--tol", action="append", default=[], metavar="IDENTITY=VALUE",
                   help="tolerance override for reports with this identity (repeatable)")
    p.add_argument("--out", help="output directory (default: [run] out)")
    p.add_argument("--grid", type=int, help="override the grid size of every torus geometry")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="zcritical", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run verification suites")
    p.add_argument("--suite", choices=("all",) + SUITES)
    p.add_argument("--jobs", type=int, default=1, help="suites run concurrently (default 1)")
    _common(p)
    for name in ("manifold", "bundle"):
        q = sub.add_parser(f"verify-{name}", help=f"shorthand for verify --suite {name}")
        q.add_argument("--jobs", type=int, default=1)
        q.set_defaults(suite=name)
        _common(q)

    p = sub.add_parser("solve-dhym", help="run the dHYM flow and write its convergence trace")
    p.add_argument("--model", choices=("t2", "t4"), default="t2")
    _common(p)

    p = sub.add_parser("charge", help="evaluate or list central charges")
    csub = p.add_subparsers(dest="action", required=True)
    q = csub.add_parser("eval")
    q.add_argument("--name", required=True)
    q.add_argument("--model", required=True, help="t2, t4, cp1 or a [geometry.*] name")
    q.add_argument("--degrees", help="JSON list of line bundle degrees (bundle charges)")
    _common(q)
    q = csub.add_parser("list")
    q.add_argument("--dimension", type=int, default=2)
    _common(q)

    p = sub.add_parser("report", help="print the summary of a written reports.json")
    _common(p)
    return parser


def load_config(args):
    cfg = RunConfig.load(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.grid is not None:
        cfg.grid_override = args.grid
    return cfg


def tolerance_overrides(cfg, flags):
    """[tolerances] entries, then --tol flags; keys are report identities."""
    out = {}
    if cfg.parser.has_section("tolerances"):
        for key in cfg.parser.options("tolerances"):
            out[key] = cfg.get_float("tolerances", key)
    for item in flags:
        key, sep, value = item.partition("=")
        try:
            if not sep:
                raise ValueError
            out[key.strip()] = float(value)
        except ValueError as err:
            raise ConfigError(f"bad --tol value {item!r} (expected identity=value)") from err
    return out


def apply_tolerances(reports, overrides):
    for r in reports:
        base = r.identity.removesuffix(" [control]")
        if base in overrides:
            r.tolerance = overrides[base]


def _out_dir(cfg, args):
    return args.out or cfg.get("run", "out", "zcritical-out")


def write_reports_csv(reports, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["identity", "anchor", "worst", "tolerance", "expect_pass", "passed", "ok"])
        for r in reports:
            worst = max(r.norms.values()) if r.norms else 0.0
            w.writerow([r.identity, r.anchor, repr(float(worst)), repr(float(r.tolerance)),
                        r.expect_pass, r.passed, r.ok])


def cmd_verify(args):
    cfg = load_config(args)
    suite = args.suite or cfg.get("run", "suite", "all")
    names = SUITES if suite == "all" else (suite,)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda name: run_suite(cfg, name), names))
    reports, timings = [], {}
    for reps_, t in results:
        reports.extend(reps_)
        timings.update(t)
    apply_tolerances(reports, tolerance_overrides(cfg, args.tol))
    out = _out_dir(cfg, args)
    rep.write_reports(reports, out, cfg.seed, suite, timings)
    write_reports_csv(reports, os.path.join(out, "reports.csv"))
    sys.stdout.write(rep.summary_table(reports))
    return 0 if all(r.ok for r in reports) else 1


def cmd_solve(args):
    cfg = load_config(args)
    start = time.perf_counter()
    result, _ = run_solver(cfg, args.model)
    elapsed = time.perf_counter() - start
    out = _out_dir(cfg, args)
    os.makedirs(out, exist_ok=True)
    rep.emit_trace(result.trace, os.path.join(out, f"dhym-{args.model}-trace.csv"))
    geom = result.state.model.geom
    from .bundle import dhym_residual

    resid = np.real(dhym_residual(result.state)[..., 0, 0])
    rep.emit_plot_data(result.potential, os.path.join(out, f"dhym-{args.model}-potential.csv"), geom.coords())
    rep.emit_plot_data(resid, os.path.join(out, f"dhym-{args.model}-residual.csv"), geom.coords())
    doc = {"schema_version": rep.SCHEMA_VERSION, "model": args.model, "seed": cfg.seed,
           "iterations": result.iterations, "final_residual": result.trace[-1]["residual"],
           "max_drift": max(row["drift"] for row in result.trace)}
    rep.write_json(os.path.join(out, f"dhym-{args.model}.json"), doc)
    rep.write_json(os.path.join(out, f"dhym-{args.model}-metadata.json"),
                   {"schema_version": rep.SCHEMA_VERSION, "timings_s": {"solve": round(elapsed, 3)}})
    print(f"converged in {result.iterations} iterations, residual {doc['final_residual']:.3e}, "
          f"drift {doc['max_drift']:.3e}")
    return 0


_MODELS = {"t2": ("torus", 1), "t4": ("torus", 2), "cp1": ("cp1", 1)}


def _format_complex(z):
    def part(v):
        return "0" if abs(v) < 1e-15 else f"{v:.12g}"

    re, im = part(z.real), part(z.imag)
    if im == "0":
        return re
    coeff = {"1": "", "-1": "-"}.get(im, im)
    if re == "0":
        return f"{coeff}i"
    sign = "+" if z.imag > 0 else "-"
    mag = part(abs(z.imag))
    return f"{re}{sign}{'' if mag == '1' else mag}i"


def cmd_charge(args):
    cfg = load_config(args)
    if args.action == "list":
        for name, spec in sorted(builtin_charges(args.dimension).items()):
            print(f"{name:6} {spec.kind:9} {len(spec.terms)} terms")
        return 0
    if args.model in _MODELS:
        backend, n = _MODELS[args.model]
    else:
        geom = cfg.geometry(args.model, flat=True)
        backend, n = geom.backend, geom.n
    try:
        spec = lookup_charge(args.name, n)
    except NameError:
        spec = cfg.charge(args.name)
    if spec.kind == "bundle":
        if backend != "torus":
            raise ConfigError(f"bundle charge {args.name!r} needs a torus model")
        try:
            degrees = json.loads(args.degrees) if args.degrees else [0] * n
        except json.JSONDecodeError as err:
            raise ConfigError(f"bad --degrees value {args.degrees!r}") from err
        topo = torus_line_bundle_topology(n, degrees)
    else:
        topo = torus_topology(n) if backend == "torus" else cp1_topology()
    z = evaluate_charge(spec, topo)
    ph = phase(z)
    print(f"Z = {_format_complex(z)}")
    print(f"phase = {ph:.12g} ({ph / math.pi:.12g} pi)")
    return 0


def cmd_report(args):
    cfg = load_config(args)
    path = os.path.join(_out_dir(cfg, args), "reports.json")
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}") from err
    sys.stdout.write(rep.summary_from_document(doc))
    return 0 if doc["all_ok"] else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handlers = {"verify": cmd_verify, "verify-manifold": cmd_verify, "verify-bundle": cmd_verify,
                "solve-dhym": cmd_solve, "charge": cmd_charge, "report": cmd_report}
    try:
        return handlers[args.command](args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except ZCriticalError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
