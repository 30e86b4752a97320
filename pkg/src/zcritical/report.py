"""Report serialization and plot-ready CSV output.

Reports are written with sorted keys and no timestamps so that equal inputs give
byte-identical files; wall-clock data goes to a separate metadata file.
"""

from __future__ import annotations

import csv
import json
import os
import platform
import time

import numpy as np

SCHEMA_VERSION = "1.0"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def reports_document(reports, seed, suite):
    return {
        "schema_version": SCHEMA_VERSION,
        "seed": seed,
        "suite": suite,
        "all_ok": all(r.ok for r in reports),
        "reports": [_clean(r.to_dict()) for r in reports],
    }


def write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_clean(doc), fh, sort_keys=True, indent=2)
        fh.write("\n")


def write_reports(reports, out_dir, seed, suite, timings=None):
    """Write reports.json, metadata.json and summary.txt; returns the reports path."""
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, "reports.json")
    write_json(path, reports_document(reports, seed, suite))
    meta = {
        "schema_version": SCHEMA_VERSION,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "timings_s": timings or {},
    }
    write_json(os.path.join(out_dir, "metadata.json"), meta)
    with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
        fh.write(summary_table(reports))
    return path


def summary_table(reports):
    rows = []
    for r in reports:
        worst = max(r.norms.values()) if r.norms else 0.0
        status = "ok" if r.ok else "FAIL"
        expect = "pass" if r.expect_pass else "fail"
        rows.append(f"{status:4}  {r.identity:45} worst={worst:.3e} tol={r.tolerance:.1e} expect={expect}")
    n_ok = sum(r.ok for r in reports)
    rows.append(f"{n_ok}/{len(reports)} reports as expected")
    return "\n".join(rows) + "\n"


def summary_from_document(doc):
    rows = []
    for r in doc["reports"]:
        worst = max(r["norms"].values()) if r["norms"] else 0.0
        rows.append(f"{'ok' if r['ok'] else 'FAIL':4}  {r['identity']:45} worst={worst:.3e} tol={r['tolerance']:.1e}")
    rows.append(f"schema {doc['schema_version']}, seed {doc['seed']}, all_ok={doc['all_ok']}")
    return "\n".join(rows) + "\n"


def emit_plot_data(field, path, coords=None, names=None):
    """Write a sampled field as CSV, one row per grid point in C order.

    ``coords`` is a list of coordinate arrays broadcastable to the field shape
    (for example ``geom.coords()``); complex fields get ``re`` and ``im`` columns.
    An empty field produces a header-only file.
    """
    field = np.asarray(field)
    ndim = len(coords) if coords is not None else field.ndim
    names = list(names) if names else [f"x{i}" for i in range(ndim)]
    is_complex = np.iscomplexobj(field)
    header = names + (["re", "im"] if is_complex else ["value"])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        if field.size == 0:
            return path
        if coords is None:
            grids = np.meshgrid(*[np.arange(s) for s in field.shape], indexing="ij")
        else:
            grids = [np.broadcast_to(c, field.shape) for c in coords]
        cols = [g.ravel() for g in grids]
        flat = field.ravel()
        for i in range(flat.size):
            row = [repr(float(c[i])) for c in cols]
            if is_complex:
                row += [repr(float(flat[i].real)), repr(float(flat[i].imag))]
            else:
                row.append(repr(float(flat[i])))
            writer.writerow(row)
    return path


def emit_trace(trace, path):
    """Convergence trace (list of dicts with equal keys) as CSV."""
    keys = sorted(trace[0]) if trace else ["iteration"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(keys)
        for row in trace:
            writer.writerow([repr(row[k]) for k in keys])
    return path
