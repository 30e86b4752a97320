"""Verification suites assembled from a run configuration."""

from __future__ import annotations

import math
import time

import numpy as np

from . import bundle as bnd
from . import moment as mom
from .charge import dhym_charge, hym_charge
from .family import ProductFamily
from .kgeom import TorusGeometry, random_potential

SUITES = ("manifold", "bundle", "family")


def _seeds(base, count):
    return [base + 1000 * k for k in range(count)]


def manifold_suite(cfg):
    reports = []
    sec = "manifold"
    spec = cfg.charge(cfg.get(sec, "invariance_charge"))
    geom_name = cfg.get(sec, "invariance_geometry")
    for s in _seeds(cfg.seed, cfg.get_int(sec, "invariance_samples")):
        rep = mom.check_topological_invariance(cfg.geometry(geom_name, s), spec)
        rep.metadata["seed"] = s
        reports.append(rep)

    geom_name = cfg.get(sec, "correction_geometry")
    for s in _seeds(cfg.seed + 1, cfg.get_int(sec, "correction_samples")):
        geom = cfg.geometry(geom_name, s)
        for j in range(geom.n):
            rep = mom.check_correction_closed_form(geom, j)
            rep.metadata["seed"] = s
            reports.append(rep)

    cp1 = cfg.get(sec, "cp1_geometry")
    members = [cfg.geometry(cp1, s) for s in _seeds(cfg.seed + 2, cfg.get_int(sec, "cp1_samples"))]
    for g in members:
        reports.append(mom.check_curvature_moment_map(g, g.hamiltonian_for_field()))
    reports.append(mom.check_curvature_moment_map(members[0], members[0].hamiltonian_for_field(), corrupt=True))
    reports.append(mom.check_futaki_constancy(members))
    reports.append(mom.check_futaki_constancy(members, corrupt=True))

    round_cp1 = cfg.geometry(cp1, flat=True)
    sample = mom.cp1_omega_sample(round_cp1, round_cp1.hamiltonian_for_field())
    reports.append(mom.check_equivariant_closed(sample))
    reports.append(mom.check_equivariant_closed(sample.wedge(sample)))
    reports.append(mom.check_equivariant_closed(sample, corrupt=True))

    for n in (1, 2):
        reports.append(mom.check_flat_critical(TorusGeometry(n, 8)))
    return reports


def bundle_suite(cfg):
    reports = []
    sec = "bundle"
    amp = cfg.get_float(sec, "tangent_amplitude", 0.05)
    step = cfg.get_float(sec, "step", 1e-2)
    t2 = cfg.geometry(cfg.get(sec, "hym_geometry"), flat=True)
    t4 = cfg.geometry(cfg.get(sec, "dhym_geometry"), flat=True)
    cases = [
        (bnd.BundleModel(t2, 1, [1]), hym_charge(1)),
        (bnd.BundleModel(t2, 2, [1]), hym_charge(1)),
        (bnd.BundleModel(t4, 1, [1, 0]), dhym_charge(2)),
    ]
    for i, (model, spec) in enumerate(cases):
        base = cfg.seed + 10 * i
        conn = bnd.ConnectionState(model, bnd.random_tangent(model, base, amplitude=amp))
        e = bnd.random_skew_field(model.n, model.geom.size, model.rank, base + 1, amplitude=10 * amp)
        a = bnd.random_tangent(model, base + 2, amplitude=amp)
        reports.append(mom.check_bundle_moment_map(conn, e, a, spec, step=step))
        reports.append(mom.check_bundle_invariance(conn, spec))
        if spec.name == "hym":
            b = bnd.random_tangent(model, base + 3, amplitude=amp)
            reports.append(mom.check_omega_two_paths(conn, a, b))
        reports.append(mom.check_equivariant_chern_weil_bundle(conn, e))
        if i == 1:
            reports.append(mom.check_equivariant_chern_weil_bundle(conn, e, corrupt=True))
    model, spec = cases[0]
    conn = bnd.ConnectionState(model, bnd.random_tangent(model, cfg.seed, amplitude=amp))
    e = bnd.random_skew_field(1, model.geom.size, 1, cfg.seed + 1, amplitude=10 * amp)
    reports.append(mom.check_bundle_moment_map(conn, e, bnd.random_tangent(model, cfg.seed + 2, amplitude=amp),
                                               spec, step=step, corrupt=True))

    # analytic pairing a = i dx, b = i dy on the unit square
    model = bnd.BundleModel(t2, 1, [0])
    one = np.ones(t2.field_shape + (1, 1), dtype=complex)
    a = model.one_form([1j * one, 0 * one])
    b = model.one_form([0 * one, 1j * one])
    val = bnd.omega_Z_pairing(model.zero_connection(), a, b, hym_charge(1))
    reports.append(mom._report("omega-analytic", "omega-pairing:hym", {"abs": abs(val - 1 / (8 * math.pi**2))},
                               1e-12, False, value=val))
    reports.append(mom.check_constant_curvature([
        bnd.BundleModel(TorusGeometry(1, 8), 1, [1]),
        bnd.BundleModel(TorusGeometry(1, 8), 2, [3]),
        bnd.BundleModel(TorusGeometry(2, 8), 1, [1, 2]),
        bnd.BundleModel(TorusGeometry(2, 8), 1, [0, 0]),
        bnd.BundleModel(TorusGeometry(2, 8), 2, [1, -1]),
    ]))
    reports.extend(solver_reports(cfg))
    return reports


def run_solver(cfg, which):
    sec = "solver"
    kw = dict(dt=cfg.get_float(sec, "dt", 50.0), target=cfg.get_float(sec, "target", 1e-8),
              max_iter=cfg.get_int(sec, "max_iter", 500))
    if which == "t2":
        grid = cfg.get_int(sec, "t2_grid")
        model = bnd.BundleModel(TorusGeometry(1, grid), 1, [cfg.get_int(sec, "t2_degree")])
        s0 = random_potential(1, grid, cfg.seed, cfg.get_int(sec, "t2_modes", 3), cfg.get_float(sec, "t2_amplitude"))
    else:
        grid = cfg.get_int(sec, "t4_grid")
        model = bnd.BundleModel(TorusGeometry(2, grid), 1, cfg.get_json(sec, "t4_degrees"))
        s0 = random_potential(2, grid, cfg.seed, 1, cfg.get_float(sec, "t4_amplitude"))
    start = time.perf_counter()
    result = bnd.solve_dhym_line_bundle(model, s0, **kw)
    return result, time.perf_counter() - start


def solver_reports(cfg):
    out = []
    for which in ("t2", "t4"):
        result, _ = run_solver(cfg, which)
        target = cfg.get_float("solver", "target", 1e-8)
        drift = max(row["drift"] for row in result.trace)
        out.append(mom._report("dhym-flow", f"dhym-flow:{which}", {"residual": result.trace[-1]["residual"]},
                               target, False, iterations=result.iterations))
        out.append(mom._report("dhym-flow-drift", f"dhym-flow:{which}", {"drift": drift}, 1e-8, False))
    return out


def family_suite(cfg):
    sec = "family"
    spec = cfg.charge(cfg.get(sec, "charge"))
    radii = tuple(cfg.get_json(sec, "radii"))
    step = cfg.get_float(sec, "step")
    family = ProductFamily(cfg.get_float(sec, "eps"), cfg.get_json(sec, "fibre_poly"))
    reports = [
        mom.check_family_moment_map(family, spec, radii, step),
        mom.check_family_moment_map(family, spec, radii, step, corrupt=True),
        mom.check_family_two_paths(family, radii),
    ]
    flat = ProductFamily(0.0)
    from .family import omega_Z_bb, sigma_Z

    worst = max(max(abs(sigma_Z(flat, r, spec)), abs(omega_Z_bb(flat, r, spec))) for r in radii)
    reports.append(mom._report("family-isotrivial", "finite-dimensional-manifold-moment-map:isotrivial",
                               {"abs": worst}, 1e-12, False))
    return reports


def run_suite(cfg, suite="all"):
    """Run a named suite; returns (reports, timings)."""
    names = SUITES if suite == "all" else (suite,)
    table = {"manifold": manifold_suite, "bundle": bundle_suite, "family": family_suite}
    reports, timings = [], {}
    for name in names:
        if name not in table:
            raise ValueError(f"unknown suite {name!r}")
        start = time.perf_counter()
        reports.extend(table[name](cfg))
        timings[name] = round(time.perf_counter() - start, 3)
    return reports, timings
