"""Numerical certificates for the moment-map identities on the model geometries.

Each ``check_*`` returns a :class:`VerificationReport`.  Finite-difference checks
use central differences at three halving steps, record the observed order and
compare the Richardson-extrapolated value.  Every check accepts ``corrupt=True``,
which applies a deliberate defect that must make it fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import bundle as bnd
from . import family as fam
from .charge import average_scalar, builtin_charges, evaluate_charge
from .errors import ZeroCharge
from .forms import Form
from .zkahler import correction_term, geometry_topology, laplacian_closed_form, z_tilde_manifold


@dataclass
class VerificationReport:
    identity: str
    anchor: str
    norms: dict
    tolerance: float
    metadata: dict = field(default_factory=dict)
    expect_pass: bool = True

    @property
    def passed(self):
        return all(v <= self.tolerance for v in self.norms.values())

    @property
    def ok(self):
        """True when the outcome is the expected one (controls are expected to fail)."""
        return self.passed == self.expect_pass

    def to_dict(self):
        return {
            "identity": self.identity,
            "anchor": self.anchor,
            "norms": {k: float(v) for k, v in sorted(self.norms.items())},
            "tolerance": float(self.tolerance),
            "metadata": self.metadata,
            "passed": self.passed,
            "expect_pass": self.expect_pass,
            "ok": self.ok,
        }


def _report(identity, anchor, norms, tol, corrupt, **meta):
    name = identity + (" [control]" if corrupt else "")
    return VerificationReport(name, anchor, norms, tol, meta, expect_pass=not corrupt)


def central_difference(f, x0, h):
    return (f(x0 + h) - f(x0 - h)) / (2 * h)


def richardson_derivative(f, x0, h, levels=3):
    """Central differences at h, h/2, ... with one Richardson step on the last pair.

    Returns ``(estimate, observed_order, raw_values)``; the order is estimated from
    the last three raw values and is ``nan`` when the differences are at rounding level.
    """
    steps = [h / 2**k for k in range(levels)]
    vals = [central_difference(f, x0, s) for s in steps]
    estimate = (4 * vals[-1] - vals[-2]) / 3
    order = float("nan")
    if levels >= 3:
        d1 = float(np.max(np.abs(vals[-3] - vals[-2])))
        d2 = float(np.max(np.abs(vals[-2] - vals[-1])))
        if d2 > 0 and d1 > 0 and d2 > 1e-13 * max(1.0, float(np.max(np.abs(vals[-1])))):
            order = math.log2(d1 / d2)
    return estimate, order, vals


# equivariant forms -------------------------------------------------------------------

@dataclass
class EquivariantFormSample:
    """A mixed-degree form alpha(v) (e.g. omega + <mu, v>) with its generator data.

    ``vector`` gives the value of each generator 1-form on v; ``partials`` the
    derivative callables for the exterior derivative.
    """

    form: Form
    vector: tuple
    partials: list
    label: str = ""

    def wedge(self, other):
        return EquivariantFormSample(self.form.wedge(other.form), self.vector, self.partials,
                                     f"{self.label}^{other.label}")


def cp1_omega_sample(geom, action, scale=1.0):
    form = geom.omega_real + Form.function(2, scale * action.hamiltonian)
    return EquivariantFormSample(form, action.vector_field, geom.real_partials(), "omega+h")


def check_equivariant_closed(sample, corrupt=False, tol=1e-10):
    """sup |d(alpha(v)) + iota_v(alpha(v))|."""
    form = sample.form
    if corrupt:
        form = form + form.part(0)
    d_eq = form.exterior(sample.partials) + form.interior(sample.vector)
    return _report("equivariant-closed", "equivariant-closed:" + sample.label,
                   {"sup": d_eq.sup_norm()}, tol, corrupt)


# manifold checks ------------------------------------------------------------------------

def check_curvature_moment_map(geom, action, corrupt=False, tol=1e-6):
    """iota_v R + d(g^{-1} i dbar d h) = 0 in the one-dimensional reduction on CP^1."""
    h = -action.hamiltonian if corrupt else action.hamiltonian
    lhs, rhs = geom.curvature_moment_sides(h)
    diff = lhs - rhs
    return _report("curvature-moment-map", "curvature-moment-map",
                   {"sup": float(np.max(np.abs(diff))), "l2": float(np.sqrt(np.dot(geom.weights, np.abs(diff) ** 2)))},
                   tol, corrupt, nodes=geom.npts, self_check=action.residual)


def futaki_values(geoms, corrupt=False):
    out = []
    for g in geoms:
        action = g.hamiltonian_for_field()
        h = action.hamiltonian
        if corrupt:
            h = g.x**2 - g.integrate_function(g.x**2).real / g.volume
        shat = average_scalar(geometry_topology(g))
        out.append(g.integrate_function(h * (shat - g.scalar_curvature)).real)
    return out


def check_futaki_constancy(geoms, corrupt=False, tol=1e-8):
    """sigma_v = int h (Shat - S) omega is zero and equal across the family."""
    vals = futaki_values(geoms, corrupt)
    spread = max((abs(a - b) for a, b in combinations(vals, 2)), default=0.0)
    return _report("futaki-constancy", "scalar-curvature-moment-map:trivial-base",
                   {"max_abs": max(abs(v) for v in vals), "spread": spread}, tol, corrupt,
                   values=[float(v) for v in vals])


def check_family_moment_map(family, spec, radii=(0.3, 0.5, 0.7), step=0.02, corrupt=False, tol=1e-4):
    """d<sigma_Z, v> + iota_v Omega_Z = 0 on the disc, i.e. sigma'(r) = 2 r Omega_{b bbar}(r)."""
    sign = -1.0 if corrupt else 1.0
    lhs, rhs, orders = [], [], []
    for r in radii:
        est, order, _ = richardson_derivative(lambda t: sign * fam.sigma_Z(family, t, spec), r, step)
        lhs.append(est)
        orders.append(order)
        rhs.append(2 * r * fam.omega_Z_bb(family, r, spec))
    lhs, rhs = np.array(lhs), np.array(rhs)
    scale = max(float(np.max(np.abs(rhs))), 1e-300)
    rel = float(np.max(np.abs(lhs - rhs))) / scale if scale > 1e-300 else float(np.max(np.abs(lhs)))
    meta = {"radii": list(radii), "step": step, "observed_order": [round(o, 3) for o in orders],
            "lhs": lhs.tolist(), "rhs": rhs.tolist()}
    return _report("family-moment-map", "finite-dimensional-manifold-moment-map:" + (spec.name or "Z"),
                   {"relative": rel}, tol, corrupt, **meta)


def check_family_two_paths(family, radii=(0.3, 0.5, 0.7), tol=1e-10):
    """cscK charge through the general-Z pipeline vs the Weil-Petersson formula."""
    from .charge import csck_charge

    spec = csck_charge(1)
    c = fam.csck_wp_factor(family)
    diffs, scale = [], 0.0
    for r in radii:
        a = fam.omega_Z_bb(family, r, spec)
        b = c * fam.weil_petersson_bb(family, r)
        diffs.append(abs(a - b))
        scale = max(scale, abs(b))
    rel = max(diffs) / scale if scale > 0 else max(diffs)
    return _report("family-weil-petersson", "weil-petersson:csck", {"relative": rel}, tol, False, factor=c)


def check_topological_invariance(geom, spec, tol=1e-6):
    ev = z_tilde_manifold(geom, spec)
    return _report("topological-invariance", "z-tilde-integral:" + (spec.name or "Z"),
                   {"relative": ev.invariance_error}, tol, False, charge=[ev.charge.real, ev.charge.imag])


def check_correction_closed_form(geom, j, tol=1e-6):
    from .charge import ManifoldChargeTerm

    term = ManifoldChargeTerm(1.0, j, (1,) * (geom.n - j))
    diff = correction_term(geom, term) - laplacian_closed_form(geom, j)
    return _report("correction-closed-form", f"kahler-identities:j={j}",
                   {"sup": float(np.max(np.abs(diff)))}, tol, False, j=j)


def check_flat_critical(geom, tol=1e-12):
    """Flat torus: every built-in charge with nonzero value has vanishing residual."""
    norms = {}
    for name, spec in sorted(builtin_charges(geom.n).items()):
        try:
            if spec.kind == "manifold":
                norms[name] = float(np.max(np.abs(z_tilde_manifold(geom, spec).residual)))
            else:
                model = bnd.BundleModel(geom, 1)
                norms[name] = float(np.max(np.abs(bnd.z_critical_residual(model.zero_connection(), spec))))
        except ZeroCharge:
            continue
    return _report("flat-critical", "flat-torus", norms, tol, False)


def check_constant_curvature(models, tol=1e-10):
    norms = {}
    for model in models:
        conn = model.zero_connection()
        tag = f"n{model.n}-r{model.rank}-d{'_'.join(map(str, model.degrees))}"
        norms["hym:" + tag] = float(np.max(np.abs(bnd.hym_residual(conn))))
        norms["dhym:" + tag] = float(np.max(np.abs(bnd.dhym_residual(conn))))
    return _report("constant-curvature", "constant-curvature-connections", norms, tol, False)


# bundle checks -----------------------------------------------------------------------------

def check_bundle_moment_map(conn, e, a, spec, step=1e-2, corrupt=False, tol=1e-6):
    """d/dt <nu(A + t a), e> at t = 0 against -Omega_Z(v_e, a)."""
    sign = -1.0 if corrupt else 1.0

    def nu(t):
        return sign * bnd.nu_pairing(conn + a.scale(t), e, spec)

    est, order, vals = richardson_derivative(nu, 0.0, step)
    v_e = bnd.infinitesimal_gauge(e, conn)
    target = -bnd.omega_Z_geometric(conn, v_e, a, spec)
    rel = abs(est - target) / max(abs(target), 1e-300)
    m = conn.model
    return _report("bundle-moment-map", "connection-moment-map:" + (spec.name or "Z"), {"relative": rel}, tol, corrupt,
                   n=m.n, rank=m.rank, fd=est, pairing=target,
                   observed_order=None if math.isnan(order) else round(order, 3))


def check_omega_two_paths(conn, a, b, tol=1e-10):
    from .charge import hym_charge

    p1 = bnd.omega_Z_pairing(conn, a, b, hym_charge(conn.model.n))
    p2 = bnd.omega_hym_closed_form(conn, a, b)
    return _report("omega-two-paths", "omega-pairing:hym", {"abs": abs(p1 - p2)}, tol, False, values=[p1, p2])


def check_equivariant_chern_weil_bundle(conn, e, step=1e-3, corrupt=False, tol=1e-8):
    """Tangent of the gauge orbit t -> exp(t e) . A at t = 0 equals D_A e = iota_{v_e} F_univ."""
    model = conn.model
    keys = sorted(set(bnd.infinitesimal_gauge(e, conn).comps) | set(conn.perturbation.comps))

    def comp(t, key):
        return bnd.gauge_act(bnd.GaugeElement.exp(e, t), conn).perturbation.component(key)

    v_e = bnd.infinitesimal_gauge(e, conn)
    if corrupt:
        v_e = Form.function(2 * model.n, e, model.rank).exterior(model.geom.partials())
        if model.rank == 1:
            v_e = v_e.scale(2.0)
    worst, scale = 0.0, 0.0
    for key in keys:
        est, _, _ = richardson_derivative(lambda t: comp(t, key), 0.0, step)
        worst = max(worst, float(np.max(np.abs(est - v_e.component(key)))))
        scale = max(scale, float(np.max(np.abs(v_e.component(key)))))
    return _report("equivariant-chern-weil-bundle", "universal-connection-moment-map",
                   {"relative": worst / max(scale, 1e-300)}, tol, corrupt, rank=model.rank)


def check_bundle_invariance(conn, spec, tol=1e-10):
    z = evaluate_charge(spec, conn.model.topology)
    val = bnd.trace_integral(conn, spec)
    return _report("bundle-topological-invariance", "bundle-z-tilde-integral:" + (spec.name or "Z"),
                   {"relative": abs(val - z) / abs(z)}, tol, False)
