import math

import numpy as np
import pytest

from zcritical import bundle as bnd
from zcritical import moment as mom
from zcritical.charge import csck_charge, dhym_charge, exp_charge, hym_charge
from zcritical.family import ProductFamily
from zcritical.kgeom import CP1ProfileGeometry, TorusGeometry, random_correction, random_potential

CP1S = [CP1ProfileGeometry(64, random_correction(s)) for s in range(3)]


def test_richardson_on_polynomial():
    est, order, vals = mom.richardson_derivative(lambda t: t**3 + 2 * t, 1.0, 0.1)
    assert est == pytest.approx(5.0, abs=1e-12)
    assert order == pytest.approx(2.0, abs=1e-6)
    est, order, _ = mom.richardson_derivative(lambda t: 3.0 * t, 1.0, 0.1)
    assert est == pytest.approx(3.0) and math.isnan(order)


def test_report_flags():
    rep = mom.VerificationReport("x", "anchor", {"sup": 1e-3}, 1e-2)
    assert rep.passed and rep.ok
    ctl = mom.VerificationReport("x", "anchor", {"sup": 1e-3}, 1e-2, expect_pass=False)
    assert ctl.passed and not ctl.ok
    d = rep.to_dict()
    assert set(d) == {"identity", "anchor", "norms", "tolerance", "metadata", "passed", "expect_pass", "ok"}


def test_equivariant_closed_samples(round_cp1):
    action = round_cp1.hamiltonian_for_field()
    sample = mom.cp1_omega_sample(round_cp1, action)
    assert mom.check_equivariant_closed(sample).passed
    assert mom.check_equivariant_closed(sample.wedge(sample)).passed
    broken = mom.cp1_omega_sample(round_cp1, action, scale=2.0)
    assert not mom.check_equivariant_closed(broken).passed
    ctl = mom.check_equivariant_closed(sample, corrupt=True)
    assert not ctl.passed and ctl.ok


@pytest.mark.parametrize("geom", [CP1ProfileGeometry(64)] + CP1S)
def test_curvature_moment_map(geom):
    action = geom.hamiltonian_for_field()
    assert mom.check_curvature_moment_map(geom, action, tol=1e-6).passed
    ctl = mom.check_curvature_moment_map(geom, action, corrupt=True)
    assert max(ctl.norms.values()) > 1e-2 and ctl.ok


def test_round_curvature_moment_map_tight(round_cp1):
    assert mom.check_curvature_moment_map(round_cp1, round_cp1.hamiltonian_for_field(), tol=1e-8).passed


def test_futaki():
    vals = mom.futaki_values(CP1S)
    assert max(abs(v) for v in vals) < 1e-8
    assert mom.check_futaki_constancy(CP1S).passed
    assert mom.check_futaki_constancy([CP1ProfileGeometry(64)]).passed
    ctl = mom.check_futaki_constancy(CP1S, corrupt=True)
    assert not ctl.passed and ctl.ok


def test_family_checks():
    fam = ProductFamily(0.05)
    rep = mom.check_family_moment_map(fam, csck_charge(1))
    assert rep.passed and all(abs(o - 2) < 0.1 for o in rep.metadata["observed_order"])
    assert rep.ok and mom.check_family_moment_map(fam, csck_charge(1), corrupt=True).ok
    assert mom.check_family_two_paths(fam).passed


def test_topological_and_correction_checks(random_t4):
    assert mom.check_topological_invariance(random_t4, exp_charge(2)).passed
    geom = TorusGeometry(2, 24, random_potential(2, 24, 2, 1, 0.0005))
    for j in (0, 1):
        assert mom.check_correction_closed_form(geom, j).passed


def test_flat_and_constant_curvature():
    rep = mom.check_flat_critical(TorusGeometry(2, 8))
    # cscK and exp are nonzero on T^4, as are dhym and hym on the trivial bundle
    assert rep.passed and set(rep.norms) == {"cscK", "dhym", "exp", "hym"}
    models = [bnd.BundleModel(TorusGeometry(1, 8), 1, [2]), bnd.BundleModel(TorusGeometry(2, 8), 2, [1, 1])]
    assert mom.check_constant_curvature(models).passed


@pytest.mark.parametrize("n, rank, degrees, spec", [(1, 1, [1], hym_charge(1)), (1, 2, [1], hym_charge(1)),
                                                    (2, 1, [1, 0], dhym_charge(2)), (1, 2, [0], dhym_charge(1))])
def test_bundle_moment_map(n, rank, degrees, spec):
    model = bnd.BundleModel(TorusGeometry(n, 16 if n == 1 else 8), rank, degrees)
    size = model.geom.size
    conn = bnd.ConnectionState(model, bnd.random_tangent(model, 1))
    e = bnd.random_skew_field(n, size, rank, 2, amplitude=0.5)
    a = bnd.random_tangent(model, 3)
    rep = mom.check_bundle_moment_map(conn, e, a, spec)
    assert rep.passed, rep.norms
    ctl = mom.check_bundle_moment_map(conn, e, a, spec, corrupt=True)
    assert not ctl.passed and ctl.ok


def test_omega_two_paths_and_bundle_invariance():
    model = bnd.BundleModel(TorusGeometry(1, 16), 2, [1])
    conn = bnd.ConnectionState(model, bnd.random_tangent(model, 4))
    a, b = bnd.random_tangent(model, 5), bnd.random_tangent(model, 6)
    assert mom.check_omega_two_paths(conn, a, b).passed
    assert mom.check_bundle_invariance(conn, hym_charge(1)).passed


def test_equivariant_chern_weil_bundle():
    geom = TorusGeometry(1, 16)
    trivial = bnd.BundleModel(geom, 1, [0])
    const = 0.4j * np.ones(geom.field_shape + (1, 1))
    rep = mom.check_equivariant_chern_weil_bundle(trivial.zero_connection(), const)
    assert rep.passed
    y = geom.coords()[1]
    e = (1j * np.sin(2 * math.pi * y))[..., None, None]
    assert mom.check_equivariant_chern_weil_bundle(trivial.zero_connection(), e).passed
    model = bnd.BundleModel(geom, 2, [1])
    conn = bnd.ConnectionState(model, bnd.random_tangent(model, 8))
    e2 = bnd.random_skew_field(1, 16, 2, 9, amplitude=0.5)
    assert mom.check_equivariant_chern_weil_bundle(conn, e2).passed
    ctl = mom.check_equivariant_chern_weil_bundle(conn, e2, corrupt=True)
    assert not ctl.passed and ctl.ok
