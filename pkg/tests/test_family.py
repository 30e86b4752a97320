import math

import numpy as np
import pytest

from zcritical.charge import csck_charge, exp_charge
from zcritical.errors import NotPositive
from zcritical.family import (ProductFamily, csck_wp_factor, omega_Z_bb, sigma_Z, weil_petersson_bb,
                              z_tilde_fibre)
from zcritical.moment import richardson_derivative

FAMILY = ProductFamily(0.05)


@pytest.mark.parametrize("r", [0.1, 0.5, 1.3])
def test_hamiltonian_self_check(r):
    assert FAMILY.moment_residual(r) < 1e-12


def test_isotrivial_family_is_zero():
    flat = ProductFamily(0.0)
    for r in (0.3, 0.7):
        assert sigma_Z(flat, r, csck_charge(1)) == pytest.approx(0, abs=1e-14)
        assert omega_Z_bb(flat, r, csck_charge(1)) == pytest.approx(0, abs=1e-14)


@pytest.mark.parametrize("r", [0.2, 0.6, 1.0])
def test_fibre_volume_and_gauss_bonnet(r):
    data = FAMILY.ray(r)
    assert FAMILY.fibre_function_integral(np.ones_like(data.m), data) == pytest.approx(4 * math.pi, abs=1e-12)
    assert FAMILY.fibre_function_integral(data.scalar, data) == pytest.approx(2, abs=1e-9)


def test_fibre_csck_is_not_trivial():
    data = FAMILY.ray(0.5)
    assert np.ptp(data.scalar) > 1e-3
    z = z_tilde_fibre(data, csck_charge(1))
    assert np.allclose(z, 1j - data.scalar)


@pytest.mark.parametrize("spec", [csck_charge(1), exp_charge(1)])
def test_moment_map_identity(spec):
    for r in (0.3, 0.5, 0.7):
        est, order, _ = richardson_derivative(lambda t: sigma_Z(FAMILY, t, spec), r, 0.02)
        rhs = 2 * r * omega_Z_bb(FAMILY, r, spec)
        assert abs(est - rhs) < 1e-4 * abs(rhs)
        assert order == pytest.approx(2, abs=0.1)


def test_weil_petersson_path():
    c = csck_wp_factor(FAMILY)
    assert c < 0
    for r in (0.3, 0.9):
        wp = weil_petersson_bb(FAMILY, r)
        assert omega_Z_bb(FAMILY, r, csck_charge(1)) == pytest.approx(c * wp, rel=1e-10)


def test_family_errors():
    with pytest.raises(ValueError):
        FAMILY.ray(0.0)
    with pytest.raises(NotPositive):
        ProductFamily(5.0).ray(0.1)
    from zcritical.charge import exp_charge as ec
    with pytest.raises(ValueError):
        sigma_Z(FAMILY, 0.5, ec(2))
