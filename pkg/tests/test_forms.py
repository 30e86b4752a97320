import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zcritical.forms import Form, basis_keys


def random_form(rng, ngen, degree, shape=(3,), rank=None):
    comps = {}
    for key in basis_keys(ngen, degree):
        extra = (rank, rank) if rank else ()
        comps[key] = rng.normal(size=shape + extra) + 1j * rng.normal(size=shape + extra)
    return Form(ngen, comps, rank)


def test_rejects_unsorted_keys():
    with pytest.raises(ValueError):
        Form(3, {(1, 0): 1.0})


def test_wedge_sign():
    dx, dy = Form(2, {(0,): 1.0}), Form(2, {(1,): 1.0})
    assert dx.wedge(dy).component((0, 1)) == 1
    assert dy.wedge(dx).component((0, 1)) == -1
    assert dx.wedge(dx).comps == {}


def test_power_zero_is_unit():
    f = Form(2, {(0, 1): 2.0})
    assert f.power(0).component(()) == 1
    e = Form(2, {(0, 1): np.eye(2)}, rank=2)
    assert np.array_equal(e.power(0).component(()), np.eye(2))


def test_end_valued_wedge_orders_matrices():
    a = np.array([[0, 1], [0, 0]], dtype=complex)
    b = np.array([[0, 0], [1, 0]], dtype=complex)
    fa, fb = Form(2, {(0,): a}, 2), Form(2, {(1,): b}, 2)
    assert np.allclose(fa.wedge(fb).component((0, 1)), a @ b)
    assert np.allclose(fb.wedge(fa).component((0, 1)), -(b @ a))
    assert np.allclose(fa.wedge(fb).trace().component((0, 1)), 1)


def test_interior_of_area_form():
    area = Form(2, {(0, 1): 1.0})
    out = area.interior([0.0, 1.0])
    assert out.component((0,)) == -1


def test_exterior_of_function_on_grid():
    x = np.linspace(0, 1, 5)
    f = Form.function(2, x**2)
    df = f.exterior([lambda c: np.gradient(c, x, edge_order=2), None])
    assert np.allclose(df.component((0,)), 2 * x)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31), st.integers(0, 2), st.integers(0, 2))
def test_graded_commutativity(seed, p, q):
    rng = np.random.default_rng(seed)
    a, b = random_form(rng, 4, p), random_form(rng, 4, q)
    lhs, rhs = a.wedge(b), b.wedge(a).scale((-1) ** (p * q))
    assert (lhs - rhs).sup_norm() < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**31))
def test_associativity_and_leibniz_for_interior(seed):
    rng = np.random.default_rng(seed)
    a, b, c = random_form(rng, 4, 1), random_form(rng, 4, 2), random_form(rng, 4, 1)
    assert ((a.wedge(b)).wedge(c) - a.wedge(b.wedge(c))).sup_norm() < 1e-11
    v = [rng.normal(size=3) for _ in range(4)]
    lhs = a.wedge(b).interior(v)
    rhs = a.interior(v).wedge(b) - a.wedge(b.interior(v))
    assert (lhs - rhs).sup_norm() < 1e-11


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**31))
def test_interior_squares_to_zero(seed):
    rng = np.random.default_rng(seed)
    f = random_form(rng, 4, 3)
    v = [rng.normal(size=3) for _ in range(4)]
    assert f.interior(v).interior(v).sup_norm() < 1e-12


def test_trace_and_conj_transpose():
    rng = np.random.default_rng(0)
    f = random_form(rng, 2, 1, rank=2)
    g = f.conj_transpose()
    assert np.allclose(g.component((0,)), np.conj(np.swapaxes(f.component((0,)), -1, -2)))
    assert np.allclose(f.trace().component((1,)), np.trace(f.component((1,)), axis1=-2, axis2=-1))


def test_scalar_promotes_in_sum():
    f = Form(2, {(): np.ones(3)})
    e = Form(2, {(): np.zeros((3, 2, 2))}, 2)
    s = e + f
    assert s.rank == 2 and np.allclose(s.component(()), np.broadcast_to(np.eye(2), (3, 2, 2)))
