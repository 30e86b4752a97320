"""S^1-invariant Kahler metrics on CP^1 in action-angle coordinates.

The symplectic form is fixed, ``omega = dx ^ dtheta`` on ``[-1, 1] x [0, 2 pi)``, and
the complex structure is encoded by a symplectic potential
``u = u_0 + c`` with the Guillemin reference
``u_0 = ((1 + x) log(1 + x) + (1 - x) log(1 - x)) / 2``.
Everything is expressed through ``psi = 1 / u'' = (1 - x^2) / m`` with
``m = 1 + (1 - x^2) c''``, which is smooth up to the poles.

Forms use the unitary frame ``theta = sqrt(g) dw`` (``w = u'(x) + i theta``), so
``omega = i theta ^ thetabar`` and all frame coefficients are regular at x = +-1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy.special import xlogy

from ..errors import NoHamiltonianAction, NotPositive
from ..forms import Form
from .lobatto import differentiation_matrix, lobatto_nodes


@dataclass(frozen=True)
class HamiltonianAction:
    """Hamiltonian data for a circle action: ``dh = -iota_v omega``.

    ``vector_field`` holds the components of v in the real coordinates of the
    backend, ``residual`` the sup-norm of ``dh + iota_v omega`` at construction.
    """

    generator: str
    vector_field: tuple
    hamiltonian: np.ndarray
    residual: float


class CP1ProfileGeometry:
    """Invariant Kahler metric on CP^1 from a Chebyshev-series correction of u_0.

    ``correction`` holds Chebyshev coefficients of ``c(x)``; only ``c''`` enters
    the geometry, so the first two entries are irrelevant.
    """

    backend = "cp1"
    n = 1

    def __init__(self, npts=64, correction=None):
        self.npts = npts
        self.x, self.weights = lobatto_nodes(npts)
        self.field_shape = (npts,)
        self.D = differentiation_matrix(self.x)
        self.correction = np.zeros(1) if correction is None else np.asarray(correction, dtype=float)
        self.m = self._m(self.x)
        bad = np.nonzero(self.m <= 0)[0]
        fine = np.linspace(-1, 1, 8 * npts + 1)
        if len(bad) or np.any(self._m(fine) <= 0):
            raise NotPositive("u'' is not positive on (-1, 1)", [float(self.x[i]) for i in bad])
        self.psi = (1 - self.x**2) / self.m

    def _m(self, x):
        c2 = cheb.chebval(x, cheb.chebder(self.correction, 2)) if len(self.correction) > 2 else 0.0 * x
        return 1 + (1 - x**2) * c2

    # sampled profile ---------------------------------------------------------------
    def dx(self, f):
        """d/dx on the Lobatto grid, acting on the leading axis."""
        return np.tensordot(self.D, np.asarray(f), axes=(1, 0))

    @cached_property
    def potential(self):
        """Samples of u = u_0 + c (finite at the poles)."""
        x = self.x
        u0 = 0.5 * (xlogy(1 + x, 1 + x) + xlogy(1 - x, 1 - x))
        return u0 + cheb.chebval(x, self.correction)

    @property
    def metric_profile(self):
        """g_{w wbar} = psi / 2 in the complex coordinate w = u' + i theta."""
        return self.psi / 2

    @cached_property
    def volume(self):
        return 4 * math.pi

    def coords(self):
        return [self.x]

    # frame forms -------------------------------------------------------------------
    @cached_property
    def g(self):
        return np.ones((self.npts, 1, 1), dtype=complex)

    @cached_property
    def omega(self):
        return Form(2, {(0, 1): 1j * np.ones(self.npts)})

    @cached_property
    def volume_form(self):
        return self.omega

    def ratio(self, form):
        top = form.top_coefficient()
        return -1j * np.asarray(top)

    def integrate_function(self, f):
        """Integral of ``f omega`` = 2 pi int f dx by Lobatto quadrature."""
        return complex(2 * math.pi * np.tensordot(self.weights, np.asarray(f), axes=(0, 0)))

    def integrate(self, form):
        return self.integrate_function(self.ratio(form))

    def lambda_omega(self, form):
        return self.ratio(form.part(2))

    # curvature ----------------------------------------------------------------------
    @cached_property
    def log_derivative_flux(self):
        """psi (log g)', assembled as -2x/m - psi m'/m to stay regular at the poles."""
        return -2 * self.x / self.m - self.psi * self.dx(self.m) / self.m

    @cached_property
    def curvature_profile(self):
        """R_{w wbar} / g_{w wbar} = -(psi (log g)')' / 2 (Gaussian curvature up to a factor)."""
        return -0.5 * self.dx(self.log_derivative_flux)

    @cached_property
    def curvature(self):
        return Form(2, {(0, 1): self.curvature_profile[:, None, None].astype(complex)}, rank=1)

    def chern_endo(self, k):
        if k == 0:
            return Form(2, {(): np.ones((self.npts, 1, 1), dtype=complex)}, rank=1)
        if k > 1:
            raise ValueError("k exceeds the complex dimension")
        return self.curvature.scale(1j / (2 * np.pi))

    def chern_weil_form(self, k):
        return self.chern_endo(k).trace()

    @cached_property
    def ricci_form(self):
        return self.chern_weil_form(1)

    @cached_property
    def scalar_curvature(self):
        """S = Lambda Ric via the curvature tensor."""
        return np.real(self.lambda_omega(self.ricci_form))

    @cached_property
    def abreu_scalar_curvature(self):
        """S = -psi'' / (4 pi), the symplectic-coordinate formula (independent code path)."""
        return -self.dx(self.dx(self.psi)) / (4 * math.pi)

    # operators -----------------------------------------------------------------------
    def laplacian(self, f):
        """Kahler Laplacian on invariant functions: (psi f')' / 2."""
        return 0.5 * self.dx(self.psi * self.dx(f))

    def flat_map(self, endo):
        return np.swapaxes(endo, -1, -2) @ self.g

    def sharp_pair(self, t_flat):
        return np.swapaxes(t_flat, -1, -2)

    def adjoint_d_star_dbar_star(self, t_flat):
        """In the unit frame on a curve this reduces to the Laplacian of the coefficient."""
        return self.laplacian(np.asarray(t_flat)[:, 0, 0])

    def hamiltonian_endo(self, h):
        """g^{-1} i dbar d h, a 1x1 endomorphism field."""
        return (0.5j * self.dx(self.psi * self.dx(h)))[:, None, None]

    def pairing(self, a_flat, b_flat):
        return np.einsum("...ac,...ac->...", self.sharp_pair(a_flat), b_flat)

    # Hamiltonian data ------------------------------------------------------------------
    @cached_property
    def omega_real(self):
        """omega = dx ^ dtheta over the real generators (dx, dtheta)."""
        return Form(2, {(0, 1): np.ones(self.npts)})

    def real_partials(self):
        return [self.dx, None]

    def hamiltonian_for_field(self, generator="rotation", hamiltonian=None):
        """Hamiltonian of d/dtheta; the default h = x already has zero mean."""
        if generator != "rotation":
            raise NoHamiltonianAction(f"no Hamiltonian known for generator {generator!r}")
        v = (0.0, 1.0)
        h = self.x.copy() if hamiltonian is None else np.asarray(hamiltonian, dtype=float)
        h = h - self.integrate_function(h).real / self.volume
        dh = Form.function(2, h).exterior(self.real_partials())
        resid = (dh + self.omega_real.interior(v)).sup_norm()
        return HamiltonianAction(generator, v, h, resid)

    def curvature_moment_sides(self, h):
        """dx-coefficients of iota_v R and -d(g^{-1} i dbar d h) for v = d/dtheta.

        iota_v R = 2 i R_{w wbar} dt = i (R/g) dx, since dt = dx / psi and g = psi / 2.
        """
        lhs = 1j * self.curvature_profile
        rhs = -self.dx(self.hamiltonian_endo(h)[:, 0, 0])
        return lhs, rhs


def random_correction(seed, degree=6, amplitude=0.5):
    """Seeded Chebyshev coefficients with |c''| small enough that m stays near 1."""
    rng = np.random.default_rng(seed)
    coeffs = np.zeros(degree + 1)
    for k in range(2, degree + 1):
        coeffs[k] = amplitude * rng.standard_normal() / k**4
    return coeffs
