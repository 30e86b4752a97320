"""Product families disc x CP^1 with a relatively Kahler form omega_0 + i ddbar Phi.

The fibre carries the complex coordinate ``w = t + i theta`` of the round metric
(``x = tanh t``, ``psi_0 = 1 - x^2``) and the base the disc coordinate ``b``.
``Phi = eps A(|b|) P(x)`` is invariant under the diagonal circle action
``(b, theta) -> (e^{i a} b, theta + a)``.  By invariance it suffices to work on the
ray ``b = r > 0``, where for invariant functions

    d_b F = F_r / 2,   d_b dbar_b F = (F_rr + F_r / r) / 4,
    d_b dbar_w F = psi_0 F_rx / 4,   d_w dbar_w F = psi_0 (psi_0 F_x)_x / 4.

Forms are written over ``[db, e, dbbar, ebar]`` with the unit fibre frame
``e = sqrt(psi_0 / 2) dw``, which keeps every coefficient regular at the poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .charge import cp1_topology, csck_charge, evaluate_charge, phase
from .errors import NotPositive
from .forms import Form
from .kgeom.lobatto import lobatto_nodes

_PSI0 = Polynomial([1.0, 0.0, -1.0])


def gaussian_profile(r, order):
    """Derivatives of A(r) = exp(-r^2)."""
    a = np.exp(-r * r)
    return [a, -2 * r * a, (4 * r * r - 2) * a][order]


@dataclass(frozen=True)
class RayData:
    """Everything needed at the base point b = r."""

    r: float
    omega: Form
    ricci: Form
    m: np.ndarray
    scalar: np.ndarray
    hamiltonian: np.ndarray


class ProductFamily:
    """Invariant relatively Kahler form on disc x CP^1.

    ``fibre_poly`` holds power-series coefficients of ``P(x)``; ``eps = 0`` is the
    isotrivial round family.
    """

    def __init__(self, eps=0.05, fibre_poly=(0.0, 0.0, 1.0, 0.3), npts=64, radial=gaussian_profile):
        self.eps = float(eps)
        self.P = Polynomial(fibre_poly)
        self.radial = radial
        self.x, self.weights = lobatto_nodes(npts)
        self.psi0 = _PSI0(self.x)
        self.s = np.sqrt(self.psi0 / 2)
        # m = 1 + (psi_0 Phi_x)_x / 2 = 1 + eps A(r) Q(x)
        self.Q = 0.5 * (_PSI0 * self.P.deriv()).deriv()
        self.topology = cp1_topology()

    def _poly(self, p, order=0):
        return (p.deriv(order) if order else p)(self.x)

    def _check_positive(self, r, m):
        bad = np.nonzero(m <= 0)[0]
        if len(bad):
            raise NotPositive(f"fibre metric degenerates at r={r}", [float(self.x[i]) for i in bad])

    def ray(self, r):
        """Forms and fibre data at b = r (r > 0)."""
        if r <= 0:
            raise ValueError("ray data need r > 0")
        eps, x, psi0, s = self.eps, self.x, self.psi0, self.s
        A = [eps * self.radial(r, k) for k in range(3)]
        P = [self._poly(self.P, k) for k in range(3)]
        Q = [self._poly(self.Q, k) for k in range(3)]
        m = 1 + A[0] * Q[0]
        self._check_positive(r, m)
        m_x, m_xx = A[0] * Q[1], A[0] * Q[2]
        m_r, m_rr, m_rx = A[1] * Q[0], A[2] * Q[0], A[1] * Q[1]

        g_bb = 0.25 * (A[2] + A[1] / r) * P[0]
        g_be = 0.25 * psi0 * A[1] * P[1] / np.where(s > 0, s, 1.0)
        g_be = np.where(s > 0, g_be, 0.0)
        omega = Form(4, {(0, 2): 1j * g_bb + 0 * x, (0, 3): 1j * g_be, (1, 2): 1j * g_be, (1, 3): 1j * m})

        # R = -ddbar log g_V with log g_V = log(psi_0 / 2) + log m
        L_r, L_x = m_r / m, m_x / m
        L_rr = m_rr / m - L_r**2
        L_rx = m_rx / m - L_r * L_x
        L_xx = m_xx / m - L_x**2
        R_bb = -0.25 * (L_rr + L_r / r)
        R_be = np.where(s > 0, -0.25 * psi0 * L_rx / np.where(s > 0, s, 1.0), 0.0)
        R_ee = 1 - 0.5 * (-2 * x * L_x + psi0 * L_xx)
        c = 1j / (2 * math.pi)
        ricci = Form(4, {(0, 2): c * R_bb, (0, 3): c * R_be, (1, 2): c * R_be, (1, 3): c * R_ee})

        scalar = R_ee / (2 * math.pi * m)
        phi_x, phi_r = A[0] * P[1], A[1] * P[0]
        h = x + 0.5 * psi0 * phi_x + 0.5 * r * phi_r
        return RayData(r, omega, ricci, m, scalar, h)

    def hamiltonian_gradient(self, r):
        """(h_r, h_x) on the ray, for the dh = -iota_v omega self-check."""
        eps, x, psi0 = self.eps, self.x, self.psi0
        A = [eps * self.radial(r, k) for k in range(3)]
        P = [self._poly(self.P, k) for k in range(3)]
        h_x = 1 + 0.5 * (-2 * x * A[0] * P[1] + psi0 * A[0] * P[2]) + 0.5 * r * A[1] * P[1]
        h_r = 0.5 * psi0 * A[1] * P[1] + 0.5 * A[1] * P[0] + 0.5 * r * A[2] * P[0]
        return h_r, h_x

    def moment_residual(self, r):
        """Sup-norm of dh + iota_v omega on the ray (frame components)."""
        data = self.ray(r)
        h_r, h_x = self.hamiltonian_gradient(r)
        # v: db -> i b, e -> i s, dbbar -> -i b, ebar -> -i s
        v = [1j * r, 1j * self.s, -1j * r, -1j * self.s]
        contraction = data.omega.interior(v)
        # d_b h = h_r / 2; d_w h = psi_0 h_x / 2, so the e-coefficient is psi_0 h_x / (2 s) = s h_x
        dh = Form(4, {(0,): 0.5 * h_r, (2,): 0.5 * h_r, (1,): self.s * h_x, (3,): self.s * h_x})
        return (dh + contraction).sup_norm()

    # fibre integrals ----------------------------------------------------------------
    def fibre_integral(self, form):
        """E with int_{X/B} form = i E db ^ dbbar (base forms written first)."""
        c = form.component((0, 1, 2, 3))
        return complex(2 * math.pi * np.dot(self.weights, np.broadcast_to(c, self.x.shape)))

    def fibre_function_integral(self, f, data):
        """int_{X_b} f omega_b = 2 pi int f m dx."""
        return complex(2 * math.pi * np.dot(self.weights, f * data.m))


def _ch_line(ricci, k):
    return ricci.power(k).scale(1.0 / math.factorial(k))


def _check_curve_spec(spec):
    if spec.kind != "manifold" or spec.dimension != 1:
        raise ValueError("family checks use manifold charges on curves (n = 1)")


def eta_Z(family, data, spec):
    """Fibre integral of sum a_jk omega^{j+1}/(j+1) ^ ch~_k(V) as E (eta = i E db ^ dbbar)."""
    _check_curve_spec(spec)
    total = 0j
    for term in spec.terms:
        form = data.omega.power(term.alpha_power + 1).scale(1.0 / (term.alpha_power + 1))
        for k in term.chern_multi_index:
            form = form.wedge(_ch_line(data.ricci, k))
        total += complex(term.coefficient) * family.fibre_integral(form)
    return total


def omega_Z_bb(family, r, spec):
    """Omega_{b bbar} with Omega_Z = i Omega_{b bbar} db ^ dbbar."""
    z = evaluate_charge(spec, family.topology)
    return float(np.imag(np.exp(-1j * phase(z)) * eta_Z(family, family.ray(r), spec)))


def z_tilde_fibre(data, spec):
    """Z~ on a fibre curve; the correction terms vanish for n = 1."""
    _check_curve_spec(spec)
    total = 0j
    for term in spec.terms:
        val = np.ones_like(data.m, dtype=complex)
        if term.chern_multi_index:
            if term.chern_multi_index != (1,):
                val = 0 * val
            else:
                val = data.scalar.astype(complex)
        total = total + complex(term.coefficient) * val
    return total


def sigma_Z(family, r, spec):
    """<sigma_Z(b), v> = int h Im(e^{-i phi} Z~) omega_b at b = r."""
    data = family.ray(r)
    z = evaluate_charge(spec, family.topology)
    integrand = data.hamiltonian * np.imag(np.exp(-1j * phase(z)) * z_tilde_fibre(data, spec))
    return float(np.real(family.fibre_function_integral(integrand, data)))


def weil_petersson_bb(family, r):
    """Coefficient of (Shat/2) int omega^2 - int rho ^ omega (cscK path, n = 1)."""
    data = family.ray(r)
    shat = 2.0 / float(family.topology.volume)
    e2 = family.fibre_integral(data.omega.wedge(data.omega))
    e1 = family.fibre_integral(data.ricci.wedge(data.omega))
    return float(np.real(0.5 * shat * e2 - e1))


def csck_wp_factor(family):
    """Omega_Z = c Omega_WP for the cscK charge on curves, c = -V / |Z|."""
    z = evaluate_charge(csck_charge(1), family.topology)
    return -float(family.topology.volume) / abs(z)
