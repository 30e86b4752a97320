"""The Z-critical Kahler operator assembled from a manifold central charge.

For a term ``a * alpha^j . ch_{k_1} ... ch_{k_r}`` the pointwise contribution is

    a * [ omega^j ^ ch~_{k_1} ^ ... ^ ch~_{k_r} / omega^n
          - (1 / 2 pi) sum_m d* dbar* (l~_m)^flat ]

where ``l~_m`` replaces ``ch~_{k_m}`` by the End-valued ``(iR/2pi)^{k_m - 1} / (k_m - 1)!``
and carries one extra ``omega / (j + 1)``.  The correction integrates to zero, so
``int Z~ omega^n`` is the topological charge Z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .charge import (
    ManifoldChargeTerm,
    average_scalar,
    cp1_topology,
    csck_charge,
    evaluate_charge,
    phase,
    torus_topology,
)
from .errors import DegreeMismatch


def geometry_topology(geom):
    """Topological model matching a geometry backend."""
    if geom.backend == "torus":
        return torus_topology(geom.n, [Fraction(a) for a in geom.areas])
    if geom.backend == "cp1":
        return cp1_topology(geom.volume)
    raise ValueError(f"unknown backend {geom.backend!r}")


def _check_term(geom, term):
    if not isinstance(term, ManifoldChargeTerm):
        raise TypeError("expected a ManifoldChargeTerm")
    if term.degree != geom.n:
        raise DegreeMismatch(f"term of degree {term.degree} on a {geom.n}-dimensional geometry")


def _wedge_all(forms):
    out = forms[0]
    for f in forms[1:]:
        out = out.wedge(f)
    return out


def chern_weil_term(geom, term):
    """``(omega^j ^ ch~_{k_1} ^ ... ^ ch~_{k_r}) / omega^n`` (coefficient not applied)."""
    _check_term(geom, term)
    forms = [geom.omega.power(term.alpha_power)] + [geom.chern_weil_form(k) for k in term.chern_multi_index]
    return geom.ratio(_wedge_all(forms))


def ell_endomorphism(geom, term, m):
    """The End(TX)-valued function l~_m for 1 <= m <= r."""
    _check_term(geom, term)
    ks = term.chern_multi_index
    if not 1 <= m <= len(ks):
        raise IndexError(f"m={m} outside 1..{len(ks)}")
    j = term.alpha_power
    forms = [geom.omega.power(j + 1)]
    forms += [geom.chern_weil_form(k) for i, k in enumerate(ks, start=1) if i != m]
    forms.append(geom.chern_endo(ks[m - 1] - 1))
    return geom.ratio(_wedge_all(forms)) / (j + 1)


def correction_term(geom, term):
    """``-(1/2pi) sum_m d* dbar* (l~_m)^flat`` (coefficient not applied)."""
    _check_term(geom, term)
    out = np.zeros(geom.field_shape, dtype=complex)
    for m in range(1, len(term.chern_multi_index) + 1):
        ell = ell_endomorphism(geom, term, m)
        out = out + geom.adjoint_d_star_dbar_star(geom.flat_map(ell))
    return -out / (2 * math.pi)


def laplacian_closed_form(geom, j):
    """Correction for alpha^j . c_1^{n-j} via the Kahler identities.

    Equals ``-(1/2pi) ((n-j)/(j+1)) Laplacian(omega^{j+1} ^ Ric^{n-j-1} / omega^n)``.
    """
    n = geom.n
    if not 0 <= j < n:
        raise DegreeMismatch("need 0 <= j < n")
    ric = geom.ricci_form
    f = geom.ratio(_wedge_all([geom.omega.power(j + 1), ric.power(n - j - 1)]))
    return -(n - j) / (j + 1) * geom.laplacian(f) / (2 * math.pi)


@dataclass
class ZKahlerEvaluation:
    z_tilde: np.ndarray
    phase_used: float
    residual: np.ndarray
    charge: complex
    integral: complex
    per_term: list = field(default_factory=list)

    @property
    def invariance_error(self):
        """Relative deviation of int Z~ omega^n from the topological charge."""
        return abs(self.integral - self.charge) / abs(self.charge)


def z_tilde_manifold(geom, spec, topo=None):
    """Evaluate Z~(X, omega) and its residual Im(e^{-i phi} Z~) on a geometry."""
    if spec.kind != "manifold":
        raise TypeError("z_tilde_manifold needs a manifold charge")
    if spec.dimension != geom.n:
        raise DegreeMismatch(f"charge of dimension {spec.dimension} on an n={geom.n} geometry")
    topo = topo or geometry_topology(geom)
    z = evaluate_charge(spec, topo)
    phi = phase(z)
    total = 0
    per_term = []
    for term in spec.terms:
        coeff = complex(term.coefficient)
        cw = coeff * chern_weil_term(geom, term)
        corr = coeff * correction_term(geom, term) if term.chern_multi_index else 0 * cw
        per_term.append((term, cw, corr))
        total = total + cw + corr
    total = np.broadcast_to(total, geom.field_shape).astype(complex)
    residual = np.imag(np.exp(-1j * phi) * total)
    return ZKahlerEvaluation(total, phi, residual, z, geom.integrate_function(total), per_term)


def csck_residual(geom, topo=None):
    """Shat - S(omega).

    On the cscK charge ``Z = i int alpha^n - int c_1 alpha^(n-1)`` this relates to the
    Z-critical residual by ``Im(e^{-i phi} Z~) = -(V / (n |Z|)) (Shat - S)``, V = int alpha^n.
    """
    topo = topo or geometry_topology(geom)
    return average_scalar(topo) - geom.scalar_curvature


def csck_normalization(geom, topo=None):
    """Factor c with Im(e^{-i phi} Z~_cscK) = c (Shat - S)."""
    topo = topo or geometry_topology(geom)
    z = evaluate_charge(csck_charge(geom.n), topo)
    return -float(topo.volume) / (geom.n * abs(z))
