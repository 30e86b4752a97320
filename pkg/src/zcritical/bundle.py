"""Unitary connections on model bundles over flat tori.

The model bundle is ``L x C^r`` where ``L`` is the product of line bundles of
degree ``d_a`` on the elliptic factors, equipped with its constant-curvature
reference connection.  The reference curvature is central,
``F_ref = -2 pi i sum_a d_a dx_a ^ dy_a (x) Id``, so a connection is stored as the
perturbation ``a`` (a skew-Hermitian matrix-valued 1-form) and

    F_A = F_ref + da + a ^ a,    D_A e = de + [a, e].

Forms use the complex generators ``dz^1..dz^n, dzbar^1..dzbar^n`` of the base
geometry; ``Im(B) = (B - B^*) / 2i`` for endomorphisms.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .charge import evaluate_charge, hym_charge, hym_slope, phase, torus_line_bundle_topology
from .errors import NonConvergence, PhaseCollapse, ZeroCharge
from .forms import Form

logger = logging.getLogger(__name__)


def im_endo(b):
    """Hermitian part of ``-i B``: ``(B - B^*) / 2i``."""
    return (b - np.conj(np.swapaxes(b, -1, -2))) / 2j


def _dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


class BundleModel:
    """``L_{d_1} x ... x L_{d_n} (x) C^rank`` over a torus geometry."""

    def __init__(self, geom, rank=1, degrees=None):
        if geom.backend != "torus":
            raise ValueError("bundle models are implemented over torus geometries")
        if rank not in (1, 2):
            raise ValueError("rank must be 1 or 2")
        self.geom = geom
        self.n = geom.n
        self.rank = rank
        self.degrees = tuple(int(d) for d in (degrees or [0] * self.n))
        if len(self.degrees) != self.n:
            raise ValueError("need one degree per elliptic factor")
        self.topology = torus_line_bundle_topology(
            self.n, list(self.degrees), [Fraction(a) for a in geom.areas], rank)
        n = self.n
        eye = np.eye(rank, dtype=complex)
        # dx ^ dy = (i/2) dz ^ dzbar
        comps = {(a, n + a): (-2j * math.pi * self.degrees[a] * 0.5j) * eye for a in range(n)}
        self.reference_curvature = Form(2 * n, comps, rank)

    @property
    def field_shape(self):
        return self.geom.field_shape

    def identity(self):
        return np.broadcast_to(np.eye(self.rank, dtype=complex), self.field_shape + (self.rank, self.rank))

    def one_form(self, components):
        """Complex-generator 1-form from real components ``[a_x1, a_y1, a_x2, a_y2, ...]``."""
        n = self.n
        comps = {}
        for a in range(n):
            ax = np.asarray(components[2 * a], dtype=complex)
            ay = np.asarray(components[2 * a + 1], dtype=complex)
            comps[(a,)] = 0.5 * (ax - 1j * ay)
            comps[(n + a,)] = 0.5 * (ax + 1j * ay)
        return Form(2 * n, comps, self.rank)

    def real_components(self, form):
        """Inverse of :meth:`one_form`."""
        n = self.n
        out = []
        for a in range(n):
            cz, czb = form.component((a,)), form.component((n + a,))
            out += [cz + czb, 1j * (cz - czb)]
        return out

    def zero_connection(self):
        return ConnectionState(self, Form(2 * self.n, {}, self.rank))

    def potential_connection(self, s):
        """Rank-1 connection ``a = ds^{1,0} - ds^{0,1}`` with curvature ``F_ref - 2 ddbar s``."""
        if self.rank != 1:
            raise ValueError("potential connections are defined for line bundles")
        g, n = self.geom, self.n
        s = np.asarray(s, dtype=float)
        comps = {}
        for a in range(n):
            comps[(a,)] = g.d(s, a)[..., None, None]
            comps[(n + a,)] = -g.dbar(s, a)[..., None, None]
        return ConnectionState(self, Form(2 * n, comps, 1))


@dataclass
class ConnectionState:
    model: BundleModel
    perturbation: Form

    def __post_init__(self):
        a = self.perturbation
        if a.rank != self.model.rank or a.degrees() not in ([], [1]):
            raise ValueError("perturbation must be an End(E)-valued 1-form")
        n = self.model.n
        scale = max(1.0, a.sup_norm())
        r = self.model.rank
        for i in range(n):
            cz = np.broadcast_to(a.component((i,)), (r, r) if (i,) not in a.comps else a.comps[(i,)].shape)
            czb = a.component((n + i,))
            if np.max(np.abs(czb + _dagger(cz))) > 1e-10 * scale:
                raise ValueError("perturbation is not skew-Hermitian")

    def __add__(self, tangent):
        return ConnectionState(self.model, self.perturbation + tangent)


@dataclass
class GaugeElement:
    """Unitary field ``f``; ``algebra`` keeps the skew-Hermitian generator when known."""

    f: np.ndarray
    algebra: np.ndarray | None = None

    def __post_init__(self):
        eye = np.eye(self.f.shape[-1])
        if np.max(np.abs(_dagger(self.f) @ self.f - eye)) > 1e-10:
            raise ValueError("gauge element is not unitary")
        if self.algebra is not None and np.max(np.abs(self.algebra + _dagger(self.algebra))) > 1e-10:
            raise ValueError("gauge algebra element is not skew-Hermitian")

    @classmethod
    def exp(cls, e, t=1.0):
        """``exp(t e)`` for a skew-Hermitian field ``e`` via the eigenbasis of ``-i e``."""
        e = np.asarray(e, dtype=complex)
        vals, vecs = np.linalg.eigh(-1j * e)
        f = (vecs * np.exp(1j * t * vals)[..., None, :]) @ _dagger(vecs)
        return cls(f, e)


def curvature(conn):
    """F_A = F_ref + da + a ^ a (all form types, End-valued)."""
    model = conn.model
    a = conn.perturbation
    return model.reference_curvature + a.exterior(model.geom.partials()) + a.wedge(a)


def curvature_types(conn):
    """(2,0), (1,1) and (0,2) parts of the curvature."""
    n = conn.model.n
    f = curvature(conn)
    parts = {"20": {}, "11": {}, "02": {}}
    for key, val in f.comps.items():
        hol = sum(1 for i in key if i < n)
        parts[{2: "20", 1: "11", 0: "02"}[hol]][key] = val
    return {k: Form(2 * n, v, f.rank) for k, v in parts.items()}


def _theta_form(model, spec, m):
    return model.geom.omega.power(m).scale(complex(spec.theta(m)))


def z_tilde_bundle(conn, spec):
    """End(E)-valued function Z~(E, A) = (sum rho_j omega^j ^ ch~_k(F_A) ^ theta) / omega^n."""
    if spec.kind != "bundle":
        raise TypeError("z_tilde_bundle needs a bundle charge")
    model = conn.model
    geom = model.geom
    fa = curvature(conn).scale(1j / (2 * math.pi))
    total = 0
    powers = {}
    for term in spec.terms:
        k = term.chern_degree
        if k not in powers:
            powers[k] = fa.power(k).scale(1.0 / math.factorial(k))
        form = geom.omega.power(term.alpha_power).wedge(powers[k]).wedge(_theta_form(model, spec, term.theta_degree))
        total = total + complex(term.coefficient) * geom.ratio(form)
    return np.broadcast_to(total, model.field_shape + (model.rank, model.rank)).astype(complex)


def charge_value(model, spec):
    return evaluate_charge(spec, model.topology)


def trace_integral(conn, spec):
    """int tr Z~(E, A) omega^n, equal to Z(E) for every connection."""
    z = z_tilde_bundle(conn, spec)
    return conn.model.geom.integrate_function(np.trace(z, axis1=-2, axis2=-1))


def z_critical_residual(conn, spec):
    """Hermitian field Im(e^{-i phi(E)} Z~(E, A))."""
    phi = phase(charge_value(conn.model, spec))
    return im_endo(np.exp(-1j * phi) * z_tilde_bundle(conn, spec))


def hym_residual(conn):
    """(i / 2 pi) Lambda F_A - lambda Id, lambda = n deg / (rk vol)."""
    model = conn.model
    lam = hym_slope(model.topology)
    lf = model.geom.lambda_omega(curvature(conn))
    return 1j * lf / (2 * math.pi) - lam * model.identity()


def dhym_phase(model):
    """arg int tr (omega - F/2pi)^n = arg(n! i^n Z_dHYM(E))."""
    from .charge import dhym_charge

    z = evaluate_charge(dhym_charge(model.n), model.topology)
    return phase(math.factorial(model.n) * (1j ** model.n) * z)


def dhym_residual(conn):
    """Im(e^{-i phi'} (omega Id - F_A / 2pi)^n / omega^n) with phi' its topological phase.

    Equals ``n!`` times :func:`z_critical_residual` on the dHYM charge.
    """
    model = conn.model
    geom = model.geom
    form = (geom.omega - curvature(conn).scale(1 / (2 * math.pi))).power(model.n)
    b = geom.ratio(form)
    return im_endo(np.exp(-1j * dhym_phase(model)) * b)


# the Omega_Z pairing --------------------------------------------------------------

def _lift(form, shift=2):
    return Form(form.ngen + shift, {tuple(i + shift for i in k): v for k, v in form.comps.items()}, form.rank)


def omega_Z_geometric(conn, a, b, spec):
    """ds ^ dt coefficient of Omega_Z on the slice A + s a + t b.

    Fibre integral of ``Im(e^{-i phi}) sum rho_j omega^j ^ ch~_{k+1}(F_univ) ^ theta`` with
    ``F_univ = F_A + ds ^ a + dt ^ b`` and base forms written first.
    """
    model = conn.model
    geom = model.geom
    n = model.n
    phi = phase(charge_value(model, spec))
    ds = Form(2 * n + 2, {(0,): 1.0})
    dt = Form(2 * n + 2, {(1,): 1.0})
    fu = _lift(curvature(conn)) + ds.wedge(_lift(a)) + dt.wedge(_lift(b))
    fu = fu.scale(1j / (2 * math.pi))
    key = tuple(range(2 * n + 2))
    eta = 0
    for term in spec.terms:
        k = term.chern_degree + 1
        ch = fu.power(k).scale(1.0 / math.factorial(k)).trace()
        form = _lift(geom.omega.power(term.alpha_power)).wedge(ch).wedge(
            _lift(_theta_form(model, spec, term.theta_degree)))
        coeff = form.component(key)
        eta += complex(term.coefficient) * geom._top_factor * np.mean(coeff)
    return float(np.imag(np.exp(-1j * phi) * eta))


def omega_Z_pairing(conn, a, b, spec):
    """Omega_Z(a, b) in the normalization of the displayed HYM pairing.

    This is ``-1/2`` times :func:`omega_Z_geometric`; on the HYM charge of a degree-0
    bundle it equals ``-(1/8 pi^2) int tr(a ^ b) ^ omega^{n-1}``.
    """
    return -0.5 * omega_Z_geometric(conn, a, b, spec)


def omega_hym_closed_form(conn, a, b):
    """Second code path on the HYM charge: ``sin(phi) (-(1/8pi^2)) int tr(a ^ b) ^ omega^{n-1}``."""
    model = conn.model
    geom = model.geom
    phi = phase(charge_value(model, hym_charge(model.n)))
    form = a.wedge(b).trace().wedge(geom.omega.power(model.n - 1))
    return float(np.real(-math.sin(phi) * geom.integrate(form) / (8 * math.pi**2)))


def nu_pairing(conn, e, spec):
    """<nu(A), e> = -(i / 2 pi) int tr(e Im(e^{-i phi} Z~(E, A))) omega^n."""
    res = z_critical_residual(conn, spec)
    val = conn.model.geom.integrate_function(np.trace(np.asarray(e) @ res, axis1=-2, axis2=-1))
    return float(np.real(-1j * val / (2 * math.pi)))


# gauge action ------------------------------------------------------------------------

def gauge_act(f, conn):
    """f . A = f^{-1} o D_A o f, i.e. a -> f^{-1} a f + f^{-1} df (the reference is central)."""
    model = conn.model
    finv = _dagger(f.f)
    df = Form.function(2 * model.n, f.f, model.rank).exterior(model.geom.partials())
    a = conn.perturbation.matmul_left(finv).matmul_right(f.f) + df.matmul_left(finv)
    return ConnectionState(model, a)


def infinitesimal_gauge(e, conn):
    """v_e = D_A e = de + [a, e]."""
    model = conn.model
    e = np.asarray(e, dtype=complex)
    de = Form.function(2 * model.n, e, model.rank).exterior(model.geom.partials())
    a = conn.perturbation
    return de + a.matmul_right(e) - a.matmul_left(e)


# dHYM flow -------------------------------------------------------------------------

@dataclass
class FlowResult:
    state: ConnectionState
    potential: np.ndarray
    iterations: int
    trace: list = field(default_factory=list)


def _scalar_residual(model, s):
    return np.real(dhym_residual(model.potential_connection(s))[..., 0, 0])


def _linear_response(model):
    """Per-direction coefficients c_a with r(s) ~ r(0) + sum_a c_a L_a s, L_a the flat Laplacian in z_a."""
    geom = model.geom
    coords = geom.coords()
    base = _scalar_residual(model, np.zeros(geom.field_shape))
    out = []
    for a in range(model.n):
        probe = 1e-4 * np.cos(2 * np.pi * coords[2 * a])
        weights = [1.0 if b == a else 0.0 for b in range(model.n)]
        lap = np.real(geom.grid.apply(probe, geom.flat_laplacian_symbol(weights)))
        resp = _scalar_residual(model, probe) - base
        out.append(float(np.sum(resp * lap) / np.sum(lap**2)))
    return out


def solve_dhym_line_bundle(model, s0, dt=50.0, target=1e-8, max_iter=500, time_limit=None):
    """Semi-implicit flow for the dHYM equation on the potential of a line bundle.

    The linear response ``r ~ sum_a c_a L_a s`` of the residual is probed once; with
    ``sigma = sign(c)`` and ``L = sigma sum_a c_a L_a`` each step solves
    ``(1 - dt L) s_new = s + dt (sigma r(s) - L s)`` in Fourier space, a damped
    Newton-like iteration that is heat-like whatever the phase.
    """
    if model.rank != 1 or model.n > 2:
        raise ValueError("solver handles line bundles over T^2 and T^4")
    from .charge import dhym_charge

    spec = dhym_charge(model.n)
    try:
        z = charge_value(model, spec)
    except ZeroCharge as err:
        raise PhaseCollapse(str(err)) from err
    geom = model.geom
    coeffs = _linear_response(model)
    sigma = float(np.sign(coeffs[0]))
    if sigma == 0 or any(sigma * c <= 1e-12 for c in coeffs):
        raise NonConvergence(f"linearized dHYM operator is not elliptic (response {coeffs})", [])
    sym = geom.flat_laplacian_symbol([sigma * c for c in coeffs])
    s = np.array(s0, dtype=float)
    trace = []
    start = time.perf_counter()
    for it in range(max_iter + 1):
        conn = model.potential_connection(s)
        r = np.real(dhym_residual(conn)[..., 0, 0])
        drift = abs(trace_integral(conn, spec) - z)
        norm = float(np.max(np.abs(r)))
        trace.append({"iteration": it, "residual": norm, "drift": float(drift)})
        logger.debug("flow step %d residual %.3e", it, norm)
        if norm < target:
            return FlowResult(conn, s, it, trace)
        if time_limit is not None and time.perf_counter() - start > time_limit:
            break
        rhs = geom.grid.fft(s) + dt * (geom.grid.fft(sigma * r) - sym * geom.grid.fft(s))
        s = np.real(geom.grid.ifft(rhs / (1 - dt * sym)))
    raise NonConvergence(f"dHYM flow stalled at residual {trace[-1]['residual']:.3e}", trace)


def random_skew_field(n, size, rank, seed, modes=1, amplitude=0.05):
    """Seeded skew-Hermitian matrix field with low Fourier modes (zero mean per entry)."""
    from .kgeom.torus import random_potential

    rng = np.random.default_rng(seed)
    m = np.zeros((size,) * (2 * n) + (rank, rank), dtype=complex)
    for i in range(rank):
        for j in range(rank):
            s1, s2 = (int(v) for v in rng.integers(0, 2**31, size=2))
            m[..., i, j] = (random_potential(n, size, s1, modes, amplitude)
                            + 1j * random_potential(n, size, s2, modes, amplitude))
    return m - _dagger(m)


def random_tangent(model, seed, modes=1, amplitude=0.05):
    """Seeded skew-Hermitian 1-form, one independent field per real direction."""
    rng = np.random.default_rng(seed)
    seeds = rng.integers(0, 2**31, size=2 * model.n)
    comps = [random_skew_field(model.n, model.geom.size, model.rank, int(s), modes, amplitude) for s in seeds]
    return model.one_form(comps)
