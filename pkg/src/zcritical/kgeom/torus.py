"""Flat complex tori T^{2n} (n = 1, 2) with Kahler metrics omega_0 + i ddbar phi.

Real coordinates ``(x_1, y_1, ..., x_n, y_n)`` on the unit cube, complex
coordinates ``z_a = x_a + i y_a``, and forms written over the generators
``dz^1..dz^n, dzbar^1..dzbar^n``.  The metric matrix ``g[..., a, b]`` is the
coefficient ``g_{a bbar}`` in ``omega = i g_{a bbar} dz^a ^ dzbar^b``.
"""

from __future__ import annotations

import math
from functools import cached_property

import numpy as np

from ..errors import NoHamiltonianAction, NotPositive
from ..forms import Form
from .spectral import FourierGrid


def _swap(m):
    return np.swapaxes(m, -1, -2)


class TorusGeometry:
    """Kahler metric ``omega_0 + i ddbar phi`` on the product torus.

    ``areas[a]`` is the area of the a-th elliptic factor under omega_0, so
    ``int omega^n = n! prod(areas)``.  ``potential`` is a real periodic array on
    the grid (or ``None`` for the flat metric).
    """

    backend = "torus"

    def __init__(self, n, size, potential=None, areas=None):
        if n not in (1, 2):
            raise ValueError("torus backend supports complex dimension 1 or 2")
        self.n = n
        self.size = size
        self.grid = FourierGrid(2 * n, size)
        self.field_shape = self.grid.shape
        self.areas = tuple(float(a) for a in (areas or [1.0] * n))
        if potential is None:
            potential = np.zeros(self.grid.shape)
        potential = np.asarray(potential, dtype=float)
        if potential.shape != self.grid.shape:
            raise ValueError(f"potential has shape {potential.shape}, expected {self.grid.shape}")
        self.potential = potential
        self.g = self._metric()
        eig = np.linalg.eigvalsh(self.g)
        bad = np.argwhere(eig.min(axis=-1) <= 0)
        if len(bad):
            raise NotPositive(f"omega is not positive at {len(bad)} grid points", [tuple(p) for p in bad[:20]])

    # complex derivatives ------------------------------------------------------
    def _dir(self, a, bar):
        coeffs = [0.0] * (2 * self.n)
        coeffs[2 * a] = 0.5
        coeffs[2 * a + 1] = 0.5j if bar else -0.5j
        return coeffs

    def d(self, f, a):
        """Holomorphic derivative d/dz_a."""
        return self.grid.deriv(f, self._dir(a, False))

    def dbar(self, f, a):
        return self.grid.deriv(f, self._dir(a, True))

    def ddbar(self, f, a, b):
        """d^2 f / dz_a dzbar_b as one Fourier symbol product."""
        f = np.asarray(f, dtype=complex)
        sym = self.grid.symbol(self._dir(a, False), f.ndim) * self.grid.symbol(self._dir(b, True), f.ndim)
        return self.grid.apply(f, sym)

    def partials(self):
        """Partial-derivative callables matching the form generators."""
        return ([lambda f, a=a: self.d(f, a) for a in range(self.n)]
                + [lambda f, a=a: self.dbar(f, a) for a in range(self.n)])

    # metric ---------------------------------------------------------------------
    def _metric(self):
        n = self.n
        g = np.zeros(self.grid.shape + (n, n), dtype=complex)
        for a in range(n):
            g[..., a, a] += self.areas[a] / 2
            for b in range(n):
                g[..., a, b] += self.ddbar(self.potential, a, b)
        # exact Hermitian symmetry as stored
        return 0.5 * (g + np.conj(_swap(g)))

    @cached_property
    def g_inv(self):
        return np.linalg.inv(self.g)

    @cached_property
    def g_upper(self):
        """``g^{a bbar}`` arranged as ``[a, b]``."""
        return _swap(self.g_inv)

    @cached_property
    def det_g(self):
        return np.real(np.linalg.det(self.g))

    @cached_property
    def omega(self):
        n = self.n
        return Form(2 * n, {(a, n + b): 1j * self.g[..., a, b] for a in range(n) for b in range(n)})

    @cached_property
    def volume_form(self):
        return self.omega.power(self.n)

    @cached_property
    def volume(self):
        return math.factorial(self.n) * math.prod(self.areas)

    @cached_property
    def _top_factor(self):
        n = self.n
        return (-1) ** (n * (n - 1) // 2) * (-2j) ** n

    def ratio(self, form):
        """Top-degree part of ``form`` divided by omega^n, as a grid function (or End field)."""
        top = form.top_coefficient()
        vol = self.volume_form.top_coefficient()
        if form.rank:
            return top / vol[..., None, None]
        return top / vol

    def integrate(self, form):
        """Integral of the top-degree part of a scalar form over the torus."""
        return complex(self._top_factor * np.mean(form.top_coefficient()))

    def integrate_function(self, f):
        """Integral of ``f omega^n``."""
        return complex(np.mean(np.asarray(f) * self._density))

    @cached_property
    def _density(self):
        return np.real(self._top_factor * self.volume_form.top_coefficient())

    def lambda_omega(self, form):
        """Trace Lambda_omega of a (1,1)-form via n beta ^ omega^{n-1} / omega^n."""
        return self.n * self.ratio(form.part(2).wedge(self.omega.power(self.n - 1)))

    # curvature --------------------------------------------------------------------
    @cached_property
    def curvature(self):
        """Chern curvature of T^{1,0} as an End-valued (1,1)-form.

        With ``G = g^T`` (the matrix acting on holomorphic vector components),
        ``R_{e dbar} = -G^{-1} d_e dbar_d G + G^{-1} (dbar_d G) G^{-1} (d_e G)``.
        """
        n = self.n
        G = _swap(self.g)
        Gi = np.linalg.inv(G)
        dG = [self.d(G, e) for e in range(n)]
        dbG = [self.dbar(G, d) for d in range(n)]
        comps = {}
        for e in range(n):
            for d in range(n):
                second = self.ddbar(G, e, d)
                comps[(e, n + d)] = -Gi @ second + Gi @ dbG[d] @ Gi @ dG[e]
        return Form(2 * n, comps, rank=n)

    def chern_weil_form(self, k):
        """tr((1/k!) (i R / 2 pi)^k); k = 0 gives the constant n."""
        if k > self.n:
            raise ValueError("k exceeds the complex dimension")
        return self.chern_endo(k).trace()

    def chern_endo(self, k):
        """(1/k!) (i R / 2 pi)^k as an End-valued form (cached per k)."""
        cache = self.__dict__.setdefault("_chern_cache", {})
        if k not in cache:
            if k == 0:
                eye = np.broadcast_to(np.eye(self.n, dtype=complex), self.grid.shape + (self.n, self.n))
                cache[k] = Form(2 * self.n, {(): eye}, rank=self.n)
            else:
                cache[k] = self.curvature.scale(1j / (2 * np.pi)).power(k).scale(1.0 / math.factorial(k))
        return cache[k]

    @cached_property
    def ricci_form(self):
        return self.chern_weil_form(1)

    @cached_property
    def scalar_curvature(self):
        return np.real(self.lambda_omega(self.ricci_form))

    # operators ----------------------------------------------------------------------
    def laplacian(self, f):
        """Kahler Laplacian g^{a bbar} d_a dbar_b f (nonpositive)."""
        out = 0
        for a in range(self.n):
            for b in range(self.n):
                out = out + self.g_upper[..., a, b] * self.ddbar(f, a, b)
        return out

    def flat_laplacian_symbol(self, weights=None, arr_ndim=None):
        """Fourier symbol of the omega_0-Laplacian, optionally reweighted per complex direction."""
        arr_ndim = arr_ndim or 2 * self.n
        weights = weights if weights is not None else [1.0] * self.n
        sym = 0
        for a in range(self.n):
            sym = sym + weights[a] * (2 / self.areas[a]) * (self.grid.symbol(self._dir(a, False), arr_ndim)
                                                            * self.grid.symbol(self._dir(a, True), arr_ndim))
        return sym

    def flat_map(self, endo):
        """Lower the vector index: ``A_flat[b, e] = g_{a ebar} A^a_b``."""
        return _swap(endo) @ self.g

    def sharp_pair(self, t_flat):
        """Raise both indices of a flattened tensor: ``U^{a cbar} = g^{a ebar} T_{b ebar} g^{b cbar}``."""
        gu = self.g_upper
        return gu @ _swap(t_flat) @ gu

    def adjoint_d_star_dbar_star(self, t_flat):
        """d* dbar* of a section of T*^{1,0} x T*^{0,1}, as a function.

        Computed in divergence form ``det(g)^{-1} d_a dbar_c (det(g) U^{a cbar})``,
        which is the formal adjoint fixed by
        ``int h * i d*dbar*(A_flat) omega^n = int <A_flat, i dbar d h> omega^n``.
        """
        rho = self.det_g
        u = self.sharp_pair(t_flat)
        out = 0
        for a in range(self.n):
            for c in range(self.n):
                out = out + self.ddbar(rho * u[..., a, c], a, c)
        return out / rho

    def hamiltonian_endo(self, h):
        """g^{-1} i dbar d h as an endomorphism: ``H^a_c = i g^{a bbar} dbar_b d_c h``."""
        n = self.n
        hess = np.empty(self.grid.shape + (n, n), dtype=complex)
        for b in range(n):
            for c in range(n):
                hess[..., b, c] = self.ddbar(h, c, b)
        return 1j * self.g_upper @ hess

    def pairing(self, a_flat, b_flat):
        """Pointwise bilinear pairing <A_flat, B_flat>_g = g^{a ebar} g^{b cbar} A_{b ebar} B_{a cbar}."""
        return np.einsum("...ac,...ac->...", self.sharp_pair(a_flat), b_flat)

    def hamiltonian_for_field(self, *_args, **_kwargs):
        raise NoHamiltonianAction("translations of a torus have no Hamiltonian: iota_v omega is not exact")

    def coords(self):
        return self.grid.coords()


def random_potential(n, size, seed, modes=1, amplitude=0.0005):
    """Seeded real trigonometric polynomial with frequencies |k|_inf <= modes and zero mean."""
    rng = np.random.default_rng(seed)
    grid = FourierGrid(2 * n, size)
    x = grid.coords()
    phi = np.zeros(grid.shape)
    freqs = np.array(np.meshgrid(*([np.arange(-modes, modes + 1)] * (2 * n)), indexing="ij")).reshape(2 * n, -1).T
    for k in freqs:
        if not k.any():
            continue
        # each unordered pair +-k once
        nz = k[np.nonzero(k)[0][0]]
        if nz < 0:
            continue
        phase = 2 * np.pi * sum(kj * xj for kj, xj in zip(k, x))
        weight = amplitude / (1.0 + float(k @ k))
        phi += weight * (rng.standard_normal() * np.cos(phase) + rng.standard_normal() * np.sin(phase))
    return phi


def cosine_potential(n, size, eps, axis=0):
    grid = FourierGrid(2 * n, size)
    return eps * np.cos(2 * np.pi * grid.coords()[axis])
