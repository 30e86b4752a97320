"""Grid-sampled differential forms with optional endomorphism values.

A :class:`Form` is a finite sum ``sum_I c_I dg_I`` over increasing multi-indices
``I`` of abstract 1-form generators ``dg_0, ..., dg_{m-1}``.  Coefficients are
complex arrays over a sampling grid; for End-valued forms they carry two trailing
matrix axes and wedge products multiply the matrix parts in order.

Backends choose what the generators mean.  The complex backends use
``dz^1..dz^n, dzbar^1..dzbar^n`` (in that order), so a (1,1)-form
``i beta_{ab} dz^a ^ dzbar^b`` lives on the index pairs ``(a, n + b)``.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np


def _merge_sign(left, right):
    """Sign and sorted index tuple of ``dg_left ^ dg_right`` (0 if they overlap)."""
    if set(left) & set(right):
        return 0, None
    inversions = sum(1 for a in left for b in right if a > b)
    return (-1) ** inversions, tuple(sorted(left + right))


def _mul(a, b, a_endo, b_endo):
    if a_endo and b_endo:
        return a @ b
    if a_endo:
        return a * np.asarray(b)[..., None, None]
    if b_endo:
        return np.asarray(a)[..., None, None] * b
    return a * b


class Form:
    """Mixed-degree differential form over ``ngen`` generators.

    ``comps`` maps increasing index tuples to coefficient arrays.  ``rank`` is
    ``None`` for scalar-valued forms and the matrix size for End-valued ones.
    """

    __slots__ = ("ngen", "comps", "rank")

    def __init__(self, ngen, comps=None, rank=None):
        self.ngen = ngen
        self.rank = rank
        self.comps = {}
        for key, val in (comps or {}).items():
            key = tuple(key)
            if list(key) != sorted(set(key)):
                raise ValueError(f"index tuple {key} must be strictly increasing")
            self.comps[key] = np.asarray(val, dtype=complex)

    # construction helpers -------------------------------------------------
    @classmethod
    def function(cls, ngen, values, rank=None):
        return cls(ngen, {(): values}, rank)

    @classmethod
    def zero(cls, ngen, rank=None):
        return cls(ngen, {}, rank)

    def copy(self):
        return Form(self.ngen, {k: v.copy() for k, v in self.comps.items()}, self.rank)

    # algebra ----------------------------------------------------------------
    def _check(self, other):
        if self.ngen != other.ngen:
            raise ValueError("forms live on different generator sets")

    def __add__(self, other):
        if not isinstance(other, Form):
            other = Form.function(self.ngen, other, self.rank)
        self._check(other)
        rank = self.rank or other.rank
        out = {}
        for key in set(self.comps) | set(other.comps):
            a = self._coeff_as(key, rank)
            b = other._coeff_as(key, rank)
            out[key] = a + b
        return Form(self.ngen, out, rank)

    __radd__ = __add__

    def _coeff_as(self, key, rank):
        c = self.comps.get(key)
        if c is None:
            return 0.0
        if rank and not self.rank:
            return c[..., None, None] * np.eye(rank)
        return c

    def __neg__(self):
        return Form(self.ngen, {k: -v for k, v in self.comps.items()}, self.rank)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, factor):
        """Multiply by a number or a scalar grid function."""
        factor = np.asarray(factor)
        if self.rank and factor.ndim:
            factor = factor[..., None, None]
        return Form(self.ngen, {k: v * factor for k, v in self.comps.items()}, self.rank)

    def __mul__(self, other):
        if isinstance(other, Form):
            return self.wedge(other)
        return self.scale(other)

    __rmul__ = scale

    def wedge(self, other):
        self._check(other)
        rank = self.rank or other.rank
        out = {}
        for ka, va in self.comps.items():
            for kb, vb in other.comps.items():
                sign, key = _merge_sign(ka, kb)
                if sign == 0:
                    continue
                term = _mul(va, vb, bool(self.rank), bool(other.rank))
                if sign < 0:
                    term = -term
                out[key] = out[key] + term if key in out else term
        return Form(self.ngen, out, rank)

    def __xor__(self, other):
        return self.wedge(other)

    def power(self, k):
        """k-fold wedge power; the zeroth power is the unit (identity if End-valued)."""
        if k == 0:
            if self.rank:
                return Form(self.ngen, {(): np.eye(self.rank, dtype=complex)}, self.rank)
            return Form(self.ngen, {(): 1.0})
        out = self
        for _ in range(k - 1):
            out = out.wedge(self)
        return out

    def trace(self):
        if not self.rank:
            return self
        return Form(self.ngen, {k: np.trace(v, axis1=-2, axis2=-1) for k, v in self.comps.items()})

    def conj_transpose(self):
        """Pointwise Hermitian adjoint of the coefficients (complex conjugation on scalars).

        Only the coefficient arrays are conjugated; generators are left alone.
        """
        if self.rank:
            return Form(self.ngen, {k: np.conj(np.swapaxes(v, -1, -2)) for k, v in self.comps.items()}, self.rank)
        return Form(self.ngen, {k: np.conj(v) for k, v in self.comps.items()})

    def matmul_left(self, mat):
        """Pointwise ``mat @ coefficient`` for an End-valued form."""
        return Form(self.ngen, {k: mat @ v for k, v in self.comps.items()}, self.rank)

    def matmul_right(self, mat):
        return Form(self.ngen, {k: v @ mat for k, v in self.comps.items()}, self.rank)

    # degree handling --------------------------------------------------------
    def part(self, degree):
        return Form(self.ngen, {k: v for k, v in self.comps.items() if len(k) == degree}, self.rank)

    def component(self, key):
        key = tuple(key)
        if key in self.comps:
            return self.comps[key]
        return 0.0

    def degrees(self):
        return sorted({len(k) for k in self.comps})

    def top_coefficient(self):
        return self.component(tuple(range(self.ngen)))

    def sup_norm(self):
        if not self.comps:
            return 0.0
        return max(float(np.max(np.abs(v))) if np.size(v) else 0.0 for v in self.comps.values())

    # calculus -----------------------------------------------------------------
    def interior(self, vector):
        """Contraction with a vector field.

        ``vector[i]`` is the value of ``dg_i`` on the field (scalar grid arrays).
        """
        out = {}
        for key, val in self.comps.items():
            for pos, idx in enumerate(key):
                vi = vector[idx]
                if vi is None or (np.isscalar(vi) and vi == 0):
                    continue
                vi = np.asarray(vi)
                if self.rank and vi.ndim:
                    vi = vi[..., None, None]
                term = ((-1) ** pos) * vi * val
                new = key[:pos] + key[pos + 1:]
                out[new] = out[new] + term if new in out else term
        return Form(self.ngen, out, self.rank)

    def exterior(self, partials):
        """Exterior derivative ``sum_i dg_i ^ D_i`` given one partial-derivative callable per generator.

        ``partials[i]`` acts on coefficient arrays (grid axes only); ``None`` marks a
        direction in which every coefficient is constant.
        """
        out = {}
        for key, val in self.comps.items():
            for i, deriv in enumerate(partials):
                if deriv is None or i in key:
                    continue
                sign, new = _merge_sign((i,), key)
                term = sign * deriv(val)
                out[new] = out[new] + term if new in out else term
        return Form(self.ngen, out, self.rank)

    def __repr__(self):
        kind = f"End rank {self.rank}" if self.rank else "scalar"
        return f"Form(ngen={self.ngen}, {kind}, keys={sorted(self.comps, key=lambda k: (len(k), k))})"


def basis_keys(ngen, degree):
    return list(combinations(range(ngen), degree))
