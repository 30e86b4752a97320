"""Legendre-Gauss-Lobatto nodes, quadrature weights and barycentric differentiation."""

import numpy as np
from scipy.special import eval_legendre, roots_jacobi


def lobatto_nodes(npts):
    """Ascending LGL nodes on [-1, 1] and weights (exact for polynomials of degree 2*npts - 3)."""
    if npts < 3:
        raise ValueError("need at least 3 Lobatto nodes")
    inner, _ = roots_jacobi(npts - 2, 1.0, 1.0)
    x = np.concatenate([[-1.0], np.sort(inner), [1.0]])
    p = eval_legendre(npts - 1, x)
    w = 2.0 / (npts * (npts - 1) * p**2)
    return x, w


def barycentric_weights(x):
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    # rescale by 2 per factor to keep the products in range
    w = 1.0 / np.prod(2.0 * diff, axis=1)
    return w / np.max(np.abs(w))


def differentiation_matrix(x):
    """Barycentric first-derivative matrix; rows sum to zero exactly (negative-sum trick)."""
    w = barycentric_weights(x)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, 1.0)
    d = (w[None, :] / w[:, None]) / diff
    np.fill_diagonal(d, 0.0)
    np.fill_diagonal(d, -d.sum(axis=1))
    return d
