"""Fourier differentiation on the unit periodic grid [0, 1)^d."""

import numpy as np


def wavenumbers(size, order=1):
    """Angular wavenumbers 2 pi k; the Nyquist mode is dropped for odd-order derivatives."""
    k = 2 * np.pi * np.fft.fftfreq(size, d=1.0 / size)
    if order % 2 and size % 2 == 0:
        k[size // 2] = 0.0
    return k


class FourierGrid:
    """Real grid with ``ndim`` periodic axes of ``size`` points each.

    Arrays passed to the derivative methods have the grid axes first; any
    trailing axes (matrix indices) are carried along untouched.
    """

    def __init__(self, ndim, size):
        self.ndim = ndim
        self.size = size
        self.axes = tuple(range(ndim))
        self.shape = (size,) * ndim
        self._k = wavenumbers(size)

    def coords(self):
        x = np.arange(self.size) / self.size
        return np.meshgrid(*([x] * self.ndim), indexing="ij")

    def _symbol(self, axis, arr_ndim):
        shape = [1] * arr_ndim
        shape[axis] = self.size
        return self._k.reshape(shape)

    def fft(self, f):
        return np.fft.fftn(f, axes=self.axes)

    def ifft(self, fh):
        return np.fft.ifftn(fh, axes=self.axes)

    def symbol(self, coeffs, arr_ndim):
        """Fourier symbol of ``sum_j coeffs[j] d/dx_j`` broadcastable to an array of ``arr_ndim`` axes."""
        out = 0
        for j, c in enumerate(coeffs):
            if c:
                out = out + c * 1j * self._symbol(j, arr_ndim)
        return out

    def apply(self, f, symbol):
        return self.ifft(self.fft(f) * symbol)

    def deriv(self, f, coeffs):
        """Directional derivative ``sum_j coeffs[j] d f / dx_j``."""
        f = np.asarray(f, dtype=complex)
        return self.apply(f, self.symbol(coeffs, f.ndim))

    def mean(self, f):
        return np.mean(f, axis=self.axes)
