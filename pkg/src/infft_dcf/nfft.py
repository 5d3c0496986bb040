"""Fast approximate nonequispaced Fourier transforms.

The plan follows the classical gridding scheme: deconvolve by the window's
Fourier coefficients, zero-pad onto an oversampled grid of ``n >= sigma M``
points per axis, run an equispaced FFT, and interpolate to the nodes with a
compactly supported Kaiser-Bessel window.  The interpolation step is stored
as a sparse matrix, so the adjoint is its transpose.

:class:`ExactPlan` exposes the same ``forward``/``adjoint`` interface on top of
direct summation, and :func:`make_plan` picks between the two.
"""
from __future__ import annotations

import math

import numpy as np
import scipy.fft
import scipy.sparse as sp
from scipy.special import i0

from .fourier_core import Bandwidth, SamplingSet, SizeError, ndft_adjoint, ndft_forward

__all__ = [
    "NumpyFFT",
    "NaiveDFT",
    "NfftPlan",
    "ExactPlan",
    "make_plan",
    "ToeplitzGram",
    "AUTO_EXACT_WORK",
    "DEFAULT_SIGMA",
    "DEFAULT_CUTOFF",
]

DEFAULT_SIGMA = 2.0
DEFAULT_CUTOFF = 7
#: Below this many multiply-adds (M**d * N) the exact transform is used.
AUTO_EXACT_WORK = 2**24
MAX_GRID_POINTS = 2**26


class NumpyFFT:
    """Unnormalized forward FFT and 1/n-normalized inverse via :mod:`scipy.fft`."""

    def fftn(self, a):
        return scipy.fft.fftn(a)

    def ifftn(self, a):
        return scipy.fft.ifftn(a)


class NaiveDFT:
    """O(n^2) per-axis DFT with the same normalization as :class:`NumpyFFT`.

    Only meant for testing the plan against an independent equispaced stage.
    """

    @staticmethod
    def _apply(a, sign):
        a = np.asarray(a, dtype=complex)
        for axis, n in enumerate(a.shape):
            idx = np.arange(n)
            F = np.exp(sign * 2j * np.pi * np.outer(idx, idx) / n)
            a = np.moveaxis(np.tensordot(F, a, axes=([1], [axis])), 0, axis)
        return a

    def fftn(self, a):
        return self._apply(a, -1)

    def ifftn(self, a):
        return self._apply(a, +1) / np.prod(np.shape(a))


def _window_shape(sigma_eff):
    return np.pi * (2.0 - 1.0 / sigma_eff)


def kaiser_bessel(u, m, beta):
    """Kaiser-Bessel window in grid units, ``u = n * x``.

    ``sinh(beta sqrt(m^2 - u^2)) / (pi sqrt(m^2 - u^2))`` inside ``|u| < m``,
    continued analytically (``sin`` form) outside.
    """
    u = np.asarray(u, dtype=float)
    s = m * m - u * u
    root = np.sqrt(np.abs(s))
    with np.errstate(divide="ignore", invalid="ignore"):
        inside = np.sinh(beta * root) / (np.pi * root)
        outside = np.sin(beta * root) / (np.pi * root)
    out = np.where(s > 0, inside, outside)
    return np.where(root < 1e-12, beta / np.pi, out)


def kaiser_bessel_hat(k, n, m, beta):
    """Fourier coefficients ``(1/n) I0(m sqrt(beta^2 - (2 pi k / n)^2))`` of the window."""
    arg = beta**2 - (2 * np.pi * np.asarray(k, dtype=float) / n) ** 2
    return i0(m * np.sqrt(arg)) / n


class NfftPlan:
    """Precomputed geometry for fast transforms on a fixed node set.

    Parameters
    ----------
    band : Bandwidth
    sampling : SamplingSet
    sigma : float, optional
        Oversampling factor in [1.25, 4].  The grid size per axis is the
        smallest even integer ``>= sigma * M``.
    m : int, optional
        Window cutoff in [2, 12]; each node touches ``2m + 2`` grid points per
        axis.
    backend : object, optional
        Provides ``fftn``/``ifftn``; defaults to :class:`NumpyFFT`.
    """

    def __init__(self, band: Bandwidth, sampling: SamplingSet, sigma=DEFAULT_SIGMA,
                 m=DEFAULT_CUTOFF, backend=None):
        if band.d != sampling.d:
            raise ValueError(
                f"dimension mismatch: bandwidth has d={band.d}, nodes have d={sampling.d}"
            )
        if not 1.25 <= sigma <= 4:
            raise ValueError(f"oversampling factor must lie in [1.25, 4], got {sigma}")
        if int(m) != m or not 2 <= m <= 12:
            raise ValueError(f"window cutoff m must be an integer in [2, 12], got {m}")
        n = math.ceil(sigma * band.M - 1e-9)
        n += n % 2
        if n**band.d > MAX_GRID_POINTS:
            raise SizeError(f"oversampled grid {n}^{band.d} is too large")

        self.band = band
        self.sampling = sampling
        self.sigma = float(sigma)
        self.m = int(m)
        self.n = n
        self.backend = backend if backend is not None else NumpyFFT()
        self._beta = _window_shape(n / band.M)

        k = np.arange(-band.M // 2, band.M // 2)
        hat = kaiser_bessel_hat(k, n, self.m, self._beta)
        deconv = np.ones(band.shape)
        for a in range(band.d):
            shape = [1] * band.d
            shape[a] = band.M
            deconv = deconv * (1.0 / hat).reshape(shape)
        self._deconv = deconv
        self._grid_index = np.ix_(*([k % n] * band.d))
        self._B = self._interpolation_matrix()
        self._BT = self._B.T.tocsr()

    @property
    def grid_shape(self) -> tuple[int, ...]:
        return (self.n,) * self.band.d

    def _interpolation_matrix(self):
        N, d, n, m = self.sampling.N, self.band.d, self.n, self.m
        P = 2 * m + 2
        offsets = np.arange(-m, m + 2)
        cols = np.zeros((N, 1), dtype=np.int64)
        vals = np.ones((N, 1))
        for a in range(d):
            u = n * self.sampling.points[:, a]
            base = np.floor(u).astype(np.int64)
            idx = base[:, None] + offsets[None, :]
            phi = kaiser_bessel(u[:, None] - idx, m, self._beta)
            cols = (cols[:, :, None] * n + (idx % n)[:, None, :]).reshape(N, -1)
            vals = (vals[:, :, None] * phi[:, None, :]).reshape(N, -1)
        rows = np.repeat(np.arange(N), P**d)
        B = sp.csr_matrix((vals.ravel(), (rows, cols.ravel())), shape=(N, n**d))
        B.sum_duplicates()
        return B

    def forward(self, coeffs) -> np.ndarray:
        """Approximate ``ndft_forward``: values of the polynomial at the nodes."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (self.band.size,):
            raise ValueError(
                f"expected {self.band.size} coefficients, got shape {coeffs.shape}"
            )
        g = np.zeros(self.grid_shape, dtype=complex)
        g[self._grid_index] = coeffs.reshape(self.band.shape) * self._deconv
        g = self.backend.ifftn(g)
        return _real_matvec(self._B, g.ravel())

    def adjoint(self, values) -> np.ndarray:
        """Approximate ``ndft_adjoint``: ``sum_j values_j exp(-2 pi i k.x_j)``."""
        values = np.asarray(values)
        if not np.iscomplexobj(values):
            values = values.astype(float, copy=False)
        if values.shape != (self.sampling.N,):
            raise ValueError(
                f"expected {self.sampling.N} samples, got shape {values.shape}"
            )
        g = _real_matvec(self._BT, values).reshape(self.grid_shape)
        g = self.backend.fftn(g) / self.n**self.band.d
        return (g[self._grid_index] * self._deconv).ravel()


def _real_matvec(B, z):
    # scipy upcasts a real sparse matrix for complex operands on every call;
    # two real products are several times faster
    if np.isrealobj(z):
        return B @ z
    return B @ z.real + 1j * (B @ z.imag)


class ExactPlan:
    """Direct-summation transforms behind the plan interface."""

    def __init__(self, band: Bandwidth, sampling: SamplingSet):
        self.band = band
        self.sampling = sampling

    def forward(self, coeffs):
        return ndft_forward(coeffs, self.sampling, self.band)

    def adjoint(self, values):
        return ndft_adjoint(values, self.sampling, self.band)


def make_plan(band: Bandwidth, sampling: SamplingSet, method="auto", **options):
    """Return an :class:`ExactPlan` or :class:`NfftPlan`.

    ``method`` is ``"exact"``, ``"fast"`` or ``"auto"``; the latter uses
    direct summation while ``M**d * N <= AUTO_EXACT_WORK``.
    """
    if method == "auto":
        method = "exact" if band.size * sampling.N <= AUTO_EXACT_WORK else "fast"
    if method == "exact":
        return ExactPlan(band, sampling)
    if method == "fast":
        return NfftPlan(band, sampling, **options)
    raise ValueError(f"unknown transform method {method!r}")


class ToeplitzGram:
    """Apply ``A^H A`` for the Fourier matrix on I_M without touching the nodes.

    ``(A^H A)_{k,k'} = mu(k' - k)`` with moments ``mu(r) = sum_j exp(2 pi i r.x_j)``
    for ``r`` in I_2M.  The multilevel Toeplitz product is done by circulant
    embedding on a ``(2M)^d`` grid.

    Parameters
    ----------
    band : Bandwidth
        Index set the Gram matrix acts on.
    moments : array_like, shape ((2M)**d,)
        ``mu`` in I_2M enumeration order, e.g. from :meth:`from_sampling`.
    """

    def __init__(self, band: Bandwidth, moments):
        self.band = band
        L = 2 * band.M
        mu = np.asarray(moments, dtype=complex).reshape((L,) * band.d)
        # kernel h(r) = mu(-r) laid out at r mod L; the r = -M slot never
        # reaches a valid output and is zeroed to keep h consistent
        r = np.arange(-band.M, band.M)
        h = np.zeros((L,) * band.d, dtype=complex)
        h[np.ix_(*([(-r) % L] * band.d))] = mu
        for a in range(band.d):
            sl = [slice(None)] * band.d
            sl[a] = band.M
            h[tuple(sl)] = 0.0
        self._kernel_hat = scipy.fft.fftn(h)
        self._L = L
        self._moments = mu

    def dense(self) -> np.ndarray:
        """The Gram matrix itself, ``(mu(k' - k))_{k,k'}``."""
        from .fourier_core import index_set

        k = index_set(self.band) + self.band.M
        out = np.empty((self.band.size, self.band.size), dtype=complex)
        for row in range(self.band.size):
            diff = k - k[row] + self.band.M
            out[row] = self._moments[tuple(diff.T)]
        return out

    @classmethod
    def from_sampling(cls, band: Bandwidth, sampling: SamplingSet, method="auto", **options):
        big = band.doubled()
        plan = make_plan(big, sampling, method=method, **options)
        mu = np.conj(plan.adjoint(np.ones(sampling.N, dtype=complex)))
        return cls(band, mu)

    def __call__(self, u):
        M = self.band.M
        u = np.asarray(u, dtype=complex).reshape(self.band.shape)
        pad = np.zeros((self._L,) * self.band.d, dtype=complex)
        pad[(slice(0, M),) * self.band.d] = u
        out = scipy.fft.ifftn(scipy.fft.fftn(pad) * self._kernel_hat)
        return out[(slice(0, M),) * self.band.d].ravel()
