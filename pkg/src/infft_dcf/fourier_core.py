"""Exact nonequispaced Fourier transforms, index sets and kernels.

Conventions used throughout the package:

* ``I_M = Z^d ∩ [-M/2, M/2)^d``, enumerated lexicographically with the last
  axis running fastest.  A spectral vector of length ``M**d`` reshaped to
  ``(M,) * d`` is therefore indexed by ``k + M // 2`` along every axis.
* Nodes live on the torus and are stored as representatives in
  ``[-1/2, 1/2)^d``.
* The forward transform evaluates ``f(x_j) = sum_k fhat_k exp(2 pi i k.x_j)``,
  the adjoint computes ``sum_j y_j exp(-2 pi i k.x_j)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Bandwidth",
    "SamplingSet",
    "SizeError",
    "MAX_EXACT_WORK",
    "MAX_DENSE_ENTRIES",
    "wrap",
    "index_set",
    "ndft_forward",
    "ndft_adjoint",
    "fourier_matrix",
    "dirichlet_kernel",
    "sinc",
    "sinc_d",
    "sinc_matrix",
    "sinc_operator_section",
]

#: Guard for direct summation, counted in complex multiply-adds (N * M**d).
MAX_EXACT_WORK = 2**33
#: Guard for dense N x N (or N x K) matrices, counted in entries.
MAX_DENSE_ENTRIES = 10**8

_SINGULAR_EPS = 1e-10
_CHUNK = 4096


class SizeError(ValueError):
    """Raised when a requested dense or exact computation exceeds its budget."""


@dataclass(frozen=True)
class Bandwidth:
    """Dimension ``d`` and even per-axis degree ``M`` of the index set I_M."""

    d: int
    M: int

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValueError(f"dimension must be a positive integer, got {self.d}")
        if int(self.M) != self.M or self.M < 2 or self.M % 2:
            raise ValueError(f"degree M must be an even integer >= 2, got {self.M}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "M", int(self.M))

    @property
    def size(self) -> int:
        """Cardinality ``M**d`` of I_M."""
        return self.M**self.d

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.M,) * self.d

    def doubled(self) -> Bandwidth:
        """The bandwidth of I_2M."""
        return Bandwidth(self.d, 2 * self.M)

    def zero_index(self) -> int:
        """Flat position of ``k = 0`` in the enumeration of I_M."""
        return int(np.ravel_multi_index((self.M // 2,) * self.d, self.shape))


def wrap(x):
    """Reduce coordinates modulo 1 into ``[-1/2, 1/2)``."""
    x = np.asarray(x, dtype=float)
    y = x - np.floor(x + 0.5)
    # floor rounding can leave exactly +0.5 for inputs just below it
    return np.where(y >= 0.5, y - 1.0, y)


@dataclass(frozen=True, eq=False)
class SamplingSet:
    """N nodes on the d-torus, stored as an ``(N, d)`` float array.

    Coordinates are wrapped into ``[-1/2, 1/2)`` on construction.  A 1-D
    input array is read as N one-dimensional nodes.
    """

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError("points must be a non-empty (N, d) array")
        if not np.all(np.isfinite(pts)):
            raise ValueError("points must be finite")
        pts = wrap(pts)
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def N(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.N

    def __repr__(self):
        return f"SamplingSet(N={self.N}, d={self.d})"


def index_set(band: Bandwidth) -> np.ndarray:
    """All ``k`` in I_M as an ``(M**d, d)`` integer array, in enumeration order."""
    axis = np.arange(-band.M // 2, band.M // 2)
    grids = np.meshgrid(*([axis] * band.d), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=-1)


def _check(band: Bandwidth, sampling: SamplingSet):
    if band.d != sampling.d:
        raise ValueError(
            f"dimension mismatch: bandwidth has d={band.d}, nodes have d={sampling.d}"
        )
    if band.size * sampling.N > MAX_EXACT_WORK:
        raise SizeError("problem too large for exact transform")


def _axis_exponentials(x, M, sign):
    # (n, M) table exp(sign * 2 pi i k x) for k = -M/2 .. M/2-1
    k = np.arange(-M // 2, M // 2)
    return np.exp(sign * 2j * np.pi * np.outer(x, k))


def ndft_forward(coeffs, sampling: SamplingSet, band: Bandwidth) -> np.ndarray:
    """Evaluate the trigonometric polynomial with coefficients ``coeffs`` at the nodes.

    Direct summation in O(N M^d); the exponential factorizes over axes, so the
    d-fold sum is carried out as a sequence of contractions.

    Parameters
    ----------
    coeffs : array_like, shape (M**d,)
        Fourier coefficients in I_M enumeration order.
    sampling : SamplingSet
    band : Bandwidth

    Returns
    -------
    numpy.ndarray, shape (N,), complex
    """
    _check(band, sampling)
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.shape != (band.size,):
        raise ValueError(f"expected {band.size} coefficients, got shape {coeffs.shape}")
    F = coeffs.reshape(band.shape)
    out = np.empty(sampling.N, dtype=complex)
    for start in range(0, sampling.N, _CHUNK):
        x = sampling.points[start:start + _CHUNK]
        # contract the last axis first, keeping the node axis in front
        acc = np.broadcast_to(F, (x.shape[0],) + band.shape)
        for a in range(band.d - 1, -1, -1):
            E = _axis_exponentials(x[:, a], band.M, +1)
            acc = np.einsum("j...k,jk->j...", acc, E)
        out[start:start + _CHUNK] = acc
    return out


def ndft_adjoint(values, sampling: SamplingSet, band: Bandwidth) -> np.ndarray:
    """Compute ``h_k = sum_j values_j exp(-2 pi i k.x_j)`` for all k in I_M.

    Exact direct summation, O(N M^d).
    """
    _check(band, sampling)
    values = np.asarray(values, dtype=complex)
    if values.shape != (sampling.N,):
        raise ValueError(f"expected {sampling.N} samples, got shape {values.shape}")
    out = np.zeros(band.shape, dtype=complex)
    letters = "abcdefghi"[: band.d]
    expr = "j," + ",".join(f"j{c}" for c in letters) + "->" + letters
    for start in range(0, sampling.N, _CHUNK):
        x = sampling.points[start:start + _CHUNK]
        tables = [_axis_exponentials(x[:, a], band.M, -1) for a in range(band.d)]
        out += np.einsum(expr, values[start:start + _CHUNK], *tables, optimize=True)
    return out.ravel()


def fourier_matrix(sampling: SamplingSet, band: Bandwidth) -> np.ndarray:
    """The dense nonequispaced Fourier matrix ``A = (exp(2 pi i k.x_j))_{j,k}``."""
    _check(band, sampling)
    if sampling.N * band.size > MAX_DENSE_ENTRIES:
        raise SizeError(
            f"dense Fourier matrix of {sampling.N} x {band.size} exceeds the dense budget"
        )
    k = index_set(band)
    return np.exp(2j * np.pi * (sampling.points @ k.T))


def dirichlet_kernel(t, band: Bandwidth) -> np.ndarray | complex:
    """Closed form of ``sum_{k in I_M} exp(2 pi i k.t)``.

    ``t`` has trailing dimension ``d`` (a scalar is accepted for d = 1).  The
    univariate factor is ``exp(-i pi t) sin(M pi t) / sin(pi t)``.  The ratio
    is evaluated on the offset ``delta = t - n`` from the nearest integer
    ``n`` (it equals ``(-1)^n sin(M pi delta) / sin(pi delta)`` for even M),
    which avoids cancellation near lattice coincidences; where
    ``|sin(pi delta)| < 1e-10`` the removable singularity is replaced by its
    Taylor limit ``M (1 - (M^2 - 1) (pi delta)^2 / 6)``.
    """
    t = np.asarray(t, dtype=float)
    scalar = t.ndim == 0
    if scalar or band.d == 1 and t.shape[-1:] != (1,):
        t = t[..., None]
    if t.shape[-1] != band.d:
        raise ValueError(f"last dimension of t must be {band.d}")
    M = band.M
    n = np.round(t)
    delta = t - n
    s = np.sin(np.pi * delta)
    near = np.abs(s) < _SINGULAR_EPS
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(near, M * (1 - (M * M - 1) * (np.pi * delta) ** 2 / 6),
                         np.sin(M * np.pi * delta) / s)
    sign = 1.0 - 2.0 * (np.abs(n) % 2)
    out = np.prod(np.exp(-1j * np.pi * t) * sign * ratio, axis=-1)
    return complex(out) if scalar else out


def sinc(x):
    """``sin(x)/x`` with ``sinc(0) = 1`` (unnormalized)."""
    return np.sinc(np.asarray(x, dtype=float) / np.pi)


def sinc_d(x):
    """Product of univariate sincs over the last axis of ``x``."""
    return np.prod(sinc(x), axis=-1)


def _budget(rows, cols, what):
    if rows * cols > MAX_DENSE_ENTRIES:
        raise SizeError(f"{what} of {rows} x {cols} exceeds the dense budget")


def sinc_matrix(sampling: SamplingSet, band: Bandwidth) -> np.ndarray:
    """Nonequispaced sinc matrix ``(sinc_d(M pi (x_j - x_s)))_{j,s}``.

    Differences are taken between the stored representatives, not
    geodesically on the torus.
    """
    N = sampling.N
    _budget(N, N, "sinc matrix")
    x = sampling.points
    C = np.ones((N, N))
    for a in range(sampling.d):
        C *= np.sinc(band.M * (x[:, None, a] - x[None, :, a]))
    return C


def sinc_operator_section(sampling: SamplingSet, band: Bandwidth, L: int) -> np.ndarray:
    """Finite section of the sinc operator on nodes ``l / M``, ``l in {-L..L}^d``.

    Columns follow the lexicographic order of ``l`` (last axis fastest).
    """
    if L < 0:
        raise ValueError("truncation radius L must be non-negative")
    K = 2 * L + 1
    _budget(sampling.N, K**sampling.d, "sinc operator section")
    ell = np.arange(-L, L + 1)
    x = sampling.points
    out = np.ones((sampling.N,) + (K,) * sampling.d)
    for a in range(sampling.d):
        factor = np.sinc(band.M * x[:, a, None] - ell[None, :])
        shape = [sampling.N] + [1] * sampling.d
        shape[a + 1] = K
        out = out * factor.reshape(shape)
    return out.reshape(sampling.N, -1)
