import itertools

import numpy as np
import pytest

from infft_dcf.fourier_core import Bandwidth, SamplingSet


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_points(rng, N, d):
    return SamplingSet(rng.random((N, d)) - 0.5)


def random_coeffs(rng, band):
    return rng.standard_normal(band.size) + 1j * rng.standard_normal(band.size)


def brute_indices(M, d):
    """I_M by nested loops, last axis fastest."""
    axis = range(-M // 2, M // 2)
    return [np.array(k) for k in itertools.product(axis, repeat=d)]


def brute_forward(coeffs, points, M):
    """sum_k c_k exp(2 pi i k.x_j), one node and one index at a time."""
    pts = np.atleast_2d(points)
    ks = brute_indices(M, pts.shape[1])
    out = np.zeros(len(pts), dtype=complex)
    for j, x in enumerate(pts):
        for c, k in zip(coeffs, ks):
            out[j] += c * np.exp(2j * np.pi * float(k @ x))
    return out


def brute_adjoint(values, points, M):
    pts = np.atleast_2d(points)
    ks = brute_indices(M, pts.shape[1])
    out = np.zeros(len(ks), dtype=complex)
    for i, k in enumerate(ks):
        for v, x in zip(values, pts):
            out[i] += v * np.exp(-2j * np.pi * float(k @ x))
    return out


def brute_dirichlet(t, M):
    return sum(np.exp(2j * np.pi * k * t) for k in range(-M // 2, M // 2))


def dense_A(points, M):
    """Explicit Fourier matrix from the loop oracle."""
    pts = np.atleast_2d(points)
    ks = brute_indices(M, pts.shape[1])
    return np.array([[np.exp(2j * np.pi * float(k @ x)) for k in ks] for x in pts])


def jittered(rng, R, d, amount=0.5):
    axis = np.arange(R) / R - 0.5
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    pts = np.stack([g.ravel() for g in grids], axis=-1)
    return SamplingSet(pts + amount / R * (rng.random(pts.shape) - 0.5))


def band(d, M):
    return Bandwidth(d, M)
