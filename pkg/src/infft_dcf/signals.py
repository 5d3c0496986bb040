"""Test signals and error measures.

The Shepp-Logan phantom is rasterized from the modified (high-contrast)
ten-ellipse table, scaled from ``[-1, 1]^2`` to ``[-1/2, 1/2)^2``.  Row ``i``
of the image runs from the top (``y > 0``) downwards and column ``i`` from
left to right; flattening the ``M x M`` image row-major gives coefficients
in I_M enumeration order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier_core import Bandwidth, SamplingSet
from .nfft import make_plan

__all__ = [
    "SHEPP_LOGAN_ELLIPSES",
    "PhantomImage",
    "shepp_logan",
    "TriangularPulse",
    "triangular_pulse_spectrum",
    "triangular_pulse_samples",
    "periodized_samples",
    "reconstruct",
    "relative_error",
    "pointwise_error_image",
    "image_row",
]

# intensity, semi-axis a, semi-axis b, centre x0, centre y0, rotation (degrees)
SHEPP_LOGAN_ELLIPSES = np.array([
    [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
    [-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0],
    [-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0],
    [-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0],
    [0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0],
    [0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0],
    [0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0],
    [0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0],
    [0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0],
    [0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0],
])


@dataclass(frozen=True, eq=False)
class PhantomImage:
    band: Bandwidth
    pixels: np.ndarray

    @property
    def coefficients(self) -> np.ndarray:
        """Pixels as a spectral vector in I_M enumeration order."""
        return self.pixels.ravel().astype(complex)


def pixel_centres(M):
    """Row (y) and column (x) coordinates of pixel centres in [-1/2, 1/2)."""
    c = (np.arange(M) + 0.5) / M - 0.5
    return c[::-1], c


def shepp_logan(M) -> PhantomImage:
    """The modified Shepp-Logan phantom on an ``M x M`` grid, values in [0, 1]."""
    if M < 16 or M % 2:
        raise ValueError("phantom size M must be even and at least 16")
    ys, xs = pixel_centres(M)
    # ellipse table lives on [-1, 1]^2
    Y, X = np.meshgrid(2 * ys, 2 * xs, indexing="ij")
    img = np.zeros((M, M))
    for rho, a, b, x0, y0, phi in SHEPP_LOGAN_ELLIPSES:
        t = np.deg2rad(phi)
        dx, dy = X - x0, Y - y0
        u = dx * np.cos(t) + dy * np.sin(t)
        v = -dx * np.sin(t) + dy * np.cos(t)
        img[(u / a) ** 2 + (v / b) ** 2 <= 1.0] += rho
    img = np.clip(img, 0.0, 1.0)
    img.setflags(write=False)
    return PhantomImage(Bandwidth(2, M), img)


@dataclass(frozen=True)
class TriangularPulse:
    """Tensor-product hat spectrum ``prod_a (1 - |v_a / b|)_+`` with ``b <= M/2``."""

    band: Bandwidth
    halfwidth: int

    def __post_init__(self):
        if self.halfwidth < 1 or self.halfwidth > self.band.M // 2:
            raise ValueError(
                f"pulse half-width must lie in [1, M/2 = {self.band.M // 2}], "
                f"got {self.halfwidth}"
            )

    def spectrum(self, v) -> np.ndarray:
        return triangular_pulse_spectrum(self, v)

    def spectrum_on_grid(self) -> np.ndarray:
        """Samples ``fhat(k)`` for k in I_M."""
        from .fourier_core import index_set

        return triangular_pulse_spectrum(self, index_set(self.band)).astype(complex)

    def samples(self, sampling: SamplingSet) -> np.ndarray:
        return triangular_pulse_samples(self, sampling)


def triangular_pulse_spectrum(pulse: TriangularPulse, v):
    v = np.asarray(v, dtype=float)
    if pulse.band.d == 1 and v.shape[-1:] != (1,):
        v = v[..., None]
    g = np.clip(1.0 - np.abs(v / pulse.halfwidth), 0.0, None)
    return np.prod(g, axis=-1)


def triangular_pulse_samples(pulse: TriangularPulse, sampling: SamplingSet) -> np.ndarray:
    """Inverse Fourier transform ``b^d prod_a sinc^2(b pi x_a)`` at the nodes."""
    b = pulse.halfwidth
    return np.prod(b * np.sinc(b * sampling.points) ** 2, axis=1)


def periodized_samples(spectrum, sampling: SamplingSet, band: Bandwidth, method="auto"):
    """Samples of the periodization, ``sum_{k in I_M} fhat(k) exp(2 pi i k.x_j)``."""
    return make_plan(band, sampling, method=method).forward(np.asarray(spectrum, dtype=complex))


def reconstruct(samples, weights, band: Bandwidth, method="auto"):
    """``h_k = sum_j w_j f(x_j) exp(-2 pi i k.x_j)``, k in I_M.

    ``weights`` is a :class:`~infft_dcf.dcf.WeightVector`.
    """
    samples = np.asarray(samples)
    w = weights.w
    if samples.shape != w.shape:
        raise ValueError(
            f"{samples.shape[0] if samples.ndim else 0} samples for {w.shape[0]} weights"
        )
    plan = make_plan(band, weights.sampling, method=method)
    return plan.adjoint(w * samples)


def relative_error(reconstructed, truth) -> float:
    truth = np.asarray(truth)
    denom = np.linalg.norm(truth)
    if denom == 0:
        raise ValueError("relative error undefined for a zero reference")
    return float(np.linalg.norm(np.asarray(reconstructed) - truth) / denom)


def pointwise_error_image(reconstructed, truth) -> np.ndarray:
    """``|reconstructed - truth|`` as an ``M x M`` image (d = 2)."""
    diff = np.abs(np.asarray(reconstructed) - np.asarray(truth))
    M = int(round(np.sqrt(diff.size)))
    if M * M != diff.size:
        raise ValueError("pointwise error images need a two-dimensional spectrum")
    return diff.reshape(M, M)


def image_row(image, row):
    """Row ``row`` (1-based, counted from the top) of an image."""
    return np.asarray(image)[row - 1]
