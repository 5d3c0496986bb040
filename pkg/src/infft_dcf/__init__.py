"""Density compensation weights for the inverse nonequispaced Fourier transform.

The package computes weights ``w_j`` for a node set so that the weighted
adjoint transform ``h_k = sum_j w_j f(x_j) exp(-2 pi i k.x_j)`` recovers
Fourier coefficients from nonequispaced samples.

Modules
-------
fourier_core
    Index sets, sampling sets, direct transforms, Dirichlet and sinc kernels.
nfft
    Kaiser-Bessel NFFT plans and the FFT-based Toeplitz Gram operator.
solvers
    Conjugate gradients and a dense LU fallback.
grids
    Spiral, polar, modified polar and logarithmic modified polar grids.
dcf
    The weight schemes and their diagnostics.
signals
    Shepp-Logan phantom, triangular pulse and error measures.
cli
    The ``infft-dcf`` experiment runner.
"""
from importlib.metadata import PackageNotFoundError, version

from .dcf import (
    SCHEMES,
    QuadratureResidual,
    SolverOptions,
    WeightVector,
    compute_weights,
    frobenius_objective,
    quadrature_residual,
    weights_first_kind,
    weights_frobenius,
    weights_second_kind,
    weights_sinc_ls,
)
from .fourier_core import Bandwidth, SamplingSet, SizeError, index_set, ndft_adjoint, ndft_forward
from .grids import GridSpec, generate
from .nfft import NfftPlan, make_plan
from .signals import TriangularPulse, reconstruct, relative_error, shepp_logan
from .solvers import SolveReport, cg_solve

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

__all__ = [
    "Bandwidth",
    "SamplingSet",
    "SizeError",
    "index_set",
    "ndft_forward",
    "ndft_adjoint",
    "NfftPlan",
    "make_plan",
    "GridSpec",
    "generate",
    "SolverOptions",
    "SolveReport",
    "cg_solve",
    "WeightVector",
    "QuadratureResidual",
    "SCHEMES",
    "compute_weights",
    "weights_second_kind",
    "weights_first_kind",
    "weights_frobenius",
    "weights_sinc_ls",
    "quadrature_residual",
    "frobenius_objective",
    "TriangularPulse",
    "shepp_logan",
    "reconstruct",
    "relative_error",
    "__version__",
]
