"""Density compensation weights for inverting the nonequispaced Fourier transform.

Four schemes are provided, all returning a :class:`WeightVector`:

``second_kind``
    Exact quadrature weights ``A_2M^T w = e_0`` through the normal equations
    of the second kind, ``w = conj(A_2M) v``.  Exact reconstruction of every
    degree-M trigonometric polynomial when ``(2M)^d <= N``.
``first_kind``
    Least-squares solution of the same system (normal equations of the first
    kind).
``frobenius``
    Minimizer of ``||A^* W A - I||_F^2``, i.e. the solution of ``S w = b``
    with ``S_js = |[A A^*]_js|^2`` and ``b = M^d 1``.
``sinc_ls``
    Closed-form positive weights
    ``w_j = 1 / (M^d sum_s sinc^2(M pi (x_j - x_s)))``.

Notation: ``A_K`` is the N x K^d Fourier matrix on I_K.  All transforms go
through :func:`infft_dcf.nfft.make_plan`, so ``method`` selects exact or fast
evaluation.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator

from .fourier_core import (
    MAX_DENSE_ENTRIES,
    Bandwidth,
    SamplingSet,
    SizeError,
    dirichlet_kernel,
    fourier_matrix,
    index_set,
)
from .nfft import ToeplitzGram, make_plan
from .solvers import DEFAULT_TOL, SingularMatrixError, SolveReport, cg_solve, dense_solve

__all__ = [
    "SCHEMES",
    "SolverOptions",
    "WeightVector",
    "QuadratureResidual",
    "pair_counts",
    "frobenius_matrix",
    "frobenius_operator",
    "weights_second_kind",
    "weights_first_kind",
    "weights_frobenius",
    "weights_sinc_ls",
    "weights_uniform",
    "compute_weights",
    "quadrature_residual",
    "frobenius_objective",
]

log = logging.getLogger(__name__)

SCHEMES = ("second_kind", "first_kind", "frobenius", "sinc_ls", "uniform")


@dataclass(frozen=True)
class SolverOptions:
    """CG and transform settings shared by the iterative schemes.

    ``transform`` is ``"auto"``, ``"exact"`` or ``"fast"``; ``nfft`` holds
    keyword options for :class:`~infft_dcf.nfft.NfftPlan`.  ``gram_solver``
    picks how the second-kind Gram system is solved: ``"cg"``, ``"dense"``
    or ``"auto"`` (dense whenever the ``(2M)^d x (2M)^d`` matrix fits the
    dense budget).
    """

    tol: float = DEFAULT_TOL
    max_iter: int | None = None
    transform: str = "auto"
    nfft: dict = field(default_factory=dict)
    gram_solver: str = "auto"


@dataclass(frozen=True)
class QuadratureResidual:
    """Norms of ``r_k = sum_j w_j exp(2 pi i k.x_j) - delta_{0,k}`` over I_2M."""

    max_abs: float
    l2: float
    at_zero_error: float


@dataclass(eq=False)
class WeightVector:
    """Density compensation factors for a node set.

    ``exact_regime`` records whether ``(2M)^d <= N`` for the bandwidth the
    weights were computed for; ``residual`` is filled in by the iterative
    schemes.
    """

    sampling: SamplingSet
    w: np.ndarray
    scheme: str
    band: Bandwidth | None = None
    exact_regime: bool | None = None
    residual: QuadratureResidual | None = None

    def __post_init__(self):
        self.w = np.asarray(self.w)
        if self.w.shape != (self.sampling.N,):
            raise ValueError(
                f"weight vector has shape {self.w.shape}, expected ({self.sampling.N},)"
            )
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.band is not None and self.exact_regime is None:
            self.exact_regime = self.band.doubled().size <= self.sampling.N

    def __len__(self):
        return self.sampling.N


def _plan(band, sampling, options):
    return make_plan(band, sampling, method=options.transform, **options.nfft)


def _e0(band):
    e = np.zeros(band.size, dtype=complex)
    e[band.zero_index()] = 1.0
    return e


def quadrature_residual(weights, band: Bandwidth, sampling: SamplingSet | None = None,
                        method="auto", **nfft_options) -> QuadratureResidual:
    """Deviation of the weights from exact quadrature on I_2M.

    ``weights`` is a :class:`WeightVector` or a plain array (then
    ``sampling`` is required).
    """
    if isinstance(weights, WeightVector):
        sampling, w = weights.sampling, weights.w
    else:
        w = np.asarray(weights)
        if sampling is None:
            raise ValueError("sampling is required for plain weight arrays")
    big = band.doubled()
    plan = make_plan(big, sampling, method=method, **nfft_options)
    # sum_j w_j e^{+2 pi i k x_j} = conj(adjoint(conj(w)))
    r = np.conj(plan.adjoint(np.conj(np.asarray(w, dtype=complex))))
    r[big.zero_index()] -= 1.0
    absr = np.abs(r)
    return QuadratureResidual(float(absr.max()), float(np.linalg.norm(r)),
                              float(absr[big.zero_index()]))


def weights_second_kind(sampling: SamplingSet, band: Bandwidth,
                        options: SolverOptions = SolverOptions()):
    """Solve ``A_2M^T conj(A_2M) v = e_0`` and return ``w = conj(A_2M) v``.

    With ``u = conj(v)`` the system reads ``A_2M^H A_2M u = e_0``, whose
    matrix is multilevel Toeplitz in the node moments.  CG applies it by FFT
    (:class:`~infft_dcf.nfft.ToeplitzGram`); the dense route assembles it
    from the same moments and factorizes it, which stays accurate on
    ill-conditioned grids where CG crawls.  Outside the exactness regime the
    system is generally inconsistent and the weights come back with
    ``converged=False``.

    Returns
    -------
    WeightVector, SolveReport
    """
    big = band.doubled()
    gram = ToeplitzGram.from_sampling(big, sampling, method=options.transform, **options.nfft)
    solver = options.gram_solver
    if solver == "auto":
        exact = big.size <= sampling.N
        solver = "dense" if exact and big.size**2 <= MAX_DENSE_ENTRIES else "cg"
    e0 = _e0(big)
    if solver == "dense":
        G = gram.dense()
        try:
            u = dense_solve(G, e0)
        except SingularMatrixError:
            log.info("dense Gram system singular, falling back to CG")
            solver = "cg"
        else:
            res = float(np.linalg.norm(G @ u - e0))
            report = SolveReport(1, np.array([res]), res <= options.tol, res,
                                 options.tol, 1, "dense solve")
    if solver == "cg":
        op = LinearOperator((big.size, big.size), matvec=gram, dtype=complex)
        u, report = cg_solve(op, e0, tol=options.tol, max_iter=options.max_iter)
    elif solver != "dense":
        raise ValueError(f"unknown Gram solver {solver!r}")
    w = np.conj(_plan(big, sampling, options).forward(u))
    wv = WeightVector(sampling, w, "second_kind", band)
    wv.residual = quadrature_residual(wv, band, method=options.transform, **options.nfft)
    return wv, report


def weights_first_kind(sampling: SamplingSet, band: Bandwidth,
                       options: SolverOptions = SolverOptions()):
    """Least-squares weights from ``conj(A_2M) A_2M^T w = conj(A_2M) e_0``.

    Conjugating gives ``A_2M A_2M^H y = 1_N`` with ``w = conj(y)``; CG runs on
    this N x N system with one forward and one adjoint transform per step.
    """
    big = band.doubled()
    plan = _plan(big, sampling, options)
    op = LinearOperator((sampling.N, sampling.N),
                        matvec=lambda y: plan.forward(plan.adjoint(y)), dtype=complex)
    y, report = cg_solve(op, np.ones(sampling.N, dtype=complex),
                         tol=options.tol, max_iter=options.max_iter)
    wv = WeightVector(sampling, np.conj(y), "first_kind", band)
    wv.residual = quadrature_residual(wv, band, method=options.transform, **options.nfft)
    return wv, report


def pair_counts(band: Bandwidth) -> np.ndarray:
    """``c_m = #{(k, k') in I_M^2 : k - k' = m}`` for m in I_2M (enumeration order).

    Equals ``prod_a (M - |m_a|)``, which vanishes on the ``m_a = -M`` layer.
    """
    m = index_set(band.doubled())
    return np.prod(band.M - np.abs(m), axis=1).astype(float)


def frobenius_matrix(sampling: SamplingSet, band: Bandwidth) -> np.ndarray:
    """Dense ``S_js = |D_M(x_j - x_s)|^2`` built from the Dirichlet kernel."""
    N = sampling.N
    if N * N > MAX_DENSE_ENTRIES:
        raise SizeError(f"dense Frobenius matrix of size {N} exceeds the dense budget")
    x = sampling.points
    S = np.empty((N, N))
    step = max(1, MAX_DENSE_ENTRIES // (8 * N))
    for start in range(0, N, step):
        diff = x[start:start + step, None, :] - x[None, :, :]
        S[start:start + step] = np.abs(dirichlet_kernel(diff, band)) ** 2
    return S


def frobenius_operator(sampling: SamplingSet, band: Bandwidth,
                       options: SolverOptions = SolverOptions()) -> LinearOperator:
    """Matrix-free ``S = A_2M diag(c) A_2M^*`` with pair counts ``c``.

    S is real symmetric, so the operator acts on real vectors.
    """
    plan = _plan(band.doubled(), sampling, options)
    c = pair_counts(band)

    def matvec(v):
        v = np.asarray(v).ravel()
        out = plan.forward(c * plan.adjoint(v))
        return out.real if np.isrealobj(v) else out

    return LinearOperator((sampling.N, sampling.N), matvec=matvec, dtype=float)


def weights_frobenius(sampling: SamplingSet, band: Bandwidth, mode="auto",
                      options: SolverOptions = SolverOptions()):
    """Minimize ``||A^* W A - I||_F^2`` by solving ``S w = M^d 1``.

    ``mode="dense"`` factorizes S directly and raises if it is singular;
    ``mode="matrix_free"`` runs CG (minimum-norm solution for singular S).
    ``"auto"`` uses the dense route only when S is within the dense budget
    and has full rank generically (``N <= (2M-1)^d``), and switches to CG if
    the factorization turns out singular.

    Returns
    -------
    WeightVector, SolveReport
        For the dense route the report records a single direct solve.
    """
    N = sampling.N
    rhs = np.full(N, float(band.size))
    fallback = False
    if mode == "auto":
        full_rank = N <= (2 * band.M - 1) ** band.d
        mode = "dense" if full_rank and N * N <= MAX_DENSE_ENTRIES else "matrix_free"
        fallback = True
    if mode == "dense":
        S = frobenius_matrix(sampling, band)
        try:
            w = dense_solve(S, rhs)
        except SingularMatrixError:
            if not fallback:
                raise
            # clustered nodes make S numerically rank deficient
            log.info("dense Frobenius system singular, falling back to CG")
            mode = "matrix_free"
        else:
            res = float(np.linalg.norm(S @ w - rhs) / np.linalg.norm(rhs))
            report = SolveReport(1, np.array([res]), True, res, 0.0, 1, "dense solve")
        del S
    if mode == "matrix_free":
        op = frobenius_operator(sampling, band, options)
        w, report = cg_solve(op, rhs, tol=options.tol, max_iter=options.max_iter)
    elif mode != "dense":
        raise ValueError(f"unknown mode {mode!r}")
    wv = WeightVector(sampling, w, "frobenius", band)
    wv.residual = quadrature_residual(wv, band, method=options.transform, **options.nfft)
    return wv, report


def weights_sinc_ls(sampling: SamplingSet, band: Bandwidth) -> WeightVector:
    """Closed-form weights ``1 / (M^d sum_s sinc_d^2(M pi (x_j - x_s)))``.

    O(N^2 d), evaluated in row blocks.
    """
    x = sampling.points
    N = sampling.N
    denom = np.empty(N)
    step = max(1, 2**22 // N)
    for start in range(0, N, step):
        block = np.ones((min(step, N - start), N))
        for a in range(sampling.d):
            block *= np.sinc(band.M * (x[start:start + step, None, a] - x[None, :, a])) ** 2
        denom[start:start + step] = block.sum(axis=1)
    return WeightVector(sampling, 1.0 / (band.size * denom), "sinc_ls", band)


def weights_uniform(sampling: SamplingSet, band: Bandwidth | None = None) -> WeightVector:
    """Plain ``1/N`` weights (no compensation), as a baseline."""
    return WeightVector(sampling, np.full(sampling.N, 1.0 / sampling.N), "uniform", band)


def compute_weights(scheme, sampling: SamplingSet, band: Bandwidth,
                    options: SolverOptions = SolverOptions(), frobenius_mode="auto"):
    """Dispatch by scheme name; returns ``(WeightVector, SolveReport or None)``."""
    if scheme == "second_kind":
        return weights_second_kind(sampling, band, options)
    if scheme == "first_kind":
        return weights_first_kind(sampling, band, options)
    if scheme == "frobenius":
        return weights_frobenius(sampling, band, frobenius_mode, options)
    if scheme == "sinc_ls":
        wv = weights_sinc_ls(sampling, band)
    elif scheme == "uniform":
        wv = weights_uniform(sampling, band)
    else:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    wv.residual = quadrature_residual(wv, band, method=options.transform, **options.nfft)
    return wv, None


def frobenius_objective(weights, band: Bandwidth, mode="expansion",
                        sampling: SamplingSet | None = None) -> float:
    """``||A^* W A - I||_F^2`` for the given weights.

    Modes
    -----
    ``explicit``
        Forms ``A^* W A`` (dense budget applies).
    ``expansion``
        ``w^H S w - 2 M^d Re(sum w) + M^d`` with S from the Dirichlet kernel.
    ``moments``
        ``sum_m c_m |s_m - delta_{m,0}|^2`` with node moments
        ``s_m = sum_j w_j exp(2 pi i m.x_j)`` on I_2M.
    """
    if isinstance(weights, WeightVector):
        sampling, w = weights.sampling, weights.w
    else:
        w = weights
        if sampling is None:
            raise ValueError("sampling is required for plain weight arrays")
    w = np.asarray(w, dtype=complex)
    if mode == "explicit":
        A = fourier_matrix(sampling, band)
        if band.size**2 > MAX_DENSE_ENTRIES:
            raise SizeError("A^* W A exceeds the dense budget")
        G = A.conj().T @ (w[:, None] * A)
        G[np.diag_indices_from(G)] -= 1.0
        return float(np.sum(np.abs(G) ** 2))
    if mode == "expansion":
        S = frobenius_matrix(sampling, band)
        quad = np.vdot(w, S @ w).real
        return float(quad - 2 * band.size * np.sum(w).real + band.size)
    if mode == "moments":
        big = band.doubled()
        plan = make_plan(big, sampling)
        s = np.conj(plan.adjoint(np.conj(w)))
        s[big.zero_index()] -= 1.0
        return float(np.sum(pair_counts(band) * np.abs(s) ** 2))
    raise ValueError(f"unknown mode {mode!r}")
