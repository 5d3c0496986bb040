"""Conjugate gradients for Hermitian PSD operators and a dense direct fallback."""
from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import aslinearoperator

from .fourier_core import MAX_DENSE_ENTRIES, SizeError

__all__ = [
    "SolveReport",
    "SolverBreakdown",
    "SingularMatrixError",
    "as_operator",
    "cg_solve",
    "dense_solve",
    "default_max_iter",
]

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
STAGNATION_WINDOW = 20
STAGNATION_GAIN = 1e-14
MAX_RESTARTS = 2
REFINEMENT_STEPS = 3
#: Relative residual beyond which CG is deemed divergent (inconsistent system).
DIVERGENCE = 1e2


class SolverBreakdown(ArithmeticError):
    """CG produced non-finite iterates (indefinite or badly scaled operator)."""


class SingularMatrixError(np.linalg.LinAlgError):
    """Dense system is singular to working precision."""


@dataclass
class SolveReport:
    iterations: int
    residual_history: np.ndarray = field(repr=False)
    converged: bool
    final_relative_residual: float
    tol: float = DEFAULT_TOL
    max_iter: int = 0
    stop_reason: str = ""


def default_max_iter(n):
    return int(min(2 * n, 4096))


def as_operator(op, n=None):
    """Wrap a matrix, scipy LinearOperator or callable as a LinearOperator."""
    if callable(op) and not hasattr(op, "matvec"):
        if n is None:
            raise ValueError("dimension n is required for a bare callable operator")
        from scipy.sparse.linalg import LinearOperator

        return LinearOperator((n, n), matvec=op, dtype=complex)
    return aslinearoperator(op)


def cg_solve(op, rhs, tol=DEFAULT_TOL, max_iter=None, x0=None):
    """Conjugate gradients for ``op x = rhs`` with Hermitian PSD ``op``.

    Stops when the recursively updated residual satisfies
    ``||r|| <= tol ||rhs||``, after ``max_iter`` steps, on stagnation, or when
    a search direction has non-positive curvature, or on divergence (relative
    residual above 100, the signature of an inconsistent semidefinite
    system; the lowest-residual iterate is then returned).  Stagnation means the
    energy ``x^H A x / 2 - Re(x^H rhs)``, which CG decreases monotonically,
    dropped by less than a relative 1e-14 over the last 20 steps; the
    residual norm itself is not monotone and may plateau for long stretches.
    The reported final residual is recomputed from the returned iterate.

    Parameters
    ----------
    op : array_like, LinearOperator or callable
    rhs : array_like, shape (n,)
    tol : float
    max_iter : int, optional
        Defaults to ``min(2 n, 4096)``.
    x0 : array_like, optional

    Returns
    -------
    x : numpy.ndarray
    report : SolveReport

    Raises
    ------
    SolverBreakdown
        If an iterate becomes NaN or infinite.
    """
    rhs = np.asarray(rhs)
    n = rhs.shape[0]
    A = as_operator(op, n)
    dtype = np.result_type(rhs.dtype, A.dtype, float)
    if max_iter is None:
        max_iter = default_max_iter(n)

    bnorm = np.linalg.norm(rhs)
    if bnorm == 0:
        return np.zeros(n, dtype=dtype), SolveReport(
            0, np.zeros(1), True, 0.0, tol, max_iter, "zero right-hand side"
        )

    x = np.zeros(n, dtype=dtype) if x0 is None else np.asarray(x0, dtype=dtype).copy()
    history = []
    it = 0
    for _ in range(MAX_RESTARTS + 1):
        x, it, reason = _cg_iterations(A, rhs, x, bnorm, tol, max_iter, it, history)
        final = np.linalg.norm(rhs - A.matvec(x)) / bnorm
        if reason != "tolerance reached" or final <= tol:
            break
        # recursive residual drifted below the true one: restart from x
        reason = "true residual above tolerance"
    converged = bool(final <= tol)
    report = SolveReport(it, np.asarray(history), converged, float(final), tol, max_iter, reason)
    log.debug("cg: %d iterations, residual %.3e (%s)", it, final, reason)
    return x, report


def _cg_iterations(A, rhs, x, bnorm, tol, max_iter, it, history):
    r = rhs - A.matvec(x) if np.any(x) else rhs.astype(x.dtype, copy=True)
    p = r.copy()
    rr = np.vdot(r, r).real
    history.append(np.sqrt(rr) / bnorm)
    energy = [0.0]
    # lowest-residual iterate after the starting guess
    best = [np.inf, x]
    while True:
        if history[-1] <= tol:
            return x, it, "tolerance reached"
        if it >= max_iter:
            return x, it, "max_iter reached"
        Ap = A.matvec(p)
        curv = np.vdot(p, Ap).real
        if not np.isfinite(curv):
            raise SolverBreakdown(f"non-finite curvature at iteration {it}")
        if curv <= 0:
            return x, it, "non-positive curvature"
        alpha = rr / curv
        rr_old = rr
        x += alpha * p
        r -= alpha * Ap
        rr_new = np.vdot(r, r).real
        if not np.isfinite(rr_new):
            raise SolverBreakdown(f"non-finite residual at iteration {it}")
        p = r + (rr_new / rr) * p
        rr = rr_new
        it += 1
        history.append(np.sqrt(rr) / bnorm)
        if history[-1] < best[0]:
            best[:] = [history[-1], x.copy()]
        if history[-1] > DIVERGENCE:
            return best[1], it, "divergence"
        # each step lowers the energy by alpha * rr_old / 2
        energy.append(energy[-1] - 0.5 * alpha * rr_old)
        if len(energy) > STAGNATION_WINDOW:
            gain = energy[-STAGNATION_WINDOW - 1] - energy[-1]
            if gain <= STAGNATION_GAIN * abs(energy[-1]):
                return x, it, "stagnation"


def dense_solve(matrix, rhs, check=1e-8):
    """Solve a square dense system by pivoted LU.

    Raises
    ------
    SingularMatrixError
        If the factorization breaks down or the relative residual exceeds
        ``check``.
    SizeError
        If the matrix exceeds the dense budget.
    """
    A = np.asarray(matrix)
    b = np.asarray(rhs)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"matrix must be square, got shape {A.shape}")
    if A.size > MAX_DENSE_ENTRIES:
        raise SizeError(f"dense system of size {A.shape[0]} exceeds the dense budget")
    if b.shape != (A.shape[0],):
        raise ValueError("right-hand side length does not match the matrix")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", scipy.linalg.LinAlgWarning)
            lu = scipy.linalg.lu_factor(A)
            x = scipy.linalg.lu_solve(lu, b)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgWarning, ValueError) as exc:
        raise SingularMatrixError(f"matrix is singular to working precision: {exc}") from exc
    bnorm = np.linalg.norm(b)
    bnorm = bnorm if bnorm > 0 else 1.0
    r = b - A @ x
    res = np.linalg.norm(r) / bnorm
    for _ in range(REFINEMENT_STEPS):
        if not np.isfinite(res) or res <= check * 1e-4:
            break
        x_new = x + scipy.linalg.lu_solve(lu, r)
        r_new = b - A @ x_new
        res_new = np.linalg.norm(r_new) / bnorm
        if not res_new < res:
            break
        x, r, res = x_new, r_new, res_new
    if not np.isfinite(res) or res > check:
        raise SingularMatrixError(
            f"matrix is singular to working precision (relative residual {res:.2e})"
        )
    return x
