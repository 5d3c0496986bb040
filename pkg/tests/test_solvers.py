import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.sparse.linalg import LinearOperator

from infft_dcf import solvers
from infft_dcf.solvers import (
    SingularMatrixError,
    SolverBreakdown,
    as_operator,
    cg_solve,
    default_max_iter,
    dense_solve,
)


def hpd(rng, n, cond=10.0):
    """Random Hermitian positive definite matrix with prescribed condition number."""
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    eig = np.geomspace(1.0, cond, n)
    return (Q * eig) @ Q.conj().T


def test_identity_in_one_iteration():
    r = np.array([1.0, -2.0, 3.0j])
    x, rep = cg_solve(np.eye(3), r)
    np.testing.assert_allclose(x, r)
    assert rep.iterations == 1 and rep.converged


def test_known_inverse_3x3():
    A = np.array([[4, 1 - 1j, 0], [1 + 1j, 3, 0.5], [0, 0.5, 2]], dtype=complex)
    b = np.array([1.0, 2.0, 3.0 + 1j])
    x, rep = cg_solve(A, b, tol=1e-12)
    np.testing.assert_allclose(x, np.linalg.solve(A, b), rtol=1e-10)
    assert rep.converged


def test_report_final_residual_is_recomputed(rng):
    A = hpd(rng, 30, 1e3)
    b = rng.standard_normal(30) + 0j
    x, rep = cg_solve(A, b, tol=1e-9)
    true = np.linalg.norm(A @ x - b) / np.linalg.norm(b)
    assert rep.final_relative_residual == pytest.approx(true, rel=1e-8)
    assert rep.residual_history[0] == pytest.approx(1.0)
    assert len(rep.residual_history) == rep.iterations + 1


@pytest.mark.parametrize("n", [5, 17, 64])
def test_converges_within_n_iterations(rng, n):
    # finite termination is an exact-arithmetic property; with strong
    # ill-conditioning rounding costs a few extra steps
    A = hpd(rng, n, 10.0)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x, rep = cg_solve(A, b, tol=1e-8, max_iter=n)
    assert rep.converged
    assert rep.iterations <= n


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 64), seed=st.integers(0, 2**31),
       alpha=st.complex_numbers(min_magnitude=0.1, max_magnitude=100))
def test_linearity_in_rhs(n, seed, alpha):
    rng = np.random.default_rng(seed)
    A = hpd(rng, n, 20.0)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x1, _ = cg_solve(A, b, tol=1e-13)
    x2, _ = cg_solve(A, alpha * b, tol=1e-13)
    assert np.linalg.norm(x2 - alpha * x1) <= 1e-10 * np.linalg.norm(alpha * x1)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(1, 64), seed=st.integers(0, 2**31))
def test_cg_agrees_with_dense(n, seed):
    rng = np.random.default_rng(seed)
    A = hpd(rng, n, 100.0)
    b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x_cg, _ = cg_solve(A, b, tol=1e-12)
    x_lu = dense_solve(A, b)
    assert np.linalg.norm(x_cg - x_lu) <= 1e-7 * np.linalg.norm(x_lu)


def test_zero_rhs():
    x, rep = cg_solve(np.eye(4), np.zeros(4))
    assert not np.any(x) and rep.converged and rep.iterations == 0


def test_max_iter_reports_non_convergence(rng):
    A = hpd(rng, 40, 1e6)
    b = rng.standard_normal(40) + 0j
    _, rep = cg_solve(A, b, tol=1e-14, max_iter=3)
    assert not rep.converged
    assert rep.iterations == 3
    assert rep.stop_reason == "max_iter reached"


def test_default_iteration_cap():
    assert default_max_iter(10) == 20
    assert default_max_iter(10**6) == 4096


def test_consistent_semidefinite_system(rng):
    B = rng.standard_normal((20, 8)) + 1j * rng.standard_normal((20, 8))
    A = B @ B.conj().T  # rank 8
    b = A @ (rng.standard_normal(20) + 0j)
    x, rep = cg_solve(A, b, tol=1e-10)
    assert rep.converged
    assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_inconsistent_semidefinite_system_stops_unconverged(rng):
    B = rng.standard_normal((20, 8))
    A = B @ B.T
    b = rng.standard_normal(20)
    x, rep = cg_solve(A, b)
    assert not rep.converged
    assert rep.stop_reason in ("divergence", "stagnation", "non-positive curvature",
                               "max_iter reached")
    assert np.all(np.isfinite(x))


def test_nan_operator_raises():
    op = LinearOperator((3, 3), matvec=lambda v: np.full(3, np.nan), dtype=float)
    with pytest.raises(SolverBreakdown):
        cg_solve(op, np.ones(3))


def test_callable_operator():
    x, rep = cg_solve(lambda v: 2 * v, np.ones(5))
    np.testing.assert_allclose(x, 0.5)


def test_bare_callable_needs_dimension():
    with pytest.raises(ValueError):
        as_operator(lambda v: v)


def test_operator_superposition(rng):
    A = hpd(rng, 12)
    op = as_operator(A)
    u, v = rng.standard_normal(12), rng.standard_normal(12)
    lhs = op.matvec(2 * u - 3 * v)
    assert np.linalg.norm(lhs - (2 * op.matvec(u) - 3 * op.matvec(v))) <= 1e-10 * np.linalg.norm(lhs)


# --- dense -------------------------------------------------------------------

def test_dense_identity():
    b = np.array([1.0, 2.0, 3.0])
    np.testing.assert_array_equal(dense_solve(np.eye(3), b), b)


def test_dense_diagonal():
    np.testing.assert_allclose(dense_solve(np.diag([2.0, 4.0]), np.array([2.0, 4.0])), [1, 1])


def test_dense_random_residual(rng):
    A = rng.standard_normal((50, 50)) + 50 * np.eye(50)
    b = rng.standard_normal(50)
    x = dense_solve(A, b)
    assert np.linalg.norm(A @ x - b) / np.linalg.norm(b) < 1e-10


def test_dense_singular():
    with pytest.raises(SingularMatrixError):
        dense_solve(np.array([[1.0, 2.0], [2.0, 4.0]]), np.array([1.0, 0.0]))
    with pytest.raises(SingularMatrixError):
        dense_solve(np.zeros((3, 3)), np.ones(3))


def test_dense_shape_errors():
    with pytest.raises(ValueError):
        dense_solve(np.ones((2, 3)), np.ones(2))
    with pytest.raises(ValueError):
        dense_solve(np.eye(2), np.ones(3))


def test_dense_budget(monkeypatch):
    monkeypatch.setattr(solvers, "MAX_DENSE_ENTRIES", 3)
    with pytest.raises(solvers.SizeError):
        dense_solve(np.eye(2), np.ones(2))
