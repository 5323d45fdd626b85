import numpy as np
import pytest
import scipy.sparse as sp

from parabolic_majorant.linsolve import SolverError, solve_general, solve_spd


def _random_spd(n, seed, cond=1e3):
    rng = np.random.default_rng(seed)
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.geomspace(1.0, cond, n)
    return (q * lam) @ q.T


@pytest.mark.parametrize("method", ["auto", "cg", "direct", "dense"])
def test_trivial_systems(method):
    rhs = np.array([1.0, -2.0, 3.0])
    np.testing.assert_allclose(solve_spd(sp.identity(3, format="csr"), rhs, method=method), rhs)
    x = solve_spd(sp.csr_matrix([[2.0, 1.0], [1.0, 2.0]]), np.array([3.0, 3.0]), method=method)
    np.testing.assert_allclose(x, [1.0, 1.0], rtol=1e-10)


@pytest.mark.parametrize("method", ["cg", "direct", "dense"])
def test_random_spd_residual(method):
    M = _random_spd(50, 0)
    rng = np.random.default_rng(1)
    b = rng.standard_normal(50)
    tol = 1e-10
    x = solve_spd(sp.csr_matrix(M), b, tol=tol, method=method)
    assert np.linalg.norm(M @ x - b) <= tol * np.linalg.norm(b)
    x_ref = rng.standard_normal(50)
    x = solve_spd(sp.csr_matrix(M), M @ x_ref, tol=1e-12, method=method)
    np.testing.assert_allclose(x, x_ref, atol=1e-12 * 1e3 * 10)


def test_cg_on_laplacian_with_warm_start():
    n = 400
    L = sp.diags([-1, 2, -1], [-1, 0, 1], shape=(n, n), format="csr")
    b = np.ones(n)
    x = solve_spd(L, b, tol=1e-10, method="cg")
    assert np.linalg.norm(L @ x - b) <= 1e-10 * np.linalg.norm(b)
    # a converged start returns at once and stays converged
    x2 = solve_spd(L, b, tol=1e-10, method="cg", x0=x, maxiter=1)
    np.testing.assert_allclose(x2, x)


def test_failures_are_reported():
    n = 400
    L = sp.diags([-1, 2, -1], [-1, 0, 1], shape=(n, n), format="csr")
    with pytest.raises(SolverError) as info:
        solve_spd(L, np.ones(n), method="cg", maxiter=5)
    assert info.value.residual > 1e-10
    with pytest.raises(SolverError):
        solve_spd(sp.csr_matrix([[1.0, 0.0], [0.0, -1.0]]), np.ones(2), method="cg")
    with pytest.raises(SolverError):
        solve_spd(sp.csr_matrix([[1.0, 2.0], [2.0, 1.0]]), np.ones(2), method="dense")
    with pytest.raises(ValueError):
        solve_spd(sp.identity(2), np.ones(2), tol=0.0)
    with pytest.raises(ValueError):
        solve_spd(sp.identity(2), np.ones(2), method="magic")


def test_zero_rhs_and_general():
    np.testing.assert_array_equal(solve_spd(sp.identity(4), np.zeros(4)), 0.0)
    A = sp.csr_matrix([[1.0, 2.0], [0.0, 3.0]])
    np.testing.assert_allclose(solve_general(A, np.array([5.0, 3.0])), [3.0, 1.0])
