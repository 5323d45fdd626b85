"""Sparse linear solves."""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class SolverError(RuntimeError):
    """Raised when a solve misses its tolerance; ``residual`` is the relative residual."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (relative residual {residual:.3e})")
        self.residual = residual


def _relres(M, x, rhs):
    nb = np.linalg.norm(rhs)
    r = np.linalg.norm(M @ x - rhs)
    return r / nb if nb > 0 else r


def _pcg(M, rhs, tol, x0, maxiter):
    d = M.diagonal()
    if np.any(d <= 0):
        raise SolverError("non-positive diagonal, matrix is not SPD", np.inf)
    inv_d = 1.0 / d
    x = np.zeros_like(rhs) if x0 is None else np.array(x0, dtype=float)
    r = rhs - M @ x
    nb = np.linalg.norm(rhs)
    target = tol * nb
    z = inv_d * r
    p = z.copy()
    rz = r @ z
    for _ in range(maxiter):
        if np.linalg.norm(r) <= target:
            return x
        q = M @ p
        pq = p @ q
        if pq <= 0:
            raise SolverError("CG breakdown (matrix not positive definite)", np.linalg.norm(r) / nb)
        a = rz / pq
        x += a * p
        r -= a * q
        z = inv_d * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    if np.linalg.norm(r) <= target:
        return x
    raise SolverError(f"CG did not converge in {maxiter} iterations", np.linalg.norm(r) / nb)


def solve_spd(M, rhs, tol=1e-10, x0=None, method="auto", maxiter=None):
    """Solve ``M x = rhs`` for symmetric positive definite ``M``.

    Parameters
    ----------
    method : {"auto", "cg", "direct", "dense"}
        ``cg`` is Jacobi-preconditioned conjugate gradients (cap ``10 n``
        iterations). ``direct`` is a sparse LU, ``dense`` a Cholesky solve.
        ``auto`` picks dense for ``n <= 500``, sparse direct up to 20000
        unknowns and CG above.

    Direct solutions are polished with CG when they miss ``tol``.

    Raises
    ------
    SolverError
        If ``||M x - rhs|| > tol ||rhs||`` after the solve.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    rhs = np.asarray(rhs, dtype=float)
    n = rhs.shape[0]
    if n == 0:
        return rhs.copy()
    if np.linalg.norm(rhs) == 0:
        return np.zeros(n)
    if method == "auto":
        method = "dense" if n <= 500 else ("direct" if n <= 20000 else "cg")
    maxiter = 10 * n if maxiter is None else maxiter
    if method == "cg":
        Ms = sp.csr_matrix(M)
        return _pcg(Ms, rhs, tol, x0, maxiter)
    if method == "dense":
        Md = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
        try:
            x = sla.cho_solve(sla.cho_factor(Md), rhs)
        except np.linalg.LinAlgError as exc:
            raise SolverError(f"Cholesky failed: {exc}", np.inf) from exc
    elif method == "direct":
        x = spla.spsolve(sp.csc_matrix(M), rhs)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not np.all(np.isfinite(x)):
        raise SolverError("direct solve produced non-finite values", np.inf)
    if _relres(M, x, rhs) > tol:
        x = _pcg(sp.csr_matrix(M), rhs, tol, x, maxiter)
    return x


def solve_general(M, rhs):
    """Sparse LU solve for nonsymmetric systems (space-time Galerkin)."""
    x = spla.spsolve(sp.csc_matrix(M), np.asarray(rhs, dtype=float))
    if not np.all(np.isfinite(x)):
        raise SolverError("sparse LU produced non-finite values", np.inf)
    return x
