"""Quadrature rules on simplices and intervals."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from scipy.special import roots_jacobi, roots_legendre


@dataclass(frozen=True)
class Quadrature:
    """Rule on the reference simplex ``{xi >= 0, sum(xi) <= 1}``.

    ``points`` are barycentric coordinates, shape ``(nq, dim+1)``; ``weights``
    sum to the reference measure ``1/dim!``.
    """

    points: np.ndarray
    weights: np.ndarray
    degree: int

    @property
    def dim(self):
        return self.points.shape[1] - 1

    @property
    def reference_points(self):
        return self.points[:, 1:]


def _gauss_jacobi01(n, alpha):
    # weight (1-u)^alpha on [0, 1]
    x, w = roots_jacobi(n, alpha, 0.0)
    return (x + 1.0) / 2.0, w / 2.0 ** (alpha + 1.0)


@lru_cache(maxsize=None)
def simplex_quadrature(dim: int, degree: int) -> Quadrature:
    """Collapsed-coordinate Gauss-Jacobi rule exact for polynomials of ``degree``.

    All points are interior and all weights positive.
    """
    if dim not in (0, 1, 2, 3):
        raise ValueError("dim must be 0..3")
    if dim == 0:
        return Quadrature(np.ones((1, 1)), np.ones(1), degree)
    n = max(1, (degree + 2) // 2)
    rules = [_gauss_jacobi01(n, float(dim - 1 - i)) for i in range(dim)]
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    wgrids = np.meshgrid(*[r[1] for r in rules], indexing="ij")
    u = np.stack([g.ravel() for g in grids], axis=1)
    w = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    xi = np.empty_like(u)
    scale = np.ones(len(u))
    for i in range(dim):
        xi[:, i] = u[:, i] * scale
        scale = scale * (1.0 - u[:, i])
    bary = np.hstack([1.0 - xi.sum(axis=1, keepdims=True), xi])
    return Quadrature(bary, w, degree)


@lru_cache(maxsize=None)
def gauss_legendre01(n: int):
    """``n``-point Gauss rule on [0, 1] (exact to degree ``2n-1``)."""
    x, w = roots_legendre(n)
    return (x + 1.0) / 2.0, w / 2.0


def reference_measure(dim):
    return 1.0 / factorial(dim)
