"""
Lagrange finite elements of degree 1 and 2 on simplicial meshes.

Assembly works cell-wise: basis functions are tabulated at quadrature points
(:class:`Tabulation`), local arrays are formed with ``einsum`` and scattered
into sparse matrices. The same tabulations evaluate discrete fields, so any
quadratic functional computed from them is consistent with the assembled
matrices.

Vector spaces store ``components`` copies of the scalar space one after the
other: DOF ``c * n_scalar + i`` is component ``c`` of scalar DOF ``i``. The
number of components is independent of the mesh dimension, which allows a
spatial flux over a space-time mesh (``components = mesh.dim - 1``).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .mesh import DIRICHLET, SimplicialMesh
from .quadrature import Quadrature, gauss_legendre01, simplex_quadrature


class FESpace:
    """Continuous Lagrange space.

    Parameters
    ----------
    mesh : SimplicialMesh
    degree : 1 or 2
    components : int
        Number of vector components.
    vector : bool, optional
        Treat the space as vector valued (default: ``components > 1``). A
        one-component vector space is the flux space of a 1-d problem.
    """

    def __init__(self, mesh: SimplicialMesh, degree=1, components=1, vector=None):
        if degree not in (1, 2):
            raise ValueError("degree must be 1 or 2")
        if components < 1:
            raise ValueError("components must be >= 1")
        self.mesh = mesh
        self.degree = int(degree)
        self.components = int(components)
        self._vector = self.components > 1 if vector is None else bool(vector)
        if self.components > 1 and not self._vector:
            raise ValueError("multi-component spaces are vector valued")
        self._tabs = {}

    def __repr__(self):
        fam = "vector" if self.is_vector else "scalar"
        return f"FESpace({fam} P{self.degree}, components={self.components}, n_dofs={self.n_dofs})"

    @property
    def is_vector(self):
        return self._vector

    @property
    def family(self):
        return "vector-Lagrange" if self.is_vector else "scalar-Lagrange"

    @cached_property
    def scalar_dof_map(self):
        m = self.mesh
        if self.degree == 1:
            return m.cells.copy()
        _, cell_edges = m.edges
        return np.hstack([m.cells, m.n_vertices + cell_edges])

    @property
    def n_scalar(self):
        if self.degree == 1:
            return self.mesh.n_vertices
        return self.mesh.n_vertices + len(self.mesh.edges[0])

    @property
    def n_dofs(self):
        return self.n_scalar * self.components

    @property
    def n_local_scalar(self):
        return self.scalar_dof_map.shape[1]

    @cached_property
    def dof_map(self):
        """(nc, components * n_local_scalar) global DOFs, component-major."""
        sm = self.scalar_dof_map
        return np.hstack([sm + c * self.n_scalar for c in range(self.components)])

    @cached_property
    def dof_points(self):
        """Coordinates of the scalar nodes."""
        m = self.mesh
        if self.degree == 1:
            return m.vertices.copy()
        e, _ = m.edges
        return np.vstack([m.vertices, 0.5 * (m.vertices[e[:, 0]] + m.vertices[e[:, 1]])])

    def boundary_scalar_dofs(self, tags=(DIRICHLET,)):
        """Sorted scalar DOFs lying on boundary facets with one of ``tags``."""
        if isinstance(tags, str):
            tags = (tags,)
        m = self.mesh
        mask = np.isin(m.boundary_tags.astype(str), list(tags))
        facets = m.boundary_facets[mask]
        ids = set(np.unique(facets).tolist())
        if self.degree == 2 and len(facets) and m.dim > 1:
            edges, _ = m.edges
            lookup = {(int(a), int(b)): i for i, (a, b) in enumerate(edges)}
            for f in facets:
                for i in range(len(f)):
                    for j in range(i + 1, len(f)):
                        a, b = sorted((int(f[i]), int(f[j])))
                        ids.add(m.n_vertices + lookup[(a, b)])
        return np.array(sorted(ids), dtype=int)

    def boundary_dofs(self, tags=(DIRICHLET,)):
        s = self.boundary_scalar_dofs(tags)
        return np.concatenate([s + c * self.n_scalar for c in range(self.components)])

    def default_quadrature(self):
        return simplex_quadrature(self.mesh.dim, 2 * self.degree + 2)

    def tabulate(self, quad: Quadrature | None = None):
        """Tabulate the scalar basis at ``quad`` (cached per rule)."""
        if quad is None:
            quad = self.default_quadrature()
        key = (quad.dim, quad.degree, len(quad.weights))
        if key not in self._tabs:
            if quad.dim != self.mesh.dim:
                raise ValueError("quadrature dimension does not match mesh")
            self._tabs[key] = Tabulation.build(self, quad)
        return self._tabs[key]

    def same_mesh(self, other):
        return self.mesh is other.mesh


def _basis(degree, dim, bary):
    """Reference basis values (nq, nloc) and barycentric derivatives (nq, nloc, dim+1)."""
    nq, nb = bary.shape
    if degree == 1:
        val = bary.copy()
        der = np.broadcast_to(np.eye(nb), (nq, nb, nb)).copy()
        return val, der
    pairs = [(a, b) for a in range(nb) for b in range(a + 1, nb)]
    val = np.empty((nq, nb + len(pairs)))
    der = np.zeros((nq, nb + len(pairs), nb))
    for i in range(nb):
        val[:, i] = bary[:, i] * (2 * bary[:, i] - 1)
        der[:, i, i] = 4 * bary[:, i] - 1
    for k, (a, b) in enumerate(pairs):
        val[:, nb + k] = 4 * bary[:, a] * bary[:, b]
        der[:, nb + k, a] = 4 * bary[:, b]
        der[:, nb + k, b] = 4 * bary[:, a]
    return val, der


@dataclass(frozen=True, eq=False)
class Tabulation:
    """Scalar basis data at the quadrature points of every cell.

    Attributes
    ----------
    phi : (nq, nloc) basis values
    dphi : (nc, nq, nloc, dim) physical gradients
    x : (nc, nq, dim) physical points
    w : (nc, nq) quadrature weights times cell Jacobian
    """

    quad: Quadrature
    phi: np.ndarray
    dphi: np.ndarray
    x: np.ndarray
    w: np.ndarray

    @staticmethod
    def build(space, quad):
        m = space.mesh
        val, der = _basis(space.degree, m.dim, quad.points)
        bg = m.barycentric_gradients  # (nc, nb, dim)
        dphi = np.einsum("qlb,cbd->cqld", der, bg)
        x = m.map_to_physical(quad.points)
        detj = np.abs(np.linalg.det(m.jacobians))
        w = detj[:, None] * quad.weights[None, :]
        return Tabulation(quad, val, dphi, x, w)


@dataclass(frozen=True, eq=False)
class DiscreteField:
    """DOF vector over an :class:`FESpace`."""

    space: FESpace
    dofs: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.dofs, dtype=float)
        if d.shape != (self.space.n_dofs,):
            raise ValueError(f"expected {self.space.n_dofs} DOFs, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise ValueError("DiscreteField DOFs must be finite")
        object.__setattr__(self, "dofs", d)

    def component(self, c):
        n = self.space.n_scalar
        return self.dofs[c * n:(c + 1) * n]

    def values(self, tab=None):
        """(nc, nq) for scalar fields, (nc, nq, m) for vector fields."""
        return field_values(self.space, self.dofs, tab)

    def gradients(self, tab=None):
        return field_gradients(self.space, self.dofs, tab)

    def __add__(self, other):
        return DiscreteField(self.space, self.dofs + other.dofs)

    def __sub__(self, other):
        return DiscreteField(self.space, self.dofs - other.dofs)

    def __mul__(self, a):
        return DiscreteField(self.space, a * self.dofs)

    __rmul__ = __mul__


def zero_field(space):
    return DiscreteField(space, np.zeros(space.n_dofs))


# --- field evaluation -----------------------------------------------------------


def _local(space, dofs):
    """(nc, m, nloc) local DOF values."""
    nc = space.mesh.n_cells
    return dofs[space.dof_map].reshape(nc, space.components, space.n_local_scalar)


def field_values(space, dofs, tab=None):
    tab = space.tabulate() if tab is None else tab
    out = np.einsum("ql,cml->cqm", tab.phi, _local(space, dofs))
    return out if space.is_vector else out[..., 0]


def field_gradients(space, dofs, tab=None):
    """(nc, nq, dim) for scalar fields, (nc, nq, m, dim) for vector fields."""
    tab = space.tabulate() if tab is None else tab
    out = np.einsum("cqld,cml->cqmd", tab.dphi, _local(space, dofs))
    return out if space.is_vector else out[:, :, 0]


def field_divergence(space, dofs, tab=None):
    """Divergence over the first ``components`` coordinates, (nc, nq)."""
    g = field_gradients(space, dofs, tab)
    if not space.is_vector:
        raise ValueError("divergence needs a vector space")
    m = space.components
    return np.einsum("cqmm->cq", g[..., :m])


# --- coefficients -----------------------------------------------------------------


def eval_coefficient(coef, points, t=0.0, shape=()):
    """Evaluate ``coef`` at ``points`` (..., d).

    ``coef`` may be None (identity for matrices, one for scalars), a number or
    array (constant), or a callable ``coef(points, t)``.
    """
    base = points.shape[:-1]
    if coef is None:
        if shape == ():
            return np.ones(base)
        if len(shape) == 1:
            return np.ones(base + shape)
        return np.broadcast_to(np.eye(shape[0]), base + shape)
    if callable(coef):
        val = np.asarray(coef(points, t), dtype=float)
    else:
        val = np.asarray(coef, dtype=float)
    return np.broadcast_to(val, base + shape)


def check_spd(Aq, what="A"):
    """Raise ``ValueError`` unless every sampled matrix is symmetric positive definite."""
    a = Aq.reshape(-1, *Aq.shape[-2:])
    if not np.allclose(a, np.swapaxes(a, 1, 2), rtol=1e-12, atol=1e-14):
        raise ValueError(f"{what} is not symmetric at some quadrature point")
    lam = np.linalg.eigvalsh(a)
    if np.any(lam <= 0):
        raise ValueError(f"{what} is not positive definite at some quadrature point")
    return lam.min(), lam.max()


# --- scatter -----------------------------------------------------------------------


def scatter_matrix(row_space, col_space, local):
    """Sum cell matrices (nc, nr, ncol) into a CSR matrix."""
    rm, cm = row_space.dof_map, col_space.dof_map
    rows = np.broadcast_to(rm[:, :, None], local.shape).ravel()
    cols = np.broadcast_to(cm[:, None, :], local.shape).ravel()
    mat = sp.coo_matrix((local.ravel(), (rows, cols)),
                        shape=(row_space.n_dofs, col_space.n_dofs)).tocsr()
    mat.sum_duplicates()
    return mat


def scatter_vector(space, local):
    return np.bincount(space.dof_map.ravel(), weights=local.ravel(), minlength=space.n_dofs)


def _vector_basis(space, tab):
    """Values (nq, m*nloc, m) and divergence (nc, nq, m*nloc) of vector basis."""
    m, nl = space.components, space.n_local_scalar
    val = np.zeros((tab.phi.shape[0], m * nl, m))
    div = np.empty(tab.dphi.shape[:2] + (m * nl,))
    for c in range(m):
        val[:, c * nl:(c + 1) * nl, c] = tab.phi
        div[:, :, c * nl:(c + 1) * nl] = tab.dphi[..., c]
    return val, div


# --- assembly ------------------------------------------------------------------------


def assemble_stiffness(space, A=None, t=0.0, quad=None, check=False):
    """``(A grad u, grad w)`` over the mesh for a scalar space."""
    if space.is_vector:
        raise ValueError("stiffness needs a scalar space")
    tab = space.tabulate(quad)
    d = space.mesh.dim
    Aq = eval_coefficient(A, tab.x, t, (d, d))
    if check:
        check_spd(Aq)
    local = np.einsum("cq,cqie,cqef,cqjf->cij", tab.w, tab.dphi, Aq, tab.dphi, optimize=True)
    return scatter_matrix(space, space, local)


def assemble_mass(space, weight=None, t=0.0, quad=None):
    """``(weight u, w)``; block diagonal over components for vector spaces."""
    tab = space.tabulate(quad)
    wq = tab.w * eval_coefficient(weight, tab.x, t)
    local = np.einsum("cq,qi,qj->cij", wq, tab.phi, tab.phi, optimize=True)
    if space.is_vector:
        m, nl = space.components, space.n_local_scalar
        big = np.zeros((local.shape[0], m * nl, m * nl))
        for c in range(m):
            big[:, c * nl:(c + 1) * nl, c * nl:(c + 1) * nl] = local
        local = big
    return scatter_matrix(space, space, local)


def assemble_lumped_mass(space, weight=None, t=0.0):
    """Row-sum lumped mass as a 1-d array (P1 only)."""
    if space.degree != 1:
        raise ValueError("lumping is only provided for P1")
    return np.asarray(assemble_mass(space, weight, t).sum(axis=1)).ravel()


def assemble_convection(space, b, t=0.0, quad=None):
    """``(b . grad u, w)`` for a scalar space."""
    tab = space.tabulate(quad)
    bq = eval_coefficient(b, tab.x, t, (space.mesh.dim,))
    local = np.einsum("cq,qi,cqd,cqjd->cij", tab.w, tab.phi, bq, tab.dphi, optimize=True)
    return scatter_matrix(space, space, local)


def _require_vector(space):
    if not space.is_vector:
        raise ValueError("flux space must be vector-valued")


def assemble_div_div(flux_space, weight=None, t=0.0, quad=None):
    """``(weight div_x phi_i, div_x phi_j)``; divergence over the first components."""
    _require_vector(flux_space)
    tab = flux_space.tabulate(quad)
    _, div = _vector_basis(flux_space, tab)
    wq = tab.w * _weight_values(weight, tab, t)
    local = np.einsum("cq,cqi,cqj->cij", wq, div, div, optimize=True)
    return scatter_matrix(flux_space, flux_space, local)


def assemble_vector_mass(flux_space, A_inv=None, t=0.0, quad=None, weight=None):
    """``(A_inv phi_i, phi_j)`` for a vector space (scalar weight optional)."""
    _require_vector(flux_space)
    tab = flux_space.tabulate(quad)
    m = flux_space.components
    val, _ = _vector_basis(flux_space, tab)
    Bq = eval_coefficient(A_inv, tab.x, t, (m, m))
    wq = tab.w * _weight_values(weight, tab, t)
    local = np.einsum("cq,qia,cqab,qjb->cij", wq, val, Bq, val, optimize=True)
    return scatter_matrix(flux_space, flux_space, local)


def _weight_values(weight, tab, t):
    if weight is None:
        return 1.0
    if isinstance(weight, np.ndarray) and weight.shape == tab.w.shape:
        return weight
    return eval_coefficient(weight, tab.x, t)


def _check_same_mesh(*spaces):
    m0 = spaces[0].mesh
    for s in spaces[1:]:
        if s.mesh is not m0:
            raise ValueError("fields live on different meshes")


def _quad_data(data, space_for_eval, tab):
    """Values at quadrature points of a field, array, or nodal vector."""
    if isinstance(data, DiscreteField):
        _check_same_mesh(space_for_eval, data.space)
        return data.values(data.space.tabulate(tab.quad))
    data = np.asarray(data, dtype=float)
    if data.shape == tab.w.shape:
        return data
    mesh = space_for_eval.mesh
    if data.shape == (mesh.n_vertices,):
        p1 = FESpace(mesh, 1)
        return field_values(p1, data, p1.tabulate(tab.quad))
    raise ValueError("cannot interpret data on this mesh")


def assemble_z(flux_space, F_t, v_k, v_k1, tau, weight=None, quad=None):
    """``((F_t + (v_k - v_k1) tau/2), div_x phi_j)``.

    ``F_t`` is the time moment of the load: a field, per-vertex values, or
    values at the quadrature points ``(nc, nq)``.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    _check_same_mesh(flux_space, v_k.space, v_k1.space)
    tab = flux_space.tabulate(quad)
    _, div = _vector_basis(flux_space, tab)
    Fq = _quad_data(F_t, flux_space, tab)
    vk = v_k.values(v_k.space.tabulate(tab.quad))
    vk1 = v_k1.values(v_k1.space.tabulate(tab.quad))
    integrand = (Fq + (vk - vk1) * tau / 2.0) * tab.w * _weight_values(weight, tab, 0.0)
    return scatter_vector(flux_space, np.einsum("cq,cqi->ci", integrand, div))


def assemble_g(flux_space, v_k, v_k1, quad=None):
    """``((grad v_k1 + grad v_k / 2), phi_j)``."""
    _check_same_mesh(flux_space, v_k.space, v_k1.space)
    tab = flux_space.tabulate(quad)
    val, _ = _vector_basis(flux_space, tab)
    m = flux_space.components
    gk = v_k.gradients(v_k.space.tabulate(tab.quad))[..., :m]
    gk1 = v_k1.gradients(v_k1.space.tabulate(tab.quad))[..., :m]
    return assemble_rhs_vector(flux_space, gk1 + 0.5 * gk, tab)


def assemble_rhs_vector(flux_space, vq, tab=None):
    """``(vq, phi_j)`` for vector data ``vq`` given at quadrature points (nc, nq, m)."""
    tab = flux_space.tabulate() if tab is None else tab
    val, _ = _vector_basis(flux_space, tab)
    return scatter_vector(flux_space, np.einsum("cq,cqa,qia->ci", tab.w, vq, val))


def assemble_rhs_div(flux_space, rq, tab=None):
    """``(rq, div_x phi_j)`` for scalar data at quadrature points (nc, nq)."""
    tab = flux_space.tabulate() if tab is None else tab
    _, div = _vector_basis(flux_space, tab)
    return scatter_vector(flux_space, np.einsum("cq,cqi->ci", rq * tab.w, div))


def assemble_load(space, fq, tab=None):
    """``(fq, w_j)`` for scalar data at quadrature points (nc, nq)."""
    tab = space.tabulate() if tab is None else tab
    return scatter_vector(space, np.einsum("cq,qi->ci", fq * tab.w, tab.phi))


def time_moment_F(f, mesh_or_points, t_k, tau, n_gauss=4):
    """``int_{t_k}^{t_k+tau} f(x, t) (t - t_k) dt`` with an ``n_gauss``-point Gauss rule.

    Accepts a mesh (values at its vertices) or an array of points (..., d).
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    pts = mesh_or_points.vertices if isinstance(mesh_or_points, SimplicialMesh) \
        else np.asarray(mesh_or_points, dtype=float)
    s, w = gauss_legendre01(n_gauss)
    out = 0.0
    for si, wi in zip(s, w):
        t = t_k + si * tau
        out = out + wi * tau * (si * tau) * np.asarray(f(pts, t), dtype=float)
    return np.broadcast_to(out, pts.shape[:-1]).copy()


# --- interpolation and transfer -----------------------------------------------------


def interpolate(e, space, t=0.0):
    """Nodal interpolant of a scalar (or vector, returning ``components`` values) callable."""
    vals = np.asarray(e(space.dof_points, t), dtype=float)
    if space.is_vector:
        if vals.ndim == 1 and space.components == 1:
            vals = vals[:, None]
        vals = np.broadcast_to(vals, (space.n_scalar, space.components)).T.ravel()
    else:
        vals = np.broadcast_to(vals, (space.n_scalar,))
    return DiscreteField(space, np.array(vals))


def evaluate_in_cells(field, cells, points):
    """Evaluate ``field`` at ``points`` known to lie in ``cells`` of its mesh."""
    space = field.space
    mesh = space.mesh
    x0 = mesh.vertices[mesh.cells[cells, 0]]
    inv = np.linalg.inv(mesh.jacobians[cells])
    xi = np.einsum("nij,nj->ni", inv, points - x0)
    bary = np.hstack([1 - xi.sum(axis=1, keepdims=True), xi])
    val, _ = _basis(space.degree, mesh.dim, bary)
    out = np.einsum("nml,nl->nm", _local(space, field.dofs)[cells], val)
    return out if space.is_vector else out[:, 0]


def prolongate(field, fine_space):
    """Transfer ``field`` to a space on a refinement of its mesh (exact for nested spaces).

    ``fine_space.mesh.parent`` must index cells of ``field.space.mesh``.
    """
    fine = fine_space.mesh
    if fine.parent is None:
        raise ValueError("fine mesh carries no parent map")
    if fine_space.components != field.space.components or fine_space.is_vector != field.space.is_vector:
        raise ValueError("component mismatch")
    pts = fine_space.dof_points
    owner = np.empty(fine_space.n_scalar, dtype=int)
    sdm = fine_space.scalar_dof_map
    owner[sdm.ravel()] = np.repeat(fine.parent, sdm.shape[1])
    vals = evaluate_in_cells(field, owner, pts)
    if fine_space.is_vector:
        vals = vals.T.ravel()
    return DiscreteField(fine_space, vals)
