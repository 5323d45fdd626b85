"""
Approximation engines: backward/forward Euler time stepping with P1 elements
in space, and a P1 Galerkin method on space-time meshes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import fem
from .fem import DiscreteField, FESpace
from .linsolve import SolverError, solve_general
from .problem import ProblemSpec, spacetime
from .quadrature import gauss_legendre01, simplex_quadrature

ERROR_QUAD_DEGREE = 10


@dataclass(frozen=True)
class SlabSolution:
    """Approximation on one time slab, linear in time between ``v_k`` and ``v_k1``."""

    v_k: DiscreteField
    v_k1: DiscreteField
    t_k: float
    tau: float
    k: int = 0

    def __post_init__(self):
        if self.v_k.space is not self.v_k1.space:
            raise ValueError("slab fields must share one space")
        if not self.tau > 0:
            raise ValueError("tau must be positive")

    @property
    def space(self):
        return self.v_k.space


@dataclass(frozen=True)
class StepResult:
    """Outcome of an explicit step; ``field`` is None after a blow-up."""

    field: DiscreteField | None
    status: str
    max_abs: float


class SpatialOperator:
    """Cached spatial matrices ``M``, ``K + B + R`` for one problem and P1 space."""

    def __init__(self, spec: ProblemSpec, space: FESpace):
        if space.is_vector:
            raise ValueError("solution space must be scalar")
        self.spec = spec
        self.space = space
        self.bdofs = space.boundary_dofs()
        free = np.ones(space.n_dofs, dtype=bool)
        free[self.bdofs] = False
        self.free = np.flatnonzero(free)
        self._ops = {}
        self._lu = {}
        self.M = fem.assemble_mass(space)

    def operator(self, t):
        key = t if self.spec.time_dependent_operator else None
        if key not in self._ops:
            spec, s = self.spec, self.space
            L = fem.assemble_stiffness(s, spec.A_fn, t)
            if spec.has_convection:
                L = L + fem.assemble_convection(s, spec.b_fn, t)
            if spec.has_reaction:
                L = L + fem.assemble_mass(s, spec.c_fn, t)
            self._ops[key] = L.tocsr()
        return self._ops[key]

    def load(self, t):
        tab = self.space.tabulate()
        return fem.assemble_load(self.space, np.asarray(self.spec.f(tab.x, t)) * np.ones_like(tab.w), tab)

    def boundary_values(self, t):
        pts = self.space.dof_points[self.bdofs]
        return np.broadcast_to(self.spec.uD(pts, t), (len(self.bdofs),)).astype(float)

    def implicit_lu(self, tau, t):
        key = (tau, t if self.spec.time_dependent_operator else None)
        if key not in self._lu:
            A = (self.spec.sigma / tau) * self.M + self.operator(t)
            A = A.tocsc()
            Aff = A[self.free][:, self.free]
            self._lu = {}  # keep one factorisation
            self._lu[key] = (spla.splu(Aff.tocsc()), A[self.free][:, self.bdofs])
        return self._lu[key]

    @property
    def lumped(self):
        if "lumped" not in self._ops:
            self._ops["lumped"] = fem.assemble_lumped_mass(self.space)
        return self._ops["lumped"]


def _operator(spec, space, op):
    if op is None or op.space is not space or op.spec is not spec:
        return SpatialOperator(spec, space)
    return op


def interpolate(e, space: FESpace, t=0.0) -> DiscreteField:
    """Nodal interpolant of ``e`` at time ``t``."""
    return fem.interpolate(e, space, t)


def interpolate_spacetime(e, space: FESpace) -> DiscreteField:
    """Nodal interpolant of ``e(x, t)`` on a space-time mesh (last coordinate is t)."""
    return fem.interpolate(spacetime(e), space)


def step_implicit(spec: ProblemSpec, space: FESpace, v_k: DiscreteField, t_k, tau, op=None):
    """Backward Euler step with the load taken at the slab midpoint.

    ``(sigma/tau) M (v1 - v0) + L v1 = (f(t_k + tau/2), w)``, Dirichlet data
    eliminated. Pass a :class:`SpatialOperator` as ``op`` to reuse matrices.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    op = _operator(spec, space, op)
    t1 = t_k + tau
    rhs = (spec.sigma / tau) * (op.M @ v_k.dofs) + op.load(t_k + 0.5 * tau)
    lu, Afb = op.implicit_lu(tau, t1)
    g = op.boundary_values(t1)
    x = np.empty(space.n_dofs)
    x[op.bdofs] = g
    x[op.free] = lu.solve(rhs[op.free] - Afb @ g)
    if not np.all(np.isfinite(x)):
        raise SolverError("implicit step produced non-finite values", np.inf)
    return DiscreteField(space, x)


def step_explicit(spec: ProblemSpec, space: FESpace, v_k: DiscreteField, t_k, tau, op=None):
    """Forward Euler step with lumped mass; returns a :class:`StepResult`.

    Instability is reported as ``status == "blowup"`` instead of raising.
    """
    if not tau > 0:
        raise ValueError("tau must be positive")
    op = _operator(spec, space, op)
    with np.errstate(all="ignore"):
        r = op.load(t_k) - op.operator(t_k) @ v_k.dofs
        x = v_k.dofs + (tau / spec.sigma) * r / op.lumped
    x[op.bdofs] = op.boundary_values(t_k + tau)
    if not np.all(np.isfinite(x)):
        return StepResult(None, "blowup", float("inf"))
    return StepResult(DiscreteField(space, x), "ok", float(np.abs(x).max()))


def stable_time_step(spec, space, op=None):
    """Largest stable forward Euler step ``2 sigma / lambda_max(M_L^-1 L)``."""
    op = _operator(spec, space, op)
    L = op.operator(0.0)[op.free][:, op.free]
    ml = op.lumped[op.free]
    d = sp.diags(1.0 / np.sqrt(ml))
    S = d @ L @ d
    S = 0.5 * (S + S.T)
    if S.shape[0] <= 400:
        lam = np.linalg.eigvalsh(S.toarray()).max()
    else:
        lam = spla.eigsh(S, k=1, which="LA", return_eigenvectors=False)[0]
    return 2.0 * spec.sigma / lam


# --- space-time ------------------------------------------------------------------


def solve_spacetime(spec: ProblemSpec, st_mesh, supg=0.0, quad=None) -> DiscreteField:
    """P1 space-time Galerkin solution, optionally with streamline stabilisation in time.

    With ``supg > 0`` the test function ``w`` is augmented by
    ``(supg h_K / sigma) sigma w_t`` on each cell (``supg = 0.5`` gives the
    classical ``h / (2 sigma)`` parameter). The default is plain Galerkin.
    Dirichlet data are imposed on facets tagged ``dirichlet`` (u_D) and
    ``initial`` (u_0).
    """
    if supg < 0:
        raise ValueError("supg must be non-negative")
    d = spec.dim
    if st_mesh.dim != d + 1:
        raise ValueError("space-time mesh must have dimension dim + 1")
    tmin, tmax = st_mesh.vertices[:, -1].min(), st_mesh.vertices[:, -1].max()
    if abs(tmin) > 1e-12 or abs(tmax - spec.T) > 1e-12 * max(1.0, spec.T):
        raise ValueError("space-time mesh does not cover [0, T]")
    space = FESpace(st_mesh, 1)
    tab = space.tabulate(quad)
    x, t = tab.x[..., :d], tab.x[..., d]
    gx = tab.dphi[..., :d]
    gt = tab.dphi[..., d]
    A = spec.A_fn(x, t)
    b = spec.b_fn(x, t)
    c = spec.c_fn(x, t)
    f = np.broadcast_to(spec.f(x, t), t.shape)
    delta = supg * st_mesh.diameters[:, None]
    w = tab.w
    # trial operator applied to basis j (without the diffusion term)
    Lj = spec.sigma * gt + np.einsum("cqd,cqjd->cqj", b, gx) + c[..., None] * tab.phi[None]
    local = np.einsum("cqj,qi->cij", w[..., None] * Lj, tab.phi)
    local += np.einsum("cq,cqid,cqde,cqje->cij", w, gx, A, gx, optimize=True)
    local += np.einsum("cqj,cqi->cij", (w * delta)[..., None] * Lj, gt)
    mat = fem.scatter_matrix(space, space, local)
    rhs = fem.scatter_vector(space, np.einsum("cq,qi->ci", w * f, tab.phi)
                             + np.einsum("cq,cqi->ci", w * delta * f, gt))
    lateral = space.boundary_dofs("dirichlet")
    initial = space.boundary_dofs("initial")
    pts = space.dof_points
    vals = np.zeros(space.n_dofs)
    vals[lateral] = spec.uD(pts[lateral, :d], pts[lateral, d])
    vals[initial] = spec.u0(pts[initial, :d], 0.0)
    fixed = np.union1d(lateral, initial)
    free = np.setdiff1d(np.arange(space.n_dofs), fixed)
    mat = mat.tocsr()
    sol = vals.copy()
    sol[free] = solve_general(mat[free][:, free], rhs[free] - mat[free][:, fixed] @ vals[fixed])
    return DiscreteField(space, sol)


# --- errors ------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorParts:
    """Squared error measures and their weighted sum.

    ``combined = (2 - nu) e_d + (2 - 1/gamma) e_delta + sigma e_T``.
    """

    e_d: float
    e_delta: float
    e_T: float
    combined: float
    per_cell_d: np.ndarray
    e_L2: float = float("nan")


def _weights(spec, nu, gamma, e_d, e_delta, e_T):
    return (2.0 - nu) * e_d + (2.0 - 1.0 / gamma) * e_delta + spec.sigma * e_T


def slab_error(spec, slab: SlabSolution, quad_degree=ERROR_QUAD_DEGREE, n_gauss=4):
    """Per-cell ``int |grad e|_A^2``, ``int delta^2 e^2`` and ``int e^2`` over one slab."""
    space = slab.space
    tab = space.tabulate(simplex_quadrature(space.mesh.dim, quad_degree))
    v0, v1 = slab.v_k.values(tab), slab.v_k1.values(tab)
    g0, g1 = slab.v_k.gradients(tab), slab.v_k1.gradients(tab)
    ed = np.zeros(space.mesh.n_cells)
    edel = np.zeros(space.mesh.n_cells)
    el2 = np.zeros(space.mesh.n_cells)
    s, ws = gauss_legendre01(n_gauss)
    for si, wi in zip(s, ws):
        t = slab.t_k + si * slab.tau
        ev = spec.exact_u(tab.x, t) - ((1 - si) * v0 + si * v1)
        eg = spec.grad_u_fn(tab.x, t) - ((1 - si) * g0 + si * g1)
        Aq = spec.A_fn(tab.x, t)
        wt = wi * slab.tau * tab.w
        ed += np.einsum("cq,cqi,cqij,cqj->c", wt, eg, Aq, eg)
        el2 += np.einsum("cq,cq->c", wt, ev ** 2)
        if spec.has_convection or spec.has_reaction:
            edel += np.einsum("cq,cq->c", wt * spec.delta2_fn(tab.x, t), ev ** 2)
    return ed, edel, el2


def spatial_l2_error(spec, field: DiscreteField, t, exact=None, quad_degree=ERROR_QUAD_DEGREE):
    """``||exact(., t) - field||^2`` on the field's mesh (exact defaults to the solution)."""
    exact = spec.exact_u if exact is None else exact
    tab = field.space.tabulate(simplex_quadrature(field.space.mesh.dim, quad_degree))
    e = exact(tab.x, t) - field.values(tab)
    return float(np.sum(tab.w * e ** 2))


def facet_l2_error(fn, field: DiscreteField, tag, quad_degree=ERROR_QUAD_DEGREE):
    """``int (fn - field)^2`` over boundary facets with ``tag`` of a P1 space-time field."""
    space = field.space
    if space.degree != 1:
        raise ValueError("facet traces are computed for P1 fields")
    mesh = space.mesh
    facets = mesh.boundary_facets_tagged(tag)
    if len(facets) == 0:
        return 0.0
    q = simplex_quadrature(mesh.dim - 1, quad_degree)
    xv = mesh.vertices[facets]  # (nf, dim, D)
    pts = np.einsum("qa,fad->fqd", q.points, xv)
    J = xv[:, 1:] - xv[:, :1]
    gram = np.einsum("fid,fjd->fij", J, J)
    meas = np.sqrt(np.abs(np.linalg.det(gram))) if mesh.dim > 1 else np.ones(len(facets))
    vh = np.einsum("qa,fa->fq", q.points, field.dofs[facets])
    e = fn(pts) - vh
    return float(np.sum(meas[:, None] * q.weights[None, :] * e ** 2))


def energy_error(spec: ProblemSpec, solution, nu=1.0, gamma=1.0, quad_degree=ERROR_QUAD_DEGREE):
    """Error measures of a slab sequence or a space-time field.

    Returns
    -------
    ErrorParts
        ``e_d = ||grad_x e||_A^2``, ``e_delta = ||delta e||^2`` over Q,
        ``e_T = ||e(T)||^2`` and ``combined`` as documented on ErrorParts.
        ``per_cell_d`` is per cell of the (last) mesh.
    """
    if spec.exact_u is None:
        raise ValueError("energy_error needs an exact solution")
    if isinstance(solution, DiscreteField):
        return _spacetime_error(spec, solution, nu, gamma, quad_degree)
    slabs = list(solution)
    e_d = e_delta = e_l2 = 0.0
    per_cell = None
    for slab in slabs:
        ed, edel, el2 = slab_error(spec, slab, quad_degree)
        e_d += ed.sum()
        e_delta += edel.sum()
        e_l2 += el2.sum()
        per_cell = ed
    last = slabs[-1]
    e_T = spatial_l2_error(spec, last.v_k1, last.t_k + last.tau, quad_degree=quad_degree)
    return ErrorParts(e_d, e_delta, e_T, _weights(spec, nu, gamma, e_d, e_delta, e_T), per_cell, e_l2)


def spacetime_cell_errors(spec, v: DiscreteField, quad_degree=ERROR_QUAD_DEGREE):
    """Per-cell ``||grad_x e||_A^2``, ``||delta e||^2`` and ``||e||^2`` on a space-time mesh."""
    d = spec.dim
    space = v.space
    tab = space.tabulate(simplex_quadrature(space.mesh.dim, quad_degree))
    x, t = tab.x[..., :d], tab.x[..., d]
    ev = spec.exact_u(x, t) - v.values(tab)
    eg = spec.grad_u_fn(x, t) - v.gradients(tab)[..., :d]
    ed = np.einsum("cq,cqi,cqij,cqj->c", tab.w, eg, spec.A_fn(x, t), eg)
    el2 = np.einsum("cq,cq->c", tab.w, ev ** 2)
    edel = np.zeros_like(ed)
    if spec.has_convection or spec.has_reaction:
        edel = np.einsum("cq,cq->c", tab.w * spec.delta2_fn(x, t), ev ** 2)
    return ed, edel, el2


def _spacetime_error(spec, v, nu, gamma, quad_degree):
    ed, edel, el2 = spacetime_cell_errors(spec, v, quad_degree)
    e_T = facet_l2_error(spacetime(spec.exact_u), v, "final", quad_degree)
    e_d, e_delta = float(ed.sum()), float(edel.sum())
    return ErrorParts(e_d, e_delta, e_T, _weights(spec, nu, gamma, e_d, e_delta, e_T), ed, float(el2.sum()))
