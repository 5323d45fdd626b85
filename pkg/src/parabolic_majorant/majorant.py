"""
Functional error majorant for parabolic problems and its minimisation.

For a conforming approximation ``v`` (zero error on the lateral boundary) and
any flux ``y`` the error satisfies

    (2 - nu) ||grad_x e||_A^2 + (2 - 1/gamma) ||delta e||^2 + sigma ||e(T)||^2
        <= sigma ||e(0)||^2 + int_0^T gamma ||mu R_eq / delta||^2
           + alpha1 ||R_d||_{A^-1}^2 + alpha2 (C_F^2 / nu_A) ||(1 - mu) R_eq||^2 dt

with ``R_eq = f + div_x y - sigma v_t - c v - b . grad_x v``,
``R_d = y - A grad_x v``, ``delta^2 = c - div(b)/2`` and
``1/alpha1 + 1/alpha2 = nu``. Writing ``alpha1 = (1 + beta)/nu`` and
``alpha2 = (1 + 1/beta)/nu`` the right-hand side is quadratic in ``y`` for
fixed ``beta`` and has a closed-form minimiser in ``beta`` for fixed ``y``.
The flux and ``beta`` are optimised alternately, either slab by slab
(time stepping) or globally on a space-time mesh.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from . import fem
from .expr import ExprFn, as_expr
from .fem import DiscreteField, FESpace
from .linsolve import SolverError, solve_spd
from .parabolic import (SlabSolution, SpatialOperator, energy_error, facet_l2_error,
                        interpolate, spatial_l2_error, spacetime_cell_errors, step_explicit,
                        step_implicit, slab_error)
from .problem import ProblemSpec, TimeGrid, spacetime
from .quadrature import gauss_legendre01, simplex_quadrature

MONOTONE_SLACK = 1e-12


@dataclass(frozen=True)
class MajorantParams:
    """Free parameters of the majorant and of its minimisation.

    ``mu`` may be a number or an expression in space (and, for space-time
    runs, time) with values in [0, 1]. ``rtol`` stops the alternation early
    once a round lowers the total by less than ``rtol`` relative.
    """

    nu: float = 1.0
    gamma: float = 1.0
    mu: object = 0.0
    beta: float = 1.0
    L_iter_max: int = 3
    beta_clamp: tuple = (1e-6, 1e6)
    rtol: float = 0.0
    flux_degree: int = 2
    quad_degree: int | None = None

    def __post_init__(self):
        if not 0 < self.nu <= 2:
            raise ValueError("nu must lie in (0, 2]")
        if not self.gamma >= 0.5:
            raise ValueError("gamma must be >= 1/2")
        lo, hi = self.beta_clamp
        if not 0 < lo <= hi:
            raise ValueError("beta_clamp must satisfy 0 < min <= max")
        if not lo <= self.beta <= hi:
            raise ValueError("beta outside its clamp")
        if int(self.L_iter_max) < 1:
            raise ValueError("L_iter_max must be a positive integer")
        if self.flux_degree not in (1, 2):
            raise ValueError("flux_degree must be 1 or 2")
        if not isinstance(self.mu, (int, float)):
            object.__setattr__(self, "mu", as_expr(self.mu))
        elif not 0 <= self.mu <= 1:
            raise ValueError("mu must lie in [0, 1]")

    @property
    def alpha1(self):
        return (1.0 + self.beta) / self.nu

    @property
    def alpha2(self):
        return (1.0 + 1.0 / self.beta) / self.nu

    @property
    def mu_is_zero(self):
        return isinstance(self.mu, (int, float)) and self.mu == 0

    def mu_values(self, x, t=0.0):
        if isinstance(self.mu, (int, float)):
            return np.full(np.shape(x)[:-1], float(self.mu))
        val = np.broadcast_to(self.mu(x, t), np.shape(x)[:-1])
        if np.any(val < 0) or np.any(val > 1):
            raise ValueError("mu leaves [0, 1]")
        return val


@dataclass(frozen=True)
class MajorantReport:
    """Majorant parts, total and indicators.

    ``m_eq`` is ``||(1 - mu) R_eq||^2`` (the full residual when ``mu = 0``) and
    ``m_gamma`` is ``||mu R_eq / delta||^2``. ``total`` equals
    ``sigma0_term + gamma m_gamma + ((1 + beta) m_d + (1 + 1/beta) C m_eq) / nu``
    with ``C = C_F^2 / nu_A``. ``history`` lists the total after every half
    step of the alternation, starting from the initial flux.
    """

    m_d: float
    m_eq: float
    m_gamma: float
    sigma0_term: float
    total: float
    per_cell_md: np.ndarray
    per_cell_meq: np.ndarray
    beta_final: float
    C: float
    nu: float = 1.0
    gamma: float = 1.0
    error_combined: float | None = None
    i_eff_sqrt: float | None = None
    i_eff_ratio: float | None = None
    history: tuple = ()
    status: str = "ok"

    @property
    def lhs_weights(self):
        """Weights of (e_d, e_delta, e_T) in the bounded error quantity."""
        return (2.0 - self.nu, 2.0 - 1.0 / self.gamma)

    @property
    def per_cell_total(self):
        b = self.beta_final
        return ((1 + b) * self.per_cell_md + (1 + 1 / b) * self.C * self.per_cell_meq) / self.nu

    def with_error(self, err):
        s, r = efficiency_index(self.total, err)
        return replace(self, error_combined=err, i_eff_sqrt=s, i_eff_ratio=r)


def majorant_total(m_d, m_eq, m_gamma, sigma0, beta, C, nu=1.0, gamma=1.0):
    return sigma0 + gamma * m_gamma + ((1.0 + beta) * m_d + (1.0 + 1.0 / beta) * C * m_eq) / nu


def optimal_beta(m_d, m_eq, C_F, nu_lower_A, clamp=(1e-6, 1e6)):
    """``sqrt(C_F^2 m_eq / (nu_A m_d))`` clamped to ``clamp``."""
    lo, hi = clamp
    if m_d < 0 or m_eq < 0:
        raise ValueError("m_d and m_eq must be non-negative")
    if m_d == 0:
        return hi if m_eq > 0 else lo
    b = math.sqrt(C_F ** 2 * m_eq / (nu_lower_A * m_d))
    return min(max(b, lo), hi)


def efficiency_index(total_majorant, error_combined):
    """``(sqrt(M / [e]), M / [e])``, or ``(None, None)`` when the error vanishes."""
    if error_combined is None or not error_combined > 0:
        return None, None
    r = total_majorant / error_combined
    return math.sqrt(r), r


def flux_space_for(mesh, degree, spatial_dim):
    """Vector Lagrange space with ``spatial_dim`` components (divergence in x only)."""
    return FESpace(mesh, degree, components=spatial_dim, vector=True)


def project_flux(spec, v: DiscreteField, flux_space, quad=None, t=0.0):
    """Flux minimising ``||y - A grad v||_{A^-1}`` over the flux space."""
    tab = flux_space.tabulate(quad)
    x = tab.x
    Ainv = spec.A_inv_fn(x, t)
    K = fem.assemble_vector_mass(flux_space, Ainv, quad=tab.quad)
    gv = v.gradients(v.space.tabulate(tab.quad))[..., :spec.dim]
    rhs = fem.assemble_rhs_vector(flux_space, gv, tab)
    return DiscreteField(flux_space, solve_spd(K, rhs, tol=1e-12))


# --- weights ------------------------------------------------------------------------


def _eq_weights(spec, params, x, t):
    """Pointwise ``(1 - mu)^2`` and ``mu^2 / delta^2`` (None when mu vanishes)."""
    if params.mu_is_zero:
        return np.ones(np.shape(x)[:-1]), None
    mu = params.mu_values(x, t)
    d2 = spec.delta2_fn(x, t)
    active = mu > 0
    if np.any(d2[active] <= 0):
        raise ValueError("mu > 0 needs c - div(b)/2 > 0")
    wb = np.where(active, mu ** 2 / np.where(active, d2, 1.0), 0.0)
    return (1.0 - mu) ** 2, wb


class _Quadratic:
    """Common alternation logic; subclasses supply cell values and the linear system."""

    spec: ProblemSpec
    params: MajorantParams
    C: float
    sigma0: float

    def total(self, parts, beta):
        md, meq, mg = (float(p.sum()) for p in parts)
        return majorant_total(md, meq, mg, self.sigma0, beta, self.C, self.params.nu, self.params.gamma)

    def beta_for(self, parts):
        return optimal_beta(float(parts[0].sum()), float(parts[1].sum()), self.spec.C_F,
                            self.spec.nu_lower, self.params.beta_clamp)

    def system(self, beta, Y_fixed):
        raise NotImplementedError

    def run(self, Y, beta, L_iter_max):
        parts = self.cells(Y)
        history = [self.total(parts, beta)]
        for _ in range(L_iter_max):
            A, rhs = self.system(beta)
            Y = solve_spd(A, rhs, tol=1e-12, x0=Y)
            parts = self.cells(Y)
            history.append(self.total(parts, beta))
            beta = self.beta_for(parts)
            history.append(self.total(parts, beta))
            if self.params.rtol > 0 and history[-3] - history[-1] <= self.params.rtol * history[-1]:
                break
        status = "ok"
        h = np.array(history)
        if np.any(np.diff(h) > MONOTONE_SLACK * np.abs(h[:-1]) + 1e-300):
            status = "non-monotone"
            warnings.warn("majorant increased during the flux/beta alternation", RuntimeWarning)
        return Y, beta, parts, tuple(history), status

    def report(self, parts, beta, history=(), status="ok"):
        md, meq, mg = parts
        p = self.params
        return MajorantReport(
            m_d=float(md.sum()), m_eq=float(meq.sum()), m_gamma=float(mg.sum()),
            sigma0_term=self.sigma0, total=self.total(parts, beta),
            per_cell_md=md, per_cell_meq=meq, beta_final=beta, C=self.C, nu=p.nu,
            gamma=p.gamma, history=history, status=status,
        )


# --- time slabs ------------------------------------------------------------------------


class SlabFunctional(_Quadratic):
    """Majorant of one slab as a function of the end-of-slab flux ``Y1``.

    Fields are linear in time on the slab. The diffusive part is integrated
    exactly in time, the equilibrium part with a 4-point Gauss rule, and all
    spatial integrals use the same quadrature as the assembled matrices, so
    the linear solve is the exact minimiser of the evaluated functional.
    """

    def __init__(self, spec, slab: SlabSolution, flux_space, params, y_k: DiscreteField,
                 include_sigma0=None, n_gauss=4):
        if spec.time_dependent_operator:
            raise ValueError("slab optimisation needs time-independent A, b, c")
        if not isinstance(params.mu, (int, float)) and "t" in params.mu.variables:
            raise ValueError("slab optimisation needs mu independent of t")
        if flux_space.mesh is not slab.space.mesh or y_k.space is not flux_space:
            raise ValueError("flux and solution live on different meshes")
        self.spec, self.params, self.slab, self.fs = spec, params, slab, flux_space
        self.C = spec.C_F ** 2 / spec.nu_lower
        self.Y0 = y_k.dofs
        deg = params.quad_degree or 2 * max(flux_space.degree, 1) + 2
        quad = simplex_quadrature(flux_space.mesh.dim, deg)
        self.tab = tab = flux_space.tabulate(quad)
        vt = slab.space.tabulate(quad)
        x, tau, t_k = tab.x, slab.tau, slab.t_k
        self.tau = tau
        v0, v1 = slab.v_k.values(vt), slab.v_k1.values(vt)
        g0, g1 = slab.v_k.gradients(vt), slab.v_k1.gradients(vt)
        self.Ainv = spec.A_inv_fn(x, t_k)
        A = spec.A_fn(x, t_k)
        self.Ag0 = np.einsum("cqij,cqj->cqi", A, g0)
        self.Ag1 = np.einsum("cqij,cqj->cqi", A, g1)
        b = spec.b_fn(x, t_k)
        c = spec.c_fn(x, t_k)
        s, ws = gauss_legendre01(n_gauss)
        self.s, self.ws = s, ws
        self.r0 = []
        for si in s:
            t = t_k + si * tau
            vs = (1 - si) * v0 + si * v1
            gs = (1 - si) * g0 + si * g1
            r = (np.broadcast_to(spec.f(x, t), vs.shape) - spec.sigma * (v1 - v0) / tau
                 - c * vs - np.einsum("cqd,cqd->cq", b, gs))
            self.r0.append(r)
        self.wa, self.wb = _eq_weights(spec, params, x, t_k)
        # time moment of r0 against (t - t_k)
        Z = sum(wi * tau * (si * tau) * r for si, wi, r in zip(s, ws, self.r0))
        cache = _cache(flux_space, ("slab", deg, params.mu))
        if "K" not in cache:
            cache["K"] = fem.assemble_vector_mass(flux_space, self.Ainv, quad=quad)
            cache["Sa"] = fem.assemble_div_div(flux_space, self.wa, quad=quad)
            if self.wb is not None:
                cache["Sb"] = fem.assemble_div_div(flux_space, self.wb, quad=quad)
        self.K, self.Sa, self.Sb = cache["K"], cache["Sa"], cache.get("Sb")
        self.za = fem.assemble_rhs_div(flux_space, self.wa * Z, tab)
        self.zb = None if self.wb is None else fem.assemble_rhs_div(flux_space, self.wb * Z, tab)
        self.g = fem.assemble_rhs_vector(flux_space, g1 + 0.5 * g0, tab)
        self.D0 = fem.field_divergence(flux_space, self.Y0, tab)
        self.y0 = fem.field_values(flux_space, self.Y0, tab)
        if include_sigma0 is None:
            include_sigma0 = slab.k == 0
        self.sigma0 = spec.sigma * spatial_l2_error(spec, slab.v_k, 0.0, exact=spec.u0) \
            if include_sigma0 else 0.0

    def cells(self, Y1):
        tab, tau = self.tab, self.tau
        y1 = fem.field_values(self.fs, Y1, tab)
        d0 = self.y0 - self.Ag0
        d1 = y1 - self.Ag1
        q = (np.einsum("cqi,cqij,cqj->cq", d0, self.Ainv, d0)
             + np.einsum("cqi,cqij,cqj->cq", d0, self.Ainv, d1)
             + np.einsum("cqi,cqij,cqj->cq", d1, self.Ainv, d1))
        md = tau / 3.0 * np.einsum("cq,cq->c", tab.w, q)
        D1 = fem.field_divergence(self.fs, Y1, tab)
        meq = np.zeros(len(md))
        mg = np.zeros(len(md))
        for si, wi, r in zip(self.s, self.ws, self.r0):
            R2 = (r + (1 - si) * self.D0 + si * D1) ** 2
            meq += wi * tau * np.einsum("cq,cq->c", tab.w * self.wa, R2)
            if self.wb is not None:
                mg += wi * tau * np.einsum("cq,cq->c", tab.w * self.wb, R2)
        return md, meq, mg

    def system(self, beta):
        p = self.params
        wa = self.C / beta
        M = self.K + wa * self.Sa
        zz = wa * self.za
        if self.Sb is not None:
            wb = p.gamma * p.nu / (1.0 + beta)
            M = M + wb * self.Sb
            zz = zz + wb * self.zb
        rhs = -0.5 * (M @ self.Y0) - (3.0 / self.tau ** 2) * zz + self.g
        return M, rhs

    def value(self, Y1, beta):
        return self.total(self.cells(Y1), beta)


def _cache(space, key):
    store = space.__dict__.setdefault("_majorant_cache", {})
    return store.setdefault(key, {})


def optimize_flux_slab(spec, slab: SlabSolution, y_k: DiscreteField, params: MajorantParams,
                       y_init=None):
    """Alternate flux solves and ``beta`` updates on one slab.

    Returns the end-of-slab flux ``y_k1`` and the slab report. The flux
    solve uses ``(C/beta S + K) Y1 = -1/2 (C/beta S + K) Y0 - (C/beta) (3/tau^2) z + g``
    (weighted form when ``mu`` is nonzero).
    """
    F = SlabFunctional(spec, slab, y_k.space, params, y_k)
    Y = (y_init.dofs if y_init is not None else y_k.dofs).copy()
    Y, beta, parts, hist, status = F.run(Y, params.beta, params.L_iter_max)
    return DiscreteField(y_k.space, Y), F.report(parts, beta, hist, status)


# --- space-time ------------------------------------------------------------------------


class SpacetimeFunctional(_Quadratic):
    """Majorant over Q for a space-time field ``v`` as a function of the flux DOFs."""

    def __init__(self, spec, v: DiscreteField, flux_space, params):
        d = spec.dim
        if flux_space.mesh is not v.space.mesh:
            raise ValueError("flux and solution live on different meshes")
        self.spec, self.params, self.fs = spec, params, flux_space
        self.C = spec.C_F ** 2 / spec.nu_lower
        deg = params.quad_degree or 2 * flux_space.degree + 2
        quad = simplex_quadrature(flux_space.mesh.dim, deg)
        self.tab = tab = flux_space.tabulate(quad)
        vt = v.space.tabulate(quad)
        x, t = tab.x[..., :d], tab.x[..., d]
        vv = v.values(vt)
        gv = v.gradients(vt)
        gx, dt = gv[..., :d], gv[..., d]
        self.Ainv = spec.A_inv_fn(x, t)
        self.Agv = np.einsum("cqij,cqj->cqi", spec.A_fn(x, t), gx)
        self.r0 = (np.broadcast_to(spec.f(x, t), vv.shape) - spec.sigma * dt - spec.c_fn(x, t) * vv
                   - np.einsum("cqd,cqd->cq", spec.b_fn(x, t), gx))
        self.wa, self.wb = _eq_weights(spec, params, x, t)
        self.K = fem.assemble_vector_mass(flux_space, self.Ainv, quad=quad)
        self.Sa = fem.assemble_div_div(flux_space, self.wa, quad=quad)
        self.Sb = None if self.wb is None else fem.assemble_div_div(flux_space, self.wb, quad=quad)
        self.za = fem.assemble_rhs_div(flux_space, self.wa * self.r0, tab)
        self.zb = None if self.wb is None else fem.assemble_rhs_div(flux_space, self.wb * self.r0, tab)
        self.g = fem.assemble_rhs_vector(flux_space, gx, tab)
        self.sigma0 = spec.sigma * facet_l2_error(spacetime(spec.u0), v, "initial")

    def cells(self, Y):
        tab = self.tab
        dd = fem.field_values(self.fs, Y, tab) - self.Agv
        md = np.einsum("cq,cqi,cqij,cqj->c", tab.w, dd, self.Ainv, dd)
        R2 = (self.r0 + fem.field_divergence(self.fs, Y, tab)) ** 2
        meq = np.einsum("cq,cq->c", tab.w * self.wa, R2)
        mg = np.zeros_like(md) if self.wb is None else np.einsum("cq,cq->c", tab.w * self.wb, R2)
        return md, meq, mg

    def system(self, beta):
        p = self.params
        wa = self.C / beta
        M = self.K + wa * self.Sa
        zz = wa * self.za
        if self.Sb is not None:
            wb = p.gamma * p.nu / (1.0 + beta)
            M = M + wb * self.Sb
            zz = zz + wb * self.zb
        return M, self.g - zz

    def value(self, Y, beta):
        return self.total(self.cells(Y), beta)


def optimize_flux_spacetime(spec, v: DiscreteField, params: MajorantParams, y_init=None):
    """Alternate global flux solves and ``beta`` updates on a space-time mesh.

    The flux is a vector Lagrange field with ``spec.dim`` components over the
    space-time mesh; its divergence is taken in space only.
    """
    fs = y_init.space if y_init is not None else flux_space_for(v.space.mesh, params.flux_degree, spec.dim)
    F = SpacetimeFunctional(spec, v, fs, params)
    Y = y_init.dofs.copy() if y_init is not None else np.zeros(fs.n_dofs)
    Y, beta, parts, hist, status = F.run(Y, params.beta, params.L_iter_max)
    rep = F.report(parts, beta, hist, status)
    if spec.exact_u is not None:
        err = energy_error(spec, v, params.nu, params.gamma)
        rep = rep.with_error(err.combined)
    return DiscreteField(fs, Y), rep


# --- residuals and the general majorant ------------------------------------------------


def residual_eq(spec, v, y, params=None, slab_flux_start=None):
    """Per-cell ``int R_eq^2`` over a slab or over the space-time mesh.

    For a slab pass ``v`` as :class:`SlabSolution`, ``y`` as the end-of-slab
    flux and ``slab_flux_start`` as the start-of-slab flux.
    """
    params = params or MajorantParams()
    params = replace(params, mu=0.0)
    if isinstance(v, SlabSolution):
        F = SlabFunctional(spec, v, y.space, params, slab_flux_start, include_sigma0=False)
        return F.cells(y.dofs)[1]
    return SpacetimeFunctional(spec, v, y.space, params).cells(y.dofs)[1]


def residual_d(spec, v, y, params=None, slab_flux_start=None):
    """Per-cell ``int (y - A grad v)^T A^-1 (y - A grad v)``, arguments as in :func:`residual_eq`."""
    params = replace(params or MajorantParams(), mu=0.0)
    if isinstance(v, SlabSolution):
        F = SlabFunctional(spec, v, y.space, params, slab_flux_start, include_sigma0=False)
        return F.cells(y.dofs)[0]
    return SpacetimeFunctional(spec, v, y.space, params).cells(y.dofs)[0]


def majorant_general(spec, v, y, params: MajorantParams):
    """Evaluate the majorant for given ``v`` and ``y`` without optimising.

    ``v`` is either a space-time field (then ``y`` is a flux on the same mesh)
    or a sequence of :class:`SlabSolution` (then ``y`` is the sequence of
    fluxes at the breakpoints, one longer than ``v``). ``alpha1`` and
    ``alpha2`` come from ``params.beta`` and ``params.nu``.
    """
    if isinstance(v, DiscreteField):
        F = SpacetimeFunctional(spec, v, y.space, params)
        rep = F.report(F.cells(y.dofs), params.beta)
        err = energy_error(spec, v, params.nu, params.gamma) if spec.exact_u is not None else None
        return rep.with_error(err.combined) if err is not None else rep
    slabs = list(v)
    ys = list(y)
    if len(ys) != len(slabs) + 1:
        raise ValueError("need one flux per breakpoint")
    tot = dict(md=0.0, meq=0.0, mg=0.0, s0=0.0)
    md_cells = meq_cells = None
    for k, slab in enumerate(slabs):
        F = SlabFunctional(spec, slab, ys[k].space, params, ys[k], include_sigma0=(k == 0))
        md_cells, meq_cells, mg = F.cells(ys[k + 1].dofs)
        tot["md"] += md_cells.sum()
        tot["meq"] += meq_cells.sum()
        tot["mg"] += mg.sum()
        tot["s0"] += F.sigma0
    C = spec.C_F ** 2 / spec.nu_lower
    total = majorant_total(tot["md"], tot["meq"], tot["mg"], tot["s0"], params.beta, C,
                           params.nu, params.gamma)
    rep = MajorantReport(tot["md"], tot["meq"], tot["mg"], tot["s0"], total, md_cells, meq_cells,
                         params.beta, C, params.nu, params.gamma)
    if spec.exact_u is not None:
        rep = rep.with_error(energy_error(spec, slabs, params.nu, params.gamma).combined)
    return rep


# --- time stepping driver ----------------------------------------------------------------


@dataclass
class TimesteppingResult:
    """Slab reports plus running sums; ``status`` is ``ok`` or ``blowup``."""

    reports: list
    slabs: list
    accumulated_majorant: list
    accumulated_error: list
    fluxes: list
    status: str = "ok"

    @property
    def total(self):
        return self.accumulated_majorant[-1] if self.accumulated_majorant else float("nan")

    @property
    def error(self):
        return self.accumulated_error[-1] if self.accumulated_error else None

    @property
    def i_eff(self):
        return efficiency_index(self.total, self.error)


def run_timestepping_with_majorant(spec, space, grid: TimeGrid, params: MajorantParams,
                                   scheme="implicit", with_error=True, steps=None, on_slab=None):
    """Time stepping with slab-wise majorant minimisation.

    The first flux is the projection of ``A grad v^0``; each optimised
    end-of-slab flux is the start flux of the next slab. The running error
    after slab ``k`` is ``(2 - nu) e_d + (2 - 1/gamma) e_delta + sigma ||e(t^{k+1})||^2``.
    Reports carry the running error and indices. ``on_slab(k, report,
    accumulated_majorant)`` is called after every accepted slab.
    """
    if scheme not in ("implicit", "explicit"):
        raise ValueError("scheme must be implicit or explicit")
    op = SpatialOperator(spec, space)
    fs = flux_space_for(space.mesh, params.flux_degree, spec.dim)
    v = interpolate(spec.u0, space, 0.0)
    y = project_flux(spec, v, fs)
    reports, slabs, acc_m, acc_e, fluxes = [], [], [], [], [y]
    run_m = 0.0
    run_ed = 0.0
    status = "ok"
    with_error = with_error and spec.exact_u is not None
    for k, t_k, tau in grid.slabs()[:steps]:
        if scheme == "implicit":
            v1 = step_implicit(spec, space, v, t_k, tau, op)
        else:
            res = step_explicit(spec, space, v, t_k, tau, op)
            if res.status != "ok":
                status = "blowup"
                break
            v1 = res.field
        slab = SlabSolution(v, v1, t_k, tau, k)
        try:
            with np.errstate(all="ignore"), warnings.catch_warnings():
                if scheme == "explicit":
                    warnings.simplefilter("ignore")
                y1, rep = optimize_flux_slab(spec, slab, y, params)
        except SolverError:
            # an exploding explicit iterate can leave the flux system without finite data
            if scheme == "implicit":
                raise
            status = "blowup"
            break
        if not np.isfinite(rep.total):
            status = "blowup"
            break
        run_m += rep.total
        if with_error:
            ed, edel, _ = slab_error(spec, slab)
            run_ed += (2 - params.nu) * ed.sum() + (2 - 1 / params.gamma) * edel.sum()
            eT = spatial_l2_error(spec, v1, t_k + tau)
            acc_e.append(run_ed + spec.sigma * eT)
            s, r = efficiency_index(run_m, acc_e[-1])
            rep = replace(rep, error_combined=acc_e[-1], i_eff_sqrt=s, i_eff_ratio=r)
        if on_slab is not None:
            on_slab(k, rep, run_m)
        reports.append(rep)
        slabs.append(slab)
        fluxes.append(y1)
        acc_m.append(run_m)
        v, y = v1, y1
    return TimesteppingResult(reports, slabs, acc_m, acc_e, fluxes, status)
