"""Adaptive refinement driven by the majorant indicator or by the true error."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .fem import FESpace, prolongate
from .majorant import (MajorantParams, efficiency_index, flux_space_for, optimize_flux_slab,
                       optimize_flux_spacetime, project_flux)
from .mesh import mark_average, mark_bulk, refine
from .parabolic import (SlabSolution, SpatialOperator, energy_error, interpolate, slab_error,
                        solve_spacetime, spatial_l2_error, step_implicit)

CRITERIA = ("indicator", "majorant", "error")


def _indicator(rep, criterion, err_cells):
    if criterion == "indicator":
        return rep.per_cell_md
    if criterion == "majorant":
        return rep.per_cell_total
    return err_cells


def _mark(indicators, marking, theta):
    if marking == "bulk":
        return mark_bulk(indicators, theta)
    if marking == "average":
        return mark_average(indicators)
    raise ValueError(f"unknown marking {marking!r}")


@dataclass
class SlabRecord:
    """Accepted result on one slab."""

    k: int
    mesh: object
    report: object
    slab: SlabSolution
    e_d: float | None = None
    accumulated_majorant: float = 0.0
    accumulated_error: float | None = None
    n_refinements: int = 0


@dataclass
class AdaptResult:
    records: list = field(default_factory=list)

    @property
    def meshes(self):
        return [r.mesh for r in self.records]

    @property
    def reports(self):
        return [r.report for r in self.records]


def adapt_slab_loop(spec, space: FESpace, grid, params: MajorantParams = None, marking="bulk",
                    theta=0.3, criterion="indicator", max_ref_per_slab=1, on_record=None):
    """Time stepping with spatial refinement on every slab.

    On each slab the step is solved and the majorant minimised; cells are then
    marked from ``per_cell_md`` (``criterion="indicator"``) or from the true
    per-cell energy error (``criterion="error"``), the mesh is refined, the
    start-of-slab data are transferred and the slab is solved again, up to
    ``max_ref_per_slab`` times. The refined mesh carries over to the next slab.
    ``criterion="majorant"`` marks by the per-cell total instead of ``m_d``.
    ``on_record`` is called with each accepted slab record.
    """
    params = params or MajorantParams()
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}")
    if criterion == "error" and spec.exact_u is None:
        raise ValueError("criterion 'error' needs an exact solution")
    v = interpolate(spec.u0, space, 0.0)
    fs = flux_space_for(space.mesh, params.flux_degree, spec.dim)
    y = project_flux(spec, v, fs)
    op = SpatialOperator(spec, space)
    out = AdaptResult()
    run_m, run_e = 0.0, 0.0
    for k, t_k, tau in grid.slabs():
        n_ref = 0
        while True:
            v1 = step_implicit(spec, space, v, t_k, tau, op)
            slab = SlabSolution(v, v1, t_k, tau, k)
            y1, rep = optimize_flux_slab(spec, slab, y, params)
            ed = None
            if spec.exact_u is not None:
                ed_cells, edel, _ = slab_error(spec, slab)
                ed = ed_cells
            if n_ref >= max_ref_per_slab:
                break
            ind = _indicator(rep, criterion, ed)
            marked = _mark(ind, marking, theta)
            if len(marked) == 0:
                break
            mesh = refine(space.mesh, marked)
            space = FESpace(mesh, space.degree)
            fs = flux_space_for(mesh, params.flux_degree, spec.dim)
            v = prolongate(v, space)
            y = prolongate(y, fs)
            op = SpatialOperator(spec, space)
            n_ref += 1
        run_m += rep.total
        acc_e = None
        if ed is not None:
            run_e += (2 - params.nu) * ed.sum() + (2 - 1 / params.gamma) * edel.sum()
            acc_e = run_e + spec.sigma * spatial_l2_error(spec, v1, t_k + tau)
            s, r = efficiency_index(run_m, acc_e)
            rep = replace(rep, error_combined=acc_e, i_eff_sqrt=s, i_eff_ratio=r)
        out.records.append(SlabRecord(k, space.mesh, rep, slab, None if ed is None else float(ed.sum()),
                                      run_m, acc_e, n_ref))
        if on_record is not None:
            on_record(out.records[-1])
        v, y = v1, y1
    return out


@dataclass
class SpacetimeRecord:
    mesh: object
    report: object
    v: object
    error: object = None


def adapt_spacetime_loop(spec, st_mesh, params: MajorantParams = None, marking="bulk", theta=0.3,
                         criterion="indicator", n_ref=8, supg=0.0, on_record=None):
    """Solve, estimate, mark and refine on space-time meshes ``n_ref`` times.

    Returns ``n_ref + 1`` records; the flux of each step seeds the next.
    ``on_record`` is called with each record as soon as it exists.
    """
    params = params or MajorantParams()
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {CRITERIA}")
    if criterion == "error" and spec.exact_u is None:
        raise ValueError("criterion 'error' needs an exact solution")
    out = []
    mesh = st_mesh
    y = None
    for it in range(n_ref + 1):
        v = solve_spacetime(spec, mesh, supg=supg)
        y, rep = optimize_flux_spacetime(spec, v, params, y_init=y)
        err = energy_error(spec, v, params.nu, params.gamma) if spec.exact_u is not None else None
        out.append(SpacetimeRecord(mesh, rep, v, err))
        if on_record is not None:
            on_record(out[-1])
        if it == n_ref:
            break
        ind = _indicator(rep, criterion, None if err is None else err.per_cell_d)
        marked = _mark(ind, marking, theta)
        if len(marked) == 0:
            break
        mesh = refine(mesh, marked)
        y = prolongate(y, flux_space_for(mesh, params.flux_degree, spec.dim))
    return out
