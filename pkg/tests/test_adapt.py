import numpy as np
import pytest

from parabolic_majorant.adapt import adapt_slab_loop, adapt_spacetime_loop
from parabolic_majorant.fem import FESpace
from parabolic_majorant.majorant import MajorantParams
from parabolic_majorant.mesh import mark_bulk, refine, refine_uniform
from parabolic_majorant.parabolic import SlabSolution, interpolate, slab_error, step_implicit
from parabolic_majorant.problem import TimeGrid, example


def _same_mesh(a, b):
    return np.array_equal(a.vertices, b.vertices) and np.array_equal(a.cells, b.cells)


@pytest.mark.parametrize("n", [4, 8])
def test_new_cells_sit_where_the_error_is_large(n):
    spec = example("ex1")
    space = FESpace(spec.domain.build_mesh(n), 1)
    tau = 0.05
    out = adapt_slab_loop(spec, space, TimeGrid.uniform(tau, 1), theta=0.3)
    fine = out.records[0].mesh
    v0 = interpolate(spec.u0, space)
    ed, _, _ = slab_error(spec, SlabSolution(v0, step_implicit(spec, space, v0, 0.0, tau), 0.0, tau, 0))
    children = np.bincount(fine.parent, minlength=space.mesh.n_cells)
    refined = children > 1
    top = ed >= np.quantile(ed, 0.75)
    frac = children[refined & top].sum() / children[refined].sum()
    assert frac >= 0.6


def test_theta_one_is_uniform_refinement():
    mesh = example("ex1").domain.build_mesh(3)
    ind = np.random.default_rng(0).uniform(0.1, 1.0, mesh.n_cells)
    marked = mark_bulk(ind, 1.0)
    assert len(marked) == mesh.n_cells
    assert _same_mesh(refine(mesh, marked), refine_uniform(mesh))


def test_lshape_grades_toward_reentrant_corner():
    spec = example("ex3")
    space = FESpace(spec.domain.build_mesh(h=0.5), 1)
    out = adapt_slab_loop(spec, space, TimeGrid.uniform(1.0, 6), theta=0.3)
    m = out.records[-1].mesh
    d = m.diameters
    i = int(np.argmin(d))
    centroid = m.vertices[m.cells[i]].mean(axis=0)
    assert np.linalg.norm(centroid) <= 2 * d[i]


def test_slab_loop_records_and_growth():
    spec = example("ex1")
    space = FESpace(spec.domain.build_mesh(4), 1)
    seen = []
    out = adapt_slab_loop(spec, space, TimeGrid.uniform(1.0, 4), theta=0.3, on_record=seen.append)
    assert seen == out.records
    counts = [r.mesh.n_cells for r in out.records]
    assert space.mesh.n_cells < counts[0] and all(a < b for a, b in zip(counts, counts[1:]))
    acc = [r.accumulated_majorant for r in out.records]
    assert all(a <= b for a, b in zip(acc, acc[1:]))
    for r in out.records:
        assert r.accumulated_error <= r.accumulated_majorant
        assert r.n_refinements == 1


def test_slab_loop_without_refinement_cap():
    spec = example("ex1")
    space = FESpace(spec.domain.build_mesh(4), 1)
    out = adapt_slab_loop(spec, space, TimeGrid.uniform(1.0, 2), theta=0.3, max_ref_per_slab=0)
    assert all(r.mesh is space.mesh for r in out.records)


@pytest.mark.parametrize("criterion", ["indicator", "majorant", "error"])
def test_spacetime_cell_count_strictly_increases(criterion):
    spec = example("ex8")
    st = spec.domain.build_spacetime_mesh(spec.T, 4)
    recs = adapt_spacetime_loop(spec, st, criterion=criterion, n_ref=4)
    counts = [r.mesh.n_cells for r in recs]
    assert len(recs) == 5
    assert all(a < b for a, b in zip(counts, counts[1:]))
    for r in recs:
        assert r.error.combined <= r.report.total


def test_error_and_indicator_criteria_agree():
    spec = example("ex8")
    st = spec.domain.build_spacetime_mesh(spec.T, 4)
    ind = adapt_spacetime_loop(spec, st, criterion="indicator", n_ref=8)[-1].error.e_d
    err = adapt_spacetime_loop(spec, st, criterion="error", n_ref=8)[-1].error.e_d
    assert abs(ind - err) <= 0.2 * min(ind, err)


def test_adaptive_runs_are_deterministic():
    spec = example("ex3")
    space = FESpace(spec.domain.build_mesh(h=0.5), 1)
    a = adapt_slab_loop(spec, space, TimeGrid.uniform(1.0, 3), theta=0.3)
    b = adapt_slab_loop(spec, space, TimeGrid.uniform(1.0, 3), theta=0.3)
    for ra, rb in zip(a.records, b.records):
        assert _same_mesh(ra.mesh, rb.mesh)
        assert ra.report.total == rb.report.total
    spec = example("ex8")
    st = spec.domain.build_spacetime_mesh(spec.T, 4)
    a = adapt_spacetime_loop(spec, st, n_ref=5)
    b = adapt_spacetime_loop(spec, st, n_ref=5)
    assert all(_same_mesh(x.mesh, y.mesh) and x.report.total == y.report.total for x, y in zip(a, b))


def test_average_marking_path():
    spec = example("ex5")
    st = spec.domain.build_spacetime_mesh(spec.T, 2)
    recs = adapt_spacetime_loop(spec, st, marking="average", n_ref=2)
    assert recs[0].mesh.n_cells < recs[1].mesh.n_cells < recs[2].mesh.n_cells


def test_bad_arguments():
    spec = example("ex4")
    space = FESpace(spec.domain.build_mesh(h=0.8), 1)
    with pytest.raises(ValueError):
        adapt_slab_loop(spec, space, TimeGrid.uniform(2.0, 1), criterion="error")
    with pytest.raises(ValueError):
        adapt_slab_loop(spec, space, TimeGrid.uniform(2.0, 1), criterion="residual")
    spec = example("ex5")
    with pytest.raises(ValueError):
        adapt_spacetime_loop(spec, spec.domain.build_spacetime_mesh(spec.T, 2), marking="max")
