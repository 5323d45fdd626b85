from math import factorial

import numpy as np
import pytest
import scipy.integrate as si
import sympy
from oracles import X, Y, duffy_rule, single_cell_mesh, sym_basis, sym_integrate

from parabolic_majorant.expr import parse_expr
from parabolic_majorant.fem import (DiscreteField, FESpace, assemble_convection, assemble_div_div,
                                    assemble_g, assemble_mass, assemble_stiffness,
                                    assemble_vector_mass, assemble_z, interpolate, prolongate,
                                    time_moment_F)
from parabolic_majorant.mesh import build_box_mesh, build_polygon_mesh, refine
from parabolic_majorant.problem import L_SHAPE, PI_SHAPE
from parabolic_majorant.quadrature import gauss_legendre01, simplex_quadrature

TRI = [(0.1, 0.0), (1.3, 0.2), (0.4, 0.9)]


def dense(M):
    return M.toarray()


# --- quadrature --------------------------------------------------------------------

@pytest.mark.parametrize("dim", [1, 2, 3])
@pytest.mark.parametrize("degree", [0, 1, 2, 4, 6, 8])
def test_simplex_quadrature_exactness(dim, degree):
    q = simplex_quadrature(dim, degree)
    assert q.weights.sum() == pytest.approx(1 / factorial(dim), rel=1e-14)
    assert np.all(q.weights > 0)
    xi = q.reference_points
    for exps in np.ndindex(*([degree + 1] * dim)):
        if sum(exps) > degree:
            continue
        exact = np.prod([factorial(a) for a in exps]) / factorial(sum(exps) + dim)
        val = q.weights @ np.prod(xi ** np.array(exps), axis=1)
        assert val == pytest.approx(exact, rel=1e-13, abs=1e-16)


def test_gauss_legendre01():
    s, w = gauss_legendre01(4)
    for p in range(8):
        assert w @ s ** p == pytest.approx(1 / (p + 1), rel=1e-14)


# --- stiffness ------------------------------------------------------------------------

def test_stiffness_1d_hat():
    m = build_box_mesh([(0, 1)], [2])
    K = dense(assemble_stiffness(FESpace(m, 1)))
    np.testing.assert_allclose(K, [[2, -2, 0], [-2, 4, -2], [0, -2, 2]], atol=1e-14)


@pytest.mark.parametrize("degree", [1, 2])
def test_stiffness_kernel_and_symmetry(degree):
    m = build_polygon_mesh(L_SHAPE, 0.5)
    K = dense(assemble_stiffness(FESpace(m, degree)))
    np.testing.assert_allclose(K.sum(axis=1), 0, atol=1e-12)
    np.testing.assert_allclose(K, K.T, rtol=0, atol=1e-13 * abs(K).max())
    assert np.linalg.eigvalsh(K).min() > -1e-10


@pytest.mark.parametrize("degree", [1, 2])
def test_stiffness_anisotropic_symbolic(degree):
    m = single_cell_mesh(TRI)
    sp_ = FESpace(m, degree)
    K = dense(assemble_stiffness(sp_, np.diag([1.0, 10.0])))
    phi = sym_basis(TRI, degree)
    loc = sp_.scalar_dof_map[0]
    for i, pi in enumerate(phi):
        for j, pj in enumerate(phi):
            ref = sym_integrate(sympy.diff(pi, X) * sympy.diff(pj, X)
                                + 10 * sympy.diff(pi, Y) * sympy.diff(pj, Y), TRI)
            assert K[loc[i], loc[j]] == pytest.approx(float(ref), rel=1e-12, abs=1e-13)


def test_stiffness_rejects_non_spd():
    m = build_box_mesh([(0, 1), (0, 1)], [2, 2])
    with pytest.raises(ValueError):
        assemble_stiffness(FESpace(m, 1), np.array([[1.0, 0.0], [0.0, -1.0]]), check=True)


def test_galerkin_consistency_p2():
    # u quadratic is reproduced; (K u)_i = (-lap u, phi_i) on interior DOFs
    m = build_box_mesh([(0, 1), (0, 1)], [3, 3])
    sp_ = FESpace(m, 2)
    u = interpolate(parse_expr("x^2 + 3*x*y - 2*y^2 + x"), sp_)
    Ku = assemble_stiffness(sp_) @ u.dofs
    lap = 2 - 4
    load = -lap * np.asarray(assemble_mass(sp_).sum(axis=1)).ravel()
    interior = np.setdiff1d(np.arange(sp_.n_dofs), sp_.boundary_dofs())
    np.testing.assert_allclose(Ku[interior], load[interior], atol=1e-12)


# --- mass -------------------------------------------------------------------------------

def test_mass_1d_element():
    h = 0.3
    M = dense(assemble_mass(FESpace(build_box_mesh([(0, h)], [1]), 1)))
    np.testing.assert_allclose(M, h / 6 * np.array([[2, 1], [1, 2]]), rtol=1e-14)


def test_mass_partition_of_unity():
    m = build_polygon_mesh(PI_SHAPE, 0.5)
    w = parse_expr("1 + x^2 + y")
    for deg in (1, 2):
        M = assemble_mass(FESpace(m, deg), w)
        total = 0.0
        for c in m.cells:
            p, ww = duffy_rule(m.vertices[c], 10)
            total += ww @ w(p)
        assert M.sum() == pytest.approx(total, rel=1e-12)


def test_mass_p2_symbolic():
    m = single_cell_mesh(TRI)
    sp_ = FESpace(m, 2)
    M = dense(assemble_mass(sp_))
    phi = sym_basis(TRI, 2)
    loc = sp_.scalar_dof_map[0]
    for i, pi in enumerate(phi):
        for j, pj in enumerate(phi):
            assert M[loc[i], loc[j]] == pytest.approx(float(sym_integrate(pi * pj, TRI)),
                                                      rel=1e-12, abs=1e-14)


# --- flux matrices ----------------------------------------------------------------------

def test_div_div_kernel():
    m = build_box_mesh([(0, 1), (0, 1)], [3, 3])
    for deg in (1, 2):
        fs = FESpace(m, deg, components=2)
        S = assemble_div_div(fs)
        y = interpolate(lambda p, t: np.stack([p[..., 1] ** 2, p[..., 0]], axis=-1), fs)
        assert y.dofs @ (S @ y.dofs) == pytest.approx(0.0, abs=1e-12)
        assert abs(S - S.T).max() <= 1e-13 * abs(S).max()
    with pytest.raises(ValueError):
        assemble_div_div(FESpace(m, 1))


def test_div_div_1d_p2_symbolic():
    ends = [(0.2,), (0.7,)]
    m = single_cell_mesh(ends)
    fs = FESpace(m, 2, components=1, vector=True)
    S = dense(assemble_div_div(fs))
    phi = sym_basis(ends, 2)
    loc = fs.scalar_dof_map[0]
    for i, pi in enumerate(phi):
        for j, pj in enumerate(phi):
            ref = sym_integrate(sympy.diff(pi, X) * sympy.diff(pj, X), ends)
            assert S[loc[i], loc[j]] == pytest.approx(float(ref), rel=1e-12)


def test_div_div_gram_two_triangles():
    m = build_box_mesh([(0, 1), (0, 1)], [1, 1])
    fs = FESpace(m, 1, components=2)
    S = dense(assemble_div_div(fs))
    # divergence of each basis function is constant per cell: brute-force Gram matrix
    G = np.zeros_like(S)
    bg = m.barycentric_gradients
    for c in range(m.n_cells):
        d = np.zeros(fs.n_dofs)
        for comp in range(2):
            for a, v in enumerate(m.cells[c]):
                d[comp * m.n_vertices + v] = bg[c, a, comp]
        G += m.volumes[c] * np.outer(d, d)
    np.testing.assert_allclose(S, G, atol=1e-14)


def test_vector_mass():
    m = build_polygon_mesh(L_SHAPE, 0.7)
    for deg in (1, 2):
        fs = FESpace(m, deg, components=2)
        K = dense(assemble_vector_mass(fs))
        Ms = dense(assemble_mass(FESpace(m, deg)))
        n = fs.n_scalar
        np.testing.assert_allclose(K[:n, :n], Ms, atol=1e-15)
        np.testing.assert_allclose(K[n:, n:], Ms, atol=1e-15)
        assert abs(K[:n, n:]).max() == 0
        assert np.linalg.eigvalsh(K).min() > 0
        K2 = dense(assemble_vector_mass(fs, np.diag([1.0, 0.1])))
        np.testing.assert_allclose(K2[:n, :n], Ms, atol=1e-15)
        np.testing.assert_allclose(K2[n:, n:], 0.1 * Ms, atol=1e-15)


# --- right-hand sides -------------------------------------------------------------------

def test_time_moment_F():
    m = build_box_mesh([(0, 1), (0, 1)], [2, 2])
    tau, tk = 0.3, 0.7
    np.testing.assert_allclose(time_moment_F(parse_expr("1"), m, tk, tau), tau ** 2 / 2, rtol=1e-14)
    np.testing.assert_allclose(time_moment_F(parse_expr(f"t-{tk}"), m, tk, tau), tau ** 3 / 3,
                               rtol=1e-13)


def test_time_moment_F_ex4_against_adaptive_quadrature():
    f = parse_expr("t*sin(t)*sin(pi*x)+t*cos(t)*sin(pi*y)")
    pt = np.array([[0.3, 0.45]])
    tk, tau = 1.1, 0.1
    val = time_moment_F(f, pt, tk, tau)[0]
    ref, _ = si.quad(lambda t: float(f(pt, t)[0]) * (t - tk), tk, tk + tau, epsabs=0, epsrel=1e-13)
    assert val == pytest.approx(ref, rel=1e-10)


def _ex1_fields(m, tau):
    sp_ = FESpace(m, 1)
    u = parse_expr("x*(1-x)*y*(1-y)*(t^2+t+1)")
    return sp_, interpolate(u, sp_, 0.0), interpolate(u, sp_, tau)


def test_assemble_z_zero_and_oracle():
    m = build_box_mesh([(0, 1), (0, 1)], [1, 1])
    fs = FESpace(m, 2, components=2)
    sp_ = FESpace(m, 1)
    v = interpolate(parse_expr("x+y"), sp_)
    z = assemble_z(fs, np.zeros(m.n_vertices), v, v, 0.2)
    np.testing.assert_array_equal(z, 0.0)
    tau = 0.25
    f = parse_expr("2*(x*(1-x)+y*(1-y))*(t^2+t+1) + x*(1-x)*y*(1-y)*(2*t+1)")
    F = time_moment_F(f, m, 0.0, tau)
    sp_, vk, vk1 = _ex1_fields(m, tau)
    z = assemble_z(fs, F, vk, vk1, tau)
    # brute force: P1 interpolants and basis divergences at a dense Duffy rule
    ref = np.zeros(fs.n_dofs)
    for c, cell in enumerate(m.cells):
        pts, w = duffy_rule(m.vertices[cell], 10)
        bary = np.linalg.solve(np.vstack([np.ones(3), m.vertices[cell].T]),
                               np.vstack([np.ones(len(pts)), pts.T])).T
        q = bary @ (F[cell] + (vk.dofs[cell] - vk1.dofs[cell]) * tau / 2)
        bg = m.barycentric_gradients[c]
        loc = fs.scalar_dof_map[c]
        pairs = [(0, 1), (0, 2), (1, 2)]
        for comp in range(2):
            for a in range(3):
                div = (4 * bary[:, a] - 1) * bg[a, comp]
                ref[comp * fs.n_scalar + loc[a]] += w @ (q * div)
            for k, (a, b) in enumerate(pairs):
                div = 4 * (bary[:, b] * bg[a, comp] + bary[:, a] * bg[b, comp])
                ref[comp * fs.n_scalar + loc[3 + k]] += w @ (q * div)
    np.testing.assert_allclose(z, ref, rtol=1e-10, atol=1e-14)
    other = interpolate(parse_expr("1"), FESpace(build_box_mesh([(0, 1), (0, 1)], [2, 2]), 1))
    with pytest.raises(ValueError):
        assemble_z(fs, F, vk, other, tau)


def test_assemble_g():
    m = build_box_mesh([(0, 1), (0, 1)], [2, 2])
    fs = FESpace(m, 2, components=2)
    sp_ = FESpace(m, 1)
    c = interpolate(parse_expr("3"), sp_)
    np.testing.assert_allclose(assemble_g(fs, c, c), 0, atol=1e-14)
    zero = interpolate(parse_expr("0"), sp_)
    lin = interpolate(parse_expr("x"), sp_)
    g = assemble_g(fs, zero, lin)
    ones = np.ones(fs.n_scalar)
    int_phi = np.asarray(assemble_mass(FESpace(m, 2)) @ ones).ravel()
    np.testing.assert_allclose(g[:fs.n_scalar], int_phi, atol=1e-14)
    np.testing.assert_allclose(g[fs.n_scalar:], 0, atol=1e-14)
    a, b = interpolate(parse_expr("x*y"), sp_), interpolate(parse_expr("x-y^2"), sp_)
    np.testing.assert_allclose(assemble_g(fs, 2 * a, 2 * b), 2 * assemble_g(fs, a, b), rtol=1e-14)
    # (grad v1 + grad v0 / 2, phi) with v0 = x, v1 = 0
    g2 = assemble_g(fs, lin, zero)
    np.testing.assert_allclose(g2[:fs.n_scalar], 0.5 * int_phi, atol=1e-14)


def test_convection_constant_b():
    # (b . grad u, 1) = int b . grad u, for u = x + 2y and b = (1, 1): 3 * |Omega|
    m = build_box_mesh([(0, 1), (0, 2)], [3, 4])
    sp_ = FESpace(m, 1)
    C = assemble_convection(sp_, np.array([1.0, 1.0]))
    u = interpolate(parse_expr("x + 2*y"), sp_)
    assert np.ones(sp_.n_dofs) @ (C @ u.dofs) == pytest.approx(6.0, rel=1e-13)


# --- fields and transfer ----------------------------------------------------------------

def test_interpolation_reproduces_polynomials():
    m = build_polygon_mesh(L_SHAPE, 0.5)
    lin = parse_expr("2*x - y + 0.5")
    v = interpolate(lin, FESpace(m, 1))
    tab = v.space.tabulate()
    np.testing.assert_allclose(v.values(tab), lin(tab.x), atol=1e-13)
    np.testing.assert_allclose(v.gradients(tab), np.broadcast_to([2.0, -1.0], tab.x.shape), atol=1e-12)
    const = interpolate(parse_expr("7"), FESpace(m, 2))
    assert np.all(const.dofs == 7.0)
    quad = parse_expr("x^2 - x*y")
    q2 = interpolate(quad, FESpace(m, 2))
    tab2 = q2.space.tabulate()
    np.testing.assert_allclose(q2.values(tab2), quad(tab2.x), atol=1e-13)


def test_prolongation_is_exact_for_nested_spaces():
    m = build_box_mesh([(0, 1), (0, 1)], [2, 2])
    fine = refine(m, [0, 3, 5])
    for deg, comps in ((1, 1), (2, 1), (2, 2)):
        coarse = FESpace(m, deg, components=comps)
        fine_sp = FESpace(fine, deg, components=comps)
        rng = np.random.default_rng(deg + comps)
        v = DiscreteField(coarse, rng.standard_normal(coarse.n_dofs))
        w = prolongate(v, fine_sp)
        # compare at the quadrature points of the fine mesh, which lie in known coarse cells
        tab_f = fine_sp.tabulate()
        from parabolic_majorant.fem import evaluate_in_cells
        pts = tab_f.x.reshape(-1, 2)
        owner = np.repeat(fine.parent, tab_f.x.shape[1])
        ref = evaluate_in_cells(v, owner, pts)
        np.testing.assert_allclose(w.values(tab_f).reshape(ref.shape), ref, atol=1e-12)


def test_dof_map_conformity():
    m = refine(build_polygon_mesh(L_SHAPE, 0.6), [1, 2, 8])
    sp_ = FESpace(m, 2)
    sdm = sp_.scalar_dof_map
    assert set(np.unique(sdm)) == set(range(sp_.n_scalar))
    # each local node sits where the global DOF point is
    x = m.vertices[m.cells]
    pairs = m.local_edges
    local_pts = np.concatenate([x, np.stack([(x[:, a] + x[:, b]) / 2 for a, b in pairs], axis=1)],
                               axis=1)
    np.testing.assert_allclose(sp_.dof_points[sdm], local_pts, atol=1e-14)


def test_discrete_field_validation():
    sp_ = FESpace(build_box_mesh([(0, 1)], [3]), 1)
    with pytest.raises(ValueError):
        DiscreteField(sp_, np.zeros(3))
    with pytest.raises(ValueError):
        DiscreteField(sp_, np.array([0, 1, np.inf, 0.0]))
