"""
Simplicial meshes in one, two and three dimensions.

Cells are stored with a vertex ordering and an integer tag that together fix
the refinement edge (bisection of ``cells[i, 0]`` -- ``cells[i, tag[i]]``).
Refinement is local bisection with recursive closure, which reduces to
newest-vertex bisection for triangles.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

DIRICHLET = "dirichlet"


@dataclass(frozen=True, eq=False)
class SimplicialMesh:
    """Conforming simplicial mesh.

    Attributes
    ----------
    vertices : (nv, dim) float array
    cells : (nc, dim+1) int array, ordered for bisection
    tags : (nc,) int array, refinement tag per cell (1..dim)
    boundary_facets : (nf, dim) int array
    boundary_tags : (nf,) str array
    parent : (nc,) int array or None
        Index of the ancestor cell in the mesh this one was refined from.
    """

    vertices: np.ndarray
    cells: np.ndarray
    tags: np.ndarray
    boundary_facets: np.ndarray
    boundary_tags: np.ndarray
    parent: np.ndarray | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def n_cells(self):
        return self.cells.shape[0]

    @property
    def refinement_edges(self):
        idx = np.arange(self.n_cells)
        return np.stack([self.cells[:, 0], self.cells[idx, self.tags]], axis=1)

    def _cached(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    @property
    def jacobians(self):
        """(nc, dim, dim) with columns ``x_i - x_0``."""
        def make():
            x = self.vertices[self.cells]
            return np.transpose(x[:, 1:, :] - x[:, :1, :], (0, 2, 1))
        return self._cached("jac", make)

    @property
    def volumes(self):
        def make():
            d = self.dim
            return np.abs(np.linalg.det(self.jacobians)) / math.factorial(d)
        return self._cached("vol", make)

    @property
    def diameters(self):
        """Longest edge length per cell."""
        def make():
            x = self.vertices[self.cells]
            h = np.zeros(self.n_cells)
            for a, b in itertools.combinations(range(self.dim + 1), 2):
                h = np.maximum(h, np.linalg.norm(x[:, a] - x[:, b], axis=1))
            return h
        return self._cached("diam", make)

    @property
    def barycentric_gradients(self):
        """(nc, dim+1, dim): gradient of each barycentric coordinate."""
        def make():
            inv = np.linalg.inv(self.jacobians)  # rows = grad xi_i
            g0 = -inv.sum(axis=1, keepdims=True)
            return np.concatenate([g0, inv], axis=1)
        return self._cached("bgrad", make)

    @property
    def local_edges(self):
        return list(itertools.combinations(range(self.dim + 1), 2))

    @property
    def edges(self):
        """Unique edges (ne, 2) and the cell-to-edge map (nc, n_local_edges)."""
        def make():
            loc = self.local_edges
            e = np.sort(self.cells[:, loc], axis=2).reshape(-1, 2)
            uniq, inv = np.unique(e, axis=0, return_inverse=True)
            return uniq, inv.reshape(self.n_cells, len(loc))
        return self._cached("edges", make)

    def map_to_physical(self, bary):
        """Physical coordinates of barycentric points: (nc, nq, dim)."""
        x = self.vertices[self.cells]
        return np.einsum("qa,cad->cqd", bary, x)

    def boundary_facets_tagged(self, tag):
        return self.boundary_facets[self.boundary_tags == tag]

    def total_measure(self):
        return float(self.volumes.sum())

    def bounding_box(self):
        return self.vertices.min(axis=0), self.vertices.max(axis=0)


@dataclass(frozen=True)
class MarkedSet:
    """Cells selected for refinement and the rule that picked them."""

    cell_indices: frozenset
    theta: float | str

    def __len__(self):
        return len(self.cell_indices)

    def __contains__(self, i):
        return i in self.cell_indices


# --- construction -------------------------------------------------------------


def _facet_key(f):
    return tuple(sorted(int(v) for v in f))


def _boundary_from_cells(cells):
    """Facets that belong to exactly one cell."""
    nc, m = cells.shape
    fac = np.concatenate([np.delete(cells, i, axis=1) for i in range(m)])
    key = np.sort(fac, axis=1)
    uniq, inv, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    once = counts[inv.ravel()] == 1
    return fac[once]


def build_box_mesh(extents, divisions, dim=None, tagger=None) -> SimplicialMesh:
    """Structured Kuhn triangulation of an axis-aligned box.

    Each box cell is split into ``dim!`` simplices (intervals, 2 triangles,
    6 tetrahedra). Boundary facets are tagged ``"dirichlet"`` unless
    ``tagger(facet_centroid) -> str`` is given.
    """
    extents = [tuple(map(float, e)) for e in extents]
    if dim is None:
        dim = len(extents)
    if dim not in (1, 2, 3) or len(extents) != dim:
        raise ValueError("extents must list (min, max) for each of 1..3 axes")
    divisions = [int(n) for n in np.broadcast_to(divisions, (dim,))]
    if any(n < 1 for n in divisions):
        raise ValueError("divisions must be >= 1 per axis")
    for lo, hi in extents:
        if not hi > lo:
            raise ValueError("each extent must have max > min")
    axes = [np.linspace(lo, hi, n + 1) for (lo, hi), n in zip(extents, divisions)]
    grid = np.meshgrid(*axes, indexing="ij")
    vertices = np.stack([g.ravel() for g in grid], axis=1)
    shape = tuple(n + 1 for n in divisions)
    strides = np.array([int(np.prod(shape[k + 1:])) for k in range(dim)])

    corners = np.stack(
        [g.ravel() for g in np.meshgrid(*[np.arange(n) for n in divisions], indexing="ij")],
        axis=1,
    )
    base = corners @ strides
    cells = []
    for perm in itertools.permutations(range(dim)):
        path = [np.zeros(dim, dtype=int)]
        for p in perm:
            step = path[-1].copy()
            step[p] += 1
            path.append(step)
        offsets = [int(s @ strides) for s in path]
        cells.append(np.stack([base + o for o in offsets], axis=1))
    cells = np.stack(cells, axis=1).reshape(-1, dim + 1)
    tags = np.full(len(cells), dim, dtype=int)
    bf = _boundary_from_cells(cells)
    mesh = SimplicialMesh(vertices, cells, tags, bf, np.full(len(bf), DIRICHLET, dtype=object))
    if tagger is not None:
        mesh = retag_boundary(mesh, tagger)
    return mesh


def retag_boundary(mesh, tagger) -> SimplicialMesh:
    """Assign boundary tags from ``tagger(centroid)``."""
    cent = mesh.vertices[mesh.boundary_facets].mean(axis=1)
    tags = np.array([tagger(c) for c in cent], dtype=object)
    return SimplicialMesh(mesh.vertices, mesh.cells, mesh.tags, mesh.boundary_facets, tags, mesh.parent)


def _segments_intersect(p1, p2, q1, q2):
    def orient(a, b, c):
        return np.sign((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    if o1 != o2 and o3 != o4:
        return True

    def on_seg(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    return ((o1 == 0 and on_seg(p1, p2, q1)) or (o2 == 0 and on_seg(p1, p2, q2))
            or (o3 == 0 and on_seg(q1, q2, p1)) or (o4 == 0 and on_seg(q1, q2, p2)))


def _check_simple_polygon(poly):
    n = len(poly)
    if n < 3:
        raise ValueError("polygon needs at least 3 vertices")
    for i in range(n):
        a, b = poly[i], poly[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            if _segments_intersect(a, b, poly[j], poly[(j + 1) % n]):
                raise ValueError(f"polygon is self-intersecting (edges {i} and {j})")


def _order_longest_edge(vertices, cells):
    """Reorder triangles so the longest edge is (x0, x2)."""
    out = cells.copy()
    x = vertices[cells]
    for i in range(len(cells)):
        lens = [np.linalg.norm(x[i, a] - x[i, b]) for a, b in ((0, 1), (1, 2), (0, 2))]
        opp = [2, 0, 1][int(np.argmax(lens))]
        others = [v for k, v in enumerate(cells[i]) if k != opp]
        out[i] = (others[0], cells[i, opp], others[1])
    return out


def build_polygon_mesh(polygon, target_h, tag=DIRICHLET) -> SimplicialMesh:
    """Quality triangulation (minimum angle 20 degrees) of a simple polygon.

    The polygon is a closed loop of (x, y) vertices. Cells are bisected until
    no edge exceeds ``target_h``.
    """
    import triangle

    poly = np.asarray(polygon, dtype=float)
    _check_simple_polygon(poly)
    n = len(poly)
    segs = np.array([(i, (i + 1) % n) for i in range(n)])
    area = math.sqrt(3.0) / 4.0 * target_h ** 2
    out = triangle.triangulate({"vertices": poly, "segments": segs}, f"pq20a{area:.17g}Q")
    verts = np.asarray(out["vertices"], dtype=float)
    cells = _order_longest_edge(verts, np.asarray(out["triangles"], dtype=int))
    bf = _boundary_from_cells(cells)
    mesh = SimplicialMesh(verts, cells, np.full(len(cells), 2, dtype=int), bf,
                          np.full(len(bf), tag, dtype=object))
    for _ in range(50):
        long = np.flatnonzero(mesh.diameters > target_h * (1 + 1e-12))
        if len(long) == 0:
            break
        mesh = refine(mesh, MarkedSet(frozenset(long.tolist()), "size"))
    return replace_parent(mesh, None)


def replace_parent(mesh, parent):
    return SimplicialMesh(mesh.vertices, mesh.cells, mesh.tags, mesh.boundary_facets,
                          mesh.boundary_tags, parent)


# --- refinement ---------------------------------------------------------------


class _Refiner:
    def __init__(self, mesh):
        self.dim = mesh.dim
        self.verts = [tuple(v) for v in mesh.vertices]
        self.cell_v = [tuple(int(i) for i in c) for c in mesh.cells]
        self.cell_t = [int(t) for t in mesh.tags]
        self.alive = [True] * mesh.n_cells
        self.anc = list(range(mesh.n_cells))
        self.edge_cells = {}
        for cid in range(mesh.n_cells):
            self._register(cid)
        self.mid = {}
        self.bfacets = {
            _facet_key(f): t for f, t in zip(mesh.boundary_facets, mesh.boundary_tags)
        }

    def _edges(self, cid):
        v = self.cell_v[cid]
        return [(min(a, b), max(a, b)) for a, b in itertools.combinations(v, 2)]

    def _register(self, cid):
        for e in self._edges(cid):
            self.edge_cells.setdefault(e, set()).add(cid)

    def _unregister(self, cid):
        for e in self._edges(cid):
            s = self.edge_cells[e]
            s.discard(cid)
            if not s:
                del self.edge_cells[e]

    def ref_edge(self, cid):
        v = self.cell_v[cid]
        a, b = v[0], v[self.cell_t[cid]]
        return (min(a, b), max(a, b))

    def bisect(self, cid, depth=0):
        if depth > 200:
            raise RuntimeError("refinement closure did not terminate")
        e = self.ref_edge(cid)
        while True:
            bad = sorted(c for c in self.edge_cells.get(e, ()) if self.ref_edge(c) != e)
            if not bad:
                break
            self.bisect(bad[0], depth + 1)
        self._split_edge(e)

    def _split_edge(self, e):
        p, q = e
        z = len(self.verts)
        self.verts.append(tuple((np.array(self.verts[p]) + np.array(self.verts[q])) / 2.0))
        self.mid[e] = z
        for cid in sorted(self.edge_cells[e]):
            self._split_cell(cid, z)
        for key in [k for k in self.bfacets if p in k and q in k]:
            tag = self.bfacets.pop(key)
            self.bfacets[_facet_key([z if v == p else v for v in key])] = tag
            self.bfacets[_facet_key([z if v == q else v for v in key])] = tag

    def _split_cell(self, cid, z):
        v = self.cell_v[cid]
        k = self.cell_t[cid]
        n = self.dim
        c1 = v[:k] + (z,) + v[k + 1:]
        c2 = v[1:k + 1] + (z,) + v[k + 1:]
        nt = k - 1 if k > 1 else n
        self._unregister(cid)
        self.alive[cid] = False
        for c in (c1, c2):
            self.cell_v.append(c)
            self.cell_t.append(nt)
            self.alive.append(True)
            self.anc.append(self.anc[cid])
            self._register(len(self.cell_v) - 1)

    def result(self):
        keep = [i for i, a in enumerate(self.alive) if a]
        cells = np.array([self.cell_v[i] for i in keep], dtype=int).reshape(-1, self.dim + 1)
        tags = np.array([self.cell_t[i] for i in keep], dtype=int)
        parent = np.array([self.anc[i] for i in keep], dtype=int)
        keys = sorted(self.bfacets)
        bf = np.array(keys, dtype=int).reshape(-1, self.dim)
        bt = np.array([self.bfacets[k] for k in keys], dtype=object)
        verts = np.array(self.verts, dtype=float).reshape(-1, self.dim)
        return SimplicialMesh(verts, cells, tags, bf, bt, parent)


def refine(mesh: SimplicialMesh, marked) -> SimplicialMesh:
    """Bisect every marked cell, adding closure bisections to keep conformity.

    The returned mesh carries ``parent`` (ancestor cell in ``mesh``).
    """
    ids = sorted(marked.cell_indices if isinstance(marked, MarkedSet) else marked)
    if any(i < 0 or i >= mesh.n_cells for i in ids):
        raise IndexError("marked cell index out of range")
    r = _Refiner(mesh)
    for cid in ids:
        if r.alive[cid]:
            r.bisect(cid)
    return r.result()


def refine_uniform(mesh, times=1):
    """Bisect every cell ``times`` rounds; parent refers to the input mesh."""
    parent = np.arange(mesh.n_cells)
    for _ in range(times):
        mesh = refine(mesh, MarkedSet(frozenset(range(mesh.n_cells)), 1.0))
        parent = parent[mesh.parent]
    return replace_parent(mesh, parent)


# --- marking ------------------------------------------------------------------


def _check_indicators(ind):
    ind = np.asarray(ind, dtype=float)
    if ind.ndim != 1 or not np.all(np.isfinite(ind)) or np.any(ind < 0):
        raise ValueError("indicators must be a finite, non-negative 1-d array")
    return ind


def mark_bulk(indicators, theta) -> MarkedSet:
    """Doerfler marking: smallest set of largest cells holding ``theta`` of the total."""
    ind = _check_indicators(indicators)
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    total = ind.sum()
    if total == 0:
        return MarkedSet(frozenset(), theta)
    order = np.lexsort((np.arange(len(ind)), -ind))
    csum = np.cumsum(ind[order])
    # tolerate round-off in the final comparison
    n = int(np.searchsorted(csum, theta * total * (1 - 1e-14), side="left")) + 1
    chosen = [int(i) for i in order[:n] if ind[i] > 0]
    return MarkedSet(frozenset(chosen), theta)


def mark_average(indicators) -> MarkedSet:
    """Cells whose indicator strictly exceeds the mean."""
    ind = _check_indicators(indicators)
    if len(ind) == 0:
        return MarkedSet(frozenset(), "average")
    mean = ind.mean()
    return MarkedSet(frozenset(np.flatnonzero(ind > mean).tolist()), "average")


def transfer_indicator(child_parent, parent_values):
    """Split each parent's value equally among its children."""
    child_parent = np.asarray(child_parent)
    counts = np.bincount(child_parent, minlength=len(parent_values))
    return np.asarray(parent_values, dtype=float)[child_parent] / counts[child_parent]


# --- auditing -----------------------------------------------------------------


def audit_mesh(mesh: SimplicialMesh, rtol=1e-12):
    """Raise ``AssertionError`` unless the mesh is conforming and non-degenerate.

    Walks every facet: interior facets must be shared by exactly two cells,
    facets of a single cell must be recorded boundary facets and vice versa.
    """
    vol = mesh.volumes
    scale = mesh.diameters ** mesh.dim
    if np.any(vol <= rtol * scale):
        raise AssertionError("degenerate cell")
    counts = {}
    for c in mesh.cells:
        for i in range(mesh.dim + 1):
            key = _facet_key(np.delete(c, i))
            counts[key] = counts.get(key, 0) + 1
    if any(n > 2 for n in counts.values()):
        raise AssertionError("facet shared by more than two cells")
    single = {k for k, n in counts.items() if n == 1}
    recorded = {_facet_key(f) for f in mesh.boundary_facets}
    if single != recorded:
        raise AssertionError(
            f"{len(single - recorded)} unmatched open facets (hanging nodes), "
            f"{len(recorded - single)} stale boundary facets"
        )
    used = np.zeros(mesh.n_vertices, dtype=bool)
    used[mesh.cells.ravel()] = True
    if not used.all():
        raise AssertionError("unused vertices")


# --- text format --------------------------------------------------------------


def write_mesh(mesh: SimplicialMesh, path):
    """Text format: header, vertices, cells (+ refinement tag), boundary facets + tag."""
    lines = [f"{mesh.dim} {mesh.n_vertices} {mesh.n_cells}"]
    for v in mesh.vertices:
        lines.append(" ".join(repr(float(c)) for c in v))
    for c, t in zip(mesh.cells, mesh.tags):
        lines.append(" ".join(str(int(i)) for i in c) + f" {int(t)}")
    for f, t in zip(mesh.boundary_facets, mesh.boundary_tags):
        lines.append(" ".join(str(int(i)) for i in f) + f" {t}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path) -> SimplicialMesh:
    with open(path) as fh:
        rows = [ln.split() for ln in fh if ln.strip()]
    dim, nv, nc = (int(s) for s in rows[0])
    verts = np.array([[float(s) for s in r] for r in rows[1:1 + nv]], dtype=float).reshape(nv, dim)
    crow = rows[1 + nv:1 + nv + nc]
    cells = np.array([[int(s) for s in r[:dim + 1]] for r in crow], dtype=int).reshape(nc, dim + 1)
    tags = np.array([int(r[dim + 1]) if len(r) > dim + 1 else dim for r in crow], dtype=int)
    frow = rows[1 + nv + nc:]
    bf = np.array([[int(s) for s in r[:dim]] for r in frow], dtype=int).reshape(-1, dim)
    bt = np.array([r[dim] for r in frow], dtype=object)
    return SimplicialMesh(verts, cells, tags, bf, bt)


def friedrichs_constant_box(lengths):
    """``(pi^2 * sum 1/L_i^2)^(-1/2)`` for a box with side lengths ``L_i``."""
    lengths = np.asarray(lengths, dtype=float)
    return float(1.0 / (math.pi * math.sqrt(np.sum(1.0 / lengths ** 2))))
