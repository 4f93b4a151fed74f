"""Nested uniform triangulations of the unit square.

Meshes are built from a structured ``n x n`` grid of squares, each cut
along its lower-left to upper-right diagonal, and refined by red
(4-to-1 midpoint) refinement.  Parent vertices keep their indices under
refinement and edge midpoints are appended, so every coarse P1 space is
a subspace of the fine one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangulation of the unit square.

    Attributes
    ----------
    vertices : (V, 2) float array
    triangles : (T, 3) int array, counterclockwise
    boundary_edges : (E_b, 2) int array
    boundary_node_ids : (V_b,) int array, counterclockwise from (0, 0)
    interior_node_ids : (V_i,) int array, ascending
    level : int
        Number of refinements applied to the coarsest mesh.
    parent : Mesh or None
    parent_edges : (V - V_parent, 2) int array
        Endpoints (in the parent numbering) of the edge each new vertex
        bisects.  Empty for a coarsest mesh.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_node_ids: np.ndarray
    interior_node_ids: np.ndarray
    level: int = 0
    parent: Mesh | None = field(default=None, repr=False)
    parent_edges: np.ndarray = field(
        default_factory=lambda: np.empty((0, 2), dtype=np.int64), repr=False)

    @property
    def num_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def num_triangles(self) -> int:
        return self.triangles.shape[0]

    def areas(self) -> np.ndarray:
        """Signed triangle areas (positive for counterclockwise)."""
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def edges(self) -> np.ndarray:
        """Unique undirected edges, sorted lexicographically."""
        return _unique_edges(self.triangles)[0]

    def is_refinement_of(self, other: Mesh) -> bool:
        m = self
        while m is not None:
            if m is other:
                return True
            m = m.parent
        return False

    def __repr__(self):
        return "Mesh(level={}, vertices={}, triangles={})".format(
            self.level, self.num_vertices, self.num_triangles)


def _unique_edges(triangles):
    """Return (edges, tri_to_edge) with tri_to_edge[k, i] the edge
    opposite local vertex ``i`` of triangle ``k``."""
    t = np.asarray(triangles)
    local = np.stack([t[:, [1, 2]], t[:, [2, 0]], t[:, [0, 1]]], axis=1)
    flat = np.sort(local.reshape(-1, 2), axis=1)
    edges, inverse = np.unique(flat, axis=0, return_inverse=True)
    return edges, inverse.reshape(-1, 3)


def _boundary_edges(triangles):
    edges, tri_to_edge = _unique_edges(triangles)
    counts = np.bincount(tri_to_edge.ravel(), minlength=edges.shape[0])
    if np.any(counts > 2):
        raise ValueError("non-manifold triangulation: edge shared by >2 triangles")
    return edges[counts == 1]


def _perimeter_parameter(p):
    # arc length along the boundary, counterclockwise from (0, 0)
    x, y = p[:, 0], p[:, 1]
    tol = BOUNDARY_TOL
    s = np.full(len(p), np.nan)
    bottom = np.abs(y) <= tol
    right = ~bottom & (np.abs(x - 1.0) <= tol)
    top = ~bottom & ~right & (np.abs(y - 1.0) <= tol)
    left = ~bottom & ~right & ~top & (np.abs(x) <= tol)
    s[bottom] = x[bottom]
    s[right] = 1.0 + y[right]
    s[top] = 3.0 - x[top]
    s[left] = 4.0 - y[left]
    return s


def _build(vertices, triangles, level=0, parent=None, parent_edges=None):
    vertices = np.ascontiguousarray(vertices, dtype=float)
    triangles = np.ascontiguousarray(triangles, dtype=np.int64)
    bedges = _boundary_edges(triangles)

    x, y = vertices[:, 0], vertices[:, 1]
    on_gamma = ((np.abs(x) <= BOUNDARY_TOL) | (np.abs(x - 1.0) <= BOUNDARY_TOL)
                | (np.abs(y) <= BOUNDARY_TOL) | (np.abs(y - 1.0) <= BOUNDARY_TOL))
    by_edges = np.zeros(len(vertices), dtype=bool)
    by_edges[bedges.ravel()] = True
    if not np.array_equal(on_gamma, by_edges):
        raise ValueError("boundary detection mismatch between coordinate "
                         "test and edge incidence")

    candidates = np.flatnonzero(on_gamma)
    s = _perimeter_parameter(vertices[candidates])
    bnodes = candidates[np.argsort(s, kind="stable")]
    inodes = np.flatnonzero(~on_gamma)
    for arr in (vertices, triangles, bedges, bnodes, inodes):
        arr.setflags(write=False)
    if parent_edges is None:
        parent_edges = np.empty((0, 2), dtype=np.int64)
    parent_edges.setflags(write=False)
    return Mesh(vertices, triangles, bedges, bnodes, inodes, level, parent,
                parent_edges)


def unit_square_mesh(n: int) -> Mesh:
    """Structured mesh of ``(0, 1)^2`` with ``2 n^2`` triangles."""
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer, got {!r}".format(n))
    n = int(n)
    t = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(t, t)
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    i, j = np.meshgrid(np.arange(n), np.arange(n))
    v00 = (j * (n + 1) + i).ravel()
    v10 = v00 + 1
    v01 = v00 + n + 1
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.stack([lower, upper], axis=1).reshape(-1, 3)
    return _build(vertices, triangles)


def refine_uniform(mesh: Mesh) -> Mesh:
    """Red refinement: split every triangle into four congruent children."""
    edges, tri_to_edge = _unique_edges(mesh.triangles)
    nv = mesh.num_vertices
    mid = 0.5 * (mesh.vertices[edges[:, 0]] + mesh.vertices[edges[:, 1]])
    vertices = np.vstack([mesh.vertices, mid])

    a, b, c = mesh.triangles.T
    # midpoint opposite local vertex i
    m_bc, m_ca, m_ab = (nv + tri_to_edge).T
    children = np.stack([
        np.column_stack([a, m_ab, m_ca]),
        np.column_stack([m_ab, b, m_bc]),
        np.column_stack([m_ca, m_bc, c]),
        np.column_stack([m_ab, m_bc, m_ca]),
    ], axis=1).reshape(-1, 3)
    return _build(vertices, children, mesh.level + 1, mesh, edges.copy())


def refine(mesh: Mesh, times: int) -> Mesh:
    for _ in range(times):
        mesh = refine_uniform(mesh)
    return mesh


def hierarchy(n0: int, refinements: int) -> list[Mesh]:
    """Coarse mesh ``unit_square_mesh(n0)`` and its ``refinements``
    successive uniform refinements."""
    meshes = [unit_square_mesh(n0)]
    for _ in range(refinements):
        meshes.append(refine_uniform(meshes[-1]))
    return meshes


def boundary_nodes(mesh: Mesh) -> np.ndarray:
    return mesh.boundary_node_ids


def mesh_size(mesh: Mesh) -> float:
    """Largest triangle diameter."""
    p = mesh.vertices[mesh.triangles]
    lengths = np.linalg.norm(p - np.roll(p, -1, axis=1), axis=2)
    return float(lengths.max())


def write_mesh(mesh: Mesh, path, values=None) -> None:
    """Write ``mesh`` as plain text: "V T", then vertices, then triangles.

    If ``values`` is given, each vertex line carries a third column with
    the nodal value.
    """
    with open(path, "w", newline="\n") as fh:
        fh.write("{} {}\n".format(mesh.num_vertices, mesh.num_triangles))
        for k, (x, y) in enumerate(mesh.vertices):
            if values is None:
                fh.write("{:.16g} {:.16g}\n".format(x, y))
            else:
                fh.write("{:.16g} {:.16g} {:.16g}\n".format(x, y, values[k]))
        for i, j, k in mesh.triangles:
            fh.write("{} {} {}\n".format(i, j, k))
