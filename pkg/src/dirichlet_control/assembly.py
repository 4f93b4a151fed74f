"""P1 element matrices, global assembly and load vectors."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .linalg import TripletBuffer, assemble_from_triplets
from .mesh import Mesh

_MASS_REF = np.array([[2.0, 1.0, 1.0], [1.0, 2.0, 1.0], [1.0, 1.0, 2.0]]) / 12.0


@dataclass(frozen=True)
class QuadratureRule:
    """Triangle rule in barycentric coordinates; weights sum to one."""

    points: np.ndarray
    weights: np.ndarray
    degree: int
    name: str = ""


def _edge_midpoint_rule():
    pts = np.array([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
    return QuadratureRule(pts, np.full(3, 1.0 / 3.0), 2, "edge-midpoint")


def _seven_point_rule():
    s = np.sqrt(15.0)
    a1, w1 = (6.0 - s) / 21.0, (155.0 - s) / 1200.0
    a2, w2 = (6.0 + s) / 21.0, (155.0 + s) / 1200.0
    pts = [[1 / 3, 1 / 3, 1 / 3]]
    wts = [9.0 / 40.0]
    for a, w in ((a1, w1), (a2, w2)):
        b = 1.0 - 2.0 * a
        pts += [[a, a, b], [a, b, a], [b, a, a]]
        wts += [w] * 3
    return QuadratureRule(np.array(pts), np.array(wts), 5, "seven-point")


EDGE_MIDPOINT = _edge_midpoint_rule()
SEVEN_POINT = _seven_point_rule()
RULES = {2: EDGE_MIDPOINT, 5: SEVEN_POINT}


def quadrature_rule(degree):
    try:
        return RULES[degree]
    except KeyError:
        raise ValueError("no quadrature rule of degree {}; choose from {}".format(
            degree, sorted(RULES))) from None


def _gradients(p):
    """Barycentric gradients and areas for stacked triangles p (..., 3, 2)."""
    d1 = p[..., 1, :] - p[..., 0, :]
    d2 = p[..., 2, :] - p[..., 0, :]
    det = d1[..., 0] * d2[..., 1] - d1[..., 1] * d2[..., 0]
    area = 0.5 * det
    if np.any(area <= 0.0):
        raise ValueError("degenerate or clockwise triangle (area <= 0)")
    # rotate opposite edges by +90 degrees: grad lambda_i = J(e_i) / (2|K|)
    e = np.stack([p[..., 2, :] - p[..., 1, :],
                  p[..., 0, :] - p[..., 2, :],
                  p[..., 1, :] - p[..., 0, :]], axis=-2)
    grads = np.stack([-e[..., 1], e[..., 0]], axis=-1) / det[..., None, None]
    return grads, area


def element_stiffness(v0, v1, v2):
    """Local stiffness matrix int_K grad(l_i) . grad(l_j)."""
    p = np.array([v0, v1, v2], dtype=float)
    g, area = _gradients(p)
    return area * g @ g.T


def element_mass(v0, v1, v2):
    p = np.array([v0, v1, v2], dtype=float)
    _, area = _gradients(p)
    return area * _MASS_REF


def _element_stiffness_batch(mesh):
    g, area = _gradients(mesh.vertices[mesh.triangles])
    return area[:, None, None] * np.einsum("kid,kjd->kij", g, g)


def assemble_stiffness(mesh: Mesh):
    buf = TripletBuffer()
    buf.add_dense(mesh.triangles, _element_stiffness_batch(mesh))
    n = mesh.num_vertices
    return assemble_from_triplets(buf, n, n)


def assemble_mass(mesh: Mesh):
    _, area = _gradients(mesh.vertices[mesh.triangles])
    buf = TripletBuffer()
    buf.add_dense(mesh.triangles, area[:, None, None] * _MASS_REF)
    n = mesh.num_vertices
    return assemble_from_triplets(buf, n, n)


def assemble_boundary_mass(mesh: Mesh):
    """1D P1 mass matrix on the boundary edges, as an n x n matrix."""
    e = mesh.boundary_edges
    length = np.linalg.norm(mesh.vertices[e[:, 1]] - mesh.vertices[e[:, 0]], axis=1)
    local = np.array([[2.0, 1.0], [1.0, 2.0]]) / 6.0
    buf = TripletBuffer()
    buf.add_dense(e, length[:, None, None] * local)
    n = mesh.num_vertices
    return assemble_from_triplets(buf, n, n)


def assemble_load(mesh: Mesh, g, rule=EDGE_MIDPOINT):
    """Load vector b_i = int g * l_i, integrated triangle-wise with ``rule``.

    ``g`` is called as ``g(x, y)`` with arrays of quadrature-point
    coordinates and must return an array of the same shape.
    """
    p = mesh.vertices[mesh.triangles]                       # (T, 3, 2)
    area = mesh.areas()
    xq = np.einsum("qi,tid->tqd", rule.points, p)           # (T, Q, 2)
    gq = np.asarray(g(xq[..., 0], xq[..., 1]), dtype=float)
    gq = np.broadcast_to(gq, xq.shape[:2])
    local = area[:, None] * np.einsum("q,tq,qi->ti", rule.weights, gq, rule.points)
    return np.bincount(mesh.triangles.ravel(), weights=local.ravel(),
                       minlength=mesh.num_vertices)


@dataclass(frozen=True)
class Operators:
    stiffness: object
    mass: object
    boundary_mass: object


@lru_cache(maxsize=32)
def operators(mesh: Mesh) -> Operators:
    """Assembled stiffness, mass and boundary mass of ``mesh`` (cached)."""
    return Operators(assemble_stiffness(mesh), assemble_mass(mesh),
                     assemble_boundary_mass(mesh))


@dataclass(frozen=True, eq=False)
class FeFunction:
    """Member of S^1(T_h): nodal coefficients bound to ``mesh``."""

    mesh: Mesh
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float)
        if c.shape != (self.mesh.num_vertices,):
            raise ValueError("expected {} coefficients, got shape {}".format(
                self.mesh.num_vertices, c.shape))
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def interpolate(cls, mesh, g):
        return cls(mesh, g(mesh.vertices[:, 0], mesh.vertices[:, 1]))

    def trace(self):
        """Boundary coefficients ordered as ``mesh.boundary_node_ids``."""
        return self.coefficients[self.mesh.boundary_node_ids]

    def evaluate(self, points, tol=1e-12):
        """Point values by barycentric interpolation (brute-force search)."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        lam = barycentric(self.mesh, pts)                   # (P, T, 3)
        inside = np.all(lam >= -tol, axis=2)
        if not np.all(inside.any(axis=1)):
            raise ValueError("point outside the mesh")
        k = inside.argmax(axis=1)
        rows = np.arange(len(pts))
        c = self.coefficients[self.mesh.triangles[k]]
        return np.sum(lam[rows, k] * c, axis=1)


def barycentric(mesh, points):
    """Barycentric coordinates of every point w.r.t. every triangle."""
    p = mesh.vertices[mesh.triangles]
    d1 = p[:, 1] - p[:, 0]
    d2 = p[:, 2] - p[:, 0]
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    r = points[:, None, :] - p[None, :, 0, :]
    l1 = (r[..., 0] * d2[:, 1] - r[..., 1] * d2[:, 0]) / det
    l2 = (d1[:, 0] * r[..., 1] - d1[:, 1] * r[..., 0]) / det
    return np.stack([1.0 - l1 - l2, l1, l2], axis=-1)
