"""Discrete harmonic extension of boundary nodal data."""

import numpy as np

from .assembly import FeFunction, operators
from .linalg import SPDFactor, solve_spd


def _blocks(mesh):
    K = operators(mesh).stiffness
    I, B = mesh.interior_node_ids, mesh.boundary_node_ids
    return K[I][:, I], K[I][:, B]


def discrete_harmonic_extension(mesh, q):
    """Extend boundary values ``q`` (ordered as ``mesh.boundary_node_ids``)
    to the discrete harmonic P1 function with that trace.

    Boundary coefficients are copied verbatim, so the trace identity is
    exact; interior coefficients solve ``K_II u_I = -K_IB q``.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != mesh.boundary_node_ids.shape:
        raise ValueError("trace vector must have length {}, got {}".format(
            len(mesh.boundary_node_ids), q.shape))
    u = np.zeros(mesh.num_vertices)
    u[mesh.boundary_node_ids] = q
    if len(mesh.interior_node_ids):
        K_II, K_IB = _blocks(mesh)
        u[mesh.interior_node_ids] = solve_spd(K_II, -(K_IB @ q))
    return FeFunction(mesh, u)


def harmonic_basis(mesh):
    """Dense ``(n, n_boundary)`` matrix whose columns are the extensions
    of the boundary nodal unit vectors."""
    nb = len(mesh.boundary_node_ids)
    E = np.zeros((mesh.num_vertices, nb))
    E[mesh.boundary_node_ids, np.arange(nb)] = 1.0
    if len(mesh.interior_node_ids):
        K_II, K_IB = _blocks(mesh)
        E[mesh.interior_node_ids] = SPDFactor(K_II).solve(-K_IB.toarray())
    return E
