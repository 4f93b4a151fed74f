"""Primal-dual active set method for box-constrained boundary controls.

Bounds are imposed at boundary nodes.  For each active set guess the
saddle system is solved with active boundary values pinned to their
bound; the multiplier ``mu`` is the residual of the pinned stationarity
rows.  Sign convention: ``mu >= 0`` on the lower active set and
``mu <= 0`` on the upper active set.
"""

from dataclasses import dataclass

import numpy as np

from .assembly import operators
from .control import ControlSolution, _split, saddle_matrix
from .linalg import relative_residual, solve_symmetric_indefinite

MAX_ITER = 100
KKT_TOL = 1e-9


class PDASConvergenceError(RuntimeError):
    def __init__(self, message, kkt=None):
        super().__init__(message if kkt is None else "{}; last KKT residuals: {}".format(message, kkt))
        self.kkt = kkt


@dataclass
class ActiveSetState:
    """Partition of the boundary nodes and the bound multiplier.

    ``lower`` and ``upper`` are boolean masks over
    ``mesh.boundary_node_ids``.
    """

    lower: np.ndarray
    upper: np.ndarray
    mu: np.ndarray
    iterations: int = 0

    @property
    def inactive(self):
        return ~(self.lower | self.upper)

    @classmethod
    def empty(cls, nb):
        return cls(np.zeros(nb, bool), np.zeros(nb, bool), np.zeros(nb))


@dataclass(frozen=True)
class KKTResidual:
    stationarity: float
    complementarity: float
    feasibility: float
    sign: float
    harmonicity: float

    def max(self):
        return max(self.stationarity, self.complementarity, self.feasibility,
                   self.sign, self.harmonicity)


def _bounds(problem, nb):
    a = np.full(nb, -np.inf if problem.lower is None else float(problem.lower))
    b = np.full(nb, np.inf if problem.upper is None else float(problem.upper))
    return a, b


def _gradient(problem, u, phi):
    K = operators(problem.mesh).stiffness
    return problem.hessian() @ u + K @ phi - problem.rhs()


def kkt_residual(problem, sol: ControlSolution, state: ActiveSetState) -> KKTResidual:
    """Max-norm violations of the discrete optimality system."""
    mesh = problem.mesh
    B = mesh.boundary_node_ids
    u = sol.u.coefficients
    r = _gradient(problem, u, sol.phi.coefficients)
    r[B] -= state.mu
    K = operators(mesh).stiffness
    harm = K[mesh.interior_node_ids] @ u

    a, b = _bounds(problem, len(B))
    uB = u[B]
    with np.errstate(invalid="ignore"):
        feas = np.maximum(np.maximum(a - uB, uB - b), 0.0)
        mu_lo = np.maximum(state.mu, 0.0)
        mu_up = np.minimum(state.mu, 0.0)
        comp = np.abs(np.where(mu_lo > 0, mu_lo * (uB - a), 0.0)) \
            + np.abs(np.where(mu_up < 0, mu_up * (b - uB), 0.0))
    sign = np.concatenate([
        np.maximum(-state.mu[state.lower], 0.0),
        np.maximum(state.mu[state.upper], 0.0),
        np.abs(state.mu[state.inactive]),
    ])

    def mx(v):
        return float(np.max(v)) if np.size(v) else 0.0

    return KKTResidual(mx(np.abs(r)), mx(comp), mx(feas), mx(sign), mx(np.abs(harm)))


def solve_constrained(problem, initial=None, c=1.0, max_iter=MAX_ITER):
    """Solve the box-constrained problem; returns ``(solution, state)``.

    Iterates until the active sets repeat.  ``initial`` is an optional
    :class:`ActiveSetState` (or pair of masks) used as the first guess.
    """
    mesh = problem.mesh
    B = mesh.boundary_node_ids
    n, nb = mesh.num_vertices, len(B)
    a, b = _bounds(problem, nb)

    S = saddle_matrix(problem)
    rhs = np.zeros(S.shape[0])
    rhs[:n] = problem.rhs()

    if initial is None:
        lower, upper = np.zeros(nb, bool), np.zeros(nb, bool)
    else:
        lower = np.array(initial.lower, bool)
        upper = np.array(initial.upper, bool)
    lower &= np.isfinite(a)
    upper &= np.isfinite(b) & ~lower

    for it in range(1, max_iter + 1):
        pinned = B[lower | upper]
        values = np.where(lower, a, b)[lower | upper]
        free = np.ones(S.shape[0], bool)
        free[pinned] = False

        x = np.zeros(S.shape[0])
        x[pinned] = values
        S_ff = S[free][:, free]
        f_rhs = rhs[free] - S[free][:, pinned] @ values
        x[free] = solve_symmetric_indefinite(S_ff, f_rhs)

        mu = (S @ x - rhs)[B]
        mu[~(lower | upper)] = 0.0
        uB = x[B]
        with np.errstate(invalid="ignore"):
            new_lower = mu + c * (a - uB) > 0
            new_upper = (-mu + c * (uB - b) > 0) & ~new_lower

        if np.array_equal(new_lower, lower) and np.array_equal(new_upper, upper):
            sol = _split(problem, x, relative_residual(S_ff, x[free], f_rhs), it)
            state = ActiveSetState(lower, upper, mu, it)
            sol.info["kkt"] = kkt_residual(problem, sol, state)
            return sol, state
        lower, upper = new_lower, new_upper

    sol = _split(problem, x, np.nan, max_iter)
    kkt = kkt_residual(problem, sol, ActiveSetState(lower, upper, mu, max_iter))
    raise PDASConvergenceError(
        "active set did not settle within {} iterations".format(max_iter), kkt)


def prolong_active(state, coarse, fine):
    """Transfer active sets to a refined mesh: parent vertices keep their
    status, an edge midpoint is active iff both endpoints are."""
    if not fine.is_refinement_of(coarse):
        raise ValueError("fine mesh is not a refinement of coarse mesh")
    chain = []
    m = fine
    while m is not coarse:
        chain.append(m)
        m = m.parent
    masks = []
    for sel in (state.lower, state.upper):
        v = np.zeros(coarse.num_vertices, bool)
        v[coarse.boundary_node_ids] = sel
        for child in reversed(chain):
            e = child.parent_edges
            v = np.concatenate([v, v[e[:, 0]] & v[e[:, 1]]])
        masks.append(v[fine.boundary_node_ids])
    nb = len(fine.boundary_node_ids)
    return ActiveSetState(masks[0], masks[1], np.zeros(nb))
