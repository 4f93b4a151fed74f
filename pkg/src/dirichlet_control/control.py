"""Unconstrained discrete Dirichlet boundary control.

The control enters through the state ``u_h``, a discrete harmonic P1
function whose trace is the control.  Harmonicity is enforced by a
multiplier ``phi_h`` with zero boundary values, which leads to the
symmetric saddle system::

    [ (lam+1) M + lam K   K[:, I] ] [ u   ]   [ b ]
    [ K[I, :]             0       ] [ phi_I ] = [ 0 ]

with ``b`` the load vector of the desired state.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .assembly import EDGE_MIDPOINT, FeFunction, assemble_load, operators
from .harmonic import harmonic_basis
from .linalg import relative_residual, solve_spd, solve_symmetric_indefinite
from .mesh import Mesh


@dataclass(frozen=True, eq=False)
class ControlProblem:
    """Discrete control problem on ``mesh``.

    The desired state is given either as a callable ``ud(x, y)``
    (integrated with ``rule``) or as a precomputed ``load`` vector; with
    neither, it is zero.  ``lower``/``upper`` are constant control bounds.
    """

    mesh: Mesh
    lam: float = 1.0
    ud: object = None
    rule: object = EDGE_MIDPOINT
    load: np.ndarray = None
    lower: float = None
    upper: float = None

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("regularization weight must be positive, got {}".format(self.lam))
        if self.ud is not None and self.load is not None:
            raise ValueError("give either ud or load, not both")
        if self.load is not None and np.shape(self.load) != (self.mesh.num_vertices,):
            raise ValueError("load vector has wrong length")
        if (self.lower is not None and self.upper is not None
                and self.lower > self.upper):
            raise ValueError("infeasible bounds: lower {} > upper {}".format(
                self.lower, self.upper))

    @property
    def constrained(self):
        return self.lower is not None or self.upper is not None

    def rhs(self):
        if self.load is not None:
            return np.asarray(self.load, dtype=float)
        if self.ud is None:
            return np.zeros(self.mesh.num_vertices)
        return assemble_load(self.mesh, self.ud, self.rule)

    def hessian(self):
        """(lam+1) M + lam K, the matrix of the regularized cost."""
        ops = operators(self.mesh)
        return ((self.lam + 1.0) * ops.mass + self.lam * ops.stiffness).tocsr()

    def objective(self, u):
        """Discrete cost 1/2 u'Hu - b'u (the tracking constant is dropped)."""
        u = np.asarray(u, dtype=float)
        return 0.5 * u @ (self.hessian() @ u) - self.rhs() @ u


@dataclass
class ControlSolution:
    u: FeFunction
    phi: FeFunction
    residual: float = 0.0
    iterations: int = 1
    info: dict = field(default_factory=dict)

    @property
    def control(self):
        return self.u.trace()


def saddle_matrix(problem):
    K = operators(problem.mesh).stiffness
    I = problem.mesh.interior_node_ids
    C = K[I]
    return sp.bmat([[problem.hessian(), C.T], [C, None]], format="csr")


def _split(problem, x, residual, iterations=1):
    mesh = problem.mesh
    n = mesh.num_vertices
    phi = np.zeros(n)
    phi[mesh.interior_node_ids] = x[n:]
    return ControlSolution(FeFunction(mesh, x[:n]), FeFunction(mesh, phi),
                           residual, iterations)


def solve_unconstrained(problem: ControlProblem) -> ControlSolution:
    """Solve the saddle system for the state and the harmonicity multiplier."""
    if problem.constrained:
        raise ValueError("problem has bounds; use pdas.solve_constrained")
    S = saddle_matrix(problem)
    rhs = np.zeros(S.shape[0])
    rhs[:problem.mesh.num_vertices] = problem.rhs()
    x = solve_symmetric_indefinite(S, rhs)
    return _split(problem, x, relative_residual(S, x, rhs))


def solve_reduced(problem: ControlProblem) -> FeFunction:
    """Solve the positive definite problem posed on the discrete harmonic
    subspace.  Dense in the number of boundary nodes; meant as a check of
    :func:`solve_unconstrained` on small meshes."""
    E = harmonic_basis(problem.mesh)
    H = E.T @ (problem.hessian() @ E)
    H = 0.5 * (H + H.T)
    g = sla.cho_solve(sla.cho_factor(H), E.T @ problem.rhs())
    return FeFunction(problem.mesh, E @ g)


def reduced_operator(problem):
    """Dense reduced Hessian E' ((lam+1) M + lam K) E, unsymmetrized."""
    E = harmonic_basis(problem.mesh)
    return E.T @ (problem.hessian() @ E)


def solve_homogeneous_dirichlet(mesh, load):
    """P1 solution in S^1_0 of -Laplace(u) = f, given the load vector of f."""
    u = np.zeros(mesh.num_vertices)
    I = mesh.interior_node_ids
    if len(I):
        K = operators(mesh).stiffness
        u[I] = solve_spd(K[I][:, I], np.asarray(load, dtype=float)[I])
    return FeFunction(mesh, u)


def homogenize(mesh, f, ud_tilde, rule=EDGE_MIDPOINT):
    """Load vector of ``ud_tilde - u_f`` where ``-Laplace(u_f) = f``, u_f = 0 on the boundary.

    ``f`` and ``ud_tilde`` are callables ``(x, y) -> values`` or load vectors.
    """
    def load_of(g):
        if callable(g):
            return assemble_load(mesh, g, rule)
        return np.asarray(g, dtype=float)

    u_f = solve_homogeneous_dirichlet(mesh, load_of(f))
    return load_of(ud_tilde) - operators(mesh).mass @ u_f.coefficients
