"""Errors between nested P1 functions and convergence-rate fits."""

import warnings
from dataclasses import astuple, dataclass, fields

import numpy as np

from .assembly import FeFunction, operators


@dataclass(frozen=True)
class ConvergenceRecord:
    level: int
    num_elements: int
    mesh_size: float
    err_h1_sq: float
    err_l2_sq: float
    err_l2_boundary_sq: float

    def astuple(self):
        return astuple(self)


ERROR_FIELDS = ("err_h1_sq", "err_l2_sq", "err_l2_boundary_sq")
CSV_HEADER = ",".join(f.name for f in fields(ConvergenceRecord))


def prolongate(u: FeFunction, fine) -> FeFunction:
    """Represent ``u`` exactly on a (repeated) refinement of its mesh."""
    if not fine.is_refinement_of(u.mesh):
        raise ValueError("target mesh is not a refinement of the function's mesh")
    chain = []
    m = fine
    while m is not u.mesh:
        chain.append(m)
        m = m.parent
    c = u.coefficients
    for child in reversed(chain):
        e = child.parent_edges
        c = np.concatenate([c, 0.5 * (c[e[:, 0]] + c[e[:, 1]])])
    return FeFunction(fine, c)


def energy_errors(u_ref: FeFunction, u: FeFunction):
    """Squared L2(Omega), H1(Omega) and L2(Gamma) norms of ``u_ref - u``."""
    if u_ref.mesh is not u.mesh:
        raise ValueError("functions live on different meshes; prolongate first")
    ops = operators(u.mesh)
    e = u_ref.coefficients - u.coefficients
    l2 = float(e @ (ops.mass @ e))
    semi = float(e @ (ops.stiffness @ e))
    gamma = float(e @ (ops.boundary_mass @ e))
    return l2, l2 + semi, gamma


def fit_rate(records, field, floor=0.0, last=3):
    """Least-squares slope of log(error) against log(N) over the finest
    ``last`` records whose error exceeds ``floor``."""
    if field not in ERROR_FIELDS:
        raise ValueError("unknown error field {!r}".format(field))
    N = np.array([r.num_elements for r in records], dtype=float)
    if np.any(np.diff(N) <= 0):
        raise ValueError("records must have strictly increasing num_elements")
    err = np.array([getattr(r, field) for r in records], dtype=float)
    keep = err > floor
    if not np.all(keep):
        warnings.warn("{}: excluding {} record(s) with error <= {:g}".format(
            field, int((~keep).sum()), floor), RuntimeWarning, stacklevel=2)
    N, err = N[keep], err[keep]
    if len(N) < 3:
        raise ValueError("need at least 3 usable records to fit a rate, got {}".format(len(N)))
    N, err = N[-last:], err[-last:]
    slope, _ = np.polyfit(np.log(N), np.log(err), 1)
    return float(slope)
