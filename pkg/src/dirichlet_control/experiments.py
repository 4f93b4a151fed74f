"""Convergence experiments on the unit square.

1. ``ud = x(1-y) - 0.35``, no bounds, errors against the finest solution.
2. Same data with the control bound ``g >= 0`` (active set solver).
3. Data with exact solution ``u = 0``; errors against zero.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .assembly import quadrature_rule
from .control import ControlProblem, solve_unconstrained
from .error_analysis import (CSV_HEADER, ERROR_FIELDS, ConvergenceRecord,
                             energy_errors, fit_rate, prolongate)
from .mesh import hierarchy, mesh_size
from .assembly import FeFunction
from .pdas import prolong_active, solve_constrained

log = logging.getLogger(__name__)

N0 = 2
MAX_LEVELS = 8
# norms below 1e-14 count as exact and are left out of rate fits
ERROR_FLOOR = 1e-28


def ud_smooth(x, y):
    return x * (1.0 - y) - 0.35


def ud_zero_solution(x, y):
    pi = np.pi
    return 2.0 * pi**2 * (np.cos(2 * pi * x) * np.sin(pi * y) ** 2
                          + np.sin(pi * x) ** 2 * np.cos(2 * pi * y))


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: int
    levels: int = 6
    lam: float = 1.0
    quad_degree: int = 2
    out: str = None
    lower: float = None
    upper: float = None

    def __post_init__(self):
        if self.experiment not in (1, 2, 3):
            raise ValueError("experiment must be 1, 2 or 3")
        if not 3 <= self.levels <= MAX_LEVELS:
            raise ValueError("levels must lie in [3, {}]".format(MAX_LEVELS))
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        quadrature_rule(self.quad_degree)
        if self.experiment != 2 and (self.lower is not None or self.upper is not None):
            raise ValueError("bounds apply to experiment 2 only")
        if self.experiment == 2:
            if self.lower is None and self.upper is None:
                object.__setattr__(self, "lower", 0.0)
            if (self.lower is not None and self.upper is not None
                    and self.lower > self.upper):
                raise ValueError("lower bound exceeds upper bound")


@dataclass
class LevelInfo:
    level: int
    iterations: int
    kkt: object = None
    min_boundary: float = np.nan
    min_interior: float = np.nan


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list
    rates: dict
    levels: list = field(default_factory=list)
    solutions: list = field(default_factory=list, repr=False)


def _solve_levels(config, meshes):
    rule = quadrature_rule(config.quad_degree)
    ud = ud_zero_solution if config.experiment == 3 else ud_smooth
    sols, info = [], []
    state = None
    for j, mesh in enumerate(meshes):
        if config.experiment == 2:
            problem = ControlProblem(mesh, config.lam, ud, rule,
                                     lower=config.lower, upper=config.upper)
            if state is not None:
                state = prolong_active(state, meshes[j - 1], mesh)
            sol, state = solve_constrained(problem, initial=state)
            kkt = sol.info["kkt"]
        else:
            problem = ControlProblem(mesh, config.lam, ud, rule)
            sol = solve_unconstrained(problem)
            kkt = None
        u = sol.u.coefficients
        info.append(LevelInfo(j, sol.iterations, kkt,
                              float(u[mesh.boundary_node_ids].min()),
                              float(u[mesh.interior_node_ids].min())
                              if len(mesh.interior_node_ids) else np.nan))
        log.info("level %d: %d triangles, %d iteration(s)", j,
                 mesh.num_triangles, sol.iterations)
        sols.append(sol)
    return sols, info


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Solve on ``levels + 1`` nested meshes and tabulate squared errors.

    Experiments 1 and 2 use the finest solution as reference and report
    levels ``0 .. levels-1``; experiment 3 reports every level against
    the exact solution zero.
    """
    meshes = hierarchy(N0, config.levels)
    sols, info = _solve_levels(config, meshes)
    if config.experiment == 3:
        finest = meshes[-1]
        reference = FeFunction(finest, np.zeros(finest.num_vertices))
        measured = range(len(meshes))
    else:
        finest = meshes[-1]
        reference = sols[-1].u
        measured = range(len(meshes) - 1)

    records = []
    for j in measured:
        l2, h1, gamma = energy_errors(reference, prolongate(sols[j].u, finest))
        records.append(ConvergenceRecord(j, meshes[j].num_triangles,
                                         mesh_size(meshes[j]), h1, l2, gamma))
    rates = {}
    for name in ERROR_FIELDS:
        try:
            rates[name] = fit_rate(records, name, floor=ERROR_FLOOR)
        except ValueError:
            rates[name] = float("nan")
    result = ExperimentResult(config, records, rates, info, sols)
    if config.out:
        write_csv(result, config.out)
    return result


def _fmt(x):
    return "{:.16g}".format(x)


def format_csv(result: ExperimentResult) -> str:
    lines = [CSV_HEADER]
    for r in result.records:
        lines.append(",".join([str(r.level), str(r.num_elements), _fmt(r.mesh_size),
                               _fmt(r.err_h1_sq), _fmt(r.err_l2_sq),
                               _fmt(r.err_l2_boundary_sq)]))
    lines.append("# rate_h1_sq={} rate_l2_sq={} rate_l2_boundary_sq={}".format(
        *(_fmt(result.rates[k]) for k in ERROR_FIELDS)))
    return "\n".join(lines) + "\n"


def write_csv(result, path):
    with open(path, "w", newline="\n") as fh:
        fh.write(format_csv(result))
