"""Command-line entry point.

    dirichlet-control run --experiment 1 --levels 6 --out exp1.csv
"""

import argparse
import logging
import sys

from .experiments import ExperimentConfig, format_csv, run_experiment
from .linalg import SolverError
from .mesh import write_mesh
from .pdas import PDASConvergenceError

EXIT_OK, EXIT_SOLVER, EXIT_CONFIG = 0, 1, 2


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dirichlet-control",
        description="Energy-space Dirichlet boundary control experiments.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a convergence experiment")
    run.add_argument("--experiment", type=int, choices=(1, 2, 3), required=True)
    run.add_argument("--levels", type=int, default=6)
    run.add_argument("--lambda", dest="lam", type=float, default=1.0)
    run.add_argument("--quad-degree", type=int, choices=(2, 5), default=2)
    run.add_argument("--out", required=True, help="CSV output path")
    run.add_argument("--lower", type=float, default=None)
    run.add_argument("--upper", type=float, default=None)
    run.add_argument("--export-solution", metavar="PATH", default=None,
                     help="also write the finest mesh and state as text")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = ExperimentConfig(args.experiment, args.levels, args.lam,
                                  args.quad_degree, args.out, args.lower, args.upper)
    except ValueError as exc:
        print("invalid configuration: {}".format(exc), file=sys.stderr)
        return EXIT_CONFIG

    try:
        result = run_experiment(config)
    except (SolverError, PDASConvergenceError) as exc:
        print("solver failure: {}".format(exc), file=sys.stderr)
        return EXIT_SOLVER

    if args.export_solution:
        u = result.solutions[-1].u
        write_mesh(u.mesh, args.export_solution, u.coefficients)
    sys.stdout.write(format_csv(result))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
