import numpy as np
import pytest

from dirichlet_control.mesh import refine, unit_square_mesh


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


def mesh_with(num_triangles):
    """Nested mesh from unit_square_mesh(2) with the given triangle count."""
    level = {8: 0, 32: 1, 128: 2, 512: 3, 2048: 4}[num_triangles]
    return refine(unit_square_mesh(2), level)


def dense_assembly(mesh):
    """Dense stiffness and mass by explicit loops over triangles.

    Gradients come from inverting the affine map, independently of the
    edge-rotation formula used by the package.
    """
    n = mesh.num_vertices
    K = np.zeros((n, n))
    M = np.zeros((n, n))
    for tri in mesh.triangles:
        p = mesh.vertices[tri]
        J = np.array([p[1] - p[0], p[2] - p[0]]).T
        area = 0.5 * abs(np.linalg.det(J))
        ref_grads = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
        G = ref_grads @ np.linalg.inv(J)
        for a in range(3):
            for b in range(3):
                K[tri[a], tri[b]] += area * G[a] @ G[b]
                M[tri[a], tri[b]] += area * (2.0 if a == b else 1.0) / 12.0
    return K, M


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
