"""Small analytic meshes used as fixtures and CLI demos."""
import numpy as np

from .mesh import Mesh


def unit_cube() -> Mesh:
    """Axis-aligned [0,1]^3 cube, 12 outward-wound triangles."""
    V = np.array([[x, y, z] for x in (0.0, 1.0) for y in (0.0, 1.0) for z in (0.0, 1.0)])
    # vertex id = 4x + 2y + z
    quads = [
        (0, 2, 6, 4),  # z = 0, normal -z
        (1, 5, 7, 3),  # z = 1
        (0, 4, 5, 1),  # y = 0
        (2, 3, 7, 6),  # y = 1
        (0, 1, 3, 2),  # x = 0
        (4, 6, 7, 5),  # x = 1
    ]
    F = []
    for a, b, c, d in quads:
        F += [(a, b, c), (a, c, d)]
    return Mesh.from_arrays(V, F)


def unit_square() -> Mesh:
    """[0,1]^2 in the z = 0 plane, normal +z."""
    V = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
    return Mesh.from_arrays(V, [(0, 1, 2), (0, 2, 3)])


def icosphere(subdivisions: int = 2, radius: float = 1.0) -> Mesh:
    """Subdivided icosahedron; 20 * 4**subdivisions faces."""
    t = (1.0 + 5.0 ** 0.5) / 2.0
    V = [[-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
         [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
         [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1]]
    V = [list(np.array(v, dtype=float) / np.linalg.norm(v)) for v in V]
    F = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
         (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
         (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
         (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    for _ in range(subdivisions):
        mid = {}

        def midpoint(a, b):
            key = (min(a, b), max(a, b))
            if key not in mid:
                m = (np.array(V[a]) + np.array(V[b])) / 2.0
                V.append(list(m / np.linalg.norm(m)))
                mid[key] = len(V) - 1
            return mid[key]

        nf = []
        for a, b, c in F:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            nf += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        F = nf
    return Mesh.from_arrays(np.array(V) * radius, F)
