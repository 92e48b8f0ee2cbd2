"""Winding classes of circle-valued and GL+(2)-valued vertex data."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import linprog

from .errors import EdgeAliasing, MeshMismatch, SingularMatrix, TriangleWrap, UnderResolved, ValidationError
from .homology import CohomologyClass, IntegerCocycle, class_from_cocycle, cocycle_with_periods

TWO_PI = 2.0 * math.pi
ALIAS_TOL = 1e-9
CONDITION_LIMIT = 1e12
NEWTON_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class AngleField:
    mesh: object
    angles: np.ndarray

    def __post_init__(self):
        a = np.mod(np.asarray(self.angles, dtype=float), TWO_PI)
        if a.shape != (self.mesh.n_vertices,):
            raise ValidationError("need one angle per vertex")
        object.__setattr__(self, "angles", a)

    def to_json(self):
        return {"angles": [float(x) for x in self.angles]}


@dataclass(frozen=True, eq=False)
class MatrixField:
    """Per-vertex 2x2 matrices in vertex-frame coordinates, det > 0."""

    mesh: object
    matrices: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrices, dtype=float)
        if m.shape != (self.mesh.n_vertices, 2, 2):
            raise ValidationError("need one 2x2 matrix per vertex")
        object.__setattr__(self, "matrices", m)

    def determinants(self):
        m = self.matrices
        return m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]

    def to_json(self):
        return {"matrices": self.matrices.tolist()}


def rotation(alpha):
    """Stack of rotation matrices for an array of angles."""
    alpha = np.asarray(alpha, dtype=float)
    c, s = np.cos(alpha), np.sin(alpha)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


def lift_edge_increments(field):
    """Minimal lifts of angle differences along every edge, checked per triangle."""
    mesh = field.mesh
    th = field.angles
    diff = th[mesh.edges[:, 1]] - th[mesh.edges[:, 0]]
    lifted = np.mod(diff + math.pi, TWO_PI) - math.pi
    bad = np.nonzero(np.abs(np.abs(lifted) - math.pi) < ALIAS_TOL)[0]
    if len(bad):
        u, v = mesh.edges[bad[0]]
        raise EdgeAliasing(f"angle difference on edge ({u}, {v}) is pi; refine the mesh")
    cocycle = IntegerCocycle(mesh, lifted)
    sums = cocycle.triangle_sums()
    wrapped = np.nonzero(np.abs(sums) > math.pi)[0]
    if len(wrapped):
        raise TriangleWrap(f"triangle {int(wrapped[0])} winds once; the mesh cannot resolve the map")
    return cocycle


def winding_class(field, basis):
    if field.mesh is not basis.mesh:
        raise MeshMismatch("field and basis live on different meshes")
    if len(basis) == 0:
        return CohomologyClass((), basis.name)
    return class_from_cocycle(lift_edge_increments(field), basis, scale=TWO_PI)


def polar_angles(matrices):
    """Angle of the rotation factor R in A = R P for a stack of 2x2 matrices (closed form)."""
    m = np.asarray(matrices, dtype=float)
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    # R is proportional to A + det(A) A^{-T} = [[a+d, b-c], [c-b, a+d]]
    return np.arctan2(c - b, a + d)


def polar_newton(A, tol=NEWTON_TOL, max_iter=100):
    """Rotation factor of a 2x2 matrix by the Newton iteration X <- (X + X^{-T}) / 2."""
    X = np.array(A, dtype=float)
    for _ in range(max_iter):
        Y = 0.5 * (X + np.linalg.inv(X).T)
        if np.max(np.abs(Y - X)) <= tol * max(1.0, np.max(np.abs(Y))):
            return Y
        X = Y
    return X


def rotation_angle_field(field, cross_check=False):
    det = field.determinants()
    if np.any(det <= 0):
        i = int(np.nonzero(det <= 0)[0][0])
        raise SingularMatrix(f"matrix at vertex {i} has det <= 0")
    cond = np.linalg.cond(field.matrices)
    if np.any(cond > CONDITION_LIMIT):
        i = int(np.nonzero(cond > CONDITION_LIMIT)[0][0])
        raise SingularMatrix(f"matrix at vertex {i} is ill-conditioned ({cond[i]:.3g})")
    angles = polar_angles(field.matrices)
    if cross_check:
        for A, alpha in zip(field.matrices, angles):
            R = polar_newton(A)
            beta = math.atan2(R[1, 0], R[0, 0])
            if abs(math.remainder(beta - alpha, TWO_PI)) > 1e-9:
                raise SingularMatrix("closed-form and Newton polar factors disagree")
    return AngleField(field.mesh, angles)


def matrix_winding_class(field, basis):
    return winding_class(rotation_angle_field(field), basis)


def reframe(field, frame_angles):
    """Express a matrix field in frames rotated by ``frame_angles`` at each vertex."""
    Q = rotation(np.broadcast_to(frame_angles, (field.mesh.n_vertices,)))
    return MatrixField(field.mesh, np.transpose(Q, (0, 2, 1)) @ field.matrices @ Q)


# ------------------------------------------------------------ realization

def harmonic_periods_cocycle(basis, periods):
    """Closed real cochain with the given periods and least edge norm.

    Starts from the integer dual cocycle and removes its exact part by a
    Laplacian solve, which spreads the winding evenly over the surface.
    """
    mesh = basis.mesh
    z = cocycle_with_periods(basis, periods).values.astype(float)
    nv, ne = mesh.n_vertices, mesh.n_edges
    rows = np.repeat(np.arange(ne), 2)
    cols = mesh.edges.reshape(-1)
    vals = np.tile([-1.0, 1.0], ne)
    D = sp.csr_matrix((vals, (rows, cols)), shape=(ne, nv))
    L = (D.T @ D).tolil()
    rhs = D.T @ z
    # pin vertex 0 to remove the constant kernel
    L[0, :] = 0
    L[0, 0] = 1.0
    rhs[0] = 0.0
    f = spla.spsolve(L.tocsc(), rhs)
    return IntegerCocycle(mesh, z - D @ f)


def minimax_periods_cocycle(basis, periods):
    """Closed real cochain with the given periods and least largest edge value.

    Solves ``min t`` subject to ``|z - D f| <= t`` edgewise as a linear program.
    """
    mesh = basis.mesh
    z = cocycle_with_periods(basis, periods).values.astype(float)
    nv, ne = mesh.n_vertices, mesh.n_edges
    rows = np.repeat(np.arange(ne), 2)
    D = sp.csr_matrix((np.tile([-1.0, 1.0], ne), (rows, mesh.edges.reshape(-1))), shape=(ne, nv))
    ones = sp.csr_matrix(np.ones((ne, 1)))
    # z - D f <= t  and  D f - z <= t
    A = sp.vstack([sp.hstack([-D, -ones]), sp.hstack([D, -ones])]).tocsr()
    b = np.concatenate([-z, z])
    cost = np.zeros(nv + 1)
    cost[-1] = 1.0
    bounds = [(0, 0)] + [(None, None)] * (nv - 1) + [(0, None)]
    res = linprog(cost, A_ub=A, b_ub=b, bounds=bounds, method="highs")
    if not res.success:
        raise UnderResolved(f"no bounded representative for class {tuple(periods)}: {res.message}")
    return IntegerCocycle(mesh, z - D @ res.x[:nv])


def angle_field_from_cocycle(cocycle, turns=True):
    """Integrate a closed cochain (in turns) along a BFS tree into vertex angles."""
    mesh = cocycle.mesh
    scale = TWO_PI if turns else 1.0
    nbrs = [[] for _ in range(mesh.n_vertices)]
    for ei, (u, v) in enumerate(mesh.edges):
        nbrs[u].append((int(v), ei, 1))
        nbrs[v].append((int(u), ei, -1))
    theta = np.full(mesh.n_vertices, np.nan)
    theta[0] = 0.0
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w, ei, s in nbrs[u]:
            if np.isnan(theta[w]):
                theta[w] = theta[u] + s * scale * cocycle.values[ei]
                queue.append(w)
    return AngleField(mesh, theta)


def angle_field_with_class(basis, periods):
    """Vertex angle field whose winding class is ``periods``; raises if unresolvable."""
    alpha = harmonic_periods_cocycle(basis, periods)
    worst = float(np.max(np.abs(alpha.values))) if len(alpha.values) else 0.0
    if worst >= 0.5 - ALIAS_TOL / TWO_PI:
        # the harmonic representative is smooth but may overshoot near
        # high-degree vertices; the minimax one is optimal for the bound
        alt = minimax_periods_cocycle(basis, periods)
        alt_worst = float(np.max(np.abs(alt.values)))
        if alt_worst < worst:
            alpha, worst = alt, alt_worst
    if abs(worst - 0.5) < ALIAS_TOL / TWO_PI:
        raise EdgeAliasing(f"class {tuple(periods)} needs exactly half a turn on some edge")
    if worst > 0.5:
        raise UnderResolved(
            f"class {tuple(periods)} needs {worst:.3f} turns on some edge (> 1/2); refine the mesh")
    return angle_field_from_cocycle(alpha)


def lattice_angle_field(mesh, a, b):
    """theta(i, j) = 2 pi (a i + b j) / n on a grid torus."""
    n = mesh.lattice_size
    i, j = mesh.lattice[:, 0], mesh.lattice[:, 1]
    return AngleField(mesh, TWO_PI * (a * i + b * j) / n)
