"""Integer 1-homology and 1-cohomology of a surface mesh.

Chains and cochains are integer (or real) arrays indexed by the mesh's edge
list, each edge taken in its canonical direction ``u < v``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import InternalRankError, MeshMismatch, NotIntegral, ValidationError
from .intlin import exact_det, exact_inverse, vector_gcd
from .mesh import genus

INTEGRALITY_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Cycle:
    mesh: object
    coefficients: np.ndarray

    def boundary(self):
        out = np.zeros(self.mesh.n_vertices, dtype=np.int64)
        e = self.mesh.edges
        np.add.at(out, e[:, 1], self.coefficients)
        np.add.at(out, e[:, 0], -self.coefficients)
        return out

    def to_json(self):
        return {"edges": [[int(u), int(v), int(c)]
                          for (u, v), c in zip(self.mesh.edges, self.coefficients) if c]}


def cycle_from_json(mesh, data):
    coeffs = np.zeros(mesh.n_edges, dtype=np.int64)
    for u, v, c in data["edges"]:
        i, s = mesh.edge_id(int(u), int(v))
        coeffs[i] += s * int(c)
    return Cycle(mesh, coeffs)


@dataclass(frozen=True, eq=False)
class IntegerCocycle:
    """Edge function, antisymmetric under reversal; real-valued when lifted from angles."""

    mesh: object
    values: np.ndarray

    def triangle_sums(self):
        ids, signs = self.mesh.triangle_edges()
        return (self.values[ids] * signs).sum(axis=1)


@dataclass(frozen=True, eq=False)
class CycleBasis:
    """``2g`` cycles plus the integer cocycles dual to them (``<duals[i], cycles[j]> = δij``)."""

    mesh: object
    cycles: np.ndarray
    duals: np.ndarray
    name: str

    def __len__(self):
        return len(self.cycles)

    def cycle(self, k):
        return Cycle(self.mesh, self.cycles[k])

    def dual(self, k):
        return IntegerCocycle(self.mesh, self.duals[k])


@dataclass(frozen=True)
class CohomologyClass:
    pairings: tuple
    basis_name: str = ""

    def to_json(self):
        return {"pairings": [int(v) for v in self.pairings]}


def coboundary(mesh, f):
    f = np.asarray(f)
    return IntegerCocycle(mesh, f[mesh.edges[:, 1]] - f[mesh.edges[:, 0]])


def pair(cocycle, cycle):
    if cocycle.mesh is not cycle.mesh:
        raise MeshMismatch("cocycle and cycle live on different meshes")
    nz = np.nonzero(cycle.coefficients)[0]
    # fixed-order exactly rounded sum keeps results reproducible
    return math.fsum(float(cycle.coefficients[i]) * float(cocycle.values[i]) for i in nz)


def pair_integer(cocycle, cycle):
    """Pairing rounded to an integer; raises :class:`NotIntegral` past the tolerance."""
    value = pair(cocycle, cycle)
    return round_integral(value)


def round_integral(value, tol=INTEGRALITY_TOL):
    r = round(value)
    if abs(value - r) >= tol * max(1.0, abs(value)):
        raise NotIntegral(f"pairing {value!r} is not an integer")
    return int(r)


def multiplicity(cls):
    """Largest m with cls = m * (primitive class); 0 for the zero class."""
    pairings = cls.pairings if isinstance(cls, CohomologyClass) else cls
    return vector_gcd(pairings)


# ------------------------------------------------------------ tree-cotree

def _spanning_tree(mesh):
    parent = [-1] * mesh.n_vertices
    parent_edge = [-1] * mesh.n_vertices
    depth = [0] * mesh.n_vertices
    nbrs = [[] for _ in range(mesh.n_vertices)]
    for ei, (u, v) in enumerate(mesh.edges):
        nbrs[u].append((int(v), ei))
        nbrs[v].append((int(u), ei))
    seen = [False] * mesh.n_vertices
    seen[0] = True
    queue = deque([0])
    in_tree = np.zeros(mesh.n_edges, dtype=bool)
    while queue:
        u = queue.popleft()
        for w, ei in nbrs[u]:
            if not seen[w]:
                seen[w] = True
                parent[w], parent_edge[w], depth[w] = u, ei, depth[u] + 1
                in_tree[ei] = True
                queue.append(w)
    return parent, parent_edge, depth, in_tree


def _tree_path(mesh, parent, depth, a, b):
    """Integer chain along the tree from ``a`` to ``b``."""
    chain = np.zeros(mesh.n_edges, dtype=np.int64)
    up, down = [], []
    while depth[a] > depth[b]:
        up.append((a, parent[a]))
        a = parent[a]
    while depth[b] > depth[a]:
        down.append((parent[b], b))
        b = parent[b]
    while a != b:
        up.append((a, parent[a]))
        down.append((parent[b], b))
        a, b = parent[a], parent[b]
    for u, v in up + down:
        i, s = mesh.edge_id(u, v)
        chain[i] += s
    return chain


def homology_basis(mesh):
    """Tree-cotree basis of H1 together with its dual integer cocycles."""
    g = genus(mesh)
    parent, _, depth, in_tree = _spanning_tree(mesh)
    ids, signs = mesh.triangle_edges()
    edge_tris = [[] for _ in range(mesh.n_edges)]
    for t in range(mesh.n_triangles):
        for k in range(3):
            edge_tris[ids[t, k]].append(t)

    # spanning tree of the dual graph through non-tree edges
    tparent_edge = [-1] * mesh.n_triangles
    seen = [False] * mesh.n_triangles
    seen[0] = True
    order = [0]
    queue = deque([0])
    in_cotree = np.zeros(mesh.n_edges, dtype=bool)
    while queue:
        t = queue.popleft()
        for k in range(3):
            e = ids[t, k]
            if in_tree[e]:
                continue
            for s in edge_tris[e]:
                if not seen[s]:
                    seen[s] = True
                    tparent_edge[s] = e
                    in_cotree[e] = True
                    order.append(s)
                    queue.append(s)
    generators = np.nonzero(~in_tree & ~in_cotree)[0]
    if len(generators) != 2 * g:
        raise InternalRankError(f"tree-cotree left {len(generators)} edges, expected {2 * g}")

    cycles = np.zeros((2 * g, mesh.n_edges), dtype=np.int64)
    duals = np.zeros((2 * g, mesh.n_edges), dtype=np.int64)
    for k, e in enumerate(generators):
        u, v = (int(x) for x in mesh.edges[e])
        cycles[k] = _tree_path(mesh, parent, depth, v, u)
        cycles[k, e] += 1
        duals[k] = _cotree_dual(mesh, e, ids, signs, order, tparent_edge)

    basis = CycleBasis(mesh, cycles, duals, "tree-cotree")
    _check_basis(basis)
    return basis


def _cotree_dual(mesh, gen_edge, ids, signs, order, tparent_edge):
    values = np.zeros(mesh.n_edges, dtype=np.int64)
    values[gen_edge] = 1
    # leaves first: each triangle fixes the value on the edge to its dual parent
    for t in reversed(order[1:]):
        e = tparent_edge[t]
        total = 0
        for k in range(3):
            if ids[t, k] != e:
                total += signs[t, k] * values[ids[t, k]]
        k = int(np.nonzero(ids[t] == e)[0][0])
        values[e] = -total * signs[t, k]
    return values


def _check_basis(basis):
    n = len(basis)
    P = basis.duals @ basis.cycles.T
    if not np.array_equal(P, np.eye(n, dtype=np.int64)):
        raise InternalRankError("dual cocycles do not pair to the identity")
    ids, signs = basis.mesh.triangle_edges()
    for d in basis.duals:
        if np.any((d[ids] * signs).sum(axis=1)):
            raise InternalRankError("dual cochain is not closed")
    for c in basis.cycles:
        if np.any(Cycle(basis.mesh, c).boundary()):
            raise InternalRankError("basis chain has nonzero boundary")
    if n and abs(exact_det(intersection_form(basis).tolist())) != 1:
        raise InternalRankError("intersection form is not unimodular")


def basis_from_cycles(mesh, cycles, name="custom"):
    """Wrap user cycles as a basis; they must generate H1 over the integers."""
    ref = homology_basis(mesh)
    cycles = np.array(cycles, dtype=np.int64).reshape(-1, mesh.n_edges)
    if len(cycles) != len(ref):
        raise ValidationError(f"expected {len(ref)} cycles, got {len(cycles)}")
    for c in cycles:
        if np.any(Cycle(mesh, c).boundary()):
            raise ValidationError("chain is not a cycle")
    if not len(ref):
        return ref
    Q = (ref.duals @ cycles.T).tolist()
    if abs(exact_det(Q)) != 1:
        raise ValidationError("cycles do not form an integral basis of H1")
    X = exact_inverse(Q)
    X = np.array([[int(v) for v in row] for row in X], dtype=np.int64)
    basis = CycleBasis(mesh, cycles, X @ ref.duals, name)
    _check_basis(basis)
    return basis


def grid_basis(mesh):
    """Meridian (i direction at j=0) and longitude (j direction at i=0) of a grid torus."""
    if mesh.lattice is None:
        raise ValidationError("mesh carries no lattice parametrization")
    n = mesh.lattice_size
    lookup = {(int(i), int(j)): v for v, (i, j) in enumerate(mesh.lattice)}
    cycles = np.zeros((2, mesh.n_edges), dtype=np.int64)
    for step in range(n):
        for k, (a, b) in enumerate((((step, 0), (step + 1, 0)), ((0, step), (0, step + 1)))):
            u = lookup[(a[0] % n, a[1] % n)]
            v = lookup[(b[0] % n, b[1] % n)]
            i, s = mesh.edge_id(u, v)
            cycles[k, i] += s
    return basis_from_cycles(mesh, cycles, name="grid")


def default_basis(mesh):
    return grid_basis(mesh) if mesh.lattice is not None else homology_basis(mesh)


def cup_form(basis):
    """Cup-product pairing of the dual cocycles against the fundamental class."""
    mesh = basis.mesh
    n = len(basis)
    out = np.zeros((n, n), dtype=np.int64)
    if not n:
        return out
    rows = []
    for a, b, c in mesh.triangles:
        s = sorted((int(a), int(b), int(c)))
        eps = _perm_sign((int(a), int(b), int(c)), s)
        e01 = mesh.edge_index[(s[0], s[1])]
        e12 = mesh.edge_index[(s[1], s[2])]
        rows.append((eps, e01, e12))
    for eps, e01, e12 in rows:
        out += eps * np.outer(basis.duals[:, e01], basis.duals[:, e12])
    return out


def _perm_sign(seq, sorted_seq):
    perm = [sorted_seq.index(x) for x in seq]
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def intersection_form(basis):
    """Algebraic intersection numbers of the basis cycles (antisymmetric, unimodular)."""
    n = len(basis)
    if not n:
        return np.zeros((0, 0), dtype=np.int64)
    C = cup_form(basis)
    inv = exact_inverse(C.tolist())
    if inv is None:
        raise InternalRankError("cup form is singular")
    M = np.array([[int(inv[j][i]) for j in range(n)] for i in range(n)], dtype=np.int64)
    if any(v.denominator != 1 for row in inv for v in row):
        raise InternalRankError("cup form is not unimodular")
    return M


def class_from_cocycle(cocycle, basis, scale=1.0):
    """Pair a closed cochain with each basis cycle, divide by ``scale``, round."""
    vals = []
    for k in range(len(basis)):
        vals.append(round_integral(pair(cocycle, basis.cycle(k)) / scale))
    return CohomologyClass(tuple(vals), basis.name)


def cocycle_with_periods(basis, periods):
    """Integer cocycle whose pairing with basis cycle k is ``periods[k]``."""
    periods = np.asarray(periods, dtype=np.int64)
    if len(periods) != len(basis):
        raise ValidationError(f"expected {len(basis)} periods, got {len(periods)}")
    vals = periods @ basis.duals if len(basis) else np.zeros(basis.mesh.n_edges, dtype=np.int64)
    return IntegerCocycle(basis.mesh, vals)


def is_primitive(vector):
    return vector_gcd(vector) == 1


__all__ = [
    "Cycle", "CycleBasis", "IntegerCocycle", "CohomologyClass", "coboundary", "pair",
    "pair_integer", "multiplicity", "homology_basis", "grid_basis", "default_basis",
    "basis_from_cycles", "intersection_form", "cup_form", "class_from_cocycle",
    "cocycle_with_periods", "cycle_from_json",
]
