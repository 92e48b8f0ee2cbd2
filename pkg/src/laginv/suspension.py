"""The double cone of a surface with its two cone points identified.

Slices ``t = 1 .. T-1`` carry copies of the mesh vertices; slice 0 and slice
T are crushed to the bottom and top cone points, which are then identified.
Label ``apex`` is the bottom cone point and ``apex + 1`` the top one; they
are one 0-cell but keep the cells above them apart, which matters at
``T = 2`` where both cones sit over the same slice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import LabeledComplex, orientation, perm_sign
from .errors import InconsistentPrismSplit, NotACycle, ValidationError
from .intlin import invariant_factors


@dataclass(frozen=True)
class HomologyProfile:
    betti: tuple
    torsion: tuple

    @property
    def ranks(self):
        return tuple(self.betti[1:4])

    def as_dict(self):
        return {"b1": self.betti[1], "b2": self.betti[2], "b3": self.betti[3],
                "torsion": {str(k): list(v) for k, v in enumerate(self.torsion) if k >= 1}}


class SuspensionComplex(LabeledComplex):
    def __init__(self, mesh, T):
        if T < 2:
            raise ValidationError("need at least 2 time steps")
        self.mesh = mesh
        self.T = T
        nv = mesh.n_vertices
        self.apex = (T - 1) * nv
        tets, signs = [], []
        for a, b, c in mesh.triangles:
            a, b, c = int(a), int(b), int(c)
            local = {a: (0.0, 0.0), b: (1.0, 0.0), c: (0.0, 1.0)}
            u, v, w = sorted((a, b, c))
            for t in range(1, T - 1):
                for tet in ((u, t), (v, t), (w, t), (w, t + 1)), \
                           ((u, t), (v, t), (v, t + 1), (w, t + 1)), \
                           ((u, t), (u, t + 1), (v, t + 1), (w, t + 1)):
                    self._add(tets, signs, tet, local)
            self._add(tets, signs, ((a, 1), (b, 1), (c, 1), (None, 0)), local)
            self._add(tets, signs, ((a, T - 1), (b, T - 1), (c, T - 1), (None, T)), local)
        super().__init__(tets, signs, self._vertex_of)
        self._check()

    def label(self, v, t):
        if t == 0:
            return self.apex
        if t == self.T:
            return self.apex + 1
        return (t - 1) * self.mesh.n_vertices + v

    def slice_of(self, label):
        """(mesh vertex or None, time index) of a label."""
        if label >= self.apex:
            return None, (0 if label == self.apex else self.T)
        nv = self.mesh.n_vertices
        return label % nv, label // nv + 1

    def _vertex_of(self, label):
        return self.apex if label == self.apex + 1 else label

    @property
    def n_points(self):
        return self.apex + 1

    def _add(self, tets, signs, corners, local):
        labels = [self.label(v, t) for v, t in corners]
        coords = [(*((1 / 3, 1 / 3) if v is None else local[v]), float(t)) for v, t in corners]
        order = np.argsort(labels)
        sorted_labels = tuple(int(labels[i]) for i in order)
        sign = orientation([coords[i] for i in order])
        tets.append(sorted_labels)
        signs.append(sign)

    def _check(self):
        count = {}
        for t in self.tets:
            for i in range(4):
                f = t[:i] + t[i + 1:]
                count[f] = count.get(f, 0) + 1
        if any(c != 2 for c in count.values()):
            raise InconsistentPrismSplit("a triangle is not shared by exactly two tetrahedra")
        if self.chain_boundary(3, self.fundamental_chain()):
            raise InconsistentPrismSplit("tetrahedra are not coherently oriented")

    def to_json(self):
        return {"tets": [[self._vertex_of(x) for x in t] for t in self.tets],
                "apex": self.apex, "slices": self.T}


def build_suspension(mesh, T):
    return SuspensionComplex(mesh, T)


def homology_profile(X):
    betti, torsion = X.homology()
    return HomologyProfile(tuple(betti), tuple(tuple(t) for t in torsion))


def _band_triangles(X, u, v):
    """Oriented triangles of the band over the directed edge u -> v, with signs."""
    T = X.T
    local = {u: 0.0, v: 1.0}
    lo, hi = min(u, v), max(u, v)
    pieces = [((u, 1), (v, 1), (None, 0)), ((u, T - 1), (v, T - 1), (None, T))]
    for t in range(1, T - 1):
        pieces.append(((lo, t), (hi, t), (hi, t + 1)))
        pieces.append(((lo, t), (lo, t + 1), (hi, t + 1)))
    out = []
    for piece in pieces:
        labels = [X.label(x, t) for x, t in piece]
        coords = [(0.5 if x is None else local[x], float(t)) for x, t in piece]
        order = np.argsort(labels)
        tri = tuple(int(labels[i]) for i in order)
        out.append((tri, orientation([coords[i] for i in order])))
    return out


def suspend_cycle(X, cycle_coefficients):
    """Sparse 2-chain swept by a mesh 1-cycle across all slices and coned at both ends."""
    chain = {}
    for (u, v), c in zip(X.mesh.edges, cycle_coefficients):
        if not c:
            continue
        for tri, s in _band_triangles(X, int(u), int(v)):
            j = X.tri_index[tri]
            chain[j] = chain.get(j, 0) + int(c) * s
    chain = {k: v for k, v in chain.items() if v}
    if X.chain_boundary(2, chain):
        raise NotACycle("suspended chain has nonzero boundary")
    return chain


def basis_2cycles(X, basis):
    if basis.mesh is not X.mesh:
        raise ValidationError("basis and complex are built over different meshes")
    return [suspend_cycle(X, c) for c in basis.cycles]


def chain_euler_characteristic(X, chain):
    """Euler characteristic of the support of a 2-chain, cone points kept apart."""
    tris = [X.triangles[j] for j in chain]
    edges = {e for t in tris for e in ((t[0], t[1]), (t[0], t[2]), (t[1], t[2]))}
    verts = {x for t in tris for x in t}
    return len(verts) - len(edges) + len(tris)


def spans_h2(X, chains):
    """True iff the 2-cycles form a Z-basis of H2(X).

    The columns of d3 together with the cycles must generate a saturated
    lattice of rank dim ker d2; since ker d2 is saturated this forces equality.
    """
    d3 = X.boundary(3)
    rows = {r: dict(v) for r, v in d3.items()}
    nt = len(X.tets)
    for k, chain in enumerate(chains):
        for r, c in chain.items():
            rows.setdefault(r, {})[nt + k] = c
    rank, torsion = invariant_factors(rows, nt + len(chains))
    r2, _ = invariant_factors(X.boundary(2), len(X.triangles))
    kernel_rank = len(X.triangles) - r2
    return rank == kernel_rank and not torsion


__all__ = ["HomologyProfile", "SuspensionComplex", "build_suspension", "homology_profile",
           "basis_2cycles", "suspend_cycle", "spans_h2", "chain_euler_characteristic", "perm_sign"]
