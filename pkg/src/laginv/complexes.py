"""Oriented 3-dimensional Delta-complexes given by labeled tetrahedra.

Simplices are sorted tuples of integer labels.  Several labels may name the
same 0-cell (``vertex_of``); everything above dimension 0 is determined by
labels, which is how a complex whose top cells share all their vertices is
still represented faithfully.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from .intlin import invariant_factors


def perm_sign(seq):
    """Sign of the permutation that sorts ``seq`` (distinct entries)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def orientation(points):
    """Sign of the simplex spanned by ``points`` (k+1 points in R^k)."""
    p = np.asarray(points, dtype=float)
    d = np.linalg.det(p[1:] - p[0])
    if abs(d) < 1e-12:
        raise ValueError("degenerate simplex")
    return 1 if d > 0 else -1


class LabeledComplex:
    def __init__(self, tets, signs, vertex_of):
        self.tets = [tuple(t) for t in tets]
        self.signs = list(signs)
        self.vertex_of = vertex_of
        tris = set()
        edges = set()
        labels = set()
        for t in self.tets:
            labels.update(t)
            tris.update(combinations(t, 3))
            edges.update(combinations(t, 2))
        self.labels = sorted(labels)
        self.triangles = sorted(tris)
        self.edges = sorted(edges)
        self.tet_index = {t: i for i, t in enumerate(self.tets)}
        self.tri_index = {t: i for i, t in enumerate(self.triangles)}
        self.edge_index = {e: i for i, e in enumerate(self.edges)}
        self.vertices = sorted({vertex_of(x) for x in self.labels})
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self._cache = {}

    def counts(self):
        return (len(self.vertices), len(self.edges), len(self.triangles), len(self.tets))

    def euler_characteristic(self):
        v, e, f, t = self.counts()
        return v - e + f - t

    def boundary(self, k):
        """Sparse ``d_k`` as ``{row: {col: value}}`` (rows are (k-1)-cells)."""
        if k in self._cache:
            return self._cache[k]
        rows = {}
        if k == 3:
            cells, faces = self.tets, self.tri_index
        elif k == 2:
            cells, faces = self.triangles, self.edge_index
        elif k == 1:
            for j, (a, b) in enumerate(self.edges):
                va = self.vertex_index[self.vertex_of(a)]
                vb = self.vertex_index[self.vertex_of(b)]
                if va != vb:
                    rows.setdefault(vb, {})[j] = rows.setdefault(vb, {}).get(j, 0) + 1
                    rows.setdefault(va, {})[j] = rows.setdefault(va, {}).get(j, 0) - 1
            self._cache[k] = rows
            return rows
        else:
            raise ValueError(k)
        for j, cell in enumerate(cells):
            for i in range(len(cell)):
                face = cell[:i] + cell[i + 1:]
                r = faces[face]
                rows.setdefault(r, {})[j] = (-1) ** i
        self._cache[k] = rows
        return rows

    def n_cells(self, k):
        return (len(self.vertices), len(self.edges), len(self.triangles), len(self.tets))[k]

    def homology(self):
        """Betti numbers b0..b3 and torsion coefficients per degree."""
        ranks = {0: 0, 4: 0}
        torsion = {0: []}
        for k in (1, 2, 3):
            r, tors = invariant_factors(self.boundary(k), self.n_cells(k))
            ranks[k] = r
            torsion[k - 1] = tors
        torsion[3] = []
        betti = [self.n_cells(k) - ranks[k] - ranks[k + 1] for k in range(4)]
        return betti, [torsion[k] for k in range(4)]

    def chain_boundary(self, k, chain):
        """Boundary of a sparse k-chain ``{cell_index: coeff}``."""
        out = {}
        cells = (None, self.edges, self.triangles, self.tets)[k]
        faces = (None, None, self.edge_index, self.tri_index)[k]
        for j, c in chain.items():
            if not c:
                continue
            cell = cells[j]
            if k == 1:
                a, b = cell
                for v, s in ((self.vertex_of(b), 1), (self.vertex_of(a), -1)):
                    out[v] = out.get(v, 0) + s * c
                continue
            for i in range(len(cell)):
                r = faces[cell[:i] + cell[i + 1:]]
                out[r] = out.get(r, 0) + (-1) ** i * c
        return {k_: v for k_, v in out.items() if v}

    def fundamental_chain(self):
        return {i: s for i, s in enumerate(self.signs)}
