"""Closed oriented triangulated surfaces with per-vertex tangent frames."""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateFrame,
    Disconnected,
    NonManifold,
    NonOrientable,
    ResolutionTooLow,
    ValidationError,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MeshStatistics:
    vertex_count: int
    edge_count: int
    triangle_count: int
    genus: int
    orientable: bool = True

    def as_dict(self):
        return {
            "vertex_count": self.vertex_count,
            "edge_count": self.edge_count,
            "triangle_count": self.triangle_count,
            "genus": self.genus,
            "orientable": self.orientable,
        }


@dataclass(frozen=True, eq=False)
class SurfaceMesh:
    """Validated closed oriented surface.

    ``edges`` holds each undirected edge once as ``(u, v)`` with ``u < v``;
    that orientation is the canonical direction used by every chain and
    cochain on the mesh.  ``frames[i]`` is an orthonormal, right-handed
    (with respect to the triangle orientation) pair of tangent vectors.
    ``lattice`` is set on grid tori only and holds the integer ``(i, j)``
    parametrization of each vertex on an ``n x n`` grid.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    edges: np.ndarray
    frames: np.ndarray
    lattice: np.ndarray | None = None
    lattice_size: int | None = None
    name: str = ""
    edge_index: dict = field(default_factory=dict, repr=False)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def n_triangles(self):
        return len(self.triangles)

    def euler_characteristic(self):
        return self.n_vertices - self.n_edges + self.n_triangles

    def edge_id(self, u, v):
        """Index and sign of the directed edge ``u -> v``."""
        if u < v:
            return self.edge_index[(u, v)], 1
        return self.edge_index[(v, u)], -1

    def triangle_edges(self):
        """(F, 3) edge ids and (F, 3) signs of the boundary of each triangle."""
        ids = np.empty((self.n_triangles, 3), dtype=np.int64)
        signs = np.empty((self.n_triangles, 3), dtype=np.int64)
        for t, (a, b, c) in enumerate(self.triangles):
            for k, (u, v) in enumerate(((a, b), (b, c), (c, a))):
                ids[t, k], signs[t, k] = self.edge_id(int(u), int(v))
        return ids, signs

    def statistics(self):
        return MeshStatistics(self.n_vertices, self.n_edges, self.n_triangles, genus(self))

    def vertex_neighbors(self):
        nbrs = [[] for _ in range(self.n_vertices)]
        for u, v in self.edges:
            nbrs[u].append(int(v))
            nbrs[v].append(int(u))
        return nbrs


def genus(mesh):
    chi = mesh.euler_characteristic()
    return (2 - chi) // 2


def _parse_coordinate(x):
    # decimal strings are read exactly; floats are exact binary rationals
    if isinstance(x, str):
        return float(Fraction(x))
    return float(x)


def build_mesh(vertices, triangles, frames=None, lattice=None, lattice_size=None, name=""):
    """Validate surface data and return a :class:`SurfaceMesh`.

    Triangle orientations are made coherent by propagation from the first
    triangle; inputs whose orientation had to be repaired are logged.
    """
    verts = np.array([[_parse_coordinate(c) for c in p] for p in vertices], dtype=float)
    if verts.ndim != 2 or verts.shape[1] != 3:
        raise ValidationError("vertices must be 3-vectors")
    nv = len(verts)
    if nv < 4:
        raise ValidationError("a closed surface needs at least 4 vertices")
    tris = [tuple(int(i) for i in t) for t in triangles]
    for t in tris:
        if len(t) != 3 or len(set(t)) != 3:
            raise ValidationError(f"bad triangle {t}")
        if min(t) < 0 or max(t) >= nv:
            raise ValidationError(f"triangle {t} has an index out of range")
    if len(set(tuple(sorted(t)) for t in tris)) != len(tris):
        raise NonManifold("duplicate triangle")

    edge_tris = {}
    for ti, (a, b, c) in enumerate(tris):
        for u, v in ((a, b), (b, c), (c, a)):
            edge_tris.setdefault((min(u, v), max(u, v)), []).append(ti)
    for e, ts in edge_tris.items():
        if len(ts) != 2:
            raise NonManifold(f"edge {e} lies in {len(ts)} triangles")

    tris = _orient(tris, edge_tris)
    _check_vertex_links(nv, tris)
    _check_connected(nv, edge_tris)

    edges = np.array(sorted(edge_tris), dtype=np.int64)
    chi = nv - len(edges) + len(tris)
    if chi % 2 or chi > 2:
        raise ValidationError(f"Euler characteristic {chi} is not that of a closed orientable surface")
    tri_arr = np.array(tris, dtype=np.int64)
    if frames is None:
        fr = default_frames(verts, tri_arr)
    else:
        fr = _orthonormalize_frames(verts, tri_arr, np.array(
            [[[_parse_coordinate(c) for c in vec] for vec in pair] for pair in frames], dtype=float))
    lat = None if lattice is None else np.array(lattice, dtype=np.int64)
    return SurfaceMesh(
        vertices=verts,
        triangles=tri_arr,
        edges=edges,
        frames=fr,
        lattice=lat,
        lattice_size=lattice_size,
        name=name,
        edge_index={(int(u), int(v)): i for i, (u, v) in enumerate(edges)},
    )


def _orient(tris, edge_tris):
    nt = len(tris)
    flip = [None] * nt
    changed = False

    def directed(t, f):
        a, b, c = tris[t]
        d = ((a, b), (b, c), (c, a))
        return [(v, u) for u, v in d] if f else list(d)

    # each triangle component is oriented from its first triangle; components
    # are rejected later by the vertex-link and connectivity checks
    for root in range(nt):
        if flip[root] is not None:
            continue
        flip[root] = False
        queue = deque([root])
        changed |= _propagate(queue, flip, edge_tris, directed)

    if changed:
        log.warning("triangle orientations were made coherent by flipping %d triangles",
                    sum(flip))
    return [(a, c, b) if f else (a, b, c) for (a, b, c), f in zip(tris, flip)]


def _propagate(queue, flip, edge_tris, directed):
    changed = False
    while queue:
        t = queue.popleft()
        for u, v in directed(t, flip[t]):
            key = (min(u, v), max(u, v))
            for s in edge_tris[key]:
                if s == t:
                    continue
                # neighbour must traverse the shared edge as v -> u
                s_unflipped = (v, u) in directed(s, False)
                want = not s_unflipped
                if flip[s] is None:
                    flip[s] = want
                    changed |= want
                    queue.append(s)
                elif flip[s] != want:
                    raise NonOrientable("no coherent orientation exists")
    return changed


def _check_vertex_links(nv, tris):
    # the link of each vertex must be a single cycle
    nxt = [dict() for _ in range(nv)]
    for a, b, c in tris:
        for v, x, y in ((a, b, c), (b, c, a), (c, a, b)):
            nxt[v][x] = y
    for v in range(nv):
        links = nxt[v]
        if not links:
            raise Disconnected(f"vertex {v} is isolated")
        start = next(iter(links))
        x, steps = start, 0
        while True:
            x = links[x]
            steps += 1
            if x == start:
                break
            if steps > len(links):
                raise NonManifold(f"vertex {v} has a broken link")
        if steps != len(links):
            raise NonManifold(f"vertex {v} is pinched")


def _check_connected(nv, edge_tris):
    adj = [[] for _ in range(nv)]
    for u, v in edge_tris:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    if len(seen) != nv:
        raise Disconnected("1-skeleton is disconnected")


def vertex_normals(verts, tris):
    normals = np.zeros_like(verts)
    a, b, c = verts[tris[:, 0]], verts[tris[:, 1]], verts[tris[:, 2]]
    n = np.cross(b - a, c - a)
    for k in range(3):
        np.add.at(normals, tris[:, k], n)
    return normals


def default_frames(verts, tris):
    """Frames from the two global axes least aligned with each vertex normal."""
    normals = vertex_normals(verts, tris)
    frames = np.empty((len(verts), 2, 3))
    axes = np.eye(3)
    for i, n in enumerate(normals):
        norm = np.linalg.norm(n)
        if norm < 1e-12:
            raise DegenerateFrame(f"vertex {i} has no well-defined average plane")
        n = n / norm
        order = np.argsort(np.abs(axes @ n), kind="stable")
        e1 = axes[order[0]] - (axes[order[0]] @ n) * n
        e2 = axes[order[1]] - (axes[order[1]] @ n) * n
        frames[i] = _gram_schmidt(e1, e2, n, i)
    return frames


def _gram_schmidt(e1, e2, n, i):
    l1 = np.linalg.norm(e1)
    if l1 < 1e-9:
        raise DegenerateFrame(f"frame at vertex {i} has rank < 2")
    e1 = e1 / l1
    e2 = e2 - (e2 @ e1) * e1
    l2 = np.linalg.norm(e2)
    if l2 < 1e-9:
        raise DegenerateFrame(f"frame at vertex {i} has rank < 2")
    e2 = e2 / l2
    if np.cross(e1, e2) @ n < 0:
        e2 = -e2
    return np.array([e1, e2])


def _orthonormalize_frames(verts, tris, frames):
    if frames.shape != (len(verts), 2, 3):
        raise ValidationError("frames must be one pair of 3-vectors per vertex")
    normals = vertex_normals(verts, tris)
    out = np.empty_like(frames)
    for i, (e1, e2) in enumerate(frames):
        n = normals[i]
        cross = np.cross(e1, e2)
        if np.linalg.norm(cross) < 1e-12 * max(1.0, np.linalg.norm(e1) * np.linalg.norm(e2)):
            raise DegenerateFrame(f"frame at vertex {i} is not linearly independent")
        if cross @ n <= 0:
            raise ValidationError(f"frame at vertex {i} disagrees with the surface orientation")
        out[i] = _gram_schmidt(e1, e2, n, i)
    return out


# ---------------------------------------------------------------- fixtures

def standard_fixture(kind, resolution):
    """Deterministic sphere, grid torus, or genus-2 mesh."""
    if resolution < 3:
        raise ResolutionTooLow(f"resolution must be >= 3, got {resolution}")
    if kind == "sphere":
        return sphere_mesh(resolution - 2)
    if kind == "torus":
        return torus_mesh(resolution)
    if kind == "genus2":
        return genus2_mesh(resolution)
    raise ValueError(f"unknown fixture kind {kind!r}")


def tetrahedron_mesh():
    verts = [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]]
    tris = [[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]]
    return build_mesh(verts, tris, name="tetrahedron")


def sphere_mesh(k):
    """Octahedron with each face cut into ``k*k`` triangles, pushed to the unit sphere."""
    corners = [np.array(v) for v in ((1, 0, 0), (0, 1, 0), (0, 0, 1),
                                     (-1, 0, 0), (0, -1, 0), (0, 0, -1))]
    faces = []
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                a = (0 if sx > 0 else 3)
                b = (1 if sy > 0 else 4)
                c = (2 if sz > 0 else 5)
                # outward orientation for the octant
                faces.append((a, b, c) if sx * sy * sz > 0 else (a, c, b))
    index = {}
    verts = []

    def vid(key):
        if key not in index:
            index[key] = len(verts)
            verts.append(key)
        return index[key]

    tris = []
    for a, b, c in faces:
        A, B, C = corners[a], corners[b], corners[c]

        def point(i, j):
            p = A * k + (B - A) * i + (C - A) * j  # exact integer coordinates scaled by k
            return vid(tuple(int(x) for x in p))

        for i in range(k):
            for j in range(k - i):
                tris.append((point(i, j), point(i + 1, j), point(i, j + 1)))
                if i + j < k - 1:
                    tris.append((point(i + 1, j), point(i + 1, j + 1), point(i, j + 1)))
    pts = np.array(verts, dtype=float)
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return build_mesh(pts.tolist(), tris, name=f"sphere-{k + 2}")


def _torus_data(n, offset=0, shift=(0.0, 0.0, 0.0)):
    verts, lattice = [], []
    for i in range(n):
        for j in range(n):
            u, v = 2 * np.pi * i / n, 2 * np.pi * j / n
            verts.append([(2 + np.cos(v)) * np.cos(u) + shift[0],
                          (2 + np.cos(v)) * np.sin(u) + shift[1],
                          np.sin(v) + shift[2]])
            lattice.append((i, j))

    def vid(i, j):
        return offset + (i % n) * n + (j % n)

    tris = []
    for i in range(n):
        for j in range(n):
            # squares are split along the anti-diagonal (i+1, j) -- (i, j+1)
            tris.append((vid(i, j), vid(i + 1, j), vid(i, j + 1)))
            tris.append((vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)))
    return verts, tris, lattice


def torus_mesh(n):
    """``n x n`` grid torus; vertex ``(i, j)`` has index ``i*n + j``."""
    verts, tris, lattice = _torus_data(n)
    return build_mesh(verts, tris, lattice=lattice, lattice_size=n, name=f"torus-{n}")


def genus2_mesh(n):
    """Two ``n x n`` grid tori with one triangle removed from each, glued along the holes."""
    v1, t1, _ = _torus_data(n)
    v2, t2, _ = _torus_data(n, offset=n * n, shift=(6.0, 0.0, 0.0))
    hole1 = t1.pop(0)
    hole2 = t2.pop(0)
    a, b, c = hole1
    # reversed identification keeps the orientation coherent across the seam
    glue = {hole2[0]: a, hole2[1]: c, hole2[2]: b}
    keep = [i for i in range(n * n, 2 * n * n) if i not in glue]
    renum = {old: n * n + k for k, old in enumerate(keep)}
    renum.update(glue)
    verts = v1 + [v2[i - n * n] for i in keep]
    tris = t1 + [tuple(renum[x] for x in t) for t in t2]
    return build_mesh(verts, tris, name=f"genus2-{n}")
