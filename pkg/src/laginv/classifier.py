"""Homotopy classification of PL maps from the identified double cone to S^2.

A map is given by one unit vector per 0-cell of the suspension complex and
extended over each simplex by linear interpolation followed by radial
projection.  Its class is the pair ``(c, d)``: ``c`` pairs the pulled-back
area generator with the basis 2-cycles, ``d`` is the linking number of two
regular-value preimages, well defined modulo ``n = gcd(c)``.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np
from scipy.optimize import linprog

from .complexes import LabeledComplex, orientation
from .errors import (
    BoundaryConditionViolated,
    DegenerateImage,
    DegenerateTrivialization,
    MeshMismatch,
    NoRegularValue,
    NotACycle,
    NotNullHomologous,
    NotRegular,
    RegularValueDisagreement,
    ValidationError,
)
from .forms import ZeroSectionFormField, canonical_field, compatible_J, form_field_from_json
from .homology import default_basis
from .intlin import solve_integer, solve_rational
from .suspension import basis_2cycles, build_suspension

NORTH = np.array([0.0, 0.0, 1.0])
UNIT_TOL = 1e-9
REGULAR_MARGIN = 1e-6
MAX_ATTEMPTS = 100
BOUNDARY_TOL = 1e-9
GRAM_COND_MAX = 1e9


@dataclass(frozen=True, eq=False)
class SphereMapData:
    complex: object
    vectors: np.ndarray
    boundary_conditioned: bool = True

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.shape != (self.complex.n_points, 3):
            raise ValidationError(f"need {self.complex.n_points} unit vectors, got shape {v.shape}")
        if np.any(np.abs(np.linalg.norm(v, axis=1) - 1.0) > UNIT_TOL):
            raise ValidationError("map vectors must have unit norm")
        if self.boundary_conditioned and not np.array_equal(v[self.complex.apex], NORTH):
            raise BoundaryConditionViolated("the apex must map to the north pole")
        object.__setattr__(self, "vectors", v)

    def label_images(self):
        """Image per label (both cone labels share the apex image)."""
        return np.vstack([self.vectors, self.vectors[self.complex.apex]])

    def digest(self):
        return hashlib.sha256(np.ascontiguousarray(self.vectors).tobytes()).hexdigest()

    def to_json(self):
        return {"vectors": self.vectors.tolist(), "boundary_conditioned": bool(self.boundary_conditioned)}

    @classmethod
    def from_json(cls, mesh, data):
        try:
            vectors = np.asarray(data["vectors"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"map file needs a 'vectors' list of 3-vectors: {exc}") from None
        nv = mesh.n_vertices
        if vectors.ndim != 2 or vectors.shape[1] != 3 or (len(vectors) - 1) % nv:
            raise ValidationError(f"vector count must be (T-1)*{nv} + 1")
        T = (len(vectors) - 1) // nv + 1
        return cls(build_suspension(mesh, T), vectors, bool(data.get("boundary_conditioned", True)))


@dataclass(frozen=True)
class NInvariant:
    c: tuple
    n: int
    d: int
    details: dict = field(default_factory=dict, compare=False)

    def as_dict(self):
        return {"c": [int(x) for x in self.c], "n": int(self.n), "d": int(self.d), **self.details}


# ------------------------------------------------------------ trivialization

def s2_coordinates(J, J_ref, J_plus, metric=np.eye(4)):
    """Coordinates of ``J`` in the frame built from ``J_ref`` (north) and ``J_plus``.

    Inputs are stacked ``(n, 4, 4)`` or single matrices.  In a metric
    orthonormal frame each structure is an antisymmetric matrix; with the
    inner product ``tr(A^T B) / 4`` the frame is ``e3 = J_ref``, ``e1`` the
    part of ``J_plus`` orthogonal to ``e3`` and ``e2`` the antisymmetric part
    of ``J_plus J_ref`` orthogonalized against both.
    """
    single = np.ndim(J) == 2
    J, J_ref, J_plus = (np.asarray(a, dtype=float).reshape(-1, 4, 4) for a in (J, J_ref, J_plus))
    n = max(len(J), len(J_ref), len(J_plus))
    G = np.broadcast_to(np.asarray(metric, dtype=float), (n, 4, 4))
    L = np.linalg.cholesky(G)
    Linv = np.linalg.inv(L)
    LT = np.swapaxes(L, -1, -2)
    LinvT = np.swapaxes(Linv, -1, -2)

    def ortho(A):
        return LT @ A @ LinvT

    def inner(a, b):
        return np.einsum("nij,nij->n", a, b) / 4.0

    e3 = ortho(np.broadcast_to(J_ref, (n, 4, 4)))
    P = ortho(np.broadcast_to(J_plus, (n, 4, 4)))
    Q = P @ e3
    Q = 0.5 * (Q - np.swapaxes(Q, -1, -2))
    gram = np.stack([np.stack([inner(a, b) for b in (e3, P, Q)], -1) for a in (e3, P, Q)], -2)
    if np.any(np.linalg.cond(gram) > GRAM_COND_MAX):
        raise DegenerateTrivialization("reference structures do not span a 3-frame")
    e1 = P - inner(P, e3)[:, None, None] * e3
    e1 = e1 / np.sqrt(inner(e1, e1))[:, None, None]
    e2 = Q - inner(Q, e3)[:, None, None] * e3 - inner(Q, e1)[:, None, None] * e1
    e2 = e2 / np.sqrt(inner(e2, e2))[:, None, None]
    X = ortho(np.broadcast_to(J, (n, 4, 4)))
    out = np.stack([inner(X, e1), inner(X, e2), inner(X, e3)], -1)
    out /= np.linalg.norm(out, axis=-1, keepdims=True)
    out[np.max(np.abs(X - e3), axis=(1, 2)) <= 1e-12] = NORTH
    return out[0] if single else out


# ------------------------------------------------------------ regular values

def _regularity_defect(images, edges, p):
    """Smallest angular distance of ``p`` to the great circles through image edges."""
    fa = images[edges[:, 0]]
    fb = images[edges[:, 1]]
    cr = np.cross(fa, fb)
    norms = np.linalg.norm(cr, axis=1)
    worst = np.inf
    big = norms > 1e-12
    if np.any(big):
        worst = float(np.min(np.abs(cr[big] @ p) / norms[big]))
    if np.any(~big):
        worst = min(worst, float(np.min(np.linalg.norm(np.cross(fa[~big], p), axis=1))))
    return worst


def is_regular(images, cplx, p, margin=REGULAR_MARGIN):
    edges = np.asarray(cplx.edges, dtype=int).reshape(-1, 2)
    return _regularity_defect(images, edges, np.asarray(p, dtype=float)) > margin


def candidate_values(seed):
    """Deterministic low-discrepancy points on S^2 offset by ``seed`` bytes."""
    h = hashlib.sha256(seed).digest()
    s1 = int.from_bytes(h[:8], "big") / 2.0**64
    s2 = int.from_bytes(h[8:16], "big") / 2.0**64
    a1, a2 = math.sqrt(2.0) - 1.0, math.sqrt(3.0) - 1.0
    for k in range(1, MAX_ATTEMPTS + 1):
        z = 1.0 - 2.0 * ((s1 + k * a1) % 1.0)
        phi = 2.0 * math.pi * ((s2 + k * a2) % 1.0)
        r = math.sqrt(max(0.0, 1.0 - z * z))
        yield np.array([r * math.cos(phi), r * math.sin(phi), z])


def regular_values(F, count, exclude=(), complex=None, images=None):
    """First ``count`` regular values of the deterministic sequence seeded by ``F``."""
    cplx = complex or F.complex
    images = F.label_images() if images is None else images
    edges = np.asarray(cplx.edges, dtype=int).reshape(-1, 2)
    out = []
    for p in candidate_values(F.digest().encode()):
        if any(np.linalg.norm(p - e) < REGULAR_MARGIN for e in exclude):
            continue
        if _regularity_defect(images, edges, p) > REGULAR_MARGIN:
            out.append(p)
            if len(out) == count:
                return out
    raise NoRegularValue(f"found {len(out)} of {count} regular values in {MAX_ATTEMPTS} attempts")


# ------------------------------------------------------------ cocycles

def _triple(a, b, c):
    return np.einsum("ij,ij->i", a, np.cross(b, c))


def pullback_cocycle(images, triangles, p):
    """Integer 2-cocycle: sign of each triangle whose radial image covers ``p``."""
    tri = np.asarray(triangles, dtype=int).reshape(-1, 3)
    out = np.zeros(len(tri), dtype=np.int64)
    if not len(tri):
        return out
    f0, f1, f2 = images[tri[:, 0]], images[tri[:, 1]], images[tri[:, 2]]
    P = np.broadcast_to(p, f0.shape)
    d0 = _triple(P, f1, f2)
    d1 = _triple(f0, P, f2)
    d2 = _triple(f0, f1, P)
    s = np.sign(d0)
    cand = np.nonzero((s != 0) & (np.sign(d1) == s) & (np.sign(d2) == s))[0]
    for i in cand:
        D = _exact_det(f0[i], f1[i], f2[i])
        if D != 0 and (D > 0) == (s[i] > 0):
            out[i] = 1 if D > 0 else -1
    return out


def _exact_det(a, b, c):
    a, b, c = ([Fraction(float(x)) for x in v] for v in (a, b, c))
    return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
            + a[2] * (b[0] * c[1] - b[1] * c[0]))


def check_nondegenerate(F):
    """Raise DegenerateImage if some tetrahedron's linear image contains the origin."""
    images = F.label_images()
    tets = np.asarray(F.complex.tets, dtype=int)
    f = images[tets]
    h = f.sum(axis=1)
    h /= np.maximum(np.linalg.norm(h, axis=1, keepdims=True), 1e-300)
    margin = np.einsum("tkj,tj->tk", f, h).min(axis=1)
    for i in np.nonzero(margin <= 1e-9)[0]:
        # max t subject to h . f_k >= t, |h_j| <= 1
        res = linprog(c=[0, 0, 0, -1], A_ub=np.hstack([-f[i], np.ones((4, 1))]), b_ub=np.zeros(4),
                      bounds=[(-1, 1)] * 3 + [(None, 1)], method="highs")
        if not res.success or -res.fun <= 1e-12:
            raise DegenerateImage(f"image of tetrahedron {int(i)} contains the origin; refine the complex")


def chern_class(F, cycles, count=2):
    """Pairings of the pulled-back area generator with ``cycles``, checked at ``count`` values."""
    X = F.complex
    if not cycles:
        return ()
    images = F.label_images()
    tri = np.asarray(X.triangles, dtype=int)
    results = []
    for p in regular_values(F, count):
        u = pullback_cocycle(images, tri, p)
        results.append(tuple(int(sum(c * int(u[j]) for j, c in z.items())) for z in cycles))
    if any(r != results[0] for r in results):
        raise RegularValueDisagreement(f"chern class differs between regular values: {results}")
    return results[0]


# ------------------------------------------------------------ preimages

@dataclass(eq=False)
class PreimageCycle:
    complex: LabeledComplex
    chain: dict
    images: np.ndarray
    crossings: dict
    value: np.ndarray
    base: object = None

    def components(self):
        """Number of closed loops in the support of the chain."""
        parent = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for j in self.chain:
            a, b = self.complex.edges[j]
            parent[find(a)] = find(b)
        return len({find(x) for x in parent})

    def __len__(self):
        return len(self.chain)


def _local_coords(n):
    return [np.zeros(3)] + [np.eye(3)[k] for k in range(n - 1)]


def preimage_cycle(F, p):
    """Preimage of the ray through ``p`` as an integer 1-cycle of a local refinement."""
    p = np.asarray(p, dtype=float)
    X = F.complex
    images = F.label_images()
    if not is_regular(images, X, p):
        raise NotRegular("value lies on the image of an edge great circle")
    check_nondegenerate(F)
    tri_u = pullback_cocycle(images, X.triangles, p)
    base = len(images)
    face_label = {}
    crossings = {}
    tets, signs = [], []
    chain_edges = []
    for sigma, eps in zip(X.tets, X.signs):
        crossed = []
        for i in range(4):
            face = sigma[:i] + sigma[i + 1:]
            u = int(tri_u[X.tri_index[face]])
            if u:
                crossed.append((i, face, eps * (-1) ** i * u))
        if not crossed:
            tets.append(sigma)
            signs.append(eps)
            continue
        if len(crossed) != 2 or crossed[0][2] == crossed[1][2]:
            raise NotRegular("preimage does not cross a tetrahedron through exactly two faces")
        for _, face, _ in crossed:
            if face not in face_label:
                face_label[face] = base + len(face_label)
                crossings[face_label[face]] = (face, _barycentric(images[list(face)], p))
        (i_in, f_in, _), (i_out, f_out, _) = sorted(crossed, key=lambda c: c[2])
        a, c = face_label[f_in], face_label[f_out]
        chain_edges.append((a, c))
        local = dict(zip(sigma, _local_coords(4)))
        local[a] = np.mean([local[x] for x in f_in], axis=0)
        local[c] = np.mean([local[x] for x in f_out], axis=0)
        pieces = [(a, c, x, y) for x, y in ((f_out[0], f_out[1]), (f_out[0], f_out[2]), (f_out[1], f_out[2]))]
        for i in range(4):
            if i not in (i_in, i_out):
                pieces.append((a,) + sigma[:i] + sigma[i + 1:])
        for piece in pieces:
            lab = tuple(sorted(piece))
            tets.append(lab)
            signs.append(eps * orientation([local[x] for x in lab]))
    apex = X.apex
    R = LabeledComplex(tets, signs, lambda x: apex if x == apex + 1 else x)
    new_images = np.vstack([images, np.broadcast_to(p, (len(face_label), 3))]) if face_label else images
    chain = {}
    for a, c in chain_edges:
        e = (a, c) if a < c else (c, a)
        j = R.edge_index[e]
        chain[j] = chain.get(j, 0) + (1 if a < c else -1)
    chain = {j: v for j, v in chain.items() if v}
    if R.chain_boundary(1, chain):
        raise NotACycle("preimage chain has nonzero boundary")
    return PreimageCycle(R, chain, new_images, crossings, p, X)


def _barycentric(f, p):
    """Exact barycentric coordinates of the point of the image triangle on the ray of ``p``."""
    fr = [[Fraction(float(x)) for x in v] for v in f]
    pr = [Fraction(float(x)) for x in p]

    def det(a, b, c):
        return (a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0]))

    d = [det(pr, fr[1], fr[2]), det(fr[0], pr, fr[2]), det(fr[0], fr[1], pr)]
    total = sum(d)
    lam = [x / total for x in d]
    point = [sum(lam[k] * fr[k][j] for k in range(3)) for j in range(3)]
    cross = [point[1] * pr[2] - point[2] * pr[1], point[2] * pr[0] - point[0] * pr[2],
             point[0] * pr[1] - point[1] * pr[0]]
    if any(cross) or min(lam) <= 0 or sum(point[j] * pr[j] for j in range(3)) <= 0:
        raise NotRegular("crossing point does not snap onto the ray")
    return tuple(lam)


def lift_2chain(pre, chain):
    """Image of a 2-chain of the unrefined complex in the refined one."""
    R = pre.complex
    split = {face: lab for lab, (face, _) in pre.crossings.items()}
    out = {}
    for j, c in chain.items():
        tri = pre.base.triangles[j]
        if tri not in split:
            k = R.tri_index[tri]
            out[k] = out.get(k, 0) + c
            continue
        a = split[tri]
        local = dict(zip(tri, _local_coords(3)[:3]))
        local = {x: v[:2] for x, v in local.items()}
        local[a] = np.mean(list(local.values()), axis=0)
        for x, y in ((tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])):
            lab = tuple(sorted((a, x, y)))
            k = R.tri_index[lab]
            out[k] = out.get(k, 0) + c * orientation([local[v] for v in lab])
    return {k: v for k, v in out.items() if v}


# ------------------------------------------------------------ Hopf degree

@dataclass(frozen=True)
class HopfResult:
    raw: int
    d: int
    n: int
    p: tuple
    q: tuple


def bounding_chain(pre):
    """Integer 2-chain ``x`` with ``d x = A`` in the refined complex, or raise."""
    R = pre.complex
    rows = R.boundary(2)
    x = solve_integer(rows, len(R.triangles), pre.chain)
    if x is None:
        xr = solve_rational(rows, len(R.triangles), pre.chain)
        raise NotNullHomologous("preimage cycle bounds no integer chain",
                                rational_value=None if xr is None else xr)
    return x


def linking(pre, x, q):
    """Intersection of the chain ``x`` with the preimage of ``q`` (counted by covering)."""
    R = pre.complex
    if not is_regular(pre.images, R, q):
        raise NotRegular("second value is not regular on the refined complex")
    cols = sorted(x)
    tri = np.asarray([R.triangles[j] for j in cols], dtype=int).reshape(-1, 3)
    u = pullback_cocycle(pre.images, tri, q)
    total = sum(x[j] * int(v) for j, v in zip(cols, u))
    return int(total) if Fraction(total).denominator == 1 else Fraction(total)


def _gcd(values):
    return reduce(math.gcd, (abs(int(v)) for v in values), 0)


def hopf_degree(F, c, p=None, q=None):
    """Linking number of two regular preimages, reduced into [0, n) when n = gcd(c) > 0."""
    n = _gcd(c)
    if p is None:
        p = regular_values(F, 1)[0]
    pre = preimage_cycle(F, p)
    if q is None:
        q = regular_values(F, 1, exclude=[p], complex=pre.complex, images=pre.images)[0]
    if pre.chain:
        try:
            x = bounding_chain(pre)
        except NotNullHomologous as exc:
            if exc.rational_value is not None:
                value = linking(pre, exc.rational_value, q)
                raise NotNullHomologous(f"{exc}; rational linking value {value}", rational_value=value) from None
            raise
        raw = linking(pre, x, q)
    else:
        raw = 0
    d = raw % n if n > 0 else raw
    return HopfResult(raw, d, n, tuple(float(v) for v in p), tuple(float(v) for v in q))


def classify(F, X=None, cycles=None):
    """The class (c, n, d) of ``F`` in [X, S^2]."""
    X = X or F.complex
    if X is not F.complex:
        raise MeshMismatch("map is defined on a different complex")
    if cycles is None:
        cycles = basis_2cycles(X, default_basis(X.mesh))
    check_nondegenerate(F)
    c = chern_class(F, cycles, count=2)
    h = hopf_degree(F, c)
    return NInvariant(tuple(c), h.n, h.d, {"d_raw": h.raw})


# ------------------------------------------------------------ isotopy paths

@dataclass(eq=False)
class IsotopyPath:
    mesh: object
    omegas: list
    omega_plus: list
    metric: np.ndarray
    reference: ZeroSectionFormField = None

    def __post_init__(self):
        if len(self.omegas) != len(self.omega_plus):
            raise ValidationError("each slice needs both omega and omega_plus")
        if len(self.omegas) < 3:
            raise ValidationError("a path needs at least 3 slices")
        if self.reference is None:
            self.reference = canonical_field(self.mesh)
        self.metric = np.asarray(self.metric, dtype=float)

    @property
    def T(self):
        return len(self.omegas) - 1

    @classmethod
    def from_json(cls, mesh, data):
        try:
            slices = data["slices"]
            omegas = [form_field_from_json(mesh, s) for s in slices]
            plus = [form_field_from_json(mesh, {"omega": s["omega_plus"]}, lagrangian=False) for s in slices]
            metric = np.asarray(data.get("metric", np.eye(4).tolist()), dtype=float)
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed path file: {exc}") from None
        if metric.shape == (16,):
            metric = metric.reshape(4, 4)
        ref = form_field_from_json(mesh, data["reference"]) if "reference" in data else None
        return cls(mesh, omegas, plus, metric, ref)

    def to_json(self):
        return {"slices": [{"omega": w.to_json()["omega"], "omega_plus": wp.to_json()["omega"]}
                           for w, wp in zip(self.omegas, self.omega_plus)],
                "metric": self.metric.tolist(), "reference": self.reference.to_json()}


def path_sphere_map(path):
    """SphereMapData on X of the trivialization coordinates of the reference structure."""
    mesh = path.mesh
    nv = mesh.n_vertices
    for w in path.omegas:
        w.validate()
    path.reference.validate()
    G = np.broadcast_to(path.metric, (nv, 4, 4)) if path.metric.shape == (4, 4) else path.metric
    J_ref = compatible_J(G, path.reference.omega)
    for t in (0, path.T):
        Jt = compatible_J(G, path.omegas[t].omega)
        if np.max(np.abs(Jt - J_ref)) > BOUNDARY_TOL:
            raise BoundaryConditionViolated(f"slice {t} does not reproduce the reference structure")
    X = build_suspension(mesh, path.T)
    vectors = np.zeros((X.n_points, 3))
    for t in range(1, path.T):
        Jt = compatible_J(G, path.omegas[t].omega)
        Jp = compatible_J(G, path.omega_plus[t].omega)
        coords = s2_coordinates(J_ref, Jt, Jp, G)
        # snap exact reference hits onto the pole
        coords[np.max(np.abs(Jt - J_ref), axis=(1, 2)) <= BOUNDARY_TOL] = NORTH
        vectors[(t - 1) * nv:t * nv] = coords
    vectors[X.apex] = NORTH
    return SphereMapData(X, vectors, boundary_conditioned=True)


def n_invariant(path):
    return classify(path_sphere_map(path))


__all__ = [
    "SphereMapData", "NInvariant", "PreimageCycle", "HopfResult", "IsotopyPath",
    "s2_coordinates", "candidate_values", "regular_values", "is_regular", "pullback_cocycle",
    "check_nondegenerate", "chern_class", "preimage_cycle", "lift_2chain", "bounding_chain", "linking",
    "hopf_degree", "classify", "path_sphere_map", "n_invariant", "NORTH",
]
