"""Symplectic forms along the zero section of the cotangent bundle.

Index convention: at each vertex the 4x4 matrix ``W`` acts on coordinates
``(v1, v2, eta1, eta2)`` of ``T_x L (+) T*_x L`` in the vertex frame
``e1, e2`` and its dual coframe ``e^1, e^2``, with ``omega(u, v) = u^T W v``.
The zero section is Lagrangian iff ``W[:2, :2] = 0``; the bundle map
``v -> omega(v, .)`` restricted to the fibre directions is the upper-right
block ``B = W[:2, 2:]``.

Orientation is the one in which the canonical form squares to a positive
volume form, i.e. ``e1, e^1, e2, e^2`` is positive.  :func:`pfaffian` is taken
with respect to that orientation, so the canonical form has Pfaffian 1.

For a fibrewise automorphism ``rho`` the form ``-d(rho(y) o dpi)`` restricted
to the zero section is ``sum_ij rho_ij dx_i ^ dy_j``: the fibre derivatives
of ``rho`` are multiplied by ``y`` and vanish there.  Hence its block is
``B = rho`` exactly, with ``W[2:, :2] = -rho^T``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateBlock,
    FormValidationError,
    MeshMismatch,
    NondegeneracyFailure,
    NotSPD,
    SingularMatrix,
    ValidationError,
)
from .winding import MatrixField, angle_field_with_class, rotation

TOL_ANTISYM = 1e-12
TOL_LAGRANGIAN = 1e-12
BLOCK_TOL = 1e-12
J_TOL = 1e-9

AREA_FORM = np.array([[0.0, 1.0], [-1.0, 0.0]])


def pfaffian(W):
    """Pfaffian in the symplectic orientation (e1, e^1, e2, e^2); vectorized."""
    W = np.asarray(W)
    std = W[..., 0, 1] * W[..., 2, 3] - W[..., 0, 2] * W[..., 1, 3] + W[..., 0, 3] * W[..., 1, 2]
    return -std


@dataclass(frozen=True, eq=False)
class ZeroSectionFormField:
    mesh: object
    omega: np.ndarray
    lagrangian: bool = True

    def __post_init__(self):
        W = np.asarray(self.omega, dtype=float)
        if W.shape != (self.mesh.n_vertices, 4, 4):
            raise ValidationError("need one 4x4 matrix per vertex")
        object.__setattr__(self, "omega", W)

    def validate(self, tol_antisym=TOL_ANTISYM, tol_lagrangian=TOL_LAGRANGIAN):
        W = self.omega
        asym = np.max(np.abs(W + np.transpose(W, (0, 2, 1)))) if len(W) else 0.0
        if asym > tol_antisym:
            raise FormValidationError(f"form is not antisymmetric (defect {asym:.3g})")
        pf = pfaffian(W)
        if np.any(pf == 0):
            raise NondegeneracyFailure("form is degenerate at some vertex")
        if np.any(pf < 0):
            raise FormValidationError("form has negative Pfaffian at some vertex")
        if self.lagrangian:
            lag = np.max(np.abs(W[:, :2, :2])) if len(W) else 0.0
            if lag > tol_lagrangian:
                raise FormValidationError(f"zero section is not Lagrangian (defect {lag:.3g})")
        return self

    def scaled(self, k):
        return ZeroSectionFormField(self.mesh, k * self.omega, self.lagrangian)

    def to_json(self):
        return {"omega": [[float(x) for x in w.reshape(-1)] for w in self.omega]}


def form_field_from_json(mesh, data, lagrangian=True):
    W = np.array(data["omega"], dtype=float)
    if W.ndim != 2 or W.shape[1] != 16:
        raise ValidationError("omega must list 16 numbers per vertex")
    return ZeroSectionFormField(mesh, W.reshape(-1, 4, 4), lagrangian)


def block_matrix(B, C=None, A=None):
    """Assemble 4x4 forms from the fibre block ``B`` and optional diagonal blocks."""
    B = np.asarray(B, dtype=float)
    W = np.zeros(B.shape[:-2] + (4, 4))
    W[..., :2, 2:] = B
    W[..., 2:, :2] = -np.swapaxes(B, -1, -2)
    if A is not None:
        W[..., :2, :2] = A
    if C is not None:
        W[..., 2:, 2:] = C
    return W


def canonical_field(mesh):
    return ZeroSectionFormField(mesh, np.broadcast_to(block_matrix(np.eye(2)), (mesh.n_vertices, 4, 4)).copy())


def omega_blocks(field):
    B = field.omega[:, :2, 2:]
    det = np.linalg.det(B)
    bad = np.nonzero(np.abs(det) < BLOCK_TOL)[0]
    if len(bad):
        raise DegenerateBlock(f"fibre block is singular at vertex {int(bad[0])}")
    return B


def omega_block(field, vertex):
    B = field.omega[vertex, :2, 2:]
    if abs(np.linalg.det(B)) < BLOCK_TOL:
        raise DegenerateBlock(f"fibre block is singular at vertex {vertex}")
    return B.copy()


def relative_automorphism(primed, base):
    """Per-vertex ``B' B^{-1}`` as a matrix field."""
    if primed.mesh is not base.mesh:
        raise MeshMismatch("forms live on different meshes")
    Bp = omega_blocks(primed)
    B = omega_blocks(base)
    return MatrixField(base.mesh, Bp @ np.linalg.inv(B))


def absolute_automorphism(field):
    """The bundle map itself in the vertex frame (base is the frame identity)."""
    return MatrixField(field.mesh, omega_blocks(field).copy())


def realize_from_automorphism(rho):
    det = rho.determinants()
    if np.any(det <= 0):
        raise SingularMatrix("automorphism must have positive determinant everywhere")
    return ZeroSectionFormField(rho.mesh, block_matrix(rho.matrices))


def realize_class(basis, periods):
    """Form whose relative automorphism to the canonical form winds with ``periods``."""
    theta = angle_field_with_class(basis, periods)
    return realize_from_automorphism(MatrixField(basis.mesh, rotation(theta.angles)))


def symplectic_plus_field(mesh):
    """Canonical form plus the area form on TL x TL: the zero section becomes symplectic."""
    W = block_matrix(np.eye(2), A=AREA_FORM)
    return ZeroSectionFormField(mesh, np.broadcast_to(W, (mesh.n_vertices, 4, 4)).copy(), lagrangian=False)


# ------------------------------------------------------------ complex structures

@dataclass(frozen=True, eq=False)
class CompatibleJ:
    matrices: np.ndarray
    metric: np.ndarray


def _as_metric(metric, n):
    G = np.asarray(metric, dtype=float)
    if G.shape == (4, 4):
        G = np.broadcast_to(G, (n, 4, 4))
    if G.shape != (n, 4, 4):
        raise ValidationError("metric must be 4x4 or one 4x4 per vertex")
    return G


def compatible_J(metric, W):
    """The metric-skew-adjoint complex structure compatible with W (stacked 4x4).

    In a metric-orthonormal frame with ``A = -W`` (so that
    ``omega(u, v) = g(A u, v)``) the answer is ``A (A^T A)^{-1/2}``, the
    orthogonal polar factor of ``A``.
    """
    W = np.asarray(W, dtype=float)
    G = _as_metric(metric, len(W))
    if np.max(np.abs(G - np.swapaxes(G, -1, -2))) > 1e-12:
        raise NotSPD("metric is not symmetric")
    try:
        L = np.linalg.cholesky(G)
    except np.linalg.LinAlgError:
        raise NotSPD("metric is not positive definite") from None
    Linv = np.linalg.inv(L)
    Wo = Linv @ W @ np.swapaxes(Linv, -1, -2)
    A = -Wo
    # the polar factor U V^T equals A (A^T A)^{-1/2} and stays orthogonal to
    # rounding even when A is badly conditioned
    U, s, Vt = np.linalg.svd(A)
    if np.any(s[..., -1] <= 1e-14 * np.maximum(1.0, s[..., 0])):
        raise NondegeneracyFailure("form is degenerate")
    Jo = U @ Vt
    Jo = 0.5 * (Jo - np.swapaxes(Jo, -1, -2))
    return np.swapaxes(Linv, -1, -2) @ Jo @ np.swapaxes(L, -1, -2)


def compatible_skad_J(metric, field):
    W = field.omega
    if np.any(pfaffian(W) == 0):
        raise NondegeneracyFailure("form is degenerate at some vertex")
    G = _as_metric(metric, len(W))
    return CompatibleJ(compatible_J(G, W), np.array(G))


def check_compatible(J, metric, W, tol=J_TOL):
    """Residuals of J^2 = -I, skew-adjointness and positivity of omega(., J .)."""
    J = np.asarray(J)
    G = _as_metric(metric, len(J))
    sq = np.max(np.abs(J @ J + np.eye(4)))
    GJ = G @ J
    skew = np.max(np.abs(GJ + np.swapaxes(GJ, -1, -2)))
    WJ = np.asarray(W) @ J
    sym = np.max(np.abs(WJ - np.swapaxes(WJ, -1, -2)))
    min_eig = np.min(np.linalg.eigvalsh(0.5 * (WJ + np.swapaxes(WJ, -1, -2))))
    return {"square": float(sq), "skew": float(skew), "symmetry": float(sym),
            "min_eigenvalue": float(min_eig),
            "ok": bool(sq <= tol and skew <= tol and sym <= tol and min_eig > 0)}
