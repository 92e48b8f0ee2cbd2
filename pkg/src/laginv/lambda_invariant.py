"""The lambda invariant: multiplicity of the winding class of B' B^{-1}."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import MeshMismatch, WrongGenus
from .forms import absolute_automorphism, relative_automorphism
from .homology import default_basis, multiplicity
from .io import digest_arrays, mesh_digest
from .mesh import genus
from .winding import matrix_winding_class


@dataclass(frozen=True)
class LambdaReport:
    class_vector: tuple
    lam: int
    basis: str
    frame: str
    inputs: dict = field(default_factory=dict)
    mode: str = "relative"

    def as_dict(self):
        return {
            "class": [int(v) for v in self.class_vector],
            "lambda": int(self.lam),
            "basis": self.basis,
            "frame": self.frame,
            "inputs": dict(self.inputs),
            "mode": self.mode,
        }


def _frame_id(mesh):
    return digest_arrays(mesh.frames)[:16]


def lambda_invariant(mesh, primed, base, basis=None, mode="relative", tolerances=None):
    """lambda(L, primed, base) with both forms validated first.

    ``tolerances`` is an optional ``(tol_antisym, tol_lagrangian)`` pair.
    """
    if primed.mesh is not mesh or base.mesh is not mesh:
        raise MeshMismatch("forms must live on the given mesh")
    tol = tolerances or ()
    primed.validate(*tol)
    base.validate(*tol)
    inputs = {"mesh": mesh_digest(mesh), "primed": digest_arrays(primed.omega),
              "base": digest_arrays(base.omega)}
    if genus(mesh) == 0:
        return LambdaReport((), 0, "empty", _frame_id(mesh), inputs, mode)
    basis = basis or default_basis(mesh)
    cls = matrix_winding_class(relative_automorphism(primed, base), basis)
    return LambdaReport(cls.pairings, multiplicity(cls), basis.name, _frame_id(mesh), inputs, mode)


def lambda_pair(mesh, omega1, omega, basis=None):
    """lambda(L, L0, phi) = lambda(L, omega1, omega) with omega1 the pulled-back ambient form."""
    return lambda_invariant(mesh, omega1, omega, basis, mode="diffeomorphism-pair")


def lambda_absolute_torus(mesh, field, basis=None):
    """Absolute invariant of a torus: winding of the bundle map itself in the fixed frame."""
    if genus(mesh) != 1:
        raise WrongGenus(f"absolute invariant needs a torus, got genus {genus(mesh)}")
    if field.mesh is not mesh:
        raise MeshMismatch("form must live on the given mesh")
    field.validate()
    basis = basis or default_basis(mesh)
    cls = matrix_winding_class(absolute_automorphism(field), basis)
    inputs = {"mesh": mesh_digest(mesh), "form": digest_arrays(field.omega)}
    return LambdaReport(cls.pairings, multiplicity(cls), basis.name, _frame_id(mesh), inputs, "absolute")
