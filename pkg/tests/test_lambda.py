import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from laginv.errors import MeshMismatch, WrongGenus
from laginv.forms import (
    ZeroSectionFormField,
    block_matrix,
    canonical_field,
    realize_class,
    realize_from_automorphism,
)
from laginv.homology import basis_from_cycles, grid_basis, homology_basis
from laginv.lambda_invariant import lambda_absolute_torus, lambda_invariant, lambda_pair
from laginv.winding import MatrixField, lattice_angle_field, rotation

from conftest import cached_genus2, cached_sphere, cached_torus


def random_form(mesh, basis, rng, max_w=2, shear=0.3):
    """Valid Lagrangian form: realized class times a smooth SPD shear plus a random C block."""
    w = tuple(int(x) for x in rng.integers(-max_w, max_w + 1, size=len(basis)))
    base = realize_class(basis, w).omega[:, :2, 2:] if len(basis) else np.broadcast_to(np.eye(2), (mesh.n_vertices, 2, 2))
    a = rng.uniform(-shear, shear, size=3)
    S = np.array([[1 + a[0], a[1]], [a[1], 1 + a[2]]])
    c = rng.normal()
    C = np.array([[0.0, c], [-c, 0.0]])
    return ZeroSectionFormField(mesh, block_matrix(base @ S, C=np.broadcast_to(C, (mesh.n_vertices, 2, 2)))), w


@pytest.mark.parametrize("w", [(0, 0), (1, 0), (0, 1), (1, 1), (2, 4), (3, 0), (-2, 4), (3, 6), (5, 0)])
def test_realization_oracle_torus16(w):
    m = cached_torus(16)
    b = grid_basis(m)
    rep = lambda_invariant(m, realize_class(b, w), canonical_field(m), b)
    assert rep.class_vector == w
    assert rep.lam == math.gcd(*w)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_symmetry(seed):
    rng = np.random.default_rng(seed)
    m = cached_torus(16)
    b = grid_basis(m)
    f1, _ = random_form(m, b, rng)
    f2, _ = random_form(m, b, rng)
    assert lambda_invariant(m, f1, f2, b).lam == lambda_invariant(m, f2, f1, b).lam


def test_relative_class_is_difference():
    rng = np.random.default_rng(11)
    m = cached_torus(16)
    b = grid_basis(m)
    f1, w1 = random_form(m, b, rng)
    f2, w2 = random_form(m, b, rng)
    rep = lambda_invariant(m, f1, f2, b)
    assert rep.class_vector == tuple(x - y for x, y in zip(w1, w2))


def test_sphere_always_zero():
    m = cached_sphere(4)
    rng = np.random.default_rng(2)
    b = homology_basis(m)
    f1, _ = random_form(m, b, rng)
    f2, _ = random_form(m, b, rng)
    rep = lambda_invariant(m, f1, f2)
    assert rep.lam == 0 and rep.class_vector == ()


def test_refinement_stability():
    # the same rho sampled at two resolutions
    out = []
    for n in (8, 16):
        m = cached_torus(n)
        rho = MatrixField(m, rotation(lattice_angle_field(m, 2, 2).angles))
        out.append(lambda_invariant(m, realize_from_automorphism(rho), canonical_field(m)).lam)
    assert out == [2, 2]


def test_basis_independence():
    m = cached_torus(16)
    b = grid_basis(m)
    P = np.array([[2, 1], [1, 1]])
    b2 = basis_from_cycles(m, P @ b.cycles)
    f = realize_class(b, (2, 4))
    assert lambda_invariant(m, f, canonical_field(m), b2).lam == 2
    assert lambda_invariant(m, f, canonical_field(m), b2).class_vector == (8, 6)


def test_genus2_realization():
    m = cached_genus2(8)
    b = homology_basis(m)
    for w in [(1, 0, 0, 0), (2, -2, 0, 2), (0, 0, 2, 0)]:
        assert lambda_invariant(m, realize_class(b, w), canonical_field(m), b).lam == math.gcd(*w)


def test_absolute_torus_invariant():
    m = cached_torus(8)
    assert lambda_absolute_torus(m, canonical_field(m)).lam == 0
    f = realize_class(grid_basis(m), (1, 2))
    assert lambda_absolute_torus(m, f).lam == 1
    with pytest.raises(WrongGenus):
        lambda_absolute_torus(cached_sphere(4), canonical_field(cached_sphere(4)))


def test_pair_mode_and_report():
    m = cached_torus(8)
    rep = lambda_pair(m, realize_class(grid_basis(m), (0, 3)), canonical_field(m))
    d = rep.as_dict()
    assert d["lambda"] == 3 and d["mode"] == "diffeomorphism-pair" and d["class"] == [0, 3]


def test_mesh_mismatch():
    with pytest.raises(MeshMismatch):
        lambda_invariant(cached_torus(8), canonical_field(cached_torus(4)), canonical_field(cached_torus(8)))
