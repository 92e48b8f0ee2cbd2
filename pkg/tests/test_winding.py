import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from laginv.errors import EdgeAliasing, MeshMismatch, SingularMatrix, TriangleWrap, UnderResolved
from laginv.homology import grid_basis, homology_basis
from laginv.winding import (
    AngleField,
    MatrixField,
    angle_field_with_class,
    harmonic_periods_cocycle,
    lattice_angle_field,
    lift_edge_increments,
    matrix_winding_class,
    minimax_periods_cocycle,
    polar_angles,
    polar_newton,
    reframe,
    rotation,
    rotation_angle_field,
    winding_class,
)

from conftest import cached_genus2, cached_torus


def test_lattice_field_increments():
    m = cached_torus(8)
    z = lift_edge_increments(lattice_angle_field(m, 1, 0))
    assert np.allclose(np.abs(z.values[z.values != 0]), 2 * np.pi / 8)
    assert np.allclose(z.triangle_sums(), 0.0, atol=1e-12)


@pytest.mark.parametrize("a,b", [(0, 0), (1, 0), (0, 1), (2, 3), (-1, 2)])
def test_lattice_field_class(a, b):
    m = cached_torus(8)
    assert winding_class(lattice_angle_field(m, a, b), grid_basis(m)).pairings == (a, b)


def test_edge_aliasing_tie():
    m = cached_torus(4)
    with pytest.raises(EdgeAliasing):
        lift_edge_increments(lattice_angle_field(m, 2, 0))


def test_triangle_wrap():
    m = cached_torus(3)
    theta = np.zeros(m.n_vertices)
    a, b, c = m.triangles[0]
    theta[[a, b, c]] = [0.0, 2.2, 4.4]
    with pytest.raises(TriangleWrap):
        lift_edge_increments(AngleField(m, theta))


def test_sphere_field_has_empty_class(sphere):
    theta = np.random.default_rng(1).uniform(0, 0.5, sphere.n_vertices)
    assert winding_class(AngleField(sphere, theta), homology_basis(sphere)).pairings == ()


def test_mesh_mismatch():
    with pytest.raises(MeshMismatch):
        winding_class(lattice_angle_field(cached_torus(8), 1, 0), grid_basis(cached_torus(4)))


def svd_rotation_angle(A):
    U, _, Vt = np.linalg.svd(A)
    R = U @ Vt
    return np.arctan2(R[1, 0], R[0, 0])


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-3, 3, allow_nan=False), min_size=4, max_size=4))
def test_polar_angle_matches_svd_oracle(entries):
    A = np.array(entries).reshape(2, 2)
    det = np.linalg.det(A)
    if det <= 1e-3 or np.linalg.cond(A) > 1e6:
        return
    alpha = polar_angles(A[None])[0]
    beta = svd_rotation_angle(A)
    assert abs(np.angle(np.exp(1j * (alpha - beta)))) < 1e-9
    X = polar_newton(A)
    assert np.allclose(X, rotation(alpha), atol=1e-9)


def test_singular_matrix_rejected():
    m = cached_torus(3)
    M = np.broadcast_to(np.eye(2), (m.n_vertices, 2, 2)).copy()
    M[0] = [[1, 0], [0, -1]]
    with pytest.raises(SingularMatrix):
        rotation_angle_field(MatrixField(m, M))


def test_rotation_field_with_shear_keeps_class():
    m = cached_torus(16)
    theta = lattice_angle_field(m, 1, 2).angles
    S = np.array([[1.3, 0.4], [0.4, 0.8]])
    field = MatrixField(m, rotation(theta) @ S)
    assert matrix_winding_class(field, grid_basis(m)).pairings == (1, 2)
    assert rotation_angle_field(field, cross_check=True).angles.shape == (m.n_vertices,)


def test_constant_reframe_preserves_class():
    m = cached_torus(16)
    field = MatrixField(m, rotation(lattice_angle_field(m, 2, -1).angles))
    out = reframe(field, np.full(m.n_vertices, 0.7))
    assert matrix_winding_class(out, grid_basis(m)).pairings == (2, -1)


@pytest.mark.parametrize("w", [(5, 0), (3, 6), (-2, 4), (2, 4)])
def test_realized_angle_field_class(w):
    m = cached_torus(16)
    b = grid_basis(m)
    assert winding_class(angle_field_with_class(b, w), b).pairings == w


def test_under_resolved():
    m = cached_torus(4)
    with pytest.raises((UnderResolved, EdgeAliasing)):
        angle_field_with_class(grid_basis(m), (3, 0))


@settings(max_examples=5, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=4, max_size=4))
def test_realized_genus2_class(w):
    m = cached_genus2(12)
    b = homology_basis(m)
    assert winding_class(angle_field_with_class(b, w), b).pairings == tuple(w)


@pytest.mark.parametrize("a", [1, 3, 5])
def test_minimax_matches_loop_bound(a):
    # an 8-edge loop carrying a turns forces a/8 somewhere; the lattice field attains it
    m = cached_torus(8)
    alpha = minimax_periods_cocycle(grid_basis(m), (a, 0))
    assert np.max(np.abs(alpha.values)) == pytest.approx(a / 8, abs=1e-9)


@settings(max_examples=10, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_minimax_never_worse_than_harmonic(w):
    b = homology_basis(cached_genus2(8))
    mini = minimax_periods_cocycle(b, w)
    harm = harmonic_periods_cocycle(b, w)
    assert np.max(np.abs(mini.values)) <= np.max(np.abs(harm.values)) + 1e-9
    assert np.allclose(b.cycles @ mini.values, w, atol=1e-8)


def test_genus2_coarse_mesh_aliases():
    # the best representative needs exactly half a turn on one edge
    with pytest.raises(EdgeAliasing):
        angle_field_with_class(homology_basis(cached_genus2(8)), (2, 2, 0, 0))
