import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from laginv.errors import MeshMismatch, NotIntegral, ValidationError
from laginv.homology import (
    CohomologyClass,
    Cycle,
    IntegerCocycle,
    basis_from_cycles,
    class_from_cocycle,
    coboundary,
    cocycle_with_periods,
    default_basis,
    grid_basis,
    homology_basis,
    intersection_form,
    multiplicity,
    pair,
    pair_integer,
    round_integral,
)
from laginv.intlin import exact_det

from conftest import cached_genus2, cached_torus


def test_sphere_basis_empty(sphere):
    b = homology_basis(sphere)
    assert len(b) == 0
    assert intersection_form(b).shape == (0, 0)


@pytest.mark.parametrize("n", [3, 5, 8])
def test_torus_tree_cotree(n):
    b = homology_basis(cached_torus(n))
    assert len(b) == 2
    M = intersection_form(b)
    assert abs(M[0, 1]) == 1 and M[0, 1] == -M[1, 0] and M[0, 0] == 0


@pytest.mark.parametrize("n", [3, 4, 6])
def test_genus2_unimodular(n):
    b = homology_basis(cached_genus2(n))
    assert len(b) == 4
    M = intersection_form(b)
    assert np.array_equal(M, -M.T)
    assert abs(exact_det(M.tolist())) == 1


def test_basis_cycles_closed_and_dual(genus2):
    b = homology_basis(genus2)
    for c in b.cycles:
        assert not np.any(Cycle(genus2, c).boundary())
    assert np.array_equal(b.duals @ b.cycles.T, np.eye(4, dtype=np.int64))
    ids, signs = genus2.triangle_edges()
    for d in b.duals:
        assert not np.any((d[ids] * signs).sum(axis=1))


def test_grid_basis_orientation(torus8):
    b = grid_basis(torus8)
    assert intersection_form(b).tolist() == [[0, 1], [-1, 0]]
    assert default_basis(torus8).name == "grid"


def test_meridian_cocycle_pairs_to_one():
    # unit increment per meridian step, resolution independent
    for n in (4, 8, 12):
        m = cached_torus(n)
        f = np.zeros(m.n_edges)
        for k, (u, v) in enumerate(m.edges):
            di = (m.lattice[v, 0] - m.lattice[u, 0]) % n
            f[k] = 1.0 / n if di == 1 else (-1.0 / n if di == n - 1 else 0.0)
        cls = class_from_cocycle(IntegerCocycle(m, f * n), grid_basis(m), scale=n)
        assert cls.pairings == (1, 0)


def test_exact_cocycle_pairs_to_zero(genus2):
    f = np.arange(genus2.n_vertices) ** 2
    d = coboundary(genus2, f)
    b = homology_basis(genus2)
    assert all(pair_integer(d, b.cycle(k)) == 0 for k in range(4))


def test_pair_mesh_mismatch(torus8, genus2):
    with pytest.raises(MeshMismatch):
        pair(IntegerCocycle(torus8, np.zeros(torus8.n_edges)), homology_basis(genus2).cycle(0))


def test_round_integral():
    assert round_integral(3.0 + 1e-9) == 3
    with pytest.raises(NotIntegral):
        round_integral(2.5)


@given(st.lists(st.integers(-30, 30), min_size=1, max_size=6))
def test_multiplicity_is_gcd(v):
    import math
    g = 0
    for x in v:
        g = math.gcd(g, x)
    assert multiplicity(CohomologyClass(tuple(v))) == g


def random_unimodular(rng, n, steps=12):
    P = np.eye(n, dtype=np.int64)
    for _ in range(steps):
        i, j = rng.choice(n, 2, replace=False)
        P[i] += int(rng.integers(-2, 3)) * P[j]
        if rng.random() < 0.3:
            P[[i, j]] = P[[j, i]]
    return P


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_basis_change_preserves_multiplicity(seed):
    rng = np.random.default_rng(seed)
    m = cached_genus2(4)
    ref = homology_basis(m)
    P = random_unimodular(rng, 4)
    new = basis_from_cycles(m, P @ ref.cycles)
    v = rng.integers(-6, 7, size=4)
    z = cocycle_with_periods(ref, v)
    old_cls = class_from_cocycle(z, ref)
    new_cls = class_from_cocycle(z, new)
    assert new_cls.pairings == tuple(int(x) for x in P @ v)
    assert multiplicity(new_cls) == multiplicity(old_cls)


def test_basis_from_cycles_rejects_non_basis(torus8):
    ref = grid_basis(torus8)
    with pytest.raises(ValidationError):
        basis_from_cycles(torus8, np.array([2 * ref.cycles[0], ref.cycles[1]]))
