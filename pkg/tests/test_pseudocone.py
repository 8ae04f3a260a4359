import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull

from conecurve.cone import orthant, sample_cap
from conecurve.fixtures import random_hull, symmetric_pair
from conecurve.pseudocone import (
    HullPseudoCone,
    PseudoConeError,
    WulffPseudoCone,
    contains_point,
    copolar,
    distance_origin,
    radial,
    radial_wulff,
    snap_to_radial,
    support_bar,
    support_bar_many,
    support_bar_wulff,
)
from conecurve.sphere import normalize

R3 = math.sqrt(3.0)


def qhull_membership(K, far=200.0):
    """Membership in K via the facets of a large truncation, independent of the LPs."""
    P = K.points
    pts = np.vstack([P] + [P + far * w for w in K.cone.generators])
    eq = ConvexHull(pts).equations
    return lambda x: bool(np.all(eq[:, :3] @ x + eq[:, 3] <= 1e-10))


def ray_march_radial(K, u, iters=200):
    inside = qhull_membership(K)
    lo, hi = 0.0, 1.0
    while not inside(hi * u):
        hi *= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        lo, hi = (lo, mid) if inside(mid * u) else (mid, hi)
    return hi


# --- support and radial ------------------------------------------------------

def test_k1_support(k1):
    assert support_bar(k1, -normalize(np.ones(3))) == pytest.approx(R3, abs=1e-15)
    assert support_bar(k1, [-1.0, 0, 0]) == pytest.approx(1.0, abs=1e-15)


def test_support_rejects_outside_dual(k1):
    with pytest.raises(PseudoConeError):
        support_bar(k1, [1.0, 0, 0])


def test_support_homogeneity(five, rng):
    V = sample_cap(five.cone.dual, 100, 1)
    assert np.allclose(support_bar_many(five.scaled(2.5), V), 2.5 * support_bar_many(five, V), rtol=1e-12)


def test_k1_radial(k1):
    assert radial(k1, normalize(np.ones(3))) == pytest.approx(R3, abs=1e-12)
    assert radial(k1, np.array([1.0, 2, 2]) / 3) == pytest.approx(3.0, abs=1e-12)


def test_pair_radial_against_ray_marching():
    K = symmetric_pair()
    assert radial(K, K.directions[0]) == pytest.approx(1.0, abs=1e-12)
    mid = normalize(K.directions.sum(axis=0))
    assert radial(K, mid) == pytest.approx(ray_march_radial(K, mid), abs=1e-9)


def test_radial_against_ray_marching_on_random_hulls():
    for seed in range(5):
        K = random_hull(seed)
        for u in sample_cap(K.cone, 3, seed):
            assert radial(K, u) == pytest.approx(ray_march_radial(K, u), rel=1e-9)


def test_radial_homogeneity(five):
    u = normalize(np.array([1.0, 2.0, 3.0]))
    assert radial(five.scaled(3.0), u) == pytest.approx(3.0 * radial(five, u), rel=1e-12)


def test_radial_rejects_boundary_direction(k1):
    with pytest.raises(PseudoConeError):
        radial(k1, [1.0, 0, 0])


def test_validation():
    C = orthant(3)
    with pytest.raises(PseudoConeError):
        HullPseudoCone(C, [[1.0, 0, 0]], [1.0])
    with pytest.raises(PseudoConeError):
        HullPseudoCone(C, [[1.0, 1, 1]], [-1.0])
    with pytest.raises(PseudoConeError):
        HullPseudoCone(C, [[1.0, 1, 1], [1.0, 1, 1 + 1e-12]], [1.0, 2.0])
    with pytest.raises(PseudoConeError):
        WulffPseudoCone(C, [[1.0, 1, 1]], [1.0])
    WulffPseudoCone(C.dual, [[1.0, 1, 1]], [1.0])


def test_pseudo_cone_law(five, rng):
    for _ in range(20):
        lam = rng.dirichlet(np.ones(five.size))
        x = lam @ five.points + rng.uniform(0, 1, 3) @ five.cone.generators
        assert contains_point(five, x)
        assert contains_point(five, rng.uniform(1.0, 5.0) * x)
    assert not contains_point(five, 0.5 * five.points[0] / five.radials[0] * 0.01)


def test_redundant_point_does_not_change_support(rng):
    C = orthant(3)
    U = normalize(np.array([[2.0, 1, 1], [1, 2, 1], [1.5, 1.5, 1]]))
    K = HullPseudoCone(C, U, [1.0, 1.0, 50.0])
    K2 = HullPseudoCone(C, U[:2], [1.0, 1.0])
    V = sample_cap(C.dual, 100, 2)
    assert np.allclose(support_bar_many(K, V), support_bar_many(K2, V), rtol=0, atol=1e-15)


def test_support_monotone_in_radials(five, rng):
    V = sample_cap(five.cone.dual, 100, 3)
    g = five.radials.copy()
    g[2] *= 1.3
    assert np.all(support_bar_many(five.with_radials(g), V) >= support_bar_many(five, V))


# --- copolarity --------------------------------------------------------------

def test_k1_copolar(k1):
    Ks = copolar(k1)
    assert isinstance(Ks, WulffPseudoCone)
    assert Ks.cone.same_as(orthant(3).dual)
    assert Ks.offsets[0] == pytest.approx(1 / R3)
    v = -normalize(np.ones(3))
    assert radial_wulff(Ks, v) * support_bar(k1, v) == pytest.approx(1.0, abs=1e-15)


def test_wulff_examples():
    C = orthant(3)
    K = WulffPseudoCone(C, [-normalize(np.ones(3))], [1.0])
    # the plane <x, (1,1,1)> = √3 meets the diagonal ray at r = 1
    assert radial_wulff(K, normalize(np.ones(3))) == pytest.approx(1.0, abs=1e-14)
    assert radial_wulff(K, np.array([1.0, 0, 0])) == pytest.approx(R3, abs=1e-14)


def test_duality_relation_on_random_directions(five):
    Ks = copolar(five)
    for u in sample_cap(five.cone, 100, 0):
        assert radial(five, u) * support_bar_wulff(Ks, u) == pytest.approx(1.0, abs=1e-9)
    for v in sample_cap(five.cone.dual, 100, 1):
        assert radial_wulff(Ks, v) * support_bar(five, v) == pytest.approx(1.0, abs=1e-9)


def test_copolar_involution(five):
    K2 = copolar(copolar(five))
    assert isinstance(K2, HullPseudoCone)
    V = sample_cap(five.cone.dual, 100, 4)
    assert np.allclose(support_bar_many(K2, V), support_bar_many(five, V), atol=1e-9, rtol=0)


# --- distance and snapping ---------------------------------------------------

def test_distance_examples(k1):
    assert distance_origin(k1) == pytest.approx(R3, abs=1e-12)
    assert distance_origin(k1.scaled(2.0)) == pytest.approx(2 * R3, abs=1e-12)


def test_distance_sandwich_on_random_hulls():
    for seed in range(20):
        K = random_hull(seed)
        b = distance_origin(K)
        V = sample_cap(K.cone.dual, 200, seed)
        assert np.max(support_bar_many(K, V)) <= b + 1e-9
        assert b <= min(radial(K, u) for u in K.directions) + 1e-9


def test_distance_nearest_point_is_on_a_face():
    # nearest point of the pair fixture lies on the segment between its vertices
    K = symmetric_pair()
    P = K.points
    t = np.linspace(0, 1, 20001)
    seg = np.outer(1 - t, P[0]) + np.outer(t, P[1])
    assert distance_origin(K) == pytest.approx(np.min(np.linalg.norm(seg, axis=1)), abs=1e-9)


def test_snap_reduces_redundant_point():
    C = orthant(3)
    U = normalize(np.array([[2.0, 1, 1], [1, 2, 1], [1.5, 1.5, 1]]))
    K = HullPseudoCone(C, U, [1.0, 1.0, 50.0])
    S = snap_to_radial(K)
    assert S.radials[2] < 50.0
    assert S.radials[2] == pytest.approx(radial(K, U[2]), rel=1e-12)
    V = sample_cap(C.dual, 100, 5)
    assert np.allclose(support_bar_many(S, V), support_bar_many(K, V), atol=1e-12)
    assert snap_to_radial(S) is S or np.array_equal(snap_to_radial(S).radials, S.radials)


def test_snap_leaves_k1_unchanged(k1):
    assert np.array_equal(snap_to_radial(k1).radials, k1.radials)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 10**6), st.floats(0.2, 5.0))
def test_homogeneity_property(seed, s):
    K = random_hull(seed)
    V = sample_cap(K.cone.dual, 20, seed)
    assert np.allclose(support_bar_many(K.scaled(s), V), s * support_bar_many(K, V), rtol=1e-12)
    u = K.directions[0]
    assert radial(K.scaled(s), u) == pytest.approx(s * radial(K, u), rel=1e-10)
