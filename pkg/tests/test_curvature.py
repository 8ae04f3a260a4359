import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conecurve.cone import cap_area, orthant, sample_cap
from conecurve.curvature import (
    NotSnappedError,
    area_jacobian,
    cell_area,
    cell_areas,
    classify_many,
    classify_normal,
    concentration_check,
    curvature_measure,
    gauss_cell,
    gauss_cells,
    mc_masses,
    pullback_integral_mc,
    radial_from_cells,
    snap_exact,
)
from conecurve.fixtures import all_vertex_hull, interior_directions, random_hull
from conecurve.functional import orlicz_from_spec
from conecurve.pseudocone import HullPseudoCone, radial
from conecurve.sphere import normalize

PHI_T = orlicz_from_spec("power:1")


def test_k1_cell_is_whole_cap(k1):
    c = gauss_cell(k1, 0)
    assert cell_area(c) == pytest.approx(math.pi / 2, abs=1e-15)
    assert concentration_check(k1) == (True, 0.0)


def test_pair_cells_are_halves(pair):
    areas = cell_areas(gauss_cells(pair))
    assert np.allclose(areas, math.pi / 4, atol=1e-14)


def test_snapped_redundant_point_has_empty_cell():
    C = orthant(3)
    U = normalize(np.array([[2.0, 1, 1], [1, 2, 1], [1.5, 1.5, 1]]))
    K, cells = snap_exact(HullPseudoCone(C, U, [1.0, 1.0, 50.0]))
    assert cells[2].empty
    assert cell_area(cells[2]) == 0.0
    assert K.radials[2] == pytest.approx(radial(K, U[2]), rel=1e-12)


def test_unsnapped_input_rejected():
    C = orthant(3)
    U = normalize(np.array([[2.0, 1, 1], [1, 2, 1], [1.5, 1.5, 1]]))
    with pytest.raises(NotSnappedError):
        gauss_cells(HullPseudoCone(C, U, [1.0, 1.0, 50.0]))


def test_partition_on_random_instances():
    rng = np.random.default_rng(1)
    C = orthant(3)
    K = all_vertex_hull(C, interior_directions(C, 3, rng))
    assert cell_areas(gauss_cells(K)).sum() == pytest.approx(math.pi / 2, abs=1e-10)
    K20 = random_hull(99, m=20)
    ok, gap = concentration_check(K20)
    assert ok and gap < 1e-9


def test_curvature_measure_examples(k1):
    assert curvature_measure(k1).masses[0] == pytest.approx(math.pi / 2, abs=1e-12)
    m = curvature_measure(k1, PHI_T)
    assert m.masses[0] == pytest.approx(math.sqrt(3) * math.pi / 2, abs=1e-12)
    assert m.method == "exact" and m.orlicz == "power:1"


def test_absolute_continuity_is_exact(five):
    for spec in ("power:1", "power:2", "logshift"):
        phi = orlicz_from_spec(spec)
        assert np.array_equal(curvature_measure(five, phi).masses, phi.values(five.radials) * curvature_measure(five).masses)


def test_total_bound(five):
    phi = orlicz_from_spec("power:2")
    m = curvature_measure(five, phi)
    assert m.total <= phi.values(five.radials).max() * cap_area(five.cone.dual) + 1e-12


def test_cells_scale_invariant(five):
    a = cell_areas(gauss_cells(five))
    b = cell_areas(gauss_cells(five.scaled(3.7)))
    assert np.allclose(a, b, atol=1e-12, rtol=0)


def test_classify_examples(k1, pair):
    V = sample_cap(k1.cone.dual, 50, 0)
    assert all(classify_normal(k1, v) == 0 for v in V)
    assert classify_normal(pair, normalize(np.array([-1.0, -2, -1]))) == 0
    assert classify_normal(pair, normalize(np.array([-2.0, -1, -1]))) == 1


def test_classify_agrees_with_cells(five):
    cells = gauss_cells(five)
    V = sample_cap(five.cone.dual, 10**5, 11)
    idx = classify_many(five, V)
    owner = np.full(len(V), -1)
    for c in cells:
        if c.empty:
            continue
        n = len(c.vertices)
        inside = np.ones(len(V), dtype=bool)
        for k in range(n):
            inside &= V @ np.cross(c.vertices[k], c.vertices[(k + 1) % n]) >= -1e-12
        owner[inside & (owner < 0)] = c.owner_index
    assert np.mean(owner != idx) < 1e-3


def test_pullback_mc_examples(k1):
    est, se = pullback_integral_mc(k1, None, np.ones(1), 10**5, 0)
    assert abs(est - math.pi / 2) < 3 * se
    est, se = pullback_integral_mc(k1, PHI_T, lambda U: np.ones(len(U)), 10**5, 1)
    assert abs(est - math.sqrt(3) * math.pi / 2) < 3 * se


def test_pullback_mc_five_vertex(five):
    f = np.arange(five.size, dtype=float) + 1.0
    exact = float(f @ curvature_measure(five).masses)
    est, se = pullback_integral_mc(five, None, f, 10**6, 2)
    assert abs(est - exact) < 4 * se


def test_mc_masses_within_four_sigma(five):
    exact = curvature_measure(five, PHI_T).masses
    mc, se = mc_masses(five, PHI_T, 10**6, 3)
    assert np.all(np.abs(mc - exact) < 4 * se)


def test_radial_from_cells_matches_lp(five):
    cells = gauss_cells(five)
    U = sample_cap(five.cone, 30, 4)
    exact = radial_from_cells(five, U, cells)
    lp = np.array([radial(five, u) for u in U])
    assert np.allclose(exact, lp, rtol=1e-11)


def test_area_jacobian_matches_finite_differences(five):
    J = area_jacobian(five, gauss_cells(five))
    assert np.allclose(J.sum(axis=1), 0.0, atol=1e-14)
    assert np.allclose(J, J.T, atol=1e-12)
    h = 1e-6
    for j in range(five.size):
        s = np.log(five.radials)
        sp, sm = s.copy(), s.copy()
        sp[j] += h
        sm[j] -= h
        ap = cell_areas(gauss_cells(five.with_radials(np.exp(sp))))
        am = cell_areas(gauss_cells(five.with_radials(np.exp(sm)), check=False))
        fd = (ap - am) / (2 * h)
        assert np.allclose(fd, J[:, j], atol=1e-7)


def test_n4_falls_back_to_monte_carlo():
    C = orthant(4)
    u = np.ones(4) / 2.0
    K = HullPseudoCone(C, [u], [2.0])
    m = curvature_measure(K, samples=10**5, seed=0)
    assert m.method == "monte-carlo"
    assert abs(m.masses[0] - 2 * math.pi**2 / 16) < 4 * m.std_errors[0]


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10**6))
def test_partition_property(seed):
    K = random_hull(seed)
    ok, gap = concentration_check(K)
    assert ok, gap
