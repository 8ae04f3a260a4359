import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from conecurve.sphere import (
    QuadratureError,
    arc_linear_integral,
    clip_polygon,
    fan_triangles,
    integrate_triangles,
    merge_close,
    normalize,
    order_ccw,
    polygon_area,
    sphere_area,
    subdivide,
    triangle_rule,
    triangle_solid_angle,
)

OCTANT = np.eye(3)


def test_sphere_area_values():
    assert sphere_area(2) == pytest.approx(2 * math.pi)
    assert sphere_area(3) == pytest.approx(4 * math.pi)
    assert sphere_area(4) == pytest.approx(2 * math.pi**2)


def test_octant_triangle_area():
    assert polygon_area(OCTANT) == pytest.approx(math.pi / 2, abs=1e-15)
    assert triangle_solid_angle(*OCTANT) == pytest.approx(math.pi / 2, abs=1e-15)


def test_order_ccw_is_positive_orientation():
    pts = normalize(np.array([[1.0, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]]))
    ordered = pts[order_ccw(pts)]
    axis = ordered.sum(axis=0)
    for k in range(4):
        assert np.dot(np.cross(ordered[k], ordered[(k + 1) % 4]), axis) > 0


def test_clip_halves_octant():
    verts, labels = clip_polygon(list(OCTANT), [-1, -2, -3], np.array([1.0, -1.0, 0.0]), 7)
    assert polygon_area(np.array(verts)) == pytest.approx(math.pi / 4, abs=1e-14)
    assert 7 in labels


def test_clip_everything_and_nothing():
    verts, _ = clip_polygon(list(OCTANT), [-1, -2, -3], np.array([-1.0, -1, -1]), 0)
    assert verts == [] or len(verts) < 3
    verts, labels = clip_polygon(list(OCTANT), [-1, -2, -3], np.array([1.0, 1, 1]), 0)
    assert len(verts) == 3 and labels == [-1, -2, -3]


def test_merge_close_drops_duplicates():
    V = np.array([[1.0, 0, 0], [1.0, 1e-13, 0], [0, 1.0, 0], [0, 0, 1.0]])
    V = normalize(V)
    out, labels = merge_close(V, [0, 1, 2, 3])
    assert len(out) == 3


def test_arc_integral_matches_quadrature(rng):
    for _ in range(5):
        u = normalize(rng.standard_normal(3))
        P, Q = normalize(rng.standard_normal((2, 3)))
        theta = math.acos(np.clip(P @ Q, -1, 1))
        T = normalize(Q - (P @ Q) * P)
        ref, _ = quad(lambda s: u @ (math.cos(s) * P + math.sin(s) * T), 0, theta, epsabs=1e-14)
        assert arc_linear_integral(u, P, Q) == pytest.approx(ref, abs=1e-12)


def test_fan_triangles_area_is_additive():
    square = normalize(np.array([[1.0, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]]))
    tris = fan_triangles(square)
    total = sum(triangle_solid_angle(*t) for t in tris)
    assert total == pytest.approx(polygon_area(square), abs=1e-14)


def test_rule_area_converges_under_refinement():
    tris = np.array([OCTANT])
    vals, areas = triangle_rule(tris, lambda X: np.ones(X.shape[:-1]))
    assert vals[0] == areas[0]
    err0 = abs(areas[0] - math.pi / 2)
    fine = subdivide(subdivide(tris))
    err2 = abs(triangle_rule(fine, lambda X: np.ones(X.shape[:-1]))[1].sum() - math.pi / 2)
    assert err0 < 1e-3 and err2 < 1e-3 * err0


def test_adaptive_integration_closed_forms():
    tris = np.array([OCTANT])
    one, _ = integrate_triangles(lambda X: np.ones(X.shape[:-1]), tris, tol=1e-12)
    assert one == pytest.approx(math.pi / 2, abs=1e-11)
    # ∫_{octant} v_1 dv = π/4, the projected area of a quarter disc
    lin, _ = integrate_triangles(lambda X: X[..., 0], tris, tol=1e-12)
    assert lin == pytest.approx(math.pi / 4, abs=1e-11)


def test_adaptive_integration_of_log():
    # ∫_{octant} log(v1+v2+v3) dv, converged reference from a much finer tolerance
    f = lambda X: np.log(X.sum(axis=-1))
    tris = np.array([OCTANT])
    coarse, _ = integrate_triangles(f, tris, tol=1e-9)
    fine, _ = integrate_triangles(f, tris, tol=1e-12)
    assert coarse == pytest.approx(fine, abs=1e-9)


def test_subdivide_preserves_area():
    tris = np.array([OCTANT])
    kids = subdivide(tris)
    assert len(kids) == 4
    assert sum(triangle_solid_angle(*t) for t in kids) == pytest.approx(math.pi / 2, abs=1e-14)


def test_depth_cap_raises():
    f = lambda X: 1.0 / np.abs(X[..., 0] - X[..., 1] + 1e-300) ** 0.9
    with pytest.raises(QuadratureError):
        integrate_triangles(f, np.array([OCTANT]), tol=1e-15, max_depth=2)


unit = st.tuples(*[st.floats(-1, 1) for _ in range(3)]).map(np.array).filter(lambda x: np.linalg.norm(x) > 0.2)


@settings(max_examples=60, deadline=None)
@given(unit, unit, unit)
def test_triangle_area_matches_polygon_area(a, b, c):
    a, b, c = normalize(np.array([a, b, c]))
    vol = abs(np.dot(a, np.cross(b, c)))
    if vol < 1e-3:
        return
    tri = np.array([a, b, c])
    ordered = tri[order_ccw(tri)]
    assert polygon_area(ordered) == pytest.approx(triangle_solid_angle(a, b, c), abs=1e-12)
