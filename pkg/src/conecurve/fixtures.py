"""Named test geometries shared by `verify`, the tests and the demos."""

from __future__ import annotations

import numpy as np

from .cone import PointedCone, contains_many, orthant
from .curvature import snap_exact
from .pseudocone import HullPseudoCone
from .sphere import normalize

SQUARE_CONE = np.array([[1.0, 0, 1], [0, 1, 1], [-1, 0, 1], [0, -1, 1]])


def square_cone() -> PointedCone:
    return PointedCone(SQUARE_CONE)


def single_vertex() -> HullPseudoCone:
    """K₁ = (1,1,1) + octant."""
    return HullPseudoCone(orthant(3), [normalize(np.ones(3))], [np.sqrt(3.0)])


def symmetric_pair() -> HullPseudoCone:
    """Two vertices exchanged by the swap x ↔ y."""
    U = normalize(np.array([[2.0, 1, 1], [1, 2, 1]]))
    return HullPseudoCone(orthant(3), U, [1.0, 1.0])


def interior_directions(C: PointedCone, m: int, rng, spread: float = 1.0) -> np.ndarray:
    """m random unit directions with a margin inside C: positive mixtures of generators."""
    W = C.generators
    out = []
    while len(out) < m:
        lam = rng.uniform(0.05, 1.0, size=len(W)) ** spread
        u = normalize(lam @ W)
        if contains_many(C, u[None], strict=True)[0] and all(np.linalg.norm(u - x) > 1e-3 for x in out):
            out.append(u)
    return np.array(out)


def all_vertex_hull(C: PointedCone, U) -> HullPseudoCone:
    """Radials g_i = 1/Π_k <a_k, u_i>^(1/#facets), which puts every point on a vertex
    for the octant; snapped in any case."""
    U = np.atleast_2d(U)
    g = np.prod(U @ C.facet_normals.T, axis=1) ** (-1.0 / len(C.facet_normals))
    K, _ = snap_exact(HullPseudoCone(C, U, g))
    return K


def five_vertex() -> HullPseudoCone:
    rng = np.random.default_rng(5)
    C = orthant(3)
    return all_vertex_hull(C, interior_directions(C, 5, rng))


def random_cone(rng, k: int = None) -> PointedCone:
    """A random pointed cone with k generators around a random axis."""
    k = k or int(rng.integers(3, 7))
    axis = normalize(rng.standard_normal(3))
    e1 = normalize(np.cross(axis, [1.0, 0, 0] if abs(axis[0]) < 0.9 else [0, 1.0, 0]))
    e2 = np.cross(axis, e1)
    # keep consecutive angle gaps below π so the axis stays inside
    ang = np.linspace(0, 2 * np.pi, k, endpoint=False) + rng.uniform(-0.3, 0.3, k) * (2 * np.pi / k)
    tilt = rng.uniform(0.5, 1.2, k)
    W = axis + tilt[:, None] * (np.cos(ang)[:, None] * e1 + np.sin(ang)[:, None] * e2)
    return PointedCone(W)


def random_hull(seed: int, m: int = None) -> HullPseudoCone:
    """Random snapped hull over a random cone; some points may sit off the vertices."""
    rng = np.random.default_rng(seed)
    C = random_cone(rng)
    m = m or int(rng.integers(2, 12))
    U = interior_directions(C, m, rng)
    g = np.prod(U @ C.facet_normals.T, axis=1) ** (-1.0 / len(C.facet_normals))
    K, _ = snap_exact(HullPseudoCone(C, U, g * rng.uniform(0.9, 1.1, m)))
    return K


def named(name: str) -> HullPseudoCone:
    if name == "k1":
        return single_vertex()
    if name == "pair":
        return symmetric_pair()
    if name == "five":
        return five_vertex()
    if name == "square":
        C = square_cone()
        a = 0.4
        U = normalize(np.array([[a, 0, 1], [0, a, 1], [-a, 0, 1], [0, -a, 1]]))
        return HullPseudoCone(C, U, np.ones(4))
    if name.startswith("random-"):
        return random_hull(int(name.split("-", 1)[1]))
    raise KeyError(f"unknown fixture {name!r}")


DEFAULT_FIXTURES = ("k1", "pair", "five", "square") + tuple(f"random-{i}" for i in range(10))
