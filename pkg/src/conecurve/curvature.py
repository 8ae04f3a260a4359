"""Radial Gauss images of polyhedral pseudo-cones and their (Orlicz) curvature.

For K = ⟨g⟩ the normal v ∈ Ω_{C°} belongs to the cell of direction i when
``g_i <u_i, v> >= g_j <u_j, v>`` for all j, so the cells form a spherical power
diagram of the cap Ω_{C°}. For n = 3 they are convex spherical polygons and
their areas are exact; in higher dimension masses are Monte Carlo estimates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .cone import PointedCone, cap_area, sample_cap
from .pseudocone import HullPseudoCone
from .sphere import arc_linear_integral, clip_polygon, polygon_area, sphere_area

SNAP_RTOL = 1e-10


class NotSnappedError(ValueError):
    """The hull data contains a point strictly outside ∂K (g_i > ρ_K(u_i))."""


@dataclass
class SphericalCell:
    """Closure of the radial Gauss image of one direction (n = 3).

    ``edge_labels[k]`` names the constraint behind the edge from vertex k to
    k+1: an index j >= 0 for the bisector with direction j, ``-(a+1)`` for
    edge a of the cap polygon.
    """

    owner_index: int
    vertices: np.ndarray
    edge_labels: list
    normals: dict = field(default_factory=dict)

    @property
    def empty(self) -> bool:
        return len(self.vertices) < 3

    def contains(self, v, tol: float = 0.0) -> bool:
        if self.empty:
            return False
        n = len(self.vertices)
        for k in range(n):
            P, Q = self.vertices[k], self.vertices[(k + 1) % n]
            if np.dot(np.cross(P, Q), v) < -tol:
                return False
        return True


def _cap_start(dual: PointedCone):
    verts = [z for z in dual.generators]
    labels = [-(a + 1) for a in range(len(verts))]
    return verts, labels


def _all_cells(K: HullPseudoCone):
    if K.dim != 3:
        raise ValueError(f"exact cells require n = 3, got n = {K.dim}")
    start_v, start_l = _cap_start(K.cone.dual)
    P = K.points
    cells = []
    for i in range(K.size):
        verts, labels = list(start_v), list(start_l)
        normals = {}
        for j in range(K.size):
            if j == i:
                continue
            a = P[i] - P[j]
            verts, labels = clip_polygon(verts, labels, a, j)
            if not verts:
                break
            normals[j] = a
        active = {j: normals[j] for j in sorted(set(labels)) if j is not None and j >= 0}
        V = np.array(verts) if verts else np.zeros((0, 3))
        cells.append(SphericalCell(i, V, list(labels), active))
    return cells


def diagram_vertices(cells, dual: PointedCone) -> np.ndarray:
    pts = [dual.generators]
    pts += [c.vertices for c in cells if not c.empty]
    return np.concatenate(pts)


def radial_from_cells(K: HullPseudoCone, U, cells=None) -> np.ndarray:
    """ρ_K(u) = max_v h̄_K(v)/|<u, v>| over the vertices of the power diagram.

    Exact for n = 3: on each cell the ratio is linear-fractional, so the
    supremum over cl Ω_{C°} sits at a cell vertex.
    """
    if cells is None:
        cells = _all_cells(K)
    V = diagram_vertices(cells, K.cone.dual)
    hbar = -np.max((V @ K.directions.T) * K.radials, axis=1)
    U = np.atleast_2d(np.asarray(U, dtype=float))
    U = U / np.linalg.norm(U, axis=1, keepdims=True)
    return np.max(hbar[None, :] / np.abs(U @ V.T), axis=1)


def snap_exact(K: HullPseudoCone, cells=None):
    """Snap every radial to ρ_K via the diagram vertices (n = 3).

    Returns ``(snapped K, cells of the snapped K)``.
    """
    if cells is None:
        cells = _all_cells(K)
    rho = radial_from_cells(K, K.directions, cells)
    g = np.minimum(K.radials, rho)
    if np.all(g >= K.radials * (1.0 - SNAP_RTOL)):
        return K, cells
    Ks = K.with_radials(g)
    return Ks, _all_cells(Ks)


def gauss_cells(K: HullPseudoCone, check: bool = True):
    """All cells of a snapped K (n = 3)."""
    cells = _all_cells(K)
    if check:
        rho = radial_from_cells(K, K.directions, cells)
        bad = np.flatnonzero(K.radials > rho * (1.0 + SNAP_RTOL))
        if len(bad):
            raise NotSnappedError(
                f"direction {int(bad[0])} has g = {K.radials[bad[0]]:.17g} > "
                f"ρ_K = {rho[bad[0]]:.17g}; call snap_to_radial first"
            )
    return cells


def gauss_cell(K: HullPseudoCone, i: int) -> SphericalCell:
    return gauss_cells(K)[i]


def cell_area(cell: SphericalCell) -> float:
    if cell.empty:
        return 0.0
    return polygon_area(cell.vertices)


def cell_areas(cells) -> np.ndarray:
    return np.array([cell_area(c) for c in cells])


def area_jacobian(K: HullPseudoCone, cells) -> np.ndarray:
    """∂ area_i / ∂ log g_j for the power diagram.

    Raising g_j moves the bisector of (i, j) into cell j with normal speed
    ``g_j |<u_j, v>| / |g_i u_i - g_j u_j|`` per unit change of log g_j, so the
    off-diagonal entries are edge integrals of that speed. Rows sum to zero.
    """
    m = K.size
    P = K.points
    J = np.zeros((m, m))
    for c in cells:
        if c.empty:
            continue
        i = c.owner_index
        nv = len(c.vertices)
        for k, j in enumerate(c.edge_labels):
            if j is None or j < 0:
                continue
            A, B = c.vertices[k], c.vertices[(k + 1) % nv]
            integral = -arc_linear_integral(K.directions[j], A, B)
            J[i, j] += K.radials[j] * integral / np.linalg.norm(P[i] - P[j])
    J[np.diag_indices(m)] = -J.sum(axis=1)
    return J


# --- curvature measures -----------------------------------------------------

@dataclass
class CurvatureMeasure:
    """Per-direction masses m_i = J_ϕ(K, {u_i})."""

    masses: np.ndarray
    areas: np.ndarray
    method: str
    orlicz: str = "const"
    std_errors: Optional[np.ndarray] = None

    @property
    def total(self) -> float:
        return float(np.sum(self.masses))


def _phi_name(phi) -> str:
    return getattr(phi, "name", None) or getattr(phi, "__name__", "phi")


def _phi_values(phi, g):
    if phi is None:
        return np.ones_like(g)
    return np.asarray([float(phi(t)) for t in g]) if not hasattr(phi, "values") else phi.values(g)


def curvature_measure(
    K: HullPseudoCone,
    phi: Optional[Callable] = None,
    cells=None,
    samples: int = 10**6,
    seed: int = 0,
) -> CurvatureMeasure:
    """J_ϕ(K, {u_i}) = ϕ(g_i) · area(cell_i); ϕ = None means ϕ ≡ 1.

    For n != 3 the areas are Monte Carlo estimates with standard errors.
    """
    pv = _phi_values(phi, K.radials)
    if K.dim != 3:
        areas, se = mc_masses(K, None, samples, seed)
        return CurvatureMeasure(pv * areas, areas, "monte-carlo", _phi_name(phi), pv * se)
    if cells is None:
        cells = gauss_cells(K)
    areas = cell_areas(cells)
    return CurvatureMeasure(pv * areas, areas, "exact", _phi_name(phi))


def classify_normal(K: HullPseudoCone, v) -> int:
    """α*_K(v) as an index: argmax_i g_i <u_i, v>, lowest index on ties."""
    return int(np.argmax(K.radials * (K.directions @ np.asarray(v, dtype=float))))


def classify_many(K: HullPseudoCone, V) -> np.ndarray:
    return np.argmax((np.asarray(V) @ K.directions.T) * K.radials, axis=1)


def _pullback_samples(K, phi, values, samples, seed):
    dual = K.cone.dual
    V, attempts = sample_cap(dual, samples, seed, return_attempts=True)
    idx = classify_many(K, V)
    weight = _phi_values(phi, K.radials) * values
    return idx, weight, attempts, sphere_area(K.dim)


def pullback_integral_mc(K: HullPseudoCone, phi, f, samples: int = 10**6, seed: int = 0):
    """Monte Carlo estimate of ∫ f dJ_ϕ(K, ·) = ∫_{Ω_{C°}} f(α*(v)) ϕ(ρ_K(α*(v))) dv.

    Normals are drawn uniformly on the sphere and rejected outside Ω_{C°};
    rejected draws count as zeros, so the estimator needs no cap area.
    ``f`` is a callable on directions or an array of per-direction values.
    Returns ``(estimate, standard_error)``.
    """
    vals = f(K.directions) if callable(f) else np.asarray(f, dtype=float)
    vals = np.broadcast_to(np.asarray(vals, dtype=float), (K.size,))
    idx, weight, attempts, S = _pullback_samples(K, phi, vals, samples, seed)
    y = weight[idx]
    mean = y.sum() / attempts
    var = (np.sum(y * y) / attempts) - mean * mean
    return float(S * mean), float(S * np.sqrt(max(var, 0.0) / attempts))


def mc_masses(K: HullPseudoCone, phi=None, samples: int = 10**6, seed: int = 0):
    """Monte Carlo masses J_ϕ(K, {u_i}) with per-direction standard errors."""
    idx, weight, attempts, S = _pullback_samples(K, phi, np.ones(K.size), samples, seed)
    counts = np.bincount(idx, minlength=K.size).astype(float)
    p = counts / attempts
    return S * weight * p, S * weight * np.sqrt(p * (1.0 - p) / attempts)


def concentration_check(K: HullPseudoCone, cells=None, tol: float = 1e-9):
    """Σ_i area(cell_i) against the cap area. Returns ``(ok, gap)``."""
    if cells is None:
        cells = gauss_cells(K)
    gap = float(abs(cell_areas(cells).sum() - cap_area(K.cone.dual)))
    return gap <= tol, gap
