"""Discrete Orlicz-Aleksandrov solver.

Given a cone C, a discrete measure μ = Σ μ_i δ_{u_i} on Ω_C and an Orlicz
function ϕ, find radial values g with ℰ(⟨g⟩) = 1 minimising

    ℱ(g) = (1/μ(η)) Σ_i φ(g_i) μ_i,      φ(t) = ∫_δ^t ds/(sϕ(s)).

At a constrained critical point μ_i/μ(η) = m_i/Σ_j m_j with m_i = J_ϕ(K, {u_i}),
so K = ⟨g⟩ and c = μ(η)/Σ m_j solve c·J_ϕ(K, ·) = μ. Solving over a larger
cone Γ ⊃ C gives further solutions with other constants c.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

from .cone import ConeError, PointedCone, cap_area, contains_many, sample_cap
from .curvature import _all_cells, area_jacobian, cell_areas, mc_masses, snap_exact
from .functional import (
    OrliczFunction,
    OrliczGauge,
    build_gauge,
    delta_from_cone,
    entropy_parts,
)
from .pseudocone import HullPseudoCone, PseudoConeError, distance_origin, radial
from .sphere import normalize, sphere_area

log = logging.getLogger(__name__)

DELTA_FLOOR = 1e-6


class ProjectionError(ValueError):
    """Rescaling to unit entropy would push a radial value to or below δ."""


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """μ = Σ_i μ_i δ_{u_i} with distinct unit directions and positive weights."""

    directions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        U = np.atleast_2d(np.asarray(self.directions, dtype=float))
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if len(w) != len(U):
            raise ValueError("directions and weights differ in length")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise ValueError("weights must be positive")
        U = U / np.linalg.norm(U, axis=1, keepdims=True)
        object.__setattr__(self, "directions", U)
        object.__setattr__(self, "weights", w)

    @property
    def total(self) -> float:
        return float(np.sum(self.weights))

    @property
    def normalized(self) -> np.ndarray:
        return self.weights / self.total

    def __len__(self):
        return len(self.weights)


@dataclass
class SolverOptions:
    tol: float = 1e-8
    max_iters: int = 5000
    method: str = "newton"  # or "gradient"
    armijo: float = 1e-4
    max_halvings: int = 60
    quad_tol: float = 1e-9
    seed: int = 0


@dataclass
class SolveReport:
    cone: PointedCone
    directions: np.ndarray
    radials: np.ndarray
    c: float
    tau: float
    masses: np.ndarray
    areas: np.ndarray
    kkt_residual: float
    entropy: float
    objective_trace: list
    iterations: int
    converged: bool
    wall_ms: float
    delta: float
    seed: int = 0
    orlicz: str = "const"
    gamma_beta: Optional[float] = None
    base_cone: Optional[PointedCone] = None
    message: str = ""
    clamped: bool = False

    @property
    def hull(self) -> HullPseudoCone:
        return HullPseudoCone(self.cone, self.directions, self.radials)


# --- objective and constraint ---------------------------------------------

def objective(g, mu: DiscreteMeasure, gauge: OrliczGauge) -> float:
    """ℱ(g) = (1/μ(η)) Σ_i φ(g_i) μ_i."""
    g = np.asarray(g, dtype=float)
    if np.any(g <= gauge.delta):
        raise ValueError("radial values must exceed the gauge threshold δ")
    return float(np.dot(gauge.values(g), mu.weights) / mu.total)


def objective_gradient(g, mu: DiscreteMeasure, gauge: OrliczGauge) -> np.ndarray:
    """∂ℱ/∂g_i = μ_i / (μ(η) g_i ϕ(g_i))."""
    g = np.asarray(g, dtype=float)
    return mu.weights / mu.total * gauge.derivative(g)


def kkt_residual(g, mu: DiscreteMeasure, masses) -> float:
    """max_i |μ_i/μ(η) - m_i/Σ_j m_j|."""
    m = np.asarray(masses, dtype=float)
    return float(np.max(np.abs(mu.normalized - m / m.sum())))


def _scale_to_unit_entropy(g, areas, logs):
    ent = -(np.dot(np.log(g), areas) + logs.sum())
    t = (ent - 1.0) / areas.sum()
    return g * math.exp(t)


def project_entropy(K: HullPseudoCone, delta: Optional[float] = None, cells=None, quad_tol=1e-9):
    """Rescale K ↦ sK so that ℰ(sK) = 1, using ℰ(sK) = ℰ(K) - |Ω_{C°}| log s.

    Raises ProjectionError if some radial would end at or below ``delta``.
    """
    if cells is None:
        cells = _all_cells(K)
    areas, logs = entropy_parts(K, cells, quad_tol)
    g = _scale_to_unit_entropy(K.radials, areas, logs)
    if delta is not None and np.any(g <= delta * (1.0 + DELTA_FLOOR)):
        raise ProjectionError(
            f"unit-entropy rescaling gives min g = {g.min():.6g} <= δ = {delta:.6g}"
        )
    return K.with_radials(g)


@dataclass
class _State:
    K: HullPseudoCone
    cells: list
    areas: np.ndarray
    F: float
    entropy: float


def _evaluate(cone, mu, gauge, g, quad_tol) -> _State:
    K = HullPseudoCone(cone, mu.directions, g)
    K, cells = snap_exact(K)
    areas, logs = entropy_parts(K, cells, quad_tol)
    g = _scale_to_unit_entropy(K.radials, areas, logs)
    if np.any(g <= gauge.delta * (1.0 + DELTA_FLOOR)):
        raise ProjectionError("iterate left the gauge domain")
    K = K.with_radials(g)
    ent = float(-(np.dot(np.log(g), areas) + logs.sum()))
    return _State(K, cells, areas, objective(g, mu, gauge), ent)


def _newton_direction(state, mu, phi):
    g = state.K.radials
    w = mu.normalized
    areas = state.areas
    A = areas.sum()
    pv = phi.values(g)
    p = w / pv
    grad = p - areas * p.sum() / A
    dphi = np.array([phi.deriv(t) for t in g])
    dp = -w * dphi * g / pv**2
    m = len(g)
    DP = np.eye(m) - np.outer(np.ones(m), areas) / A
    L = -area_jacobian(state.K, state.cells)
    H = DP.T @ (dp[:, None] * DP) + (p.sum() / A) * L
    H = 0.5 * (H + H.T)
    lam, V = np.linalg.eigh(H)
    ones = np.ones(m) / math.sqrt(m)
    keep = np.abs(V.T @ ones) < 0.5  # drop the scaling null direction
    lam_abs = np.abs(lam)
    floor = 1e-10 * max(lam_abs.max(), 1e-300)
    coef = (V.T @ grad) / np.maximum(lam_abs, floor)
    coef[~keep] = 0.0
    step = -(V @ coef)
    return step, float(grad @ step), grad


def _gradient_direction(state, mu, gauge):
    g = state.K.radials
    dF = objective_gradient(g, mu, gauge)
    nrm = state.areas / g
    nn = float(nrm @ nrm)
    d = -(dF - (dF @ nrm) / nn * nrm) if nn > 0 else -dF
    return d, float(dF @ d)


def solve_compact(
    cone: PointedCone,
    mu: DiscreteMeasure,
    phi: OrliczFunction,
    opts: SolverOptions = None,
    delta: Optional[float] = None,
) -> SolveReport:
    """Minimise ℱ over unit-entropy hull pseudo-cones and certify by the KKT residual.

    Each iteration snaps the radials onto ∂K, rebuilds the power diagram,
    takes a descent step (Newton on the entropy-reduced objective, or the
    tangential gradient with ``method="gradient"``), backtracks with Armijo
    on ℱ and rescales to ℰ = 1.
    """
    opts = opts or SolverOptions()
    t0 = time.perf_counter()
    if cone.dim != 3:
        raise ValueError("the exact solver needs n = 3")
    inside = contains_many(cone, mu.directions, strict=True)
    if not np.all(inside):
        raise PseudoConeError(
            f"measure direction {int(np.flatnonzero(~inside)[0])} is not strictly inside the cone"
        )
    dual = cone.dual
    if delta is None:
        delta = delta_from_cone(dual)
    gauge = build_gauge(phi, delta)

    state = _evaluate(cone, mu, gauge, np.ones(len(mu)), opts.quad_tol)
    trace = [state.F]
    alpha_g = 1.0
    converged = False
    message = ""
    it = 0
    while True:
        masses = phi.values(state.K.radials) * state.areas
        res = kkt_residual(state.K.radials, mu, masses) if masses.sum() > 0 else math.inf
        if res <= opts.tol:
            converged = True
            message = "converged"
            break
        if it >= opts.max_iters:
            message = f"max_iters reached (residual {res:.3e})"
            break
        it += 1
        s = np.log(state.K.radials)
        new = None
        if opts.method == "newton":
            step, slope, _ = _newton_direction(state, mu, phi)
            if slope < 0:
                new = _line_search(
                    lambda a: np.exp(s + a * step), state, slope, 1.0, cone, mu, gauge, opts
                )
        if new is None:
            d, slope = _gradient_direction(state, mu, gauge)
            g0 = state.K.radials
            # keep the first trial inside the gauge domain
            neg = d < 0
            amax = np.min((g0[neg] - delta) / -d[neg]) if np.any(neg) else math.inf
            a0 = min(alpha_g * 2.0, 0.5 * amax)
            out = _line_search(lambda a: g0 + a * d, state, slope, a0, cone, mu, gauge, opts, True)
            if out is None:
                message = "line search failed: no decrease at step 2^-60"
                break
            new, alpha_g = out
        elif isinstance(new, tuple):
            new = new[0]
        if new.F > state.F + 1e-12 * max(1.0, abs(state.F)):
            raise AssertionError("objective increased along an accepted step")
        state = new
        trace.append(state.F)

    K = state.K
    # areas from the returned hull itself, so reports can be re-derived bit for bit
    areas = cell_areas(_all_cells(K))
    masses = phi.values(K.radials) * areas
    total = float(masses.sum())
    return SolveReport(
        cone=cone,
        directions=K.directions.copy(),
        radials=K.radials.copy(),
        c=mu.total / total,
        tau=1.0 / total,
        masses=masses,
        areas=areas,
        kkt_residual=kkt_residual(K.radials, mu, masses),
        entropy=state.entropy,
        objective_trace=trace,
        iterations=it,
        converged=converged,
        wall_ms=(time.perf_counter() - t0) * 1e3,
        delta=delta,
        seed=opts.seed,
        orlicz=phi.name,
        message=message,
    )


def _line_search(trial, state, slope, alpha, cone, mu, gauge, opts, return_alpha=False):
    for _ in range(opts.max_halvings + 1):
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                g = trial(alpha)
            if np.all(np.isfinite(g)) and np.all(g > gauge.delta):
                cand = _evaluate(cone, mu, gauge, g, opts.quad_tol)
                if cand.F <= state.F + opts.armijo * alpha * slope:
                    return (cand, alpha) if return_alpha else cand
        except (ProjectionError, PseudoConeError):
            pass
        alpha *= 0.5
    return None


# --- larger cones ----------------------------------------------------------

def _widened(C: PointedCone, beta: float) -> np.ndarray:
    return normalize(C.generators - beta * C.axis)


def _valid_enlargement(C: PointedCone, beta: float):
    try:
        G = PointedCone(_widened(C, beta))
    except ConeError:
        return None
    if len(G.generators) != len(C.generators):
        return None
    if not np.all(C.generators @ G.facet_normals.T > 0):
        return None
    return G


def beta_max(C: PointedCone, iters: int = 60) -> float:
    """Largest β for which Γ(β) stays pointed and strictly contains C."""
    lo, hi = 0.0, 1.0
    if _valid_enlargement(C, hi) is not None:
        return hi
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if _valid_enlargement(C, mid) is not None:
            lo = mid
        else:
            hi = mid
    return lo


def enlarge_cone(C: PointedCone, beta: float) -> PointedCone:
    """Γ(β) generated by normalize(w_j - β d), d the axis of C; Γ ⊃ C."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    G = _valid_enlargement(C, beta)
    if G is None or beta >= beta_max(C):
        raise ValueError(f"beta = {beta!r} outside (0, beta_max = {beta_max(C):.6g})")
    return G


def solve_full(
    C: PointedCone,
    mu: DiscreteMeasure,
    phi: OrliczFunction,
    beta: float,
    opts: SolverOptions = None,
) -> SolveReport:
    """Solve over Γ = enlarge_cone(C, β); L ∩ C then solves c·J_ϕ = μ on Ω_C.

    The report holds L's hull data over Γ; the masses of L and of K = L ∩ C
    agree on Ω_C, and c = μ(Ω_C)/J_ϕ(L, η).
    """
    inside = contains_many(C, mu.directions, strict=True)
    if not np.all(inside):
        raise PseudoConeError("measure must live strictly inside C")
    G = enlarge_cone(C, beta)
    rep = solve_compact(G, mu, phi, opts)
    rep.gamma_beta = float(beta)
    rep.base_cone = C
    return rep


# --- the intersection body L ∩ C -------------------------------------------

def _interior_point(A, b):
    """Chebyshev centre of {x : A x <= b}."""
    norms = np.linalg.norm(A, axis=1)
    n = A.shape[1]
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = linprog(
        c,
        A_ub=np.hstack([A, norms[:, None]]),
        b_ub=b,
        bounds=[(None, None)] * n + [(0, None)],
        method="highs",
    )
    if res.status != 0 or res.x[-1] <= 0:
        raise RuntimeError("no interior point found")
    return res.x[:n]


def _truncated_vertices(L: HullPseudoCone, C: PointedCone, cut: float) -> np.ndarray:
    P = L.points
    W = L.cone.generators
    d = C.axis
    T = 2.0 * (cut + float(np.max(np.abs(P @ d)))) / float(np.min(W @ d))
    pts = np.vstack([P] + [P + T * w for w in W])
    hull = ConvexHull(pts)
    # genuine facets of L have outward normals in Γ°
    eq = hull.equations
    keep = np.all(eq[:, :3] @ W.T <= 1e-9, axis=1)
    A = np.vstack([eq[keep, :3], -C.facet_normals, d[None, :]])
    b = np.concatenate([-eq[keep, 3], np.zeros(len(C.facet_normals)), [cut]])
    x0 = _interior_point(A, b)
    hs = HalfspaceIntersection(np.hstack([A, -b[:, None]]), x0)
    V = hs.intersections
    V = V[V @ d < cut * (1.0 - 1e-9)]
    out = []
    for v in V[np.lexsort(V.T[::-1])]:
        if not any(np.linalg.norm(v - u) < 1e-8 * max(1.0, np.linalg.norm(v)) for u in out):
            out.append(v)
    return np.array(out)


def _vertex_reach(L: HullPseudoCone, C: PointedCone) -> float:
    """Upper bound for ⟨d, x⟩ over the vertices of L ∩ C.

    A vertex is a point p_i, the exit of an edge ray p_i + t w_j through a
    facet of C, or the entry point ρ_L(c)·c of an edge ray of C into L.
    """
    d = C.axis
    P = L.points
    reach = [float(np.max(P @ d))]
    A = C.facet_normals
    for w in L.cone.generators:
        aw = A @ w
        neg = aw < 0
        if np.any(neg):
            t = np.min((P @ A[neg].T) / -aw[neg], axis=1)
            reach.append(float(np.max((P + t[:, None] * w) @ d)))
    for c in C.generators:
        reach.append(radial(L, c) * float(c @ d))
    return max(reach)


def intersection_vertices(L: HullPseudoCone, C: PointedCone) -> np.ndarray:
    """Vertices of L ∩ C, computed with Qhull independently of the power diagram."""
    cut = 2.0 * _vertex_reach(L, C) + 1.0
    return _truncated_vertices(L, C, cut)


def intersection_mc_masses(L: HullPseudoCone, C: PointedCone, phi, samples=10**6, seed=0):
    """Monte Carlo J_ϕ(L ∩ C, {u_i}) with normals sampled on Ω_{C°}.

    Returns (masses, std_errors) for L's directions.
    """
    V = intersection_vertices(L, C)
    P = L.points
    owner = np.full(len(V), -1)
    for k, x in enumerate(V):
        dist = np.linalg.norm(P - x, axis=1)
        j = int(np.argmin(dist))
        if dist[j] < 1e-7 * max(1.0, np.linalg.norm(x)):
            owner[k] = j
    X, attempts = sample_cap(C.dual, samples, seed, return_attempts=True)
    hit = owner[np.argmax(X @ V.T, axis=1)]
    counts = np.array([np.sum(hit == i) for i in range(L.size)], dtype=float)
    p = counts / attempts
    S = sphere_area(3)
    pv = phi.values(L.radials) if phi is not None else np.ones(L.size)
    return S * pv * p, S * pv * np.sqrt(p * (1 - p) / attempts)


def report_mc_masses(rep: SolveReport, phi, samples: int, seed: int):
    return mc_masses(rep.hull, phi, samples, seed)


def distance_bound_gap(rep: SolveReport) -> float:
    """b(K) - exp(-1/|Ω_{C°}|) at a solution (>= 0 up to round-off)."""
    return distance_origin(rep.hull) - math.exp(-1.0 / cap_area(rep.cone.dual))
