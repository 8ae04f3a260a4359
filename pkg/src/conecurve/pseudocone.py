"""C-pseudo-cones in convex-hull form ⟨g⟩ and Wulff form [f].

A hull pseudo-cone is ``conv(⋃_i (g_i u_i + C))``; a Wulff pseudo-cone is
``C ∩ ⋂_j {x : <x, v_j> <= -f_j}``. Copolarity swaps the two descriptions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog, minimize

from .cone import EPS_INT, PointedCone, contains, contains_many

DISTINCT_TOL = 1e-8


class PseudoConeError(ValueError):
    pass


def _check_directions(cone, dirs, strict_cone, name):
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    if dirs.shape[1] != cone.dim:
        raise PseudoConeError(f"{name} have dimension {dirs.shape[1]}, cone has {cone.dim}")
    norms = np.linalg.norm(dirs, axis=1)
    if np.any(norms < 1e-14):
        raise PseudoConeError(f"{name} contain a zero vector")
    dirs = dirs / norms[:, None]
    inside = contains_many(strict_cone, dirs, strict=True)
    if not np.all(inside):
        bad = int(np.flatnonzero(~inside)[0])
        raise PseudoConeError(f"{name}[{bad}] is not strictly inside the cone")
    for i in range(len(dirs)):
        d = np.linalg.norm(dirs[i + 1:] - dirs[i], axis=1)
        if len(d) and d.min() <= DISTINCT_TOL:
            raise PseudoConeError(f"{name}[{i}] duplicates another direction")
    return dirs


def _check_positive(vals, m, name):
    vals = np.asarray(vals, dtype=float).reshape(-1)
    if len(vals) != m:
        raise PseudoConeError(f"expected {m} {name}, got {len(vals)}")
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        raise PseudoConeError(f"{name} must be finite and > 0")
    return vals


@dataclass(frozen=True, eq=False)
class HullPseudoCone:
    """Convex hull ⟨g⟩ of the points ``g_i u_i`` plus the recession cone."""

    cone: PointedCone
    directions: np.ndarray
    radials: np.ndarray

    def __post_init__(self):
        dirs = _check_directions(self.cone, self.directions, self.cone, "directions")
        g = _check_positive(self.radials, len(dirs), "radials")
        dirs.setflags(write=False)
        g.setflags(write=False)
        object.__setattr__(self, "directions", dirs)
        object.__setattr__(self, "radials", g)

    @property
    def dim(self) -> int:
        return self.cone.dim

    @property
    def size(self) -> int:
        return len(self.radials)

    @property
    def points(self) -> np.ndarray:
        return self.radials[:, None] * self.directions

    def with_radials(self, radials) -> "HullPseudoCone":
        return HullPseudoCone(self.cone, self.directions, radials)

    def scaled(self, s: float) -> "HullPseudoCone":
        return self.with_radials(s * self.radials)


@dataclass(frozen=True, eq=False)
class WulffPseudoCone:
    """Wulff shape [f] = C ∩ ⋂_j {<x, v_j> <= -f_j} with v_j in int C°."""

    cone: PointedCone
    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        nrm = _check_directions(self.cone, self.normals, self.cone.dual, "normals")
        f = _check_positive(self.offsets, len(nrm), "offsets")
        nrm.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "normals", nrm)
        object.__setattr__(self, "offsets", f)

    @property
    def dim(self) -> int:
        return self.cone.dim


# --- support and radial functions ----------------------------------------

def support_bar(K: HullPseudoCone, v) -> float:
    """h̄_K(v) = -h_K(v) = min_i g_i |<u_i, v>| for v in cl Ω_{C°}."""
    v = np.asarray(v, dtype=float)
    if not contains(K.cone.dual, v):
        raise PseudoConeError("v is outside cl Ω_{C°}")
    return float(-np.max(K.radials * (K.directions @ v)))


def support_bar_many(K: HullPseudoCone, V) -> np.ndarray:
    V = np.asarray(V, dtype=float)
    return -np.max((V @ K.directions.T) * K.radials, axis=-1)


def radial(K: HullPseudoCone, u) -> float:
    """ρ_K(u) = min{r > 0 : r u ∈ K}, by a small LP polished to machine precision.

    Solves  min r  s.t.  r u = Σ λ_i g_i u_i + Σ ν_j w_j,  Σ λ_i = 1,  λ, ν >= 0.
    """
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    if not contains(K.cone, u, strict=True):
        raise PseudoConeError("u is not strictly inside the cone")
    P = K.points
    W = K.cone.generators
    m, k, n = len(P), len(W), K.dim
    A_eq = np.zeros((n + 1, 1 + m + k))
    A_eq[:n, 0] = u
    A_eq[:n, 1:1 + m] = -P.T
    A_eq[:n, 1 + m:] = -W.T
    A_eq[n, 1:1 + m] = 1.0
    b_eq = np.zeros(n + 1)
    b_eq[n] = 1.0
    c = np.zeros(1 + m + k)
    c[0] = 1.0
    res = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * (1 + m + k), method="highs")
    if res.status != 0:
        raise RuntimeError(f"internal error: radial LP failed ({res.message})")
    x = res.x
    r_lp = float(x[0])
    # polish: re-solve the equality system on the support of the LP solution
    support = np.flatnonzero(x[1:] > 1e-9) + 1
    cols = np.concatenate([[0], support])
    sol, *_ = np.linalg.lstsq(A_eq[:, cols], b_eq, rcond=None)
    resid = np.linalg.norm(A_eq[:, cols] @ sol - b_eq)
    if resid < 1e-12 and np.all(sol >= -1e-12) and abs(sol[0] - r_lp) <= 1e-6 * max(1.0, r_lp):
        return float(sol[0])
    return r_lp


def contains_point(K: HullPseudoCone, x, tol: float = 1e-9) -> bool:
    """Membership of x in K by LP feasibility."""
    x = np.asarray(x, dtype=float)
    P, W = K.points, K.cone.generators
    m, k, n = len(P), len(W), K.dim
    A_eq = np.zeros((n + 1, m + k))
    A_eq[:n, :m] = P.T
    A_eq[:n, m:] = W.T
    A_eq[n, :m] = 1.0
    b_eq = np.append(x, 1.0)
    res = linprog(
        np.zeros(m + k),
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=[(0, None)] * (m + k),
        method="highs",
        options={"primal_feasibility_tolerance": tol},
    )
    return res.status == 0


def radial_wulff(K: WulffPseudoCone, u) -> float:
    """ρ_K(u) = max_j f_j / |<u, v_j>|: the last offset plane crossed by the ray.

    Valid on all of cl Ω_C since every v_j is interior to C°.
    """
    u = np.asarray(u, dtype=float)
    u = u / np.linalg.norm(u)
    if not contains(K.cone, u):
        raise PseudoConeError("u is outside the cone")
    return float(np.max(K.offsets / np.abs(K.normals @ u)))


def support_bar_wulff(K: WulffPseudoCone, v) -> float:
    """h̄_K(v) for a Wulff shape: -max{<v, x> : x ∈ K}, a polished LP."""
    v = np.asarray(v, dtype=float)
    if not contains(K.cone.dual, v):
        raise PseudoConeError("v is outside cl Ω_{C°}")
    n = K.dim
    # rows: <x, v_j> <= -f_j  and  -<a_k, x> <= 0
    A = np.vstack([K.normals, -K.cone.facet_normals])
    b = np.concatenate([-K.offsets, np.zeros(len(K.cone.facet_normals))])
    res = linprog(-v, A_ub=A, b_ub=b, bounds=[(None, None)] * n, method="highs")
    if res.status != 0:
        raise RuntimeError(f"internal error: Wulff support LP failed ({res.message})")
    x = res.x
    val = float(v @ x)
    slack = b - A @ x
    active = np.flatnonzero(np.abs(slack) <= 1e-8 * max(1.0, np.abs(b).max()))
    if len(active) >= n:
        xs, *_ = np.linalg.lstsq(A[active], b[active], rcond=None)
        if (
            np.linalg.matrix_rank(A[active], tol=1e-10) == n
            and np.all(A @ xs - b <= 1e-12 * max(1.0, np.abs(b).max()))
            and abs(v @ xs - val) <= 1e-6 * max(1.0, abs(val))
        ):
            val = float(v @ xs)
    return -val


# --- copolarity -------------------------------------------------------------

def copolar(K):
    """K* = {x : <x, y> <= -1 for all y in K}.

    ⟨g⟩* is the Wulff shape over C° with normals u_i and offsets 1/g_i, and
    [f]* is the hull over C°° = C with directions v_j and radials 1/f_j.
    """
    if isinstance(K, HullPseudoCone):
        return WulffPseudoCone(K.cone.dual, K.directions, 1.0 / K.radials)
    if isinstance(K, WulffPseudoCone):
        return HullPseudoCone(K.cone.dual, K.normals, 1.0 / K.offsets)
    raise TypeError(f"cannot take copolar of {type(K).__name__}")


# --- distance and snapping ---------------------------------------------------

def distance_origin(K: HullPseudoCone) -> float:
    """b(K) = dist(o, K), minimising |Σ λ_i g_i u_i + Σ ν_j w_j| over the hull
    parametrisation and polishing on the optimal face."""
    P, W = K.points, K.cone.generators
    m, k = len(P), len(W)
    A = np.hstack([P.T, W.T])
    e = np.concatenate([np.ones(m), np.zeros(k)])
    i0 = int(np.argmin(np.linalg.norm(P, axis=1)))
    theta0 = np.zeros(m + k)
    theta0[i0] = 1.0
    res = minimize(
        lambda t: 0.5 * float(np.sum((A @ t) ** 2)),
        theta0,
        jac=lambda t: A.T @ (A @ t),
        method="SLSQP",
        bounds=[(0, None)] * (m + k),
        constraints=[{"type": "eq", "fun": lambda t: e @ t - 1.0, "jac": lambda t: e}],
        options={"ftol": 1e-15, "maxiter": 500},
    )
    theta = res.x if res.success else theta0
    best = float(np.linalg.norm(A @ theta))
    S = np.flatnonzero(theta > 1e-7 * max(1.0, theta.max()))
    if not np.any(S < m):
        return best
    As, es = A[:, S], e[S]
    kkt = np.block([[As.T @ As, es[:, None]], [es[None, :], np.zeros((1, 1))]])
    rhs = np.zeros(len(S) + 1)
    rhs[-1] = 1.0
    sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
    ts = sol[:-1]
    if np.any(ts < -1e-12) or abs(es @ ts - 1.0) > 1e-12:
        return best
    x = As @ ts
    d = float(np.linalg.norm(x))
    # optimality of the projection: <x, p_i> >= |x|^2 and <x, w_j> >= 0
    if np.all(P @ x >= d * d - 1e-9 * max(1.0, d * d)) and np.all(W @ x >= -1e-9 * max(1.0, d)):
        if d <= best + 1e-8 * max(1.0, best):
            return d
    return best


def snap_to_radial(K: HullPseudoCone, indices=None) -> HullPseudoCone:
    """Replace g_i by ρ_K(u_i) <= g_i; the set K is unchanged.

    ``indices`` restricts the work to the listed directions (the others are
    known to be boundary points already).
    """
    g = K.radials.copy()
    idx = range(K.size) if indices is None else indices
    for i in idx:
        g[i] = min(g[i], radial(K, K.directions[i]))
    if np.array_equal(g, K.radials):
        return K
    return K.with_radials(g)


__all__ = [
    "EPS_INT",
    "HullPseudoCone",
    "WulffPseudoCone",
    "PseudoConeError",
    "support_bar",
    "support_bar_many",
    "radial",
    "contains_point",
    "radial_wulff",
    "support_bar_wulff",
    "copolar",
    "distance_origin",
    "snap_to_radial",
]
