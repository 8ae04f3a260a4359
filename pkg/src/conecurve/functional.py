"""Orlicz functions, the gauge φ(t) = ∫_δ^t ds/(sϕ(s)), and the entropy

    ℰ(K) = -∫_{Ω_{C°}} log h̄_K(v) dv

with its gradient in the radial values.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .cone import PointedCone, cap_area, sample_cap
from .curvature import gauss_cells, cell_areas
from .pseudocone import HullPseudoCone, support_bar_many
from .sphere import fan_triangles, integrate_triangles, rule_nodes, sphere_area

GRID = np.logspace(-3, 3, 61)
TOL_QUAD = 1e-9
MAX_DEPTH = 16


def worker_count() -> int:
    env = os.environ.get("CONECURVE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _ordered_map(func, items):
    items = list(items)
    threads = worker_count()
    if threads <= 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


# --- Orlicz functions ----------------------------------------------------------

@dataclass(frozen=True)
class OrliczFunction:
    """A positive continuous ϕ on (0, ∞).

    ``primitive(delta, t)`` optionally gives ∫_δ^t ds/(sϕ(s)) in closed form and
    ``sup_primitive(delta)`` its limit as t → ∞ (may be inf).
    """

    name: str
    func: Callable[[float], float]
    derivative: Optional[Callable[[float], float]] = None
    primitive: Optional[Callable[[float, float], float]] = None
    sup_primitive: Optional[Callable[[float], float]] = None

    def __post_init__(self):
        vals = np.array([self.func(t) for t in GRID], dtype=float)
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError(f"Orlicz function {self.name!r} is not positive on the test grid")

    def __call__(self, t):
        return self.func(t)

    def values(self, t) -> np.ndarray:
        return np.array([self.func(float(x)) for x in np.ravel(t)], dtype=float).reshape(np.shape(t))

    def deriv(self, t: float) -> float:
        if self.derivative is not None:
            return self.derivative(t)
        h = 1e-5 * t
        return (self.func(t + h) - self.func(t - h)) / (2 * h)


def power(p: float) -> OrliczFunction:
    p = float(p)
    if p == 0.0:
        return constant()

    def prim(d, t):
        return (d ** (-p) - t ** (-p)) / p

    def sup(d):
        return d ** (-p) / p if p > 0 else math.inf

    return OrliczFunction(
        f"power:{p:g}",
        lambda t: t**p,
        derivative=lambda t: p * t ** (p - 1),
        primitive=prim,
        sup_primitive=sup,
    )


def constant() -> OrliczFunction:
    return OrliczFunction(
        "const",
        lambda t: 1.0,
        derivative=lambda t: 0.0,
        primitive=lambda d, t: math.log(t / d),
        sup_primitive=lambda d: math.inf,
    )


def logshift() -> OrliczFunction:
    # ∫ ds/(s log(e+s)) has no elementary primitive; the gauge integrates numerically
    return OrliczFunction(
        "logshift",
        lambda t: math.log(math.e + t),
        derivative=lambda t: 1.0 / (math.e + t),
        sup_primitive=lambda d: math.inf,
    )


def orlicz_from_spec(spec: str) -> OrliczFunction:
    """Registry lookup: ``const``, ``power:p``, ``logshift``."""
    spec = spec.strip()
    if spec == "const":
        return constant()
    if spec == "logshift":
        return logshift()
    if spec.startswith("power:"):
        return power(float(spec.split(":", 1)[1]))
    raise ValueError(f"unknown Orlicz function {spec!r}")


# --- gauge -------------------------------------------------------------------------

class GaugeSaturation(ValueError):
    pass


class OrliczGauge:
    """φ(t) = ∫_δ^t ds/(sϕ(s)) for t > δ, strictly increasing with φ(δ+) = 0."""

    def __init__(self, base: OrliczFunction, delta: float):
        if not delta > 0:
            raise ValueError("delta must be positive")
        self.base = base
        self.delta = float(delta)
        if base.sup_primitive is not None:
            self.sup = float(base.sup_primitive(self.delta))
        else:
            self.sup = math.inf

    def __call__(self, t: float) -> float:
        t = float(t)
        if t <= self.delta:
            raise ValueError(f"gauge evaluated at t = {t!r} <= delta = {self.delta!r}")
        if self.base.primitive is not None:
            return float(self.base.primitive(self.delta, t))
        # integrate in x = log s, where the integrand is 1/ϕ(e^x)
        val, err = quad(
            lambda x: 1.0 / self.base(math.exp(x)),
            math.log(self.delta),
            math.log(t),
            epsabs=0.0,
            epsrel=1e-13,
            limit=200,
        )
        return val

    def values(self, t) -> np.ndarray:
        return np.array([self(x) for x in np.ravel(t)])

    def derivative(self, t):
        t = np.asarray(t, dtype=float)
        return 1.0 / (t * self.base.values(t))

    def inverse(self, y: float) -> float:
        y = float(y)
        if y <= 0.0:
            raise ValueError("gauge values are positive")
        if y >= self.sup:
            raise GaugeSaturation(f"value {y!r} exceeds the gauge supremum {self.sup!r}")
        lo = self.delta * (1.0 + 1e-12)
        hi = 2.0 * self.delta
        while self(hi) < y:
            hi *= 2.0
            if hi > 1e300:
                raise GaugeSaturation("gauge saturates before reaching the requested value")
        return brentq(lambda t: self(t) - y, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=500)


def build_gauge(phi: OrliczFunction, delta: float) -> OrliczGauge:
    return OrliczGauge(phi, delta)


def entropy_bound(dual: PointedCone) -> float:
    """λ = exp(-1/|Ω_{C°}|): every K with ℰ(K) = 1 has b(K) >= λ."""
    return math.exp(-1.0 / cap_area(dual))


def delta_from_cone(dual: PointedCone) -> float:
    """δ = λ/2, half the entropy lower bound on b(K)."""
    return 0.5 * entropy_bound(dual)


# --- entropy -------------------------------------------------------------------------

@dataclass
class QuadratureGrid:
    """Fan triangulation of each Gauss cell, with adaptive depths filled in on use."""

    triangles: list
    tol: float = TOL_QUAD
    depths: list = field(default_factory=list)

    @property
    def total_area(self) -> float:
        from .sphere import triangle_solid_angle

        return float(sum(triangle_solid_angle(*t) for tris in self.triangles for t in tris))


def build_grid(cells, tol: float = TOL_QUAD) -> QuadratureGrid:
    return QuadratureGrid([fan_triangles(c.vertices) for c in cells], tol)


def _log_inner(u):
    def f(v):
        return np.log(np.abs(v @ u))

    return f


def cell_log_integrals(K: HullPseudoCone, grid: QuadratureGrid, total_area: float) -> np.ndarray:
    """∫_{cell_i} log|<u_i, v>| dv for each i."""

    def one(i):
        tris = grid.triangles[i]
        if len(tris) == 0:
            return 0.0, 0
        return integrate_triangles(
            _log_inner(K.directions[i]), tris, grid.tol, MAX_DEPTH, total_area
        )

    out = _ordered_map(one, range(K.size))
    grid.depths = [d for _, d in out]
    return np.array([v for v, _ in out])


def entropy(K: HullPseudoCone, grid: QuadratureGrid = None, cells=None, tol: float = TOL_QUAD) -> float:
    """ℰ(K) = -Σ_i [log g_i · area_i + ∫_{cell_i} log|<u_i, v>| dv] (n = 3)."""
    if cells is None:
        cells = gauss_cells(K)
    if grid is None:
        grid = build_grid(cells, tol)
    areas = cell_areas(cells)
    total = cap_area(K.cone.dual)
    logs = cell_log_integrals(K, grid, total)
    return float(-(np.sum(np.log(K.radials) * areas) + np.sum(logs)))


def entropy_parts(K: HullPseudoCone, cells, tol: float = TOL_QUAD):
    """(areas, per-cell log integrals): ℰ = -(Σ log g_i area_i + Σ logs_i).

    The log integrals depend on the cells only, which are invariant under
    scaling, so callers can rescale without re-integrating.
    """
    grid = build_grid(cells, tol)
    return cell_areas(cells), cell_log_integrals(K, grid, cap_area(K.cone.dual))


def entropy_direct(K: HullPseudoCone, tol: float = 1e-10, kink_depth: int = 10) -> float:
    """ℰ(K) by integrating log h̄_K over a triangulation of the cap, ignoring cells.

    Triangles whose nodes disagree on the minimising direction straddle a kink
    of log h̄_K and are refined down to ``kink_depth`` levels.
    """
    dual = K.cone.dual
    tris = fan_triangles(dual.generators)

    def kinked(t):
        lab = np.argmax((rule_nodes(t) @ K.directions.T) * K.radials, axis=-1)
        return np.any(lab != lab[:, :1], axis=1)

    val, _ = integrate_triangles(
        lambda V: np.log(support_bar_many(K, V)),
        tris,
        tol,
        max(kink_depth + 4, MAX_DEPTH),
        cap_area(dual),
        refine=kinked,
        refine_depth=kink_depth,
    )
    return -val


def entropy_mc(K: HullPseudoCone, samples: int = 10**7, seed: int = 0, chunk: int = 10**6):
    """Monte Carlo estimate of ℰ(K) with its standard error."""
    dual = K.cone.dual
    rng_seed = np.random.SeedSequence(seed)
    total = s1 = s2 = 0.0
    attempts = 0
    left = samples
    for child in rng_seed.spawn(int(math.ceil(samples / chunk))):
        n = min(chunk, left)
        V, a = sample_cap(dual, n, int(child.generate_state(1)[0]), return_attempts=True)
        y = np.log(support_bar_many(K, V))
        s1 += y.sum()
        s2 += np.sum(y * y)
        attempts += a
        left -= n
    S = sphere_area(K.dim)
    mean = s1 / attempts
    var = s2 / attempts - mean * mean
    return float(-S * mean), float(S * math.sqrt(max(var, 0.0) / attempts))


def entropy_gradient(K: HullPseudoCone, measure=None, cells=None) -> np.ndarray:
    """∂(-ℰ)/∂g_i = area_i / g_i.

    Cell boundaries contribute nothing because log h̄_K is continuous across
    them, so only the log g_i · area_i terms are differentiated.
    """
    if measure is not None:
        areas = np.asarray(measure.areas)
    else:
        if cells is None:
            cells = gauss_cells(K)
        areas = cell_areas(cells)
    return areas / K.radials


# --- pointwise variation of log h̄ ---------------------------------------------

def perturbed_radials(gauge: OrliczGauge, f0, direction, t: float) -> np.ndarray:
    """f_t with φ(f_t) = φ(f_0) + t·g."""
    return np.array([gauge.inverse(gauge(f) + t * gi) for f, gi in zip(f0, direction)])


def boundary_distance(K: HullPseudoCone, v, cells=None) -> float:
    """Angular distance from v to the boundary of its Gauss cell."""
    v = np.asarray(v, dtype=float)
    P = K.points
    i = int(np.argmax(P @ v))
    dist = []
    for j in range(K.size):
        if j != i:
            a = P[i] - P[j]
            dist.append(np.dot(a, v) / np.linalg.norm(a))
    dual = K.cone.dual
    dist.extend(dual.facet_normals @ v)
    return float(np.arcsin(np.clip(min(dist), -1.0, 1.0)))


def log_support_derivative_check(
    K: HullPseudoCone,
    gauge: OrliczGauge,
    direction,
    v,
    h: float = 1e-5,
    eps: float = None,
    lipschitz_samples: int = 21,
    margin: float = 1e-3,
):
    """Compare d/dt log h̄_{⟨f_t⟩}(v) at t = 0 with a central difference.

    The analytic value is g_i / (f_i φ'(f_i)) at i = α*(v). Also checks
    |log h̄_t(v) - log h̄_0(v)| <= M|t| on [-ε, ε], where
    M = sup_{t, i} |g_i| / (f_t,i φ'(f_t,i)) bounds the slope of every
    log f_t,i and hence of their pointwise minimum.
    """
    v = np.asarray(v, dtype=float)
    direction = np.broadcast_to(np.asarray(direction, dtype=float), (K.size,))
    if boundary_distance(K, v) <= margin:
        raise ValueError("v is within the margin of its cell boundary")
    f0 = K.radials
    i = int(np.argmax(K.points @ v))
    analytic = float(direction[i] / (f0[i] * gauge.derivative(f0[i])))

    def log_hbar(t):
        ft = perturbed_radials(gauge, f0, direction, t)
        return math.log(-np.max(ft * (K.directions @ v)))

    fd = (log_hbar(h) - log_hbar(-h)) / (2 * h)
    if eps is None:
        gmax = float(np.max(np.abs(direction))) or 1.0
        eps = 0.25 * min(gauge(f) for f in f0) / gmax
        if math.isfinite(gauge.sup):
            eps = min(eps, 0.25 * (gauge.sup - max(gauge(f) for f in f0)) / gmax)
    ts = np.linspace(-eps, eps, lipschitz_samples)
    base = log_hbar(0.0)
    M = 0.0
    worst = 0.0
    for t in ts:
        ft = perturbed_radials(gauge, f0, direction, t)
        M = max(M, float(np.max(np.abs(direction) / (ft * gauge.derivative(ft)))))
        if t != 0.0:
            worst = max(worst, abs(log_hbar(t) - base) / abs(t))
    return {
        "index": i,
        "analytic": analytic,
        "finite_difference": fd,
        "lipschitz_M": M,
        "lipschitz_ratio": worst,
        "lipschitz_ok": worst <= M * (1 + 1e-9),
        "eps": eps,
    }
