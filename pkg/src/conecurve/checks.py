"""Property battery behind `conecurve verify`.

Each check returns a CheckResult carrying the measured value and the
tolerance it was held to, so a failing line is self-explanatory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import fixtures
from .cone import cap_area, contains_many, dual_cone, orthant, sample_cap
from .curvature import cell_areas, curvature_measure, gauss_cells, mc_masses
from .functional import (
    build_gauge,
    delta_from_cone,
    entropy,
    entropy_gradient,
    boundary_distance,
    log_support_derivative_check,
    orlicz_from_spec,
)
from .pseudocone import (
    HullPseudoCone,
    copolar,
    radial,
    radial_wulff,
    support_bar_many,
    support_bar_wulff,
)


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tol: float
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        extra = f"  {self.detail}" if self.detail else ""
        return f"[{flag}] {self.name}: {self.value:.3e} (tol {self.tol:.1e}){extra}"


def _result(name, value, tol, detail=""):
    return CheckResult(name, bool(value <= tol), float(value), tol, detail)


def check_inputs(cone, directions, field: str, unit_tol: float = 1e-12):
    """Raw input sanity: unit directions strictly inside the cone.

    Works on the raw arrays because hull construction normalizes directions.
    """
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    norms = np.abs(np.linalg.norm(U, axis=1) - 1.0)
    bad = int(np.argmax(norms))
    out = [_result(f"{field}: unit vectors", norms[bad], unit_tol,
                   f"offending field {field}[{bad}]" if norms[bad] > unit_tol else "")]
    inside = contains_many(cone, U / np.linalg.norm(U, axis=1, keepdims=True), strict=True)
    out.append(CheckResult(f"{field}: strictly inside cone", bool(inside.all()),
                           float((~inside).sum()), 0.0,
                           "" if inside.all() else f"offending field {field}[{int(np.argmin(inside))}]"))
    return out


def check_duality(K: HullPseudoCone, count: int = 100, seed: int = 0, tol: float = 1e-9):
    """ρ_K(u)·h̄_{K*}(u) = 1 on Ω_C and ρ_{K*}(v)·h̄_K(v) = 1 on Ω_{C°}."""
    Ks = copolar(K)
    U = sample_cap(K.cone, count, seed)
    err1 = max(abs(radial(K, u) * support_bar_wulff(Ks, u) - 1.0) for u in U)
    V = sample_cap(K.cone.dual, count, seed + 1)
    hb = support_bar_many(K, V)
    err2 = max(abs(radial_wulff(Ks, v) * h - 1.0) for v, h in zip(V, hb))
    return [
        _result("duality ρ_K·h̄_K* = 1", err1, tol),
        _result("biduality ρ_K*·h̄_K = 1", err2, tol),
    ]


def check_involution(K: HullPseudoCone, tol: float = 1e-12):
    C = K.cone
    ok = dual_cone(dual_cone(C)).same_as(C, tol)
    Kss = copolar(copolar(K))
    err = max(
        float(np.max(np.abs(Kss.directions - K.directions))),
        float(np.max(np.abs(Kss.radials - K.radials) / K.radials)),
    )
    return [
        CheckResult("cone involution C°° = C", ok, 0.0 if ok else 1.0, tol),
        _result("copolar involution K** = K", err, tol),
    ]


def check_partition(K: HullPseudoCone, cells=None, tol: float = 1e-9):
    cells = cells if cells is not None else gauss_cells(K)
    gap = abs(cell_areas(cells).sum() - cap_area(K.cone.dual))
    return [_result("partition Σ areas = |Ω_C°|", gap, tol)]


def check_octant_cap(tol: float = 1e-12):
    return [_result("octant cap area = π/2", abs(cap_area(orthant(3).dual) - math.pi / 2), tol)]


def check_scaling(K: HullPseudoCone, s: float = 2.0, tol: float = 1e-8):
    A = cap_area(K.cone.dual)
    err = abs(entropy(K.scaled(s)) - (entropy(K) - A * math.log(s)))
    return [_result(f"entropy scaling law (s={s:g})", err, tol)]


def check_gradient(K: HullPseudoCone, h: float = 1e-3, tol: float = 5e-4):
    """∂(-ℰ)/∂g_i = area_i/g_i against central differences in g_i."""
    grad = entropy_gradient(K)
    worst = 0.0
    for i in range(K.size):
        if grad[i] == 0.0:
            continue
        gp, gm = K.radials.copy(), K.radials.copy()
        gp[i] += h
        gm[i] -= h
        fd = -(entropy(K.with_radials(gp)) - entropy(K.with_radials(gm))) / (2 * h)
        worst = max(worst, abs(fd - grad[i]) / abs(grad[i]))
    return [_result("entropy gradient vs FD (relative)", worst, tol)]


def check_mc(K: HullPseudoCone, phi=None, samples: int = 10**6, seed: int = 0, nsigma: float = 4.0):
    """Exact masses and cap area against the Monte Carlo pullback estimator."""
    cells = gauss_cells(K)
    pv = phi.values(K.radials) if phi is not None else np.ones(K.size)
    exact = pv * cell_areas(cells)
    mc, se = mc_masses(K, phi, samples, seed)
    z = np.abs(mc - exact) / np.maximum(se, 1e-300)
    z[(se == 0) & (np.abs(mc - exact) < 1e-15)] = 0.0
    A, Ase = cap_area(K.cone.dual, "mc", samples, seed + 7)
    zc = abs(A - cap_area(K.cone.dual)) / Ase
    return [
        _result("masses exact vs MC (σ)", float(z.max()), nsigma),
        _result("cap area exact vs MC (σ)", zc, nsigma),
    ]


def check_log_support_derivative(K: HullPseudoCone, spec: str = "power:1", count: int = 5, seed: int = 0,
                  tol: float = 1e-6, margin: float = 1e-2):
    """Pointwise d/dt log h̄ of the φ-perturbed hull against finite differences."""
    rng = np.random.default_rng(seed)
    gauge = build_gauge(orlicz_from_spec(spec), delta_from_cone(K.cone.dual))
    direction = rng.uniform(-1.0, 1.0, K.size)
    V = [v for v in sample_cap(K.cone.dual, 200, seed) if boundary_distance(K, v) > margin][:count]
    worst, lip = 0.0, True
    for v in V:
        r = log_support_derivative_check(K, gauge, direction, v, margin=margin)
        worst = max(worst, abs(r["finite_difference"] - r["analytic"]) / abs(r["analytic"]))
        lip = lip and r["lipschitz_ok"]
    return [
        _result(f"log-support derivative vs FD ({spec})", worst, tol),
        CheckResult("log-support Lipschitz bound", lip, 0.0 if lip else 1.0, 0.0),
    ]


def fixture_checks(name: str, K: HullPseudoCone, full: bool = True):
    out = check_duality(K)
    out += check_involution(K)
    out += check_partition(K)
    if full:
        out += check_mc(K)
    return [CheckResult(f"{name}: {r.name}", r.passed, r.value, r.tol, r.detail) for r in out]


def run_battery(names=fixtures.DEFAULT_FIXTURES, mc: bool = True):
    """All checks on the named fixtures plus the fixture-independent ones."""
    results = check_octant_cap()
    for name in names:
        results += fixture_checks(name, fixtures.named(name), full=mc)
    five = fixtures.five_vertex()
    results += check_scaling(five)
    results += check_gradient(five)
    results += check_log_support_derivative(five)
    k1 = fixtures.single_vertex()
    m1 = curvature_measure(k1).masses[0]
    mt = curvature_measure(k1, orlicz_from_spec("power:1")).masses[0]
    results.append(_result("K₁ mass = π/2", abs(m1 - math.pi / 2), 1e-12))
    results.append(_result("K₁ ϕ(t)=t mass = √3π/2", abs(mt - math.sqrt(3) * math.pi / 2), 1e-12))
    return results


def run_on_hull(K: HullPseudoCone, label: str = "config"):
    """Battery for a user-supplied hull (used with `verify --fixture <config>`)."""
    return fixture_checks(label, K)
