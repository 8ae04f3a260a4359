"""Acceptance criteria, one printed PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` or ``python3 tests/test_acceptance.py``.
"""

import json
import math
import os
import subprocess
import sys
import tempfile
import time
from functools import lru_cache
from pathlib import Path

import numpy as np
import pytest

from conecurve import checks, fixtures
from conecurve.cone import cap_area, orthant
from conecurve.curvature import curvature_measure
from conecurve.functional import orlicz_from_spec
from conecurve.pseudocone import distance_origin
from conecurve.solver import DiscreteMeasure, SolverOptions, solve_compact, solve_full
from conecurve.sphere import normalize
from conftest import ACCEPTANCE_LINES

ROOT = Path(__file__).resolve().parents[1]
RANDOM_FIXTURES = tuple(f"random-{i}" for i in range(10))
GAUGES = ("const", "power:1", "power:2", "logshift")


def report(label, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def worst(results):
    failed = [r for r in results if not r.passed]
    return not failed, failed


@lru_cache(maxsize=None)
def certification_runs():
    """Random 20-direction octant instances, one per gauge."""
    out = {}
    C = orthant(3)
    for k, spec in enumerate(GAUGES):
        rng = np.random.default_rng(100 + k)
        mu = DiscreteMeasure(fixtures.interior_directions(C, 20, rng), rng.uniform(0.2, 3.0, 20))
        t0 = time.perf_counter()
        rep = solve_compact(C, mu, orlicz_from_spec(spec), SolverOptions(tol=1e-7, max_iters=5000))
        out[spec] = (mu, rep, time.perf_counter() - t0)
    return out


def symmetric_instance():
    U = normalize(np.array([[1.0, 1, 1], [2, 1, 1], [1, 2, 1], [1, 1, 2]]))
    return DiscreteMeasure(U, np.ones(4))


@lru_cache(maxsize=None)
def nonunique_runs():
    mu, phi, C = symmetric_instance(), orlicz_from_spec("power:1"), orthant(3)
    opts = SolverOptions(tol=1e-8)
    runs = {0.0: solve_compact(C, mu, phi, opts)}
    for b in (1e-3, 0.05, 0.1):
        runs[b] = solve_full(C, mu, phi, b, opts)
    return runs


def test_criterion_1_duality():
    results = []
    for name in RANDOM_FIXTURES:
        K = fixtures.named(name)
        results += checks.check_duality(K, count=100, tol=1e-9)
        results += checks.check_involution(K, tol=1e-9)
    ok, failed = worst(results)
    err = max(r.value for r in results)
    assert report("1 duality and involution (10 fixtures × 100 directions, 1e-9)", ok,
                  f"max error {err:.2e}" + "".join(f"; {r.name}" for r in failed))


def test_criterion_2_partition():
    results = checks.check_octant_cap(tol=1e-12)
    for name in fixtures.DEFAULT_FIXTURES:
        results += checks.check_partition(fixtures.named(name), tol=1e-9)
    ok, failed = worst(results)
    gap = max(r.value for r in results[1:])
    assert report("2 partition Σ areas = cap area (1e-9), octant cap = π/2 (1e-12)", ok,
                  f"max gap {gap:.2e}, octant {results[0].value:.2e}")


def test_criterion_3_single_vertex():
    K = fixtures.single_vertex()
    e1 = abs(curvature_measure(K).masses[0] - math.pi / 2)
    e2 = abs(curvature_measure(K, orlicz_from_spec("power:1")).masses[0] - math.sqrt(3) * math.pi / 2)
    e3 = abs(distance_origin(K) - math.sqrt(3))
    err = max(e1, e2, e3)
    assert report("3 single-vertex closed forms (1e-12)", err <= 1e-12,
                  f"|J-π/2|={e1:.1e}, |J_t-√3π/2|={e2:.1e}, |b-√3|={e3:.1e}")


def test_criterion_4_monte_carlo():
    results = []
    for i, name in enumerate(fixtures.DEFAULT_FIXTURES):
        results += checks.check_mc(fixtures.named(name), samples=10**6, seed=1000 + i, nsigma=4.0)
    ok, failed = worst(results)
    z = max(r.value for r in results)
    assert report("4 exact vs Monte Carlo masses and cap areas (4σ, 1e6 samples)", ok,
                  f"max |z| {z:.2f} over {len(fixtures.DEFAULT_FIXTURES)} fixtures")


def test_criterion_5_variational():
    five = fixtures.five_vertex()
    g = checks.check_gradient(five, h=1e-3, tol=5e-4)[0]
    deriv = checks.check_log_support_derivative(five, tol=1e-6)
    s = checks.check_scaling(five, tol=1e-8)[0]
    ok = g.passed and s.passed and all(r.passed for r in deriv)
    assert report("5 entropy gradient (5e-4), log-support derivative (1e-6), scaling (1e-8)", ok,
                  f"gradient {g.value:.1e}, derivative {deriv[0].value:.1e}, scaling {s.value:.1e}")


def test_criterion_6_solver_certification():
    lines, ok = [], True
    for spec, (mu, rep, secs) in certification_runs().items():
        eq = float(np.max(np.abs(rep.c * rep.masses - mu.weights)))
        bound = 1e-7 * mu.total * max(1.0, rep.c)
        good = (rep.converged and rep.kkt_residual <= 1e-7 and rep.iterations <= 5000
                and secs <= 60 and eq <= bound)
        ok &= good
        lines.append(f"{spec}: res {rep.kkt_residual:.1e}, {rep.iterations} it, {secs:.1f}s, "
                     f"|cm-μ| {eq:.1e}/{bound:.1e}")
    assert report("6 solver certification (res ≤ 1e-7, ≤ 5000 it, ≤ 60 s)", ok, "; ".join(lines))


def test_criterion_7_distance_bound():
    reps = [r for _, r, _ in certification_runs().values()]
    reps += [r for b, r in nonunique_runs().items() if b == 0.0]
    margins = []
    for rep in reps:
        assert rep.converged
        margins.append(distance_origin(rep.hull) - math.exp(-1.0 / cap_area(rep.cone.dual)))
    ok = min(margins) >= -1e-9
    assert report("7 b(K) ≥ exp(-1/cap area) - 1e-9 on converged solutions", ok,
                  f"min margin {min(margins):.3e} over {len(reps)} solutions")


def test_criterion_8a_nonuniqueness():
    runs = nonunique_runs()
    r1, r2 = runs[0.05], runs[0.1]
    dc = abs(r1.c - r2.c)
    dg = float(np.max(np.abs(r1.radials - r2.radials)))
    ok = (r1.converged and r2.converged and r1.kkt_residual <= 1e-6 and r2.kkt_residual <= 1e-6
          and dc > 10 * 1e-6 and dg > 1e-3)
    assert report("8a non-uniqueness at β ∈ {0.05, 0.1}", ok,
                  f"c = {r1.c:.6f}, {r2.c:.6f} (|Δc| {dc:.3e}); sup|Δg| {dg:.3e}")


def test_criterion_8b_small_beta_continuity():
    runs = nonunique_runs()
    base, small = runs[0.0], runs[1e-3]
    dc = abs(small.c - base.c)
    dg = float(np.max(np.abs(small.radials - base.radials)))
    ok = dc <= 1e-3 and dg <= 1e-3
    assert report("8b β = 1e-3 run within 1e-3 of the compact solve", ok,
                  f"|Δc| {dc:.3e}, sup|Δg| {dg:.3e}")


def test_criterion_9_determinism():
    cfg = ROOT / "demos" / "configs" / "random20.json"
    blobs = []
    with tempfile.TemporaryDirectory() as tmp:
        for i, threads in enumerate(("1", "1", "3", "8")):
            out = Path(tmp) / f"r{i}.json"
            env = dict(os.environ, CONECURVE_THREADS=threads)
            subprocess.run([sys.executable, "-m", "conecurve.cli", "solve", "--config", str(cfg),
                            "--out", str(out)], check=True, env=env, capture_output=True)
            blobs.append(out.read_bytes())
    same = all(b == blobs[0] for b in blobs)
    res = json.loads(blobs[0])["diagnostics"]["kkt_residual"]
    assert report("9 byte-identical reports across runs and thread counts {1,1,3,8}", same,
                  f"{len(blobs[0])} bytes, residual {res:.1e}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s", "-p", "no:cacheprovider"]))
