"""Many (c, K) pairs for one measure.

Solving over a slightly wider cone Γ(β) ⊃ C and intersecting with C keeps the
curvature masses on the C side unchanged, so every β gives another solution
of the same equation with a different constant. The symmetric instance is the
axis plus the three coordinate permutations of (2,1,1).

The second table shows how the β-family approaches the compact solve: both
gaps shrink linearly in β.

    python3 demos/03_nonuniqueness.py
"""

from pathlib import Path

import numpy as np

from conecurve.io import load_config
from conecurve.solver import SolverOptions, beta_max, intersection_mc_masses, solve_compact, solve_full

cfg = load_config(Path(__file__).parent / "configs" / "symmetric_octant.json")
C, mu, phi = cfg.cone(), cfg.measure(), cfg.phi()
opts = SolverOptions(tol=1e-10)
base = solve_compact(C, mu, phi, opts)
print(f"largest admissible β for the octant: {beta_max(C):.6f}")
print(f"compact solve: c = {base.c:.10f}, g = {np.round(base.radials, 6)}")

print(f"\n{'β':>7} {'c':>14} {'residual':>10} {'sup|Δg|':>10}")
for b in (0.02, 0.05, 0.1, 0.2):
    rep = solve_full(C, mu, phi, b, opts)
    print(f"{b:>7.3g} {rep.c:>14.10f} {rep.kkt_residual:>10.1e} {np.max(np.abs(rep.radials - base.radials)):>10.3e}")

rep = solve_full(C, mu, phi, 0.1, opts)
mc, se = intersection_mc_masses(rep.hull, C, phi, 10**6, seed=3)
print("\nβ = 0.1: masses of the enlarged hull vs Monte Carlo on K = L ∩ C")
for m, e, s in zip(rep.masses, mc, se):
    print(f"  {m:.8f}  {e:.8f} ± {s:.1e}")

print(f"\n{'β':>7} {'|Δc|':>10} {'|Δc|/β':>8} {'sup|Δg|':>10} {'sup|Δg|/β':>9}")
for b in (1e-2, 1e-3, 1e-4, 1e-5):
    rep = solve_full(C, mu, phi, b, opts)
    dc, dg = abs(rep.c - base.c), np.max(np.abs(rep.radials - base.radials))
    print(f"{b:>7.0e} {dc:>10.3e} {dc / b:>8.3f} {dg:>10.3e} {dg / b:>9.3f}")
