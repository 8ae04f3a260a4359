"""Command line front end: ``conecurve {solve,verify,measure,export,demo-nonunique}``.

Exit codes: 0 success, 1 failed checks, 2 configuration errors,
3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import checks, fixtures
from .cone import ConeError, cap_area
from .curvature import curvature_measure, mc_masses
from .functional import entropy, worker_count
from .io import (
    ConfigError,
    RunConfig,
    cone_dict,
    dumps,
    load_config,
    solve_report_dict,
    truncated_mesh,
    write_json,
    write_obj,
)
from .pseudocone import PseudoConeError, copolar, distance_origin
from .solver import SolverOptions, solve_compact, solve_full

EXIT_OK, EXIT_CHECKS, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 1, 2, 3


def _options(cfg: RunConfig) -> SolverOptions:
    return SolverOptions(tol=cfg.tol, max_iters=cfg.max_iters, method=cfg.method, seed=cfg.seed)


def _timing(rep) -> dict:
    return {"threads": worker_count(), "wall_ms": rep.wall_ms}


def _run(cfg: RunConfig, beta=None):
    C, mu, phi = cfg.cone(), cfg.measure(), cfg.phi()
    if beta is None:
        return solve_compact(C, mu, phi, _options(cfg))
    return solve_full(C, mu, phi, beta, _options(cfg))


def _mc(cfg, rep, phi):
    if cfg.mc_samples <= 0:
        return None
    return mc_masses(rep.hull, phi, cfg.mc_samples, cfg.seed)


def _emit(obj, out):
    if out:
        write_json(out, obj)
    else:
        sys.stdout.write(dumps(obj))


def cmd_solve(args) -> int:
    cfg = load_config(args.config)
    if args.beta and len(args.beta) > 1:
        raise ConfigError("solve takes at most one --beta; use demo-nonunique for a sweep")
    beta = args.beta[0] if args.beta else None
    rep = _run(cfg, beta)
    report = solve_report_dict(rep, cfg, _mc(cfg, rep, cfg.phi()), _timing(rep) if args.timing else None)
    _emit(report, args.out or cfg.report_path)
    if not rep.converged:
        print(f"not converged: {rep.message}", file=sys.stderr)
        return EXIT_NONCONVERGED
    return EXIT_OK


def _verify_config(path: Path):
    """Input checks on a raw config file, then the battery on its hull if present."""
    raw = json.loads(path.read_text())
    cfg = load_config(path)
    C = cfg.cone()
    results = checks.check_inputs(C, raw["measure"].get("directions", cfg.directions), "measure.directions")
    if "hull" in raw:
        results += checks.check_inputs(C, raw["hull"]["directions"], "hull.directions")
    if all(r.passed for r in results) and cfg.hull_directions is not None:
        results += checks.run_on_hull(cfg.hull(), path.stem)
    return results


def cmd_verify(args) -> int:
    if args.fixture is None:
        results = checks.run_battery(mc=not args.no_mc)
    elif args.fixture in fixtures.DEFAULT_FIXTURES or args.fixture.startswith("random-"):
        results = checks.fixture_checks(args.fixture, fixtures.named(args.fixture), full=not args.no_mc)
    elif Path(args.fixture).is_file():
        results = _verify_config(Path(args.fixture))
    else:
        raise ConfigError(f"unknown fixture {args.fixture!r}")
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)} passed, {len(failed)} failed")
    for r in failed:
        print(f"failed: {r.name}{'  ' + r.detail if r.detail else ''}")
    return EXIT_CHECKS if failed else EXIT_OK


def cmd_measure(args) -> int:
    cfg = load_config(args.config)
    K, phi = cfg.hull(), cfg.phi()
    cm = curvature_measure(K, phi)
    mc = mc_masses(K, phi, max(cfg.mc_samples, 1), cfg.seed)
    Ks = copolar(K)
    A = cap_area(K.cone.dual)
    report = {
        "schema_version": "1.0",
        "config": cfg.to_dict(),
        "hull": {"directions": K.directions, "radials": K.radials, "cone": cone_dict(K.cone)},
        "masses": {"exact": cm.masses, "areas": cm.areas, "mc": mc[0], "mc_sigma": mc[1], "orlicz": cm.orlicz},
        "entropy": entropy(K),
        "distance_origin": distance_origin(K),
        "entropy_bound": math.exp(-1.0 / A),
        "copolar": {"cone": cone_dict(Ks.cone), "normals": Ks.normals, "offsets": Ks.offsets},
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_export(args) -> int:
    cfg = load_config(args.config)
    if cfg.hull_directions is not None:
        K = cfg.hull()
    else:
        rep = _run(cfg)
        if not rep.converged:
            print(f"not converged: {rep.message}", file=sys.stderr)
            return EXIT_NONCONVERGED
        K = rep.hull
    try:
        mesh = truncated_mesh(K, args.radius)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out = args.out or cfg.mesh_path
    if not out:
        raise ConfigError("export needs --out or output.mesh")
    write_obj(out, mesh)
    print(f"wrote {out}: {len(mesh.vertices)} vertices, {len(mesh.faces) + len(mesh.cap_faces)} faces")
    return EXIT_OK


def cmd_demo_nonunique(args) -> int:
    cfg = load_config(args.config)
    betas = args.beta or cfg.betas
    if len(betas) < 2:
        raise ConfigError("demo-nonunique needs at least two β values")
    phi = cfg.phi()
    base = _run(cfg)
    runs = [(0.0, base)] + [(b, _run(cfg, b)) for b in betas]
    rows = []
    for b, rep in runs:
        rows.append({
            "beta": b,
            "c": rep.c,
            "kkt_residual": rep.kkt_residual,
            "converged": rep.converged,
            "max_dg_vs_baseline": float(np.max(np.abs(rep.radials - base.radials))),
        })
    print(f"{'beta':>10} {'c':>22} {'residual':>10} {'max|Δg|':>12}")
    for r in rows:
        print(f"{r['beta']:>10.4g} {r['c']:>22.15g} {r['kkt_residual']:>10.2e} {r['max_dg_vs_baseline']:>12.4e}")
    if args.out:
        out = Path(args.out)
        for b, rep in runs:
            name = "baseline" if b == 0.0 else f"beta_{b:.6g}"
            write_json(out / f"report_{name}.json",
                       solve_report_dict(rep, cfg, _mc(cfg, rep, phi), _timing(rep) if args.timing else None))
        write_json(out / "table.json", {"schema_version": "1.0", "rows": rows})
    if not all(rep.converged for _, rep in runs):
        return EXIT_NONCONVERGED
    cs = [r["c"] for r in rows[1:]]
    distinct = all(abs(a - b) > 10 * cfg.tol for i, a in enumerate(cs) for b in cs[i + 1:])
    print("all c pairwise distinct" if distinct else "some c values coincide within 10×tol")
    return EXIT_OK if distinct else EXIT_CHECKS


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conecurve", description="Discrete Orlicz-Aleksandrov solver for C-pseudo-cones")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve c·J_ϕ(K,·) = μ")
    s.add_argument("--config", required=True)
    s.add_argument("--beta", type=float, action="append", help="solve over the enlarged cone Γ(β)")
    s.add_argument("--out")
    s.add_argument("--timing", action="store_true", help="record wall time and threads (breaks byte identity)")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="run the property battery")
    v.add_argument("--fixture", help="built-in fixture name or a config file")
    v.add_argument("--no-mc", action="store_true", help="skip Monte Carlo comparisons")
    v.set_defaults(func=cmd_verify)

    m = sub.add_parser("measure", help="curvature masses of the hull in a config")
    m.add_argument("--config", required=True)
    m.add_argument("--out")
    m.set_defaults(func=cmd_measure)

    e = sub.add_parser("export", help="write a truncated OBJ mesh")
    e.add_argument("--config", required=True)
    e.add_argument("--radius", type=float, required=True)
    e.add_argument("--out")
    e.set_defaults(func=cmd_export)

    d = sub.add_parser("demo-nonunique", help="solve over several enlarged cones")
    d.add_argument("--config", required=True)
    d.add_argument("--beta", type=float, action="append")
    d.add_argument("--out", help="directory for per-run reports")
    d.add_argument("--timing", action="store_true")
    d.set_defaults(func=cmd_demo_nonunique)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ConeError, PseudoConeError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
