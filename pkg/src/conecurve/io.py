"""JSON configs and reports, and OBJ export.

Floats are written with 17 significant digits so every double survives a
write/read cycle unchanged. Reports contain nothing host-dependent unless
timing is requested, which keeps them byte-identical across runs.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull

from .cone import ConeError, PointedCone
from .functional import orlicz_from_spec
from .pseudocone import HullPseudoCone, PseudoConeError

SCHEMA_VERSION = "1.0"


class ConfigError(ValueError):
    """Malformed or inconsistent configuration."""


# --- deterministic JSON -------------------------------------------------------

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} in report")
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, (int, np.integer)) and not isinstance(obj, bool):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple, np.ndarray)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))


# --- run configuration ------------------------------------------------------

@dataclass
class RunConfig:
    generators: list
    directions: list
    weights: list
    facet_normals: Optional[list] = None
    measure_file: Optional[str] = None
    orlicz: str = "const"
    tol: float = 1e-8
    max_iters: int = 5000
    seed: int = 0
    method: str = "newton"
    betas: list = field(default_factory=list)
    mc_samples: int = 100000
    hull_directions: Optional[list] = None
    hull_radials: Optional[list] = None
    report_path: Optional[str] = None
    mesh_path: Optional[str] = None

    def to_dict(self) -> dict:
        cone = {"generators": self.generators}
        if self.facet_normals is not None:
            cone["facet_normals"] = self.facet_normals
        if self.measure_file is not None:
            measure = {"file": self.measure_file}
        else:
            measure = {"directions": self.directions, "weights": self.weights}
        out = {
            "cone": cone,
            "measure": measure,
            "orlicz": self.orlicz,
            "solver": {
                "tol": self.tol,
                "max_iters": self.max_iters,
                "seed": self.seed,
                "method": self.method,
                "betas": list(self.betas),
                "mc_samples": self.mc_samples,
            },
        }
        if self.hull_directions is not None:
            out["hull"] = {"directions": self.hull_directions, "radials": self.hull_radials}
        paths = {k: v for k, v in (("report", self.report_path), ("mesh", self.mesh_path)) if v}
        if paths:
            out["output"] = paths
        return out

    # --- typed views ---
    def cone(self) -> PointedCone:
        try:
            return PointedCone(np.array(self.generators, dtype=float), self.facet_normals)
        except ConeError as exc:
            raise ConfigError(f"cone: {exc}") from exc

    def measure(self):
        from .solver import DiscreteMeasure

        try:
            return DiscreteMeasure(np.array(self.directions, dtype=float), np.array(self.weights, dtype=float))
        except ValueError as exc:
            raise ConfigError(f"measure: {exc}") from exc

    def phi(self):
        try:
            return orlicz_from_spec(self.orlicz)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"orlicz: {exc}") from exc

    def hull(self) -> HullPseudoCone:
        if self.hull_directions is None:
            raise ConfigError("hull: this command needs a 'hull' section with directions and radials")
        try:
            return HullPseudoCone(self.cone(), np.array(self.hull_directions, dtype=float), self.hull_radials)
        except PseudoConeError as exc:
            raise ConfigError(f"hull: {exc}") from exc


def _req(d, key, where):
    if key not in d:
        raise ConfigError(f"{where}: missing '{key}'")
    return d[key]


def _matrix(x, where):
    try:
        a = np.array(x, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: not a numeric array") from exc
    if a.ndim != 2 or a.shape[1] < 2 or not np.all(np.isfinite(a)):
        raise ConfigError(f"{where}: expected a finite (m, n) array")
    return [[float(v) for v in row] for row in a]


def _vector(x, where):
    try:
        a = np.array(x, dtype=float).reshape(-1)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: not a numeric array") from exc
    if not np.all(np.isfinite(a)):
        raise ConfigError(f"{where}: non-finite entries")
    return [float(v) for v in a]


def config_from_dict(d: dict, base_dir=".") -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("config root must be an object")
    cone = _req(d, "cone", "config")
    gens = _matrix(_req(cone, "generators", "cone"), "cone.generators")
    facets = cone.get("facet_normals")
    if facets is not None:
        facets = _matrix(facets, "cone.facet_normals")
    meas = _req(d, "measure", "config")
    mfile = meas.get("file")
    if mfile is not None:
        path = Path(base_dir) / mfile
        if not path.is_file():
            raise ConfigError(f"measure.file: {mfile} does not exist")
        try:
            src = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"measure.file: invalid JSON ({exc})") from exc
    else:
        src = meas
    dirs = _matrix(_req(src, "directions", "measure"), "measure.directions")
    weights = _vector(_req(src, "weights", "measure"), "measure.weights")
    if len(weights) != len(dirs):
        raise ConfigError("measure: directions and weights differ in length")
    if len(dirs[0]) != len(gens[0]):
        raise ConfigError("measure.directions: dimension differs from cone")
    solver = d.get("solver", {})
    known = {"tol", "max_iters", "seed", "method", "betas", "mc_samples"}
    extra = set(solver) - known
    if extra:
        raise ConfigError(f"solver: unknown keys {sorted(extra)}")
    cfg = RunConfig(
        generators=gens,
        facet_normals=facets,
        directions=dirs,
        weights=weights,
        measure_file=mfile,
        orlicz=str(d.get("orlicz", "const")),
        tol=float(solver.get("tol", 1e-8)),
        max_iters=int(solver.get("max_iters", 5000)),
        seed=int(solver.get("seed", 0)),
        method=str(solver.get("method", "newton")),
        betas=[float(b) for b in solver.get("betas", [])],
        mc_samples=int(solver.get("mc_samples", 100000)),
    )
    if cfg.method not in ("newton", "gradient"):
        raise ConfigError("solver.method: expected 'newton' or 'gradient'")
    if not cfg.tol > 0 or cfg.max_iters < 0 or cfg.mc_samples < 0:
        raise ConfigError("solver: tol must be > 0, max_iters and mc_samples >= 0")
    if "hull" in d:
        h = d["hull"]
        cfg.hull_directions = _matrix(_req(h, "directions", "hull"), "hull.directions")
        cfg.hull_radials = _vector(_req(h, "radials", "hull"), "hull.radials")
    out = d.get("output", {})
    cfg.report_path = out.get("report")
    cfg.mesh_path = out.get("mesh")
    cfg.phi()  # validate the registry entry early
    return cfg


def load_config(path) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
    cfg = config_from_dict(d, path.parent)
    env_seed = os.environ.get("CONECURVE_SEED")
    if env_seed is not None:
        try:
            cfg.seed = int(env_seed)
        except ValueError as exc:
            raise ConfigError("CONECURVE_SEED must be an integer") from exc
    return cfg


# --- reports ----------------------------------------------------------------

def cone_dict(C: PointedCone) -> dict:
    return {"generators": C.generators, "facet_normals": C.facet_normals}


def solve_report_dict(rep, cfg: RunConfig, mc=None, timing: Optional[dict] = None) -> dict:
    """ReportFile for a SolveReport; ``mc`` is (masses, sigma) or None."""
    from .pseudocone import distance_origin

    diagnostics = {
        "kkt_residual": rep.kkt_residual,
        "entropy": rep.entropy,
        "iterations": rep.iterations,
        "converged": rep.converged,
        "message": rep.message,
        "objective_trace": rep.objective_trace,
        "delta": rep.delta,
        "distance_origin": distance_origin(rep.hull),
        "wall_ms": None,
    }
    environment = {"precision": "float64"}
    if timing:
        diagnostics["wall_ms"] = rep.wall_ms
        environment.update(timing)
    return {
        "schema_version": SCHEMA_VERSION,
        "config": cfg.to_dict(),
        "solution": {
            "directions": rep.directions,
            "radials": rep.radials,
            "cone": dict(cone_dict(rep.cone), tag="Gamma" if rep.gamma_beta is not None else "C"),
            "gamma_beta": rep.gamma_beta,
            "orlicz": rep.orlicz,
            "seed": rep.seed,
        },
        "constants": {"c": rep.c, "tau": rep.tau},
        "masses": {
            "exact": rep.masses,
            "areas": rep.areas,
            "mc": None if mc is None else mc[0],
            "mc_sigma": None if mc is None else mc[1],
        },
        "diagnostics": diagnostics,
        "environment": environment,
    }


REPORT_KEYS = ("schema_version", "config", "solution", "constants", "masses", "diagnostics")


def validate_report(d: dict) -> list:
    """Schema problems in a parsed solve report (empty when valid)."""
    problems = [f"missing key {k}" for k in REPORT_KEYS if k not in d]
    if problems:
        return problems
    for sect, keys in (
        ("solution", ("radials", "cone", "gamma_beta")),
        ("constants", ("c", "tau")),
        ("masses", ("exact", "mc", "mc_sigma")),
        ("diagnostics", ("kkt_residual", "entropy", "iterations", "wall_ms")),
    ):
        problems += [f"missing key {sect}.{k}" for k in keys if k not in d[sect]]

    def walk(x, where):
        if isinstance(x, float) and not math.isfinite(x):
            problems.append(f"non-finite value at {where}")
        elif isinstance(x, dict):
            for k, v in x.items():
                walk(v, f"{where}.{k}")
        elif isinstance(x, list):
            for i, v in enumerate(x):
                walk(v, f"{where}[{i}]")

    walk(d, "report")
    return problems


# --- mesh export ---------------------------------------------------------------

@dataclass
class Mesh:
    vertices: np.ndarray
    faces: list  # triangles, vertex indices (0-based)
    cap_faces: list  # triangles on the truncation


def truncated_mesh(K: HullPseudoCone, radius: float) -> Mesh:
    """Closed triangulation of K cut so that ∂K ∩ radius·B is reproduced exactly.

    K is represented by conv(p_i ∪ {p_i + L w_j}) with L large enough that the
    truncating faces lie outside the ball; faces touching only the far points
    form the cap group.
    """
    P = K.points
    gmax = float(np.max(K.radials))
    if not radius > gmax:
        raise ValueError(f"radius {radius!r} must exceed max g_i = {gmax!r}")
    W = K.cone.generators
    d = K.cone.axis
    L = (radius + gmax) / float(np.min(W @ d)) * 1.01
    pts = np.vstack([P] + [P + L * w for w in W])
    hull = ConvexHull(pts)
    used = np.unique(hull.simplices)
    # deterministic vertex order: lexicographic on rounded coordinates
    key = np.round(pts[used], 12)
    order = used[np.lexsort(key.T[::-1])]
    remap = {int(old): new for new, old in enumerate(order)}
    far = set(range(len(P), len(pts)))
    faces, caps = [], []
    for simplex, eq in zip(hull.simplices, hull.equations):
        a, b, c = (int(v) for v in simplex)
        # orient outward
        if np.dot(np.cross(pts[b] - pts[a], pts[c] - pts[a]), eq[:3]) < 0:
            b, c = c, b
        tri = [remap[a], remap[b], remap[c]]
        r = tri.index(min(tri))
        tri = tri[r:] + tri[:r]
        if eq[:3] @ d > 0 and {a, b, c} <= far:
            caps.append(tri)
        else:
            faces.append(tri)
    return Mesh(pts[order], sorted(faces), sorted(caps))


def write_obj(path, mesh: Mesh) -> None:
    lines = ["# truncated C-pseudo-cone", "o pseudocone"]
    for v in mesh.vertices:
        lines.append("v " + " ".join(_fmt_float(float(x)) for x in v))
    lines.append("g boundary")
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces]
    lines.append("g truncation")
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.cap_faces]
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_obj(path):
    V, F = [], []
    for line in Path(path).read_text().splitlines():
        parts = line.split()
        if not parts:
            continue
        if parts[0] == "v":
            V.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            F.append([int(x.split("/")[0]) - 1 for x in parts[1:]])
    return np.array(V), F


def edge_counts(faces) -> dict:
    counts = {}
    for f in faces:
        for k in range(len(f)):
            e = tuple(sorted((f[k], f[(k + 1) % len(f)])))
            counts[e] = counts.get(e, 0) + 1
    return counts
