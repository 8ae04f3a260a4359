"""Write solved pseudo-cones as truncated OBJ meshes.

The mesh reproduces ∂K inside the ball of the chosen radius; the faces in the
``truncation`` group close it off far away. Every edge is shared by exactly
two triangles.

    python3 demos/04_export_mesh.py      # writes demos/out/*.obj
"""

from pathlib import Path

from conecurve.fixtures import single_vertex
from conecurve.io import edge_counts, load_config, truncated_mesh, write_obj
from conecurve.solver import SolverOptions, solve_compact

OUT = Path(__file__).parent / "out"

meshes = {"single_vertex": (single_vertex(), 10.0)}
cfg = load_config(Path(__file__).parent / "configs" / "random20.json")
rep = solve_compact(cfg.cone(), cfg.measure(), cfg.phi(), SolverOptions(tol=cfg.tol))
meshes["random20"] = (rep.hull, 3.0 * rep.radials.max())

for name, (K, radius) in meshes.items():
    mesh = truncated_mesh(K, radius)
    path = OUT / f"{name}.obj"
    write_obj(path, mesh)
    closed = all(c == 2 for c in edge_counts(mesh.faces + mesh.cap_faces).values())
    print(f"{path}: {len(mesh.vertices)} vertices, {len(mesh.faces)} boundary + "
          f"{len(mesh.cap_faces)} truncation triangles, closed={closed}")
