"""Regenerate the JSON configs used by the demos and the CLI tests.

    python3 demos/make_configs.py
"""

from pathlib import Path

import numpy as np

from conecurve.fixtures import five_vertex, interior_directions
from conecurve.cone import orthant
from conecurve.io import write_json
from conecurve.sphere import normalize

OUT = Path(__file__).parent / "configs"
OCTANT = np.eye(3).tolist()


def solver(**kw):
    base = {"tol": 1e-8, "max_iters": 5000, "seed": 0, "method": "newton", "betas": [], "mc_samples": 100000}
    base.update(kw)
    return base


def main():
    u1 = normalize(np.ones(3))
    write_json(OUT / "single_vertex.json", {
        "cone": {"generators": OCTANT},
        "measure": {"directions": [u1], "weights": [1.0]},
        "orlicz": "const",
        "solver": solver(),
        "hull": {"directions": [u1], "radials": [np.sqrt(3.0)]},
    })

    rng = np.random.default_rng(2024)
    U = interior_directions(orthant(3), 20, rng)
    w = rng.uniform(0.5, 2.0, 20)
    write_json(OUT / "random20.json", {
        "cone": {"generators": OCTANT},
        "measure": {"directions": U, "weights": w},
        "orlicz": "power:1",
        "solver": solver(tol=1e-7),
    })

    # axis plus the coordinate-permutation orbit of (2, 1, 1)
    orbit = normalize(np.array([[1.0, 1, 1], [2, 1, 1], [1, 2, 1], [1, 1, 2]]))
    write_json(OUT / "symmetric_octant.json", {
        "cone": {"generators": OCTANT},
        "measure": {"directions": orbit, "weights": [1.0, 1.0, 1.0, 1.0]},
        "orlicz": "power:1",
        "solver": solver(tol=1e-8, betas=[0.05, 0.1]),
    })

    a = 0.4
    square = normalize(np.array([[a, 0, 1], [0, a, 1], [-a, 0, 1], [0, -a, 1]]))
    write_json(OUT / "square_orbit.json", {
        "cone": {"generators": [[1.0, 0, 1], [0, 1.0, 1], [-1.0, 0, 1], [0, -1.0, 1]]},
        "measure": {"directions": square, "weights": [1.0, 1.0, 1.0, 1.0]},
        "orlicz": "const",
        "solver": solver(),
    })

    K = five_vertex()
    write_json(OUT / "five_vertex.json", {
        "cone": {"generators": OCTANT},
        "measure": {"directions": K.directions, "weights": [1.0] * K.size},
        "orlicz": "power:1",
        "solver": solver(mc_samples=1000000),
        "hull": {"directions": K.directions, "radials": K.radials},
    })


if __name__ == "__main__":
    main()
