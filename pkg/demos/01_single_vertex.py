"""The simplest pseudo-cone: one vertex over the positive octant.

K₁ = (1,1,1) + octant has a single Gauss cell, which is the whole cap of the
dual cone, so its curvature mass is the cap area π/2. Weighting by ϕ(t)=t
multiplies it by the radial value √3. The copolar set is a Wulff shape with
one supporting plane at distance 1/√3.

    python3 demos/01_single_vertex.py
"""

import math

from conecurve import copolar, curvature_measure, distance_origin, entropy, orlicz_from_spec
from conecurve.cone import cap_area
from conecurve.fixtures import single_vertex
from conecurve.pseudocone import radial, support_bar, support_bar_wulff

K = single_vertex()
print("vertex:", K.points[0], " distance to origin:", distance_origin(K))

A = cap_area(K.cone.dual)
print(f"cap area of the dual octant: {A:.15f}  (π/2 = {math.pi / 2:.15f})")

for spec in ("const", "power:1"):
    m = curvature_measure(K, orlicz_from_spec(spec)).masses[0]
    print(f"curvature mass with ϕ = {spec:8s}: {m:.15f}")
print(f"√3·π/2 = {math.sqrt(3) * math.pi / 2:.15f}")

Ks = copolar(K)
print("copolar normals:", Ks.normals, "offsets:", Ks.offsets)

# ρ_K(u) is where the ray first enters K; h̄_K(v) = -h_K(v) for outer normals v in C°
axis = [0.57735026918962584] * 3
print("ρ at the axis:", radial(K, axis), " h̄ at minus the axis:", support_bar(K, [-x for x in axis]))
print("duality ρ_K(u)·h̄_K*(u) at the axis:", radial(K, axis) * support_bar_wulff(Ks, axis))
print("entropy:", entropy(K))
