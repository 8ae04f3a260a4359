"""Spherical geometry on S^2: convex polygons, great-circle clipping, areas and
adaptive quadrature over spherical triangles.

All polygons handled here are convex and lie inside an open hemisphere, so every
edge is a minor arc and vertex order is counter-clockwise seen from outside.
"""

from __future__ import annotations

import numpy as np

MERGE_TOL = 1e-10


def normalize(x, axis=-1):
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x, axis=axis, keepdims=True)


def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n-1} in R^n."""
    from math import gamma, pi

    return 2.0 * pi ** (n / 2.0) / gamma(n / 2.0)


def order_ccw(points, axis=None):
    """Indices sorting unit vectors counter-clockwise around ``axis``."""
    points = np.asarray(points, dtype=float)
    if axis is None:
        axis = normalize(points.sum(axis=0))
    ref = points[0] - np.dot(points[0], axis) * axis
    if np.linalg.norm(ref) < 1e-14:
        ref = np.cross(axis, [1.0, 0.0, 0.0])
        if np.linalg.norm(ref) < 1e-8:
            ref = np.cross(axis, [0.0, 1.0, 0.0])
    e1 = normalize(ref)
    e2 = np.cross(axis, e1)
    ang = np.arctan2(points @ e2, points @ e1)
    return np.argsort(ang, kind="stable")


def merge_close(vertices, labels=None, tol=MERGE_TOL):
    """Drop consecutive vertices closer than ``tol`` (cyclically)."""
    vertices = list(vertices)
    labels = list(labels) if labels is not None else [None] * len(vertices)
    out_v, out_l = [], []
    for v, lab in zip(vertices, labels):
        if out_v and np.linalg.norm(v - out_v[-1]) < tol:
            # the surviving vertex keeps the outgoing edge of the dropped one
            out_l[-1] = lab
            continue
        out_v.append(v)
        out_l.append(lab)
    while len(out_v) > 1 and np.linalg.norm(out_v[0] - out_v[-1]) < tol:
        out_v.pop()
        out_l.pop()
    return out_v, out_l


def clip_polygon(vertices, labels, normal, label):
    """Clip a convex spherical polygon to the hemisphere ``<normal, v> >= 0``.

    ``labels[k]`` tags the edge from vertex k to vertex k+1; the edge created
    along the clipping great circle receives ``label``.
    """
    k = len(vertices)
    if k == 0:
        return [], []
    f = [float(np.dot(normal, v)) for v in vertices]
    if min(f) >= 0.0:
        return list(vertices), list(labels)
    if max(f) <= 0.0:
        return [], []
    out_v, out_l = [], []
    for a in range(k):
        b = (a + 1) % k
        P, Q = vertices[a], vertices[b]
        fp, fq = f[a], f[b]
        if fp >= 0.0:
            out_v.append(P)
            out_l.append(labels[a])
            if fq < 0.0:
                out_v.append(normalize((fp * Q - fq * P) / (fp - fq)))
                out_l.append(label)
        elif fq >= 0.0:
            out_v.append(normalize((fp * Q - fq * P) / (fp - fq)))
            out_l.append(labels[a])
    out_v, out_l = merge_close(out_v, out_l)
    if len(out_v) < 3:
        return [], []
    return out_v, out_l


def polygon_area(vertices) -> float:
    """Area of a convex spherical polygon by angle excess (Gauss-Bonnet)."""
    verts, _ = merge_close(vertices)
    k = len(verts)
    if k < 3:
        return 0.0
    V = np.asarray(verts)
    prev = np.roll(V, 1, axis=0)
    nxt = np.roll(V, -1, axis=0)
    # tangent directions at each vertex toward its neighbours
    ta = prev - np.sum(prev * V, axis=1)[:, None] * V
    tb = nxt - np.sum(nxt * V, axis=1)[:, None] * V
    cr = np.linalg.norm(np.cross(ta, tb), axis=1)
    dt = np.sum(ta * tb, axis=1)
    angles = np.arctan2(cr, dt)
    return float(max(angles.sum() - (k - 2) * np.pi, 0.0))


def triangle_solid_angle(a, b, c) -> float:
    """Van Oosterom-Strackee solid angle of the spherical triangle abc."""
    num = abs(np.dot(a, np.cross(b, c)))
    den = 1.0 + np.dot(a, b) + np.dot(b, c) + np.dot(c, a)
    return 2.0 * np.arctan2(num, den)


def fan_triangles(vertices):
    """Split a convex polygon into spherical triangles sharing vertex 0."""
    V = np.asarray(vertices, dtype=float)
    if len(V) < 3:
        return np.zeros((0, 3, 3))
    return np.stack([np.stack([V[0], V[j], V[j + 1]]) for j in range(1, len(V) - 1)])


def arc_linear_integral(u, P, Q) -> float:
    """Integral of ``<u, v>`` over the minor great arc from P to Q (arc length)."""
    c = np.clip(np.dot(P, Q), -1.0, 1.0)
    T = Q - c * P
    s = np.linalg.norm(T)
    if s < 1e-300:
        return 0.0
    T = T / s
    theta = np.arctan2(s, c)
    return float(np.dot(u, P) * np.sin(theta) + np.dot(u, T) * (1.0 - np.cos(theta)))


# --- quadrature -----------------------------------------------------------

def _duffy_rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    xi, eta = np.meshgrid(x, x, indexing="ij")
    wi, we = np.meshgrid(w, w, indexing="ij")
    a = xi.ravel()
    b = (eta * (1.0 - xi)).ravel()
    weights = (wi * we * (1.0 - xi)).ravel()
    bary = np.stack([1.0 - a - b, a, b], axis=1)
    return bary, weights


_RULE = _duffy_rule(6)


def triangle_rule(tris, func):
    """Apply the fixed Duffy-Gauss rule to each spherical triangle.

    ``tris`` has shape (N, 3, 3); ``func`` maps (N, P, 3) unit vectors to
    (N, P) values. Returns (integrals, areas) where areas are the rule applied
    to the constant 1.
    """
    bary, w = _RULE
    x = np.einsum("pk,nkd->npd", bary, tris)
    r = np.linalg.norm(x, axis=2)
    v = x / r[..., None]
    det = np.abs(np.linalg.det(tris))
    jac = det[:, None] * w[None, :] / r**3
    vals = func(v)
    return np.sum(vals * jac, axis=1), np.sum(jac, axis=1)


def subdivide(tris):
    """Split each spherical triangle into four using arc midpoints."""
    A, B, C = tris[:, 0], tris[:, 1], tris[:, 2]
    ab = normalize(A + B)
    bc = normalize(B + C)
    ca = normalize(C + A)
    kids = np.stack(
        [
            np.stack([A, ab, ca], axis=1),
            np.stack([ab, B, bc], axis=1),
            np.stack([ca, bc, C], axis=1),
            np.stack([ab, bc, ca], axis=1),
        ],
        axis=1,
    )
    return kids.reshape(-1, 3, 3)


class QuadratureError(RuntimeError):
    pass


def integrate_triangles(
    func, tris, tol=1e-9, max_depth=16, total_area=None, refine=None, refine_depth=10
):
    """Adaptively integrate ``func`` over a union of spherical triangles.

    A triangle is accepted when its rule value and the sum over its four
    children differ by at most ``tol * sqrt(area * total_area)``; the children
    sum is kept. ``refine(tris) -> bool mask`` marks triangles that must be split
    regardless (e.g. ones crossed by a kink of the integrand) until
    ``refine_depth``, where they are accepted as they stand. Triangles are
    processed level by level in a fixed order so the result is bit-stable.

    Returns ``(integral, depth_reached)``.
    """
    tris = np.asarray(tris, dtype=float).reshape(-1, 3, 3)
    if len(tris) == 0:
        return 0.0, 0
    parent, areas = triangle_rule(tris, func)
    if total_area is None:
        total_area = float(np.sum(areas))
    total = 0.0
    depth = 0
    while len(tris):
        kids = subdivide(tris)
        kv, ka = triangle_rule(kids, func)
        kv = kv.reshape(-1, 4)
        ka = ka.reshape(-1, 4)
        ksum = kv.sum(axis=1)
        err = np.abs(ksum - parent)
        ok = err <= tol * np.sqrt(np.maximum(areas, 0.0) * total_area)
        depth += 1
        if refine is not None:
            forced = refine(tris)
            if depth >= refine_depth:
                ok |= forced
            else:
                ok &= ~forced
        total += float(np.sum(ksum[ok]))
        if np.all(ok):
            break
        if depth >= max_depth:
            raise QuadratureError(
                f"adaptive quadrature did not converge within {max_depth} levels "
                f"({int(np.sum(~ok))} triangles unresolved)"
            )
        bad = ~ok
        tris = kids.reshape(-1, 4, 3, 3)[bad].reshape(-1, 3, 3)
        parent = kv[bad].ravel()
        areas = ka[bad].ravel()
    return total, depth


def rule_nodes(tris):
    """Quadrature nodes and corners of each triangle, shape (N, P + 3, 3)."""
    bary, _ = _RULE
    x = np.einsum("pk,nkd->npd", bary, tris)
    x = x / np.linalg.norm(x, axis=2, keepdims=True)
    return np.concatenate([x, tris], axis=1)
