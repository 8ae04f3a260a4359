"""Pointed polyhedral cones, their duals, and the spherical caps they cut out."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np
from scipy.optimize import linprog

from .sphere import normalize, order_ccw, polygon_area, sphere_area

EPS_INT = 1e-9  # margin for strict interior tests
_FACET_TOL = 1e-10
MIN_ACCEPTANCE = 1e-4


class ConeError(ValueError):
    """Invalid cone data (rank deficient, not pointed, inconsistent facets)."""


class SamplingError(RuntimeError):
    pass


def _null_vector(rows):
    _, s, vt = np.linalg.svd(rows)
    return vt[-1], s


def _enumerate_facets(gens):
    n = gens.shape[1]
    facets = []
    for idx in combinations(range(len(gens)), n - 1):
        sub = gens[list(idx)]
        a, s = _null_vector(sub)
        if s[-1] < 1e-12 * max(s[0], 1.0):
            continue
        vals = gens @ a
        if np.all(vals >= -_FACET_TOL):
            pass
        elif np.all(vals <= _FACET_TOL):
            a = -a
        else:
            continue
        a = a / np.linalg.norm(a)
        if not any(np.linalg.norm(a - b) < 1e-9 for b in facets):
            facets.append(a)
    return np.array(facets)


def is_pointed(gens) -> bool:
    """True iff some d has <d, w> > 0 for every generator w (C ∩ -C = {0})."""
    gens = np.asarray(gens, dtype=float)
    n = gens.shape[1]
    # maximise t subject to <d, w_j> >= t, |d_k| <= 1
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A = np.hstack([-gens, np.ones((len(gens), 1))])
    res = linprog(
        c,
        A_ub=A,
        b_ub=np.zeros(len(gens)),
        bounds=[(-1, 1)] * n + [(None, 1)],
        method="highs",
    )
    return bool(res.status == 0 and -res.fun > 1e-10)


@dataclass(frozen=True, eq=False)
class PointedCone:
    """A pointed, full-dimensional polyhedral cone.

    Only extreme generators are kept; facet normals ``a_k`` are unit vectors with
    ``C = {x : <a_k, x> >= 0}``. Explicit ``facet_normals`` are checked against
    the ones recovered from the generators.
    """

    generators: np.ndarray
    facet_normals: np.ndarray = field(default=None)

    def __post_init__(self):
        gens = np.atleast_2d(np.asarray(self.generators, dtype=float))
        if gens.ndim != 2 or gens.shape[1] < 2:
            raise ConeError("generators must be an (m, n) array with n >= 2")
        norms = np.linalg.norm(gens, axis=1)
        if np.any(norms < 1e-14) or not np.all(np.isfinite(gens)):
            raise ConeError("generators must be finite and nonzero")
        gens = gens / norms[:, None]
        n = gens.shape[1]
        if np.linalg.matrix_rank(gens, tol=1e-10) < n:
            raise ConeError("generators do not span R^%d (cone has empty interior)" % n)
        if not is_pointed(gens):
            raise ConeError("cone is not pointed")
        facets = _enumerate_facets(gens)
        # keep extreme rays: generators lying on at least n-1 independent facets
        keep = []
        for j, w in enumerate(gens):
            on = facets[np.abs(facets @ w) <= 1e-9]
            if len(on) and np.linalg.matrix_rank(on, tol=1e-9) >= n - 1:
                if not any(np.linalg.norm(w - gens[k]) < 1e-12 for k in keep):
                    keep.append(j)
        if len(keep) < n:
            raise ConeError("too few extreme generators; cone data is degenerate")
        gens = gens[keep]
        if self.facet_normals is not None:
            given = normalize(np.atleast_2d(np.asarray(self.facet_normals, dtype=float)))
            if len(given) != len(facets) or not all(
                min(np.linalg.norm(facets - a, axis=1)) < 1e-8 for a in given
            ):
                raise ConeError("supplied facet normals do not match the generators")
            facets = given
        if n == 3:
            gens = gens[order_ccw(gens)]
            facets = facets[order_ccw(facets)]
        gens.setflags(write=False)
        facets.setflags(write=False)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "facet_normals", facets)

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    @cached_property
    def axis(self) -> np.ndarray:
        """Normalized sum of the generators, an interior direction."""
        return normalize(self.generators.sum(axis=0))

    @cached_property
    def dual(self) -> "PointedCone":
        return dual_cone(self)

    @cached_property
    def cap(self) -> "SphericalCap":
        return SphericalCap(self)

    def contains(self, x, strict: bool = False) -> bool:
        return contains(self, x, strict)

    def same_as(self, other: "PointedCone", tol: float = 1e-12) -> bool:
        """Equality of representations up to ordering."""
        if self.generators.shape != other.generators.shape:
            return False
        if self.facet_normals.shape != other.facet_normals.shape:
            return False
        for A, B in ((self.generators, other.generators), (self.facet_normals, other.facet_normals)):
            for a in A:
                if np.min(np.linalg.norm(B - a, axis=1)) > tol:
                    return False
        return True

    def __repr__(self):
        return f"PointedCone(dim={self.dim}, generators={len(self.generators)})"


def orthant(n: int = 3) -> PointedCone:
    return PointedCone(np.eye(n))


def dual_cone(C: PointedCone) -> PointedCone:
    """C° = {x : <x, y> <= 0 for all y in C}.

    Generators of C° are the negated facet normals of C, and its facet normals
    are the negated (extreme) generators of C.
    """
    return PointedCone(-C.facet_normals, facet_normals=-C.generators)


def contains(C: PointedCone, x, strict: bool = False) -> bool:
    x = np.asarray(x, dtype=float)
    vals = C.facet_normals @ x
    if strict:
        return bool(np.all(vals > EPS_INT))
    return bool(np.all(vals >= -EPS_INT))


def contains_many(C: PointedCone, X, strict: bool = False) -> np.ndarray:
    vals = np.asarray(X, dtype=float) @ C.facet_normals.T
    if strict:
        return np.all(vals > EPS_INT, axis=1)
    return np.all(vals >= -EPS_INT, axis=1)


def cap_polygon(C: PointedCone) -> np.ndarray:
    """Vertices of the spherical polygon cl(S^2 ∩ C), counter-clockwise."""
    if C.dim != 3:
        raise ValueError("cap polygon only exists for n = 3")
    return C.generators.copy()


def cap_area(C: PointedCone, method: str = "exact", samples: int = 10**6, seed: int = 0):
    """Spherical measure of Ω_C = S^{n-1} ∩ int C.

    ``method="exact"`` (n = 3 only) returns a float by angle excess;
    ``method="mc"`` returns ``(estimate, standard_error)``.
    """
    if method == "exact":
        if C.dim != 3:
            raise ValueError(f"exact cap area requires n = 3, got n = {C.dim}")
        return polygon_area(cap_polygon(C))
    if method == "mc":
        _, attempts = sample_cap(C, samples, seed, return_attempts=True)
        p = samples / attempts
        total = sphere_area(C.dim)
        return total * p, total * np.sqrt(p * (1.0 - p) / attempts)
    raise ValueError(f"unknown method {method!r}")


def sample_cap(C: PointedCone, count: int, seed: int = 0, return_attempts: bool = False):
    """Uniform i.i.d. samples on Ω_C by rejection from the uniform sphere.

    Deterministic for a fixed seed. With ``return_attempts`` also returns the
    number of sphere draws used, so that ``count / attempts`` is an unbiased
    estimate of the cap's share of the sphere.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    n = C.dim
    out = []
    have = 0
    attempts = 0
    batch = max(1024, 2 * count)
    while have < count:
        z = rng.standard_normal((batch, n))
        z /= np.linalg.norm(z, axis=1, keepdims=True)
        inside = contains_many(C, z, strict=True)
        idx = np.flatnonzero(inside)
        need = count - have
        if len(idx) >= need:
            attempts += int(idx[need - 1]) + 1
            out.append(z[idx[:need]])
            have = count
        else:
            attempts += batch
            out.append(z[idx])
            have += len(idx)
        if attempts >= 10**5 and have / attempts < MIN_ACCEPTANCE:
            raise SamplingError(
                f"acceptance rate {have / attempts:.2e} below {MIN_ACCEPTANCE:g}: cone too thin "
                "for rejection sampling"
            )
    X = np.concatenate(out)
    if return_attempts:
        return X, attempts
    return X


class SphericalCap:
    """The open cap Ω_C with its (cached) spherical measure."""

    def __init__(self, cone: PointedCone, samples: int = 10**6, seed: int = 0):
        self.cone = cone
        if cone.dim == 3:
            self.area = cap_area(cone)
            self.area_error = 0.0
        else:
            self.area, self.area_error = cap_area(cone, "mc", samples, seed)
        if not 0.0 < self.area < sphere_area(cone.dim):
            raise ConeError("cap area outside (0, |S^{n-1}|)")

    def __repr__(self):
        return f"SphericalCap(area={self.area:.12g})"
