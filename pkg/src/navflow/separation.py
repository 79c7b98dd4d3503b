"""Convex separation through support functions.

Distance between two convex bodies is computed by simplex refinement over
support points of the Minkowski difference (GJK).  Bodies are described
only by their support maps, so ellipsoids, single points, and convex hulls
of a body with an extra point all share one code path.  The solver returns
witness points on both bodies and the separating hyperplane through the
midpoint of the witness segment.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

DISTANCE_TOL = 1e-10
_ZERO_TOL = 1e-14


class EllipsoidBody:
    """Solid ellipsoid {x : (x-c)^T A (x-c) <= r^2} given by SPD A, center c, r > 0."""

    def __init__(self, A, center, radius):
        self.A = np.asarray(A, dtype=float)
        self.center = np.asarray(center, dtype=float)
        self.radius = float(radius)
        self._Ainv = np.linalg.inv(self.A)

    def support(self, d: np.ndarray) -> np.ndarray:
        """Point of the body maximizing <d, x>."""
        Ad = self._Ainv @ d
        s = np.sqrt(d @ Ad)
        if s <= 0.0:
            return self.center.copy()
        return self.center + (self.radius / s) * Ad

    def interior_point(self) -> np.ndarray:
        return self.center.copy()


class PointBody:
    """Degenerate body consisting of a single point."""

    def __init__(self, p):
        self.p = np.asarray(p, dtype=float)

    def support(self, d: np.ndarray) -> np.ndarray:
        return self.p.copy()

    def interior_point(self) -> np.ndarray:
        return self.p.copy()


class HullBody:
    """Convex hull of several bodies; support is the best member support."""

    def __init__(self, *bodies):
        if not bodies:
            raise ValueError("HullBody needs at least one body")
        self.bodies = bodies

    def support(self, d: np.ndarray) -> np.ndarray:
        pts = [b.support(d) for b in self.bodies]
        return pts[int(np.argmax([p @ d for p in pts]))]

    def interior_point(self) -> np.ndarray:
        return self.bodies[0].interior_point()


@dataclass(frozen=True)
class SeparationResult:
    """Distance with witnesses; the hyperplane bisects the witness segment."""

    distance: float
    witness_a: np.ndarray
    witness_b: np.ndarray
    normal: np.ndarray | None
    offset: float | None

    @property
    def hyperplane(self):
        return self.normal, self.offset


def _min_norm_point(simplex):
    """Minimum-norm point of the convex hull of a small point set.

    Enumerates affine subsets and keeps the best feasible barycentric
    solution; exact for the <= n+1 points GJK maintains.
    Returns (point, lambdas, kept_indices).
    """
    best = None
    npts = len(simplex)
    for size in range(1, npts + 1):
        for idx in itertools.combinations(range(npts), size):
            V = np.array([simplex[i] for i in idx])
            s = len(idx)
            if s == 1:
                lam = np.array([1.0])
            else:
                # KKT system for min ||lam @ V|| with sum(lam) = 1
                M = np.zeros((s + 1, s + 1))
                M[:s, :s] = 2.0 * (V @ V.T)
                M[:s, s] = 1.0
                M[s, :s] = 1.0
                rhs = np.zeros(s + 1)
                rhs[s] = 1.0
                try:
                    sol = np.linalg.solve(M, rhs)
                except np.linalg.LinAlgError:
                    continue
                lam = sol[:s]
                if np.any(lam < -1e-12):
                    continue
            v = lam @ V
            nv = float(v @ v)
            if best is None or nv < best[0] - 1e-18:
                best = (nv, v, np.asarray(lam), list(idx))
    return best[1], best[2], best[3]


def convex_distance(body_a, body_b, tol: float = DISTANCE_TOL,
                    max_iter: int = 10000) -> SeparationResult:
    """Euclidean distance between two convex bodies with witness points.

    Iterates support points of the Minkowski difference A - B, refining a
    simplex until the duality gap between ||v|| and the support lower bound
    drops below ``tol``.  ``distance == 0`` means the bodies touch or
    overlap, in which case no hyperplane is returned.
    """
    d0 = body_b.interior_point() - body_a.interior_point()
    if np.linalg.norm(d0) <= _ZERO_TOL:
        d0 = np.zeros_like(d0)
        d0[0] = 1.0
    pa = body_a.support(d0)
    pb = body_b.support(-d0)
    simplex = [pa - pb]
    wa = [pa]
    wb = [pb]
    for _ in range(max_iter):
        v, lam, keep = _min_norm_point(simplex)
        simplex = [simplex[i] for i in keep]
        wa = [wa[i] for i in keep]
        wb = [wb[i] for i in keep]
        nv = float(np.linalg.norm(v))
        if nv < _ZERO_TOL:
            p = sum(l * w for l, w in zip(lam, wa))
            return SeparationResult(0.0, p, p.copy(), None, None)
        pa = body_a.support(-v)
        pb = body_b.support(v)
        w = pa - pb
        lower = float(v @ w) / nv
        if nv - max(lower, 0.0) <= tol * (1.0 + nv):
            p = sum(l * x for l, x in zip(lam, wa))
            q = sum(l * x for l, x in zip(lam, wb))
            gap = q - p
            gn = np.linalg.norm(gap)
            if gn <= _ZERO_TOL:
                return SeparationResult(0.0, p, q, None, None)
            normal = gap / gn
            mid = 0.5 * (p + q)
            return SeparationResult(nv, p, q, normal, float(normal @ mid))
        simplex.append(w)
        wa.append(pa)
        wb.append(pb)
    raise ConvergenceError(
        f"convex_distance did not converge within {max_iter} iterations")
