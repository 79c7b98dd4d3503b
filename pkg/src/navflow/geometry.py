"""World model: quadratic goal potential, ellipsoidal obstacles, workspace shell.

Types are frozen dataclasses over read-only numpy arrays, immutable after
construction and safe to share across threads and processes.  All formulas
are dimension-generic (n >= 2).

World file format (JSON)::

    {
      "dimension": 2,
      "potential": {"Q": [[...], ...], "target": [...]},
      "workspace": {"A0": [[...], ...], "center": [...], "r0": 20.0},
      "obstacles": [{"A": [[...], ...], "center": [...], "radius": 1.0}, ...]
    }

Matrices are row-major nested lists; floats round-trip at full precision.
A JSON Schema for the format lives in ``docs/world.schema.json``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, ValidationError
from .separation import EllipsoidBody, convex_distance

SPD_SYMMETRY_RTOL = 1e-12    # relative symmetry tolerance for SPD inputs
SEPARATION_TOL = 1e-9        # minimum convex distance between obstacles


def _readonly(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


def check_spd(M: np.ndarray, name: str = "matrix") -> np.ndarray:
    """Validate symmetry (to 1e-12 relative) and strict positive definiteness."""
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError(f"{name} must be square, got shape {M.shape}")
    scale = max(float(np.abs(M).max()), 1.0)
    if float(np.abs(M - M.T).max()) > SPD_SYMMETRY_RTOL * scale:
        raise ValidationError(f"{name} is not symmetric to tolerance")
    eigs = np.linalg.eigvalsh(0.5 * (M + M.T))
    if eigs[0] <= 0.0:
        raise ValidationError(
            f"{name} is not positive definite (min eigenvalue {eigs[0]:.3e})")
    return M


def _check_dim(x: np.ndarray, n: int, what: str = "point"):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,):
        raise DimensionMismatch(f"{what} has shape {x.shape}, expected ({n},)")
    return x


@dataclass(frozen=True)
class QuadraticPotential:
    """Goal potential f0(x) = (x - target)^T Q (x - target) with SPD Q."""

    Q: np.ndarray
    target: np.ndarray
    lambda_min: float = field(init=False)
    lambda_max: float = field(init=False)

    def __post_init__(self):
        Q = check_spd(self.Q, "Q")
        target = np.asarray(self.target, dtype=float)
        if target.ndim != 1 or target.shape[0] != Q.shape[0]:
            raise DimensionMismatch("target dimension does not match Q")
        eigs = np.linalg.eigvalsh(Q)
        object.__setattr__(self, "Q", _readonly(Q))
        object.__setattr__(self, "target", _readonly(target))
        object.__setattr__(self, "lambda_min", float(eigs[0]))
        object.__setattr__(self, "lambda_max", float(eigs[-1]))

    @property
    def dimension(self) -> int:
        return self.target.shape[0]


@dataclass(frozen=True)
class Ellipsoid:
    """Obstacle {x : beta_i(x) <= 0}, beta_i = (x-c)^T A (x-c)/2 - r^2/2."""

    A: np.ndarray
    center: np.ndarray
    radius: float
    mu_min: float = field(init=False)
    mu_max: float = field(init=False)

    def __post_init__(self):
        A = check_spd(self.A, "A")
        center = np.asarray(self.center, dtype=float)
        if center.ndim != 1 or center.shape[0] != A.shape[0]:
            raise DimensionMismatch("center dimension does not match A")
        if not self.radius > 0.0:
            raise ValidationError("obstacle radius must be positive")
        eigs = np.linalg.eigvalsh(A)
        object.__setattr__(self, "A", _readonly(A))
        object.__setattr__(self, "center", _readonly(center))
        object.__setattr__(self, "radius", float(self.radius))
        object.__setattr__(self, "mu_min", float(eigs[0]))
        object.__setattr__(self, "mu_max", float(eigs[-1]))

    @property
    def dimension(self) -> int:
        return self.center.shape[0]

    def body(self) -> EllipsoidBody:
        return EllipsoidBody(self.A, self.center, self.radius)


@dataclass(frozen=True)
class Workspace:
    """Shell {x : beta_0(x) >= 0}, beta_0 = (r0^2 - (x-c)^T A0 (x-c)) / 2."""

    A0: np.ndarray
    center: np.ndarray
    r0: float

    def __post_init__(self):
        A0 = check_spd(self.A0, "A0")
        center = np.asarray(self.center, dtype=float)
        if center.ndim != 1 or center.shape[0] != A0.shape[0]:
            raise DimensionMismatch("center dimension does not match A0")
        if not self.r0 > 0.0:
            raise ValidationError("workspace radius must be positive")
        object.__setattr__(self, "A0", _readonly(A0))
        object.__setattr__(self, "center", _readonly(center))
        object.__setattr__(self, "r0", float(self.r0))

    @property
    def dimension(self) -> int:
        return self.center.shape[0]


@dataclass(frozen=True)
class World:
    """Workspace, obstacles, and goal potential; validate with validate_world."""

    workspace: Workspace
    obstacles: tuple[Ellipsoid, ...]
    potential: QuadraticPotential

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        n = self.workspace.dimension
        if self.potential.dimension != n:
            raise DimensionMismatch("potential dimension differs from workspace")
        for i, e in enumerate(self.obstacles):
            if e.dimension != n:
                raise DimensionMismatch(f"obstacle {i} dimension differs")

    @property
    def dimension(self) -> int:
        return self.workspace.dimension

    @property
    def m(self) -> int:
        return len(self.obstacles)


# ---------------------------------------------------------------------------
# evaluations
# ---------------------------------------------------------------------------

def eval_f0(p: QuadraticPotential, x) -> float:
    d = _check_dim(x, p.dimension) - p.target
    return float(d @ p.Q @ d)


def grad_f0(p: QuadraticPotential, x) -> np.ndarray:
    d = _check_dim(x, p.dimension) - p.target
    return 2.0 * (p.Q @ d)


def hess_f0(p: QuadraticPotential) -> np.ndarray:
    return 2.0 * np.array(p.Q)


def eval_beta_i(e: Ellipsoid, x) -> float:
    d = _check_dim(x, e.dimension) - e.center
    return 0.5 * float(d @ e.A @ d) - 0.5 * e.radius ** 2


def grad_beta_i(e: Ellipsoid, x) -> np.ndarray:
    d = _check_dim(x, e.dimension) - e.center
    return e.A @ d


def hess_beta_i(e: Ellipsoid) -> np.ndarray:
    return np.array(e.A)


def eval_beta0(w: Workspace, x) -> float:
    d = _check_dim(x, w.dimension) - w.center
    return 0.5 * (w.r0 ** 2 - float(d @ w.A0 @ d))


def grad_beta0(w: Workspace, x) -> np.ndarray:
    d = _check_dim(x, w.dimension) - w.center
    return -(w.A0 @ d)


def eval_beta(world: World, x) -> float:
    """Product of all obstacle functions; 1 for an empty world."""
    out = 1.0
    for e in world.obstacles:
        out *= eval_beta_i(e, x)
    return out


def bar_beta(world: World, x, i: int) -> float:
    """Product of obstacle functions with obstacle ``i`` left out."""
    if not 0 <= i < world.m:
        raise IndexError(f"obstacle index {i} out of range (m={world.m})")
    out = 1.0
    for j, e in enumerate(world.obstacles):
        if j != i:
            out *= eval_beta_i(e, x)
    return out


def in_free_space(world: World, x) -> bool:
    """Strict interior test: beta_0 > 0 and every beta_i > 0.

    The conjunctive form is used instead of the sign of the barrier
    product so that points inside an even number of overlapping regions
    can never test positive.
    """
    if eval_beta0(world.workspace, x) <= 0.0:
        return False
    return all(eval_beta_i(e, x) > 0.0 for e in world.obstacles)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    assumption: str          # "target_in_free_space" | "obstacles_disjoint" | "obstacle_in_workspace"
    indices: tuple[int, ...]
    detail: str

    def __str__(self):
        return f"{self.assumption}{list(self.indices)}: {self.detail}"


def _max_quadratic_on_ellipsoid(A0, c0, e: Ellipsoid) -> float:
    """Exact max of (x-c0)^T A0 (x-c0) over the solid ellipsoid e.

    Reduces to maximizing ||a + M u|| over the unit ball, a trust-region
    boundary problem solved through its secular equation.
    """
    L0 = np.linalg.cholesky(np.asarray(A0, float))
    # ellipsoid as {center + B u : ||u|| <= 1}, B = r * A^{-1/2}
    mu, U = np.linalg.eigh(e.A)
    B = (U * (e.radius / np.sqrt(mu))) @ U.T
    a = L0.T @ (e.center - np.asarray(c0, float))
    M = L0.T @ B
    lam, V = np.linalg.eigh(M.T @ M)
    b = V.T @ (M.T @ a)
    lam_max = lam[-1]

    def norm_u_sq(sigma):
        return float(np.sum((b / (sigma - lam)) ** 2))

    # hard case: component along the top eigenspace ~ 0
    top = np.isclose(lam, lam_max, rtol=1e-12, atol=1e-12 * max(lam_max, 1.0))
    if np.all(np.abs(b[top]) < 1e-13 * max(1.0, float(np.linalg.norm(b)))):
        rest = ~top
        base = float(np.sum((b[rest] / (lam_max - lam[rest])) ** 2)) if rest.any() else 0.0
        if base <= 1.0:
            # fill up to the sphere inside the top eigenspace
            u = np.where(rest, b / (lam_max - lam), 0.0)
            t = math.sqrt(max(1.0 - base, 0.0))
            u[np.argmax(top)] += t
            val = float(np.sum(lam * u * u) + 2.0 * np.sum(b * u) + a @ a)
            return val
    # secular solve on sigma > lam_max: ||u(sigma)|| decreasing in sigma
    lo = lam_max + 1e-300
    hi = lam_max + max(float(np.linalg.norm(b)), 1e-30) + 1.0
    while norm_u_sq(hi) > 1.0:
        hi = lam_max + (hi - lam_max) * 2.0
    lo = lam_max + max(1e-18 * max(lam_max, 1.0), 1e-300)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if norm_u_sq(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    sigma = 0.5 * (lo + hi)
    u = b / (sigma - lam)
    nu = float(np.linalg.norm(u))
    if nu > 0:
        u = u / nu
    val = float(np.sum(lam * u * u) + 2.0 * np.sum(b * u) + a @ a)
    return val


def validate_world(world: World) -> list[Violation]:
    """Check the world invariants; an empty list means all hold.

    Target strictly inside free space; obstacles pairwise disjoint by
    convex distance > 1e-9; every obstacle strictly inside the workspace.
    Violations are returned as data, never raised.
    """
    out: list[Violation] = []
    ws = world.workspace
    xstar = world.potential.target
    if eval_beta0(ws, xstar) <= 0.0:
        out.append(Violation("target_in_free_space", (),
                             "target is not strictly inside the workspace"))
    for i, e in enumerate(world.obstacles):
        if eval_beta_i(e, xstar) <= 0.0:
            out.append(Violation("target_in_free_space", (i,),
                                 f"target is inside obstacle {i}"))
    bodies = [e.body() for e in world.obstacles]
    for i in range(world.m):
        for j in range(i + 1, world.m):
            sep = convex_distance(bodies[i], bodies[j])
            if sep.distance <= SEPARATION_TOL:
                out.append(Violation(
                    "obstacles_disjoint", (i, j),
                    f"convex distance {sep.distance:.3e} <= {SEPARATION_TOL:g}"))
    for i, e in enumerate(world.obstacles):
        peak = _max_quadratic_on_ellipsoid(ws.A0, ws.center, e)
        if peak >= ws.r0 ** 2:
            out.append(Violation(
                "obstacle_in_workspace", (i,),
                f"obstacle reaches quadratic level {peak:.6g} >= r0^2"))
    return out


# ---------------------------------------------------------------------------
# world file I/O
# ---------------------------------------------------------------------------

def world_to_dict(world: World) -> dict:
    return {
        "dimension": world.dimension,
        "potential": {
            "Q": np.asarray(world.potential.Q).tolist(),
            "target": np.asarray(world.potential.target).tolist(),
        },
        "workspace": {
            "A0": np.asarray(world.workspace.A0).tolist(),
            "center": np.asarray(world.workspace.center).tolist(),
            "r0": world.workspace.r0,
        },
        "obstacles": [
            {
                "A": np.asarray(e.A).tolist(),
                "center": np.asarray(e.center).tolist(),
                "radius": e.radius,
            }
            for e in world.obstacles
        ],
    }


def world_from_dict(data: dict) -> World:
    try:
        n = int(data["dimension"])
        pot = QuadraticPotential(np.array(data["potential"]["Q"], float),
                                 np.array(data["potential"]["target"], float))
        wsd = data["workspace"]
        ws = Workspace(np.array(wsd["A0"], float),
                       np.array(wsd["center"], float), float(wsd["r0"]))
        obstacles = tuple(
            Ellipsoid(np.array(o["A"], float), np.array(o["center"], float),
                      float(o["radius"]))
            for o in data.get("obstacles", []))
    except KeyError as exc:
        raise ValidationError(f"world file is missing field {exc}") from exc
    world = World(ws, obstacles, pot)
    if world.dimension != n:
        raise ValidationError(
            f"declared dimension {n} does not match data ({world.dimension})")
    return world


def save_world(world: World, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(world_to_dict(world), fh, indent=2)
        fh.write("\n")


def load_world(path, validate: bool = True) -> World:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(
                f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: "
                f"{exc.msg}") from exc
    world = world_from_dict(data)
    if validate:
        violations = validate_world(world)
        if violations:
            msgs = "; ".join(str(v) for v in violations)
            raise ValidationError(f"{path}: invalid world: {msgs}")
    return world
