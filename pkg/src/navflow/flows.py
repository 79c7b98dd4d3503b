"""The three navigation vector fields and the exact barrier potential.

``phi_k`` is the order-k barrier potential f0 / (f0^k + beta_0*beta)^(1/k),
zero at the target and exactly one on the free-space boundary.  ``g_nav``
is its rescaled gradient with the workspace factor dropped, ``g_new`` the
curvature-corrected first-order field, and ``g_old`` the second-order
corrected field with a soft switch blending obstacle Hessians.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .geometry import (World, bar_beta, eval_beta, eval_beta0, eval_beta_i,
                       eval_f0, grad_beta0, grad_beta_i, grad_f0)


class FlowKind(str, Enum):
    NAV_FN = "nav"
    SECOND_ORDER = "old"
    CURVATURE_CORRECTED = "new"


@dataclass(frozen=True)
class FlowParams:
    """Tuning for the fields: order k, soft-switch scale, Hessian-blend ridge."""

    k: float
    switch_temperature: float = 0.5
    ridge: float = 1e-8

    def __post_init__(self):
        if not self.k > 0:
            raise ValueError("k must be positive")
        if not self.switch_temperature > 0:
            raise ValueError("switch_temperature must be positive")
        if self.ridge < 0:
            raise ValueError("ridge must be nonnegative")


# ---------------------------------------------------------------------------
# barrier product derivatives
# ---------------------------------------------------------------------------

def grad_beta(world: World, x) -> np.ndarray:
    """Product-rule gradient of the obstacle product beta."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(world.dimension)
    for i, e in enumerate(world.obstacles):
        out += bar_beta(world, x, i) * grad_beta_i(e, x)
    return out


def grad_barrier(world: World, x) -> np.ndarray:
    """Gradient of the full barrier product beta_0 * beta."""
    b = eval_beta(world, x)
    b0 = eval_beta0(world.workspace, x)
    return b * grad_beta0(world.workspace, x) + b0 * grad_beta(world, x)


# ---------------------------------------------------------------------------
# potential core (shared with the partial-knowledge potential)
# ---------------------------------------------------------------------------

def phi_value(f0: float, barrier: float, k: float) -> float:
    """f0 / (f0^k + barrier)^(1/k) evaluated in the log domain.

    ``barrier`` is the full product multiplying the obstacle terms (the
    workspace factor included).  Negative barrier raises DomainError; an
    exactly zero barrier is the boundary where the value is one.
    """
    if barrier < 0.0:
        raise DomainError("point is outside the closed free space")
    if f0 == 0.0:
        return 0.0
    if barrier == 0.0:
        return 1.0
    a = k * math.log(f0)
    c = math.log(barrier)
    hi = max(a, c)
    lse = hi + math.log(math.exp(a - hi) + math.exp(c - hi))
    return math.exp(math.log(f0) - lse / k)


def grad_phi_value(f0: float, gf0: np.ndarray, barrier: float,
                   gbar: np.ndarray, k: float) -> np.ndarray:
    """Gradient of phi_value: (f0^k + barrier)^(-1-1/k) (barrier*gf0 - (f0/k)*gbar).

    The scale factor is evaluated in the log domain so large k cannot
    overflow; pre: barrier > 0 (strict interior).
    """
    if barrier <= 0.0:
        raise DomainError("point is not strictly inside the free space")
    bracket = barrier * gf0 - (f0 / k) * gbar
    if f0 == 0.0:
        scale = barrier ** (-1.0 - 1.0 / k)
        return scale * bracket
    a = k * math.log(f0)
    c = math.log(barrier)
    hi = max(a, c)
    lse = hi + math.log(math.exp(a - hi) + math.exp(c - hi))
    log_scale = (-1.0 - 1.0 / k) * lse
    if log_scale < -745.0:        # exp underflows; the true gradient is ~0
        return 0.0 * bracket
    return math.exp(log_scale) * bracket


def phi_k(world: World, k: float, x) -> float:
    """Barrier potential at x; in [0, 1), one exactly on the boundary."""
    x = np.asarray(x, dtype=float)
    b0 = eval_beta0(world.workspace, x)
    if b0 < 0.0:
        raise DomainError("point is outside the workspace")
    bs = [eval_beta_i(e, x) for e in world.obstacles]
    if any(b < 0.0 for b in bs):
        raise DomainError("point is inside an obstacle")
    barrier = b0
    for b in bs:
        barrier *= b
    return phi_value(eval_f0(world.potential, x), barrier, k)


def grad_phi_k(world: World, k: float, x) -> np.ndarray:
    """Exact gradient of phi_k; requires x strictly inside the free space."""
    x = np.asarray(x, dtype=float)
    b0 = eval_beta0(world.workspace, x)
    if b0 <= 0.0 or any(eval_beta_i(e, x) <= 0.0 for e in world.obstacles):
        raise DomainError("point is not strictly inside the free space")
    barrier = b0 * eval_beta(world, x)
    return grad_phi_value(eval_f0(world.potential, x),
                          grad_f0(world.potential, x),
                          barrier, grad_barrier(world, x), k)


# ---------------------------------------------------------------------------
# the three fields
# ---------------------------------------------------------------------------

def g_nav(world: World, k: float, x) -> np.ndarray:
    """Rescaled barrier-potential descent, workspace factor omitted."""
    x = np.asarray(x, dtype=float)
    b = eval_beta(world, x)
    f0 = eval_f0(world.potential, x)
    return -b * grad_f0(world.potential, x) + (f0 / k) * grad_beta(world, x)


def g_new(world: World, k: float, x) -> np.ndarray:
    """Curvature-corrected first-order field.

    Attraction -beta*(x - target) plus center-relative repulsion
    (f0/k) * sum_i bar_beta_i * (x - center_i); no curvature estimates.
    """
    x = np.asarray(x, dtype=float)
    b = eval_beta(world, x)
    f0 = eval_f0(world.potential, x)
    rep = np.zeros(world.dimension)
    for i, e in enumerate(world.obstacles):
        rep += bar_beta(world, x, i) * (x - e.center)
    return -b * (x - world.potential.target) + (f0 / k) * rep


def switch_weight(beta_i: float, temperature: float) -> float:
    """Soft switch: one on the obstacle boundary, decaying with beta_i."""
    return math.exp(-max(beta_i, 0.0) / temperature)


def hessian_blend(world: World, params: FlowParams, x) -> np.ndarray:
    """Switch-weighted convex blend of obstacle Hessians.

    B(x) = (sum_i alpha_i A_i + ridge*I) / (sum_i alpha_i + ridge); close
    to an obstacle this is that obstacle's Hessian, far from all obstacles
    it falls back to the identity so the field stays well-scaled on the
    whole free space.
    """
    n = world.dimension
    num = params.ridge * np.eye(n)
    den = params.ridge
    for e in world.obstacles:
        a = switch_weight(eval_beta_i(e, x), params.switch_temperature)
        num += a * np.asarray(e.A)
        den += a
    return num / den


def g_old(world: World, params: FlowParams, x) -> np.ndarray:
    """Second-order corrected field using the blended obstacle Hessian."""
    x = np.asarray(x, dtype=float)
    b = eval_beta(world, x)
    f0 = eval_f0(world.potential, x)
    B = hessian_blend(world, params, x)
    corr = np.linalg.solve(B, grad_beta(world, x))
    return -b * (x - world.potential.target) + (f0 / params.k) * corr


def eval_flow(kind: FlowKind, world: World, params: FlowParams, x) -> np.ndarray:
    kind = FlowKind(kind)
    if kind is FlowKind.NAV_FN:
        return g_nav(world, params.k, x)
    if kind is FlowKind.SECOND_ORDER:
        return g_old(world, params, x)
    return g_new(world, params.k, x)
