"""Partial-knowledge navigation with a growing awareness set.

The agent only senses an obstacle once it has visited the obstacle's
c-neighborhood {x : beta_i(x) <= c}; the barrier potential is then built
from the workspace factor and the discovered obstacles only.  Discoveries
switch the potential; the discrete controller applies a switch starting
with the step after the field evaluation that triggered it (left-limit
convention).  Awareness at the start position counts from step zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .flows import grad_phi_value, phi_value
from .geometry import (World, eval_beta0, eval_beta_i, eval_f0, grad_beta0,
                       grad_beta_i, grad_f0)


@dataclass(frozen=True)
class AwarenessState:
    """Discovered obstacle indices (sorted), sensor range, and discovery log.

    ``discovered`` only ever grows; ``discovery_log`` holds one
    (step, obstacle) pair per first sighting.
    """

    discovered: tuple[int, ...]
    sensor_range_c: float
    discovery_log: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if not self.sensor_range_c > 0:
            raise ValueError("sensor range c must be positive")
        object.__setattr__(self, "discovered", tuple(sorted(self.discovered)))

    def knows(self, i: int) -> bool:
        return i in self.discovered


def make_awareness(sensor_range_c: float) -> AwarenessState:
    return AwarenessState((), sensor_range_c)


def full_awareness(world: World, sensor_range_c: float = 1.0) -> AwarenessState:
    return AwarenessState(tuple(range(world.m)), sensor_range_c,
                          tuple((0, i) for i in range(world.m)))


def update_awareness(state: AwarenessState, world: World, x,
                     step: int = 0) -> AwarenessState:
    """Add every obstacle whose c-neighborhood contains x; never removes."""
    x = np.asarray(x, dtype=float)
    fresh = [i for i, e in enumerate(world.obstacles)
             if i not in state.discovered
             and eval_beta_i(e, x) <= state.sensor_range_c]
    if not fresh:
        return state
    return AwarenessState(
        state.discovered + tuple(fresh), state.sensor_range_c,
        state.discovery_log + tuple((step, i) for i in sorted(fresh)))


def partial_beta(world: World, state: AwarenessState, x) -> float:
    """Barrier product over the workspace factor and discovered obstacles."""
    out = eval_beta0(world.workspace, x)
    for i in state.discovered:
        out *= eval_beta_i(world.obstacles[i], x)
    return out


def _partial_barrier_and_grad(world: World, state: AwarenessState, x):
    b0 = eval_beta0(world.workspace, x)
    bs = [eval_beta_i(world.obstacles[i], x) for i in state.discovered]
    if b0 <= 0.0 or any(b <= 0.0 for b in bs):
        raise DomainError("point is not strictly inside the partial free space")
    prod = 1.0
    for b in bs:
        prod *= b
    grad = prod * grad_beta0(world.workspace, x)
    for pos, i in enumerate(state.discovered):
        bar = b0
        for q, b in enumerate(bs):
            if q != pos:
                bar *= b
        grad += bar * grad_beta_i(world.obstacles[i], x)
    return b0 * prod, grad


def partial_phi_k(world: World, state: AwarenessState, k: float, x) -> float:
    """Potential built from the discovered obstacles only."""
    x = np.asarray(x, dtype=float)
    b0 = eval_beta0(world.workspace, x)
    if b0 < 0.0:
        raise DomainError("point is outside the workspace")
    barrier = b0
    for i in state.discovered:
        b = eval_beta_i(world.obstacles[i], x)
        if b < 0.0:
            raise DomainError("point is inside a discovered obstacle")
        barrier *= b
    return phi_value(eval_f0(world.potential, x), barrier, k)


def partial_grad(world: World, state: AwarenessState, k: float, x) -> np.ndarray:
    """Gradient of partial_phi_k at fixed awareness."""
    x = np.asarray(x, dtype=float)
    barrier, gbar = _partial_barrier_and_grad(world, state, x)
    return grad_phi_value(eval_f0(world.potential, x),
                          grad_f0(world.potential, x), barrier, gbar, k)


def switched_step_field(world: World, state: AwarenessState, k: float, x,
                        step: int = 0):
    """Descent field at the current awareness, then the sensor update.

    Returns (-partial_grad(state, x), updated state): an obstacle first
    sensed at x does not influence the field leaving x.
    """
    field = -partial_grad(world, state, k, x)
    return field, update_awareness(state, world, x, step)


def torque_controller(world: World, state: AwarenessState, k: float, x, v,
                      damping_gain: float = 1.0) -> np.ndarray:
    """Torque -partial_grad(x) - damping_gain * v (linear viscous damping).

    The damping term d = -c_d * v satisfies <d, v> = -c_d ||v||^2 <= 0.
    """
    if not damping_gain > 0:
        raise ValueError("damping gain must be positive")
    v = np.asarray(v, dtype=float)
    return -partial_grad(world, state, k, x) - damping_gain * v


def discovery_step_bound(world: World, sensor_range_c: float) -> float:
    """Largest step length that cannot jump an unseen c-neighborhood.

    One step changes any beta_i by at most max_i ||A_i|| * diam(workspace)
    per unit length; bounding the per-step change by c/2 gives
    eta <= c / (2 * max_i ||A_i|| * diam).
    """
    if world.m == 0:
        return float("inf")
    ws = world.workspace
    lam0 = float(np.linalg.eigvalsh(ws.A0)[0])
    diam = 2.0 * ws.r0 / np.sqrt(lam0)
    lip = max(e.mu_max for e in world.obstacles) * diam
    return sensor_range_c / (2.0 * lip)
