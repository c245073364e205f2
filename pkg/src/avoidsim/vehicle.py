"""Jerk-limited planar point-mass model of the multicopter."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import WorldModel


@dataclass
class DynamicsConfig:
    jerk: float = 4.0          # rate of change of acceleration, m/s^3
    a_max: float = 5.0         # maximum horizontal acceleration, m/s^2
    v_cruise: float = 4.0      # maximum horizontal velocity, m/s
    heading_rate: float | None = None   # optional yaw rate limit, rad/s

    def __post_init__(self):
        if self.jerk <= 0 or self.a_max <= 0 or self.v_cruise <= 0:
            raise ValueError("dynamics parameters must be strictly positive")


@dataclass
class VehicleState:
    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray
    heading: float = 0.0

    @classmethod
    def at_rest(cls, position, heading: float = 0.0) -> "VehicleState":
        return cls(position=np.asarray(position, dtype=float),
                   velocity=np.zeros(2), acceleration=np.zeros(2),
                   heading=heading)

    @property
    def speed(self) -> float:
        return float(np.hypot(self.velocity[0], self.velocity[1]))


def braking_distance(v: float, cfg: DynamicsConfig) -> float:
    """Closed-form jerk-limited stopping distance from speed v.

    Triangular acceleration profile when the peak sqrt(v*jerk) stays below
    a_max, trapezoidal otherwise.
    """
    if v < 0:
        raise ValueError("speed must be non-negative")
    if v == 0.0:
        return 0.0
    j = cfg.jerk
    a = cfg.a_max
    if v <= a * a / j:
        # ramp up to peak a_p, ramp straight back down
        a_p = math.sqrt(v * j)
        t1 = a_p / j
        d1 = v * t1 - j * t1 ** 3 / 6.0
        v2 = v - a_p * a_p / (2.0 * j)
        d2 = v2 * t1 - a_p * t1 ** 2 / 2.0 + j * t1 ** 3 / 6.0
        return d1 + d2
    # ramp to a_max, hold, ramp down
    t1 = a / j
    d1 = v * t1 - j * t1 ** 3 / 6.0
    v_b = v - a * a / (2.0 * j)
    t2 = (v - a * a / j) / a
    d2 = v_b * t2 - a * t2 ** 2 / 2.0
    v_c = a * a / (2.0 * j)
    d3 = v_c * t1 - a * t1 ** 2 / 2.0 + j * t1 ** 3 / 6.0
    return d1 + d2 + d3


def stopping_speed(distance: float, cfg: DynamicsConfig) -> float:
    """Largest speed whose braking distance fits inside ``distance``
    (inverse of braking_distance, capped at v_cruise)."""
    if distance <= 0.0:
        return 0.0
    if braking_distance(cfg.v_cruise, cfg) <= distance:
        return cfg.v_cruise
    lo, hi = 0.0, cfg.v_cruise
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if braking_distance(mid, cfg) <= distance:
            lo = mid
        else:
            hi = mid
    return lo


def step_towards(state: VehicleState, setpoint, cfg: DynamicsConfig,
                 dt: float, stop_distance: float | None = None,
                 velocity_clearance: float | None = None,
                 speed_limit: float | None = None) -> VehicleState:
    """One semi-implicit integration step chasing the setpoint.

    Desired speed is the jerk-limited stopping speed for the remaining
    distance budget (the straight-line distance to the setpoint, unless the
    caller provides a larger along-path budget), capped at v_cruise.
    Acceleration is clamped to a_max and its per-step change to jerk*dt.
    When ``velocity_clearance`` (free distance straight ahead along the
    current velocity) no longer covers the stopping distance, the setpoint
    is ignored and the vehicle brakes to a stop.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    sp = np.asarray(setpoint, dtype=float)
    delta = sp - state.position
    dist = float(np.hypot(delta[0], delta[1]))
    budget = dist if stop_distance is None else max(float(stop_distance), 0.0)
    emergency = False
    if velocity_clearance is not None and state.speed > 0.0:
        # a forward-pointing acceleration must first ramp down through the
        # jerk limit before braking can begin, roughly at cruise speed
        a_fwd = max(0.0, float(state.acceleration @ state.velocity)
                    / state.speed)
        stop_dist = (state.speed * a_fwd / cfg.jerk
                     + braking_distance(state.speed, cfg))
        # the standoff keeps the vehicle from creeping right up to cells
        # it has not sensed yet; freshly sensed obstacles inflate in
        # discrete jumps and would otherwise swallow its position
        emergency = stop_dist >= velocity_clearance - 0.4
    if dist < 1e-12 or emergency:
        v_des = np.zeros(2)
    else:
        v_mag = stopping_speed(budget, cfg)
        if speed_limit is not None:
            v_mag = min(v_mag, max(0.0, speed_limit))
        if state.speed > 0.5:
            # when the setpoint lies off the current direction of travel,
            # slow down to turn instead of swinging a wide arc through
            # whatever lies beside the path
            align = float(delta @ state.velocity) / (dist * state.speed)
            v_mag = min(v_mag, max(0.15, align) * cfg.v_cruise)
        v_des = delta / dist * v_mag
    a_cmd = (v_des - state.velocity) / dt
    a_cmd = _clamp_norm(a_cmd, cfg.a_max)
    if state.speed > 0.0:
        # deceleration eases off as the speed runs out, the way the
        # jerk-limited profile behind braking_distance does: holding more
        # than sqrt(2 j v) would need an instant acceleration drop at the
        # stop, and the realized stopping distance would undercut the
        # closed form the rest of the controller plans with
        vhat_b = state.velocity / state.speed
        back = -float(a_cmd @ vhat_b)
        limit = math.sqrt(2.0 * cfg.jerk * state.speed)
        if back > limit:
            a_cmd = a_cmd + (back - limit) * vhat_b
    if velocity_clearance is not None and state.speed > 0.2:
        # keep the forward acceleration low enough that ramping it back
        # down through the jerk limit still stops inside whichever runs
        # out first: the along-path budget or the clearance dead ahead
        room = min(budget, velocity_clearance)
        margin = room - braking_distance(state.speed, cfg)
        a_fwd_max = max(0.0, margin * cfg.jerk / state.speed)
        vhat = state.velocity / state.speed
        fwd = float(a_cmd @ vhat)
        if fwd > a_fwd_max:
            a_cmd = a_cmd + (a_fwd_max - fwd) * vhat
    a_new = state.acceleration + _clamp_norm(
        a_cmd - state.acceleration, cfg.jerk * dt)
    # mostly-lateral acceleration grows |v| toward the cruise clamp even
    # when v_des is small, so cap speed growth explicitly: above the limit
    # it may only shrink
    cap = cfg.v_cruise
    if speed_limit is not None:
        cap = min(cap, max(speed_limit, state.speed))
    if emergency:
        cap = min(cap, state.speed)
    v_new = _clamp_norm(state.velocity + a_new * dt, cap)
    p_new = state.position + v_new * dt
    speed = float(np.hypot(v_new[0], v_new[1]))
    heading = state.heading
    if speed > 0.2:
        target = math.atan2(v_new[1], v_new[0])
        if cfg.heading_rate is None:
            heading = target
        else:
            err = _wrap_angle(target - heading)
            max_turn = cfg.heading_rate * dt
            heading = _wrap_angle(
                heading + max(-max_turn, min(max_turn, err)))
    return VehicleState(position=p_new, velocity=v_new,
                        acceleration=a_new, heading=heading)


def check_collision(state: VehicleState, world: WorldModel,
                    radius: float) -> bool:
    """True iff the vehicle disc touches any ground-truth obstacle
    (tangency counts as collision)."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    return world.distance(state.position) <= radius


def _clamp_norm(vec: np.ndarray, limit: float) -> np.ndarray:
    n = float(np.hypot(vec[0], vec[1]))
    if n > limit and n > 0.0:
        return vec * (limit / n)
    return vec


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi
