"""Vehicle dynamics: closed-form braking distance vs numeric oracle,
jerk/accel/velocity bounds under arbitrary setpoint sequences, emergency
braking, heading, and collision checks."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from avoidsim.geometry import WorldModel, rectangle
from avoidsim.vehicle import (DynamicsConfig, VehicleState, braking_distance,
                              check_collision, step_towards, stopping_speed)

CFG = DynamicsConfig()   # jerk 4, a_max 5, v_cruise 4


class TestBrakingDistance:
    def test_matches_numeric_oracle(self):
        for v in (0.3, 1.0, 2.5, 4.0, 6.0, 6.25, 8.0):
            want = oracles.braking_distance_numeric(v, CFG.jerk, CFG.a_max)
            assert braking_distance(v, CFG) == pytest.approx(want, rel=1e-3)

    def test_profile_regimes(self):
        # v = a_max^2 / jerk = 6.25 is the triangular/trapezoidal boundary;
        # both formulas must agree there
        v_knee = CFG.a_max ** 2 / CFG.jerk
        lo = braking_distance(v_knee - 1e-9, CFG)
        hi = braking_distance(v_knee + 1e-9, CFG)
        assert lo == pytest.approx(hi, abs=1e-6)

    def test_monotone_and_zero(self):
        assert braking_distance(0.0, CFG) == 0.0
        ds = [braking_distance(v, CFG) for v in np.linspace(0.1, 10.0, 40)]
        assert all(b > a for a, b in zip(ds, ds[1:]))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            braking_distance(-1.0, CFG)


class TestStoppingSpeed:
    def test_inverse_of_braking_distance(self):
        for d in (0.05, 0.3, 1.0, 2.0, 3.5):
            v = stopping_speed(d, CFG)
            assert v < CFG.v_cruise
            assert braking_distance(v, CFG) == pytest.approx(d, rel=1e-6)

    def test_caps_at_cruise(self):
        assert stopping_speed(100.0, CFG) == CFG.v_cruise
        assert stopping_speed(0.0, CFG) == 0.0


class TestStepTowards:
    def test_accelerates_from_rest(self):
        s = VehicleState.at_rest((0.0, 0.0))
        for _ in range(200):
            s = step_towards(s, (100.0, 0.0), CFG, dt=0.02)
        assert s.speed == pytest.approx(CFG.v_cruise, abs=1e-6)
        assert s.velocity[1] == pytest.approx(0.0, abs=1e-9)

    def test_simulated_stop_matches_closed_form(self):
        # cruise at 6 m/s, then command a stop far beyond the braking
        # point: the budget-limited controller must stop within 2% of the
        # closed-form braking distance at dt = 0.01
        cfg = DynamicsConfig(v_cruise=6.0)
        s = VehicleState(position=np.zeros(2), velocity=np.array([6.0, 0.0]),
                         acceleration=np.zeros(2))
        x0 = s.position[0]
        for _ in range(3000):
            s = step_towards(s, s.position, cfg, dt=0.01, stop_distance=0.0)
            if s.speed < 1e-6:
                break
        stopped = s.position[0] - x0
        assert stopped == pytest.approx(braking_distance(6.0, cfg), rel=0.02)

    def test_speed_limit_respected(self):
        s = VehicleState.at_rest((0.0, 0.0))
        for _ in range(400):
            s = step_towards(s, (100.0, 0.0), CFG, dt=0.02, speed_limit=2.0)
            assert s.speed <= 2.0 + 1e-9

    def test_emergency_braking_on_clearance(self):
        cfg = DynamicsConfig(v_cruise=6.0)
        s = VehicleState(position=np.zeros(2), velocity=np.array([6.0, 0.0]),
                         acceleration=np.zeros(2))
        # clearance far below the stopping distance: the vehicle sheds
        # speed until its braking distance fits inside the clearance, and
        # holds that crawl (the clearance here never shrinks)
        speeds = [s.speed]
        for _ in range(500):
            s = step_towards(s, (100.0, 0.0), cfg, dt=0.02,
                             velocity_clearance=1.0)
            speeds.append(s.speed)
        settle = stopping_speed(1.0, cfg)
        assert all(v <= settle + 0.05 for v in speeds[100:])
        assert min(speeds) < 6.0 / 2

    def test_heading_follows_velocity(self):
        s = VehicleState.at_rest((0.0, 0.0))
        for _ in range(100):
            s = step_towards(s, (10.0, 10.0), CFG, dt=0.02)
        assert s.heading == pytest.approx(math.pi / 4, abs=0.05)

    def test_heading_rate_limit(self):
        cfg = DynamicsConfig(heading_rate=0.5)
        s = VehicleState(position=np.zeros(2), velocity=np.array([2.0, 0.0]),
                         acceleration=np.zeros(2), heading=0.0)
        s2 = step_towards(s, (0.0, 50.0), cfg, dt=0.02)
        assert abs(s2.heading - s.heading) <= 0.5 * 0.02 + 1e-12

    def test_dt_must_be_positive(self):
        with pytest.raises(ValueError):
            step_towards(VehicleState.at_rest((0, 0)), (1, 1), CFG, dt=0.0)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(min_value=0, max_value=2 ** 32 - 1))
    def test_bounds_under_random_setpoints(self, seed):
        """Whatever the setpoint sequence, the internal acceleration obeys
        the jerk and a_max limits and speed never exceeds v_cruise."""
        rng = np.random.default_rng(seed)
        dt = 0.02
        s = VehicleState.at_rest(rng.uniform(-5, 5, size=2))
        sp = rng.uniform(-20, 20, size=2)
        for k in range(300):
            if k % 25 == 0:
                sp = rng.uniform(-20, 20, size=2)
            limit = float(rng.uniform(0.5, 6.0)) if rng.random() < 0.3 \
                else None
            clear = float(rng.uniform(0.2, 20.0)) if rng.random() < 0.3 \
                else None
            prev = s
            s = step_towards(s, sp, CFG, dt, speed_limit=limit,
                             velocity_clearance=clear)
            da = s.acceleration - prev.acceleration
            assert float(np.hypot(*da)) <= CFG.jerk * dt + 1e-9
            assert float(np.hypot(*s.acceleration)) <= CFG.a_max + 1e-9
            assert s.speed <= CFG.v_cruise + 1e-9


class TestCheckCollision:
    def world(self):
        return WorldModel(obstacles=[rectangle(2.0, 2.0, 4.0, 4.0)],
                          bounds=(-10, -10, 10, 10))

    def test_clear_inside_touching(self):
        w = self.world()
        assert not check_collision(VehicleState.at_rest((0.0, 0.0)), w, 0.35)
        assert check_collision(VehicleState.at_rest((3.0, 3.0)), w, 0.35)
        # tangency counts: disc edge exactly on the obstacle face
        assert check_collision(VehicleState.at_rest((1.5, 3.0)), w, 0.5)
        assert not check_collision(VehicleState.at_rest((1.49, 3.0)), w, 0.5)

    def test_negative_radius_rejected(self):
        with pytest.raises(ValueError):
            check_collision(VehicleState.at_rest((0, 0)), self.world(), -0.1)
