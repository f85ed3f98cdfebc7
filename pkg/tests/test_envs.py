"""Tests for the three environments: exact dynamics, rewards, invariants."""

import math

import numpy as np
import pytest

from smoothq.envs import (GRID_ACTIONS, ActionGrid, GridState, Gridworld, MountainCar,
                          MountainCarState, Pendulum, PendulumState, grid_step,
                          mountaincar_step, pendulum_step)
from smoothq.rng import SplitMix64

FUZZ_STEPS = 100_000


class TestGridStep:
    def test_plain_move(self):
        res = grid_step(GridState(0, 0), (1, 0))
        assert res.next_state == GridState(1, 0)
        assert res.reward == -1.0
        assert not res.terminal

    def test_boundary_clamp(self):
        res = grid_step(GridState(0, 0), (-1, 0))
        assert res.next_state == GridState(0, 0)
        assert res.reward == -1.0
        assert not res.terminal

    def test_goal_arrival(self):
        res = grid_step(GridState(62, 63), (1, 0))
        assert res.next_state == GridState(63, 63)
        assert res.reward == 100.0
        assert res.terminal

    def test_deterministic(self):
        for _ in range(5):
            assert grid_step(GridState(10, 20), (0, 1)) == grid_step(GridState(10, 20), (0, 1))

    def test_fuzz_invariants(self):
        rng = SplitMix64(101)
        for _ in range(FUZZ_STEPS):
            s = GridState(rng.randrange(64), rng.randrange(64))
            a = GRID_ACTIONS[rng.randrange(4)]
            res = grid_step(s, a)
            ns = res.next_state
            assert 0 <= ns.x <= 63 and 0 <= ns.y <= 63
            at_goal = ns == GridState(63, 63)
            assert res.terminal == at_goal
            assert res.reward == (100.0 if at_goal else -1.0)

    def test_step_index_matches_typed_step(self):
        env = Gridworld(64)
        rng = SplitMix64(5)
        for _ in range(2000):
            s = GridState(rng.randrange(64), rng.randrange(64))
            a = rng.randrange(4)
            res = env.step(s, a)
            ns, r, t = env.step_index(env.state_index(s), a)
            assert ns == env.state_index(res.next_state)
            assert r == res.reward and t == res.terminal


class TestPendulumStep:
    def test_equilibrium_fixed_point(self):
        res = pendulum_step(PendulumState(0.0, 0.0), 0.0)
        assert res.next_state.theta == pytest.approx(0.0)
        assert res.next_state.omega == 0.0
        assert res.reward == 0.0
        assert not res.terminal

    def test_coasting_step(self):
        # hand evaluation of the printed update at theta=0, omega=1, u=0
        omega_expect = (1.0 - 15.0 * math.sin(0.0) + 0.0) * 0.05
        theta_expect = (0.0 + 0.05 * omega_expect + math.pi) % (2 * math.pi) - math.pi
        res = pendulum_step(PendulumState(0.0, 1.0), 0.0)
        assert res.next_state.omega == pytest.approx(omega_expect)  # 0.05
        assert res.next_state.theta == pytest.approx(theta_expect)  # 0.0025
        assert res.reward == pytest.approx(-1.0)

    def test_full_torque_step(self):
        res = pendulum_step(PendulumState(0.0, 0.0), 2.0)
        assert res.next_state.omega == pytest.approx(min(max(6.0 * 0.05, -8.0), 8.0))  # 0.3
        assert res.next_state.theta == pytest.approx(0.015)
        assert res.reward == pytest.approx(-0.004)

    def test_rejects_out_of_range_torque(self):
        with pytest.raises(ValueError):
            pendulum_step(PendulumState(0.0, 0.0), 2.0001)
        with pytest.raises(ValueError):
            pendulum_step(PendulumState(0.0, 0.0), -2.5)

    def test_standard_integrator_differs(self):
        printed = pendulum_step(PendulumState(1.0, 1.0), 0.5)
        standard = pendulum_step(PendulumState(1.0, 1.0), 0.5, standard_integrator=True)
        assert printed.next_state.omega != standard.next_state.omega
        # conventional form: omega + dt * drive
        drive = -15.0 * math.sin(1.0) + 3.0 * 0.5
        assert standard.next_state.omega == pytest.approx(1.0 + 0.05 * drive)

    def test_fuzz_invariants(self):
        rng = SplitMix64(202)
        for _ in range(FUZZ_STEPS):
            s = PendulumState(rng.uniform(-math.pi, math.pi), rng.uniform(-8.0, 8.0))
            res = pendulum_step(s, rng.uniform(-2.0, 2.0))
            assert -math.pi <= res.next_state.theta < math.pi
            assert -8.0 <= res.next_state.omega <= 8.0
            assert not res.terminal


class TestMountainCarStep:
    def test_coasting_from_valley(self):
        # hand evaluation at p=-0.5, v=0, u=0
        v_expect = -math.cos(3.0 * -0.5) / 400.0
        p_expect = -0.5 + v_expect
        res = mountaincar_step(MountainCarState(-0.5, 0.0), 0.0)
        assert res.next_state.v == pytest.approx(v_expect)  # about -1.76843e-4
        assert res.next_state.p == pytest.approx(p_expect)  # about -0.500177
        assert res.reward == pytest.approx(20.0 * p_expect)  # about -10.00354
        assert not res.terminal

    def test_goal_crossing(self):
        res = mountaincar_step(MountainCarState(0.449, 0.07), 0.0)
        assert res.next_state.p >= 0.45
        assert res.reward == 100.0
        assert res.terminal

    def test_clamps_at_left_wall(self):
        res = mountaincar_step(MountainCarState(-1.2, -0.07), -1.0)
        assert res.next_state.v >= -0.07
        assert res.next_state.p >= -1.2

    def test_rejects_out_of_range_action(self):
        with pytest.raises(ValueError):
            mountaincar_step(MountainCarState(0.0, 0.0), 1.01)

    def test_fuzz_invariants(self):
        rng = SplitMix64(303)
        for _ in range(FUZZ_STEPS):
            s = MountainCarState(rng.uniform(-1.2, 0.6), rng.uniform(-0.07, 0.07))
            res = mountaincar_step(s, rng.uniform(-1.0, 1.0))
            ns = res.next_state
            assert -1.2 <= ns.p <= 0.6
            assert -0.07 <= ns.v <= 0.07
            assert res.terminal == (ns.p >= 0.45)


class TestActionGrid:
    def test_pendulum_endpoints(self):
        grid = ActionGrid(-2.0, 2.0, 64)
        assert grid.level(0) == -2.0
        assert grid.level(63) == 2.0

    def test_mountaincar_mid_level(self):
        grid = ActionGrid(-1.0, 1.0, 64)
        assert grid.level(31) == pytest.approx(-1.0 + 62.0 / 63.0)

    def test_levels_match_formula(self):
        grid = ActionGrid(-2.0, 2.0, 64)
        for i in range(64):
            assert grid.level(i) == pytest.approx(-2.0 + 4.0 / 63.0 * i)

    def test_index_out_of_range(self):
        grid = ActionGrid(-2.0, 2.0, 64)
        with pytest.raises(IndexError):
            grid.level(64)
        with pytest.raises(IndexError):
            grid.level(-1)

    def test_needs_two_levels(self):
        with pytest.raises(ValueError):
            ActionGrid(0.0, 1.0, 1)


class TestEncoding:
    def test_grid_origin(self):
        env = Gridworld(64)
        np.testing.assert_allclose(env.encode(GridState(0, 0)), [0.0, 0.0])

    def test_pendulum_unit_circle(self):
        env = Pendulum()
        np.testing.assert_allclose(env.encode(PendulumState(0.0, 8.0)), [1.0, 0.0, 1.0])

    def test_mountaincar_affine_map(self):
        env = MountainCar()
        np.testing.assert_allclose(env.encode(MountainCarState(0.6, 0.0)), [1.0, 0.0])

    def test_components_bounded(self):
        rng = SplitMix64(404)
        grid, pend, car = Gridworld(64), Pendulum(), MountainCar()
        for _ in range(2000):
            f = grid.encode(GridState(rng.randrange(64), rng.randrange(64)))
            assert np.all(f >= -1.0) and np.all(f <= 1.0)
            f = pend.encode(PendulumState(rng.uniform(-math.pi, math.pi), rng.uniform(-8, 8)))
            assert np.all(f >= -1.0) and np.all(f <= 1.0)
            f = car.encode(MountainCarState(rng.uniform(-1.2, 0.6), rng.uniform(-0.07, 0.07)))
            assert np.all(f >= -1.0) and np.all(f <= 1.0)


class TestReset:
    def test_grid_reset_is_origin(self):
        env = Gridworld(64)
        for _ in range(5):
            assert env.reset(SplitMix64(0)) == GridState(0, 0)

    def test_pendulum_reset_in_range(self):
        env = Pendulum()
        rng = SplitMix64(1)
        for _ in range(1000):
            s = env.reset(rng)
            assert -math.pi <= s.theta < math.pi
            assert -1.0 <= s.omega < 1.0

    def test_mountaincar_reset_in_range(self):
        env = MountainCar()
        rng = SplitMix64(2)
        for _ in range(1000):
            s = env.reset(rng)
            assert -0.6 <= s.p < -0.4
            assert s.v == 0.0

    def test_same_seed_same_resets(self):
        env = Pendulum()
        rng = SplitMix64(9)
        seq1 = [env.reset(rng) for _ in range(10)]
        rng = SplitMix64(9)
        seq2 = [env.reset(rng) for _ in range(10)]
        assert seq1 == seq2
