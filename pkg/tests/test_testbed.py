import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpbo.evaluators import CountingEvaluator, PolicyEvaluator
from mpbo.gp import ConfigurationError, ParamBox
from mpbo.testbed import (
    ARM_BOX,
    BEST_MARGIN,
    ArmController,
    ArmTask,
    GapConfig,
    arm_forward_kinematics,
    arm_inverse_kinematics,
    arm_rollout,
    arm_rollout_batch,
    grid_csv,
    landscape_grid_dump,
    make_arm_ensemble,
    make_landscape_ensemble,
    slice_points,
    task_for_gap,
)

KINDS = ("kinematic", "dynamic", "environment")


def dense_grid(step=2):
    # every other node of the 51^4 grid over the box
    axis = np.linspace(0.5, 1.5, 51)[::step]
    return np.stack(np.meshgrid(axis, axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 4)


def arm_grid(resolution=101):
    axis = np.linspace(0.5, 1.5, resolution)
    X, Y = np.meshgrid(axis, axis)
    return np.column_stack([X.ravel(), Y.ravel()])


class TestGapConfig:
    def test_none_ignores_magnitude(self):
        assert GapConfig("none", 7.0).magnitude == 0.0

    @pytest.mark.parametrize("kind,magnitude", [("kinematic", 0.6), ("dynamic", -0.1), ("environment", 1.5)])
    def test_out_of_range(self, kind, magnitude):
        with pytest.raises(ConfigurationError):
            GapConfig(kind, magnitude)

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError):
            GapConfig("thermal", 0.1)

    def test_documented(self):
        assert GapConfig.documented("kinematic").magnitude == 0.3
        assert GapConfig.documented("none").magnitude == 0.0


class TestLandscapes:
    def test_no_gap_optimum_near_nominal(self):
        grid = dense_grid()
        for seed in range(5):
            ens = make_landscape_ensemble(3, GapConfig("none"), seed)
            for p in ens.policies:
                best = grid[int(np.argmax(p.mean(grid)))]
                assert np.max(np.abs(best - 1.0)) <= 0.1

    def test_environment_gap_drops_nominal(self):
        grid = dense_grid()
        for seed in range(5):
            ens = make_landscape_ensemble(3, GapConfig("environment", 0.5), seed)
            for p in ens.policies:
                nominal = p.mean(ens.box.nominal[None, :])[0]
                assert nominal <= p.mean(grid).max() - 0.3

    def test_designed_best_margin(self):
        for seed in range(10):
            ens = make_landscape_ensemble(3, GapConfig.documented("dynamic"), seed)
            tops = [v for _, v in ens.optima]
            others = [v for j, v in enumerate(tops) if j != ens.best_policy]
            assert tops[ens.best_policy] == pytest.approx(max(others) + BEST_MARGIN)
            for p, (x, v) in zip(ens.policies, ens.optima):
                assert p.mean(x[None, :])[0] == pytest.approx(v, abs=1e-12)

    def test_same_seed_same_outputs(self):
        probes = np.random.default_rng(0).uniform(0.5, 1.5, (100, 4))
        for kind in KINDS:
            a = make_landscape_ensemble(3, GapConfig.documented(kind), 8)
            b = make_landscape_ensemble(3, GapConfig.documented(kind), 8)
            for pa, pb in zip(a.policies, b.policies):
                assert [pa(x) for x in probes] == [pb(x) for x in probes]

    def test_different_seeds_differ(self):
        probes = np.random.default_rng(1).uniform(0.5, 1.5, (100, 4))
        a = make_landscape_ensemble(3, GapConfig.documented("kinematic"), 1)
        b = make_landscape_ensemble(3, GapConfig.documented("kinematic"), 2)
        assert not np.allclose(a.policies[0].mean(probes), b.policies[0].mean(probes))

    def test_outputs_finite(self):
        probes = np.random.default_rng(2).uniform(0.5, 1.5, (10_000, 4))
        for kind in ("none",) + KINDS:
            for p in make_landscape_ensemble(3, GapConfig.documented(kind), 3).policies:
                assert np.all(np.isfinite(p.mean(probes)))
                assert np.all(np.isfinite(p.averaged(probes, 3)))

    def test_reset_rewinds_noise(self):
        p = make_landscape_ensemble(1, GapConfig("none"), 0).policies[0]
        x = np.full(4, 1.1)
        first = [p(x) for _ in range(5)]
        p.reset()
        assert [p(x) for _ in range(5)] == first
        assert len(set(first)) == 5

    def test_evaluator_rejects_points_outside_box(self):
        p = make_landscape_ensemble(1, GapConfig("none"), 0).policies[0]
        with pytest.raises(ConfigurationError):
            p(np.full(4, 1.6))


class TestArm:
    def test_forward_kinematics(self):
        np.testing.assert_allclose(arm_forward_kinematics((1, 1), (0, 0)), [2, 0], atol=1e-15)
        np.testing.assert_allclose(arm_forward_kinematics((1, 1), (math.pi / 2, 0)), [0, 2], atol=1e-15)
        # cos 45 + 0.5 cos 135, sin 45 + 0.5 sin 135
        s = math.sqrt(0.5)
        np.testing.assert_allclose(arm_forward_kinematics((1, 0.5), (math.pi / 4, math.pi / 2)),
                                   [s - 0.5 * s, s + 0.5 * s], atol=1e-15)

    @settings(max_examples=100)
    @given(st.floats(0.3, 1.5), st.floats(0.3, 1.5), st.floats(0.05, 0.99), st.floats(-math.pi, math.pi))
    def test_inverse_round_trip(self, l1, l2, frac, angle):
        lo, hi = abs(l1 - l2), l1 + l2
        r = lo + 0.01 + frac * (hi - lo - 0.02)
        target = np.array([r * math.cos(angle), r * math.sin(angle)])
        q = arm_inverse_kinematics(target, (l1, l2))
        assert q[1] >= 0.0
        np.testing.assert_allclose(arm_forward_kinematics((l1, l2), q), target, atol=1e-9)

    def test_unreachable_target_clamps(self):
        q = arm_inverse_kinematics((5.0, 0.0), (1.0, 1.0))
        np.testing.assert_allclose(q, [0.0, 0.0], atol=1e-12)

    def test_empty_trajectory(self):
        assert arm_rollout(ArmTask(trajectory=()), [1.0, 1.0]) == 0.0

    def test_no_gap_true_lengths_are_optimal(self):
        task = ArmTask(trajectory=((1.3, 0.5),))
        nominal = arm_rollout(task, [1.0, 1.0])
        assert nominal == pytest.approx(arm_rollout_batch(task, arm_grid()).max(), abs=1e-6)

    def test_kinematic_offset_rewards_adaptation(self):
        task = ArmTask(joint_offsets=(0.2, -0.1))
        assert arm_rollout_batch(task, arm_grid()).max() >= arm_rollout(task, [1.0, 1.0]) + 0.05

    def test_gap_monotonicity(self):
        # default controller servoing to the nominal-input IK solution
        drag = [arm_rollout(ArmTask(drag=d), [1.0, 1.0]) for d in np.linspace(0.0, 2.0, 21)]
        torque = [arm_rollout(ArmTask(torque_scale=s), [1.0, 1.0]) for s in np.linspace(1.0, 0.1, 21)]
        assert all(b <= a + 1e-12 for a, b in zip(drag, drag[1:]))
        assert all(b <= a + 1e-12 for a, b in zip(torque, torque[1:]))
        assert drag[-1] < drag[0] and torque[-1] < torque[0]

    def test_task_validation(self):
        with pytest.raises(ConfigurationError):
            ArmTask(trajectory=((2.0, 0.0),))
        with pytest.raises(ConfigurationError):
            ArmTask(torque_scale=0.0)
        with pytest.raises(ConfigurationError):
            arm_rollout(ArmTask(), [1.0, 2.0])

    def test_task_for_gap(self):
        assert task_for_gap(GapConfig("kinematic", 0.2)).joint_offsets == (0.2, -0.1)
        assert task_for_gap(GapConfig("dynamic", 0.5)).torque_scale == 0.5
        assert task_for_gap(GapConfig("environment", 0.5)).drag == 1.0
        assert task_for_gap(GapConfig("none")) == ArmTask()

    def test_ensemble_ground_truth_and_determinism(self):
        a = make_arm_ensemble(3, GapConfig.documented("kinematic"), 4, grid_resolution=21)
        b = make_arm_ensemble(3, GapConfig.documented("kinematic"), 4, grid_resolution=21)
        probes = np.random.default_rng(0).uniform(0.5, 1.5, (50, 2))
        for pa, pb, (x, v) in zip(a.policies, b.policies, a.optima):
            assert [pa(p) for p in probes] == [pb(p) for p in probes]
            assert pa.mean(arm_grid(21)).max() == v
        assert a.best_policy == int(np.argmax([v for _, v in a.optima]))

    def test_outputs_finite(self):
        probes = np.random.default_rng(5).uniform(0.5, 1.5, (10_000, 2))
        for kind in KINDS:
            ctrl = ArmController(length_scale=(0.4, 0.5), angle_bias=(0.1, -0.1))
            assert np.all(np.isfinite(arm_rollout_batch(task_for_gap(GapConfig.documented(kind)), probes, ctrl)))


class TestSlices:
    def test_constant_evaluator(self):
        p = PolicyEvaluator(0, lambda P: np.full(len(P), 2.5), ParamBox.uniform(4))
        rows = landscape_grid_dump(p, 4)
        assert {r for _, _, r in rows} == {2.5}

    def test_row_count_and_order(self):
        p = PolicyEvaluator(0, lambda P: P[:, 0] + 10 * P[:, 2], ParamBox.uniform(4))
        rows = landscape_grid_dump(p, 3)
        assert len(rows) == 9
        assert [(x, y) for x, y, _ in rows[:4]] == [(0.5, 0.5), (1.0, 0.5), (1.5, 0.5), (0.5, 1.0)]
        assert all(r == pytest.approx(x + 10 * y) for x, y, r in rows)

    def test_fallback_for_plain_callables(self):
        counter = CountingEvaluator(PolicyEvaluator(0, lambda P: P.sum(axis=1), ARM_BOX))
        rows = landscape_grid_dump(counter, 2, n_eval=3)
        assert counter.calls == 12
        assert [r for _, _, r in rows] == pytest.approx([1.0, 2.0, 2.0, 3.0])

    def test_slice_points_bad_input(self):
        with pytest.raises(ValueError):
            slice_points(1, 4)
        with pytest.raises(ValueError):
            slice_points(5, 3)

    def test_no_gap_argmax_within_one_cell(self):
        # noise-free, so the grid shows the construction itself
        for seed in range(10):
            ens = make_landscape_ensemble(3, GapConfig("none"), seed, noise_std=0.0)
            for p, (c, _) in zip(ens.policies, ens.optima):
                rows = np.array(landscape_grid_dump(p, 51))
                x, y, _ = rows[int(np.argmax(rows[:, 2]))]
                assert abs(x - 0.5 * (c[0] + c[1])) <= 0.02 + 1e-12
                assert abs(y - 0.5 * (c[2] + c[3])) <= 0.02 + 1e-12

    def test_csv_format(self):
        text = grid_csv([(0.5, 1.0, 1 / 3), (1.0, 1.0, 12345.6789012)])
        assert text.splitlines() == ["x,y,reward", "0.5,1,0.333333333", "1,1,12345.6789"]
