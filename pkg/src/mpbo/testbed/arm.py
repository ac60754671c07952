"""Two-link planar arm tracking task driven by a length-conditioned controller.

The controller solves inverse kinematics for the link lengths it is *told*
the arm has (the virtual input), then servos the true arm toward that
solution. Gaps act on the true arm: joint zero offsets (kinematic), reduced
actuator authority (dynamic) and end-effector drag (environment). All
routines are vectorized over a batch of virtual inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..evaluators import Ensemble, PolicyEvaluator
from ..gp import ConfigurationError, ParamBox
from ..rng import make_stream
from .gaps import GapConfig

__all__ = [
    "ArmTask",
    "ArmController",
    "arm_forward_kinematics",
    "arm_inverse_kinematics",
    "arm_rollout",
    "arm_rollout_batch",
    "task_for_gap",
    "make_arm_ensemble",
    "ARM_BOX",
    "DEFAULT_TRAJECTORY",
]

DT = 0.02  # 50 Hz control
D_REF = 0.5  # metres; distance at which a target stops paying reward
HOME = (0.0, 1.2)  # joint angles at the start of every rollout
DRAG_COUPLING = 1.0  # per-step slowdown is 1 / (1 + coupling * drag)
ANGLE_BIAS = 0.15  # rad, bound on the per-policy habit
ARM_BOX = ParamBox.uniform(2)
DEFAULT_TRAJECTORY = ((1.3, 0.5), (0.6, 1.2), (1.1, -0.6))


@dataclass(frozen=True)
class ArmTask:
    true_lengths: tuple[float, float] = (1.0, 1.0)
    joint_offsets: tuple[float, float] = (0.0, 0.0)
    torque_scale: float = 1.0
    drag: float = 0.0
    trajectory: tuple = DEFAULT_TRAJECTORY
    steps_per_target: int = 50
    margin: float = 0.05

    def __post_init__(self):
        if min(self.true_lengths) <= 0:
            raise ConfigurationError("link lengths must be positive")
        if not 0.0 < self.torque_scale <= 1.0:
            raise ConfigurationError("torque_scale must lie in (0, 1]")
        if self.drag < 0:
            raise ConfigurationError("drag must be non-negative")
        if self.steps_per_target < 1:
            raise ConfigurationError("steps_per_target must be positive")
        reach = sum(self.true_lengths) - self.margin
        for target in self.trajectory:
            if np.hypot(*target) > reach:
                raise ConfigurationError(f"target {target} is out of reach ({reach:.3f} m)")


@dataclass(frozen=True)
class ArmController:
    """Proportional joint servo plus the map from virtual input to assumed lengths.

    ``assumed = 1.0 + length_scale * (virtual - 1.0) + length_bias`` (metres);
    the defaults make the assumed lengths equal the virtual input.
    """

    gain: float = 25.0  # 1/s
    max_joint_speed: float = 3.0  # rad/s, bound on the joint-velocity norm
    length_scale: tuple[float, float] = (1.0, 1.0)
    length_bias: tuple[float, float] = (0.0, 0.0)
    angle_bias: tuple[float, float] = (0.0, 0.0)  # rad, added to every IK solution

    def assumed_lengths(self, virtual: np.ndarray) -> np.ndarray:
        out = 1.0 + np.asarray(self.length_scale) * (virtual - 1.0) + np.asarray(self.length_bias)
        return np.maximum(out, 0.05)


def arm_forward_kinematics(lengths, joint_angles) -> np.ndarray:
    L = np.asarray(lengths, dtype=float)
    q = np.asarray(joint_angles, dtype=float)
    if np.any(L <= 0):
        raise ConfigurationError("link lengths must be positive")
    q1, q12 = q[..., 0], q[..., 0] + q[..., 1]
    x = L[..., 0] * np.cos(q1) + L[..., 1] * np.cos(q12)
    y = L[..., 0] * np.sin(q1) + L[..., 1] * np.sin(q12)
    return np.stack([x, y], axis=-1)


def arm_inverse_kinematics(target, lengths) -> np.ndarray:
    """Elbow-positive closed-form IK; unreachable targets clamp the elbow."""
    t = np.asarray(target, dtype=float)
    L = np.asarray(lengths, dtype=float)
    l1, l2 = L[..., 0], L[..., 1]
    x, y = t[..., 0], t[..., 1]
    c2 = np.clip((x * x + y * y - l1 * l1 - l2 * l2) / (2.0 * l1 * l2), -1.0, 1.0)
    q2 = np.arccos(c2)
    q1 = np.arctan2(y, x) - np.arctan2(l2 * np.sin(q2), l1 + l2 * np.cos(q2))
    return np.stack(np.broadcast_arrays(q1, q2), axis=-1)


def arm_rollout_batch(task: ArmTask, virtual_lengths, controller: ArmController | None = None) -> np.ndarray:
    """Total tracking reward for each row of ``virtual_lengths``."""
    ctrl = controller or ArmController()
    V = np.atleast_2d(np.asarray(virtual_lengths, dtype=float))
    if V.shape[1] != 2:
        raise ConfigurationError("virtual lengths must have two columns")
    assumed = ctrl.assumed_lengths(V)
    true_L = np.asarray(task.true_lengths, dtype=float)
    offsets = np.asarray(task.joint_offsets, dtype=float)
    step_gain = ctrl.gain * DT
    max_step = ctrl.max_joint_speed * DT
    authority = task.torque_scale / (1.0 + DRAG_COUPLING * task.drag)

    q = np.tile(np.asarray(HOME, dtype=float), (len(V), 1))
    reward = np.zeros(len(V))
    for target in task.trajectory:
        target = np.asarray(target, dtype=float)
        goal = arm_inverse_kinematics(target, assumed) + np.asarray(ctrl.angle_bias) + offsets
        for _ in range(task.steps_per_target):
            dq = step_gain * (goal - q)
            norm = np.linalg.norm(dq, axis=1, keepdims=True)
            dq *= np.minimum(1.0, max_step / np.maximum(norm, 1e-300))
            q = q + authority * dq
        dist = np.linalg.norm(arm_forward_kinematics(true_L, q) - target, axis=1)
        reward += np.maximum(0.0, 1.0 - dist / D_REF)
    return reward


def arm_rollout(task: ArmTask, virtual_lengths, controller: ArmController | None = None) -> float:
    v = ARM_BOX.check(virtual_lengths)
    return float(arm_rollout_batch(task, v[None, :], controller)[0])


def task_for_gap(gap: GapConfig, **overrides) -> ArmTask:
    m = gap.magnitude
    if gap.kind == "kinematic":
        overrides.setdefault("joint_offsets", (m, -0.5 * m))
    elif gap.kind == "dynamic":
        overrides.setdefault("torque_scale", 1.0 - m)
    elif gap.kind == "environment":
        overrides.setdefault("drag", 2.0 * m)
    return ArmTask(**overrides)


def _grid(resolution: int) -> np.ndarray:
    axis = np.linspace(0.5, 1.5, resolution)
    X, Y = np.meshgrid(axis, axis)
    return np.column_stack([X.ravel(), Y.ravel()])


def make_arm_ensemble(M: int, gap: GapConfig, master_seed: int, task: ArmTask | None = None,
                      grid_resolution: int = 101) -> Ensemble:
    """``M`` arm controllers that differ in gain and in how they read the virtual input.

    The arm is deterministic, so the ground-truth best policy and optima come
    from a ``grid_resolution`` x ``grid_resolution`` search over virtual lengths.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    task = task or task_for_gap(gap)
    grid = _grid(grid_resolution)
    policies, optima = [], []
    for j in range(M):
        rng = make_stream(master_seed, "arm-policy", j)
        ctrl = ArmController(
            gain=float(rng.uniform(18.0, 32.0)),
            length_scale=tuple(float(v) for v in rng.uniform(0.35, 0.6, 2)),
            length_bias=tuple(float(v) for v in rng.uniform(-0.1, 0.1, 2)),
            angle_bias=tuple(float(v) for v in rng.uniform(-ANGLE_BIAS, ANGLE_BIAS, 2)),
        )

        def fn(P, _c=ctrl):
            return arm_rollout_batch(task, P, _c)

        policies.append(PolicyEvaluator(j, fn, ARM_BOX))
        values = fn(grid)
        k = int(np.argmax(values))
        optima.append((grid[k].copy(), float(values[k])))
    best = int(np.argmax([v for _, v in optima]))
    return Ensemble(policies, best, optima, ARM_BOX)
