"""Desk-scale stand-ins for ensembles of universal policies."""

from .arm import (
    ARM_BOX,
    ArmController,
    ArmTask,
    arm_forward_kinematics,
    arm_inverse_kinematics,
    arm_rollout,
    arm_rollout_batch,
    make_arm_ensemble,
    task_for_gap,
)
from ..evaluators import Ensemble
from .gaps import DOCUMENTED_MAGNITUDES, GAP_KINDS, GapConfig
from .landscapes import (
    BEST_MARGIN,
    LANDSCAPE_BOX,
    Landscape,
    LandscapeSpec,
    build_landscape,
    make_landscape_ensemble,
)
from .slices import grid_csv, landscape_grid_dump, slice_points

__all__ = [
    "Ensemble",
    "ARM_BOX",
    "ArmController",
    "ArmTask",
    "arm_forward_kinematics",
    "arm_inverse_kinematics",
    "arm_rollout",
    "arm_rollout_batch",
    "make_arm_ensemble",
    "task_for_gap",
    "DOCUMENTED_MAGNITUDES",
    "GAP_KINDS",
    "GapConfig",
    "BEST_MARGIN",
    "LANDSCAPE_BOX",
    "Landscape",
    "LandscapeSpec",
    "build_landscape",
    "make_landscape_ensemble",
    "grid_csv",
    "landscape_grid_dump",
    "slice_points",
]
