from __future__ import annotations

from dataclasses import dataclass

from ..gp import ConfigurationError

__all__ = ["GapConfig", "GAP_KINDS", "GAP_RANGES", "DOCUMENTED_MAGNITUDES"]

GAP_KINDS = ("none", "kinematic", "dynamic", "environment")

# Admissible magnitude per kind. Units:
#   kinematic   - joint zero-offset in radians (arm: shoulder gets m, elbow -m/2)
#   dynamic     - fraction of actuator authority lost (arm: torque_scale = 1 - m)
#   environment - resistance of the surroundings (arm: drag = 2 m  N*s/m)
GAP_RANGES = {
    "kinematic": (0.0, 0.5),
    "dynamic": (0.0, 0.9),
    "environment": (0.0, 1.0),
}

# Magnitudes at which the benchmark suite and the landscape figures are run.
DOCUMENTED_MAGNITUDES = {
    "kinematic": 0.3,
    "dynamic": 0.5,
    "environment": 0.5,
}


@dataclass(frozen=True)
class GapConfig:
    """A perturbation separating the training setting from a target setting."""

    kind: str = "none"
    magnitude: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in GAP_KINDS:
            raise ConfigurationError(f"unknown gap kind {self.kind!r}; expected one of {GAP_KINDS}")
        if self.kind == "none":
            # magnitude carries no meaning without a gap
            object.__setattr__(self, "magnitude", 0.0)
            return
        lo, hi = GAP_RANGES[self.kind]
        if not lo <= self.magnitude <= hi:
            raise ConfigurationError(
                f"{self.kind} gap magnitude {self.magnitude} outside [{lo}, {hi}]")

    @classmethod
    def documented(cls, kind: str, seed: int = 0) -> "GapConfig":
        return cls(kind, DOCUMENTED_MAGNITUDES.get(kind, 0.0), seed)
