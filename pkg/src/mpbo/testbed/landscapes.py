"""Synthetic reward landscapes over the 4-D virtual link-length box.

Each landscape is a main Gaussian bump plus ``n_modes - 1`` lower secondary
bumps, combined as ``h0*b0 + (1 - b0) * max_k h_k*b_k``. Because every
secondary height is below ``h0`` the global maximum is exactly ``h0`` at the
main centre (plus an optional constant floor), which gives the ensembles an
exact ground truth.

Without a gap the main centre sits within 0.03 (L-inf) of the nominal point.
A gap moves it by ``SHIFT_PER_MAGNITUDE[kind] * magnitude`` (Euclidean),
mostly along the tied front/back pair directions ``[x, x, y, y]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..evaluators import Ensemble, PolicyEvaluator
from ..gp import ParamBox
from ..rng import make_stream
from .gaps import GapConfig

__all__ = [
    "LandscapeSpec",
    "Landscape",
    "build_landscape",
    "make_landscape_ensemble",
    "BEST_MARGIN",
    "BASE_HEIGHT",
]

BASE_HEIGHT = 1.0
BEST_MARGIN = 0.5
MAIN_WIDTH = 0.4
NOMINAL_JITTER = 0.03
SHIFT_PER_MAGNITUDE = {"none": 0.0, "kinematic": 1.5, "dynamic": 0.875, "environment": 1.0}
# share of the shift that leaves the tied [x, x, y, y] plane
OFF_PLANE_SHARE = {"none": 0.0, "kinematic": 0.15, "dynamic": 0.15, "environment": 0.3}
SECONDARY_CLEARANCE = 0.4  # min distance of secondary centres from nominal and main centre
LANDSCAPE_BOX = ParamBox.uniform(4)

_TIED_A = np.array([1.0, 1.0, 0.0, 0.0]) / np.sqrt(2.0)
_TIED_B = np.array([0.0, 0.0, 1.0, 1.0]) / np.sqrt(2.0)
_SPLIT_A = np.array([1.0, -1.0, 0.0, 0.0]) / np.sqrt(2.0)
_SPLIT_B = np.array([0.0, 0.0, 1.0, -1.0]) / np.sqrt(2.0)


@dataclass(frozen=True)
class LandscapeSpec:
    policy_seed: int
    gap: GapConfig = field(default_factory=GapConfig)
    n_modes: int = 4
    noise_std: float = 0.05
    peak_height: float = BASE_HEIGHT
    floor: float = 0.0

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be at least 1")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        if self.peak_height <= 0:
            raise ValueError("peak_height must be positive")


@dataclass(frozen=True, eq=False)
class Landscape:
    center: np.ndarray
    widths: np.ndarray
    height: float
    sec_centers: np.ndarray  # (k, 4)
    sec_widths: np.ndarray  # (k,)
    sec_heights: np.ndarray  # (k,)
    floor: float = 0.0

    def __call__(self, P) -> np.ndarray:
        P = np.atleast_2d(np.asarray(P, dtype=float))
        main = np.exp(-0.5 * (((P - self.center) / self.widths) ** 2).sum(axis=1))
        if len(self.sec_heights):
            d2 = ((P[:, None, :] - self.sec_centers[None]) ** 2).sum(axis=2)
            sec = (self.sec_heights * np.exp(-0.5 * d2 / self.sec_widths ** 2)).max(axis=1)
        else:
            sec = np.zeros(len(P))
        return self.floor + self.height * main + (1.0 - main) * sec

    @property
    def max_reward(self) -> float:
        return self.floor + self.height


def _shift(rng: np.random.Generator, gap: GapConfig, env_angle: float) -> np.ndarray:
    angle = env_angle + 0.6 * rng.standard_normal()
    split = rng.standard_normal(2)
    in_plane = np.cos(angle) * _TIED_A + np.sin(angle) * _TIED_B
    off_plane = split[0] * _SPLIT_A + split[1] * _SPLIT_B
    off_plane /= max(np.linalg.norm(off_plane), 1e-12)
    share = OFF_PLANE_SHARE[gap.kind]
    direction = np.sqrt(1.0 - share ** 2) * in_plane + share * off_plane
    return SHIFT_PER_MAGNITUDE[gap.kind] * gap.magnitude * direction


def build_landscape(spec: LandscapeSpec) -> Landscape:
    """Deterministic landscape for ``(policy_seed, gap)``."""
    gap = spec.gap
    rng = make_stream(spec.policy_seed, "landscape", gap.kind, repr(gap.magnitude), gap.seed)
    env_angle = make_stream(gap.seed, "gap-direction", gap.kind).uniform(0.0, 2.0 * np.pi)
    nominal = LANDSCAPE_BOX.nominal
    jitter = rng.uniform(-NOMINAL_JITTER, NOMINAL_JITTER, 4)
    shift = _shift(rng, gap, env_angle)
    center = np.clip(nominal + jitter + shift, 0.6, 1.4)

    widths = np.full(4, MAIN_WIDTH)
    aniso = rng.uniform(0.8, 1.2, 4)
    if gap.kind == "dynamic":
        widths = widths * (1.0 - 0.3 * gap.magnitude)
    elif gap.kind == "environment":
        widths = widths * aniso

    k = spec.n_modes - 1
    sec_centers = np.empty((k, 4))
    for i in range(k):
        for _ in range(1000):
            c = rng.uniform(0.5, 1.5, 4)
            if (np.linalg.norm(c - nominal) >= SECONDARY_CLEARANCE
                    and np.linalg.norm(c - center) >= SECONDARY_CLEARANCE):
                break
        sec_centers[i] = c
    sec_widths = rng.uniform(0.12, 0.2, k)
    sec_heights = spec.peak_height * rng.uniform(0.35, 0.6, k)
    return Landscape(center, widths, float(spec.peak_height), sec_centers, sec_widths, sec_heights,
                     float(spec.floor))


def _policy_seeds(master_seed: int, j: int) -> tuple[int, int]:
    rng = make_stream(master_seed, "ensemble-policy", j)
    seeds = rng.integers(0, 2 ** 31, size=2)
    return int(seeds[0]), int(seeds[1])


def make_landscape_ensemble(M: int, gap: GapConfig, master_seed: int, n_modes: int = 4,
                            noise_std: float = 0.05) -> Ensemble:
    """``M`` landscape evaluators; exactly one peaks ``BEST_MARGIN`` above the rest.

    The designed-best policy shares the family's shape but sits on a floor of
    ``BEST_MARGIN``, i.e. it transfers better everywhere, not only at its peak.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    best = int(make_stream(master_seed, "ensemble-best").integers(M))
    policies, optima, specs = [], [], []
    for j in range(M):
        policy_seed, noise_seed = _policy_seeds(master_seed, j)
        floor = BEST_MARGIN if j == best else 0.0
        spec = LandscapeSpec(policy_seed, gap, n_modes, noise_std, BASE_HEIGHT, floor)
        land = build_landscape(spec)
        policies.append(PolicyEvaluator(j, land, LANDSCAPE_BOX, noise_std, noise_seed))
        optima.append((land.center.copy(), land.max_reward))
        specs.append(spec)
    return Ensemble(policies, best, optima, LANDSCAPE_BOX, specs)
