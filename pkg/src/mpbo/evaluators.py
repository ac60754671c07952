"""Black-box reward evaluators standing in for trained universal policies."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .gp import ParamBox
from .rng import make_stream

__all__ = ["PolicyEvaluator", "CountingEvaluator", "Ensemble"]


class PolicyEvaluator:
    """Reward of one policy as a function of its conditioning input.

    ``mean_fn`` maps an ``(n, d)`` array of box points to ``n`` noise-free
    rewards. Each call to the evaluator is one rollout and consumes one
    Gaussian draw from the noise stream keyed by ``noise_seed``;
    :meth:`reset` rewinds that stream so independent runs see the same noise.
    """

    def __init__(self, policy_id: int, mean_fn: Callable[[np.ndarray], np.ndarray],
                 box: ParamBox, noise_std: float = 0.0, noise_seed: int = 0):
        if noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        self.policy_id = policy_id
        self.mean_fn = mean_fn
        self.box = box
        self.noise_std = float(noise_std)
        self.noise_seed = int(noise_seed)
        self.reset()

    def reset(self) -> None:
        self._noise = make_stream(self.noise_seed, "rollout-noise")

    def mean(self, points) -> np.ndarray:
        return np.asarray(self.mean_fn(np.atleast_2d(np.asarray(points, dtype=float))), dtype=float)

    def __call__(self, params) -> float:
        x = self.box.check(params)
        value = float(self.mean(x[None, :])[0])
        if self.noise_std > 0:
            value += self.noise_std * float(self._noise.standard_normal())
        return value

    def averaged(self, points, n_eval: int) -> np.ndarray:
        """Mean of ``n_eval`` rollouts at each point (vectorized)."""
        mu = self.mean(points)
        if self.noise_std == 0 or n_eval < 1:
            return mu
        draws = self._noise.standard_normal((len(mu), n_eval))
        return mu + self.noise_std * draws.mean(axis=1)

    def __repr__(self) -> str:
        return f"PolicyEvaluator(policy_id={self.policy_id}, noise_std={self.noise_std})"


class CountingEvaluator:
    """Wraps an evaluator and records every rollout it serves."""

    def __init__(self, inner):
        self.inner = inner
        self.policy_id = inner.policy_id
        self.box = inner.box
        self.calls = 0
        self.points: list[np.ndarray] = []

    def reset(self) -> None:
        self.inner.reset()

    def __call__(self, params) -> float:
        self.calls += 1
        self.points.append(np.array(params, dtype=float))
        return self.inner(params)


@dataclass(frozen=True)
class Ensemble:
    """A set of policy evaluators with its construction ground truth."""

    policies: list
    best_policy: int
    optima: list  # per-policy (argmax point, max reward) from construction
    box: ParamBox
    specs: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.policies)
