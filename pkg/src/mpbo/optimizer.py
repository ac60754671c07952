"""Multi-policy Bayesian optimization and the allocators it is compared with.

One GP per policy proposes its own next input by expected improvement. Each
policy also gets an upper-confidence-bound score from the mean of its
rewards so far, and the policy with the largest ``ucb * ei`` spends the
rollout. Only that policy's GP is refit.

Reward scaling
--------------
* UCB means use rewards min-max normalized over every observation so far,
  pooled across policies, so scores are non-negative.
* GP targets are divided by the pooled standard deviation and centred on
  the policy's own mean at fit time. The EI of a stale model is rescaled
  to the current pooled deviation before it enters the product, which makes
  the selection invariant to positive affine changes of the reward.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .acquisition import Proposal, sample_next
from .gp import (
    ConfigurationError,
    GPModel,
    KernelParams,
    ParamBox,
    SampleBuffer,
    gp_fit,
    standardization,
)

__all__ = [
    "BudgetExhaustedError",
    "TraceEntry",
    "AdaptationResult",
    "MPBOState",
    "ucb_value",
    "normalized_means",
    "mpbo_init",
    "mpbo_step",
    "mpbo_run",
    "bayes_opt",
    "baseline_equal_split",
    "baseline_round_robin",
    "baseline_random_search",
    "ALGORITHMS",
]

DEFAULT_N_INIT = 2
DEFAULT_EXPLORATION = 1.0


class BudgetExhaustedError(RuntimeError):
    pass


@dataclass(frozen=True)
class TraceEntry:
    iteration: int  # 0 for initial rollouts
    policy: int
    params: tuple
    reward: float


@dataclass
class AdaptationResult:
    best_policy: int
    best_params: np.ndarray
    best_reward: float
    allocation: list
    trace: list

    @classmethod
    def from_trace(cls, trace: list, n_policies: int) -> "AdaptationResult":
        if not trace:
            raise ValueError("cannot summarize an empty trace")
        k = int(np.argmax([e.reward for e in trace]))
        alloc = [0] * n_policies
        for e in trace:
            alloc[e.policy] += 1
        best = trace[k]
        return cls(best.policy, np.array(best.params), best.reward, alloc, list(trace))


def ucb_value(mean_reward: float, t: int, n: int, c: float) -> float:
    """``mean_reward + c * sqrt(ln t / n)``."""
    if t < 1:
        raise ValueError(f"iteration t must be >= 1, got {t}")
    if n < 1:
        raise ValueError(f"selection count n must be >= 1, got {n}")
    return mean_reward + c * math.sqrt(math.log(t) / n)


def normalized_means(buffers) -> list[float]:
    """Per-buffer mean of rewards min-max scaled over all buffers pooled."""
    pooled = [r for b in buffers for r in b.rewards]
    lo, hi = min(pooled), max(pooled)
    span = hi - lo
    out = []
    for b in buffers:
        if span <= 0:
            out.append(0.5)
        else:
            out.append(float(np.mean([(r - lo) / span for r in b.rewards])))
    return out


def _pooled_std(buffers) -> float:
    return standardization([r for b in buffers for r in b.rewards])[1]


def _fit(buffer: SampleBuffer, buffers, kernel: KernelParams, box: ParamBox) -> GPModel:
    own_mean = float(np.mean(buffer.rewards))
    return gp_fit(buffer, kernel, box, y_mean=own_mean, y_std=_pooled_std(buffers))


def _reset(policies) -> None:
    for p in policies:
        reset = getattr(p, "reset", None)
        if reset is not None:
            reset()


@dataclass
class MPBOState:
    policies: list
    models: list
    buffers: list
    rng: np.random.Generator
    box: ParamBox
    kernel: KernelParams
    budget: int
    exploration: float = DEFAULT_EXPLORATION
    iteration: int = 1
    spent: int = 0
    trace: list = field(default_factory=list)
    last_scores: list = field(default_factory=list)

    @property
    def counts(self) -> list[int]:
        return [len(b) for b in self.buffers]

    @property
    def exhausted(self) -> bool:
        return self.spent >= self.budget

    def _rollout(self, j: int, x, iteration: int) -> float:
        reward = float(self.policies[j](x))
        self.buffers[j].append(x, reward)
        self.spent += 1
        self.trace.append(TraceEntry(iteration, j, tuple(float(v) for v in x), reward))
        return reward

    def result(self) -> AdaptationResult:
        return AdaptationResult.from_trace(self.trace, len(self.policies))


def mpbo_init(policies, n_init: int, rng: np.random.Generator, budget: int,
              c: float = DEFAULT_EXPLORATION, kernel: KernelParams | None = None,
              box: ParamBox | None = None) -> MPBOState:
    """Spend ``n_init`` uniform rollouts per policy and fit every GP."""
    M = len(policies)
    if M < 1:
        raise ConfigurationError("need at least one policy")
    if n_init < 1:
        raise ConfigurationError("n_init must be at least 1")
    if M * n_init > budget:
        raise ConfigurationError(
            f"budget {budget} cannot cover {n_init} initial rollouts for {M} policies")
    box = box or policies[0].box
    kernel = kernel or KernelParams.isotropic(box.dim)
    _reset(policies)
    state = MPBOState(list(policies), [None] * M, [SampleBuffer() for _ in range(M)],
                      rng, box, kernel, budget, c)
    for j in range(M):
        for _ in range(n_init):
            state._rollout(j, box.from_unit(rng.random(box.dim)), 0)
    # fit after all initial rollouts so every GP sees the same pooled scale
    state.models = [_fit(b, state.buffers, kernel, box) for b in state.buffers]
    return state


def _propose_and_rollout(state: MPBOState, j: int, proposal: Proposal) -> None:
    state._rollout(j, proposal.point, state.iteration)
    state.models[j] = _fit(state.buffers[j], state.buffers, state.kernel, state.box)
    state.iteration += 1


def mpbo_step(state: MPBOState) -> MPBOState:
    """One selection round: every policy proposes, the best ``u * e`` rolls out."""
    if state.exhausted:
        raise BudgetExhaustedError(f"budget of {state.budget} rollouts already spent")
    pooled_std = _pooled_std(state.buffers)
    means = normalized_means(state.buffers)
    proposals, scores = [], []
    for j, model in enumerate(state.models):
        prop = sample_next(model, state.box, state.rng)
        e = prop.expected_improvement * model.y_std / pooled_std
        u = ucb_value(means[j], state.iteration, len(state.buffers[j]), state.exploration)
        proposals.append(prop)
        scores.append(u * e)
    j_star = int(np.argmax(scores))  # first index wins ties
    state.last_scores = scores
    _propose_and_rollout(state, j_star, proposals[j_star])
    return state


def mpbo_run(policies, budget: int, n_init: int = DEFAULT_N_INIT, c: float = DEFAULT_EXPLORATION,
             rng: np.random.Generator | None = None, kernel: KernelParams | None = None) -> AdaptationResult:
    rng = rng if rng is not None else np.random.default_rng(0)
    state = mpbo_init(policies, n_init, rng, budget, c, kernel)
    while not state.exhausted:
        mpbo_step(state)
    return state.result()


def bayes_opt(policy, budget: int, n_init: int = DEFAULT_N_INIT, rng: np.random.Generator | None = None,
              kernel: KernelParams | None = None, policy_index: int = 0) -> list[TraceEntry]:
    """Plain single-policy BO; returns the trace with ``policy_index`` stamped on each entry."""
    rng = rng if rng is not None else np.random.default_rng(0)
    state = mpbo_init([policy], n_init, rng, budget, 0.0, kernel)
    while not state.exhausted:
        prop = sample_next(state.models[0], state.box, state.rng)
        _propose_and_rollout(state, 0, prop)
    return [TraceEntry(e.iteration, policy_index, e.params, e.reward) for e in state.trace]


def baseline_equal_split(policies, budget: int, rng: np.random.Generator, n_init: int = DEFAULT_N_INIT,
                         kernel: KernelParams | None = None, c: float = DEFAULT_EXPLORATION) -> AdaptationResult:
    """Independent BO per policy with ``budget / M`` rollouts each."""
    M = len(policies)
    if M < 1:
        raise ConfigurationError("need at least one policy")
    if budget % M:
        raise ConfigurationError(f"budget {budget} is not divisible by {M} policies")
    trace = []
    for j, policy in enumerate(policies):
        trace.extend(bayes_opt(policy, budget // M, n_init, rng, kernel, policy_index=j))
    return AdaptationResult.from_trace(trace, M)


def baseline_round_robin(policies, budget: int, rng: np.random.Generator, n_init: int = DEFAULT_N_INIT,
                         kernel: KernelParams | None = None, c: float = DEFAULT_EXPLORATION) -> AdaptationResult:
    """Like :func:`mpbo_run` but the rollout cycles through the policies in order."""
    state = mpbo_init(policies, n_init, rng, budget, c, kernel)
    while not state.exhausted:
        j = (state.iteration - 1) % len(policies)
        prop = sample_next(state.models[j], state.box, state.rng)
        _propose_and_rollout(state, j, prop)
    return state.result()


def baseline_random_search(policies, budget: int, rng: np.random.Generator, n_init: int = DEFAULT_N_INIT,
                           kernel: KernelParams | None = None, c: float = DEFAULT_EXPLORATION) -> AdaptationResult:
    """Uniformly random (policy, input) pairs."""
    M = len(policies)
    if M < 1:
        raise ConfigurationError("need at least one policy")
    if budget < 1:
        raise ConfigurationError("budget must be positive")
    box = policies[0].box
    _reset(policies)
    trace = []
    for i in range(budget):
        j = int(rng.integers(M))
        x = box.from_unit(rng.random(box.dim))
        trace.append(TraceEntry(i + 1, j, tuple(float(v) for v in x), float(policies[j](x))))
    return AdaptationResult.from_trace(trace, M)


def _mpbo(policies, budget, rng, n_init=DEFAULT_N_INIT, kernel=None, c=DEFAULT_EXPLORATION):
    return mpbo_run(policies, budget, n_init, c, rng, kernel)


ALGORITHMS = {
    "mpbo": _mpbo,
    "equal_split": baseline_equal_split,
    "round_robin": baseline_round_robin,
    "random_search": baseline_random_search,
}
