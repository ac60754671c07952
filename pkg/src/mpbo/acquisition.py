"""Expected improvement and its maximization over the parameter box."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .gp import GPModel, ParamBox

__all__ = [
    "Proposal",
    "norm_cdf",
    "norm_pdf",
    "expected_improvement",
    "ei_array",
    "sample_next",
    "N_CANDIDATES",
    "GOLDEN_ITERATIONS",
]

N_CANDIDATES = 1024
GOLDEN_ITERATIONS = 32
NEIGHBORHOOD_STEP = 0.05  # unit-cube offset of the incumbent probes
_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Proposal:
    point: np.ndarray  # box coordinates
    expected_improvement: float  # standardized units of the proposing model


def norm_cdf(z):
    # erfc keeps the lower tail accurate where 1 + erf(x) would cancel
    return 0.5 * erfc(-np.asarray(z, dtype=float) * _INV_SQRT2)


def norm_pdf(z):
    z = np.asarray(z, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * z * z)


def ei_array(mean, std, best) -> np.ndarray:
    mean, std = np.broadcast_arrays(np.asarray(mean, dtype=float), np.asarray(std, dtype=float))
    gap = mean - best
    pos = std > 0
    with np.errstate(over="ignore"):
        z = np.divide(gap, std, out=np.zeros_like(gap), where=pos)
    z = np.clip(z, -40.0, 40.0)  # tails beyond this are exactly 0 or 1 in double precision
    val = np.where(pos, gap * norm_cdf(z) + std * norm_pdf(z), gap)
    return np.maximum(val, 0.0)


def expected_improvement(mean: float, std: float, best_observed: float) -> float:
    """E[max(Y - best, 0)] for Y ~ N(mean, std^2); ``max(mean - best, 0)`` when std is 0."""
    if std < 0:
        raise ValueError(f"std must be non-negative, got {std}")
    return float(ei_array(mean, std, best_observed))


def _ei_unit(model: GPModel, U: np.ndarray, best: float) -> np.ndarray:
    mean, var = model.predict_unit(U)
    return ei_array(mean, np.sqrt(var), best)


def _point_ei(model: GPModel, best: float):
    """Scalar EI at one unit-cube point, for the sequential line search."""
    inv_ls = 1.0 / np.asarray(model.kernel.lengthscale)
    Xs = model.train_inputs * inv_ls
    alpha, Linv = model.alpha, model.chol_inverse
    sv = model.kernel.signal_variance

    def ei(u: np.ndarray) -> float:
        diff = Xs - u * inv_ls
        k = sv * np.exp(-0.5 * np.einsum("ij,ij->i", diff, diff))
        w = Linv @ k
        mean = float(k @ alpha)
        std = math.sqrt(max(sv - float(w @ w), 0.0))
        gap = mean - best
        if std <= 0.0:
            return max(gap, 0.0)
        z = gap / std
        return max(gap * 0.5 * math.erfc(-z * _INV_SQRT2) + std * _INV_SQRT_2PI * math.exp(-0.5 * z * z), 0.0)

    return ei


def _golden_refine(model, u, value, best, half_width):
    """One coordinate sweep of golden-section search around ``u``; never lowers EI."""
    u = u.copy()
    point_ei = _point_ei(model, best)
    for i in range(len(u)):
        a = max(0.0, u[i] - half_width)
        b = min(1.0, u[i] + half_width)
        probe = u.copy()

        def f(ci, _i=i):
            probe[_i] = ci
            return point_ei(probe)

        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        fc, fd = f(c), f(d)
        for _ in range(GOLDEN_ITERATIONS):
            if fc >= fd:
                b, d, fd = d, c, fc
                c = b - _GOLDEN * (b - a)
                fc = f(c)
            else:
                a, c, fc = c, d, fd
                d = a + _GOLDEN * (b - a)
                fd = f(d)
        ci, fi = (c, fc) if fc >= fd else (d, fd)
        if fi > value:
            u[i], value = ci, fi
    return u, value


def sample_next(model: GPModel, box: ParamBox | None, rng: np.random.Generator,
                n_candidates: int = N_CANDIDATES) -> Proposal:
    """Propose the next point for ``model`` by maximizing expected improvement.

    Draws ``n_candidates`` uniform points from ``rng``, adds the incumbent and
    its axis neighbours, then polishes the best candidate coordinate-wise.
    Ties go to the earliest candidate.
    """
    if model.n_train < 1:
        raise ValueError("sample_next needs a model fitted on at least one point")
    if box is not None and box != model.box:
        raise ValueError("proposal box must match the box the model was fitted in")
    box = model.box
    d = box.dim
    best = model.best_target
    inc = model.train_inputs[int(np.argmax(model.train_targets))]
    steps = NEIGHBORHOOD_STEP * np.eye(d)
    cands = np.vstack([
        rng.random((n_candidates, d)),
        inc[None, :],
        np.clip(inc + steps, 0.0, 1.0),
        np.clip(inc - steps, 0.0, 1.0),
    ])
    ei = _ei_unit(model, cands, best)
    k = int(np.argmax(ei))
    u, value = _golden_refine(model, cands[k], float(ei[k]), best,
                              half_width=n_candidates ** (-1.0 / d))
    point = np.clip(box.from_unit(np.clip(u, 0.0, 1.0)), box.lower, box.upper)
    return Proposal(point, max(float(value), 0.0))
