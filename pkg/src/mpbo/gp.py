"""Gaussian-process regression over small parameter boxes.

Inputs are mapped affinely to the unit cube before the kernel sees them and
targets are standardized with a caller-supplied (mean, std) pair, so the
kernel defaults below do not depend on the box or the reward scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

__all__ = [
    "ConfigurationError",
    "NumericalDegeneracyError",
    "ParamBox",
    "SampleBuffer",
    "KernelParams",
    "GPModel",
    "kernel_eval",
    "kernel_matrix",
    "standardization",
    "gp_fit",
    "gp_predict",
]

JITTER_START = 1e-8
JITTER_MAX = 1e-2
# (min pivot / max pivot)^2 below this counts as near-singular
_RCOND_FLOOR = 1e-13


class ConfigurationError(ValueError):
    """Shapes, bounds or settings that cannot describe a valid problem."""


class NumericalDegeneracyError(ArithmeticError):
    def __init__(self, jitter: float):
        super().__init__(f"Cholesky factorization failed even with jitter {jitter:g}")
        self.jitter = jitter


@dataclass(frozen=True)
class ParamBox:
    """Axis-aligned box of admissible parameter vectors."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]

    def __post_init__(self):
        if len(self.lower) != len(self.upper) or not self.lower:
            raise ConfigurationError("box bounds must be non-empty and equally long")
        if any(hi <= lo for lo, hi in zip(self.lower, self.upper)):
            raise ConfigurationError("every upper bound must exceed its lower bound")

    @classmethod
    def uniform(cls, dim: int = 4, lower: float = 0.5, upper: float = 1.5) -> "ParamBox":
        return cls((float(lower),) * dim, (float(upper),) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def nominal(self) -> np.ndarray:
        return 0.5 * (np.asarray(self.lower) + np.asarray(self.upper))

    def to_unit(self, x) -> np.ndarray:
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        return (np.asarray(x, dtype=float) - lo) / (hi - lo)

    def from_unit(self, u) -> np.ndarray:
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        return lo + np.asarray(u, dtype=float) * (hi - lo)

    def contains(self, x, atol: float = 0.0) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            return False
        return bool(np.all(x >= np.asarray(self.lower) - atol) and np.all(x <= np.asarray(self.upper) + atol))

    def check(self, x) -> np.ndarray:
        """Return ``x`` as a float vector, raising if it is not a point of the box."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ConfigurationError(f"expected a {self.dim}-vector, got shape {x.shape}")
        if not self.contains(x):
            raise ConfigurationError(f"point {x.tolist()} lies outside the box")
        return x


@dataclass
class SampleBuffer:
    """Append-only record of evaluated inputs and their rewards."""

    inputs: list = field(default_factory=list)
    rewards: list = field(default_factory=list)

    def append(self, x, reward: float) -> None:
        self.inputs.append(np.array(x, dtype=float))
        self.rewards.append(float(reward))

    def __len__(self) -> int:
        return len(self.rewards)

    def as_arrays(self, dim: int) -> tuple[np.ndarray, np.ndarray]:
        if not self.rewards:
            return np.empty((0, dim)), np.empty(0)
        return np.vstack(self.inputs), np.asarray(self.rewards, dtype=float)


@dataclass(frozen=True)
class KernelParams:
    """Anisotropic squared-exponential kernel settings (unit-cube, standardized units)."""

    lengthscale: tuple[float, ...] = (0.3, 0.3, 0.3, 0.3)
    signal_variance: float = 1.0
    noise_variance: float = 1e-4

    def __post_init__(self):
        if not self.lengthscale or any(ls <= 0 for ls in self.lengthscale):
            raise ConfigurationError("lengthscales must be strictly positive")
        if self.signal_variance <= 0:
            raise ConfigurationError("signal_variance must be strictly positive")
        if self.noise_variance < 0:
            raise ConfigurationError("noise_variance must be non-negative")

    @classmethod
    def isotropic(cls, dim: int, lengthscale: float = 0.3, signal_variance: float = 1.0,
                  noise_variance: float = 1e-4) -> "KernelParams":
        return cls((float(lengthscale),) * dim, float(signal_variance), float(noise_variance))

    @property
    def dim(self) -> int:
        return len(self.lengthscale)


def kernel_eval(a, b, k: KernelParams) -> float:
    """Squared-exponential covariance between two single points."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (k.dim,) or b.shape != (k.dim,):
        raise ConfigurationError(
            f"kernel expects {k.dim}-vectors, got shapes {a.shape} and {b.shape}")
    r = (a - b) / np.asarray(k.lengthscale)
    return float(k.signal_variance * np.exp(-0.5 * np.dot(r, r)))


def kernel_matrix(A: np.ndarray, B: np.ndarray, k: KernelParams) -> np.ndarray:
    ls = np.asarray(k.lengthscale)
    A = np.atleast_2d(A) / ls
    B = np.atleast_2d(B) / ls
    if A.shape[1] != k.dim or B.shape[1] != k.dim:
        raise ConfigurationError(f"kernel expects {k.dim} columns")
    sq = (A * A).sum(1)[:, None] + (B * B).sum(1)[None, :] - 2.0 * A @ B.T
    return k.signal_variance * np.exp(-0.5 * np.maximum(sq, 0.0))


def standardization(rewards) -> tuple[float, float]:
    """Mean and std used to standardize targets; std falls back to 1 when degenerate."""
    y = np.asarray(rewards, dtype=float)
    if y.size == 0:
        return 0.0, 1.0
    mean = float(y.mean())
    if y.size < 2:
        return mean, 1.0
    std = float(y.std())
    if not np.isfinite(std) or std <= 0.0:
        std = 1.0
    return mean, std


@dataclass(frozen=True, eq=False)
class GPModel:
    kernel: KernelParams
    box: ParamBox
    train_inputs: np.ndarray  # unit-cube coordinates, shape (n, d)
    train_targets: np.ndarray  # standardized, shape (n,)
    y_mean: float
    y_std: float
    chol: np.ndarray | None
    alpha: np.ndarray | None
    jitter: float = 0.0

    @property
    def n_train(self) -> int:
        return int(self.train_targets.shape[0])

    @cached_property
    def chol_inverse(self) -> np.ndarray:
        """Inverse of the Cholesky factor; cheap for the small training sets used here."""
        return solve_triangular(self.chol, np.eye(self.n_train), lower=True)

    @property
    def best_target(self) -> float:
        """Incumbent (largest) standardized training target."""
        return float(self.train_targets.max())

    def predict_unit(self, U) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance in standardized units at unit-cube points."""
        U = np.atleast_2d(np.asarray(U, dtype=float))
        if U.shape[1] != self.kernel.dim:
            raise ConfigurationError(f"query must have {self.kernel.dim} columns, got {U.shape[1]}")
        if self.n_train == 0:
            return np.zeros(len(U)), np.full(len(U), self.kernel.signal_variance)
        Ks = kernel_matrix(self.train_inputs, U, self.kernel)
        mean = Ks.T @ self.alpha
        v = solve_triangular(self.chol, Ks, lower=True, check_finite=False)
        var = self.kernel.signal_variance - (v * v).sum(0)
        return mean, np.maximum(var, 0.0)

    def predict(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance in reward units at box points."""
        mean, var = self.predict_unit(self.box.to_unit(X))
        return self.y_mean + self.y_std * mean, (self.y_std ** 2) * var


def _factorize(K: np.ndarray) -> np.ndarray | None:
    try:
        L = np.linalg.cholesky(K)
    except np.linalg.LinAlgError:
        return None
    d = np.diag(L)
    if not np.all(np.isfinite(L)) or (d.min() / d.max()) ** 2 < _RCOND_FLOOR:
        return None
    return L


def gp_fit(buffer: SampleBuffer, k: KernelParams, box: ParamBox | None = None,
           y_mean: float | None = None, y_std: float | None = None) -> GPModel:
    """Condition a GP on ``buffer``.

    Targets are standardized with ``(y_mean, y_std)``; when omitted they are
    taken from the buffer itself. A near-singular kernel matrix gets diagonal
    jitter, starting at 1e-8 and growing tenfold up to 1e-2.
    """
    box = box if box is not None else ParamBox.uniform(k.dim)
    if box.dim != k.dim:
        raise ConfigurationError(f"box has dimension {box.dim}, kernel {k.dim}")
    X, y = buffer.as_arrays(k.dim)
    if X.shape[1] != k.dim:
        raise ConfigurationError(f"buffer inputs have dimension {X.shape[1]}, kernel {k.dim}")
    if len(X) and not box.contains(X):
        raise ConfigurationError("buffer contains points outside the box")
    auto_mean, auto_std = standardization(y)
    y_mean = auto_mean if y_mean is None else float(y_mean)
    y_std = auto_std if y_std is None else float(y_std)
    if y_std <= 0:
        raise ConfigurationError("y_std must be positive")
    U = box.to_unit(X)
    targets = (y - y_mean) / y_std
    if len(U) == 0:
        return GPModel(k, box, U, targets, y_mean, y_std, None, None)

    K = kernel_matrix(U, U, k)
    K[np.diag_indices_from(K)] += k.noise_variance
    jitter = 0.0
    L = _factorize(K)
    while L is None:
        jitter = JITTER_START if jitter == 0.0 else jitter * 10.0
        if jitter > JITTER_MAX * (1 + 1e-9):
            raise NumericalDegeneracyError(jitter / 10.0)
        Kj = K.copy()
        Kj[np.diag_indices_from(Kj)] += jitter
        L = _factorize(Kj)
    alpha = cho_solve((L, True), targets, check_finite=False)
    return GPModel(k, box, U, targets, y_mean, y_std, L, alpha, jitter)


def gp_predict(model: GPModel, query) -> tuple[float, float]:
    q = np.asarray(query, dtype=float)
    if q.shape != (model.kernel.dim,):
        raise ConfigurationError(f"query must be a {model.kernel.dim}-vector, got shape {q.shape}")
    mean, var = model.predict(q[None, :])
    return float(mean[0]), float(var[0])
