"""Seed-batch experiment runner, result records and their verification.

Layout of an output directory::

    cells/<algorithm>-seed<k>.json   one record per (algorithm, seed), written atomically
    results.jsonl                    all records, sorted by algorithm then seed
    summary.csv                      per-algorithm statistics of best_reward

Every record carries its full trace, so :func:`verify_results` can rebuild
each summary field and the whole ``summary.csv`` from scratch.
"""

from __future__ import annotations

import csv
import io
import json
import os
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .gp import ConfigurationError, KernelParams
from .optimizer import ALGORITHMS
from .rng import make_stream
from .testbed import (
    DOCUMENTED_MAGNITUDES,
    GapConfig,
    grid_csv,
    landscape_grid_dump,
    make_arm_ensemble,
    make_landscape_ensemble,
)

__all__ = [
    "ExperimentConfig",
    "load_config",
    "build_ensemble",
    "run_cell",
    "run_experiment",
    "summarize",
    "summary_csv",
    "verify_results",
    "dump_landscape",
    "output_dir",
]

TESTBEDS = ("landscape", "arm")
SUMMARY_FIELDS = ("algorithm", "runs", "mean", "median", "min", "max", "identification_rate")


@dataclass(frozen=True)
class ExperimentConfig:
    testbed: str = "landscape"
    gap_kind: str = "kinematic"
    gap_magnitude: float | None = None  # None picks the documented magnitude
    gap_seed: int = 0
    n_policies: int = 3
    budget: int = 30
    n_init: int = 2
    c: float = 1.0
    algorithms: tuple = ("mpbo", "equal_split")
    seeds: tuple = (0,)
    output_dir: str = "results"
    n_modes: int = 4
    noise_std: float = 0.05
    n_eval: int = 15
    workers: int = 1
    lengthscale: float | tuple = 0.3  # one value for every dimension, or one per dimension
    signal_variance: float = 1.0
    noise_variance: float = 1e-4

    def __post_init__(self):
        if self.testbed not in TESTBEDS:
            raise ConfigurationError(f"testbed must be one of {TESTBEDS}, got {self.testbed!r}")
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigurationError(f"unknown algorithms {unknown}; expected names from {sorted(ALGORITHMS)}")
        if not self.algorithms:
            raise ConfigurationError("algorithm list is empty")
        if not self.seeds:
            raise ConfigurationError("seed list is empty")
        if any(s < 0 for s in self.seeds) or len(set(self.seeds)) != len(self.seeds):
            raise ConfigurationError("seeds must be distinct non-negative integers")
        if self.n_policies < 1 or self.n_init < 1 or self.budget < 1:
            raise ConfigurationError("n_policies, n_init and budget must be positive")
        if self.n_policies * self.n_init > self.budget:
            raise ConfigurationError("budget does not cover the initial rollouts")
        if "equal_split" in self.algorithms and self.budget % self.n_policies:
            raise ConfigurationError("equal_split needs a budget divisible by n_policies")
        if self.c < 0 or self.noise_std < 0 or self.n_modes < 1 or self.n_eval < 1 or self.workers < 1:
            raise ConfigurationError("c, noise_std must be >= 0; n_modes, n_eval, workers >= 1")
        self.gap  # validates kind and magnitude
        self.kernel

    @property
    def dim(self) -> int:
        return 2 if self.testbed == "arm" else 4

    @property
    def kernel(self) -> KernelParams:
        ls = self.lengthscale
        ls = tuple(float(v) for v in ls) if isinstance(ls, tuple) else (float(ls),) * self.dim
        if len(ls) != self.dim:
            raise ConfigurationError(f"lengthscale needs {self.dim} entries for the {self.testbed} testbed")
        return KernelParams(ls, float(self.signal_variance), float(self.noise_variance))

    @property
    def gap(self) -> GapConfig:
        magnitude = self.gap_magnitude
        if magnitude is None:
            magnitude = DOCUMENTED_MAGNITUDES.get(self.gap_kind, 0.0)
        return GapConfig(self.gap_kind, float(magnitude), self.gap_seed)


_FIELD_TYPES = {
    "testbed": str, "gap_kind": str, "gap_magnitude": (int, float, type(None)), "gap_seed": int,
    "n_policies": int, "budget": int, "n_init": int, "c": (int, float), "algorithms": list,
    "seeds": list, "output_dir": str, "n_modes": int, "noise_std": (int, float), "n_eval": int,
    "workers": int, "lengthscale": (int, float, list), "signal_variance": (int, float),
    "noise_variance": (int, float),
}


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError("config must be a JSON object")
    unknown = sorted(set(raw) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigurationError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {}
    for key, value in raw.items():
        expected = _FIELD_TYPES[key]
        if isinstance(value, bool) or not isinstance(value, expected):
            raise ConfigurationError(f"config key {key!r} has the wrong type ({type(value).__name__})")
        kwargs[key] = value
    for key in ("algorithms", "seeds", "lengthscale"):
        if isinstance(kwargs.get(key), list):
            kwargs[key] = tuple(kwargs[key])
    if any(isinstance(s, bool) or not isinstance(s, int) for s in kwargs.get("seeds", ())):
        raise ConfigurationError("seeds must be integers")
    ls = kwargs.get("lengthscale", ())
    if isinstance(ls, tuple) and any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in ls):
        raise ConfigurationError("lengthscale entries must be numbers")
    for key in ("c", "noise_std", "gap_magnitude", "signal_variance", "noise_variance"):
        if kwargs.get(key) is not None and key in kwargs:
            kwargs[key] = float(kwargs[key])
    return ExperimentConfig(**kwargs)


def load_config(path) -> ExperimentConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw)


def output_dir(config: ExperimentConfig) -> Path:
    return Path(os.environ.get("MPBO_OUT") or config.output_dir)


def build_ensemble(config: ExperimentConfig, seed: int):
    if config.testbed == "arm":
        return make_arm_ensemble(config.n_policies, config.gap, seed)
    return make_landscape_ensemble(config.n_policies, config.gap, seed,
                                   n_modes=config.n_modes, noise_std=config.noise_std)


def run_cell(config: ExperimentConfig, algorithm: str, seed: int) -> dict:
    ens = build_ensemble(config, seed)
    rng = make_stream(seed, "allocator")
    result = ALGORITHMS[algorithm](ens.policies, config.budget, rng, n_init=config.n_init,
                                   kernel=config.kernel, c=config.c)
    return {
        "algorithm": algorithm,
        "seed": seed,
        "testbed": config.testbed,
        "gap": asdict(config.gap),
        "kernel": asdict(config.kernel),
        "budget": config.budget,
        "n_policies": config.n_policies,
        "designed_best": ens.best_policy,
        "best_policy": result.best_policy,
        "best_params": [float(v) for v in result.best_params],
        "best_reward": result.best_reward,
        "allocation": list(result.allocation),
        "trace": [
            {"t": e.iteration, "policy": e.policy, "params": list(e.params), "reward": e.reward}
            for e in result.trace
        ],
    }


def encode_record(record: dict) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _cell_job(args):
    config, algorithm, seed, cells = args
    record = run_cell(config, algorithm, seed)
    _atomic_write(cells / f"{algorithm}-seed{seed}.json", encode_record(record) + "\n")
    return record


@dataclass
class SummaryRow:
    algorithm: str
    runs: int
    mean: float
    median: float
    min: float
    max: float
    identification_rate: float
    rewards: list = field(default_factory=list, repr=False)


def summarize(records) -> list[SummaryRow]:
    by_alg: dict[str, list] = {}
    for rec in records:
        by_alg.setdefault(rec["algorithm"], []).append(rec)
    rows = []
    for alg in sorted(by_alg):
        recs = by_alg[alg]
        rewards = [float(r["best_reward"]) for r in recs]
        ident = sum(r["best_policy"] == r["designed_best"] for r in recs) / len(recs)
        rows.append(SummaryRow(alg, len(recs), statistics.fmean(rewards), statistics.median(rewards),
                               min(rewards), max(rewards), ident, rewards))
    return rows


def summary_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SUMMARY_FIELDS)
    for r in rows:
        w.writerow([r.algorithm, r.runs] + [repr(float(getattr(r, f))) for f in SUMMARY_FIELDS[2:]])
    return buf.getvalue()


def format_table(rows) -> str:
    head = f"{'algorithm':<14}{'runs':>5}{'mean':>10}{'median':>10}{'min':>10}{'max':>10}{'ident':>8}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(f"{r.algorithm:<14}{r.runs:>5}{r.mean:>10.4f}{r.median:>10.4f}"
                     f"{r.min:>10.4f}{r.max:>10.4f}{r.identification_rate:>8.2f}")
    return "\n".join(lines)


def run_experiment(config: ExperimentConfig, out: Path | None = None, echo=print) -> list[SummaryRow]:
    """Run every (algorithm, seed) cell and write records plus the summary.

    Raises ``OSError`` when the output cannot be written.
    """
    out = Path(out) if out is not None else output_dir(config)
    cells = out / "cells"
    cells.mkdir(parents=True, exist_ok=True)
    jobs = [(config, alg, seed, cells) for alg in config.algorithms for seed in config.seeds]
    if config.workers > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_cell_job, jobs))
    else:
        records = [_cell_job(job) for job in jobs]
    records.sort(key=lambda r: (r["algorithm"], r["seed"]))
    _atomic_write(out / "results.jsonl", "".join(encode_record(r) + "\n" for r in records))
    rows = summarize(records)
    _atomic_write(out / "summary.csv", summary_csv(rows))
    if echo is not None:
        echo(format_table(rows))
    return rows


def read_records(results_dir) -> list[dict]:
    path = Path(results_dir) / "results.jsonl"
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _check_record(rec: dict) -> list[str]:
    where = f"{rec.get('algorithm')}/seed {rec.get('seed')}"
    trace = rec["trace"]
    if not trace:
        return [f"{where}: empty trace"]
    rewards = [e["reward"] for e in trace]
    k = max(range(len(rewards)), key=lambda i: (rewards[i], -i))
    alloc = [0] * rec["n_policies"]
    for e in trace:
        alloc[e["policy"]] += 1
    problems = []
    if rec["best_reward"] != rewards[k]:
        problems.append(f"{where}: best_reward {rec['best_reward']!r} != trace max {rewards[k]!r}")
    if rec["best_policy"] != trace[k]["policy"]:
        problems.append(f"{where}: best_policy does not match the trace")
    if rec["best_params"] != trace[k]["params"]:
        problems.append(f"{where}: best_params do not match the trace")
    if rec["allocation"] != alloc:
        problems.append(f"{where}: allocation {rec['allocation']} != trace counts {alloc}")
    if sum(alloc) != rec["budget"]:
        problems.append(f"{where}: {sum(alloc)} rollouts recorded for budget {rec['budget']}")
    return problems


def verify_results(results_dir) -> list[str]:
    """Recompute every stored summary from the traces; returns the mismatches found."""
    results_dir = Path(results_dir)
    records = read_records(results_dir)
    problems = [p for rec in records for p in _check_record(rec)]
    expected = summary_csv(summarize(records))
    stored = (results_dir / "summary.csv").read_text()
    if stored != expected:
        problems.append("summary.csv does not match the statistics recomputed from results.jsonl")
    return problems


def dump_landscape(config: ExperimentConfig, policy_index: int, resolution: int,
                   out: Path | None = None) -> Path:
    """Write the tied 2-D slice of one policy's landscape (first configured seed) as CSV."""
    seed = config.seeds[0]
    ens = build_ensemble(config, seed)
    if not 0 <= policy_index < len(ens):
        raise ConfigurationError(f"policy index {policy_index} outside 0..{len(ens) - 1}")
    if resolution < 2:
        raise ConfigurationError("resolution must be at least 2")
    policy = ens.policies[policy_index]
    policy.reset()
    rows = landscape_grid_dump(policy, resolution, config.n_eval)
    out = Path(out) if out is not None else output_dir(config)
    out.mkdir(parents=True, exist_ok=True)
    gap = config.gap
    path = out / f"landscape-{config.testbed}-{gap.kind}-seed{seed}-policy{policy_index}-res{resolution}.csv"
    _atomic_write(path, grid_csv(rows))
    return path
