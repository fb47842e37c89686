"""Reproducible Monte Carlo expectation engine.

Each trial draws its channel realization from a counter-based stream keyed
by (master_seed, trial index), and aggregation uses a fixed-shape pairwise
tree, so the result is bit-identical whether trials run serially or on any
number of threads, and prefix estimates are exactly reproducible.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import os
from typing import Callable, Mapping, Sequence

import numpy as np

from .channel import ChannelRealization, ProbingConfig, sample_channels
from .errors import IntegrandFailure, ValidationError
from .numerics import RngStream

Integrand = Callable[[ChannelRealization], float]

_PAIRWISE_LEAF = 16


@dataclass(frozen=True)
class McSettings:
    """Trial count, master seed, and parallelism bound (None = one worker
    per CPU).  Parallelism never changes results, only wall time."""

    trials: int = 10_000
    master_seed: int = 1
    max_parallelism: int | None = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError(f"trials must be >= 1, got {self.trials}")
        if self.max_parallelism is not None and self.max_parallelism < 1:
            raise ValidationError("max_parallelism must be >= 1 or None")


@dataclass(frozen=True)
class Estimate:
    """Mean and standard error of a scalar quantity in bits."""

    mean: float
    stderr: float
    trials: int
    method: str = "monte-carlo"

    @classmethod
    def exact(cls, value: float) -> "Estimate":
        return cls(mean=float(value), stderr=0.0, trials=0, method="exact")


def pairwise_sum(values: Sequence[float]) -> float:
    """Sum with a fixed-shape binary tree (shape depends only on length)."""
    n = len(values)

    def rec(lo: int, hi: int) -> float:
        if hi - lo <= _PAIRWISE_LEAF:
            s = 0.0
            for i in range(lo, hi):
                s += float(values[i])
            return s
        mid = (lo + hi) // 2
        return rec(lo, mid) + rec(mid, hi)

    return rec(0, n) if n else 0.0


def summarize(values: Sequence[float], method: str = "monte-carlo") -> Estimate:
    """Two-pass mean/stderr, both passes pairwise for determinism."""
    n = len(values)
    if n == 0:
        raise ValidationError("cannot summarize zero trials")
    mean = pairwise_sum(values) / n
    if n == 1:
        return Estimate(mean=float(mean), stderr=0.0, trials=1, method=method)
    sq = [(float(v) - mean) ** 2 for v in values]
    var = pairwise_sum(sq) / (n - 1)
    return Estimate(mean=float(mean), stderr=float(np.sqrt(var / n)),
                    trials=n, method=method)


def _worker_count(settings: McSettings) -> int:
    if settings.max_parallelism is None:
        return max(1, os.cpu_count() or 1)
    return settings.max_parallelism


def collect(integrands: Mapping[str, Integrand], config: ProbingConfig,
            settings: McSettings) -> dict[str, np.ndarray]:
    """Evaluate all integrands on shared channel draws, one draw per trial.

    Sharing draws is what turns expectation-level identities (for example
    upper = lower + gap) into exact per-sample identities.  Any trial error
    aborts the whole run, reported for the lowest failing trial index.
    """
    names = list(integrands)
    fns = [integrands[k] for k in names]

    def run_trial(i: int) -> tuple[float, ...]:
        try:
            r = sample_channels(config, RngStream(settings.master_seed, i))
            return tuple(float(f(r)) for f in fns)
        except Exception as exc:
            raise IntegrandFailure(f"trial {i}: {exc}") from exc

    workers = _worker_count(settings)
    if workers == 1 or settings.trials == 1:
        rows = [run_trial(i) for i in range(settings.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_trial, range(settings.trials)))
    cols = np.array(rows, dtype=float)
    return {name: cols[:, j] for j, name in enumerate(names)}


def estimate(integrand: Integrand, config: ProbingConfig,
             settings: McSettings) -> Estimate:
    """Monte Carlo mean and standard error of a per-realization integrand."""
    values = collect({"value": integrand}, config, settings)["value"]
    return summarize(values)


def convergence_report(integrand: Integrand, config: ProbingConfig,
                       settings: McSettings,
                       checkpoints: Sequence[int]) -> list[Estimate]:
    """Nested-prefix estimates: checkpoint k reuses the first k trials.

    Because trial i's stream depends only on (master_seed, i), the k-trial
    prefix is bit-identical to a fresh run with trials=k.
    """
    if not checkpoints:
        raise ValidationError("checkpoints must be nonempty")
    prev = 0
    for k in checkpoints:
        if k <= prev:
            raise ValidationError(f"checkpoints must be strictly increasing: {checkpoints}")
        prev = k
    if checkpoints[-1] > settings.trials:
        raise ValidationError(
            f"largest checkpoint {checkpoints[-1]} exceeds trials {settings.trials}")
    values = collect({"value": integrand}, config, settings)["value"]
    return [summarize(values[:k]) for k in checkpoints]
