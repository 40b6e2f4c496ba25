"""Seeded frequency estimation of quantum-machine outcome statistics.

Every sample is a fresh measurement on the same prepared state (ensemble
statistics, no collapse chaining).  Samples are split into contiguous shards;
shard ``j`` draws from the substream keyed by ``(seed, j)`` with counters
starting at zero, and per-shard counts are reduced in shard order, so the
result never depends on how shards are scheduled.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import _kernels
from ._rng import derive_seed, stream_key
from .core import (
    EpsilonMeasurement,
    MachineState,
    Outcome,
    UnitVector3,
    cos_angle,
    outcome_probabilities,
)

_SEED_MIN = -(1 << 63)
_SEED_MAX = (1 << 64) - 1


@dataclass(frozen=True)
class EstimatorConfig:
    samples: int
    seed: int = 0
    shards: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.shards < 1:
            raise ValueError("shards must be >= 1")
        if self.shards > self.samples:
            raise ValueError("shards must not exceed samples")
        if not _SEED_MIN <= self.seed <= _SEED_MAX:
            raise ValueError("seed must fit in 64 bits")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    def shard_ranges(self) -> list[tuple[int, int]]:
        n, k = self.samples, self.shards
        bounds = [j * n // k for j in range(k + 1)]
        return [(bounds[j], bounds[j + 1] - bounds[j]) for j in range(k)]


@dataclass(frozen=True)
class FrequencyEstimate:
    counts: dict
    frequencies: dict
    standard_error: float
    z_vs_analytic: float
    analytic_p1: float

    @property
    def samples(self) -> int:
        return sum(self.counts.values())

    @property
    def f1(self) -> float:
        return self.frequencies[Outcome.O1]


def z_score(count: int, n: int, p: float) -> float:
    """Binomial z statistic of ``count`` successes against probability ``p``.

    Uses the null-hypothesis spread sqrt(p(1-p)/n), so degenerate ``p`` gives
    0 on an exact match and an infinite score otherwise.
    """
    f = count / n
    sd = math.sqrt(p * (1.0 - p) / n)
    if sd == 0.0:
        return 0.0 if f == p else math.copysign(math.inf, f - p)
    return (f - p) / sd


def _shard_count(key: int, n: int, epsilon: float, c: float) -> int:
    return _kernels.count_below(key, 0, n, epsilon, c)


def estimate(m: EpsilonMeasurement, p: MachineState, cfg: EstimatorConfig) -> FrequencyEstimate:
    c = cos_angle(m.direction, p.direction)
    jobs = [(stream_key(cfg.seed, j), n) for j, (_, n) in enumerate(cfg.shard_ranges())]
    if cfg.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            per_shard = list(pool.map(lambda job: _shard_count(job[0], job[1], m.epsilon, c), jobs))
    else:
        per_shard = [_shard_count(key, n, m.epsilon, c) for key, n in jobs]
    n1 = sum(per_shard)
    n = cfg.samples
    f1 = n1 / n
    analytic = outcome_probabilities(m, p).p1
    return FrequencyEstimate(
        counts={Outcome.O1: n1, Outcome.O2: n - n1},
        frequencies={Outcome.O1: f1, Outcome.O2: (n - n1) / n},
        standard_error=math.sqrt(f1 * (1.0 - f1) / n),
        z_vs_analytic=z_score(n1, n, analytic),
        analytic_p1=analytic,
    )


@dataclass(frozen=True)
class SweepRow:
    theta: float
    analytic_p1: float
    empirical_f1: float
    standard_error: float
    z: float


def state_at_angle(theta: float) -> MachineState:
    """State at polar angle ``theta`` from the +z measurement axis, in the xz plane."""
    return MachineState(UnitVector3.of(math.sin(theta), 0.0, math.cos(theta)))


Z_AXIS = UnitVector3(0.0, 0.0, 1.0)


def sweep_theta(epsilon: float, grid, cfg: EstimatorConfig) -> list[SweepRow]:
    """One estimate per grid angle, measured along +z.

    Grid point ``i`` runs under seed ``derive_seed(cfg.seed, i)``.
    """
    m = EpsilonMeasurement(Z_AXIS, epsilon)
    rows = []
    for i, theta in enumerate(grid):
        sub = EstimatorConfig(cfg.samples, derive_seed(cfg.seed, i), cfg.shards, cfg.workers)
        est = estimate(m, state_at_angle(theta), sub)
        rows.append(SweepRow(theta, est.analytic_p1, est.f1, est.standard_error, est.z_vs_analytic))
    return rows
