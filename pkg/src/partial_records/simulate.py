"""Monte Carlo estimation of record events with replayable keyed streams.

Determinism policy: the value at sequence index i in replication k comes
from a Philox stream keyed by (master_seed, i), element k.  A run streams
the plan positions in order, generating each needed column of n draws in
full; nested comparison sets mean a single running maximum per replication
suffices, and the previous candidate column is reused as the predecessor
comparison.  All tallies are exact integers, so results are bit-identical
regardless of thread count or memory layout, and any single draw can be
regenerated after the fact for auditing.

Guarantees exposed for gating: per-position frequencies against 1/c(n_t),
joint frequencies against the rational product, count mean/variance against
the exact moments, record-value sub-ecdf against the truncated series (DKW
radius available), and the ratio R_j / I_j for the almost-sure limit 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import IndexOutOfRange, RankTooLarge
from .plan import as_validated, check_positions
from . import exact as _exact


def column(master_seed, time_index, count, density):
    """The first `count` replication values at one sequence index.

    Keyed Philox stream, always generated from position 0 so that any
    prefix of a longer run reproduces exactly.
    """
    bitgen = np.random.Philox(key=np.array([master_seed, time_index], dtype=np.uint64))
    u = np.random.Generator(bitgen).random(int(count))
    return np.asarray(density.inverse_cdf(u), dtype=float)


def dkw_radius(n, alpha=1e-6):
    """Two-sided DKW envelope half-width for an n-sample ecdf."""
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * n))


@dataclass(frozen=True)
class SimConfig:
    """Everything that determines a run's output bytes.

    horizon defaults to the full plan; joint_positions selects an extra
    all-events tally; r_max tracks times and values of the first r_max
    records per replication; checkpoints are positions at which running
    count sums are snapshotted for the strong-law trajectory.
    """

    plan: object
    density: object
    replications: int
    master_seed: int
    horizon: int | None = None
    joint_positions: tuple = ()
    r_max: int = 0
    checkpoints: tuple = ()
    z: float = 4.0

    def resolved(self):
        vplan = as_validated(self.plan)
        horizon = vplan.length if self.horizon is None else int(self.horizon)
        if not 1 <= horizon <= vplan.length:
            raise IndexOutOfRange(f"horizon {horizon} not in 1..{vplan.length}")
        n = int(self.replications)
        if n < 1:
            raise ValueError(f"need at least one replication, got {self.replications}")
        joint = tuple(check_positions(vplan, self.joint_positions)) if self.joint_positions else ()
        if joint and joint[-1] > horizon:
            raise IndexOutOfRange(f"joint position {joint[-1]} beyond horizon {horizon}")
        r_max = int(self.r_max)
        if r_max < 0 or r_max > horizon:
            raise RankTooLarge(f"r_max {r_max} not in 0..{horizon}")
        checkpoints = tuple(sorted({int(t) for t in self.checkpoints}))
        if checkpoints and not (1 <= checkpoints[0] and checkpoints[-1] <= horizon):
            raise IndexOutOfRange(f"checkpoints {checkpoints} outside 1..{horizon}")
        return vplan, horizon, n, joint, r_max, checkpoints


@dataclass(frozen=True)
class CheckpointStat:
    """Running exact tallies of the record count at one plan position."""

    position: int
    time_index: int
    count_sum: int
    count_sq_sum: int


@dataclass(frozen=True)
class RunResult:
    config: SimConfig
    n: int
    horizon: int
    event_counts: tuple[int, ...]
    joint_count: int | None
    count_sum: int
    count_sq_sum: int
    tie_count: int
    checkpoint_stats: tuple[CheckpointStat, ...]
    record_times: dict = field(repr=False, default_factory=dict)
    record_values: dict = field(repr=False, default_factory=dict)

    @property
    def plan(self):
        return as_validated(self.config.plan)

    def event_frequency(self, t):
        if not 1 <= t <= self.horizon:
            raise IndexOutOfRange(f"position {t} not in 1..{self.horizon}")
        return self.event_counts[t - 1] / self.n

    def event_ci_radius(self, t):
        p = self.event_frequency(t)
        return self.config.z * math.sqrt(p * (1.0 - p) / self.n)

    @property
    def joint_frequency(self):
        return None if self.joint_count is None else self.joint_count / self.n

    @property
    def count_mean(self):
        return self.count_sum / self.n

    @property
    def count_variance(self):
        """Unbiased sample variance from the exact integer tallies."""
        if self.n < 2:
            return 0.0
        num = Fraction(self.count_sq_sum) - Fraction(self.count_sum) ** 2 / self.n
        return float(num / (self.n - 1))

    def times_of_record(self, r):
        if r not in self.record_times:
            raise RankTooLarge(f"rank {r} was not tracked (r_max too small)")
        return self.record_times[r]

    def values_of_record(self, r):
        if r not in self.record_values:
            raise RankTooLarge(f"rank {r} was not tracked (r_max too small)")
        return self.record_values[r]


def run(config):
    """Execute the full pass over plan positions.  See module docstring."""
    vplan, horizon, n, joint, r_max, checkpoints = config.resolved()
    seed = int(config.master_seed)
    density = config.density
    checkpoint_set = set(checkpoints)

    running_max = np.full(n, -np.inf)
    counts_per_rep = np.zeros(n, dtype=np.int32)
    event_counts = []
    joint_mask = np.ones(n, dtype=bool) if joint else None
    times = {r: np.zeros(n, dtype=np.int32) for r in range(1, r_max + 1)}
    values = {r: np.full(n, np.nan) for r in range(1, r_max + 1)}
    stats = []
    ties = 0
    prev_candidate = None

    for t in range(1, horizon + 1):
        for idx in vplan.fresh_sets[t - 1]:
            np.maximum(running_max, column(seed, idx, n, density), out=running_max)
        if prev_candidate is not None:
            np.maximum(running_max, prev_candidate, out=running_max)
        candidate = column(seed, vplan.index(t), n, density)
        ties += int(np.count_nonzero(candidate == running_max))
        indicator = candidate > running_max
        event_counts.append(int(np.count_nonzero(indicator)))
        counts_per_rep += indicator
        if joint_mask is not None and t in joint:
            joint_mask &= indicator
        for r in range(1, r_max + 1):
            hit = indicator & (counts_per_rep == r)
            if hit.any():
                times[r][hit] = t
                values[r][hit] = candidate[hit]
        if t in checkpoint_set:
            stats.append(
                CheckpointStat(
                    position=t,
                    time_index=vplan.index(t),
                    count_sum=int(counts_per_rep.sum(dtype=np.int64)),
                    count_sq_sum=int(
                        np.sum(counts_per_rep.astype(np.int64) ** 2)
                    ),
                )
            )
        prev_candidate = candidate

    return RunResult(
        config=config,
        n=n,
        horizon=horizon,
        event_counts=tuple(event_counts),
        joint_count=int(np.count_nonzero(joint_mask)) if joint_mask is not None else None,
        count_sum=int(counts_per_rep.sum(dtype=np.int64)),
        count_sq_sum=int(np.sum(counts_per_rep.astype(np.int64) ** 2)),
        tie_count=ties,
        checkpoint_stats=tuple(stats),
        record_times=times,
        record_values=values,
    )


@dataclass(frozen=True)
class RecordValueCurve:
    """Sub-probability ecdf of the r-th record value over a cutoff grid.

    Replications with no r-th record within the horizon count in n but never
    in the numerator, matching the truncated series convention.
    """

    r: int
    n: int
    grid: tuple[float, ...]
    ecdf: tuple[float, ...]
    with_record: int

    @property
    def no_record_fraction(self):
        return 1.0 - self.with_record / self.n


def record_value_ecdf(result, r, grid):
    """Empirical P(r-th record occurred and its value < x) on a grid."""
    vals = result.values_of_record(r)
    grid = tuple(float(x) for x in grid)
    ecdf = tuple(
        int(np.count_nonzero(vals < x)) / result.n for x in grid
    )
    with_record = int(np.count_nonzero(~np.isnan(vals)))
    return RecordValueCurve(r=r, n=result.n, grid=grid, ecdf=ecdf, with_record=with_record)


@dataclass(frozen=True)
class TrajectoryPoint:
    """Strong-law diagnostics at one checkpoint position."""

    position: int
    time_index: int
    mean_count: float
    intensity: float
    ratio: float
    ci_radius: float


def strong_law_trajectory(result):
    """R/I ratio with a CLT radius at each checkpoint of a finished run.

    Intensities and variances come from the exact per-position formulas but
    are accumulated in floats; the ratio tends to 1 almost surely as the
    intensity diverges.
    """
    vplan = result.plan
    inv_c = [1.0 / c for c in vplan.cardinalities]
    points = []
    for stat in result.checkpoint_stats:
        t = stat.position
        intensity = math.fsum(inv_c[:t])
        variance = math.fsum(p * (1.0 - p) for p in inv_c[:t])
        mean = stat.count_sum / result.n
        radius = result.config.z * math.sqrt(variance / result.n) / intensity
        points.append(
            TrajectoryPoint(
                position=t,
                time_index=stat.time_index,
                mean_count=mean,
                intensity=intensity,
                ratio=mean / intensity,
                ci_radius=radius,
            )
        )
    return tuple(points)


@dataclass(frozen=True)
class Replay:
    """One replication's draws and indicators, regenerated from keys."""

    replication: int
    draws: dict
    indicators: tuple[bool, ...]

    @property
    def record_count(self):
        return sum(self.indicators)


def replay(config, replication):
    """Recompute replication k of a run column by column.

    Used to audit batch results: regenerates each keyed column up to k+1
    elements and takes the last, so it matches the batch pass exactly.
    """
    vplan, horizon, n, _joint, _r_max, _checkpoints = config.resolved()
    k = int(replication)
    if not 0 <= k < n:
        raise IndexOutOfRange(f"replication {k} not in 0..{n - 1}")
    seed = int(config.master_seed)
    draws = {}
    for idx in vplan.drawn_indices(horizon):
        draws[idx] = float(column(seed, idx, k + 1, config.density)[k])
    indicators = []
    for t in range(1, horizon + 1):
        cand = draws[vplan.index(t)]
        members = vplan.comparison_set(t)
        best = max((draws[e] for e in members), default=-math.inf)
        indicators.append(cand > best)
    return Replay(replication=k, draws=draws, indicators=tuple(indicators))
