"""Closed-form record laws for compatible plans under a continuous density.

Everything here is distribution-free except the record-value CDF: for a
compatible plan the record indicators at positions t = 1..T are independent
Bernoulli(1/c(n_t)), which gives exact rational answers for single events,
joint events, and the count moments, and makes the r-th record time L(r) the
r-th success time of an independent-but-not-identical Bernoulli sequence.

The record-value law mixes in the density: conditionally on the r-th record
happening at position t with cutoff x, the record value falls below x with
probability F(x) raised to the number of values the record had to beat plus
itself, i.e. exponent c(n_t).  The exponent convention is parameterized
("cardinality" for c(n_t), "time_index" for n_t) because the two only agree
on total-comparison plans; Monte Carlo checks discriminate between them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import IndexOutOfRange, RankTooLarge
from .plan import as_validated, check_positions

EULER_GAMMA = 0.5772156649015329

EXPONENT_CONVENTIONS = ("cardinality", "time_index")


def harmonic_number(j):
    """H_j = 1 + 1/2 + ... + 1/j as an exact Fraction."""
    j = int(j)
    if j < 1:
        raise IndexOutOfRange(f"need j >= 1, got {j}")
    return sum((Fraction(1, i) for i in range(1, j + 1)), Fraction(0))


def record_prob(plan, t):
    """P(record at position t) = 1/c(n_t)."""
    vplan = as_validated(plan)
    (t,) = check_positions(vplan, (t,))
    return Fraction(1, vplan.cardinality(t))


def joint_record_prob(plan, positions):
    """P(records at every selected position) = product of 1/c(n_t).

    Holds by mutual independence of the record events along a compatible
    plan; positions must be strictly increasing.
    """
    vplan = as_validated(plan)
    positions = check_positions(vplan, positions)
    prob = Fraction(1)
    for t in positions:
        prob /= vplan.cardinality(t)
    return prob


def joint_record_prob_bounded(plan, positions, x, density, exponent="cardinality"):
    """P(records at the selected positions, with the last value below x).

    Equals the unconstrained joint probability times F(x)^e where the
    exponent e at the last selected position follows the chosen convention.
    """
    vplan = as_validated(plan)
    positions = check_positions(vplan, positions)
    base = joint_record_prob(vplan, positions)
    fx = float(density.cdf(x))
    e = _exponent(vplan, positions[-1], exponent)
    return float(base) * fx**e


def _exponent(vplan, t, convention):
    if convention == "cardinality":
        return vplan.cardinality(t)
    if convention == "time_index":
        return vplan.index(t)
    raise ValueError(f"exponent must be one of {EXPONENT_CONVENTIONS}, got {convention!r}")


@dataclass(frozen=True)
class RecordCountStats:
    """Exact moments of the record count R_j over sequence indices <= j."""

    j: int
    positions_used: int
    mean: Fraction
    variance: Fraction

    @property
    def mean_float(self):
        return float(self.mean)

    @property
    def variance_float(self):
        return float(self.variance)


def record_count_moments(plan, j):
    """Mean and variance of the number of records among indices <= j.

    mean = I_j = sum 1/c(n_t); variance = sum (1/c)(1 - 1/c), both over
    positions with n_t <= j.  Variance never exceeds the mean.
    """
    vplan = as_validated(plan)
    j = int(j)
    if j < 1:
        raise IndexOutOfRange(f"need j >= 1, got {j}")
    mean = Fraction(0)
    var = Fraction(0)
    used = 0
    for n, c in zip(vplan.indices, vplan.cardinalities):
        if n > j:
            break
        p = Fraction(1, c)
        mean += p
        var += p * (1 - p)
        used += 1
    return RecordCountStats(j=j, positions_used=used, mean=mean, variance=var)


@dataclass(frozen=True)
class PmfEntry:
    """P(L(r) = n_t): the r-th record happens exactly at position t."""

    position: int
    time_index: int
    probability: Fraction


@dataclass(frozen=True)
class RecordTimePmf:
    r: int
    t_max: int
    entries: tuple[PmfEntry, ...]
    residual: Fraction  # P(fewer than r records within positions 1..t_max)

    def probability_at(self, t):
        for entry in self.entries:
            if entry.position == t:
                return entry.probability
        return Fraction(0)


def record_time_pmf(plan, r, t_max=None):
    """Distribution of the r-th record time over plan positions 1..t_max.

    L(r) is the r-th success time of independent Bernoulli(1/c(n_t)) trials.
    Computed by exact forward substitution on the number of successes so far
    (states capped at r-1 once a trajectory is still short of r).  Entries
    start at position r since fewer trials cannot carry r successes.
    """
    vplan = as_validated(plan)
    r = int(r)
    if r < 1:
        raise RankTooLarge(f"record rank must be >= 1, got {r}")
    t_max = vplan.length if t_max is None else int(t_max)
    if not 1 <= t_max <= vplan.length:
        raise IndexOutOfRange(f"t_max {t_max} not in 1..{vplan.length}")
    if r > t_max:
        raise RankTooLarge(f"rank {r} cannot occur within {t_max} positions")

    # state[s] = P(exactly s records so far, s < r)
    state = [Fraction(0)] * r
    state[0] = Fraction(1)
    entries = []
    for t in range(1, t_max + 1):
        p = Fraction(1, vplan.cardinality(t))
        hit = state[r - 1] * p
        if t >= r:
            entries.append(PmfEntry(t, vplan.index(t), hit))
        for s in range(r - 1, 0, -1):
            state[s] = state[s] * (1 - p) + state[s - 1] * p
        state[0] = state[0] * (1 - p)
    residual = sum(state, Fraction(0))
    assert residual + sum((e.probability for e in entries), Fraction(0)) == 1
    return RecordTimePmf(r=r, t_max=t_max, entries=tuple(entries), residual=residual)


@dataclass(frozen=True)
class CdfInterval:
    """Two-sided truncation bracket for a series evaluated to t_max terms."""

    lower: float
    upper: float

    @property
    def width(self):
        return self.upper - self.lower


def record_value_cdf(plan, r, x, density, t_max=None, exponent="cardinality"):
    """P(r-th record occurs by position t_max and its value is below x).

    Series sum of F(x)^e(t) * P(L(r) = n_t) over t <= t_max.  When t_max is
    the final plan position this is the exact (sub-probability) law, so the
    bracket collapses; when the plan extends past t_max every omitted term
    carries an exponent at least e(t_max + 1), so the tail the full plan
    would add is at most residual * F(x)^e(t_max + 1).
    """
    vplan = as_validated(plan)
    pmf = record_time_pmf(vplan, r, t_max)
    fx = float(density.cdf(x))
    terms = [
        float(entry.probability) * fx ** _exponent(vplan, entry.position, exponent)
        for entry in pmf.entries
    ]
    lower = math.fsum(terms)
    if pmf.t_max < vplan.length:
        tail = float(pmf.residual) * fx ** _exponent(vplan, pmf.t_max + 1, exponent)
    else:
        tail = 0.0
    upper = min(1.0, lower + tail)
    return CdfInterval(lower=lower, upper=upper)


def asymptotic_gap_to_log(j):
    """H_j - ln j, which decreases to the Euler-Mascheroni constant."""
    return float(harmonic_number(j)) - math.log(j)
