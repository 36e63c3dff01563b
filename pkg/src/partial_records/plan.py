"""Comparison plans: increasing time indices with nested comparison sets.

A plan selects time indices n_1 < n_2 < ... < n_T from an i.i.d. sequence and
attaches to each a comparison set C(n_t) of strictly earlier indices.  A
record occurs at position t when the value at time n_t strictly exceeds every
value indexed by C(n_t).  The closed-form laws in this package hold under two
compatibility conditions:

  (a1)  C(n_1) < C(n_2) < ... < C(n_T)   (strict set inclusion)
  (a2)  n_{t-1} in C(n_t)                 for every t >= 2

which make the record events along the subsequence mutually independent with
P(record at t) = 1/c(n_t) where c(n_t) = |C(n_t)| + 1.

Validated plans are stored lazily: only the indices, the per-position
cardinalities, and the per-position *fresh* comparison indices (those not
implied by the previous set and (a2)) are kept, so a total-comparison plan on
j = 10^5 indices costs O(j) memory rather than O(j^2).
"""

from __future__ import annotations

import hashlib
import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BadFirstIndex,
    EmptySelection,
    IndexOutOfRange,
    NegativeCutoff,
    PlanValidationError,
)

# violation kinds reported by validate()
NOT_STRICTLY_INCREASING = "NotStrictlyIncreasingIndices"
SET_OUT_OF_RANGE = "SetOutOfRange"
NOT_NESTED = "NotNested"
MISSING_PREDECESSOR = "MissingPredecessor"


@dataclass(frozen=True)
class Violation:
    """One validation failure at a plan position (1-based)."""

    kind: str
    position: int
    detail: str

    def __str__(self):
        return f"[{self.kind}] position {self.position}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    """Complete list of compatibility violations for a rejected plan."""

    violations: tuple[Violation, ...]

    def __post_init__(self):
        if not self.violations:
            raise ValueError("a validation report must carry at least one violation")

    def __str__(self):
        return "\n".join(str(v) for v in self.violations)

    def __len__(self):
        return len(self.violations)

    def kinds(self):
        return tuple(v.kind for v in self.violations)


@dataclass(frozen=True)
class ComparisonPlan:
    """Raw plan as supplied by the user, prior to compatibility validation.

    indices: the selected time indices (1-based positions in the sequence).
    comparison_sets: one set of earlier time indices per selected index.
    Construction only checks shape; semantic checks live in validate().
    """

    indices: tuple[int, ...]
    comparison_sets: tuple[frozenset[int], ...]

    def __post_init__(self):
        idx = tuple(int(n) for n in self.indices)
        sets = tuple(frozenset(int(e) for e in s) for s in self.comparison_sets)
        if len(idx) != len(sets):
            raise ValueError(
                f"{len(idx)} indices but {len(sets)} comparison sets"
            )
        if len(idx) == 0:
            raise ValueError("a plan needs at least one index")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "comparison_sets", sets)

    @property
    def length(self):
        return len(self.indices)


@dataclass(frozen=True)
class ValidatedPlan:
    """A plan that passed compatibility validation, stored lazily.

    fresh_sets[t-1] holds the comparison indices first appearing at position
    t, i.e. C(n_t) minus C(n_{t-1}) minus {n_{t-1}}.  The full set C(n_t) is
    the union of all fresh sets up to t plus the earlier selected indices.
    """

    indices: tuple[int, ...]
    cardinalities: tuple[int, ...]
    fresh_sets: tuple[tuple[int, ...], ...]

    @property
    def length(self):
        return len(self.indices)

    @property
    def max_index(self):
        return self.indices[-1]

    def index(self, t):
        """Time index n_t at subsequence position t (1-based)."""
        if not 1 <= t <= self.length:
            raise IndexOutOfRange(f"position {t} not in 1..{self.length}")
        return self.indices[t - 1]

    def cardinality(self, t):
        """c(n_t) = |C(n_t)| + 1, the record odds denominator at position t."""
        if not 1 <= t <= self.length:
            raise IndexOutOfRange(f"position {t} not in 1..{self.length}")
        return self.cardinalities[t - 1]

    def comparison_set(self, t):
        """Materialize C(n_t).  Costs O(|C(n_t)|)."""
        if not 1 <= t <= self.length:
            raise IndexOutOfRange(f"position {t} not in 1..{self.length}")
        members = set(self.indices[: t - 1])
        for fresh in self.fresh_sets[:t]:
            members.update(fresh)
        return frozenset(members)

    def drawn_indices(self, horizon=None):
        """All time indices a simulation must draw to resolve positions 1..horizon."""
        horizon = self.length if horizon is None else horizon
        if not 1 <= horizon <= self.length:
            raise IndexOutOfRange(f"horizon {horizon} not in 1..{self.length}")
        members = set(self.indices[:horizon])
        for fresh in self.fresh_sets[:horizon]:
            members.update(fresh)
        return tuple(sorted(members))

    def to_comparison_plan(self):
        """Materialize every comparison set.  Costs O(sum of |C(n_t)|)."""
        total = sum(c - 1 for c in self.cardinalities)
        if total > 20_000_000:
            raise MemoryError(
                f"materializing this plan needs {total} set entries; keep it lazy"
            )
        sets = []
        members = set()
        prev = None
        for n, fresh in zip(self.indices, self.fresh_sets):
            if prev is not None:
                members.add(prev)
            members.update(fresh)
            sets.append(frozenset(members))
            prev = n
        return ComparisonPlan(self.indices, tuple(sets))


def validate(plan):
    """Check compatibility; return a ValidatedPlan or a complete ValidationReport.

    Total on syntactically well-formed plans: every failure mode is reported
    (all positions are scanned), never raised.
    """
    idx = plan.indices
    sets = plan.comparison_sets
    violations = []

    for t in range(1, len(idx) + 1):
        n = idx[t - 1]
        if n < 1:
            violations.append(
                Violation(NOT_STRICTLY_INCREASING, t, f"index {n} is below 1")
            )
        elif t >= 2 and n <= idx[t - 2]:
            violations.append(
                Violation(
                    NOT_STRICTLY_INCREASING,
                    t,
                    f"index {n} does not exceed predecessor {idx[t - 2]}",
                )
            )
        bad = sorted(e for e in sets[t - 1] if not 1 <= e <= n - 1)
        if bad:
            violations.append(
                Violation(
                    SET_OUT_OF_RANGE,
                    t,
                    f"elements {bad} outside 1..{n - 1}",
                )
            )

    for t in range(2, len(idx) + 1):
        prev_set, cur_set = sets[t - 2], sets[t - 1]
        if not prev_set < cur_set:
            violations.append(
                Violation(
                    NOT_NESTED,
                    t,
                    f"C(n_{t}) must strictly contain C(n_{t - 1})",
                )
            )
        if idx[t - 2] not in cur_set:
            violations.append(
                Violation(
                    MISSING_PREDECESSOR,
                    t,
                    f"previous index {idx[t - 2]} missing from C(n_{t})",
                )
            )

    if violations:
        return ValidationReport(tuple(violations))

    cardinalities = tuple(len(s) + 1 for s in sets)
    # strict nesting forces strictly increasing cardinalities
    assert all(a < b for a, b in zip(cardinalities, cardinalities[1:]))

    fresh = []
    for t in range(1, len(idx) + 1):
        cur = sets[t - 1]
        if t == 1:
            fresh.append(tuple(sorted(cur)))
        else:
            implied = sets[t - 2] | {idx[t - 2]}
            fresh.append(tuple(sorted(cur - implied)))
    return ValidatedPlan(idx, cardinalities, tuple(fresh))


def as_validated(plan):
    """Accept a ValidatedPlan as-is; validate a ComparisonPlan or raise."""
    if isinstance(plan, ValidatedPlan):
        return plan
    result = validate(plan)
    if isinstance(result, ValidationReport):
        raise PlanValidationError(result)
    return result


def check_positions(vplan, positions):
    """Normalize a joint-event position selection.

    Requires a nonempty, strictly increasing tuple of 1-based positions
    within the plan.  Shared by the exact, oracle, simulation, and discrete
    layers so they agree on what a selection means.
    """
    positions = tuple(int(t) for t in positions)
    if not positions:
        raise EmptySelection("select at least one position")
    for a, b in zip(positions, positions[1:]):
        if b <= a:
            raise EmptySelection(f"positions must be strictly increasing, got {positions}")
    for t in positions:
        if not 1 <= t <= vplan.length:
            raise IndexOutOfRange(f"position {t} not in 1..{vplan.length}")
    return positions


def cumulative_intensity(plan, j, *, exact=True):
    """I_j = sum over positions with n_t <= j of 1/c(n_t).

    The expected number of records among the first j sequence indices.  With
    exact=True the sum is a Fraction; use exact=False for long plans where
    exact denominators blow up.
    """
    vplan = as_validated(plan)
    if j < 1:
        raise IndexOutOfRange(f"horizon j={j} must be at least 1")
    terms = itertools.takewhile(lambda pair: pair[0] <= j,
                                zip(vplan.indices, vplan.cardinalities))
    if exact:
        return sum((Fraction(1, c) for _, c in terms), Fraction(0))
    return math.fsum(1.0 / c for _, c in terms)


def total_comparison_plan(j):
    """The classical setup: every index 1..j compared against all predecessors.

    C(1) is empty (the first value is trivially a record), C(n) = {1..n-1},
    so c(n) = n and I_j is the j-th harmonic number.
    """
    j = int(j)
    if j < 1:
        raise IndexOutOfRange(f"need j >= 1, got {j}")
    indices = tuple(range(1, j + 1))
    cardinalities = indices
    fresh = ((),) * j
    return ValidatedPlan(indices, cardinalities, fresh)


def chained_plan(indices):
    """Each selected index compared against exactly the earlier selected ones.

    C(n_t) = {n_1, ..., n_{t-1}}, hence c(n_t) = t regardless of how the
    indices are spaced.  Requires n_1 = 1 so the first comparison set can be
    empty.
    """
    indices = tuple(int(n) for n in indices)
    if not indices:
        raise EmptySelection("need at least one index")
    if indices[0] != 1:
        raise BadFirstIndex(f"chained plans start at index 1, got {indices[0]}")
    for pos, (a, b) in enumerate(zip(indices, indices[1:]), start=2):
        if b <= a:
            raise PlanValidationError(
                ValidationReport(
                    (Violation(NOT_STRICTLY_INCREASING, pos,
                               f"index {b} does not exceed predecessor {a}"),)
                )
            )
    cardinalities = tuple(range(1, len(indices) + 1))
    fresh = ((),) * len(indices)
    return ValidatedPlan(indices, cardinalities, fresh)


class PlanBuilder:
    """Grow a compatible plan one position at a time.

    append() validates the new element against the current tail and raises
    PlanValidationError immediately on a violation, so a long streaming
    construction fails at the offending element instead of at the end.
    """

    def __init__(self):
        self._indices = []
        self._cardinalities = []
        self._fresh = []
        self._last_set = frozenset()

    @property
    def length(self):
        return len(self._indices)

    def append(self, index, comparison_set):
        index = int(index)
        comparison_set = frozenset(int(e) for e in comparison_set)
        t = len(self._indices) + 1
        violations = []
        if index < 1 or (self._indices and index <= self._indices[-1]):
            prev = self._indices[-1] if self._indices else 0
            violations.append(
                Violation(NOT_STRICTLY_INCREASING, t,
                          f"index {index} does not exceed predecessor {prev}")
            )
        bad = sorted(e for e in comparison_set if not 1 <= e <= index - 1)
        if bad:
            violations.append(
                Violation(SET_OUT_OF_RANGE, t, f"elements {bad} outside 1..{index - 1}")
            )
        if self._indices:
            if not self._last_set < comparison_set:
                violations.append(
                    Violation(NOT_NESTED, t,
                              f"C(n_{t}) must strictly contain C(n_{t - 1})")
                )
            if self._indices[-1] not in comparison_set:
                violations.append(
                    Violation(MISSING_PREDECESSOR, t,
                              f"previous index {self._indices[-1]} missing from C(n_{t})")
                )
        if violations:
            raise PlanValidationError(ValidationReport(tuple(violations)))

        if self._indices:
            implied = self._last_set | {self._indices[-1]}
            self._fresh.append(tuple(sorted(comparison_set - implied)))
        else:
            self._fresh.append(tuple(sorted(comparison_set)))
        self._indices.append(index)
        self._cardinalities.append(len(comparison_set) + 1)
        self._last_set = comparison_set
        return self

    def build(self):
        if not self._indices:
            raise EmptySelection("cannot build an empty plan")
        return ValidatedPlan(
            tuple(self._indices),
            tuple(self._cardinalities),
            tuple(self._fresh),
        )


def random_compatible_plan(rng, max_index=8, max_positions=None):
    """Draw a random plan satisfying (a1)/(a2) by construction.

    rng is a numpy Generator.  Indices are a random nonempty subset of
    1..max_index; each comparison set is the forced part (previous set plus
    previous index) plus a random selection of the remaining candidates.
    Fresh candidates join with probability 0.4 so small sets stay common.
    """
    max_index = int(max_index)
    if max_index < 1:
        raise IndexOutOfRange(f"need max_index >= 1, got {max_index}")
    cap = max_index if max_positions is None else min(int(max_positions), max_index)
    t_count = int(rng.integers(1, cap + 1))
    chosen = rng.choice(max_index, size=t_count, replace=False) + 1
    indices = tuple(int(n) for n in sorted(chosen))

    sets = []
    prev_set = frozenset()
    prev_idx = None
    for n in indices:
        base = set(prev_set)
        if prev_idx is not None:
            base.add(prev_idx)
        pool = [e for e in range(1, n) if e not in base]
        extras = {e for e in pool if rng.random() < 0.4}
        cur = frozenset(base | extras)
        sets.append(cur)
        prev_set, prev_idx = cur, n
    return ComparisonPlan(indices, tuple(sets))


@dataclass(frozen=True)
class EventTerm:
    """One conjunct of a joint record query: the event at one position,
    optionally negated."""

    position: int
    negated: bool = False


@dataclass(frozen=True)
class EventQuery:
    """Conjunction of record events (and negations) at increasing positions.

    An optional cutoff x turns the final (non-negated) event into
    {record at t and value < x}.
    """

    terms: tuple[EventTerm, ...]
    cutoff: float | Fraction | None = None

    def __post_init__(self):
        terms = tuple(self.terms)
        if not terms:
            raise EmptySelection("a query needs at least one term")
        for a, b in zip(terms, terms[1:]):
            if b.position <= a.position:
                raise EmptySelection("query positions must be strictly increasing")
        if self.cutoff is not None:
            if self.cutoff <= 0:
                raise NegativeCutoff(f"cutoff must be positive, got {self.cutoff}")
            if terms[-1].negated:
                raise EmptySelection("a cutoff applies to the last, non-negated term")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def positive(cls, positions, cutoff=None):
        return cls(tuple(EventTerm(int(t)) for t in positions), cutoff)

    def positions(self):
        return tuple(term.position for term in self.terms)


# ---------------------------------------------------------------------------
# JSON plan files: {"indices": [...], "comparison_sets": [[...], ...]}

def plan_to_json_dict(plan):
    if isinstance(plan, ValidatedPlan):
        plan = plan.to_comparison_plan()
    return {
        "indices": list(plan.indices),
        "comparison_sets": [sorted(s) for s in plan.comparison_sets],
    }


def plan_from_json_dict(obj):
    if not isinstance(obj, dict):
        raise ValueError("plan file must hold a JSON object")
    missing = {"indices", "comparison_sets"} - set(obj)
    if missing:
        raise ValueError(f"plan object missing keys: {sorted(missing)}")
    indices = obj["indices"]
    sets = obj["comparison_sets"]
    if not isinstance(indices, list) or not all(
        isinstance(n, int) and not isinstance(n, bool) for n in indices
    ):
        raise ValueError("indices must be a list of integers")
    if not isinstance(sets, list):
        raise ValueError("comparison_sets must be a list of lists")
    parsed = []
    for k, s in enumerate(sets):
        if not isinstance(s, list) or not all(
            isinstance(e, int) and not isinstance(e, bool) for e in s
        ):
            raise ValueError(f"comparison_sets[{k}] must be a list of integers")
        if len(set(s)) != len(s):
            raise ValueError(f"comparison_sets[{k}] has duplicate entries")
        parsed.append(frozenset(s))
    return ComparisonPlan(tuple(indices), tuple(parsed))


def load_plan_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from exc
    return plan_from_json_dict(obj)


def save_plan_file(plan, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plan_to_json_dict(plan), fh, sort_keys=True)
        fh.write("\n")


def plan_hash(plan):
    """Stable content hash of the canonical JSON form."""
    canon = json.dumps(plan_to_json_dict(plan), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()
