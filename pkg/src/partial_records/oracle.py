"""Independent verification oracles for record-event probabilities.

Three oracles, none of which share code paths with the closed forms they
check:

* exact_joint / exact_joint_table enumerate rank orderings of the relevant
  indices.  For continuous i.i.d. values every ordering of distinct values
  is equally likely, so any record-event probability is (#orderings where
  the event holds) / k!, an exact rational.

* quadrature_bounded integrates the defining recursion for joint record
  events with a value cutoff: level k conditions on the value z at the k-th
  selected position, multiplies the density f(z) by F(z) raised to the
  number of additional comparisons that must fall below z, and integrates
  the previous level against it.

* exhaustive_discrete_joint enumerates every outcome of the relevant atoms
  of a discrete model and adds up the probabilities of outcomes where all
  selected strict-exceedance events hold.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import (
    NegativeCutoff,
    QuadratureFailure,
    StateSpaceTooLarge,
    TooManyIndices,
)
from .plan import EventQuery, as_validated, check_positions

_PERM_CACHE: dict[int, np.ndarray] = {}
_PERM_LIMIT = 10


def _perm_table(k):
    """All orderings of k items as a (k!, k) array of ranks."""
    if k > _PERM_LIMIT:
        raise TooManyIndices(
            f"{k} relevant indices implies {k}! orderings; limit is {_PERM_LIMIT}"
        )
    if k not in _PERM_CACHE:
        _PERM_CACHE[k] = np.array(
            list(itertools.permutations(range(k))), dtype=np.int8
        )
    return _PERM_CACHE[k]


def relevant_indices(plan, positions):
    """Sequence indices whose relative order decides the selected events."""
    vplan = as_validated(plan)
    positions = check_positions(vplan, positions)
    rel = set()
    for t in positions:
        rel.add(vplan.index(t))
        rel.update(vplan.comparison_set(t))
    return tuple(sorted(rel))


def _event_masks(vplan, positions, rel, perms):
    col = {idx: j for j, idx in enumerate(rel)}
    masks = []
    for t in positions:
        cand = perms[:, col[vplan.index(t)]]
        members = [col[e] for e in sorted(vplan.comparison_set(t))]
        if members:
            masks.append(cand > perms[:, members].max(axis=1))
        else:
            masks.append(np.ones(perms.shape[0], dtype=bool))
    return masks


def exact_joint(plan, query, max_indices=_PERM_LIMIT):
    """Exact probability of a conjunction of (possibly negated) record events.

    query is an EventQuery without a cutoff (use quadrature_bounded for
    cutoffs).  Enumerates orderings of the relevant indices, so the union of
    the involved comparison sets must stay small.
    """
    if isinstance(query, EventQuery):
        if query.cutoff is not None:
            raise ValueError("cutoff queries need a density; use quadrature_bounded")
        terms = query.terms
    else:
        terms = EventQuery.positive(query).terms
    vplan = as_validated(plan)
    positions = tuple(term.position for term in terms)
    rel = relevant_indices(vplan, positions)
    if len(rel) > max_indices:
        raise TooManyIndices(
            f"{len(rel)} relevant indices exceeds requested cap {max_indices}"
        )
    perms = _perm_table(len(rel))
    masks = _event_masks(vplan, positions, rel, perms)
    combined = np.ones(perms.shape[0], dtype=bool)
    for term, mask in zip(terms, masks):
        combined &= ~mask if term.negated else mask
    return Fraction(int(np.count_nonzero(combined)), math.factorial(len(rel)))


def exact_joint_table(plan, positions=None, max_indices=_PERM_LIMIT):
    """Joint probability of every nonempty subset of the selected positions.

    One enumeration pass: each ordering is coded by the set of positions
    whose event it satisfies, then subset counts come from summing codes
    over supersets.  Returns {subset tuple: Fraction}.
    """
    vplan = as_validated(plan)
    if positions is None:
        positions = tuple(range(1, vplan.length + 1))
    positions = check_positions(vplan, positions)
    rel = relevant_indices(vplan, positions)
    if len(rel) > max_indices:
        raise TooManyIndices(
            f"{len(rel)} relevant indices exceeds requested cap {max_indices}"
        )
    perms = _perm_table(len(rel))
    masks = _event_masks(vplan, positions, rel, perms)

    bits = len(positions)
    code = np.zeros(perms.shape[0], dtype=np.int64)
    for b, mask in enumerate(masks):
        code |= mask.astype(np.int64) << b
    counts = np.bincount(code, minlength=1 << bits).astype(np.int64)
    for b in range(bits):
        bit = 1 << b
        for m in range(1 << bits):
            if not m & bit:
                counts[m] += counts[m | bit]

    total = math.factorial(len(rel))
    table = {}
    for m in range(1, 1 << bits):
        subset = tuple(positions[b] for b in range(bits) if m >> b & 1)
        table[subset] = Fraction(int(counts[m]), total)
    return table


def quadrature_bounded(plan, positions, x, density, tol=1e-10, max_cells=1 << 16):
    """Numerically integrate P(all selected events hold, last value < x).

    Builds the level functions B_k(z) on a uniform grid by cumulative
    Simpson integration, doubling the grid until two refinements agree to
    tol.  Independent of the closed-form product and of the exponent
    convention it is used to check.
    """
    vplan = as_validated(plan)
    positions = check_positions(vplan, positions)
    if x <= 0:
        raise NegativeCutoff(f"cutoff must be positive, got {x}")
    upper = min(float(x), density.support_upper)

    cards = [vplan.cardinality(t) for t in positions]
    previous = None
    cells = 1024
    while cells <= max_cells:
        z = np.linspace(0.0, upper, cells + 1)
        fs = np.asarray(density.pdf(z), dtype=float)
        cdfs = np.asarray(density.cdf(z), dtype=float)
        level = None
        prev_card = 0
        for c in cards:
            integrand = np.power(cdfs, c - prev_card - 1) * fs
            if level is not None:
                integrand *= level
            level = cumulative_simpson(integrand, x=z, initial=0.0)
            prev_card = c
        value = float(level[-1])
        if previous is not None and abs(value - previous) < tol:
            return value
        previous = value
        cells *= 2
    raise QuadratureFailure(
        f"no convergence below {tol} within {max_cells} cells (last delta "
        f"{abs(value - previous):.3e})"
    )


def exhaustive_discrete_joint(plan, positions, model, max_outcomes=4_000_000):
    """Enumerate all atom assignments of a discrete model; exact when the
    model is.

    The relevant indices each take one of the model's atoms independently;
    an outcome contributes its product probability when every selected
    position's value strictly exceeds all values in its comparison set.
    """
    vplan = as_validated(plan)
    positions = check_positions(vplan, positions)
    rel = relevant_indices(vplan, positions)
    k = len(rel)
    atoms = model.atom_count
    outcomes = atoms**k
    if outcomes > max_outcomes:
        raise StateSpaceTooLarge(
            f"{atoms}^{k} = {outcomes} outcomes exceeds cap {max_outcomes}"
        )

    col = {idx: j for j, idx in enumerate(rel)}
    codes = np.arange(outcomes, dtype=np.int64)
    vals = np.empty((outcomes, k), dtype=np.int32)
    for j in range(k):
        vals[:, j] = (codes // atoms ** (k - 1 - j)) % atoms

    mask = np.ones(outcomes, dtype=bool)
    for t in positions:
        cand = vals[:, col[vplan.index(t)]]
        members = [col[e] for e in sorted(vplan.comparison_set(t))]
        if members:
            mask &= cand > vals[:, members].max(axis=1)

    if model.exact:
        denom = math.lcm(*(mass.denominator for mass in model.masses))
        weights = [int(mass * denom) for mass in model.masses]
        if denom**k * outcomes < 2**62:
            warr = np.array(weights, dtype=np.int64)
            prods = np.prod(warr[vals], axis=1)
            return Fraction(int(prods[mask].sum()), denom**k)
        # weights too large for int64 products: fall back to exact big ints
        total = 0
        for row in vals[mask]:
            term = 1
            for l in row:
                term *= weights[l]
            total += term
        return Fraction(total, denom**k)

    weights = np.array([float(mass) for mass in model.masses])
    prods = np.prod(weights[vals], axis=1)
    return float(prods[mask].sum())
