"""Discrete approximation of record laws on the grid {0, 1/m, ..., M}.

A density f on [0, M] induces atoms g_m(l) proportional to f(l/m) at the
grid points l/m.  Records under the discrete model use strict exceedance, so
ties (which now have positive probability) break against a new record.  Key
quantities:

* G_m(l) = sum of g_m(l1) over l1 < l, the strictly-below prefix mass;
* theta(l) = (1/m) * sum over l1 < l of F^{r-1}(l1/m) f(l1/m), the left
  Riemann sum of the integral F^r(l/m)/r that drives the continuous laws;
* an exact forward recursion for joint record probabilities, whose value
  converges to the continuous product formula at rate O(1/m) with constant
  controlled by the density's smoothness bound.

All computations stay in exact rational arithmetic whenever the density
carries pdf_fraction/cdf_fraction hooks, so grid identities (and the
deviations themselves) are free of rounding noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BadParams,
    IndexOutOfRange,
    NonIntegerGrid,
    UnboundedSupport,
    ZeroMass,
)
from .plan import as_validated, check_positions
from . import exact as _exact


@dataclass(frozen=True)
class DiscreteModel:
    """Normalized atoms of a density sampled on {l/m : l = 0..top_index}."""

    m: int
    density_name: str
    masses: tuple
    prefix: tuple  # prefix[l] = sum of masses strictly below atom l, length top+2
    exact: bool

    @property
    def atom_count(self):
        return len(self.masses)

    @property
    def top_index(self):
        return len(self.masses) - 1

    def atom_value(self, l):
        if not 0 <= l <= self.top_index:
            raise IndexOutOfRange(f"atom {l} not in 0..{self.top_index}")
        return Fraction(l, self.m) if self.exact else l / self.m

    def mass(self, l):
        if not 0 <= l <= self.top_index:
            raise IndexOutOfRange(f"atom {l} not in 0..{self.top_index}")
        return self.masses[l]

    def below(self, l):
        """G_m(l): total mass strictly below atom l, for l in 0..top_index+1."""
        if not 0 <= l <= self.top_index + 1:
            raise IndexOutOfRange(f"l={l} not in 0..{self.top_index + 1}")
        return self.prefix[l]


def _grid_top(density, m):
    if not density.bounded:
        raise UnboundedSupport("discretization needs a bounded support")
    top = density.support_upper * m
    rounded = round(top)
    if abs(top - rounded) > 1e-9 or rounded < 1:
        raise NonIntegerGrid(
            f"support bound {density.support_upper} times m={m} is not a positive integer"
        )
    return int(rounded)


def discretize(density, m):
    """Build the discrete model with atoms proportional to f(l/m)."""
    m = int(m)
    if m < 1:
        raise BadParams(f"grid resolution m must be >= 1, got {m}")
    top = _grid_top(density, m)

    if density.pdf_fraction is not None:
        raw = [density.pdf_fraction(Fraction(l, m)) for l in range(top + 1)]
        total = sum(raw, Fraction(0))
        if total == 0:
            raise ZeroMass(f"{density.name} vanishes on the whole m={m} grid")
        masses = tuple(v / total for v in raw)
        prefix = [Fraction(0)]
        for v in masses:
            prefix.append(prefix[-1] + v)
        return DiscreteModel(m, density.name, masses, tuple(prefix), True)

    raw = [float(density.pdf(l / m)) for l in range(top + 1)]
    total = math.fsum(raw)
    if total <= 0:
        raise ZeroMass(f"{density.name} vanishes on the whole m={m} grid")
    masses = tuple(v / total for v in raw)
    prefix = [0.0]
    for v in masses:
        prefix.append(prefix[-1] + v)
    prefix[-1] = 1.0
    return DiscreteModel(m, density.name, masses, tuple(prefix), False)


def _cdf_on_grid(density, m, top, exact):
    """F(l/m) for l = 0..top+1 (clamped to 1 past the support)."""
    if exact:
        vals = [density.cdf_fraction(Fraction(l, m)) for l in range(top + 1)]
        vals.append(Fraction(1))
        return vals
    vals = [float(density.cdf(l / m)) for l in range(top + 1)]
    vals.append(1.0)
    return vals


def _pdf_on_grid(density, m, top, exact):
    if exact:
        return [density.pdf_fraction(Fraction(l, m)) for l in range(top + 1)]
    return [float(density.pdf(l / m)) for l in range(top + 1)]


def _use_exact(density):
    return density.pdf_fraction is not None and density.cdf_fraction is not None


def theta(density, m, l, r=1):
    """Left Riemann sum (1/m) * sum_{l1 < l} F^(r-1)(l1/m) f(l1/m).

    Approximates F^r(l/m)/r, the limit object behind the discrete record
    laws.  l may run to top_index+1 (the full-grid sum).
    """
    m = int(m)
    if m < 1:
        raise BadParams(f"grid resolution m must be >= 1, got {m}")
    top = _grid_top(density, m)
    if not 0 <= l <= top + 1:
        raise IndexOutOfRange(f"l={l} not in 0..{top + 1}")
    if r < 1:
        raise BadParams(f"power r must be >= 1, got {r}")
    exact = _use_exact(density)
    cdf = _cdf_on_grid(density, m, top, exact)
    pdf = _pdf_on_grid(density, m, top, exact)
    if exact:
        return sum(
            (cdf[l1] ** (r - 1) * pdf[l1] for l1 in range(l)), Fraction(0)
        ) / m
    return math.fsum(cdf[l1] ** (r - 1) * pdf[l1] for l1 in range(l)) / m


@dataclass(frozen=True)
class LemmaDeviation:
    """Worst grid deviation of one discrete-vs-continuous identity."""

    relation: str
    r: int
    m: int
    deviation: object  # Fraction when exact, else float
    argmax_l: int

    @property
    def deviation_float(self):
        return float(self.deviation)

    @property
    def scaled(self):
        """m * deviation, the quantity the O(1/m) bound keeps bounded."""
        return self.m * self.deviation


def lemma_checks(density, m, r=1):
    """Deviations of the three grid identities underlying the O(1/m) rate.

    normalization:       (1/m) sum f(l/m)            vs  1
    riemann_theta:       theta(l)                    vs  F^r(l/m)/r
    weighted_power_sum:  sum_{l1<l} G^(r-1)(l1)g(l1) vs  F^r(l/m)/r
    cum_vs_cdf:          G_m(l)                      vs  F(l/m)

    Maxima are over the atom grid l = 0..top_index (normalization is a
    single full-grid deviation, reported with argmax_l = top_index + 1).
    Exact rational when the density has Fraction hooks.  Returns
    {relation: LemmaDeviation}.
    """
    m = int(m)
    if m < 1:
        raise BadParams(f"grid resolution m must be >= 1, got {m}")
    if r < 1:
        raise BadParams(f"power r must be >= 1, got {r}")
    top = _grid_top(density, m)
    exact = _use_exact(density)
    cdf = _cdf_on_grid(density, m, top, exact)
    pdf = _pdf_on_grid(density, m, top, exact)
    model = discretize(density, m)

    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0

    total = sum(pdf, zero) if exact else math.fsum(pdf)
    out = {
        "normalization": LemmaDeviation(
            "normalization", r, m, abs(total / m - one), top + 1
        )
    }

    def running_max(name, deviations):
        best, arg = zero, 0
        for l, dev in enumerate(deviations):
            if dev > best:
                best, arg = dev, l
        return LemmaDeviation(name, r, m, best, arg)

    theta_devs = []
    acc = zero
    for l in range(top + 1):
        theta_devs.append(abs(acc / m - cdf[l] ** r / r))
        acc += cdf[l] ** (r - 1) * pdf[l]
    out["riemann_theta"] = running_max("riemann_theta", theta_devs)

    weighted_devs = []
    acc = zero
    for l in range(top + 1):
        weighted_devs.append(abs(acc - cdf[l] ** r / r))
        acc += model.prefix[l] ** (r - 1) * model.masses[l]
    out["weighted_power_sum"] = running_max("weighted_power_sum", weighted_devs)

    cum_devs = [abs(model.prefix[l] - cdf[l]) for l in range(top + 1)]
    out["cum_vs_cdf"] = running_max("cum_vs_cdf", cum_devs)
    return out


def record_point_masses(plan, positions, model):
    """b[l] = P(all selected events hold and the last selected value is atom l).

    Forward recursion: at each level the new value must strictly exceed the
    comparison values added since the previous level (prefix mass G to the
    power of the cardinality gap minus one) and the previous level's value
    (its strictly-below cumulative).
    """
    vplan = as_validated(plan)
    positions = check_positions(vplan, positions)
    g = model.masses
    big_g = model.prefix
    atoms = model.atom_count

    level = None  # cumulative of previous level's point masses, strictly below
    prev_card = 0
    point = None
    for t in positions:
        gap = vplan.cardinality(t) - prev_card - 1
        if level is None:
            point = [big_g[l] ** gap * g[l] for l in range(atoms)]
        else:
            point = [big_g[l] ** gap * g[l] * level[l] for l in range(atoms)]
        cum = [Fraction(0) if model.exact else 0.0]
        for v in point:
            cum.append(cum[-1] + v)
        level = cum
        prev_card = vplan.cardinality(t)
    return tuple(point)


def joint_record_prob_discrete(plan, positions, model):
    """P(records at all selected positions) under the discrete model.

    Exact rational when the model is exact; converges to the continuous
    product of 1/c(n_t) as m grows, with error O(1/m).
    """
    point = record_point_masses(plan, positions, model)
    if model.exact:
        return sum(point, Fraction(0))
    return math.fsum(point)


def bounded_profile(plan, positions, model):
    """B(l) = P(all selected events hold, last value strictly below atom l).

    Length top_index + 2; B(top+1) is the unconditional joint probability.
    """
    point = record_point_masses(plan, positions, model)
    cum = [Fraction(0) if model.exact else 0.0]
    for v in point:
        cum.append(cum[-1] + v)
    return tuple(cum)


def profile_vs_continuous(plan, positions, model, density):
    """Compare the discrete bounded profile to the continuous candidate laws.

    The continuous candidate at cutoff l/m is prod(1/c) * F(l/m)^e with the
    exponent e at the last selected position read either as the cardinality
    c(n_t) or the raw time index n_t.  Returns the max deviation over the
    grid for both conventions; the one vanishing as m grows identifies the
    correct exponent.
    """
    vplan = as_validated(plan)
    positions = check_positions(vplan, positions)
    profile = bounded_profile(vplan, positions, model)
    base = _exact.joint_record_prob(vplan, positions)
    top = model.top_index
    exact = _use_exact(density)
    cdf = _cdf_on_grid(density, model.m, top, exact)

    out = {}
    for convention in _exact.EXPONENT_CONVENTIONS:
        e = (
            vplan.cardinality(positions[-1])
            if convention == "cardinality"
            else vplan.index(positions[-1])
        )
        dev = max(
            abs(float(profile[l]) - float(base) * float(cdf[l]) ** e)
            for l in range(top + 2)
        )
        out[convention] = dev
    return out


@dataclass(frozen=True)
class SweepRow:
    """One resolution step of the discrete-vs-continuous error sweep."""

    m: int
    discrete: object
    continuous: object
    abs_error: object

    @property
    def scaled(self):
        return self.m * self.abs_error


def error_sweep(plan, positions, density, m_values):
    """Discrete joint probability against the continuous product over m.

    The scaled column m * |error| staying bounded is the O(1/m) guarantee
    in action; rows are exact rationals when the density has hooks.
    """
    vplan = as_validated(plan)
    positions = check_positions(vplan, positions)
    target = _exact.joint_record_prob(vplan, positions)
    rows = []
    for m in m_values:
        model = discretize(density, m)
        value = joint_record_prob_discrete(vplan, positions, model)
        if model.exact:
            err = abs(value - target)
        else:
            err = abs(float(value) - float(target))
        rows.append(SweepRow(m=int(m), discrete=value, continuous=target, abs_error=err))
    return tuple(rows)
