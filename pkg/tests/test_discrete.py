"""Grid discretization, the exact recursion, and O(1/m) convergence.

Derived values were confirmed against the exhaustive discrete oracle before
freezing (see test_oracle.py for the oracle's own pinning).
"""

from fractions import Fraction

import numpy as np
import pytest

import partial_records as pr


def test_discretize_uniform_masses():
    model = pr.discretize(pr.uniform01(), 4)
    assert model.exact
    assert model.atom_count == 5
    assert model.masses == (Fraction(1, 5),) * 5
    assert model.below(0) == 0
    assert model.below(3) == Fraction(3, 5)
    assert model.below(5) == 1
    assert model.atom_value(3) == Fraction(3, 4)


def test_discretize_triangular_masses():
    model = pr.discretize(pr.triangular_density(), 4)
    # f at 0, 1/4, 1/2, 3/4, 1 is 0, 1, 2, 1, 0 before normalization
    assert model.masses == (0, Fraction(1, 4), Fraction(1, 2), Fraction(1, 4), 0)


def test_discretize_rejections():
    with pytest.raises(pr.ZeroMass):
        pr.discretize(pr.smoothstep_density(), 1)  # f(0) = f(1) = 0
    with pytest.raises(pr.BadParams):
        pr.discretize(pr.uniform01(), 0)
    unbounded = pr.DensitySpec(
        name="expish",
        support_upper=float("inf"),
        pdf=lambda x: np.exp(-np.asarray(x, dtype=float)),
        cdf=lambda x: 1.0 - np.exp(-np.asarray(x, dtype=float)),
        inverse_cdf=lambda u: -np.log1p(-np.asarray(u, dtype=float)),
    )
    with pytest.raises(pr.UnboundedSupport):
        pr.discretize(unbounded, 4)


def test_single_event_uniform_closed_form():
    # frozen after exhaustive enumeration: P_m = m / (2(m+1)) for c = 2
    plan = pr.total_comparison_plan(3)
    for m in (2, 10, 64):
        model = pr.discretize(pr.uniform01(), m)
        assert pr.joint_record_prob_discrete(plan, (2,), model) == Fraction(m, 2 * (m + 1))
    assert pr.joint_record_prob_discrete(
        plan, (2,), pr.discretize(pr.uniform01(), 2)
    ) == Fraction(1, 3)


def test_joint_recursion_matches_exhaustive_oracle(total5):
    densities = (pr.uniform01(), pr.power_density(2), pr.smoothstep_density())
    for density in densities:
        for m in (2, 5):
            if density.name == "smoothstep" and m == 1:
                continue
            model = pr.discretize(density, m)
            for positions in ((2,), (3,), (2, 3), (2, 4), (2, 3, 4)):
                dp = pr.joint_record_prob_discrete(total5, positions, model)
                oracle = pr.exhaustive_discrete_joint(total5, positions, model)
                assert dp == oracle, (density.name, m, positions)


def test_uniform_m2_joint_frozen_value():
    plan = pr.total_comparison_plan(3)
    model = pr.discretize(pr.uniform01(), 2)
    assert pr.joint_record_prob_discrete(plan, (2, 3), model) == Fraction(1, 27)


def test_smoothstep_m8_frozen_value(total5):
    model = pr.discretize(pr.smoothstep_density(), 8)
    assert pr.joint_record_prob_discrete(total5, (2, 3), model) == Fraction(14479, 148176)


def test_theta_exact_values():
    # uniform, r=1: left Riemann sum of 1 is exactly l/m
    for l in range(0, 5):
        assert pr.theta(pr.uniform01(), 4, l) == Fraction(l, 4)
    # smoothstep, m=4, l=3, r=2: frozen rational hand-sum
    assert pr.theta(pr.smoothstep_density(), 4, 3, r=2) == Fraction(237, 1024)
    with pytest.raises(pr.IndexOutOfRange):
        pr.theta(pr.uniform01(), 4, 6)


def test_lemma_uniform_closed_forms():
    # frozen closed forms: dev(cum_vs_cdf) = 1/(m+1), dev(normalization) = 1/m,
    # theta at r=1 is exact on the grid
    for m in (8, 16, 128):
        checks = pr.lemma_checks(pr.uniform01(), m, r=1)
        assert checks["cum_vs_cdf"].deviation == Fraction(1, m + 1)
        assert checks["weighted_power_sum"].deviation == Fraction(1, m + 1)
        assert checks["normalization"].deviation == Fraction(1, m)
        assert checks["riemann_theta"].deviation == 0


def test_lemma_smoothstep_normalization_is_inverse_square():
    # sum f(l/m)/m = 1 - 1/m^2 exactly, so the doubling ratio is exactly 1/4
    for m in (8, 32):
        checks = pr.lemma_checks(pr.smoothstep_density(), m, r=1)
        assert checks["normalization"].deviation == Fraction(1, m * m)


def test_lemma_deviations_scale_like_one_over_m(three_densities):
    for density in three_densities:
        for r in (1, 2):
            small = pr.lemma_checks(density, 32, r=r)
            big = pr.lemma_checks(density, 64, r=r)
            for name in small:
                a, b = small[name].deviation, big[name].deviation
                if float(a) < 1e-14 and float(b) < 1e-14:
                    continue
                assert Fraction(1, 4) <= Fraction(b) / Fraction(a) <= Fraction(9, 10)


def test_error_sweep_uniform_closed_form():
    plan = pr.total_comparison_plan(3)
    rows = pr.error_sweep(plan, (2,), pr.uniform01(), (8, 16, 32, 64))
    for row in rows:
        assert row.abs_error == Fraction(1, 2 * (row.m + 1))
        assert Fraction(2, 5) < row.scaled < Fraction(1, 2)


def test_error_sweep_decreases_and_stays_scaled(total5):
    rows = pr.error_sweep(total5, (2, 3), pr.smoothstep_density(), (8, 16, 32, 64, 128))
    errors = [float(r.abs_error) for r in rows]
    assert all(a > b for a, b in zip(errors, errors[1:]))
    scaled = [float(r.scaled) for r in rows]
    assert max(scaled) / min(scaled) < 4.0


def test_bounded_profile_and_exponent_report(total5):
    s = pr.smoothstep_density()
    model = pr.discretize(s, 256)
    profile = pr.bounded_profile(total5, (2, 3), model)
    assert profile[0] == 0
    assert profile[-1] == pr.joint_record_prob_discrete(total5, (2, 3), model)
    assert all(b >= a for a, b in zip(profile, profile[1:]))
    # on the total plan the two exponent readings coincide
    devs = pr.profile_vs_continuous(total5, (2, 3), model, s)
    assert devs["cardinality"] == pytest.approx(devs["time_index"], abs=1e-12)
    assert devs["cardinality"] < 0.02
    # on a chained plan only the cardinality reading converges
    chained = pr.chained_plan([1, 4, 9])
    model = pr.discretize(s, 256)
    devs = pr.profile_vs_continuous(chained, (2, 3), model, s)
    assert devs["cardinality"] < 0.02
    assert devs["time_index"] > 0.05
