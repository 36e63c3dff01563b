"""Simulation engine: determinism, replay, and statistical agreement."""

import math
from fractions import Fraction

import numpy as np
import pytest

import partial_records as pr


def _config(plan, density, n, seed, **kw):
    return pr.SimConfig(plan=plan, density=density, replications=n, master_seed=seed, **kw)


def test_columns_are_prefix_stable():
    u = pr.uniform01()
    long = pr.column(7, 3, 1000, u)
    short = pr.column(7, 3, 100, u)
    assert np.array_equal(long[:100], short)
    # different key, different stream
    other = pr.column(7, 4, 100, u)
    assert not np.array_equal(short, other)
    assert np.array_equal(pr.column(8, 3, 100, u), pr.column(8, 3, 100, u))


def test_identical_configs_give_identical_results(total5):
    s = pr.smoothstep_density()
    a = pr.run(_config(total5, s, 20_000, 11, joint_positions=(2, 3), r_max=2))
    b = pr.run(_config(total5, s, 20_000, 11, joint_positions=(2, 3), r_max=2))
    assert a.event_counts == b.event_counts
    assert a.joint_count == b.joint_count
    assert a.count_sum == b.count_sum and a.count_sq_sum == b.count_sq_sum
    assert np.array_equal(a.values_of_record(2), b.values_of_record(2), equal_nan=True)


def test_extending_n_preserves_prefix_counts(total5):
    # replication k's draws do not depend on how many replications run
    u = pr.uniform01()
    small = pr.run(_config(total5, u, 1_000, 5, r_max=1))
    big = pr.run(_config(total5, u, 5_000, 5, r_max=1))
    assert np.array_equal(
        small.values_of_record(1), big.values_of_record(1)[:1_000], equal_nan=True
    )


def test_replay_matches_batch(total5):
    s = pr.smoothstep_density()
    cfg = _config(total5, s, 5_000, 123, r_max=3)
    result = pr.run(cfg)
    for k in (0, 1, 17, 4_999):
        rep = pr.replay(cfg, k)
        # the first three record positions must agree with the batch arrays
        batch_positions = {
            int(result.times_of_record(r)[k])
            for r in (1, 2, 3)
            if result.times_of_record(r)[k] > 0
        }
        replay_positions = {i + 1 for i, b in enumerate(rep.indicators) if b}
        assert batch_positions <= replay_positions
        if len(replay_positions) <= 3:
            assert batch_positions == replay_positions
    # exact tally agreement on a complete small run
    small = _config(total5, s, 300, 123)
    assert pr.run(small).count_sum == sum(
        pr.replay(small, k).record_count for k in range(300)
    )


def test_replay_on_partial_plan_regenerates_only_drawn_indices(partial_plan):
    cfg = _config(partial_plan, pr.uniform01(), 10, 3)
    rep = pr.replay(cfg, 4)
    assert set(rep.draws) == {1, 2, 3, 4, 5}
    assert len(rep.indicators) == 3


def test_event_frequencies_within_four_sigma(three_densities, total5):
    # distribution-free law: every density must reproduce the same odds
    for density in three_densities:
        result = pr.run(_config(total5, density, 200_000, 2024))
        for t in range(1, 6):
            p = 1.0 / total5.cardinality(t)
            se = math.sqrt(p * (1 - p) / result.n)
            assert abs(result.event_frequency(t) - p) <= 4 * se + 1e-12, (density.name, t)


def test_joint_and_count_moments_within_four_sigma(partial_plan):
    density = pr.power_density(2)
    cfg = _config(partial_plan, density, 400_000, 77, joint_positions=(1, 2, 3))
    result = pr.run(cfg)
    target = float(Fraction(1, 40))
    se = math.sqrt(target * (1 - target) / result.n)
    assert abs(result.joint_frequency - target) <= 4 * se
    stats = pr.record_count_moments(partial_plan, 5)
    se_mean = math.sqrt(stats.variance_float / result.n)
    assert abs(result.count_mean - stats.mean_float) <= 4 * se_mean
    assert result.count_variance == pytest.approx(stats.variance_float, rel=0.05)


def test_record_value_ecdf_against_series(total5):
    s = pr.smoothstep_density()
    cfg = _config(total5, s, 200_000, 31, r_max=2)
    result = pr.run(cfg)
    curve = pr.record_value_ecdf(result, 2, [0.3, 0.6, 0.9])
    radius = pr.dkw_radius(result.n)
    for x, value in zip(curve.grid, curve.ecdf):
        iv = pr.record_value_cdf(total5, 2, x, s)
        assert iv.lower - radius <= value <= iv.upper + radius
    # replications with no second record never enter the numerator
    assert curve.ecdf[-1] <= curve.with_record / result.n
    assert curve.no_record_fraction == pytest.approx(
        float(pr.record_time_pmf(total5, 2).residual), abs=4 * math.sqrt(0.25 / result.n)
    )


def test_strong_law_checkpoints(total5):
    plan = pr.total_comparison_plan(2000)
    cfg = _config(plan, pr.uniform01(), 400, 9, horizon=2000, checkpoints=(10, 100, 2000))
    result = pr.run(cfg)
    points = pr.strong_law_trajectory(result)
    assert [pt.position for pt in points] == [10, 100, 2000]
    final = points[-1]
    assert final.intensity == pytest.approx(
        pr.cumulative_intensity(plan, 2000, exact=False), abs=1e-9
    )
    assert abs(final.ratio - 1.0) <= final.ci_radius


def test_ties_counted_on_discrete_valued_streams(total5):
    # a two-point inverse forces exact float collisions
    lumpy = pr.DensitySpec(
        name="two-point",
        support_upper=1.0,
        pdf=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        cdf=lambda x: np.clip(np.asarray(x, dtype=float), 0.0, 1.0),
        inverse_cdf=lambda u: np.round(np.asarray(u, dtype=float)),
    )
    result = pr.run(_config(total5, lumpy, 2_000, 1))
    assert result.tie_count > 0


def test_config_validation(total5):
    with pytest.raises(pr.IndexOutOfRange):
        pr.run(_config(total5, pr.uniform01(), 10, 1, horizon=9))
    with pytest.raises(pr.RankTooLarge):
        pr.run(_config(total5, pr.uniform01(), 10, 1, r_max=6))
    with pytest.raises(pr.IndexOutOfRange):
        pr.run(_config(total5, pr.uniform01(), 10, 1, joint_positions=(2, 3), horizon=2))
    with pytest.raises(ValueError):
        pr.run(_config(total5, pr.uniform01(), 0, 1))
    with pytest.raises(pr.RankTooLarge):
        pr.run(_config(total5, pr.uniform01(), 10, 1)).values_of_record(1)
