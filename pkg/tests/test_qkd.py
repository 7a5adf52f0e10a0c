import numpy as np
import pytest
from scipy.optimize import brentq

from steerdist import (
    NoPositiveKeyError,
    conditional_variances,
    key_rate,
    key_rate_filtered,
    key_rate_with_se,
    min_gain_for_key,
    nla_single_mode,
    tmss_standard,
    vacuum_state,
)

TWO_OVER_E = 2.0 / np.e


def test_conditional_variances_vacuum():
    assert conditional_variances(np.eye(4)) == (1.0, 1.0)


def test_conditional_variances_pure_state():
    s = tmss_standard(-6.0, 6.0)
    n = s.cov[0, 0]
    v_x, v_p = conditional_variances(s.cov)
    # pure-state identity: (1+n)/(2n)
    assert v_x == pytest.approx((1 + n) / (2 * n), rel=1e-12)
    assert v_p == pytest.approx(v_x, rel=1e-12)


def test_conditional_variances_model_state(model_state):
    n, c = model_state.cov[0, 0], model_state.cov[0, 2]
    want = (n + 1) / 2 - c * c / (2 * n)
    assert want == pytest.approx(0.855054, abs=1e-6)
    v_x, v_p = conditional_variances(model_state.cov)
    assert v_x == pytest.approx(want, rel=1e-12)
    assert v_p == pytest.approx(want, rel=1e-12)


def test_key_rate_model_state(model_state):
    assert key_rate(model_state.cov).key_rate == pytest.approx(-0.216782, abs=1e-4)


def test_key_rate_vacuum():
    assert key_rate(np.eye(4)).key_rate == pytest.approx(1 - np.log2(np.e), rel=1e-12)


def test_key_rate_minus_6db_is_near_zero():
    # the exact zero crossing sits at -6.0109 dB, so -6 dB is very slightly
    # negative: K = -0.0010222 (the reported "minimum squeezing -6 dB" is a
    # two-figure statement)
    k = key_rate(tmss_standard(-6.0, 6.0).cov).key_rate
    assert k == pytest.approx(-0.0010222, abs=1e-6)
    assert abs(k) < 1.5e-3


def test_pure_state_zero_crossing_in_db():
    def k_of_db(db):
        return key_rate(tmss_standard(db, -db).cov).key_rate

    crossing = brentq(k_of_db, -8.0, -4.0, xtol=1e-6)
    assert crossing == pytest.approx(-6.01, abs=0.02)


def test_key_rate_symmetric_under_x_p_exchange(model_state):
    swap = np.zeros((4, 4))
    swap[0, 1] = swap[1, 0] = swap[2, 3] = swap[3, 2] = 1.0
    # relabelling x<->p in both modes flips the sign of the cross block,
    # which the key rate does not see; v_x and v_p trade places
    swapped = swap @ model_state.cov @ swap.T
    assert key_rate(swapped).key_rate == pytest.approx(
        key_rate(model_state.cov).key_rate, rel=1e-12
    )
    assert conditional_variances(swapped) == pytest.approx(
        conditional_variances(model_state.cov)[::-1], rel=1e-12
    )


def test_key_rate_increases_as_conditional_variance_drops(model_state):
    base = key_rate(model_state.cov).key_rate
    better = model_state.cov.copy()
    better[2, 2] -= 0.05  # lower Bob x-variance lowers v_x
    assert key_rate(better).key_rate > base
    worse = model_state.cov.copy()
    worse[0, 2] = worse[2, 0] = model_state.cov[0, 2] - 0.05  # weaker correlation
    assert key_rate(worse).key_rate < base


def test_ideal_amplifier_key_rate_saturates_negative(model_state):
    # the ideal (infinite-cutoff) amplifier tops out below zero for this
    # impure state: v_x -> (n-1)(n(n+1)-c^2)/(2c^2) > 2/e at the gain bound
    n, c = model_state.cov[0, 0], model_state.cov[0, 2]
    v_limit = (n - 1) * (n * (n + 1) - c * c) / (2 * c * c)
    assert v_limit > TWO_OVER_E
    for g in (1.2, 1.3, 1.4, 1.43):
        k = key_rate(nla_single_mode(model_state.cov, g)).key_rate
        assert k < 0.0


def test_filtered_key_rate_crosses_zero(model_state):
    # the finite-cutoff ensemble the protocol actually measures does cross
    assert key_rate_filtered(model_state, 1.0, 4.5).key_rate == pytest.approx(
        key_rate(model_state.cov).key_rate, rel=1e-12
    )
    assert key_rate_filtered(model_state, 1.3, 4.5).key_rate < 0
    assert key_rate_filtered(model_state, 1.35, 4.5).key_rate > 0


def test_min_gain_analytic(model_state):
    g_star = min_gain_for_key(model_state, 4.5, np.arange(1.0, 1.56, 0.02))
    assert g_star == pytest.approx(1.32, abs=1e-9)  # frozen from the exact sweep
    assert abs(g_star - 1.4) <= 0.1  # reported: secret key for g > 1.4


def test_min_gain_threshold_state_at_boundary():
    # the -6 dB pure state sits at the K = 0 boundary: the first positive
    # grid point is within a step or two of unit gain
    s = tmss_standard(-6.0, 6.0)
    g_star = min_gain_for_key(s, 4.5, np.arange(1.0, 1.2, 0.02))
    assert g_star <= 1.04


def test_min_gain_monte_carlo_agrees_within_one_step(model_state):
    grid = np.arange(1.0, 1.56, 0.05)
    analytic = min_gain_for_key(model_state, 4.5, grid, mode="analytic")
    mc = min_gain_for_key(model_state, 4.5, grid, mode="monte_carlo",
                          seed=77, sample_count=4_000_000)
    assert abs(mc - analytic) <= 0.05 + 1e-9


def test_min_gain_failure(model_state):
    with pytest.raises(NoPositiveKeyError):
        min_gain_for_key(model_state, 4.5, [1.0, 1.05, 1.1])


def test_key_rate_with_se(model_state):
    from steerdist import reconstruct_covariance, sample_batch

    batch = sample_batch(model_state, 500_000, seed=88)
    cov, se = reconstruct_covariance(batch)
    result, err = key_rate_with_se(cov, se)
    assert err > 0
    assert abs(result.key_rate - key_rate(model_state.cov).key_rate) < 4 * err


def test_unphysical_input_rejected():
    with pytest.raises(Exception, match="unphysical"):
        conditional_variances(0.5 * np.eye(4))
