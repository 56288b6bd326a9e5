"""
权重工具测试
"""

import math

import numpy as np
import pytest
from scipy import stats

from smooth_em.core.exceptions import AllWeightsDegenerate, EmptyInput, InvalidWeights
from smooth_em.core.rng import RngStream
from smooth_em.core.weights import (
    categorical_draw, check_weights, effective_sample_size, multinomial_resample,
    normalize_log_weights, systematic_resample
)


class TestNormalizeLogWeights:

    def test_simple_example(self):
        weights, log_sum = normalize_log_weights(np.array([0.0, math.log(3.0)]))
        np.testing.assert_allclose(weights, [0.25, 0.75])
        assert log_sum == pytest.approx(math.log(4.0))

    def test_large_offsets_do_not_overflow(self):
        weights, log_sum = normalize_log_weights(np.array([1000.0, 1000.0]))
        np.testing.assert_allclose(weights, [0.5, 0.5])
        assert log_sum == pytest.approx(1000.0 + math.log(2.0))

    def test_negative_infinity_gets_zero_weight(self):
        weights, _ = normalize_log_weights(np.array([-np.inf, 0.0, np.nan]))
        np.testing.assert_allclose(weights, [0.0, 1.0, 0.0])

    def test_all_degenerate(self):
        with pytest.raises(AllWeightsDegenerate):
            normalize_log_weights(np.array([-np.inf, np.nan]))

    def test_empty(self):
        with pytest.raises(EmptyInput):
            normalize_log_weights(np.array([]))

    def test_shift_invariance(self):
        logw = RngStream(8).normal(20) * 5
        base, log_sum = normalize_log_weights(logw)
        for shift in (-700.0, -3.5, 0.25, 900.0):
            shifted, shifted_sum = normalize_log_weights(logw + shift)
            np.testing.assert_allclose(shifted, base, rtol=1e-9, atol=1e-300)
            assert shifted_sum == pytest.approx(log_sum + shift, rel=1e-12)

    def test_sums_to_one(self):
        logw = RngStream(3).normal(50) * 30
        weights, _ = normalize_log_weights(logw)
        assert abs(weights.sum() - 1.0) < 1e-12
        assert np.all(weights >= 0)


def test_check_weights_rejects_invalid():
    with pytest.raises(InvalidWeights):
        check_weights(np.array([0.5, -0.1, 0.6]))
    with pytest.raises(InvalidWeights):
        check_weights(np.array([0.5, 0.4]))
    with pytest.raises(EmptyInput):
        check_weights(np.array([]))


def test_categorical_draw_frequencies():
    rng = RngStream(11)
    weights = np.array([0.1, 0.2, 0.3, 0.4])
    draws = np.array([categorical_draw(rng, weights) for _ in range(20000)])
    counts = np.bincount(draws, minlength=4)
    _, p_value = stats.chisquare(counts, weights * draws.size)
    assert p_value > 1e-3


def test_categorical_draw_point_mass():
    rng = RngStream(0)
    assert all(categorical_draw(rng, np.array([0.0, 0.0, 1.0])) == 2 for _ in range(100))


class TestSystematicResample:

    def test_copy_counts_are_floor_or_ceil(self):
        for seed in range(50):
            rng = RngStream(seed)
            weights = rng.generator.dirichlet(np.ones(7))
            n = 40
            counts = np.bincount(systematic_resample(rng, weights, n), minlength=7)
            assert counts.sum() == n
            assert np.all(counts >= np.floor(n * weights))
            assert np.all(counts <= np.ceil(n * weights))

    def test_unbiased(self):
        weights = np.array([0.05, 0.15, 0.3, 0.5])
        n = 10
        total = np.zeros(4)
        reps = 4000
        for seed in range(reps):
            total += np.bincount(systematic_resample(RngStream(seed), weights, n), minlength=4)
        # 每个副本数只取 floor 或 ceil 两个值，方差不超过 1/4
        bound = 4.0 * 0.5 / math.sqrt(reps)
        assert np.all(np.abs(total / reps - n * weights) <= bound)

    def test_indices_in_range(self):
        indices = systematic_resample(RngStream(1), np.array([0.2, 0.8]), 9)
        assert indices.dtype == np.int64
        assert indices.min() >= 0 and indices.max() <= 1


def test_multinomial_resample_unbiased():
    weights = np.array([0.2, 0.3, 0.5])
    n = 30000
    indices = multinomial_resample(RngStream(5), weights, n)
    frequencies = np.bincount(indices, minlength=3) / n
    standard_error = np.sqrt(weights * (1 - weights) / n)
    assert np.all(np.abs(frequencies - weights) <= 4 * standard_error)


def test_effective_sample_size():
    assert effective_sample_size(np.full(8, 1 / 8)) == pytest.approx(8.0)
    assert effective_sample_size(np.array([1.0, 0.0, 0.0])) == pytest.approx(1.0)


class _FixedUniform:
    """总是返回同一个均匀数的随机流替身"""

    def __init__(self, value: float):
        self.value = value

    def uniform(self, size=None):
        return self.value if size is None else np.full(size, self.value)


@pytest.mark.parametrize("resample", [systematic_resample, multinomial_resample])
def test_trailing_zero_weights_are_never_selected(resample):
    # 十个 0.1 的浮点累积和略小于 1
    weights = np.array([0.1] * 10 + [0.0, 0.0])
    assert np.cumsum(weights)[-1] < 1.0
    for u in (0.0, 0.5, np.nextafter(1.0, 0.0)):
        indices = resample(_FixedUniform(u), weights, 10)
        assert indices.max() <= 9


def test_interior_zero_weights_are_never_selected():
    weights = np.array([0.25, 0.0, 0.25, 0.0, 0.5, 0.0])
    for seed in range(20):
        indices = multinomial_resample(RngStream(seed), weights, 200)
        assert not np.isin(indices, [1, 3, 5]).any()
        assert not np.isin(systematic_resample(RngStream(seed), weights, 50), [1, 3, 5]).any()
