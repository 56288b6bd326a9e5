"""
粒子滤波测试
"""

import numpy as np
import pytest

from smooth_em.core.exceptions import AllWeightsDegenerate, ConditioningLengthMismatch
from smooth_em.core.filtering import FilterVariant, run_filter
from smooth_em.core.kalman import kalman_filter
from smooth_em.core.rng import RngStream
from smooth_em.core.validator import Validator
from smooth_em.models.particle_model import Trajectory
from smooth_em.models.ssm import linear_model, simulate
from smooth_em.models.theta import ThetaLinear


def test_pf_history_shapes(linear_data):
    model, _, y = linear_data
    history = run_filter(model, y, FilterVariant.PF, 8, RngStream(1))
    T = y.shape[0]
    assert history.particles.shape == (T + 1, 8, 1)
    assert history.ancestors.shape == (T + 1, 8)
    assert history.log_evidence_increments.shape == (T,)
    np.testing.assert_allclose(history.norm_weights[0], np.full(8, 1 / 8))
    assert Validator().validate_history(history) == (True, None)


def test_forecast_means_are_stored(kitagawa_data):
    model, _, y = kitagawa_data
    history = run_filter(model, y, FilterVariant.PF, 6, RngStream(2))
    for t in range(1, history.T + 1):
        np.testing.assert_allclose(history.forecast_means[t],
                                   model.transition_mean(history.particles[t - 1], t))


@pytest.mark.parametrize("variant", [FilterVariant.CPF, FilterVariant.CPF_AS])
def test_conditioning_particle_survives(linear_data, variant):
    model, truth, y = linear_data
    conditioning = Trajectory(truth.states + 0.3)
    history = run_filter(model, y, variant, 5, RngStream(3), conditioning=conditioning)
    np.testing.assert_array_equal(history.particles[1:, -1], conditioning.states[1:])
    if variant is FilterVariant.CPF:
        assert np.all(history.ancestors[1:, -1] == 4)


def test_ancestor_sampling_picks_only_compatible_parent():
    # A=1 且 Q 极小：只有与条件状态重合的父粒子有非零后向权重
    model = linear_model(ThetaLinear(A=1.0, Q=1e-6, R=1.0, x0_mean=0.0, x0_var=100.0))
    y = np.zeros((1, 1))
    for seed in range(20):
        rng = RngStream(seed)
        reference = run_filter(model, y, FilterVariant.PF, 6, RngStream(seed))
        target = reference.particles[0, 2]
        conditioning = Trajectory(np.array([[0.0], target]))
        history = run_filter(model, y, FilterVariant.CPF_AS, 6, rng, conditioning=conditioning)
        parent = history.ancestors[1, -1]
        np.testing.assert_allclose(history.particles[0, parent], target, atol=1e-2)


def test_conditioning_length_mismatch(linear_data):
    model, _, y = linear_data
    with pytest.raises(ConditioningLengthMismatch):
        run_filter(model, y, FilterVariant.CPF, 4, RngStream(0), conditioning=Trajectory.zeros(5, 1))
    with pytest.raises(ConditioningLengthMismatch):
        run_filter(model, y, FilterVariant.CPF_AS, 4, RngStream(0))


def test_degenerate_weights_report_time_index(linear_theta):
    model = linear_model(linear_theta)
    y = np.array([[0.0], [np.inf], [0.0]])
    with pytest.raises(AllWeightsDegenerate) as info:
        run_filter(model, y, FilterVariant.PF, 4, RngStream(0))
    assert info.value.time_index == 2


def test_evidence_estimate_close_to_kalman(linear_theta):
    model = linear_model(linear_theta)
    _, y = simulate(model, RngStream(5), 10)
    _, exact = kalman_filter(linear_theta, y)
    estimates = [run_filter(model, y, FilterVariant.PF, 500, RngStream(seed)).log_evidence for seed in range(5)]
    assert abs(np.mean(estimates) - exact) < 0.3


def test_same_seed_same_history(linear_data):
    model, _, y = linear_data
    a = run_filter(model, y, FilterVariant.PF, 5, RngStream(9))
    b = run_filter(model, y, FilterVariant.PF, 5, RngStream(9))
    np.testing.assert_array_equal(a.particles, b.particles)
    np.testing.assert_array_equal(a.ancestors, b.ancestors)


def test_multinomial_resampling_option(linear_data):
    model, _, y = linear_data
    history = run_filter(model, y, FilterVariant.PF, 5, RngStream(9), resampling='multinomial')
    assert history.metadata['resampling'] == 'multinomial'


def test_requires_two_particles(linear_data):
    model, _, y = linear_data
    with pytest.raises(ValueError):
        run_filter(model, y, FilterVariant.PF, 1, RngStream(0))


def _filtered_means(history):
    return np.einsum('tn,tn->t', history.norm_weights[1:], history.particles[1:, :, 0])


def test_pf_and_cpf_agree_with_many_particles(linear_theta):
    model = linear_model(linear_theta)
    _, y = simulate(model, RngStream(12), 10)
    beliefs, exact = kalman_filter(linear_theta, y)
    kalman_means = np.array([b.mean[0] for b in beliefs[1:]])

    pf = run_filter(model, y, FilterVariant.PF, 3000, RngStream(1))
    cpf = run_filter(model, y, FilterVariant.CPF, 3000, RngStream(2), conditioning=Trajectory.zeros(10, 1))
    np.testing.assert_allclose(_filtered_means(pf), kalman_means, atol=0.15)
    np.testing.assert_allclose(_filtered_means(cpf), kalman_means, atol=0.15)
    np.testing.assert_allclose(_filtered_means(pf), _filtered_means(cpf), atol=0.2)
    assert abs(pf.log_evidence - exact) < 0.3
    assert abs(cpf.log_evidence - exact) < 0.3


def test_evidence_estimate_is_unbiased(linear_theta):
    # 期望无偏的是 p̂(y)，而非 log p̂(y)
    model = linear_model(linear_theta)
    _, y = simulate(model, RngStream(13), 10)
    _, exact = kalman_filter(linear_theta, y)
    ratios = np.array([
        np.exp(run_filter(model, y, FilterVariant.PF, 100, RngStream(seed)).log_evidence - exact)
        for seed in range(300)
    ])
    assert abs(ratios.mean() - 1.0) < 4 * ratios.std() / np.sqrt(ratios.size) + 0.02
