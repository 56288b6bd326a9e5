"""
Kalman 滤波、RTS 平滑与 KS-EM 测试
"""

import math

import numpy as np
import pytest
from scipy import optimize, stats

from smooth_em.core.exceptions import SingularInnovation
from smooth_em.core.kalman import (
    joint_smoothing_sample, kalman_filter, kalman_pass, ks_em, ks_em_step, rts_moments, rts_smoother
)
from smooth_em.core.rng import RngStream
from smooth_em.models.ssm import linear_model, simulate
from smooth_em.models.theta import ThetaLinear, update_params


def _joint_covariance(theta: ThetaLinear, T: int) -> np.ndarray:
    """y_{1:T} 的联合协方差（直接由状态方程展开）"""
    var = np.empty(T + 1)
    var[0] = theta.x0_var
    for t in range(1, T + 1):
        var[t] = theta.A ** 2 * var[t - 1] + theta.Q
    cov = np.empty((T, T))
    for s in range(1, T + 1):
        for t in range(1, T + 1):
            lo, hi = min(s, t), max(s, t)
            cov[s - 1, t - 1] = theta.A ** (hi - lo) * var[lo]
    return cov + theta.R * np.eye(T)


def test_single_step_by_hand():
    theta = ThetaLinear(A=0.9, Q=1.0, R=1.0, x0_mean=0.0, x0_var=1.0)
    y = np.array([[1.5]])
    beliefs, loglik = kalman_filter(theta, y)
    assert loglik == pytest.approx(stats.norm.logpdf(1.5, 0.0, math.sqrt(2.81)))
    assert beliefs[1].mean[0] == pytest.approx(1.81 / 2.81 * 1.5)
    assert beliefs[1].cov[0, 0] == pytest.approx(1.81 / 2.81)


def test_loglik_matches_joint_gaussian():
    theta = ThetaLinear(A=0.7, Q=0.6, R=1.3, x0_mean=0.4, x0_var=2.0)
    _, y = simulate(linear_model(theta), RngStream(3), 5)
    _, loglik = kalman_filter(theta, y)
    mean = np.array([theta.A ** t * theta.x0_mean for t in range(1, 6)])
    exact = stats.multivariate_normal.logpdf(y[:, 0], mean=mean, cov=_joint_covariance(theta, 5))
    assert loglik == pytest.approx(exact, abs=1e-9)


def test_rts_endpoint_and_variance_reduction(linear_theta):
    _, y = simulate(linear_model(linear_theta), RngStream(4), 20)
    filtered, _ = kalman_filter(linear_theta, y)
    smoothed = rts_smoother(linear_theta, y)
    assert smoothed[-1].mean[0] == pytest.approx(filtered[-1].mean[0])
    assert smoothed[-1].cov[0, 0] == pytest.approx(filtered[-1].cov[0, 0])
    for f, s in zip(filtered, smoothed):
        assert s.cov[0, 0] <= f.cov[0, 0] + 1e-12
        assert s.validate()[0]


def test_lag_one_covariance_matches_joint_gaussian():
    theta = ThetaLinear(A=0.8, Q=0.5, R=1.0, x0_mean=0.0, x0_var=1.0)
    _, y = simulate(linear_model(theta), RngStream(6), 3)
    moments = rts_moments(theta, kalman_pass(theta, y))

    # x_{0:3}, y_{1:3} 的联合高斯，直接条件化
    T = 3
    n = T + 1
    state_cov = np.empty((n, n))
    var = [theta.x0_var]
    for t in range(1, n):
        var.append(theta.A ** 2 * var[-1] + theta.Q)
    for s in range(n):
        for t in range(n):
            lo, hi = min(s, t), max(s, t)
            state_cov[s, t] = theta.A ** (hi - lo) * var[lo]
    cross = state_cov[:, 1:]
    obs_cov = state_cov[1:, 1:] + theta.R * np.eye(T)
    posterior = state_cov - cross @ np.linalg.solve(obs_cov, cross.T)
    posterior_mean = cross @ np.linalg.solve(obs_cov, y[:, 0])

    np.testing.assert_allclose(moments.mean, posterior_mean, atol=1e-10)
    np.testing.assert_allclose(moments.var, np.diag(posterior), atol=1e-10)
    for t in range(1, n):
        assert moments.lag_one[t] == pytest.approx(posterior[t, t - 1], abs=1e-10)


def test_singular_innovation():
    theta = ThetaLinear(A=0.9, Q=1.0, R=1.0, x0_mean=0.0, x0_var=np.inf)
    with pytest.raises(SingularInnovation):
        kalman_filter(theta, np.zeros((2, 1)))


def test_joint_sample_marginals(linear_theta):
    _, y = simulate(linear_model(linear_theta), RngStream(8), 6)
    smoothed = rts_smoother(linear_theta, y)
    rng = RngStream(9)
    draws = np.array([joint_smoothing_sample(linear_theta, y, rng).states[:, 0] for _ in range(4000)])
    mean = np.array([b.mean[0] for b in smoothed])
    var = np.array([b.cov[0, 0] for b in smoothed])
    assert np.all(np.abs(draws.mean(axis=0) - mean) < 4 * np.sqrt(var / 4000))
    np.testing.assert_allclose(draws.var(axis=0), var, rtol=0.12)


def test_ks_em_loglik_non_decreasing(linear_theta):
    _, y = simulate(linear_model(linear_theta), RngStream(10), 100)
    start = update_params(linear_theta, {'A': 0.5, 'Q': 2.0, 'R': 0.5})
    theta, trace = ks_em(start, y, 50)
    assert np.all(np.diff(trace) >= -1e-8)
    assert theta.x0_var == start.x0_var


def test_ks_em_step_returns_loglik_at_input(linear_theta):
    _, y = simulate(linear_model(linear_theta), RngStream(10), 30)
    _, loglik = ks_em_step(linear_theta, y)
    assert loglik == pytest.approx(kalman_filter(linear_theta, y)[1])


def test_ks_em_requires_iterations(linear_theta):
    with pytest.raises(ValueError):
        ks_em(linear_theta, np.zeros((3, 1)), 0)


@pytest.mark.slow
def test_ks_em_matches_direct_maximization(linear_theta):
    _, y = simulate(linear_model(linear_theta), RngStream(2019), 100)
    theta_em, _ = ks_em(linear_theta, y, 3000)

    def negative_loglik(z):
        theta = update_params(linear_theta, {'A': z[0], 'Q': math.exp(z[1]), 'R': math.exp(z[2])})
        return -kalman_filter(theta, y)[1]

    start = np.array([theta_em.A, math.log(theta_em.Q), math.log(theta_em.R)]) + 0.05
    result = optimize.minimize(negative_loglik, start, method='Nelder-Mead',
                               options={'xatol': 1e-8, 'fatol': 1e-10, 'maxiter': 20000})
    direct = np.array([result.x[0], math.exp(result.x[1]), math.exp(result.x[2])])
    np.testing.assert_allclose([theta_em.A, theta_em.Q, theta_em.R], direct, atol=1e-3)
