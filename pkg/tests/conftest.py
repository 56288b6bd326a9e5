"""
测试夹具

种子随机流与三个模型的小规模模拟数据。
"""

import pytest

from smooth_em.core.rng import RngStream
from smooth_em.models.ssm import build_model, simulate
from smooth_em.models.theta import ThetaKitagawa, ThetaLinear, ThetaLorenz


@pytest.fixture
def rng():
    return RngStream(2019)


@pytest.fixture
def linear_theta():
    return ThetaLinear.stationary(A=0.9, Q=1.0, R=1.0)


@pytest.fixture
def kitagawa_theta():
    return ThetaKitagawa(Q=1.0, R=10.0)


@pytest.fixture
def lorenz_theta():
    return ThetaLorenz(sigma_q2=1.0, sigma_r2=2.0, dt=0.15)


@pytest.fixture
def linear_data(linear_theta):
    """T=30 的线性高斯数据 (模型, 真实轨迹, 观测)"""
    model = build_model(linear_theta)
    truth, y = simulate(model, RngStream(7).split('data'), 30)
    return model, truth, y


@pytest.fixture
def kitagawa_data(kitagawa_theta):
    model = build_model(kitagawa_theta)
    truth, y = simulate(model, RngStream(7).split('data'), 20)
    return model, truth, y


@pytest.fixture
def lorenz_data(lorenz_theta):
    model = build_model(lorenz_theta)
    truth, y = simulate(model, RngStream(7).split('data'), 15)
    return model, truth, y
