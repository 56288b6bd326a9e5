"""
数据模型模块

包含参数、粒子历史、迭代记录与状态空间模型。
"""

from .theta import ModelFamily, ThetaKitagawa, ThetaLinear, ThetaLorenz, theta_from_dict
from .particle_model import GaussianBelief, ParticleHistory, Trajectory
from .trace_model import ReconstructionSummary, SemRecord, SemTrace
from .ssm import StateSpaceModel, build_model, simulate

__all__ = [
    'ModelFamily',
    'ThetaLinear',
    'ThetaKitagawa',
    'ThetaLorenz',
    'theta_from_dict',
    'Trajectory',
    'ParticleHistory',
    'GaussianBelief',
    'SemRecord',
    'SemTrace',
    'ReconstructionSummary',
    'StateSpaceModel',
    'build_model',
    'simulate'
]
