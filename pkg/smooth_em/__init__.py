"""
条件粒子平滑与随机EM (SmoothEM)

条件粒子滤波 (CPF / CPF-AS)、后向模拟平滑 (CPF-BS) 与随机EM参数估计，
附带线性高斯精确基线 (Kalman / RTS / KS-EM)、集合卡尔曼平滑基线 (EnKS / EnKS-EM)
以及按场景复现实验的命令行工具。

License: MIT
Version: 1.0.0
"""

__version__ = "1.0.0"
__author__ = "SmoothEM developers"
__description__ = "条件粒子平滑与随机EM参数估计工具"
