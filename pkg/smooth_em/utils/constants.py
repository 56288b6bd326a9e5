"""
常量定义模块

定义了应用程序中使用的各种常量。
"""

import os

# 应用程序信息
APP_NAME = "SmoothEM"
APP_LOGGER = "smooth_em"
APP_VERSION = "1.0.0"
APP_DESCRIPTION = "条件粒子平滑与随机EM参数估计工具"

# 文件和目录常量
CONFIG_DIR = os.path.expanduser("~/.smoothem")
LOG_DIR = os.path.join(CONFIG_DIR, "logs")
DEFAULT_OUTPUT_DIR = "results"
RESOLVED_CONFIG_FILE = "config_resolved.json"

# 支持的配置文件格式
SUPPORTED_FORMATS = {
    'YAML': ['.yml', '.yaml'],
    'JSON': ['.json']
}

# 退出码
EXIT_CODES = {
    'SUCCESS': 0,
    'FAILURE': 1,
    'CONFIG_ERROR': 2,
    'NUMERICAL_ERROR': 3
}

# 数值容差
WEIGHT_SUM_TOLERANCE = 1e-9       # categorical_draw 接受的权重和偏差
HISTORY_SUM_TOLERANCE = 1e-12     # ParticleHistory 中归一化权重和的偏差
SYMMETRY_TOLERANCE = 1e-10        # 协方差矩阵对称性
EIGEN_TOLERANCE = 1e-10           # 协方差矩阵最小特征值下限
VARIANCE_FLOOR = 1e-8             # M步方差截断下限
ENSEMBLE_CONDITION_LIMIT = 1e12   # 集合创新协方差条件数上限

# 数值积分
RK_INNER_STEP = 0.01              # Lorenz流映射的内部步长上限
LORENZ_SIGMA = 10.0
LORENZ_RHO = 28.0
LORENZ_BETA = 8.0 / 3.0
LORENZ_SPINUP_START = (8.0, 0.0, 30.0)
LORENZ_SPINUP_TIME = 5.0
LORENZ_X0_VAR = 0.1

# Kitagawa模型常数
KITAGAWA_FREQUENCY = 1.2

# 模型类型
MODEL_TYPES = {
    'LINEAR': 'linear',
    'KITAGAWA': 'kitagawa',
    'LORENZ': 'lorenz'
}

# 默认真实参数
TRUE_THETAS = {
    'linear': {'A': 0.9, 'Q': 1.0, 'R': 1.0},
    'kitagawa': {'Q': 1.0, 'R': 10.0, 'x0_mean': 0.0, 'x0_var': 1.0},
    'lorenz': {'sigma_q2': 1.0, 'sigma_r2': 2.0, 'dt': 0.15}
}

# 初始参数 θ̂_0 的均匀采样区间
THETA0_RANGES = {
    'linear': {'A': (0.5, 1.5), 'Q': (0.5, 1.5), 'R': (0.5, 1.5)},
    'kitagawa': {'Q': (1.0, 10.0), 'R': (1.0, 10.0)},
    'lorenz': {'sigma_q2': (0.5, 2.0), 'sigma_r2': (1.0, 4.0)}
}

# 算法名称
ALGORITHMS = {
    'CPF_BS': 'cpf_bs',
    'CPF_AS': 'cpf_as',
    'CPF': 'cpf',
    'PF_BS': 'pf_bs',
    'ENKS': 'enks'
}

# 默认算法参数
DEFAULT_SEED = 2019
DEFAULT_N_F = 10
DEFAULT_N_S = 10
DEFAULT_ITERS = 100
DEFAULT_REPETITIONS = 100
DEFAULT_T = 100
DEFAULT_KEEP_LAST = 10
BACKWARD_TENSOR_THRESHOLD = 4     # n_s 超过该值时预计算对数转移张量
BACKWARD_TENSOR_MAX_ENTRIES = 20_000_000  # 对数转移张量 T·N_f² 的元素数上限

# 重构评分
CREDIBLE_LEVEL = 0.95
VIOLIN_PROBS = (0.025, 0.25, 0.5, 0.75, 0.975)
VIOLIN_EVERY = 10

# CSV表头
CSV_HEADERS = {
    'TRUTH': ['t', 'component', 'value'],
    'OBS': ['t', 'component', 'value'],
    'RECONSTRUCTION': ['t', 'component', 'mean', 'lo', 'hi', 'truth'],
    'DEGENERACY': ['iter', 't', 'distinct'],
    'VIOLIN': ['arm', 'param', 'iter', 'q025', 'q25', 'q50', 'q75', 'q975'],
    'TABLE1': ['algorithm', 'iters', 'rmse', 'cp'],
    'SCORES': ['arm', 'component', 'rmse', 'cp']
}
CSV_FLOAT_FORMAT = '%.10g'
