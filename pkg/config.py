"""
配置文件
"""
import os

# 项目路径
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
FIXTURES_DIR = os.path.join(BASE_DIR, 'fixtures')
EXPORTS_DIR = os.path.join(BASE_DIR, 'exports')

# 确保目录存在
os.makedirs(FIXTURES_DIR, exist_ok=True)
os.makedirs(EXPORTS_DIR, exist_ok=True)

# 日志配置
# 可选值: "DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"
# 报告写到 stdout，日志写到 stderr
LOG_LEVEL = os.environ.get('TWISTLAB_LOG_LEVEL') or "WARNING"

# 并行配置，--jobs 未给出时使用
JOBS = int(os.environ.get('TWISTLAB_JOBS') or 1)

# 文件格式版本
CONFIG_VERSION = 1
CURVE_VERSION = 1

# 区域封口类型
CAP_KINDS = {
    'open': '开放',
    'disk': '圆盘',
    'punctured': '带孔圆盘',
    'mobius': '默比乌斯带',
    'other': '其他'
}

# 扭转方向
HANDS = {
    'right': '右手',
    'left': '左手'
}

# 约化类型
REDUCTION_KINDS = {
    'I': '折返拉直',
    'II': '双侧线段二角形',
    'III': '单侧线段二角形',
    'bigon': '二角形消去'
}

# 侧性
SIDEDNESS = {
    1: '单侧',
    2: '双侧'
}

# 默认参数
DEFAULT_HAND = 'right'
DEFAULT_MAX_K = 3
DEFAULT_SAMPLES = 200
DEFAULT_RNG = 7
DEFAULT_MAX_LEN = 6
DEFAULT_MAX_STEPS = 12
DEFAULT_MAX_N = 3

# 约化轮数上限，超出视为实现错误
MAX_REDUCTION_ROUNDS = 10000

# 有界移动搜索的状态上限
ORACLE_MAX_STATES = 20000
