"""
异常定义
"""
from typing import Optional


class TwistlabError(Exception):
    """所有业务异常的基类"""


class ConfigurationSyntaxError(TwistlabError):
    """配置文件语法错误，带行列号"""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ''
        if line is not None:
            where = f"第{line}行"
            if column is not None:
                where += f"第{column}列"
            where += ': '
        super().__init__(f"{where}{message}")


class ConfigurationError(TwistlabError):
    """配置结构或语义错误"""


class CurveSyntaxError(TwistlabError):
    """曲线文件语法错误"""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        prefix = f"第{line}行: " if line is not None else ''
        super().__init__(f"{prefix}{message}")


class CurveError(TwistlabError):
    """曲线不属于族 C（折返、带不匹配等）"""


class EmbeddingError(CurveError):
    """步序列无法平面嵌入"""


class GenericityError(TwistlabError):
    """曲线不是 generic 的"""


class ReductionError(TwistlabError):
    """约化过程离开了模型曲面"""


class CertificateError(TwistlabError):
    """约化后仍残留二角形"""


class WitnessError(TwistlabError):
    """自由性见证失败"""


class WordSyntaxError(TwistlabError):
    """扭转词语法错误"""


class ParallelCurvesError(CurveError):
    """两条曲线的股永远平行（互为推移），车道顺序无法确定"""
