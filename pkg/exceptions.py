"""
异常定义模块 - 事件驱动应用漏洞利用自动生成系统
"""


class ExploitSearchError(Exception):
    """系统内所有可预期错误的基类"""


class ContractSyntaxError(ExploitSearchError):
    """契约文本语法错误，携带行列位置"""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} (第{line}行, 第{column}列)")


class ContractTypeError(ExploitSearchError):
    """契约变量类型冲突或正则变量无法解析"""


class AlphabetError(ExploitSearchError):
    """正则字面量包含字母表以外的字符"""


class MissingBinding(ExploitSearchError):
    """求值环境缺少变量绑定或绑定类型错误"""


class ContractDivisionByZero(ExploitSearchError):
    """契约算术表达式除以零"""


class ArityMismatch(ExploitSearchError):
    """参数向量的长度或分量类型不匹配"""


class BoundsTooLarge(ExploitSearchError):
    """精确契约距离的枚举规模超出预算"""


class EmptyLanguage(ExploitSearchError):
    """自动机接受的语言为空"""


class SchemaError(ExploitSearchError):
    """模型文件或漏洞规格文件不符合模式"""


class DanglingTarget(SchemaError):
    """页面控件或重定向指向不存在的过程"""


class UnknownAction(ExploitSearchError):
    """测试中出现未定义的事件"""


class ScriptSyntaxError(ExploitSearchError):
    """利用脚本格式错误"""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"{message} (第{line}行)")


class EmptyTrace(ExploitSearchError):
    """执行轨迹为空"""


class LabelCountMismatch(ExploitSearchError):
    """两个测试染色体的事件标签计数不同"""


class UnsatContract(ExploitSearchError):
    """契约不可满足，无法生成初始种群"""

    def __init__(self, message: str, procedure: str = None):
        self.procedure = procedure
        super().__init__(message)


class ConfigError(ExploitSearchError):
    """运行配置无效"""
