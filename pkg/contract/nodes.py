"""
契约语法树节点 - 事件驱动应用漏洞利用自动生成系统
谓词、算术表达式与正则表达式的不可变节点定义
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Tuple, Union


class VarType(str, Enum):
    """契约变量的语义类型"""
    BOOL = 'bool'
    INT = 'int'
    STR = 'str'


# ---------- 正则表达式 ----------

@dataclass(frozen=True)
class Lit:
    text: str


@dataclass(frozen=True)
class Seq:
    parts: Tuple['Regex', ...]


@dataclass(frozen=True)
class Alt:
    options: Tuple['Regex', ...]


@dataclass(frozen=True)
class Star:
    inner: 'Regex'


@dataclass(frozen=True)
class CharClass:
    chars: FrozenSet[str]


@dataclass(frozen=True)
class AnyChar:
    pass


@dataclass(frozen=True)
class Repeat:
    inner: 'Regex'
    count: int


@dataclass(frozen=True)
class ICase:
    """大小写不敏感的字面量"""
    text: str


Regex = Union[Lit, Seq, Alt, Star, CharClass, AnyChar, Repeat, ICase]


def make_seq(*parts: 'Regex') -> 'Regex':
    """构造扁平化的序列节点"""
    flat = []
    for part in parts:
        if isinstance(part, Seq):
            flat.extend(part.parts)
        else:
            flat.append(part)
    return flat[0] if len(flat) == 1 else Seq(tuple(flat))


def make_alt(*options: 'Regex') -> 'Regex':
    """构造扁平化的选择节点"""
    flat = []
    for option in options:
        if isinstance(option, Alt):
            flat.extend(option.options)
        else:
            flat.append(option)
    return flat[0] if len(flat) == 1 else Alt(tuple(flat))


# ---------- 算术表达式 ----------

@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class IntVar:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # '+', '-', '*', '/'
    left: 'Arith'
    right: 'Arith'


@dataclass(frozen=True)
class Len:
    name: str


Arith = Union[Num, IntVar, BinOp, Len]


# ---------- 谓词 ----------

@dataclass(frozen=True)
class BoolConst:
    value: bool


@dataclass(frozen=True)
class BoolVar:
    name: str


@dataclass(frozen=True)
class Compare:
    op: str  # '<', '>', '='
    left: Arith
    right: Arith


@dataclass(frozen=True)
class Member:
    name: str
    regex: Regex


@dataclass(frozen=True)
class Not:
    arg: 'Pred'


@dataclass(frozen=True)
class And:
    left: 'Pred'
    right: 'Pred'


@dataclass(frozen=True)
class Or:
    left: 'Pred'
    right: 'Pred'


Pred = Union[BoolConst, BoolVar, Compare, Member, Not, And, Or]


@dataclass(frozen=True)
class Contract:
    """
    类型检查后的契约
    variables 按首次出现顺序排列，下游所有参数向量都按此顺序索引
    """
    root: Pred
    variables: Tuple[Tuple[str, VarType], ...]
    source: str = field(default='', compare=False)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(name for name, _ in self.variables)

    @property
    def types(self) -> Tuple[VarType, ...]:
        return tuple(var_type for _, var_type in self.variables)

    def type_of(self, name: str) -> VarType:
        for var_name, var_type in self.variables:
            if var_name == name:
                return var_type
        raise KeyError(name)


def ge_pattern(node: Pred):
    """
    识别 (a > b ∨ a = b) 与 (a < b ∨ a = b) 两种脱糖形式
    :return: ('>=' 或 '<=', left, right)，不匹配时返回None
    """
    if not isinstance(node, Or):
        return None
    first, second = node.left, node.right
    if (isinstance(first, Compare) and isinstance(second, Compare)
            and second.op == '=' and first.op in ('>', '<')
            and first.left == second.left and first.right == second.right):
        return (first.op + '=', first.left, first.right)
    return None


def conjuncts(node: Pred) -> Tuple[Pred, ...]:
    """展开顶层合取"""
    if isinstance(node, And):
        return conjuncts(node.left) + conjuncts(node.right)
    return (node,)


def iter_members(node: Pred):
    """按出现顺序遍历成员谓词"""
    if isinstance(node, Member):
        yield node
    elif isinstance(node, Not):
        yield from iter_members(node.arg)
    elif isinstance(node, (And, Or)):
        yield from iter_members(node.left)
        yield from iter_members(node.right)


def iter_regex_literals(regex: Regex):
    """遍历正则中出现的字符（字面量与字符类）"""
    if isinstance(regex, (Lit, ICase)):
        yield from regex.text
    elif isinstance(regex, CharClass):
        yield from sorted(regex.chars)
    elif isinstance(regex, Seq):
        for part in regex.parts:
            yield from iter_regex_literals(part)
    elif isinstance(regex, Alt):
        for option in regex.options:
            yield from iter_regex_literals(option)
    elif isinstance(regex, (Star, Repeat)):
        yield from iter_regex_literals(regex.inner)
