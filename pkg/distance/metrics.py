"""
距离度量模块 - 事件驱动应用漏洞利用自动生成系统
布尔/整数/字符串类型距离与参数向量的曼哈顿距离
"""

from dataclasses import dataclass, replace
from typing import Any, Sequence

import Levenshtein

from config import ALPHABET, ORACLE_CONFIG
from exceptions import ArityMismatch
from contract.nodes import VarType


def dist_bool(a: bool, b: bool) -> int:
    return 0 if a == b else 1


def dist_int(n: int, m: int) -> int:
    return abs(n - m)


def dist_str(s: str, t: str) -> int:
    """单位代价的Levenshtein编辑距离"""
    return Levenshtein.distance(s, t)


_DISTANCES = {
    VarType.BOOL: dist_bool,
    VarType.INT: dist_int,
    VarType.STR: dist_str,
}


def value_type(value: Any) -> VarType:
    """推断分量的语义类型"""
    if isinstance(value, bool):
        return VarType.BOOL
    if isinstance(value, int):
        return VarType.INT
    if isinstance(value, str):
        return VarType.STR
    raise ArityMismatch(f"不支持的分量类型: {type(value).__name__}")


def check_vector(vector: Sequence[Any], types: Sequence[VarType]):
    """
    校验参数向量与契约变量类型一致
    :raises ArityMismatch: 长度或分量类型不一致
    """
    if len(vector) != len(types):
        raise ArityMismatch(f"参数向量长度为{len(vector)}，契约要求{len(types)}")
    for index, (value, expected) in enumerate(zip(vector, types)):
        actual = value_type(value)
        if actual != expected:
            raise ArityMismatch(f"第{index}个分量类型为{actual.value}，契约要求{expected.value}")


def manhattan(v: Sequence[Any], w: Sequence[Any]) -> int:
    """
    参数向量间的曼哈顿距离：逐分量类型距离之和
    :raises ArityMismatch: 两个向量长度或类型不一致
    """
    if len(v) != len(w):
        raise ArityMismatch(f"参数向量长度不一致: {len(v)} 与 {len(w)}")
    total = 0
    for a, b in zip(v, w):
        kind = value_type(a)
        if value_type(b) != kind:
            raise ArityMismatch(f"分量类型不一致: {a!r} 与 {b!r}")
        total += _DISTANCES[kind](a, b)
    return total


def default_value(var_type: VarType):
    """类型默认值: false / 0 / 空串"""
    return {VarType.BOOL: False, VarType.INT: 0, VarType.STR: ''}[var_type]


@dataclass(frozen=True)
class ValueDomain:
    """
    有界取值空间
    字符串只用 alphabet 中的字符且长度不超过 max_length，整数取 [int_min, int_max]
    """
    alphabet: str = ALPHABET
    max_length: int = ORACLE_CONFIG['max_string_length']
    int_min: int = ORACLE_CONFIG['int_min']
    int_max: int = ORACLE_CONFIG['int_max']

    @classmethod
    def from_config(cls, config: dict) -> 'ValueDomain':
        return cls(
            alphabet=config.get('alphabet', ALPHABET),
            max_length=config.get('max_string_length', config.get('max_length', 8)),
            int_min=config['int_min'],
            int_max=config['int_max'],
        )

    def widen(self, vector: Sequence[Any]) -> 'ValueDomain':
        """扩展取值空间使其包含给定向量"""
        if self.contains(vector):
            return self
        alphabet = list(self.alphabet)
        seen = set(alphabet)
        max_length, int_min, int_max = self.max_length, self.int_min, self.int_max
        for value in vector:
            kind = value_type(value)
            if kind == VarType.STR:
                for ch in value:
                    if ch not in seen:
                        seen.add(ch)
                        alphabet.append(ch)
                max_length = max(max_length, len(value))
            elif kind == VarType.INT:
                int_min, int_max = min(int_min, value), max(int_max, value)
        return replace(self, alphabet=''.join(alphabet), max_length=max_length,
                       int_min=int_min, int_max=int_max)

    def contains(self, vector: Sequence[Any]) -> bool:
        for value in vector:
            kind = value_type(value)
            if kind == VarType.STR:
                if len(value) > self.max_length or any(ch not in self.alphabet for ch in value):
                    return False
            elif kind == VarType.INT and not self.int_min <= value <= self.int_max:
                return False
        return True

    def clamp_int(self, value: int) -> int:
        return max(self.int_min, min(self.int_max, value))

