"""
契约语言模块
契约规格语言的解析、类型检查、求值与正则自动机编译
"""

from .parser import parse_contract, free_vars, unparse, unparse_regex, desugar, desugar_regex
from .evaluator import evaluate, satisfies, bind
from .regex import compile_regex, Dfa

__all__ = [
    'parse_contract',
    'free_vars',
    'unparse',
    'unparse_regex',
    'desugar',
    'desugar_regex',
    'evaluate',
    'satisfies',
    'bind',
    'compile_regex',
    'Dfa'
]
