"""
契约求值模块 - 事件驱动应用漏洞利用自动生成系统
"""

from typing import Any, Dict, Union

from exceptions import MissingBinding, ContractDivisionByZero
from contract.nodes import (
    Num, IntVar, BinOp, Len, BoolConst, BoolVar, Compare, Member, Not, And, Or,
    Contract, Pred, Arith
)
from contract.regex import compile_regex


def _lookup(env: Dict[str, Any], name: str, expected: type):
    if name not in env:
        raise MissingBinding(f"缺少变量绑定: {name}")
    value = env[name]
    # bool 是 int 的子类，整数变量不接受布尔值
    if expected is int and isinstance(value, bool):
        raise MissingBinding(f"变量 {name} 应绑定整数，实际为布尔值")
    if not isinstance(value, expected):
        raise MissingBinding(f"变量 {name} 应绑定 {expected.__name__}，实际为 {type(value).__name__}")
    return value


def _trunc_div(a: int, b: int) -> int:
    quotient = abs(a) // abs(b)
    return quotient if (a >= 0) == (b >= 0) else -quotient


def eval_arith(expr: Arith, env: Dict[str, Any]) -> int:
    """计算算术表达式，整数除法向零取整"""
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, IntVar):
        return _lookup(env, expr.name, int)
    if isinstance(expr, Len):
        return len(_lookup(env, expr.name, str))
    if isinstance(expr, BinOp):
        left = eval_arith(expr.left, env)
        right = eval_arith(expr.right, env)
        if expr.op == '+':
            return left + right
        if expr.op == '-':
            return left - right
        if expr.op == '*':
            return left * right
        if right == 0:
            raise ContractDivisionByZero(f"除数为零: {left} / 0")
        return _trunc_div(left, right)
    raise TypeError(f"未知算术节点: {expr!r}")


def eval_pred(node: Pred, env: Dict[str, Any]) -> bool:
    if isinstance(node, BoolConst):
        return node.value
    if isinstance(node, BoolVar):
        return _lookup(env, node.name, bool)
    if isinstance(node, Compare):
        left = eval_arith(node.left, env)
        right = eval_arith(node.right, env)
        if node.op == '<':
            return left < right
        if node.op == '>':
            return left > right
        return left == right
    if isinstance(node, Member):
        return compile_regex(node.regex).accepts(_lookup(env, node.name, str))
    if isinstance(node, Not):
        return not eval_pred(node.arg, env)
    # 两侧都求值，保证缺失绑定总被报告
    if isinstance(node, And):
        left = eval_pred(node.left, env)
        right = eval_pred(node.right, env)
        return left and right
    if isinstance(node, Or):
        left = eval_pred(node.left, env)
        right = eval_pred(node.right, env)
        return left or right
    raise TypeError(f"未知谓词节点: {node!r}")


def evaluate(contract: Union[Contract, Pred], env: Dict[str, Any]) -> bool:
    """
    在环境中计算契约的真值
    :param contract: 契约或谓词节点
    :param env: 变量名到 bool/int/str 值的映射
    :return: 契约是否成立
    """
    root = contract.root if isinstance(contract, Contract) else contract
    return eval_pred(root, env)


def bind(contract: Contract, vector) -> Dict[str, Any]:
    """按自由变量顺序把参数向量绑定为求值环境"""
    return dict(zip(contract.names, vector))


def satisfies(contract: Contract, vector) -> bool:
    """参数向量是否满足契约"""
    return evaluate(contract, bind(contract, vector))
