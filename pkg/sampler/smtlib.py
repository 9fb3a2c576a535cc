"""
SMT-LIB导出模块 - 事件驱动应用漏洞利用自动生成系统
把契约编码为使用字符串理论的SMT-LIB 2文本
"""

from typing import List, Sequence, Union

from contract.nodes import (
    Lit, Seq, Alt, Star, CharClass, AnyChar, Repeat, ICase,
    Num, IntVar, BinOp, Len, BoolConst, BoolVar, Compare, Member, Not, And, Or,
    Contract, VarType, ge_pattern, conjuncts
)
from contract.parser import desugar_regex

SExpr = Union[str, list]

LINE_WIDTH = 50
INLINE_ARG_WIDTH = 30

_SORTS = {VarType.BOOL: 'Bool', VarType.INT: 'Int', VarType.STR: 'String'}


def smt_string(text: str) -> str:
    return '"' + text.replace('"', '""') + '"'


def _nest(op: str, items: List[SExpr]) -> SExpr:
    """右嵌套的二元运算"""
    if len(items) == 1:
        return items[0]
    return [op, items[0], _nest(op, items[1:])]


def _class_ranges(chars) -> List[SExpr]:
    codes = sorted(ord(c) for c in chars)
    pieces: List[SExpr] = []
    i = 0
    while i < len(codes):
        j = i
        while j + 1 < len(codes) and codes[j + 1] == codes[j] + 1:
            j += 1
        if j == i:
            pieces.append(['str.to.re', smt_string(chr(codes[i]))])
        else:
            pieces.append(['re.range', smt_string(chr(codes[i])), smt_string(chr(codes[j]))])
        i = j + 1
    return pieces


def encode_regex(regex) -> SExpr:
    if isinstance(regex, Lit):
        return ['str.to.re', smt_string(regex.text)]
    if isinstance(regex, AnyChar):
        return ['re.range', '" "', '"~"']
    if isinstance(regex, CharClass):
        return _nest('re.union', _class_ranges(regex.chars))
    if isinstance(regex, ICase):
        return encode_regex(desugar_regex(regex))
    if isinstance(regex, Star):
        return ['re.*', encode_regex(regex.inner)]
    if isinstance(regex, Repeat):
        return [['_', 're.^', str(regex.count)], encode_regex(regex.inner)]
    if isinstance(regex, Seq):
        return _nest('re.++', [encode_regex(p) for p in regex.parts])
    if isinstance(regex, Alt):
        return _nest('re.union', [encode_regex(o) for o in regex.options])
    raise TypeError(f"未知正则节点: {regex!r}")


def encode_arith(expr) -> SExpr:
    if isinstance(expr, Num):
        return str(expr.value) if expr.value >= 0 else ['-', str(-expr.value)]
    if isinstance(expr, IntVar):
        return expr.name
    if isinstance(expr, Len):
        return ['str.len', expr.name]
    if isinstance(expr, BinOp):
        left, right = encode_arith(expr.left), encode_arith(expr.right)
        if expr.op == '/':
            # 向零取整的除法
            return ['ite', ['>=', left, '0'], ['div', left, right], ['-', ['div', ['-', left], right]]]
        return [expr.op, left, right]
    raise TypeError(f"未知算术节点: {expr!r}")


def encode_pred(node) -> SExpr:
    pattern = ge_pattern(node)
    if pattern is not None:
        op, left, right = pattern
        return [op, encode_arith(left), encode_arith(right)]
    if isinstance(node, BoolConst):
        return 'true' if node.value else 'false'
    if isinstance(node, BoolVar):
        return node.name
    if isinstance(node, Compare):
        return [node.op, encode_arith(node.left), encode_arith(node.right)]
    if isinstance(node, Member):
        return ['str.in.re', node.name, encode_regex(node.regex)]
    if isinstance(node, Not):
        return ['not', encode_pred(node.arg)]
    if isinstance(node, And):
        return ['and', encode_pred(node.left), encode_pred(node.right)]
    if isinstance(node, Or):
        return ['or', encode_pred(node.left), encode_pred(node.right)]
    raise TypeError(f"未知谓词节点: {node!r}")


def _value(value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, int):
        return str(value) if value >= 0 else f"(- {-value})"
    return smt_string(value)


def flat(expr: SExpr) -> str:
    if isinstance(expr, str):
        return expr
    return '(' + ' '.join(flat(e) for e in expr) + ')'


def pretty(expr: SExpr, indent: int = 0) -> str:
    """
    宽度超过 LINE_WIDTH 时换行：较短的非末尾参数留在行内，
    其余参数各占一行并缩进两格
    """
    text = flat(expr)
    if isinstance(expr, str) or indent + len(text) <= LINE_WIDTH:
        return text

    head, args = expr[0], expr[1:]
    line = '(' + flat(head)
    rest = list(args)
    while len(rest) > 1 and len(flat(rest[0])) <= INLINE_ARG_WIDTH:
        line += ' ' + flat(rest.pop(0))
    lines = [line]
    for arg in rest:
        lines.append(' ' * (indent + 2) + pretty(arg, indent + 2))
    return '\n'.join(lines) + ')'


def export_smtlib(contract: Contract, excluded: Sequence[Sequence] = ()) -> str:
    """
    导出SMT-LIB 2文本
    :param contract: 契约
    :param excluded: 已失效的模型，每个分量生成一条否定等式断言
    :return: 每个自由变量一条声明，每个顶层合取项一条断言
    """
    lines = [f"(declare-const {name} {_SORTS[var_type]})" for name, var_type in contract.variables]

    if not (isinstance(contract.root, BoolConst) and contract.root.value):
        for conjunct in conjuncts(contract.root):
            lines.append(pretty(['assert', encode_pred(conjunct)]))

    for vector in excluded:
        for name, value in zip(contract.names, vector):
            lines.append(pretty(['assert', ['not', ['=', name, _value(value)]]]))

    return '\n'.join(lines) + '\n' if lines else ''
