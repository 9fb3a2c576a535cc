"""
契约解析模块 - 事件驱动应用漏洞利用自动生成系统
将契约源文本解析为类型检查后的语法树，并支持规范化打印
"""

import os
import re
import string
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from lark import Lark, Transformer, Token
from lark.exceptions import UnexpectedInput, VisitError

from config import ALPHABET
from exceptions import ContractSyntaxError, ContractTypeError, AlphabetError
from contract.nodes import (
    VarType, Lit, Seq, Alt, Star, CharClass, AnyChar, Repeat, ICase, make_seq, make_alt,
    Num, IntVar, BinOp, Len, BoolConst, BoolVar, Compare, Member, Not, And, Or,
    Contract, Regex, Pred, ge_pattern, iter_members, iter_regex_literals
)

logger = logging.getLogger(__name__)

GRAMMAR_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'grammar.lark')

# Unicode运算符到规范运算符的映射
_CMP_CANONICAL = {'≥': '>=', '≤': '<=', '≠': '!='}


@dataclass(frozen=True)
class _RegexRef:
    """解析期间的正则变量引用，解析结束前必须被替换"""
    name: str


@lru_cache(maxsize=1)
def _get_parser() -> Lark:
    with open(GRAMMAR_PATH, 'r', encoding='utf-8') as f:
        grammar = f.read()
    return Lark(grammar, start='start', parser='earley', ambiguity='resolve')


def _unquote(token: str) -> str:
    """去掉引号并处理反斜杠转义"""
    body = token[token.index('"') + 1:-1]
    return re.sub(r'\\(.)', r'\1', body)


def _parse_class(token: str) -> frozenset:
    """
    解析字符类 [a-z0-9_]
    [a-Z] 表示全部ASCII字母
    """
    body = token[1:-1]
    items = []
    i = 0
    while i < len(body):
        if body[i] == '\\' and i + 1 < len(body):
            items.append((body[i + 1], True))
            i += 2
        else:
            items.append((body[i], False))
            i += 1

    chars = set()
    k = 0
    while k < len(items):
        ch, _ = items[k]
        if k + 2 < len(items) and items[k + 1] == ('-', False):
            hi = items[k + 2][0]
            if ch.islower() and hi.isupper():
                chars.update(c for c in string.ascii_lowercase if c >= ch)
                chars.update(c for c in string.ascii_uppercase if c <= hi)
            elif ord(ch) <= ord(hi):
                chars.update(chr(c) for c in range(ord(ch), ord(hi) + 1))
            else:
                raise ContractSyntaxError(f"字符类范围无效: {ch}-{hi}")
            k += 3
        else:
            chars.add(ch)
            k += 1
    return frozenset(chars)


class _ContractTransformer(Transformer):
    """把lark语法树转换为契约节点"""

    def start(self, children):
        definitions = [c for c in children if isinstance(c, tuple)]
        preds = [c for c in children if not isinstance(c, tuple)]
        return definitions, preds[-1]

    def definition(self, children):
        return (str(children[0]), children[1])

    # 谓词
    def or_(self, children):
        return Or(children[0], children[1])

    def and_(self, children):
        return And(children[0], children[1])

    def not_(self, children):
        return Not(children[0])

    def true(self, _):
        return BoolConst(True)

    def false(self, _):
        return BoolConst(False)

    def bool_var(self, children):
        return BoolVar(str(children[0]))

    def compare(self, children):
        left, op, right = children
        return _desugar_compare(_CMP_CANONICAL.get(str(op), str(op)), left, right)

    def member(self, children):
        return Member(str(children[0]), children[1])

    def string_cmp(self, children):
        name, op, literal = children
        op = _CMP_CANONICAL.get(str(op), str(op))
        regex = self._literal(literal)
        if op == '=':
            return Member(str(name), regex)
        if op == '!=':
            return Not(Member(str(name), regex))
        raise ContractSyntaxError(f"字符串只支持 = 与 != 比较: {name} {op}",
                                  op.line if isinstance(op, Token) else 0,
                                  op.column if isinstance(op, Token) else 0)

    # 算术
    def num(self, children):
        return Num(int(children[0]))

    def neg(self, children):
        inner = children[0]
        if isinstance(inner, Num):
            return Num(-inner.value)
        return BinOp('-', Num(0), inner)

    def int_var(self, children):
        return IntVar(str(children[0]))

    def length(self, children):
        return Len(str(children[0]))

    def add(self, children):
        return BinOp('+', children[0], children[1])

    def sub(self, children):
        return BinOp('-', children[0], children[1])

    def mul(self, children):
        return BinOp('*', children[0], children[1])

    def div(self, children):
        return BinOp('/', children[0], children[1])

    # 正则
    def alt(self, children):
        return make_alt(children[0], children[1])

    def seq(self, children):
        return make_seq(children[0], children[1])

    def star(self, children):
        return Star(children[0])

    def repeat(self, children):
        return Repeat(children[0], int(children[1]))

    def lit(self, children):
        return Lit(_unquote(str(children[0])))

    def ilit(self, children):
        return ICase(_unquote(str(children[0])))

    def cclass(self, children):
        return CharClass(_parse_class(str(children[0])))

    def any_char(self, _):
        return AnyChar()

    def rvar(self, children):
        return _RegexRef(str(children[0]))

    @staticmethod
    def _literal(token) -> Regex:
        text = str(token)
        if text.startswith('i'):
            return ICase(_unquote(text))
        return Lit(_unquote(text))


def _desugar_compare(op: str, left, right) -> Pred:
    """≥ → (> ∨ =)，≤ → (< ∨ =)，≠ → ¬(=)"""
    if op == '>=':
        return Or(Compare('>', left, right), Compare('=', left, right))
    if op == '<=':
        return Or(Compare('<', left, right), Compare('=', left, right))
    if op == '!=':
        return Not(Compare('=', left, right))
    return Compare(op, left, right)


def _resolve_regex(regex, definitions: Dict[str, Regex]) -> Regex:
    """把正则中的变量引用替换为已定义的表达式"""
    if isinstance(regex, _RegexRef):
        if regex.name not in definitions:
            raise ContractTypeError(
                f"正则表达式中的变量 {regex.name} 未在之前用 let 定义，无法在解析期确定为常量")
        return definitions[regex.name]
    if isinstance(regex, Seq):
        return make_seq(*[_resolve_regex(p, definitions) for p in regex.parts])
    if isinstance(regex, Alt):
        return make_alt(*[_resolve_regex(o, definitions) for o in regex.options])
    if isinstance(regex, Star):
        return Star(_resolve_regex(regex.inner, definitions))
    if isinstance(regex, Repeat):
        return Repeat(_resolve_regex(regex.inner, definitions), regex.count)
    return regex


def _resolve_pred(node: Pred, definitions: Dict[str, Regex]) -> Pred:
    if isinstance(node, Member):
        return Member(node.name, _resolve_regex(node.regex, definitions))
    if isinstance(node, Not):
        return Not(_resolve_pred(node.arg, definitions))
    if isinstance(node, And):
        return And(_resolve_pred(node.left, definitions), _resolve_pred(node.right, definitions))
    if isinstance(node, Or):
        return Or(_resolve_pred(node.left, definitions), _resolve_pred(node.right, definitions))
    return node


def _check_alphabet(root: Pred):
    """正则字面量与字符类只能使用字母表内的字符"""
    allowed = set(ALPHABET)
    for member in iter_members(root):
        bad = sorted({ch for ch in iter_regex_literals(member.regex) if ch not in allowed})
        if bad:
            raise AlphabetError(f"变量 {member.name} 的正则包含字母表以外的字符: {bad!r}")


def _collect_arith(expr, found: List[Tuple[str, VarType]]):
    if isinstance(expr, IntVar):
        found.append((expr.name, VarType.INT))
    elif isinstance(expr, Len):
        found.append((expr.name, VarType.STR))
    elif isinstance(expr, BinOp):
        _collect_arith(expr.left, found)
        _collect_arith(expr.right, found)


def _collect_pred(node: Pred, found: List[Tuple[str, VarType]]):
    if isinstance(node, BoolVar):
        found.append((node.name, VarType.BOOL))
    elif isinstance(node, Member):
        found.append((node.name, VarType.STR))
    elif isinstance(node, Compare):
        _collect_arith(node.left, found)
        _collect_arith(node.right, found)
    elif isinstance(node, Not):
        _collect_pred(node.arg, found)
    elif isinstance(node, (And, Or)):
        _collect_pred(node.left, found)
        _collect_pred(node.right, found)


def type_check(root: Pred) -> Tuple[Tuple[str, VarType], ...]:
    """
    检查每个变量只有一种语义类型
    :param root: 谓词根节点
    :return: 按首次出现顺序排列的 (变量名, 类型)
    """
    occurrences: List[Tuple[str, VarType]] = []
    _collect_pred(root, occurrences)

    declared: Dict[str, VarType] = {}
    ordered = []
    for name, var_type in occurrences:
        if name not in declared:
            declared[name] = var_type
            ordered.append((name, var_type))
        elif declared[name] != var_type:
            raise ContractTypeError(
                f"变量 {name} 同时被用作 {declared[name].value} 和 {var_type.value} 类型")
    return tuple(ordered)


def _error_position(text: str, error: UnexpectedInput) -> Tuple[int, int]:
    line = getattr(error, 'line', -1)
    column = getattr(error, 'column', -1)
    if line is None or line < 1:
        lines = text.split('\n')
        return len(lines), len(lines[-1]) + 1
    return line, column


def parse_contract(text: str) -> Contract:
    """
    解析契约源文本
    :param text: 契约源文本（UTF-8）
    :return: 类型检查后的契约
    """
    if isinstance(text, bytes):
        text = text.decode('utf-8')

    try:
        tree = _get_parser().parse(text)
        definitions_list, root = _ContractTransformer().transform(tree)
    except UnexpectedInput as e:
        line, column = _error_position(text, e)
        raise ContractSyntaxError(f"契约语法错误: {text.strip()!r}", line, column) from None
    except VisitError as e:
        if isinstance(e.orig_exc, (ContractSyntaxError, ContractTypeError)):
            raise e.orig_exc from None
        raise

    definitions: Dict[str, Regex] = {}
    for name, regex in definitions_list:
        definitions[name] = _resolve_regex(regex, definitions)

    root = _resolve_pred(root, definitions)
    _check_alphabet(root)
    variables = type_check(root)
    logger.debug(f"契约解析完成: {len(variables)}个自由变量")
    return Contract(root=root, variables=variables, source=text)


def free_vars(contract: Contract) -> List[Tuple[str, VarType]]:
    """
    契约的自由变量
    :param contract: 契约
    :return: 按首次出现顺序排列的 (变量名, 类型) 列表
    """
    return list(contract.variables)


# ---------- 规范化打印 ----------

_PRED_OR, _PRED_AND, _PRED_NOT, _PRED_ATOM = 1, 2, 3, 4
_ARITH_ADD, _ARITH_MUL, _ARITH_ATOM = 1, 2, 3
_RE_ALT, _RE_SEQ, _RE_POST, _RE_ATOM = 1, 2, 3, 4


def _quote(text: str, prefix: str = '') -> str:
    return prefix + '"' + text.replace('\\', '\\\\').replace('"', '\\"') + '"'


def _format_class(chars: frozenset) -> str:
    special = {']', '\\', '-'}
    codes = sorted(ord(c) for c in chars)
    pieces = []
    i = 0
    while i < len(codes):
        j = i
        while j + 1 < len(codes) and codes[j + 1] == codes[j] + 1:
            j += 1
        run = [chr(c) for c in codes[i:j + 1]]
        esc = ['\\' + c if c in special else c for c in run]
        if len(run) >= 3:
            pieces.append(f"{esc[0]}-{esc[-1]}")
        else:
            pieces.extend(esc)
        i = j + 1
    return '[' + ''.join(pieces) + ']'


def unparse_regex(regex: Regex, level: int = 0) -> str:
    """打印正则表达式"""
    if isinstance(regex, Lit):
        text, own = _quote(regex.text), _RE_ATOM
    elif isinstance(regex, ICase):
        text, own = _quote(regex.text, 'i'), _RE_ATOM
    elif isinstance(regex, CharClass):
        text, own = _format_class(regex.chars), _RE_ATOM
    elif isinstance(regex, AnyChar):
        text, own = 'any', _RE_ATOM
    elif isinstance(regex, Star):
        text, own = unparse_regex(regex.inner, _RE_POST) + '*', _RE_POST
    elif isinstance(regex, Repeat):
        text, own = f"{unparse_regex(regex.inner, _RE_POST)}^{regex.count}", _RE_POST
    elif isinstance(regex, Seq):
        text, own = ' . '.join(unparse_regex(p, _RE_POST) for p in regex.parts), _RE_SEQ
    elif isinstance(regex, Alt):
        text, own = ' | '.join(unparse_regex(o, _RE_SEQ) for o in regex.options), _RE_ALT
    else:
        raise TypeError(f"未知正则节点: {regex!r}")
    return f"({text})" if own < level else text


def _unparse_arith(expr, level: int = 0) -> str:
    if isinstance(expr, Num):
        text, own = str(expr.value), _ARITH_ATOM
    elif isinstance(expr, IntVar):
        text, own = expr.name, _ARITH_ATOM
    elif isinstance(expr, Len):
        text, own = f"len({expr.name})", _ARITH_ATOM
    elif isinstance(expr, BinOp):
        own = _ARITH_ADD if expr.op in '+-' else _ARITH_MUL
        text = f"{_unparse_arith(expr.left, own)} {expr.op} {_unparse_arith(expr.right, own + 1)}"
    else:
        raise TypeError(f"未知算术节点: {expr!r}")
    return f"({text})" if own < level else text


def _unparse_pred(node: Pred, level: int = 0) -> str:
    pattern = ge_pattern(node)
    if pattern is not None:
        op, left, right = pattern
        text, own = f"{_unparse_arith(left)} {op} {_unparse_arith(right)}", _PRED_ATOM
    elif isinstance(node, BoolConst):
        text, own = 'true' if node.value else 'false', _PRED_ATOM
    elif isinstance(node, BoolVar):
        text, own = node.name, _PRED_ATOM
    elif isinstance(node, Compare):
        text, own = f"{_unparse_arith(node.left)} {node.op} {_unparse_arith(node.right)}", _PRED_ATOM
    elif isinstance(node, Member):
        text, own = f"{node.name} in {unparse_regex(node.regex)}", _PRED_ATOM
    elif isinstance(node, Not):
        if isinstance(node.arg, Compare) and node.arg.op == '=':
            arg = node.arg
            text, own = f"{_unparse_arith(arg.left)} != {_unparse_arith(arg.right)}", _PRED_ATOM
        else:
            text, own = f"not {_unparse_pred(node.arg, _PRED_NOT)}", _PRED_NOT
    elif isinstance(node, And):
        text = f"{_unparse_pred(node.left, _PRED_AND)} and {_unparse_pred(node.right, _PRED_NOT)}"
        own = _PRED_AND
    elif isinstance(node, Or):
        text = f"{_unparse_pred(node.left, _PRED_OR)} or {_unparse_pred(node.right, _PRED_AND)}"
        own = _PRED_OR
    else:
        raise TypeError(f"未知谓词节点: {node!r}")
    return f"({text})" if own < level else text


def unparse(contract) -> str:
    """
    打印契约的规范文本，重新解析得到相等的语法树
    :param contract: 契约或谓词节点
    """
    root = contract.root if isinstance(contract, Contract) else contract
    return _unparse_pred(root)


def desugar_regex(regex: Regex) -> Regex:
    """
    把语法糖节点展开为仅含字面量/序列/选择/星号的核心形式
    """
    if isinstance(regex, Lit):
        return regex
    if isinstance(regex, CharClass):
        return make_alt(*[Lit(c) for c in sorted(regex.chars)])
    if isinstance(regex, AnyChar):
        return make_alt(*[Lit(c) for c in ALPHABET])
    if isinstance(regex, ICase):
        if not regex.text:
            return Lit('')
        parts = []
        for ch in regex.text:
            variants = sorted({ch.lower(), ch.upper()})
            parts.append(Lit(ch) if len(variants) == 1 else make_alt(*[Lit(v) for v in variants]))
        return make_seq(*parts)
    if isinstance(regex, Repeat):
        if regex.count == 0:
            return Lit('')
        inner = desugar_regex(regex.inner)
        return make_seq(*([inner] * regex.count))
    if isinstance(regex, Star):
        return Star(desugar_regex(regex.inner))
    if isinstance(regex, Seq):
        return make_seq(*[desugar_regex(p) for p in regex.parts])
    if isinstance(regex, Alt):
        return make_alt(*[desugar_regex(o) for o in regex.options])
    raise TypeError(f"未知正则节点: {regex!r}")


def desugar(contract: Contract) -> Contract:
    """把契约中所有正则替换为核心形式"""

    def walk(node: Pred) -> Pred:
        if isinstance(node, Member):
            return Member(node.name, desugar_regex(node.regex))
        if isinstance(node, Not):
            return Not(walk(node.arg))
        if isinstance(node, And):
            return And(walk(node.left), walk(node.right))
        if isinstance(node, Or):
            return Or(walk(node.left), walk(node.right))
        return node

    return Contract(root=walk(contract.root), variables=contract.variables, source=contract.source)
