"""
精确契约距离模块 - 事件驱动应用漏洞利用自动生成系统
在有界取值空间内精确计算参数向量到契约可满足集的最小曼哈顿距离，
用作进化近似的测试基准
"""

import heapq
import itertools
import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from config import ALPHABET, ORACLE_CONFIG
from exceptions import BoundsTooLarge, EmptyLanguage, ContractDivisionByZero
from contract.nodes import Contract, Len, BinOp, Compare, Not, And, Or, VarType, iter_members, iter_regex_literals
from contract.evaluator import satisfies
from contract.regex import Dfa, compile_regex
from distance.metrics import ValueDomain, check_vector

logger = logging.getLogger(__name__)


def _char_groups(dfas: Sequence[Dfa], alphabet: str) -> List[Tuple[str, frozenset]]:
    """
    按转移行为把字符分组，同组字符在所有自动机的所有状态上转移一致
    :return: [(代表字符, 组内字符集合)]
    """
    groups: Dict[tuple, List[str]] = {}
    for ch in alphabet:
        signature = tuple(tuple(row.get(ch) for row in dfa.transitions) for dfa in dfas)
        groups.setdefault(signature, []).append(ch)
    return [(chars[0], frozenset(chars)) for chars in groups.values()]


def _step(dfas: Sequence[Dfa], states: tuple, ch: str) -> tuple:
    # None 表示字母表外字符导致的死状态
    return tuple(None if q is None else dfa.step(q, ch) for dfa, q in zip(dfas, states))


def _flags(dfas: Sequence[Dfa], states: tuple) -> tuple:
    return tuple(q is not None and q in dfa.accepting for dfa, q in zip(dfas, states))


def _string_classes(s: str, dfas: Sequence[Dfa], domain: ValueDomain,
                    track_length: bool) -> Dict[tuple, Tuple[int, str]]:
    """
    对一个字符串变量，求每个等价类（各成员正则的接受情况, 长度）中
    距 s 最近的字符串
    在 (已读s的位置, 乘积自动机状态, 输出长度) 上做Dijkstra
    :return: {类: (编辑距离, 见证字符串)}
    """
    groups = _char_groups(dfas, domain.alphabet)
    n = len(s)
    start = (0, tuple(dfa.start for dfa in dfas), 0)
    best: Dict[tuple, int] = {start: 0}
    parent: Dict[tuple, Tuple[tuple, str]] = {}
    counter = itertools.count()
    heap = [(0, next(counter), start)]
    classes: Dict[tuple, Tuple[int, str]] = {}

    def relax(state, cost, prev, emitted):
        if cost < best.get(state, cost + 1):
            best[state] = cost
            parent[state] = (prev, emitted)
            heapq.heappush(heap, (cost, next(counter), state))

    while heap:
        cost, _, state = heapq.heappop(heap)
        if cost > best[state]:
            continue
        i, states, length = state

        if i == n:
            key = (_flags(dfas, states), length if track_length else None)
            if key not in classes:
                classes[key] = (cost, _witness(parent, state))

        if i < n:
            relax((i + 1, states, length), cost + 1, state, '')
        if length < domain.max_length:
            for rep, chars in groups:
                nxt = _step(dfas, states, rep)
                relax((i, nxt, length + 1), cost + 1, state, rep)
                if i < n:
                    if s[i] in chars:
                        relax((i + 1, nxt, length + 1), cost, state, s[i])
                    else:
                        relax((i + 1, nxt, length + 1), cost + 1, state, rep)

    return classes


def _witness(parent: Dict[tuple, Tuple[tuple, str]], state: tuple) -> str:
    chars = []
    while state in parent:
        state, emitted = parent[state]
        chars.append(emitted)
    return ''.join(reversed(chars))


def _length_vars(node, found: set):
    if isinstance(node, Len):
        found.add(node.name)
    elif isinstance(node, BinOp):
        _length_vars(node.left, found)
        _length_vars(node.right, found)
    elif isinstance(node, Compare):
        _length_vars(node.left, found)
        _length_vars(node.right, found)
    elif isinstance(node, Not):
        _length_vars(node.arg, found)
    elif isinstance(node, (And, Or)):
        _length_vars(node.left, found)
        _length_vars(node.right, found)


def _candidates(contract: Contract, vector: Sequence[Any],
                domain: ValueDomain) -> List[List[Tuple[int, Any]]]:
    """每个分量的 (代价, 取值) 候选列表，按代价升序"""
    length_vars: set = set()
    _length_vars(contract.root, length_vars)

    dimensions = []
    for (name, var_type), value in zip(contract.variables, vector):
        if var_type == VarType.BOOL:
            options = [(0, value), (1, not value)]
        elif var_type == VarType.INT:
            options = [(abs(n - value), n) for n in range(domain.int_min, domain.int_max + 1)]
        else:
            regexes = list(dict.fromkeys(m.regex for m in iter_members(contract.root) if m.name == name))
            dfas = [compile_regex(r) for r in regexes]
            classes = _string_classes(value, dfas, domain, name in length_vars)
            options = list(classes.values())
        options.sort(key=lambda item: item[0])
        dimensions.append(options)
    return dimensions


def _combinations(dimensions, index, remaining, suffix_min, suffix_max):
    """按总代价恰为 remaining 枚举组合"""
    if index == len(dimensions):
        if remaining == 0:
            yield ()
        return
    for cost, value in dimensions[index]:
        rest = remaining - cost
        if rest < suffix_min[index + 1]:
            break
        if rest > suffix_max[index + 1]:
            continue
        for tail in _combinations(dimensions, index + 1, rest, suffix_min, suffix_max):
            yield (value,) + tail


def oracle_domain(contract: Contract) -> ValueDomain:
    """
    默认枚举边界：契约正则中出现的字符加一个未出现的字符
    其余字符在所有自动机上转移一致，距离不受影响
    """
    literals = dict.fromkeys(ch for member in iter_members(contract.root)
                             for ch in iter_regex_literals(member.regex))
    fresh = next((ch for ch in ALPHABET if ch not in literals), '')
    return ValueDomain(alphabet=''.join(literals) + fresh)


def nearest_model(contract: Contract, vector: Sequence[Any],
                  domain: Optional[ValueDomain] = None,
                  budget: Optional[int] = None) -> Optional[Tuple[int, tuple]]:
    """
    有界取值空间内距 vector 最近的满足向量
    :return: (距离, 满足向量)，空间内无满足向量时返回None
    """
    check_vector(vector, contract.types)
    domain = (domain or oracle_domain(contract)).widen(vector)
    budget = ORACLE_CONFIG['budget'] if budget is None else budget

    dimensions = _candidates(contract, vector, domain)
    total = 1
    for options in dimensions:
        total *= len(options)
    if total > budget:
        raise BoundsTooLarge(f"精确距离需要枚举{total}个组合，超出预算{budget}")

    suffix_min = [0] * (len(dimensions) + 1)
    suffix_max = [0] * (len(dimensions) + 1)
    for index in range(len(dimensions) - 1, -1, -1):
        costs = [cost for cost, _ in dimensions[index]]
        suffix_min[index] = suffix_min[index + 1] + (min(costs) if costs else 0)
        suffix_max[index] = suffix_max[index + 1] + (max(costs) if costs else 0)

    if any(not options for options in dimensions):
        return None

    for target in range(suffix_min[0], suffix_max[0] + 1):
        for candidate in _combinations(dimensions, 0, target, suffix_min, suffix_max):
            try:
                if satisfies(contract, candidate):
                    return target, candidate
            except ContractDivisionByZero:
                continue

    logger.debug(f"有界空间内不存在满足契约的向量: {contract.source!r}")
    return None


def gamma_exact(contract: Contract, vector: Sequence[Any],
                domain: Optional[ValueDomain] = None,
                budget: Optional[int] = None) -> Optional[int]:
    """
    精确契约距离
    :param contract: 契约
    :param vector: 按自由变量顺序排列的参数向量
    :param domain: 枚举边界，默认为 oracle_domain(contract)；总会扩展到包含 vector
    :param budget: 最多枚举的组合数
    :return: 最小曼哈顿距离，不可达时返回None
    :raises BoundsTooLarge: 组合数超出预算
    """
    result = nearest_model(contract, vector, domain, budget)
    return None if result is None else result[0]


def regex_edit_distance(s: str, dfa: Dfa, alphabet: str = ALPHABET) -> int:
    """
    字符串到正则语言的最小编辑距离
    在 (已读s的位置, 自动机状态) 上做Dijkstra
    :raises EmptyLanguage: 自动机语言为空
    """
    if dfa.is_empty():
        raise EmptyLanguage("自动机接受的语言为空")

    live = dfa.live_states()
    groups = _char_groups([dfa], alphabet)
    n = len(s)
    best = {(0, dfa.start): 0}
    heap = [(0, 0, dfa.start)]

    while heap:
        cost, i, q = heapq.heappop(heap)
        if cost > best[(i, q)]:
            continue
        if i == n and q in dfa.accepting:
            return cost

        moves = []
        if i < n:
            moves.append((i + 1, q, cost + 1))
        for rep, chars in groups:
            nxt = dfa.step(q, rep)
            if nxt not in live:
                continue
            moves.append((i, nxt, cost + 1))
            if i < n:
                moves.append((i + 1, nxt, cost if s[i] in chars else cost + 1))

        for ni, nq, ncost in moves:
            if ncost < best.get((ni, nq), ncost + 1):
                best[(ni, nq)] = ncost
                heapq.heappush(heap, (ncost, ni, nq))

    raise EmptyLanguage("给定字母表上无法到达接受状态")
