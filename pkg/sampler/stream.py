"""
契约模型采样模块 - 事件驱动应用漏洞利用自动生成系统
为契约生成互不相同的满足向量，用于初始化契约物种种群
"""

import math
import random
import logging
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple, Union

from config import ALPHABET, SAMPLER_CONFIG
from exceptions import UnsatContract, ContractDivisionByZero
from contract.nodes import (
    Num, IntVar, Len, BinOp, BoolConst, BoolVar, Compare, Member, Not, And, Or,
    Contract, Pred, VarType
)
from contract.evaluator import eval_arith, satisfies
from contract.regex import Dfa, compile_regex, universal_dfa

logger = logging.getLogger(__name__)

_INF = math.inf


class SampleOutcome(Enum):
    EXHAUSTED = 'exhausted'
    UNSAT = 'unsat'


# ---------- 范式变换 ----------

def to_nnf(node: Pred, negate: bool = False) -> Pred:
    """
    否定范式：否定只作用于成员谓词与布尔变量
    比较的否定改写为其余两种关系的析取
    """
    if isinstance(node, Not):
        return to_nnf(node.arg, not negate)
    if isinstance(node, And):
        left, right = to_nnf(node.left, negate), to_nnf(node.right, negate)
        return Or(left, right) if negate else And(left, right)
    if isinstance(node, Or):
        left, right = to_nnf(node.left, negate), to_nnf(node.right, negate)
        return And(left, right) if negate else Or(left, right)
    if isinstance(node, BoolConst):
        return BoolConst(node.value != negate)
    if isinstance(node, Compare) and negate:
        others = [op for op in ('<', '=', '>') if op != node.op]
        return Or(Compare(others[0], node.left, node.right), Compare(others[1], node.left, node.right))
    if isinstance(node, (Member, BoolVar)) and negate:
        return Not(node)
    return node


def to_dnf(node: Pred, limit: int) -> Tuple[List[Tuple[Pred, ...]], bool]:
    """
    NNF公式展开为析取范式
    :return: (子句列表, 是否因超过 limit 被截断)
    """
    if isinstance(node, Or):
        left, cut_l = to_dnf(node.left, limit)
        right, cut_r = to_dnf(node.right, limit)
        clauses = left + right
        return clauses[:limit], cut_l or cut_r or len(clauses) > limit
    if isinstance(node, And):
        left, cut_l = to_dnf(node.left, limit)
        right, cut_r = to_dnf(node.right, limit)
        clauses = []
        truncated = cut_l or cut_r
        for a in left:
            for b in right:
                if len(clauses) >= limit:
                    return clauses, True
                clauses.append(a + b)
        return clauses, truncated
    return [(node,)], False


# ---------- 区间传播 ----------

def _term_key(expr) -> Optional[tuple]:
    if isinstance(expr, IntVar):
        return ('int', expr.name)
    if isinstance(expr, Len):
        return ('len', expr.name)
    return None


def _constant(expr) -> Optional[int]:
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, BinOp):
        try:
            left, right = _constant(expr.left), _constant(expr.right)
            if left is None or right is None:
                return None
            return eval_arith(BinOp(expr.op, Num(left), Num(right)), {})
        except ContractDivisionByZero:
            return None
    return None


def _bounds(side, intervals) -> Optional[Tuple[float, float]]:
    key = _term_key(side)
    if key is not None:
        return intervals[key]
    value = _constant(side)
    return None if value is None else (value, value)


def propagate(compares: Sequence[Compare], intervals: Dict[tuple, Tuple[float, float]]) -> bool:
    """
    在 项(整数变量或len) 与常量之间传播区间直到不动点
    :return: False 表示某个区间为空（子句不可满足）
    """
    for _ in range(64):
        changed = False
        for cmp in compares:
            left, right = _bounds(cmp.left, intervals), _bounds(cmp.right, intervals)
            if left is None or right is None:
                continue
            (llo, lhi), (rlo, rhi) = left, right
            if cmp.op == '<':
                new_left, new_right = (llo, min(lhi, rhi - 1)), (max(rlo, llo + 1), rhi)
            elif cmp.op == '>':
                new_left, new_right = (max(llo, rlo + 1), lhi), (rlo, min(rhi, lhi - 1))
            else:
                both = (max(llo, rlo), min(lhi, rhi))
                new_left, new_right = both, both
            for side, new in ((cmp.left, new_left), (cmp.right, new_right)):
                key = _term_key(side)
                if new[0] > new[1]:
                    return False
                if key is not None and intervals[key] != new:
                    intervals[key] = new
                    changed = True
        if not changed:
            return True
    return True


# ---------- 子句准备 ----------

class _Clause:
    """一个合取子句的预处理结果"""

    def __init__(self, literals: Tuple[Pred, ...], contract: Contract):
        self.feasible = True
        self.bools: Dict[str, bool] = {}
        self.compares: List[Compare] = []
        self.dfas: Dict[str, Dfa] = {}

        memberships: Dict[str, List[Tuple[Any, bool]]] = {}
        for literal in literals:
            if isinstance(literal, BoolConst):
                if not literal.value:
                    self.feasible = False
            elif isinstance(literal, BoolVar) or (isinstance(literal, Not) and isinstance(literal.arg, BoolVar)):
                name = literal.name if isinstance(literal, BoolVar) else literal.arg.name
                value = isinstance(literal, BoolVar)
                if self.bools.setdefault(name, value) != value:
                    self.feasible = False
            elif isinstance(literal, Member):
                memberships.setdefault(literal.name, []).append((literal.regex, True))
            elif isinstance(literal, Not) and isinstance(literal.arg, Member):
                memberships.setdefault(literal.arg.name, []).append((literal.arg.regex, False))
            elif isinstance(literal, Compare):
                self.compares.append(literal)

        for name, var_type in contract.variables:
            if var_type != VarType.STR:
                continue
            dfa = universal_dfa()
            for regex, positive in memberships.get(name, []):
                compiled = compile_regex(regex)
                dfa = dfa.intersect(compiled if positive else compiled.complement())
            if dfa.is_empty():
                self.feasible = False
            self.dfas[name] = dfa

        self.intervals: Dict[tuple, Tuple[float, float]] = {}
        for name, var_type in contract.variables:
            if var_type == VarType.INT:
                self.intervals[('int', name)] = (-_INF, _INF)
            elif var_type == VarType.STR:
                self.intervals[('len', name)] = (_shortest(self.dfas[name]), _INF)
        if self.feasible and not propagate(self.compares, self.intervals):
            self.feasible = False


def _shortest(dfa: Dfa) -> float:
    """最短可接受串长度，语言为空时为无穷大"""
    if dfa.start in dfa.accepting:
        return 0
    frontier, seen, length = {dfa.start}, {dfa.start}, 0
    live = dfa.live_states()
    while frontier:
        length += 1
        nxt = set()
        for q in frontier:
            for target in set(dfa.transitions[q].values()):
                if target in live and target not in seen:
                    seen.add(target)
                    nxt.add(target)
        if nxt & dfa.accepting:
            return length
        frontier = nxt
    return _INF


# ---------- 模型流 ----------

class ModelStream:
    """
    契约模型流
    每次 next_model 返回一个满足契约且与之前所有结果不同的参数向量
    """

    def __init__(self, contract: Contract, seed: int = 0, budget: int = None, config: dict = None):
        self.contract = contract
        self.config = config or SAMPLER_CONFIG
        self.budget = budget if budget is not None else self.config['budget']
        self.rng = random.Random(seed)
        self.alphabet = self.config.get('alphabet', ALPHABET)
        self.excluded: List[tuple] = []
        self._seen: Set[tuple] = set()
        self.logger = logging.getLogger(__name__)

        clauses, self._truncated = to_dnf(to_nnf(contract.root), self.config['max_dnf_clauses'])
        self._clauses = [_Clause(literals, contract) for literals in clauses]
        self._feasible = [c for c in self._clauses if c.feasible]
        if self._truncated:
            self.logger.warning(f"析取范式超过{self.config['max_dnf_clauses']}个子句，已截断")

    @property
    def proven_unsat(self) -> bool:
        return not self._feasible and not self._truncated

    def next_model(self) -> Union[tuple, SampleOutcome]:
        """
        :return: 新的满足向量，或 SampleOutcome.UNSAT / SampleOutcome.EXHAUSTED
        """
        if self.proven_unsat:
            return SampleOutcome.UNSAT
        if not self._feasible:
            return SampleOutcome.EXHAUSTED

        for attempt in range(self.budget):
            clause = self.rng.choice(self._feasible)
            vector = self._sample(clause)
            if vector is None or vector in self._seen:
                continue
            if _holds(self.contract, vector):
                self._seen.add(vector)
                self.excluded.append(vector)
                return vector
            self.logger.debug(f"采样结果不满足契约，重试: {vector!r}")

        self.logger.debug(f"采样预算{self.budget}次耗尽")
        return SampleOutcome.EXHAUSTED

    def _sample(self, clause: _Clause) -> Optional[tuple]:
        intervals = dict(clause.intervals)
        max_length = self.config['max_length']
        values: Dict[str, Any] = {}

        for name, var_type in self.contract.variables:
            if var_type != VarType.STR:
                continue
            dfa = clause.dfas[name]
            lo, hi = intervals[('len', name)]
            lengths = [n for n in dfa.accepted_lengths(max_length, self.alphabet) if lo <= n <= hi]
            if not lengths:
                return None
            length = self._pick_length(lengths)
            intervals[('len', name)] = (length, length)
            if not propagate(clause.compares, intervals):
                return None
            values[name] = self._walk(dfa, length)

        for name, var_type in self.contract.variables:
            if var_type == VarType.INT:
                lo, hi = intervals[('int', name)]
                value = self.rng.randint(*self._window(lo, hi))
                intervals[('int', name)] = (value, value)
                if not propagate(clause.compares, intervals):
                    return None
                values[name] = value
            elif var_type == VarType.BOOL:
                values[name] = clause.bools.get(name, self.rng.random() < 0.5)

        return tuple(values[name] for name in self.contract.names)

    def _pick_length(self, lengths: List[int]) -> int:
        # 几何衰减，期望长度 expected_length
        expected = self.config['expected_length']
        ratio = expected / (expected + 1.0)
        weights = [ratio ** n for n in lengths]
        return self.rng.choices(lengths, weights=weights)[0]

    def _window(self, lo: float, hi: float) -> Tuple[int, int]:
        int_min, int_max = self.config['int_min'], self.config['int_max']
        a, b = max(lo, int_min), min(hi, int_max)
        if a <= b:
            return int(a), int(b)
        span = int_max - int_min
        if lo > int_max:
            return int(lo), int(min(hi, lo + span))
        return int(max(lo, hi - span)), int(hi)

    def _walk(self, dfa: Dfa, length: int) -> str:
        """恰好 length 步、终止于接受状态的随机游走"""
        finishing = dfa.finishing_sets(max(length, self.config['max_length']), self.alphabet)
        state = dfa.start
        chars = []
        for remaining in range(length, 0, -1):
            target_set = finishing[remaining - 1]
            options = [ch for ch in self.alphabet if dfa.step(state, ch) in target_set]
            ch = self.rng.choice(options)
            chars.append(ch)
            state = dfa.step(state, ch)
        return ''.join(chars)


def _holds(contract: Contract, vector: tuple) -> bool:
    # 除零的向量不算模型
    try:
        return satisfies(contract, vector)
    except ContractDivisionByZero:
        logger.debug(f"求值除零，视为非模型: {vector!r}")
        return False


def next_model(stream: ModelStream) -> Union[tuple, SampleOutcome]:
    return stream.next_model()


def seed_population(contract: Contract, n: int, seed: int = 0, config: dict = None,
                    procedure: str = None) -> List[tuple]:
    """
    生成契约物种的初始种群：先取不同的模型，不足时循环复制
    :param contract: 调用契约
    :param n: 种群大小
    :param seed: 随机种子
    :raises UnsatContract: 找不到任何模型
    """
    config = config or SAMPLER_CONFIG
    if n < 1:
        raise ValueError("种群大小必须至少为1")

    if not contract.variables:
        if _holds(contract, ()):
            return [() for _ in range(n)]
        raise UnsatContract(f"契约不可满足: {contract.source!r}", procedure)

    stream = ModelStream(contract, seed=seed, config=config)
    wanted = min(n, config['max_distinct_models'])
    models: List[tuple] = []
    outcome = None
    while len(models) < wanted:
        outcome = stream.next_model()
        if isinstance(outcome, SampleOutcome):
            break
        models.append(outcome)

    if not models:
        reason = '已证明无模型' if outcome == SampleOutcome.UNSAT else '采样预算耗尽'
        raise UnsatContract(f"契约找不到模型（{reason}）: {contract.source!r}", procedure)
    if len(models) < wanted:
        logger.warning(f"契约只找到{len(models)}个不同模型，按循环复制补足{n}个")

    return [models[i % len(models)] for i in range(n)]
