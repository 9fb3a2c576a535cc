"""
正则自动机模块 - 事件驱动应用漏洞利用自动生成系统
把契约正则编译为字母表上的完全确定有限自动机，支持补、交与空性判定
"""

import logging
from collections import deque
from functools import lru_cache
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from config import ALPHABET
from exceptions import AlphabetError
from contract.nodes import Lit, Seq, Alt, Star, CharClass, AnyChar, Repeat, ICase, Regex

logger = logging.getLogger(__name__)

_ALPHABET_SET = frozenset(ALPHABET)


class _Nfa:
    """带ε转移的Thompson自动机，转移标签为字符集合"""

    def __init__(self):
        self.edges: List[List[Tuple[Optional[FrozenSet[str]], int]]] = []

    def new_state(self) -> int:
        self.edges.append([])
        return len(self.edges) - 1

    def add(self, src: int, label: Optional[FrozenSet[str]], dst: int):
        self.edges[src].append((label, dst))

    def build(self, regex: Regex) -> Tuple[int, int]:
        """返回片段的 (入口, 出口)"""
        start = self.new_state()
        end = self.new_state()

        if isinstance(regex, (Lit, ICase)):
            current = start
            for ch in regex.text:
                if ch not in _ALPHABET_SET:
                    raise AlphabetError(f"字面量包含不可打印字符: {ch!r}")
                label = frozenset({ch.lower(), ch.upper()}) if isinstance(regex, ICase) else frozenset(ch)
                nxt = self.new_state()
                self.add(current, label, nxt)
                current = nxt
            self.add(current, None, end)
        elif isinstance(regex, CharClass):
            bad = regex.chars - _ALPHABET_SET
            if bad:
                raise AlphabetError(f"字符类包含不可打印字符: {sorted(bad)!r}")
            self.add(start, frozenset(regex.chars), end)
        elif isinstance(regex, AnyChar):
            self.add(start, _ALPHABET_SET, end)
        elif isinstance(regex, Seq):
            current = start
            for part in regex.parts:
                s, e = self.build(part)
                self.add(current, None, s)
                current = e
            self.add(current, None, end)
        elif isinstance(regex, Alt):
            for option in regex.options:
                s, e = self.build(option)
                self.add(start, None, s)
                self.add(e, None, end)
        elif isinstance(regex, Star):
            s, e = self.build(regex.inner)
            self.add(start, None, s)
            self.add(e, None, s)
            self.add(start, None, end)
            self.add(e, None, end)
        elif isinstance(regex, Repeat):
            current = start
            for _ in range(regex.count):
                s, e = self.build(regex.inner)
                self.add(current, None, s)
                current = e
            self.add(current, None, end)
        else:
            raise TypeError(f"未知正则节点: {regex!r}")

        return start, end

    def closure(self, states) -> FrozenSet[int]:
        stack = list(states)
        seen = set(states)
        while stack:
            state = stack.pop()
            for label, dst in self.edges[state]:
                if label is None and dst not in seen:
                    seen.add(dst)
                    stack.append(dst)
        return frozenset(seen)


class Dfa:
    """
    字母表上的完全DFA
    transitions[q][c] 对每个字母表字符都有定义；状态0为初始状态
    """

    __slots__ = ('transitions', 'accepting', 'start', '_live', '_finish_cache')

    def __init__(self, transitions: Sequence[Dict[str, int]], accepting, start: int = 0):
        self.transitions = tuple(transitions)
        self.accepting = frozenset(accepting)
        self.start = start
        self._live = None
        self._finish_cache = {}

    def __len__(self) -> int:
        return len(self.transitions)

    def __repr__(self) -> str:
        return f"Dfa(states={len(self)}, accepting={len(self.accepting)})"

    def step(self, state: int, ch: str) -> Optional[int]:
        return self.transitions[state].get(ch)

    def run(self, text: str, state: Optional[int] = None) -> Optional[int]:
        """从给定状态读入文本，遇到字母表外字符返回None"""
        state = self.start if state is None else state
        for ch in text:
            state = self.transitions[state].get(ch)
            if state is None:
                return None
        return state

    def accepts(self, text: str) -> bool:
        state = self.run(text)
        return state is not None and state in self.accepting

    def complement(self) -> 'Dfa':
        """补自动机（相对于字母表上的全部字符串）"""
        rejecting = set(range(len(self.transitions))) - self.accepting
        return Dfa(self.transitions, rejecting, self.start)

    def intersect(self, other: 'Dfa') -> 'Dfa':
        """乘积构造求交"""
        index = {(self.start, other.start): 0}
        queue = deque([(self.start, other.start)])
        transitions: List[Dict[str, int]] = []
        accepting = set()
        while queue:
            pair = queue.popleft()
            current = index[pair]
            while len(transitions) <= current:
                transitions.append({})
            if pair[0] in self.accepting and pair[1] in other.accepting:
                accepting.add(current)
            row_a, row_b = self.transitions[pair[0]], other.transitions[pair[1]]
            for ch in ALPHABET:
                target = (row_a[ch], row_b[ch])
                if target not in index:
                    index[target] = len(index)
                    queue.append(target)
                transitions[current][ch] = index[target]
        return Dfa(transitions, accepting, 0)

    def live_states(self) -> FrozenSet[int]:
        """能够到达接受状态的状态集合"""
        if self._live is None:
            reverse: Dict[int, Set[int]] = {}
            for src, row in enumerate(self.transitions):
                for dst in set(row.values()):
                    reverse.setdefault(dst, set()).add(src)
            live = set(self.accepting)
            stack = list(self.accepting)
            while stack:
                state = stack.pop()
                for src in reverse.get(state, ()):
                    if src not in live:
                        live.add(src)
                        stack.append(src)
            self._live = frozenset(live)
        return self._live

    def is_empty(self) -> bool:
        return self.start not in self.live_states()

    def finishing_sets(self, max_length: int, alphabet: str = ALPHABET) -> List[FrozenSet[int]]:
        """
        finishing[k] 为恰好再读 k 个字母表字符可到达接受状态的状态集合
        :param max_length: 最大长度
        :param alphabet: 允许使用的字符
        """
        key = (max_length, alphabet)
        if key not in self._finish_cache:
            sets = [frozenset(self.accepting)]
            for _ in range(max_length):
                previous = sets[-1]
                sets.append(frozenset(
                    q for q, row in enumerate(self.transitions)
                    if any(row[ch] in previous for ch in alphabet)
                ))
            self._finish_cache[key] = sets
        return self._finish_cache[key]

    def accepted_lengths(self, max_length: int, alphabet: str = ALPHABET) -> List[int]:
        """不超过 max_length 的可接受字符串长度"""
        sets = self.finishing_sets(max_length, alphabet)
        return [k for k, states in enumerate(sets) if self.start in states]


def _determinize(nfa: _Nfa, start: int, end: int) -> Dfa:
    """子集构造，得到完全DFA（空集合作为死状态）"""
    initial = nfa.closure([start])
    index = {initial: 0}
    queue = deque([initial])
    transitions: List[Dict[str, int]] = []
    accepting = set()

    while queue:
        subset = queue.popleft()
        current = index[subset]
        while len(transitions) <= current:
            transitions.append({})
        if end in subset:
            accepting.add(current)

        moves: Dict[str, Set[int]] = {}
        for state in subset:
            for label, dst in nfa.edges[state]:
                if label is None:
                    continue
                for ch in label:
                    moves.setdefault(ch, set()).add(dst)

        row = transitions[current]
        for ch in ALPHABET:
            target = nfa.closure(moves[ch]) if ch in moves else frozenset()
            if target not in index:
                index[target] = len(index)
                queue.append(target)
            row[ch] = index[target]

    return Dfa(transitions, accepting, 0)


@lru_cache(maxsize=1024)
def compile_regex(regex: Regex) -> Dfa:
    """
    把正则表达式编译为完全DFA
    :param regex: 正则语法树（允许语法糖节点）
    :return: 恰好接受 L(regex) 的DFA
    """
    nfa = _Nfa()
    start, end = nfa.build(regex)
    dfa = _determinize(nfa, start, end)
    logger.debug(f"正则编译完成: NFA {len(nfa.edges)}个状态 -> DFA {len(dfa)}个状态")
    return dfa


def universal_dfa(alphabet: str = ALPHABET) -> Dfa:
    """接受给定字符组成的全部字符串"""
    allowed = set(alphabet)
    row_live = {ch: (0 if ch in allowed else 1) for ch in ALPHABET}
    row_dead = {ch: 1 for ch in ALPHABET}
    return Dfa([row_live, row_dead], {0}, 0)
