"""
遗传算子模块 - 事件驱动应用漏洞利用自动生成系统
测试染色体与契约染色体的初始化、交叉、变异和锦标赛选择
"""

import random
from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

from config import ALPHABET, SIMULATOR_CONFIG
from exceptions import LabelCountMismatch
from contract.nodes import VarType
from distance.metrics import ValueDomain, value_type
from aut.actions import Action, Click, Type, CLICK, TYPE

TestChromosome = Tuple[Action, ...]


@dataclass(frozen=True)
class GeneSpace:
    """动作参数的取值范围"""
    width: int = SIMULATOR_CONFIG['canvas_width']
    height: int = SIMULATOR_CONFIG['canvas_height']
    max_text_length: int = SIMULATOR_CONFIG['max_text_length']
    alphabet: str = ALPHABET


def label_counts(test: Sequence[Action]) -> Counter:
    return Counter(action.label for action in test)


def random_action(label: str, rng: random.Random, space: GeneSpace) -> Action:
    if label == CLICK:
        return Click(rng.randrange(space.width), rng.randrange(space.height))
    length = rng.randint(0, space.max_text_length)
    return Type(''.join(rng.choice(space.alphabet) for _ in range(length)))


def random_test(k_click: int, k_type: int, rng: random.Random, space: GeneSpace) -> TestChromosome:
    """固定标签计数的随机动作的随机排列"""
    labels = [CLICK] * k_click + [TYPE] * k_type
    rng.shuffle(labels)
    return tuple(random_action(label, rng, space) for label in labels)


def _positions(test: Sequence[Action]) -> Dict[Tuple[str, int], int]:
    """(标签, 同标签内序号) -> 染色体下标"""
    seen: Counter = Counter()
    index = {}
    for position, action in enumerate(test):
        index[(action.label, seen[action.label])] = position
        seen[action.label] += 1
    return index


def _cross_pair(a: Action, b: Action, cut, rng: random.Random, space: GeneSpace) -> Tuple[Action, Action]:
    if isinstance(a, Click):
        k = rng.randint(0, 2) if cut is None else cut
        first, second = (a.x, a.y), (b.x, b.y)
        c1 = first[:k] + second[k:]
        c2 = second[:k] + first[k:]
        return Click(*c1), Click(*c2)
    if cut is None:
        cut = (rng.randint(0, len(a.text)), rng.randint(0, len(b.text)))
    c1, c2 = cut
    limit = space.max_text_length
    return (Type((a.text[:c1] + b.text[c2:])[:limit]),
            Type((b.text[:c2] + a.text[c1:])[:limit]))


def crossover_tests(a: Sequence[Action], b: Sequence[Action], positions: int, rng: random.Random,
                    space: GeneSpace = GeneSpace(), picks: Optional[Sequence[Tuple[str, int]]] = None,
                    cuts: Optional[Dict[Tuple[str, int], Any]] = None) -> Tuple[TestChromosome, TestChromosome]:
    """
    按标签内序号对齐的多位置交叉
    :param positions: 参与交叉的动作对个数 l
    :param picks: 指定的 (标签, 序号)，默认随机选取
    :param cuts: 指定切点；type 为两个前缀长度 (c1, c2)，click 为保留的坐标个数 0/1/2
    :raises LabelCountMismatch: 两个父代的标签计数不同
    """
    if label_counts(a) != label_counts(b):
        raise LabelCountMismatch(f"父代标签计数不同: {dict(label_counts(a))} 与 {dict(label_counts(b))}")
    if not 1 <= positions <= len(a):
        raise ValueError(f"交叉位置数必须在1到{len(a)}之间: {positions}")

    index_a, index_b = _positions(a), _positions(b)
    if picks is None:
        picks = rng.sample(sorted(index_a), positions)
    cuts = cuts or {}

    child_a, child_b = list(a), list(b)
    for key in picks:
        i, j = index_a[key], index_b[key]
        child_a[i], child_b[j] = _cross_pair(a[i], b[j], cuts.get(key), rng, space)
    return tuple(child_a), tuple(child_b)


def mutate_string(text: str, rng: random.Random, alphabet: str, max_length: int,
                  preferred: str = '', bias: float = 0.0) -> str:
    """
    随机删除、插入或替换一个字符
    新字符以概率 bias 取自 preferred，否则均匀取自 alphabet
    """
    def pick() -> str:
        if preferred and rng.random() < bias:
            return rng.choice(preferred)
        return rng.choice(alphabet)

    operations = []
    if text:
        operations.extend(('delete', 'modify'))
    if len(text) < max_length:
        operations.append('insert')
    if not operations:
        return text

    operation = rng.choice(operations)
    if operation == 'delete':
        i = rng.randrange(len(text))
        return text[:i] + text[i + 1:]
    if operation == 'insert':
        i = rng.randint(0, len(text))
        return text[:i] + pick() + text[i:]
    i = rng.randrange(len(text))
    return text[:i] + pick() + text[i + 1:]


def mutate_test(test: Sequence[Action], p_mut: float, rng: random.Random,
                space: GeneSpace = GeneSpace()) -> TestChromosome:
    """
    每个动作以概率 p_mut 变异：参数变异或与另一动作交换位置
    """
    genes = list(test)
    for i in range(len(genes)):
        if rng.random() >= p_mut:
            continue
        if len(genes) > 1 and rng.random() < 0.5:
            j = rng.choice([k for k in range(len(genes)) if k != i])
            genes = list(swap_genes(genes, i, j))
            continue
        gene = genes[i]
        if isinstance(gene, Click):
            if rng.random() < 0.5:
                genes[i] = Click(rng.randrange(space.width), gene.y)
            else:
                genes[i] = Click(gene.x, rng.randrange(space.height))
        else:
            genes[i] = Type(mutate_string(gene.text, rng, space.alphabet, space.max_text_length))
    return tuple(genes)


def swap_genes(test: Sequence[Action], i: int, j: int) -> TestChromosome:
    genes = list(test)
    genes[i], genes[j] = genes[j], genes[i]
    return tuple(genes)


def tournament_select(population: Sequence, k: int, fitnesses: Sequence, rng: random.Random):
    """
    确定性锦标赛：不放回抽取 k 个参赛者，适应度最小者获胜，平局取种群下标最小者
    """
    if not population:
        raise ValueError("种群为空")
    k = max(1, min(k, len(population)))
    entrants = rng.sample(range(len(population)), k)
    winner = min(entrants, key=lambda idx: (fitnesses[idx], idx))
    return population[winner]


# ---------- 契约染色体 ----------

def crossover_vectors(w1: tuple, w2: tuple, rng: random.Random, point: Optional[int] = None) -> Tuple[tuple, tuple]:
    """单点交叉，交换切点之后的分量"""
    if len(w1) < 2:
        return w1, w2
    if point is None:
        point = rng.randint(1, len(w1) - 1)
    return w1[:point] + w2[point:], w2[:point] + w1[point:]


def mutate_vector(w: tuple, rng: random.Random, domain: ValueDomain,
                  query: Optional[tuple] = None, bias: float = 0.0) -> tuple:
    """随机修改一个分量；字符串修改优先使用查询向量中的字符"""
    if not w:
        return w
    i = rng.randrange(len(w))
    value = w[i]
    kind = value_type(value)
    if kind == VarType.BOOL:
        new = not value
    elif kind == VarType.INT:
        if rng.random() < 0.5:
            new = domain.clamp_int(value + rng.choice((-1, 1)))
        else:
            new = rng.randint(domain.int_min, domain.int_max)
    else:
        preferred = query[i] if query is not None and isinstance(query[i], str) else ''
        new = mutate_string(value, rng, domain.alphabet, domain.max_length, preferred, bias)
    return w[:i] + (new,) + w[i + 1:]
