"""
适应度模块 - 事件驱动应用漏洞利用自动生成系统
调用距离与带契约距离修正的测试适应度
"""

import math
import logging
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Mapping, Optional, Sequence, Tuple, Union

from config import ENGINE_CONFIG
from exceptions import EmptyTrace
from aut.actions import Action
from aut.model import AutModel, VulnSpec
from aut.simulator import AutSimulator, ExecutionTrace, Invocation
from aut.callgraph import distance_ceiling
from ccea.species import ContractSpecies

Distance = Union[int, float]


def call_distance(trace: ExecutionTrace, distances: Mapping[str, Optional[int]],
                  successful: bool, ceiling: Optional[int] = None) -> int:
    """
    调用距离：被调用过程到目标过程的最小距离，不成功时加1
    :param trace: 执行轨迹
    :param distances: 调用图距离，不可达为 None
    :param successful: 轨迹是否触发漏洞
    :param ceiling: 所有被调用过程都不可达时的取值，默认为 直径+2
    :raises EmptyTrace: 轨迹中没有任何调用
    """
    if not trace.invocations:
        raise EmptyTrace("执行轨迹为空")
    reachable = [distances[p] for p in trace.procedures() if distances.get(p) is not None]
    if not reachable:
        return ceiling if ceiling is not None else distance_ceiling(distances)
    return min(reachable) + (0 if successful else 1)


def nearest_invocation(trace: ExecutionTrace, distances: Mapping[str, Optional[int]]) -> Optional[Invocation]:
    """第一个到目标距离最小的调用，全部不可达时为 None"""
    best = None
    for invocation in trace.invocations:
        d = distances.get(invocation.procedure)
        if d is not None and (best is None or d < distances[best.procedure]):
            best = invocation
    return best


def best_query(trace: ExecutionTrace, species: ContractSpecies) -> Tuple[Distance, Optional[tuple]]:
    """
    过程的各次调用中契约距离最小者（平局取最早）
    :return: (契约距离, 参数向量)，过程未被调用时为 (math.inf, None)
    """
    best: Tuple[Distance, Optional[tuple]] = (math.inf, None)
    for invocation in trace.invocations:
        if invocation.procedure != species.procedure:
            continue
        vector = invocation.vector_for(species.contract)
        gamma = species.gamma(vector)
        if best[1] is None or gamma < best[0]:
            best = (gamma, vector)
    return best


def corrected_fitness(delta: int, gamma: Distance) -> Fraction:
    """
    δ − 1/(γ+1)，γ 为无穷大时修正为0
    目标过程已被调用（δ=1）而 γ=0 时把 γ 提升为1，使不成功的测试适应度不为0
    """
    if gamma == math.inf:
        return Fraction(delta)
    if delta == 1 and gamma == 0:
        gamma = 1
    return Fraction(delta) - Fraction(1, int(gamma) + 1)


class FitnessContext:
    """一个工作进程的适应度计算上下文：模型、漏洞、距离、契约物种与轨迹缓存"""

    def __init__(self, model: AutModel, vuln: VulnSpec, distances: Dict[str, Optional[int]],
                 species: Dict[str, Optional[ContractSpecies]], config: dict = None):
        self.model = model
        self.vuln = vuln
        self.distances = distances
        self.ceiling = distance_ceiling(distances)
        self.species = species
        self.config = config or ENGINE_CONFIG
        self.simulator = AutSimulator(model)
        self.execute = lru_cache(maxsize=self.config['trace_cache_size'])(self._execute)
        self.logger = logging.getLogger(__name__)

    def _execute(self, actions: Tuple[Action, ...]) -> ExecutionTrace:
        return self.simulator.execute(actions, self.vuln)

    def species_for(self, procedure: str) -> Optional[ContractSpecies]:
        return self.species.get(procedure)


def fitness_test(test: Sequence[Action], ctx: FitnessContext) -> Fraction:
    """
    测试染色体适应度
    成功的测试为0，否则为 δ − 1/(γ+1)，γ 取距目标最近的过程的契约物种近似距离
    """
    trace = ctx.execute(tuple(test))
    if trace.triggered is not None:
        return Fraction(0)

    delta = call_distance(trace, ctx.distances, False, ctx.ceiling)
    nearest = nearest_invocation(trace, ctx.distances)
    if nearest is None:
        return Fraction(delta)

    species = ctx.species_for(nearest.procedure)
    gamma = best_query(trace, species)[0] if species is not None else math.inf
    return corrected_fitness(delta, gamma)
