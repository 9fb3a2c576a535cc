"""
契约物种模块 - 事件驱动应用漏洞利用自动生成系统
每个过程一个契约物种，用种群中的满足向量近似契约距离
"""

import math
import random
import logging
from typing import Dict, List, Sequence, Union

from config import ENGINE_CONFIG, SAMPLER_CONFIG
from exceptions import ContractDivisionByZero
from contract.nodes import Contract
from contract.evaluator import satisfies
from distance.metrics import ValueDomain, check_vector, manhattan
from sampler.stream import seed_population
from ccea.operators import crossover_vectors, mutate_vector, tournament_select

Distance = Union[int, float]

_MEMBER_CACHE_SIZE = 65536


class ContractSpecies:
    """过程调用契约的物种：种群中的每个向量都应满足该契约"""

    def __init__(self, procedure: str, contract: Contract, population: Sequence[tuple],
                 domain: ValueDomain = None, config: dict = None):
        self.procedure = procedure
        self.contract = contract
        self.population: List[tuple] = list(population)
        self.domain = domain or sampler_domain(SAMPLER_CONFIG)
        self.config = config or ENGINE_CONFIG
        self.types = [var_type for _, var_type in contract.variables]
        self._satisfied: Dict[tuple, bool] = {}
        self._gamma_cache: Dict[tuple, Distance] = {}
        self.logger = logging.getLogger(__name__)

    def is_member(self, w: tuple) -> bool:
        if w not in self._satisfied:
            if len(self._satisfied) >= _MEMBER_CACHE_SIZE:
                self._satisfied.clear()
            try:
                self._satisfied[w] = satisfies(self.contract, w)
            except ContractDivisionByZero:
                self._satisfied[w] = False
        return self._satisfied[w]

    def gamma(self, v: tuple) -> Distance:
        """带缓存的契约距离近似，种群变化后缓存失效"""
        if v not in self._gamma_cache:
            self._gamma_cache[v] = gamma_approx(self, v)
        return self._gamma_cache[v]

    def evolve(self, v: tuple, rng: random.Random):
        """
        以查询向量 v 为目标进化一代
        精英保留，锦标赛选择后单点交叉并变异，变异保持在扩展到 v 的取值空间内
        """
        check_vector(v, self.types)
        size = len(self.population)
        if size == 0:
            return

        domain = self.domain.widen(v)
        fitnesses = [fitness_contract(self, w, v) for w in self.population]
        best = min(range(size), key=lambda i: (fitnesses[i], i))
        offspring = [self.population[best]]

        k = self.config['tournament_size']
        bias = self.config['query_char_bias']
        while len(offspring) < size:
            a = tournament_select(self.population, k, fitnesses, rng)
            b = tournament_select(self.population, k, fitnesses, rng)
            if rng.random() < self.config['contract_crossover_prob']:
                a, b = crossover_vectors(a, b, rng)
            for child in (a, b):
                if rng.random() < self.config['contract_mutation_prob']:
                    child = mutate_vector(child, rng, domain, v, bias)
                offspring.append(child)

        self.population = offspring[:size]
        self._gamma_cache.clear()


def sampler_domain(config: dict) -> ValueDomain:
    """采样配置对应的取值空间"""
    return ValueDomain.from_config(config)


def gamma_approx(species: ContractSpecies, v: tuple) -> Distance:
    """
    契约距离的种群近似
    :param species: 契约物种
    :param v: 实际参数向量
    :return: 到满足契约的种群成员的最小曼哈顿距离，没有满足的成员时为 math.inf
    :raises ArityMismatch: v 与契约变量不匹配
    """
    check_vector(v, species.types)
    best: Distance = math.inf
    for w in species.population:
        if species.is_member(w):
            best = min(best, manhattan(v, w))
            if best == 0:
                break
    return best


def fitness_contract(species: ContractSpecies, w: tuple, v: tuple) -> Distance:
    """契约染色体适应度：满足契约时为到 v 的曼哈顿距离，否则为 math.inf"""
    check_vector(v, species.types)
    check_vector(w, species.types)
    return manhattan(v, w) if species.is_member(w) else math.inf


def create_species(procedure: str, contract: Contract, size: int, seed: int = 0,
                   sampler_config: dict = None, config: dict = None) -> ContractSpecies:
    """
    用契约模型初始化契约物种
    :raises UnsatContract: 契约找不到模型
    """
    sampler_config = sampler_config or SAMPLER_CONFIG
    population = seed_population(contract, size, seed=seed, config=sampler_config, procedure=procedure)
    species = ContractSpecies(procedure, contract, population, sampler_domain(sampler_config), config)
    species.logger.debug(f"过程 {procedure} 的契约物种已初始化，种群大小{size}")
    return species
