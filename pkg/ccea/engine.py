"""
协同进化引擎模块 - 事件驱动应用漏洞利用自动生成系统
一个测试物种加每个过程一个契约物种，逐代进化直到找到利用或达到代数上限
"""

import time
import random
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from deap import base, tools

from config import ENGINE_CONFIG, SAMPLER_CONFIG
from exceptions import UnsatContract
from aut.model import AutModel, VulnSpec
from aut.simulator import ExecutionTrace
from aut.callgraph import target_procedures, call_graph_distances
from ccea.operators import GeneSpace, TestChromosome, random_test, crossover_tests, mutate_test, tournament_select
from ccea.species import ContractSpecies, create_species
from ccea.fitness import FitnessContext, fitness_test, best_query

SUCCESS = 'success'
GENERATION_CAP = 'generation_cap'

logger = logging.getLogger(__name__)


@dataclass
class WorkerStats:
    """单个工作进程的运行结果"""
    worker_id: int
    seed: int
    history: List[Tuple[int, Fraction]] = field(default_factory=list)
    reason: str = GENERATION_CAP
    best: Optional[TestChromosome] = None
    best_fitness: Optional[Fraction] = None
    trace: Optional[ExecutionTrace] = None
    wall_time: float = 0.0
    logbook: Optional[tools.Logbook] = None

    @property
    def generations(self) -> int:
        return len(self.history)

    @property
    def succeeded(self) -> bool:
        return self.reason == SUCCESS


def _init_species(model: AutModel, targets, config: dict, sampler_config: dict,
                  rng: random.Random) -> Dict[str, Optional[ContractSpecies]]:
    species: Dict[str, Optional[ContractSpecies]] = {}
    for name, proc in model.procedures.items():
        seed = rng.randrange(2 ** 31)
        try:
            species[name] = create_species(name, proc.call_contract, config['contract_population_size'],
                                           seed=seed, sampler_config=sampler_config, config=config)
        except UnsatContract:
            if name in targets:
                raise
            logger.warning(f"过程 {name} 的调用契约不可满足，契约物种为空")
            species[name] = None
    return species


def _make_toolbox(config: dict, space: GeneSpace, rng: random.Random) -> base.Toolbox:
    toolbox = base.Toolbox()
    toolbox.register('individual', random_test, config['k_click'], config['k_type'], rng, space)
    toolbox.register('population', tools.initRepeat, list, toolbox.individual)
    toolbox.register('mate', crossover_tests, positions=config['crossover_positions'], rng=rng, space=space)
    toolbox.register('mutate', mutate_test, p_mut=config['mutation_prob'], rng=rng, space=space)
    toolbox.register('select', tournament_select, k=config['tournament_size'], rng=rng)
    return toolbox


def _next_generation(population: List[TestChromosome], fitnesses: List[Fraction], elite: int,
                     toolbox: base.Toolbox, config: dict, rng: random.Random) -> List[TestChromosome]:
    """精英直接保留，其余由锦标赛、交叉与变异产生"""
    offspring = [population[elite]]
    while len(offspring) < len(population):
        a = toolbox.select(population, fitnesses=fitnesses)
        b = toolbox.select(population, fitnesses=fitnesses)
        if rng.random() < config['crossover_prob']:
            a, b = toolbox.mate(a, b)
        offspring.append(toolbox.mutate(a))
        offspring.append(toolbox.mutate(b))
    return offspring[:len(population)]


def _evolve_species(trace: ExecutionTrace, species: Dict[str, Optional[ContractSpecies]], rng: random.Random):
    """以当前最优测试的实际参数为查询向量进化被调用过程的契约物种"""
    invoked = set(trace.procedures())
    for name, cs in species.items():
        if cs is None or name not in invoked or not cs.contract.variables:
            continue
        _, query = best_query(trace, cs)
        cs.evolve(query, rng)


def run_worker(model: AutModel, vuln: VulnSpec, config: dict = None, seed: int = 0,
               worker_id: int = 0, sampler_config: dict = None) -> WorkerStats:
    """
    运行一个协同进化工作进程
    :param model: AUT模型
    :param vuln: 漏洞规格
    :param config: 引擎配置，默认 ENGINE_CONFIG
    :param seed: 随机种子，相同的配置与种子得到相同的结果
    :param worker_id: 工作进程编号
    :return: 运行统计
    :raises UnsatContract: 目标过程的调用契约不可满足
    """
    config = {**ENGINE_CONFIG, **(config or {})}
    sampler_config = sampler_config or SAMPLER_CONFIG
    started = time.perf_counter()
    rng = random.Random(seed)

    targets = target_procedures(model, vuln)
    distances = call_graph_distances(model, targets)
    species = _init_species(model, targets, config, sampler_config, rng)
    ctx = FitnessContext(model, vuln, distances, species, config)

    space = GeneSpace(model.canvas_width, model.canvas_height)
    toolbox = _make_toolbox(config, space, rng)
    toolbox.register('evaluate', fitness_test, ctx=ctx)

    logbook = tools.Logbook()
    logbook.header = ['gen', 'best', 'evals']
    stats = WorkerStats(worker_id=worker_id, seed=seed, logbook=logbook)
    population = toolbox.population(n=config['population_size'])
    logger.info(f"工作进程 {worker_id} 启动，种子 {seed}，目标过程: {', '.join(sorted(targets))}")

    generation = 0
    while True:
        fitnesses = [toolbox.evaluate(t) for t in population]
        elite = min(range(len(population)), key=lambda i: (fitnesses[i], i))
        if stats.best_fitness is None or fitnesses[elite] < stats.best_fitness:
            stats.best, stats.best_fitness = population[elite], fitnesses[elite]
        stats.history.append((generation, stats.best_fitness))
        logbook.record(gen=generation, best=float(stats.best_fitness), evals=len(population))
        if generation % config['log_every'] == 0:
            logger.debug(f"工作进程 {worker_id} 第{generation}代 最优适应度 {stats.best_fitness}")

        if stats.best_fitness == 0:
            stats.reason = SUCCESS
            break
        if generation >= config['max_generations']:
            stats.reason = GENERATION_CAP
            break

        _evolve_species(ctx.execute(tuple(population[elite])), species, rng)
        population = _next_generation(population, fitnesses, elite, toolbox, config, rng)
        generation += 1

    stats.trace = ctx.execute(tuple(stats.best))
    stats.wall_time = time.perf_counter() - started
    reason = '找到利用' if stats.succeeded else '达到代数上限'
    logger.info(f"工作进程 {worker_id} 结束: {reason}，共{stats.generations}代，"
                f"最优适应度 {stats.best_fitness}，耗时 {stats.wall_time:.2f}秒")
    return stats


def worker_seeds(seed: int, workers: int) -> List[int]:
    """由主种子派生每个工作进程的种子"""
    rng = random.Random(seed)
    return [rng.randrange(2 ** 31) for _ in range(workers)]


def run_workers(model: AutModel, vuln: VulnSpec, config: dict = None,
                sampler_config: dict = None) -> List[WorkerStats]:
    """
    运行多个相互独立的工作进程，workers 为1时在当前进程内执行
    :return: 按工作进程编号排列的统计结果
    """
    config = {**ENGINE_CONFIG, **(config or {})}
    seeds = worker_seeds(config['seed'], config['workers'])

    if config['workers'] == 1:
        return [run_worker(model, vuln, config, seeds[0], 0, sampler_config)]

    with ProcessPoolExecutor(max_workers=config['workers']) as executor:
        futures = [executor.submit(run_worker, model, vuln, config, seed, i, sampler_config)
                   for i, seed in enumerate(seeds)]
        return [future.result() for future in futures]


def create_engine_config(**overrides) -> dict:
    """在默认引擎配置上覆盖部分参数"""
    unknown = set(overrides) - set(ENGINE_CONFIG)
    if unknown:
        raise KeyError(f"未知的引擎参数: {', '.join(sorted(unknown))}")
    return {**ENGINE_CONFIG, **overrides}
