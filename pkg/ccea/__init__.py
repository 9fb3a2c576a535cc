"""
协同进化模块
测试物种与契约物种的遗传算子、适应度、工作进程与结果输出
"""

from .operators import crossover_tests, mutate_test, tournament_select, random_test, GeneSpace
from .species import ContractSpecies, gamma_approx, fitness_contract, create_species
from .fitness import call_distance, fitness_test, corrected_fitness, FitnessContext
from .engine import WorkerStats, run_worker, run_workers, create_engine_config
from .reporter import RunReporter, dump_smt, create_reporter

__all__ = [
    'crossover_tests',
    'mutate_test',
    'tournament_select',
    'random_test',
    'GeneSpace',
    'ContractSpecies',
    'gamma_approx',
    'fitness_contract',
    'create_species',
    'call_distance',
    'fitness_test',
    'corrected_fitness',
    'FitnessContext',
    'WorkerStats',
    'run_worker',
    'run_workers',
    'create_engine_config',
    'RunReporter',
    'dump_smt',
    'create_reporter'
]
