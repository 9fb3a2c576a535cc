"""
适应度测试：调用距离、契约距离近似与修正后的测试适应度
"""

import math
import random
from fractions import Fraction

import pytest

from config import SAMPLER_CONFIG
from exceptions import EmptyTrace, ArityMismatch
from contract import parse_contract
from contract.nodes import VarType
from distance import ValueDomain, gamma_exact
from aut import execute_test, is_successful, target_procedures, call_graph_distances, ExecutionTrace
from ccea.operators import GeneSpace, random_test
from ccea.species import ContractSpecies, gamma_approx, fitness_contract, create_species
from ccea.fitness import call_distance, corrected_fitness, fitness_test, FitnessContext, nearest_invocation

from conftest import scw_actions


@pytest.fixture(scope='module')
def distances(scw, xss):
    return call_graph_distances(scw, target_procedures(scw, xss))


@pytest.fixture(scope='module')
def ctx(scw, xss, distances):
    species = {name: create_species(name, proc.call_contract, 16, seed=i)
               for i, (name, proc) in enumerate(sorted(scw.procedures.items()))}
    return FitnessContext(scw, xss, distances, species)


def test_corrected_fitness_examples():
    assert corrected_fitness(2, 3) == Fraction(7, 4)
    assert corrected_fitness(2, 1) == Fraction(3, 2)
    assert corrected_fitness(3, math.inf) == 3
    assert corrected_fitness(1, 0) == Fraction(1, 2)
    assert corrected_fitness(2, 0) == 1


def test_call_distance_examples(scw, xss, distances, john42_back_actions, exploit_actions):
    back = execute_test(scw, john42_back_actions, xss)
    assert call_distance(back, distances, is_successful(back, xss)) == 2

    stuck = execute_test(scw, [], xss)
    assert call_distance(stuck, distances, False) == 3

    exploit = execute_test(scw, exploit_actions, xss)
    assert call_distance(exploit, distances, is_successful(exploit, xss)) == 0


def test_call_distance_unreachable_and_empty(scw, xss):
    trace = execute_test(scw, [], xss)
    assert call_distance(trace, {'signup': None, 'confirm': None, 'welcome': None}, False) == 2
    assert call_distance(trace, {'signup': None}, False, ceiling=9) == 9
    with pytest.raises(EmptyTrace):
        call_distance(ExecutionTrace(()), {'signup': 0}, False)


def test_nearest_invocation_is_first_minimal(scw, xss, distances, john42_back_actions):
    trace = execute_test(scw, john42_back_actions, xss)
    assert nearest_invocation(trace, distances) is trace.invocations[1]


def test_contract_fitness_examples(contractbase):
    species = ContractSpecies('confirm', contractbase, [('G?_9', 0), ('7', 2)])
    assert fitness_contract(species, ('7', 2), ('john', 7)) == math.inf
    assert fitness_contract(species, ('G?_9', 0), ('john', 7)) == 11
    assert gamma_approx(species, ('john', 7)) == 11
    assert gamma_approx(species, ('G?_9', 0)) == 0
    assert gamma_approx(ContractSpecies('confirm', contractbase, [('7', 2)]), ('john', 7)) == math.inf


def test_gamma_approx_arity(contractbase):
    species = ContractSpecies('confirm', contractbase, [('G?_9', 0)])
    with pytest.raises(ArityMismatch):
        gamma_approx(species, ('john',))


def test_gamma_approx_superset_is_no_worse(contractbase, rng):
    pool = [(''.join(rng.choice('ab12') for _ in range(rng.randint(0, 5))), rng.randint(0, 6))
            for _ in range(40)]
    queries = [('john', 7), ('c4rl', 5), ('', 0), ('12', 3)]
    for cut in (5, 15, 30):
        small = ContractSpecies('confirm', contractbase, pool[:cut])
        large = ContractSpecies('confirm', contractbase, pool)
        for v in queries:
            assert gamma_approx(large, v) <= gamma_approx(small, v)


def test_gamma_approx_never_undercuts_exact(contractbase, rng):
    domain = ValueDomain(alphabet='ab12john', max_length=6, int_min=0, int_max=8)
    species = create_species('confirm', contractbase, 16, seed=4,
                             sampler_config=dict(SAMPLER_CONFIG, alphabet='ab12', max_length=6, int_min=0, int_max=8))
    for v in [('john', 7), ('c4rl', 5), ('a', 0)]:
        exact = gamma_exact(contractbase, v, domain)
        assert gamma_approx(species, v) >= exact


def test_successful_test_has_zero_fitness(ctx, exploit_actions):
    assert fitness_test(exploit_actions, ctx) == 0


def test_unsuccessful_examples(ctx, john42_back_actions):
    # 入口过程的契约为 true，γ=0
    assert fitness_test([], ctx) == 2
    # 目标过程已调用但未触发：γ 至少为1
    phi = fitness_test(scw_actions('<script>alert(xss)</script>1'), ctx)
    assert Fraction(1, 2) <= phi < 1


def test_fitness_zero_iff_successful(ctx, scw, xss, exploit_actions):
    rng = random.Random(99)
    space = GeneSpace(scw.canvas_width, scw.canvas_height, 30, '<>()/scriptal1')
    tests = [random_test(4, 1, rng, space) for _ in range(200)]
    tests += [tuple(exploit_actions), tuple(scw_actions('john42')), tuple(scw_actions("alert('7')"))]
    for test in tests:
        trace = execute_test(scw, test, xss)
        assert (fitness_test(test, ctx) == 0) == is_successful(trace, xss)


def test_fitness_bounded_by_call_distance(ctx, scw, xss, distances):
    rng = random.Random(7)
    space = GeneSpace(scw.canvas_width, scw.canvas_height, 12, 'ab12<>')
    for _ in range(150):
        test = random_test(3, 2, rng, space)
        trace = execute_test(scw, test, xss)
        delta = call_distance(trace, distances, is_successful(trace, xss))
        phi = fitness_test(test, ctx)
        assert delta - 1 <= phi <= delta


ALPHABET = 'ab01'
ATOMS = ['"a"', '"b0"', '[01]', 'any', '"1" | "ab"', '""']
LENGTHS = ['len({s}) >= {n}', '{n} > len({s}) + 1', 'len({s}) + {n} < 9', '{n} = 4 or {n} < 2']


def _random_contract(rng):
    """一到两个字符串变量、一到两个整数变量，在测试取值空间内总可满足"""
    strings = ['x', 'y'][:rng.randint(1, 2)]
    ints = ['n', 'm'][:rng.randint(1, 2)]
    parts = []
    for s in strings:
        first, loop, last = rng.choice(ATOMS), rng.choice(ATOMS), rng.choice(ATOMS)
        parts.append(f'{s} in ({first}) . ({loop})* . ({last})')
    for i, n in enumerate(ints):
        parts.append('(' + rng.choice(LENGTHS).format(s=strings[i % len(strings)], n=n) + ')')
    return parse_contract(' and '.join(parts))


def _random_vector(contract, rng):
    return tuple(''.join(rng.choice(ALPHABET) for _ in range(rng.randint(0, 5))) if var_type == VarType.STR
                 else rng.randint(0, 8) for _, var_type in contract.variables)


def test_random_contracts_mix_variable_counts():
    rng = random.Random(2024)
    shapes = set()
    for _ in range(50):
        types = [var_type for _, var_type in _random_contract(rng).variables]
        shapes.add((types.count(VarType.STR), types.count(VarType.INT)))
    assert shapes == {(1, 1), (1, 2), (2, 1), (2, 2)}


def test_evolved_species_approach_exact_distance():
    sampler_config = dict(SAMPLER_CONFIG, alphabet=ALPHABET, max_length=5, int_min=0, int_max=8)
    domain = ValueDomain(alphabet=ALPHABET, max_length=5, int_min=0, int_max=8)
    rng = random.Random(2024)
    exact_hits = 0
    for i in range(50):
        contract = _random_contract(rng)
        v = _random_vector(contract, rng)
        species = create_species('p', contract, 32, seed=i, sampler_config=sampler_config)
        for _ in range(200):
            species.evolve(v, rng)
        approx = gamma_approx(species, v)
        exact = gamma_exact(contract, v, domain)
        assert approx >= exact
        exact_hits += approx == exact
    assert exact_hits >= 45


def test_more_invocations_never_increase_call_distance(scw, xss, distances):
    rng = random.Random(31)
    space = GeneSpace(scw.canvas_width, scw.canvas_height, 12, 'ab12')
    for _ in range(100):
        trace = execute_test(scw, random_test(4, 1, rng, space), xss)
        kept = tuple(inv for inv in trace.invocations if rng.random() < 0.5) or trace.invocations[:1]
        subset = ExecutionTrace(kept)
        assert call_distance(trace, distances, False) <= call_distance(subset, distances, False)
