"""
遗传算子测试
"""

import math
import random
from fractions import Fraction

import pytest

from exceptions import LabelCountMismatch
from aut import Click, Type
from distance import ValueDomain
from ccea.operators import (
    GeneSpace, random_test, crossover_tests, mutate_test, swap_genes, tournament_select,
    label_counts, mutate_string, crossover_vectors, mutate_vector
)

T1 = (Click(17, 5), Click(51, 42), Type('john'), Click(6, 6))
T2 = (Click(4, 15), Type('c4rl'), Click(1, 22), Click(9, 55))

SPACE = GeneSpace(width=128, height=128, max_text_length=12, alphabet='ab<>()19')


def _in_bounds(test, space):
    for action in test:
        if isinstance(action, Click):
            assert 0 <= action.x < space.width and 0 <= action.y < space.height
        else:
            assert len(action.text) <= space.max_text_length
            assert set(action.text) <= set(space.alphabet)


def test_crossover_example():
    o1, o2 = crossover_tests(T1, T2, 2, random.Random(0),
                             picks=[('type', 0), ('click', 2)],
                             cuts={('type', 0): (2, 2), ('click', 2): 0})
    assert o1 == (Click(17, 5), Click(51, 42), Type('jorl'), Click(9, 55))
    assert o2 == (Click(4, 15), Type('c4hn'), Click(1, 22), Click(6, 6))


def test_click_cut_keeps_leading_coordinates():
    o1, o2 = crossover_tests(T1, T2, 1, random.Random(0), picks=[('click', 0)], cuts={('click', 0): 1})
    assert o1[0] == Click(17, 15)
    assert o2[0] == Click(4, 5)


def test_crossover_rejects_different_label_counts():
    with pytest.raises(LabelCountMismatch):
        crossover_tests(T1, (Click(1, 1), Type('a'), Type('b'), Click(2, 2)), 1, random.Random(0))


def test_crossover_rejects_bad_position_count():
    with pytest.raises(ValueError):
        crossover_tests(T1, T2, 0, random.Random(0))
    with pytest.raises(ValueError):
        crossover_tests(T1, T2, 5, random.Random(0))


@pytest.mark.parametrize('seed', range(20))
def test_crossover_preserves_labels_and_bounds(seed):
    rng = random.Random(seed)
    a = random_test(3, 2, rng, SPACE)
    b = random_test(3, 2, rng, SPACE)
    o1, o2 = crossover_tests(a, b, rng.randint(1, 5), rng, SPACE)
    assert [x.label for x in o1] == [x.label for x in a]
    assert [x.label for x in o2] == [x.label for x in b]
    _in_bounds(o1, SPACE)
    _in_bounds(o2, SPACE)


def test_random_test_label_counts(rng):
    test = random_test(4, 1, rng, SPACE)
    assert label_counts(test) == {'click': 4, 'type': 1}
    _in_bounds(test, SPACE)


def test_mutation_probability_zero_is_identity(rng):
    test = random_test(3, 2, rng, SPACE)
    assert mutate_test(test, 0.0, rng, SPACE) == test


@pytest.mark.parametrize('seed', range(20))
def test_mutation_preserves_label_counts_and_bounds(seed):
    rng = random.Random(seed)
    test = random_test(3, 2, rng, SPACE)
    mutated = mutate_test(test, 1.0, rng, SPACE)
    assert label_counts(mutated) == label_counts(test)
    _in_bounds(mutated, SPACE)


def test_mutation_can_reorder_actions():
    mutated = [mutate_test((Click(1, 1), Type('ab')), 1.0, random.Random(seed), SPACE) for seed in range(50)]
    assert any(isinstance(test[0], Type) for test in mutated)
    assert all(label_counts(test) == {'click': 1, 'type': 1} for test in mutated)


def test_swap_is_an_involution():
    assert swap_genes(swap_genes(T1, 0, 2), 0, 2) == T1
    assert swap_genes(T1, 1, 1) == T1


def test_mutate_string_respects_limits(rng):
    for _ in range(100):
        text = mutate_string('ab', rng, 'xy', 3)
        assert len(text) in (1, 2, 3)
    assert mutate_string('', rng, 'xy', 0) == ''
    assert mutate_string('xyz', rng, 'q', 3) in {'xy', 'xz', 'yz', 'qyz', 'xqz', 'xyq'}


def test_tournament_picks_smallest_fitness(rng):
    population = ['t1', 't2', 't3']
    fitnesses = [Fraction(7, 4), Fraction(3, 2), math.inf]
    assert tournament_select(population, 3, fitnesses, rng) == 't2'
    assert tournament_select(population, 10, fitnesses, rng) == 't2'


def test_tournament_ties_go_to_lowest_index(rng):
    assert tournament_select(['a', 'b', 'c'], 3, [1, 1, 1], rng) == 'a'


def test_tournament_empty_population(rng):
    with pytest.raises(ValueError):
        tournament_select([], 2, [], rng)


def test_vector_crossover():
    assert crossover_vectors(('a', 1, True), ('b', 2, False), random.Random(0), point=1) == \
        (('a', 2, False), ('b', 1, True))
    assert crossover_vectors(('a',), ('b',), random.Random(0)) == (('a',), ('b',))


def test_vector_mutation_stays_in_domain(rng):
    domain = ValueDomain(alphabet='ab', max_length=3, int_min=0, int_max=5)
    vector = ('ab', 3, True)
    for _ in range(200):
        mutated = mutate_vector(vector, rng, domain)
        assert sum(a != b for a, b in zip(vector, mutated)) <= 1
        assert 0 <= mutated[1] <= 5
        assert len(mutated[0]) <= 3
        assert set(mutated[0]) <= {'a', 'b'}
    assert mutate_vector((False,), rng, domain) == (True,)
