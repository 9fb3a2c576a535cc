"""
协同进化引擎测试
"""

import json
import os

import pytest

from exceptions import UnsatContract
from aut import load_model, load_vuln_spec, is_successful
from ccea.engine import (
    run_worker, run_workers, worker_seeds, create_engine_config, SUCCESS, GENERATION_CAP
)

SMALL = dict(population_size=12, contract_population_size=8, max_generations=5, workers=1, log_every=1)


def test_zero_generation_cap_evaluates_once(scw, xss):
    stats = run_worker(scw, xss, create_engine_config(**dict(SMALL, max_generations=0)), seed=3)
    assert stats.generations == 1
    assert stats.history[0][0] == 0
    assert stats.reason == GENERATION_CAP
    assert not stats.succeeded
    assert len(stats.best) == 5
    assert stats.trace is not None


def test_same_seed_same_run(scw, xss):
    config = create_engine_config(**SMALL)
    first = run_worker(scw, xss, config, seed=11)
    second = run_worker(scw, xss, config, seed=11)
    assert first.history == second.history
    assert first.best == second.best


def test_history_is_non_increasing(scw, xss):
    stats = run_worker(scw, xss, create_engine_config(**dict(SMALL, max_generations=15)), seed=5)
    values = [phi for _, phi in stats.history]
    assert [n for n, _ in stats.history] == list(range(len(values)))
    assert all(b <= a for a, b in zip(values, values[1:]))
    assert stats.logbook.select('gen') == list(range(len(values)))


def test_search_leaves_the_entry_page(scw, xss):
    stats = run_worker(scw, xss, create_engine_config(**dict(SMALL, population_size=30, max_generations=20)), seed=2)
    assert stats.best_fitness < 2


def test_easy_model_is_exploited(easy_paths):
    model, vuln = load_model(easy_paths[0]), load_vuln_spec(easy_paths[1])
    config = create_engine_config(population_size=30, contract_population_size=4, max_generations=1000,
                                  workers=1, k_click=3, k_type=1)
    stats = run_worker(model, vuln, config, seed=1)
    assert stats.reason == SUCCESS
    assert stats.best_fitness == 0
    assert is_successful(stats.trace, vuln)
    assert '7' in stats.trace.triggered.value


def test_scw_search_reaches_the_target_procedure(scw, xss):
    stats = run_worker(scw, xss, create_engine_config(max_generations=500, workers=1), seed=7)
    assert stats.best_fitness < 1
    assert 'welcome' in stats.trace.procedures()


def test_unsat_target_contract(tmp_path, xss):
    document = {
        'schema_version': 1,
        'entry': 'home',
        'procedures': [
            {'name': 'home', 'page': {'controls': [
                {'name': 'go', 'kind': 'link', 'target': 'show', 'x': 0, 'y': 0, 'params': {'p': 'a'}}]}},
            {'name': 'show', 'params': [{'name': 'p', 'type': 'str'}], 'call_contract': 'len(p) < 0',
             'sinks': [{'label': 'echo', 'expr': '$p'}]},
        ],
    }
    path = tmp_path / 'model.json'
    path.write_text(json.dumps(document), encoding='utf-8')
    with pytest.raises(UnsatContract) as info:
        run_worker(load_model(str(path)), xss, create_engine_config(**SMALL))
    assert info.value.procedure == 'show'


def test_worker_seeds():
    assert worker_seeds(0, 4) == worker_seeds(0, 4)
    assert len(set(worker_seeds(0, 10))) == 10
    assert worker_seeds(0, 3) != worker_seeds(1, 3)


def test_run_workers_inline(scw, xss):
    results = run_workers(scw, xss, create_engine_config(**dict(SMALL, max_generations=1)))
    assert len(results) == 1
    assert results[0].worker_id == 0
    assert results[0].seed == worker_seeds(0, 1)[0]


def test_unknown_engine_parameter():
    with pytest.raises(KeyError):
        create_engine_config(generations=3)


@pytest.mark.slow
@pytest.mark.skipif(os.getenv('EXPLOIT_SEARCH_SLOW') != '1', reason='设置 EXPLOIT_SEARCH_SLOW=1 启用')
def test_scw_exploit_found_by_some_worker(scw, xss):
    results = run_workers(scw, xss, create_engine_config(workers=10, max_generations=50000))
    assert any(s.succeeded for s in results)
    for stats in results:
        if stats.succeeded:
            assert is_successful(stats.trace, xss)
