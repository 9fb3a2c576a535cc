"""
SMT-LIB导出测试
导出的文本交给z3解析，并用求解器核对语义
"""

import z3

from contract import parse_contract, satisfies
from sampler import ModelStream, SampleOutcome, export_smtlib
from sampler.smtlib import smt_string


def _solver(text: str) -> z3.Solver:
    solver = z3.Solver()
    solver.set(timeout=10000)
    solver.add(z3.parse_smt2_string(text))
    return solver


def _declarations(text: str):
    return [line for line in text.splitlines() if line.startswith('(declare-const')]


def test_contractbase_structure(contractbase):
    text = export_smtlib(contractbase)
    lines = text.splitlines()
    assert _declarations(text) == ['(declare-const payload String)', '(declare-const y Int)']
    assert lines[2] == '(assert'
    assert lines[-1] == '(assert (>= (str.len payload) y))'
    assert ' '.join(text.split()) == (
        '(declare-const payload String) (declare-const y Int) '
        '(assert (str.in.re payload (re.++ (re.* (re.range " " "~")) '
        '(re.++ (re.range "0" "9") (re.* (re.range " " "~")))))) '
        '(assert (>= (str.len payload) y))')
    assert len(z3.parse_smt2_string(text)) == 2


def test_contractbase_semantics_agree_with_evaluator(contractbase):
    text = export_smtlib(contractbase)
    payload, y = z3.String('payload'), z3.Int('y')
    for vector in [('john42', 6), ('john42', 7), ('john', 0), ('7', 1)]:
        solver = _solver(text)
        solver.add(payload == z3.StringVal(vector[0]), y == vector[1])
        expected = z3.sat if satisfies(contractbase, vector) else z3.unsat
        assert solver.check() == expected


def test_excluded_models(contractbase):
    text = export_smtlib(contractbase, excluded=[('7', 0)])
    lines = text.splitlines()
    assert lines[-2:] == ['(assert (not (= payload "7")))', '(assert (not (= y 0)))']
    assert len(z3.parse_smt2_string(text)) == 4
    solver = _solver(text)
    solver.add(z3.String('payload') == z3.StringVal('7'))
    assert solver.check() == z3.unsat


def test_true_has_declarations_only():
    assert export_smtlib(parse_contract('true')) == ''
    text = export_smtlib(parse_contract('true or b'))
    assert _declarations(text) == ['(declare-const b Bool)']
    assert len(z3.parse_smt2_string(text)) == 1


def test_negative_values_and_quotes():
    contract = parse_contract('x = "say\\"hi" and n > -3')
    text = export_smtlib(contract, excluded=[('a"b', -2)])
    assert '(assert (not (= n (- 2))))' in text
    assert '(assert (not (= x "a""b")))' in text
    solver = _solver(text)
    solver.add(z3.Int('n') == -2)
    assert solver.check() == z3.unsat
    solver = _solver(text)
    assert solver.check() == z3.sat
    model = solver.model()
    assert model.eval(z3.String('x')).as_string() == 'say"hi'
    assert model.eval(z3.Int('n')).as_long() > -3


def test_long_assertions_are_wrapped():
    contract = parse_contract('x in ("alpha" | "beta" | "gamma" | "delta") . [0-9]^3 . any*')
    text = export_smtlib(contract)
    assert len(text.splitlines()) > 2
    assert text.splitlines()[1].startswith('(assert')
    solver = _solver(text)
    solver.add(z3.String('x') == z3.StringVal('gamma123!'))
    assert solver.check() == z3.sat


def test_unsat_contract_is_unsat_for_the_solver():
    text = export_smtlib(parse_contract('len(x) < 0'))
    assert _solver(text).check() == z3.unsat


def test_sampled_models_satisfy_the_exported_document():
    contract = parse_contract('x in ("a" | "b")* . "1" and len(x) > n and n >= 2')
    text = export_smtlib(contract)
    stream = ModelStream(contract, seed=4)
    for _ in range(5):
        outcome = stream.next_model()
        assert not isinstance(outcome, SampleOutcome)
        x, n = outcome
        solver = _solver(text)
        solver.add(z3.String('x') == z3.StringVal(x), z3.Int('n') == n)
        assert solver.check() == z3.sat


def test_smt_string_doubles_quotes():
    assert smt_string('a"b') == '"a""b"'
