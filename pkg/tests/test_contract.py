"""
契约语言测试：解析、类型检查、求值与打印
"""

import pytest

from exceptions import ContractSyntaxError, ContractTypeError, MissingBinding, ContractDivisionByZero, AlphabetError
from contract import parse_contract, free_vars, unparse, desugar, evaluate, satisfies, bind
from contract.nodes import (
    VarType, And, Or, Not, Compare, Member, BoolConst, Len, IntVar, Num, Lit, ICase, Star, AnyChar
)

CONFIRM = 'payload ∈ Σ*.[0-9].Σ* ∧ len(payload) ≥ 6'


def test_parse_confirm_contract_unicode():
    contract = parse_contract(CONFIRM)
    assert isinstance(contract.root, And)
    member, length = contract.root.left, contract.root.right
    assert isinstance(member, Member) and member.name == 'payload'
    assert length == Or(Compare('>', Len('payload'), Num(6)), Compare('=', Len('payload'), Num(6)))


def test_unicode_and_ascii_forms_agree():
    ascii_form = parse_contract('payload in any* . [0-9] . any* and len(payload) >= 6')
    assert ascii_form == parse_contract(CONFIRM)


def test_parse_true():
    contract = parse_contract('true')
    assert contract.root == BoolConst(True)
    assert free_vars(contract) == []


def test_truncated_input_reports_position():
    with pytest.raises(ContractSyntaxError) as info:
        parse_contract('len(payload) >')
    assert info.value.line == 1
    assert info.value.column >= 1


def test_variable_used_at_two_types():
    with pytest.raises(ContractTypeError):
        parse_contract('x in "a" and x > 3')


def test_regex_variable_must_be_defined():
    with pytest.raises(ContractTypeError):
        parse_contract('x in R . "a"')


def test_literal_outside_alphabet_is_rejected_at_parse():
    with pytest.raises(AlphabetError):
        parse_contract('q = "a b"')
    with pytest.raises(AlphabetError):
        parse_contract('let R = "xéy"; q in any* . R')
    assert parse_contract('q = "a~b"').names == ('q',)


def test_let_definition_is_inlined():
    contract = parse_contract('let D = [0-9]; x in D . D')
    assert free_vars(contract) == [('x', VarType.STR)]
    assert evaluate(contract, {'x': '42'})
    assert not evaluate(contract, {'x': '4'})


def test_desugared_comparisons():
    assert parse_contract('n <= 3').root == Or(Compare('<', IntVar('n'), Num(3)), Compare('=', IntVar('n'), Num(3)))
    assert parse_contract('n != 3').root == Not(Compare('=', IntVar('n'), Num(3)))


def test_free_vars_first_occurrence_order(contractbase):
    assert free_vars(contractbase) == [('payload', VarType.STR), ('y', VarType.INT)]
    assert free_vars(parse_contract(CONFIRM)) == [('payload', VarType.STR)]


def test_evaluate_examples(contractbase):
    assert evaluate(parse_contract(CONFIRM), {'payload': 'john42'})
    assert not evaluate(contractbase, {'payload': 'john', 'y': 7})
    assert evaluate(parse_contract('true'), {})


def test_evaluate_missing_binding():
    with pytest.raises(MissingBinding):
        evaluate(parse_contract('n > 1'), {})
    with pytest.raises(MissingBinding):
        evaluate(parse_contract('n > 1'), {'n': True})


def test_division_truncates_toward_zero():
    contract = parse_contract('n / 2 = -1')
    assert evaluate(contract, {'n': -3})
    with pytest.raises(ContractDivisionByZero):
        evaluate(parse_contract('n / 0 = 1'), {'n': 4})


def test_bool_variables_and_negation():
    contract = parse_contract('admin and not (n > 2)')
    assert satisfies(contract, (True, 1))
    assert not satisfies(contract, (False, 1))
    assert bind(contract, (True, 1)) == {'admin': True, 'n': 1}


def test_string_equality_sugar():
    contract = parse_contract('x = "abc" or x != i"ABD"')
    assert evaluate(contract, {'x': 'abc'})
    assert not evaluate(contract, {'x': 'abd'})
    assert evaluate(contract, {'x': 'zzz'})


def test_case_insensitive_literal():
    contract = parse_contract('x in i"<script>"')
    assert evaluate(contract, {'x': '<scrIpt>'})
    assert not evaluate(contract, {'x': '<scrpt>'})


def test_letter_range_covers_both_cases():
    contract = parse_contract('x in [a-Z]*')
    assert evaluate(contract, {'x': 'azAZ'})
    assert not evaluate(contract, {'x': 'a1'})


def test_bounded_repetition():
    contract = parse_contract('x in [0-9]^3')
    assert evaluate(contract, {'x': '123'})
    assert not evaluate(contract, {'x': '12'})


@pytest.mark.parametrize('text', [
    CONFIRM,
    'true',
    'not (a or b) and n * (m + 1) - 2 / k >= len(s)',
    'x in ("a" | "b")* . i"Tag" . [x-z]^2 or y != 0',
    'let R = "0" | [1-9] . [0-9]*; x in any* . R',
])
def test_unparse_round_trip(text):
    contract = parse_contract(text)
    assert parse_contract(unparse(contract)) == contract


def test_unparse_prints_sugar_back():
    assert unparse(parse_contract('n >= 2 and m <= 1 and k != 0')) == 'n >= 2 and m <= 1 and k != 0'


def test_desugar_preserves_semantics():
    contract = parse_contract('x in i"ab" . [0-2]^2 . any and len(x) > 2')
    core = desugar(contract)
    for text in ['ab012', 'AB01z', 'aB11~', 'ab0', 'ba01x', 'Ab22!!']:
        assert evaluate(core, {'x': text}) == evaluate(contract, {'x': text})


def test_desugar_removes_sugar_nodes():
    core = desugar(parse_contract('x in i"a" . any*'))

    def walk(regex):
        assert not isinstance(regex, (ICase, AnyChar))
        for child in getattr(regex, 'parts', ()) + getattr(regex, 'options', ()):
            walk(child)
        if isinstance(regex, Star):
            walk(regex.inner)

    walk(core.root.regex)


def test_empty_literal_only_accepts_empty_string():
    contract = parse_contract('x in ""')
    assert evaluate(contract, {'x': ''})
    assert not evaluate(contract, {'x': 'a'})
    assert parse_contract('x in ""').root.regex == Lit('')
