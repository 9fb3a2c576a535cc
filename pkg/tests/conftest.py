"""
测试公共夹具
"""

import json
import os
import random

import pytest

from contract import parse_contract
from aut import load_model, load_vuln_spec, Click, Type

FIXTURE_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'fixtures')

# 带长度约束的示例契约：payload 含数字且长度不小于 y
CONTRACTBASE = 'payload in any* . [0-9] . any* and len(payload) >= y'


@pytest.fixture(scope='session')
def model_path():
    return os.path.join(FIXTURE_DIR, 'scw_model.json')


@pytest.fixture(scope='session')
def vuln_path():
    return os.path.join(FIXTURE_DIR, 'scw_xss.json')


@pytest.fixture(scope='session')
def john42_path():
    return os.path.join(FIXTURE_DIR, 'scw_john42.txt')


@pytest.fixture(scope='session')
def scw(model_path):
    return load_model(model_path)


@pytest.fixture(scope='session')
def xss(vuln_path):
    return load_vuln_spec(vuln_path)


@pytest.fixture(scope='session')
def contractbase():
    return parse_contract(CONTRACTBASE)


@pytest.fixture
def rng():
    return random.Random(1234)


def scw_actions(payload: str, follow_link: bool = True):
    """聚焦输入框、输入、提交，然后点击确认链接"""
    actions = [Click(10, 10), Type(payload), Click(70, 100)]
    if follow_link:
        actions.append(Click(10, 10))
    return actions


@pytest.fixture
def exploit_actions():
    return scw_actions('<script>alert(1)</script>')


@pytest.fixture
def john42_back_actions():
    return [Click(10, 10), Type('john42'), Click(70, 100), Click(70, 100)]


EASY_MODEL = {
    'schema_version': 1,
    'description': 'one form whose text is echoed back',
    'entry': 'form',
    'procedures': [
        {
            'name': 'form',
            'page': {'controls': [
                {'name': 'msg', 'kind': 'text_field', 'x': 0, 'y': 0, 'w': 128, 'h': 64},
                {'name': 'send', 'kind': 'button', 'target': 'show', 'x': 0, 'y': 64, 'w': 128, 'h': 64},
            ]},
        },
        {
            'name': 'show',
            'params': [{'name': 'msg', 'type': 'str'}],
            'call_contract': 'msg in any* . "7" . any*',
            'sinks': [{'label': 'echo', 'expr': '$msg'}],
            'page': {'controls': []},
        },
    ],
}

EASY_VULN = {'schema_version': 1, 'signature': 'echo', 'contract': 'x in any* . "7" . any*'}


@pytest.fixture(scope='session')
def easy_paths(tmp_path_factory):
    """一个表单回显输入的模型，输入含7即触发"""
    directory = tmp_path_factory.mktemp('easy')
    model_file, vuln_file = directory / 'model.json', directory / 'vuln.json'
    model_file.write_text(json.dumps(EASY_MODEL), encoding='utf-8')
    vuln_file.write_text(json.dumps(EASY_VULN), encoding='utf-8')
    return str(model_file), str(vuln_file)
