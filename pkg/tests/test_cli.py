"""
命令行入口测试
"""

import os

import pandas as pd
import pytest

from aut import format_script
from main import main, RunConfig, EXIT_SUCCESS, EXIT_NOT_FOUND, EXIT_ERROR
from exceptions import ConfigError

from conftest import scw_actions


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_missing_model_file(capsys):
    assert main(['run', '--aut', 'missing.json', '--workers', '1', '--max-gens', '0']) == EXIT_ERROR
    assert '❌' in capsys.readouterr().out


def test_invalid_worker_count():
    assert main(['run', '--workers', '0']) == EXIT_ERROR
    with pytest.raises(ConfigError):
        RunConfig(k_click=0, k_type=0).validate()


def test_capped_run_writes_artifacts(workdir):
    code = main(['run', '--workers', '1', '--max-gens', '0', '--pop', '10', '--contract-pop', '4',
                 '--out', 'out'])
    assert code == EXIT_NOT_FOUND
    digest = pd.read_csv(workdir / 'out' / 'digest_test0.csv')
    assert list(digest.columns) == ['X', 'Y']
    assert len(digest) == 1
    summary = pd.read_csv(workdir / 'out' / 'summary.csv')
    assert len(summary) == 1
    assert (workdir / 'out' / 'summary.txt').exists()
    assert not list((workdir / 'out').glob('exploit_*.txt'))


def test_successful_run_writes_replayable_exploit(workdir, easy_paths, capsys):
    model, vuln = easy_paths
    code = main(['run', '--aut', model, '--vuln', vuln, '--workers', '1', '--max-gens', '1000',
                 '--pop', '30', '--contract-pop', '4', '--clicks', '3', '--types', '1', '--seed', '1',
                 '--out', 'out', '--summary-format', 'json'])
    assert code == EXIT_SUCCESS
    assert (workdir / 'out' / 'summary.json').exists()
    capsys.readouterr()
    script = str(workdir / 'out' / 'exploit_0.txt')
    assert main(['replay', script, '--aut', model, '--vuln', vuln]) == EXIT_SUCCESS
    assert 'TRIGGERED: show / echo' in capsys.readouterr().out


def test_replay_john42(john42_path, capsys):
    assert main(['replay', john42_path]) == EXIT_NOT_FOUND
    out = capsys.readouterr().out
    assert 'NOT TRIGGERED' in out
    assert "call: confirm(payload='john42')" in out


def test_replay_exploit(workdir, capsys):
    script = workdir / 'exploit.txt'
    script.write_text(format_script(scw_actions('<script>alert(1)</script>')), encoding='utf-8')
    assert main(['replay', str(script)]) == EXIT_SUCCESS
    out = capsys.readouterr().out
    assert 'TRIGGERED: welcome / echo' in out
    assert 'payload: <script>alert(1)</script>' in out


def test_replay_empty_script(workdir, capsys):
    script = workdir / 'empty.txt'
    script.write_text('# nothing\n', encoding='utf-8')
    assert main(['replay', str(script)]) == EXIT_NOT_FOUND
    assert 'call: signup()' in capsys.readouterr().out


def test_replay_bad_script(workdir):
    script = workdir / 'bad.txt'
    script.write_text('tap 1 2\n', encoding='utf-8')
    assert main(['replay', str(script)]) == EXIT_ERROR


def test_dump_smt(workdir):
    code = main(['run', '--workers', '1', '--max-gens', '0', '--pop', '4', '--contract-pop', '2',
                 '--out', 'out', '--dump-smt', 'smt'])
    assert code == EXIT_NOT_FOUND
    names = sorted(os.listdir(workdir / 'smt'))
    assert names == ['confirm.smt2', 'signup.smt2', 'vulnerability.smt2', 'welcome.smt2']
    assert (workdir / 'smt' / 'signup.smt2').read_text(encoding='utf-8') == ''
    assert '(declare-const payload String)' in (workdir / 'smt' / 'confirm.smt2').read_text(encoding='utf-8')
