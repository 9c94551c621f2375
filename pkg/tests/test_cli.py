"""
Tests for the command line: subcommands, JSON output and exit status
"""

import json
import os

import pandas as pd
import pytest

from proofgrid_forge import proofgrid_forge as cli
from proofgrid_forge.archive import load_archive, save_archive

from conftest import CASES_PROOF, EQ_BAD_CONTRACTUM, EQ_WORKED, PEIRCE_HILBERT
from test_irt import GUTTMAN

PREMISES = '(A ==> B) # (~ A ==> C) # (C ==> D)'


@pytest.fixture(autouse=True)
def log_dir(tmp_path, monkeypatch):
    monkeypatch.setattr(cli, 'LOG_DIR', str(tmp_path / 'logs'))


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def _run(capsys, *argv):
    status = cli.main(list(argv))
    return status, capsys.readouterr().out


class TestHelpers:

    def test_parse_premises(self):
        premises = cli.parse_premises(PREMISES)
        assert [name for name, _ in premises] == ['premise-1', 'premise-2', 'premise-3']
        assert cli.parse_premises(None) == []

    def test_parse_params(self):
        assert cli.parse_params(['m=2', 'p=0.5', 'corrupt=true', 'edges=[1, 2]']) == \
            {'m': 2, 'p': 0.5, 'corrupt': True, 'edges': [1, 2]}
        with pytest.raises(ValueError):
            cli.parse_params(['m'])


class TestCheck:

    def test_ndl_goal_proved(self, tmp_path, capsys):
        path = _write(tmp_path, 'cases.ndl', CASES_PROOF)
        status, out = _run(capsys, 'check', 'ndl', path, '--premises', PREMISES, '--goal', '(B | D)')
        assert status == cli.EXIT_OK
        record = json.loads(out)
        assert record['success'] is True
        assert record['conclusion'] == '(B | D)'

    def test_ndl_wrong_goal(self, tmp_path, capsys):
        path = _write(tmp_path, 'cases.ndl', CASES_PROOF)
        status, out = _run(capsys, 'check', 'ndl', path, '--premises', PREMISES, '--goal', 'A')
        assert status == cli.EXIT_FAILED
        assert json.loads(out)['success'] is False

    def test_ndl_instrumented(self, tmp_path, capsys):
        path = _write(tmp_path, 'cases.ndl', CASES_PROOF)
        status, out = _run(capsys, 'check', 'ndl', path, '--premises', PREMISES, '--goal', '(B | D)',
                           '--instrumented')
        assert status == cli.EXIT_OK
        assert json.loads(out)['result'] == 'correct'

    def test_ndl_without_goal_reports_conclusion(self, tmp_path, capsys):
        path = _write(tmp_path, 'cases.ndl', CASES_PROOF)
        status, out = _run(capsys, 'check', 'ndl', path, '--premises', PREMISES)
        assert status == cli.EXIT_OK
        assert json.loads(out)['conclusion'] == '(B | D)'

    def test_ndl_parse_failure(self, tmp_path, capsys):
        path = _write(tmp_path, 'broken.ndl', '{\n  A BY\n')
        status, out = _run(capsys, 'check', 'ndl', path)
        assert status == cli.EXIT_FAILED
        assert json.loads(out)['error']['errorType'] == 'parsing'

    def test_hilbert_strict_and_lenient(self, tmp_path, capsys):
        path = _write(tmp_path, 'peirce.hil', PEIRCE_HILBERT.replace('BY mp on p5', 'by mp on p5'))
        goal = '((~A ==> A) ==> A)'
        status, _ = _run(capsys, 'check', 'hilbert', path, '--goal', goal)
        assert status == cli.EXIT_FAILED
        status, out = _run(capsys, 'check', 'hilbert', path, '--goal', goal, '--lenient')
        assert status == cli.EXIT_OK
        assert json.loads(out)['repairs'] == ["line 8: normalized 'by' to 'BY'"]

    def test_eq(self, tmp_path, capsys):
        status, out = _run(capsys, 'check', 'eq', _write(tmp_path, 'worked.eq', EQ_WORKED))
        assert status == cli.EXIT_OK
        assert json.loads(out)['correct'] is True
        status, out = _run(capsys, 'check', 'eq', _write(tmp_path, 'bad.eq', EQ_BAD_CONTRACTUM))
        assert status == cli.EXIT_FAILED
        assert json.loads(out)['firstErrorStep'] is not None

    def test_bad_premise_is_usage_error(self, tmp_path, capsys):
        path = _write(tmp_path, 'cases.ndl', CASES_PROOF)
        status, _ = _run(capsys, 'check', 'ndl', path, '--premises', 'A ==>')
        assert status == cli.EXIT_USAGE

    def test_missing_file(self, tmp_path, capsys):
        status, _ = _run(capsys, 'check', 'ndl', str(tmp_path / 'absent.ndl'))
        assert status == cli.EXIT_USAGE


class TestGenerate:

    def test_pl1_record(self, capsys):
        status, out = _run(capsys, 'gen', 'pl1', '--seed', '3')
        assert status == cli.EXIT_OK
        record = json.loads(out)
        assert record['seed'] == 3
        assert record['premises']

    def test_text_output(self, capsys):
        status, out = _run(capsys, 'gen', 'pl1', '--seed', '3', '--text')
        assert status == cli.EXIT_OK
        assert out.startswith('assert premise-1 := ')
        assert '# Goal: ' in out

    def test_same_seed_same_item(self, capsys):
        _, first = _run(capsys, 'gen', 'pl1', '--seed', '4')
        _, second = _run(capsys, 'gen', 'pl1', '--seed', '4')
        assert first == second

    def test_conditionalized(self, capsys):
        status, out = _run(capsys, 'gen', 'pl1', '--seed', '3', '--params', 'conditionalized=true')
        assert status == cli.EXIT_OK
        record = json.loads(out)
        assert record['conditionalized'] is True
        assert record['premises'] == []

    def test_family_params(self, capsys):
        status, out = _run(capsys, 'gen', 'rel-php', '--seed', '8', '--params', 'm=2', 't=1', 'n=1')
        assert status == cli.EXIT_OK
        assert json.loads(out)['params']['m'] == 2

    def test_unknown_family(self, capsys):
        status, _ = _run(capsys, 'gen', 'sudoku')
        assert status == cli.EXIT_USAGE


class TestTransforms:

    def test_mask(self, tmp_path, capsys):
        path = _write(tmp_path, 'cases.ndl', CASES_PROOF)
        status, out = _run(capsys, 'mask', path, '--fraction', '0.5', '--seed', '7')
        assert status == cli.EXIT_OK
        record = json.loads(out)
        assert set(record) == {'maskedProof', 'masks', 'maskKinds', 'density'}
        assert 'MASK1' in record['maskedProof']

    def test_gap(self, tmp_path, capsys):
        path = _write(tmp_path, 'cases.ndl', CASES_PROOF)
        status, out = _run(capsys, 'gap', path, '--fraction', '0.99', '--seed', '0')
        assert status == cli.EXIT_OK
        record = json.loads(out)
        assert list(record['gaps']) == ['GAP-1']
        assert record['elided'] == 1.0

    def test_corrupt_ndl(self, tmp_path, capsys):
        path = _write(tmp_path, 'cases.ndl', CASES_PROOF)
        status, out = _run(capsys, 'corrupt', 'ndl', path, '--premises', PREMISES, '--seed', '1')
        assert status == cli.EXIT_OK
        record = json.loads(out)
        assert record['proof'] != CASES_PROOF
        assert record['intervention']

    def test_corrupt_needs_valid_proof(self, tmp_path, capsys):
        path = _write(tmp_path, 'cases.ndl', CASES_PROOF)
        status, _ = _run(capsys, 'corrupt', 'ndl', path, '--seed', '1')
        assert status == cli.EXIT_FAILED


class TestEval:

    @pytest.fixture
    def archive(self, tmp_path):
        records = [{
            'index': 0,
            'premises': ['(A ==> B)', '(~ A ==> C)', '(C ==> D)'],
            'goal': '(B | D)',
            'modelResponses': {
                'good': {'answer': CASES_PROOF},
                'bad': {'answer': '{\n  B BY mp on premise-1, A\n}'},
                'down': {'apiCallFailure': True},
            },
        }]
        path = str(tmp_path / 'PL1-PW.yaml')
        save_archive(records, path)
        return path

    def test_report_and_annotation(self, archive, tmp_path, capsys):
        report_path = str(tmp_path / 'report.json')
        scored_path = str(tmp_path / 'scored' / 'PL1-PW.yaml')
        status, out = _run(capsys, 'eval', 'PL1-PW', archive, '--out', report_path,
                           '--annotate', scored_path, '--table-only')
        assert status == cli.EXIT_OK
        assert out.splitlines()[0].startswith('model,')
        with open(report_path) as f:
            assert json.load(f)['task'] == 'PL1-PW'
        _, records = load_archive(scored_path)
        responses = records[0].responses
        assert responses['good']['forge']['credited'] is True
        assert 'forge' not in responses['down']

    def test_full_output(self, archive, capsys):
        status, out = _run(capsys, 'eval', 'PL1-PW', archive, '--sep', ';')
        assert status == cli.EXIT_OK
        table, summary = out.split('\n\n', 1)
        assert table.splitlines()[0].startswith('model;')
        assert json.loads(summary)['models'][0]['model'] == 'good'

    def test_schema_error(self, tmp_path, capsys):
        path = _write(tmp_path, 'PL1-PW.yaml', '- index: 1\n- index: 1\n')
        status, _ = _run(capsys, 'eval', 'PL1-PW', path)
        assert status == cli.EXIT_USAGE


class TestPsychometrics:

    def test_fit_then_report(self, tmp_path, capsys):
        matrix = str(tmp_path / 'matrix.csv')
        GUTTMAN.to_csv(matrix)
        out_dir = str(tmp_path / 'fit')
        status, out = _run(capsys, 'fit', matrix, '--seed', '7', '--out', out_dir)
        assert status == cli.EXIT_OK
        summary = json.loads(out)
        assert summary['diagnostics']['dropped_items'] == ['i5']
        assert set(summary['abilities']) == set(GUTTMAN.index)
        assert os.path.exists(os.path.join(out_dir, 'diagnostics.json'))

        status, out = _run(capsys, 'report', '--abilities', os.path.join(out_dir, 'abilities.csv'),
                           '--items', os.path.join(out_dir, 'items.csv'), '--wright', '--bands', '-1', '1')
        assert status == cli.EXIT_OK
        assert out.startswith('  theta')
        band = json.loads(out[out.index('{'):])
        assert band['band'] == [-1.0, 1.0]
        assert 0.0 < band['score'] <= 1.0 + 1e-9

    def test_report_needs_an_output(self, capsys):
        status, _ = _run(capsys, 'report')
        assert status == cli.EXIT_USAGE

    def test_fit_rejects_non_binary(self, tmp_path, capsys):
        matrix = str(tmp_path / 'matrix.csv')
        pd.DataFrame({'t1': [0, 2], 't2': [1, 0]}, index=['m1', 'm2']).to_csv(matrix)
        status, _ = _run(capsys, 'fit', matrix)
        assert status == cli.EXIT_USAGE
