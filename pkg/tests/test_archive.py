"""
Tests for reading, validating and writing YAML result archives
"""

from datetime import datetime

import pytest
import yaml

from proofgrid_forge.archive import (
    ResultRecord, attach_outcome, dump_archive, forge_stamp, load_archive, parse_archive,
    save_archive, task_from_path,
)
from proofgrid_forge.config import TIMESTAMP_FORMAT
from proofgrid_forge.errors import SchemaError

ARCHIVE = """
- index: 0
  problem: |
    assert premise-1 := A
    # Goal: A | B
  proof: |
    premise-1;
    A | B BY left-or on premise-1
  releaseNote: kept as is
  modelResponses:
    m1:
      answer: '{"correct": true}'
    m2: null
- index: 3
  problem: 'assert premise-1 := B'
"""


class TestTaskFromPath:

    @pytest.mark.parametrize("path,task", [
        ('results/PL1-PC-c.yaml', 'PL1-PC-c'),
        ('PL1-PC.yaml', 'PL1-PC'),
        ('out/pl1_pm.yaml', 'PL1-PM'),
        ('EQ-GF.scored.yaml', 'EQ-GF'),
        ('notes.yaml', None),
    ])
    def test_names(self, path, task):
        assert task_from_path(path) == task


class TestParse:

    def test_records(self):
        records = parse_archive(ARCHIVE)
        assert [r.index for r in records] == [0, 3]
        first = records[0]
        assert first.responses_key == 'modelResponses'
        assert set(first.responses) == {'m1', 'm2'}
        assert first.responses['m2'] is None
        assert first.problem.startswith('assert premise-1 := A')
        assert records[1].responses == {}
        assert records[1].position == 1

    def test_flags(self):
        record = ResultRecord({'index': 0, 'correctProof': True})
        assert record.flag('correctProof')
        assert not record.flag('conditionalized')
        assert record.flag('conditionalized', default=True)

    def test_empty_file(self):
        assert parse_archive('') == []

    @pytest.mark.parametrize("text", [
        "index: 0\n",
        "- just text\n",
        "- problem: A\n",
        "- index: one\n",
        "- index: true\n",
        "- index: 1\n- index: 1\n",
        "- index: 1\n  modelResponses: [m1]\n",
        "- index: 1\n  modelResponses:\n    m1: yes please\n",
        "- index: [1\n",
    ])
    def test_schema_errors(self, text):
        with pytest.raises(SchemaError):
            parse_archive(text)

    def test_error_locates_record(self):
        with pytest.raises(SchemaError) as info:
            parse_archive("- index: 4\n- index: 4\n")
        assert info.value.index == 4
        assert info.value.key == 'index'


class TestWrite:

    def test_round_trip_keeps_unknown_keys(self, tmp_path):
        records = parse_archive(ARCHIVE)
        path = tmp_path / 'nested' / 'PL1-PW.yaml'
        save_archive(records, str(path))
        task, loaded = load_archive(str(path))
        assert task == 'PL1-PW'
        assert [r.to_dict() for r in loaded] == [r.to_dict() for r in records]
        assert loaded[0].data['releaseNote'] == 'kept as is'

    def test_proofs_written_as_literal_blocks(self):
        text = dump_archive([{'index': 0, 'proof': 'premise-1;\nA BY claim on A\n'}])
        assert 'proof: |' in text
        assert yaml.safe_load(text)[0]['proof'] == 'premise-1;\nA BY claim on A\n'

    def test_key_order_preserved(self):
        text = dump_archive([{'index': 0, 'zeta': 1, 'alpha': 2}])
        assert text.index('zeta') < text.index('alpha')

    def test_invalid_records_not_written(self, tmp_path):
        path = tmp_path / 'bad.yaml'
        with pytest.raises(SchemaError):
            save_archive([{'index': 1}, {'index': 1}], str(path))
        assert not path.exists()

    def test_load_rejects_bad_yaml(self, tmp_path):
        path = tmp_path / 'PL1-PC.yaml'
        path.write_text("- index: [0\n")
        with pytest.raises(SchemaError):
            load_archive(str(path))


class TestOutcomes:

    def test_stamp(self):
        stamp = forge_stamp(False, 4, ('code-fence',))
        assert set(stamp) == {'credited', 'errorType', 'evaluationTimestamp', 'normalization'}
        assert stamp['normalization'] == ['code-fence']
        datetime.strptime(stamp['evaluationTimestamp'], TIMESTAMP_FORMAT)

    def test_attach_to_existing_response(self):
        record = parse_archive(ARCHIVE)[0]
        attach_outcome(record, 'm1', forge_stamp(True, None))
        response = record.responses['m1']
        assert response['answer'] == '{"correct": true}'
        assert response['forge']['credited'] is True

    def test_attach_to_bare_entry(self):
        record = parse_archive(ARCHIVE)[0]
        attach_outcome(record, 'm2', forge_stamp(None, None))
        assert set(record.responses['m2']) == {'forge'}
