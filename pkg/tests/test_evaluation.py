"""
Tests for response scoring and per-model task reports
"""

import json

import pytest

from proofgrid_forge.archive import ResultRecord, parse_archive
from proofgrid_forge.errors import ForgeError
from proofgrid_forge.evaluation import (
    FORMAT_ERROR, annotate_records, argument_of, base_task, evaluate_task, is_api_failure,
    normalize_answer, parse_gap_fills, score_response,
)
from proofgrid_forge.formula import parse_formula
from proofgrid_forge.proof_transforms import insert_gaps, mask_proof, write_case_analysis_proof

from conftest import CASES_PROOF, EQ_WORKED, PEIRCE_HILBERT

CASES_PREMISES = ['(A ==> B)', '(~ A ==> C)', '(C ==> D)']
CASES_GOAL = '(B | D)'
STRAY_PROOF = "{\n  B BY mp on premise-1, A\n}"


def _record(index, **fields):
    data = {'index': index, 'premises': CASES_PREMISES, 'goal': CASES_GOAL}
    data.update(fields)
    return ResultRecord(data)


@pytest.fixture
def pw_records():
    first = ResultRecord({
        'index': 1,
        'problem': ' # '.join(CASES_PREMISES + [CASES_GOAL]),
        'modelResponses': {'good': {'answer': CASES_PROOF}, 'bad': None, 'down': None},
    })
    second = _record(0, modelResponses={
        'good': {'answer': f"```\n{CASES_PROOF}\n```"},
        'bad': {'answer': STRAY_PROOF},
        'down': {'apiCallFailure': True},
    })
    return [first, second]


@pytest.fixture
def gold_text(cases_premises, cases_goal):
    return write_case_analysis_proof(cases_premises, cases_goal)


class TestTasks:

    def test_base_task(self):
        assert base_task('PL1-PC-c') == 'PL1-PC'
        assert base_task('EQ-GF') == 'EQ-GF'

    def test_unknown_task(self):
        with pytest.raises(ValueError):
            base_task('PL9-XX')
        with pytest.raises(ValueError):
            evaluate_task('PL9-XX', [])


class TestNormalization:

    def test_code_fence(self):
        assert normalize_answer('```json\n{"a": 1}\n```') == ('{"a": 1}', ['code-fence'])

    def test_bold_gap_header(self):
        assert normalize_answer('**GAP-1:**\nclaim on A') == ('GAP-1:\nclaim on A', ['bold-gap-header'])

    def test_non_text_untouched(self):
        assert normalize_answer({'MASK1': 'A'}) == ({'MASK1': 'A'}, [])

    def test_plain_text_stripped(self):
        assert normalize_answer('  {"correct": true}\n') == ('{"correct": true}', [])


class TestGapFillParsing:

    def test_object(self):
        assert parse_gap_fills({'GAP-1': None, 'GAP-2': 'A'}) == {'GAP-1': '', 'GAP-2': 'A'}

    def test_json_text(self):
        assert parse_gap_fills('{"GAP-1": "claim on A"}') == {'GAP-1': 'claim on A'}

    def test_headed_text(self):
        text = "GAP-1:\nA BY claim on A;\nGAP-2:\nB BY claim on B"
        assert parse_gap_fills(text) == {'GAP-1': 'A BY claim on A;', 'GAP-2': 'B BY claim on B'}

    @pytest.mark.parametrize("answer", ['no gaps here', 5, None])
    def test_unreadable(self, answer):
        assert parse_gap_fills(answer) is None


class TestRecordAccess:

    def test_structured_fields(self):
        premises, goal = argument_of(_record(0))
        assert [name for name, _ in premises] == ['premise-1', 'premise-2', 'premise-3']
        assert goal == parse_formula(CASES_GOAL)

    def test_problem_string(self):
        premises, goal = argument_of(ResultRecord({'index': 0, 'problem': 'A ==> B # A # B'}))
        assert [f for _, f in premises] == [parse_formula('A ==> B'), parse_formula('A')]
        assert goal == parse_formula('B')

    def test_conditionalized_problem(self):
        record = ResultRecord({'index': 0, 'problem': 'A ==> B # A # B', 'conditionalized': True})
        premises, goal = argument_of(record)
        assert premises == []
        assert goal == parse_formula('(A ==> B) & A ==> B')

    def test_missing_problem(self):
        with pytest.raises(ForgeError):
            argument_of(ResultRecord({'index': 4}))

    @pytest.mark.parametrize("response,failed", [
        (None, True),
        ({'answer': None}, True),
        ({'answer': 'x'}, False),
        ({'apiCallFailure': True, 'answer': 'x'}, True),
        ({'apiFailure': True}, True),
        ({'illFormattedResponse': True}, False),
    ])
    def test_api_failure(self, response, failed):
        assert is_api_failure(response) is failed


class TestScoreResponse:

    def test_ill_formatted_flag(self):
        outcome = score_response('PL1-PW', _record(0), 'm', {'illFormattedResponse': True})
        assert not outcome.excluded
        assert (outcome.credited, outcome.error_type) == (False, FORMAT_ERROR)

    def test_unscorable_record(self):
        outcome = score_response('PL1-PW', ResultRecord({'index': 9}), 'm', {'answer': CASES_PROOF})
        assert (outcome.credited, outcome.error_type) == (False, FORMAT_ERROR)
        assert 'exception' in outcome.detail

    def test_proof_checking(self):
        record = _record(0, proof=CASES_PROOF)
        right = score_response('PL1-PC', record, 'm', {'answer': '{"correct": true}'})
        assert right.credited and right.guessed
        verdict = json.dumps({'correct': False,
                              'errorDetails': {'offendingLineNumber': 3, 'errorType': 'logic'}})
        wrong = score_response('PL1-PC-c', record, 'm', {'answer': verdict})
        assert (wrong.credited, wrong.error_type, wrong.guessed) == (False, 2, False)

    def test_proof_checking_flawed_proof(self):
        flawed = CASES_PROOF.replace('mp on premise-1, A', 'mp on premise-1, C')
        outcome = score_response('PL1-PC', _record(0, proof=flawed), 'm', {'answer': '{"correct": true}'})
        assert (outcome.credited, outcome.error_type) == (False, 1)

    def test_proof_checking_unreadable(self):
        outcome = score_response('PL1-PC', _record(0, proof=CASES_PROOF), 'm', {'answer': 'yes'})
        assert (outcome.credited, outcome.error_type) == (False, 3)

    def test_hilbert_lenient_and_strict(self):
        record = ResultRecord({'index': 0, 'premises': [], 'goal': '((~A ==> A) ==> A)'})
        answer = PEIRCE_HILBERT.replace('BY mp on p5', 'by mp on p5')
        outcome = score_response('PL4-PW', record, 'm', {'answer': answer})
        assert outcome.credited is True
        assert outcome.strict is False
        assert outcome.repairs == 1
        assert outcome.detail['hilbertResult']['success'] is True

    def test_eq_checking_levels(self):
        record = ResultRecord({'index': 0, 'problem': EQ_WORKED})
        response = {'answer': '{"correct": true}'}
        assert score_response('EQ-PC', record, 'm', response, eq_level=1).credited
        outcome = score_response('EQ-PC', record, 'm', response, eq_level=3)
        assert not outcome.credited
        assert outcome.detail['levels'] == {'L1': True, 'L2': False, 'L3': False}


class TestWritingTask:

    def test_scores_and_exclusions(self, pw_records):
        report = evaluate_task('PL1-PW', pw_records)
        good, bad, down = report.scores['good'], report.scores['bad'], report.scores['down']
        assert (good.credited, good.scored, good.excluded) == (2, 2, 0)
        assert (bad.credited, bad.scored, bad.excluded) == (0, 1, 1)
        assert (down.scored, down.excluded) == (0, 2)
        assert report.accuracies() == {'bad': 0.0, 'good': 1.0}
        assert list(report.scores) == ['bad', 'down', 'good']

    def test_outcomes_in_record_order(self, pw_records):
        report = evaluate_task('PL1-PW', pw_records)
        assert [(o.index, o.model) for o in report.outcomes] == [
            (0, 'bad'), (0, 'down'), (0, 'good'), (1, 'bad'), (1, 'down'), (1, 'good')]
        fenced = report.outcomes[2]
        assert fenced.normalization == ['code-fence']
        assert fenced.strict is True
        assert fenced.detail['instrumentedCheckerResult']['result'] == 'correct'

    def test_threads_match_serial(self, pw_records):
        serial = evaluate_task('PL1-PW', pw_records)
        threaded = evaluate_task('PL1-PW', pw_records, workers=2)
        key = lambda report: [(o.index, o.model, o.credited, o.error_type) for o in report.outcomes]
        assert key(threaded) == key(serial)

    def test_tables(self, pw_records):
        report = evaluate_task('PL1-PW', pw_records)
        table = report.accuracy_table()
        assert list(table.index) == ['good', 'bad']
        assert table.loc['bad', 'excluded'] == 1
        assert table.loc['good', 'strict_accuracy'] == pytest.approx(1.0)
        assert report.error_table().loc['bad'].sum() == 1

    def test_summary(self, pw_records):
        summary = evaluate_task('PL1-PW', pw_records).to_dict()
        assert summary['task'] == 'PL1-PW'
        assert [row['model'] for row in summary['models']] == ['good', 'bad']
        assert summary['di'] == pytest.approx(1.0)
        assert 'maskErrors' not in summary
        json.dumps(summary)

    def test_csv(self, pw_records):
        text = evaluate_task('PL1-PW', pw_records).to_csv()
        header = text.splitlines()[0].split(',')
        assert 'excluded' in header
        assert 'accuracy' in header

    def test_annotate(self, pw_records):
        report = evaluate_task('PL1-PW', pw_records)
        annotate_records(pw_records, report)
        second = pw_records[1].responses
        assert second['good']['forge']['credited'] is True
        assert second['good']['forge']['normalization'] == ['code-fence']
        assert second['bad']['forge']['credited'] is False
        assert 'forge' not in second['down']
        assert pw_records[0].responses['bad'] is None


class TestMaskingTask:

    @pytest.fixture
    def masked(self, gold_text):
        return mask_proof(gold_text, 1.0, seed=0)

    def _report(self, masked, answers):
        record = _record(0, maskedProof=masked.text, masks=masked.assignment, maskKinds=masked.kinds,
                         modelResponses={m: {'answer': a} for m, a in answers.items()})
        return evaluate_task('PL1-PM', [record])

    def test_gold_assignment(self, masked):
        report = self._report(masked, {'m': json.dumps(masked.assignment)})
        outcome = report.outcomes[0]
        assert outcome.credited and outcome.strict
        assert outcome.categories == []

    def test_answer_categories(self, masked):
        partial = dict(masked.assignment)
        partial.pop('MASK1')
        report = self._report(masked, {
            'empty': '{}',
            'junk': 'MASK1 is A',
            'partial': json.dumps(partial),
        })
        by_model = {o.model: o for o in report.outcomes}
        assert by_model['empty'].error_type == 'emptyAnswers'
        assert by_model['junk'].error_type == 'illFormattedAnswers'
        assert by_model['partial'].error_type == 'missingMasks'
        assert by_model['partial'].categories == ['missingMasks']
        assert report.category_table().loc['partial', 'missingMasks'] == 1

    def test_formula_in_rule_position(self, masked):
        rule_label = next(label for label, kind in masked.kinds.items() if kind == 'rule')
        answer = dict(masked.assignment, **{rule_label: 'A'}, MASK99='B')
        report = self._report(masked, {'m': json.dumps(answer)})
        outcome = report.outcomes[0]
        assert 'rulesToFormulas' in outcome.categories
        assert 'bogusMasks' in outcome.categories
        assert not outcome.credited
        assert report.to_dict()['maskErrors']['m']['rulesToFormulas'] == 1


class TestGapTask:

    def test_fills(self, gold_text):
        gapped = insert_gaps(gold_text, 0.99, seed=0)
        fill = gapped.gold['GAP-1']
        record = _record(0, gappedProof=gapped.text, gaps=gapped.gold, elided=gapped.fraction,
                         modelResponses={
                             'json': {'answer': json.dumps(gapped.gold)},
                             'headed': {'answer': f"**GAP-1:**\n{fill}"},
                             'wrong': {'answer': {'GAP-1': 'claim on true'}},
                             'blank': {'answer': 'no idea'},
                         })
        outcomes = {o.model: o for o in evaluate_task('PL1-GF', [record]).outcomes}
        assert outcomes['json'].credited and outcomes['json'].strict
        assert outcomes['headed'].credited
        assert outcomes['headed'].normalization == ['bold-gap-header']
        assert not outcomes['wrong'].credited
        assert (outcomes['blank'].credited, outcomes['blank'].error_type) == (False, FORMAT_ERROR)


class TestEquationalTasks:

    def test_level_columns(self):
        record = ResultRecord({'index': 0, 'problem': EQ_WORKED,
                               'modelResponses': {'m': {'answer': '{"correct": true}'}}})
        table = evaluate_task('EQ-PC', [record], eq_level=1).accuracy_table()
        assert table.loc['m', 'L1'] == pytest.approx(1.0)
        assert table.loc['m', 'L2'] == pytest.approx(0.0)
        assert table.loc['m', 'guessing_accuracy'] == pytest.approx(1.0)

    def test_gap_confidence_calibration(self):
        problem = EQ_WORKED.replace('g(g1(f2(f4(a)),f4(e)),g2(a,c))        by E3', '??    ??')
        step = {'term': 'g(g1(f2(f4(a)),f4(e)),g2(a,c))'}
        records = parse_archive(json.dumps([
            {'index': 0, 'problem': problem, 'modelResponses': {'m': {'answer': json.dumps(
                {'missingSteps': [dict(step, supportingEquations=['E3'])], 'confidence': 4})}}},
            {'index': 1, 'problem': problem, 'modelResponses': {'m': {'answer': json.dumps(
                {'missingSteps': [dict(step, supportingEquations=['E2'])], 'confidence': 5})}}},
        ]))
        report = evaluate_task('EQ-GF', records)
        assert report.accuracies() == {'m': 0.5}
        summary = report.calibration()['m']
        assert summary.n == 2
        assert 'calibration' in report.to_dict()
