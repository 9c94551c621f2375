"""
Equational task grading: EQ-PC levels, EQ-ER sets, EQ-GF completions
"""

import copy
import json

import pytest

from conftest import EQ_BAD_CONTRACTUM, EQ_BAD_EQUATION, EQ_UNFILLABLE, EQ_WORKED
from proofgrid_forge.eq_engine import parse_eq_problem
from proofgrid_forge.eq_grading import (
    ER_ILL_FORMED, ER_MISSED, ER_TRUNCATED, ER_WRONG_SET, GF_EMPTY, GF_INVALID_STEP, GF_SPURIOUS,
    GF_STRUCTURE, GF_SYNTAX, GF_TYPE, PC_FORMAT, PC_POSITION, PC_VERDICT,
    er_accuracy, grade_eq_er, grade_eq_gf, grade_eq_pc,
)
from test_eq_engine import WORKED_EXPLANATION

WORKED_SETS = [['E1'], ['E2'], ['E3'], ['E4'], ['E5', 'E6']]

CONTRACTUM_RECORD = {'step': 3, 'equation': 'E5', 'position': [3, 1],
                     'expectedContractum': 'f2(g(b,f4(c)))', 'actualContractum': 'f2(g(b,f4(e)))'}

WORKED_GAP = EQ_WORKED.replace('g(g1(f2(f4(a)),f4(e)),g2(a,c))        by E3', '??    ??')


@pytest.fixture
def worked():
    return parse_eq_problem(EQ_WORKED)


class TestProofChecking:
    def test_full_explanation_passes_every_level(self, worked):
        grade = grade_eq_pc(worked, {'correct': True, 'explanation': WORKED_EXPLANATION})
        assert grade.credited(1) and grade.credited(2) and grade.credited(3)
        assert grade.error_type is None

    def test_json_text_answer(self, worked):
        answer = json.dumps({'correct': True, 'explanation': WORKED_EXPLANATION})
        assert grade_eq_pc(worked, answer).level3

    def test_verdict_alone_passes_level_one(self, worked):
        grade = grade_eq_pc(worked, {'correct': True})
        assert grade.level1
        assert not grade.level2
        assert grade.error_type == PC_FORMAT

    def test_wrong_position_is_typed(self, worked):
        explanation = copy.deepcopy(WORKED_EXPLANATION)
        explanation[3]['rewrites'][0]['position'] = [1]
        grade = grade_eq_pc(worked, {'correct': True, 'explanation': explanation})
        assert grade.level1
        assert not grade.level2
        assert grade.error_type == PC_POSITION
        assert grade.similarities == [pytest.approx(2 / 3)]

    def test_invalid_position_is_counted(self, worked):
        explanation = copy.deepcopy(WORKED_EXPLANATION)
        explanation[0]['rewrites'][0]['position'] = [4, 2]
        grade = grade_eq_pc(worked, {'correct': True, 'explanation': explanation})
        assert grade.invalid_positions == 1

    def test_wrong_verdict(self):
        grade = grade_eq_pc(parse_eq_problem(EQ_BAD_CONTRACTUM), '{"correct": true}')
        assert not grade.level1
        assert grade.error_type == PC_VERDICT

    def test_unusable_answer(self, worked):
        assert grade_eq_pc(worked, 'looks right to me').error_type == PC_FORMAT

    def test_contractum_record_at_level_three(self):
        problem = parse_eq_problem(EQ_BAD_CONTRACTUM)
        grade = grade_eq_pc(problem, {'correct': False, 'explanation': CONTRACTUM_RECORD})
        assert grade.level3

    def test_contractum_record_mismatch(self):
        problem = parse_eq_problem(EQ_BAD_CONTRACTUM)
        record = dict(CONTRACTUM_RECORD, actualContractum='f2(g(b,f4(c)))')
        grade = grade_eq_pc(problem, {'correct': False, 'explanation': record})
        assert grade.level2
        assert not grade.level3
        assert grade.record_mismatches == ['actualContractum']

    def test_equation_record_accepts_any_justifying_set(self):
        problem = parse_eq_problem(EQ_BAD_EQUATION)
        record = {'step': 4, 'givenEquations': ['E2'], 'correctEquations': ['E6']}
        assert grade_eq_pc(problem, {'correct': False, 'explanation': record}).level3
        wrong = dict(record, correctEquations=['E7'])
        assert grade_eq_pc(problem, {'correct': False, 'explanation': wrong}).record_mismatches == \
            ['correctEquations']

    def test_levels_are_monotone(self):
        problem = parse_eq_problem(EQ_BAD_EQUATION)
        grade = grade_eq_pc(problem, {'correct': False, 'explanation': {'step': 2}})
        assert grade.level1 and grade.level2 and not grade.level3


class TestEquationRecovery:
    def _answer(self, sets):
        return [{'step': k, 'supportingEquations': names} for k, names in enumerate(sets, 1)]

    def test_gold_sets(self, worked):
        grade = grade_eq_er(worked, self._answer(WORKED_SETS))
        assert grade.proof_correct
        assert grade.step_accuracy == 1.0

    def test_wrong_and_missing_sets(self, worked):
        sets = [['E1'], [], ['E3'], ['E3'], ['E5', 'E6']]
        grade = grade_eq_er(worked, self._answer(sets))
        assert not grade.proof_correct
        assert grade.step_errors == [None, ER_MISSED, None, ER_WRONG_SET, None]
        assert grade.step_accuracy == pytest.approx(0.6)

    def test_truncated_answer(self, worked):
        grade = grade_eq_er(worked, self._answer(WORKED_SETS[:3]))
        assert grade.proof_error == ER_TRUNCATED
        assert grade.step_correct == [True, True, True, False, False]

    def test_ill_formed_answer(self, worked):
        grade = grade_eq_er(worked, '{"step": 1}')
        assert grade.proof_error == ER_ILL_FORMED
        grade = grade_eq_er(worked, [{'step': 1, 'supportingEquations': 'E1'}])
        assert grade.step_errors[0] == ER_ILL_FORMED

    def test_accuracy_summary(self, worked):
        good = grade_eq_er(worked, self._answer(WORKED_SETS))
        partial = grade_eq_er(worked, self._answer(WORKED_SETS[:4] + [['E5']]))
        assert er_accuracy([good, partial]) == {'PLA': 0.5, 'SLA': pytest.approx(0.9)}


class TestGapFilling:
    def test_correct_completion(self):
        problem = parse_eq_problem(WORKED_GAP)
        answer = {'missingSteps': [{'term': 'g(g1(f2(f4(a)),f4(e)),g2(a,c))', 'supportingEquations': ['E3']}],
                  'confidence': 4}
        grade = grade_eq_gf(problem, answer)
        assert grade.credited
        assert grade.confidence == 0.75
        assert not grade.cycle

    def test_empty_completion_of_fillable_gap(self):
        grade = grade_eq_gf(parse_eq_problem(WORKED_GAP), {'missingSteps': []})
        assert not grade.credited
        assert grade.error_type == GF_EMPTY

    def test_empty_completion_of_unfillable_gap(self):
        grade = grade_eq_gf(parse_eq_problem(EQ_UNFILLABLE), '{"missingSteps": []}')
        assert grade.credited

    def test_spurious_completion(self):
        answer = {'missingSteps': [{'term': 'r(r(d,c,d,b),g3(c,c),f2(d),h4(e,f(c),f2(a)))',
                                    'supportingEquations': ['E3']}]}
        grade = grade_eq_gf(parse_eq_problem(EQ_UNFILLABLE), answer)
        assert not grade.credited
        assert grade.error_type == GF_SPURIOUS

    def test_invalid_step(self):
        answer = {'missingSteps': [{'term': 'g(g1(f2(f4(a)),f4(e)),g2(a,c))', 'supportingEquations': ['E2']}]}
        grade = grade_eq_gf(parse_eq_problem(WORKED_GAP), answer)
        assert grade.error_type == GF_INVALID_STEP

    @pytest.mark.parametrize('term, error', [('g(g1(a),', GF_SYNTAX), ('g(a)', GF_TYPE)])
    def test_malformed_terms(self, term, error):
        answer = {'missingSteps': [{'term': term, 'supportingEquations': ['E3']}]}
        assert grade_eq_gf(parse_eq_problem(WORKED_GAP), answer).error_type == error

    def test_citation_cap_violation(self):
        answer = {'missingSteps': [{'term': 'g(g1(f2(f4(a)),f4(e)),g2(a,c))',
                                    'supportingEquations': ['E1', 'E2', 'E3']}]}
        assert grade_eq_gf(parse_eq_problem(WORKED_GAP), answer).error_type == GF_INVALID_STEP

    def test_structure_errors(self):
        problem = parse_eq_problem(WORKED_GAP)
        assert grade_eq_gf(problem, {'explanation': 'none'}).error_type == GF_STRUCTURE
        assert grade_eq_gf(problem, {'missingSteps': [{'term': 'a'}]}).error_type == GF_STRUCTURE

    def test_problem_without_gap(self, worked):
        with pytest.raises(ValueError):
            grade_eq_gf(worked, {'missingSteps': []})
