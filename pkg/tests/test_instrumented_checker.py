"""
Instrumented checker: syntax repairs, logged overlooks and PL1-PC scoring
"""

import json

import pytest

from conftest import CASES_PROOF
from proofgrid_forge.config import COMMUTATIVITY_CORRECTION, DOUBLE_NEGATION_CORRECTION
from proofgrid_forge.formula import Not, parse_formula
from proofgrid_forge.instrumented_checker import (
    balance_right_parens, instrumented_eval, overlook_equivalent, parse_pc_answer,
    repair_syntax, score_pc_response,
)
from proofgrid_forge.ndl_engine import number_premises


def _descriptions(corrections):
    return [c.description for c in corrections]


class TestCleanProofs:
    def test_sample_proof_is_correct_without_repairs(self, cases_premises, cases_goal):
        result = instrumented_eval(cases_premises, cases_goal, CASES_PROOF)
        assert result.result == 'correct'
        assert result.strict_accepted
        assert result.repairs.empty
        assert result.to_record()['fixes'] == {'syntaxCorrections': [], 'structuralCorrections': []}

    def test_asserted_goal_is_not_credited_without_premises(self):
        result = instrumented_eval([], parse_formula('A'), 'assert A\nA BY claim on A')
        assert result.result == 'incorrect'
        assert not result.strict_accepted
        assert result.first_error.kind == 'notInAB'

    def test_formula_spanning_lines_stays_correct(self):
        premises = number_premises([parse_formula('A ==> B'), parse_formula('A')])
        text = '{\n  B BY mp on premise-1, premise-2;\n  (B &\n  A) BY both on B, A\n}'
        result = instrumented_eval(premises, parse_formula('B & A'), text)
        assert result.strict_accepted
        assert result.result == 'correct'
        assert result.repairs.empty


class TestSyntaxRepairs:
    def test_square_brackets(self, cases_premises, cases_goal):
        text = CASES_PROOF.replace('(A | ~ A) BY ex-middle', '[A | ~ A] BY ex-middle')
        result = instrumented_eval(cases_premises, cases_goal, text)
        assert result.result == 'correct'
        assert not result.strict_accepted
        assert 'Replaced square brackets with parentheses' in _descriptions(result.repairs.syntax_corrections)

    def test_missing_semicolon(self, cases_premises, cases_goal):
        text = CASES_PROOF.replace('ex-middle on A;', 'ex-middle on A', 1)
        result = instrumented_eval(cases_premises, cases_goal, text)
        assert result.result == 'correct'
        assert 'Inserted missing semicolon' in _descriptions(result.repairs.syntax_corrections)

    def test_missing_final_brace(self, cases_premises, cases_goal):
        text = CASES_PROOF.rstrip()[:-1]
        result = instrumented_eval(cases_premises, cases_goal, text)
        assert result.result == 'correct'
        assert 'Inserted missing closing brace' in _descriptions(result.repairs.syntax_corrections)

    def test_name_by_becomes_binding(self):
        premises = number_premises([parse_formula('A & B')])
        text = '{\n  l1 BY left-and on premise-1;\n  claim on l1\n}'
        result = instrumented_eval(premises, parse_formula('A'), text)
        assert result.result == 'correct'
        assert not result.strict_accepted
        assert "Rewrote 'l1 BY' as a naming binding ':='" in _descriptions(result.repairs.syntax_corrections)
        assert 'l1 := left-and on premise-1' in result.repaired_text

    def test_repair_syntax_reports_edits(self):
        repaired, corrections = repair_syntax('{ claim on A;; claim on B }')
        assert repaired == '{ claim on A; claim on B }'
        assert corrections[0].location == 'line-1'

    def test_continued_formula_is_balanced_at_its_last_line(self):
        repaired, corrections = repair_syntax('{\n  claim on (A &\n  B;\n  claim on B\n}')
        assert repaired == '{\n  claim on (A &\n  B);\n  claim on B\n}'
        assert [(c.location, c.description) for c in corrections] == \
            [('line-3', 'Closed 1 unbalanced parenthesis(es)')]

    def test_bracketed_formula_spanning_lines(self):
        premises = number_premises([parse_formula('A ==> B'), parse_formula('A')])
        text = '{\n  B BY mp on premise-1, premise-2;\n  [B &\n  A] BY both on B, A\n}'
        result = instrumented_eval(premises, parse_formula('B & A'), text)
        assert result.result == 'correct'
        assert not result.strict_accepted
        assert set(_descriptions(result.repairs.syntax_corrections)) == \
            {'Replaced square brackets with parentheses'}

    @pytest.mark.parametrize('code, expected, delta', [
        ('B BY mp on (A ==> B, A;', 'B BY mp on (A ==> B, A);', 1),
        ('claim on (A & B)));', 'claim on (A & B);', -2),
        ('claim on (A & B)', 'claim on (A & B)', 0),
    ])
    def test_balance_right_parens(self, code, expected, delta):
        assert balance_right_parens(code) == (expected, delta)

    def test_balance_counts_parentheses_from_earlier_lines(self):
        assert balance_right_parens('  A) BY both on B, A', carry=1) == ('  A) BY both on B, A', 0)
        assert balance_right_parens('  B;', carry=1) == ('  B);', 1)


class TestOverlooks:
    def test_commutative_goal(self, cases_premises):
        result = instrumented_eval(cases_premises, parse_formula('(D | B)'), CASES_PROOF)
        assert result.result == 'correct'
        assert not result.strict_accepted
        fixes = result.to_record()['fixes']['structuralCorrections']
        assert fixes[-1][1] == f" {COMMUTATIVITY_CORRECTION} "

    def test_double_negated_annotation(self):
        premises = number_premises([parse_formula('A ==> B'), parse_formula('A')])
        result = instrumented_eval(premises, parse_formula('~ ~ B'), '~ ~ B BY mp on premise-1, premise-2')
        assert result.result == 'correct'
        assert _descriptions(result.repairs.structural_corrections) == [DOUBLE_NEGATION_CORRECTION]

    def test_reversed_modus_ponens(self, cases_premises, cases_goal):
        text = CASES_PROOF.replace('mp on premise-1, A', 'mp on A, premise-1')
        result = instrumented_eval(cases_premises, cases_goal, text)
        assert result.result == 'correct'
        assert 'Overlooking reversed arguments in an application of mp' in \
            _descriptions(result.repairs.structural_corrections)

    def test_twin_rule_swap(self, cases_premises, cases_goal):
        text = CASES_PROOF.replace('right-either on B, D', 'left-either on B, D')
        result = instrumented_eval(cases_premises, cases_goal, text)
        assert result.result == 'correct'
        assert 'Overlooking application of left-either that should be right-either' in \
            _descriptions(result.repairs.structural_corrections)

    def test_associativity_is_never_overlooked(self):
        premises = number_premises([parse_formula('A & (B & C)')])
        goal = parse_formula('(A & B) & C')
        result = instrumented_eval(premises, goal, '((A & B) & C) BY claim on premise-1')
        assert result.result == 'incorrect'
        assert result.first_error.kind == 'wrongConclusion'

    def test_overlook_equivalence(self):
        assert overlook_equivalent(parse_formula('A & ~~B'), parse_formula('B & A'))
        assert not overlook_equivalent(parse_formula('A ==> B'), parse_formula('B ==> A'))

    def test_substantive_error_is_reported_with_line(self, cases_premises, cases_goal):
        text = CASES_PROOF.replace('mp on premise-1, A', 'mp on premise-1, C')
        result = instrumented_eval(cases_premises, cases_goal, text)
        assert result.result == 'incorrect'
        assert result.first_error.kind == 'malformedRuleApp'
        assert result.first_error.line == 4
        assert result.to_record()['errorType'] == 'malformedRuleApp'


class TestPcScoring:
    @pytest.fixture
    def clean(self, cases_premises, cases_goal):
        return instrumented_eval(cases_premises, cases_goal, CASES_PROOF)

    @pytest.fixture
    def flawed(self, cases_premises, cases_goal):
        return instrumented_eval(cases_premises, cases_goal,
                                 CASES_PROOF.replace('mp on premise-1, A', 'mp on premise-1, C'))

    def test_correct_verdict_on_clean_proof(self, clean):
        assert score_pc_response(clean, '{"correct": true}') == (True, None)

    def test_rejecting_a_clean_proof(self, clean):
        answer = {'correct': False, 'errorDetails': {'offendingLineNumber': 4, 'errorType': 'logic'}}
        assert score_pc_response(clean, answer) == (False, 2)

    def test_accepting_a_flawed_proof(self, flawed):
        assert score_pc_response(flawed, {'correct': True}) == (False, 1)

    def test_matching_line_and_class(self, flawed):
        answer = '```json\n' + json.dumps(
            {'correct': False, 'errorDetails': {'offendingLineNumber': '4', 'errorType': 'type'}}) + '\n```'
        assert score_pc_response(flawed, answer) == (True, None)

    def test_wrong_line(self, flawed):
        answer = {'correct': False, 'errorDetails': {'offendingLineNumber': 5, 'errorType': 'type'}}
        assert score_pc_response(flawed, answer) == (False, 4)

    def test_wrong_class(self, flawed):
        answer = {'correct': False, 'errorDetails': {'offendingLineNumber': 4, 'errorType': 'logic'}}
        assert score_pc_response(flawed, answer) == (False, 5)

    def test_formatting_error(self, clean):
        assert score_pc_response(clean, 'the proof looks fine') == (False, 3)
        assert score_pc_response(clean, {'correct': False}) == (False, 3)

    def test_parse_pc_answer_normalizes_line_numbers(self):
        ok, answer, _ = parse_pc_answer({'correct': False,
                                         'errorDetails': {'offendingLineNumber': ' 7 ', 'errorType': 'syntax'}})
        assert ok
        assert answer['errorDetails']['offendingLineNumber'] == 7

    def test_rejects_unknown_error_class(self):
        ok, _, message = parse_pc_answer({'correct': False,
                                          'errorDetails': {'offendingLineNumber': 3, 'errorType': 'semantic'}})
        assert not ok
        assert 'errorType' in message
