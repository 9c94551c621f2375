"""
Tests for gold proof writing, masking, gaps and corruption
"""

import pytest

from proofgrid_forge.errors import GenerationExhausted
from proofgrid_forge.formula import parse_formula
from proofgrid_forge.instrumented_checker import instrumented_eval
from proofgrid_forge.ndl_engine import check_argument, number_premises
from proofgrid_forge.proof_transforms import (
    GAP_RE, INTERVENTIONS, MASK_RE, build_case_analysis_proof, corrupt_ndl_proof, establish,
    fill_gaps, grade_gap_fill, grade_mask_assignment, infer_mask_kinds, insert_gaps, mask_proof,
    unmask, write_case_analysis_proof,
)

from conftest import CASES_PROOF


def _argument(premises, goal):
    return number_premises([parse_formula(p) for p in premises]), parse_formula(goal)


ENTAILED = [
    (['A ==> B', '~A ==> C', 'C ==> D'], 'B | D'),
    (['A & B'], 'B | C'),
    (['A <==> B', 'A'], 'B'),
    (['~(A | B)'], '~A'),
    (['A ==> B', '~B'], '~A'),
    (['A', '~A'], 'C'),
    ([], 'A | ~A'),
    (['A ==> B', 'B ==> C'], 'A ==> C'),
    (['A', 'B'], 'A <==> B'),
    (['A', '~B'], '~(A <==> B)'),
    (['A', '~B'], '~(A ==> B)'),
]


@pytest.fixture
def gold_text(cases_premises, cases_goal):
    return write_case_analysis_proof(cases_premises, cases_goal)


class TestCaseAnalysisWriter:

    @pytest.mark.parametrize("premises,goal", ENTAILED)
    def test_written_proof_passes_strict_checker(self, premises, goal):
        named, target = _argument(premises, goal)
        text = write_case_analysis_proof(named, target)
        report = check_argument(named, target, text)
        assert report.success, str(report.error)

    def test_written_proof_asserts_premises_by_name(self, cases_premises, cases_goal):
        script = build_case_analysis_proof(cases_premises, cases_goal)
        assert [a.name for a in script.asserts] == ['premise-1', 'premise-2', 'premise-3']

    def test_non_entailed_goal_raises(self):
        named, target = _argument(['A ==> B'], 'B')
        with pytest.raises(ValueError):
            write_case_analysis_proof(named, target)

    def test_establish_requires_decided_value(self):
        with pytest.raises(ValueError):
            establish(parse_formula('A & B'), {'A': True})

    def test_instrumented_checker_accepts_written_proof(self, cases_premises, cases_goal, gold_text):
        result = instrumented_eval(cases_premises, cases_goal, gold_text)
        assert result.result == 'correct'
        assert result.strict_accepted


class TestMasking:

    def test_gold_assignment_grades_correct(self, cases_premises, cases_goal, gold_text):
        masked = mask_proof(gold_text, 0.5, seed=7)
        assert masked.assignment
        ok, error_type, _ = grade_mask_assignment(cases_premises, cases_goal, masked, masked.assignment)
        assert ok
        assert error_type is None

    def test_labels_are_numbered_in_reading_order(self, gold_text):
        masked = mask_proof(gold_text, 0.5, seed=3)
        labels = [f"MASK{n}" for n in MASK_RE.findall(masked.text)]
        distinct = list(dict.fromkeys(labels))
        assert distinct == [f"MASK{k}" for k in range(1, len(distinct) + 1)]
        assert set(distinct) == set(masked.assignment)

    def test_at_least_one_mask(self, gold_text):
        masked = mask_proof(gold_text, 0.0, seed=1)
        assert len(masked.assignment) == 1

    def test_deterministic_for_seed(self, gold_text):
        assert mask_proof(gold_text, 0.4, seed=11).text == mask_proof(gold_text, 0.4, seed=11).text

    def test_full_masking_kinds(self, gold_text):
        masked = mask_proof(gold_text, 1.0, seed=0)
        assert len(masked.assignment) == masked.candidates
        assert set(masked.kinds.values()) <= {'conclusion', 'rule', 'assumption', 'rule-argument'}
        inferred = infer_mask_kinds(masked.text)
        for label, kind in masked.kinds.items():
            assert (inferred[label] == 'rule') == (kind == 'rule')
        assert masked.density >= 1.0

    def test_wrong_rules_fail(self, cases_premises, cases_goal, gold_text):
        masked = mask_proof(gold_text, 1.0, seed=0)
        wrong = {label: ('claim' if masked.kinds[label] == 'rule' else value)
                 for label, value in masked.assignment.items()}
        ok, error_type, message = grade_mask_assignment(cases_premises, cases_goal, masked, wrong)
        assert not ok
        assert error_type is not None
        assert message

    def test_missing_assignment(self, cases_premises, cases_goal, gold_text):
        masked = mask_proof(gold_text, 0.5, seed=7)
        ok, error_type, message = grade_mask_assignment(cases_premises, cases_goal, masked, {})
        assert (ok, error_type) == (False, 'missing')
        assert 'MASK1' in message

    def test_unmask_parenthesizes_compound_fills(self):
        assert unmask('MASK1 BY claim on MASK1', {'MASK1': 'A & B'}) == '(A & B) BY claim on (A & B)'
        assert unmask('MASK1 on A', {'MASK1': 'claim'}, {'MASK1': 'rule'}) == 'claim on A'

    def test_unmask_unknown_label(self):
        with pytest.raises(KeyError):
            unmask('MASK2 BY claim on A', {'MASK1': 'A'})


class TestGaps:

    def test_whole_body_gap(self, cases_premises, cases_goal, gold_text):
        gapped = insert_gaps(gold_text, 0.99, seed=0)
        assert list(gapped.gold) == ['GAP-1']
        assert gapped.fraction == 1.0
        assert GAP_RE.findall(gapped.text) == ['1']
        ok, _, _ = grade_gap_fill(cases_premises, cases_goal, gapped, gapped.gold)
        assert ok

    @pytest.mark.parametrize("seed", [0, 3, 8])
    def test_partial_gaps_refill(self, cases_premises, cases_goal, seed):
        gapped = insert_gaps(CASES_PROOF, 0.4, seed=seed)
        assert gapped.gold
        assert 0.0 < gapped.fraction <= 1.0
        ok, error_type, message = grade_gap_fill(cases_premises, cases_goal, gapped, gapped.gold)
        assert ok, f"{error_type}: {message}"

    def test_wrong_fill(self, cases_premises, cases_goal, gold_text):
        gapped = insert_gaps(gold_text, 0.99, seed=0)
        ok, error_type, _ = grade_gap_fill(cases_premises, cases_goal, gapped, {'GAP-1': 'claim on true'})
        assert not ok
        assert error_type == 'wrongConclusion'

    def test_missing_fill(self, cases_premises, cases_goal, gold_text):
        gapped = insert_gaps(gold_text, 0.99, seed=0)
        ok, error_type, _ = grade_gap_fill(cases_premises, cases_goal, gapped, {})
        assert (ok, error_type) == (False, 'missing')

    def test_fill_strips_trailing_separator(self):
        assert fill_gaps('{\n  GAP-1;\n  B BY claim on B\n}', {'GAP-1': 'claim on A;'}) == \
            '{\n  claim on A;\n  B BY claim on B\n}'


class TestCorruption:

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_ground_truth_agrees_with_strict_checker(self, cases_premises, cases_goal, gold_text, seed):
        corrupted = corrupt_ndl_proof(cases_premises, cases_goal, gold_text, seed=seed)
        assert corrupted.intervention in INTERVENTIONS
        report = check_argument(cases_premises, cases_goal, corrupted.text)
        assert not report.success
        assert corrupted.error['errorType'] == report.error.kind
        assert corrupted.error['line'] == report.error.line

    def test_record_shape(self, cases_premises, cases_goal, gold_text):
        record = corrupt_ndl_proof(cases_premises, cases_goal, gold_text, seed=5).to_record()
        assert {'proof', 'intervention', 'errorType', 'line', 'step', 'offendingRule'} <= set(record)

    def test_deterministic_for_seed(self, cases_premises, cases_goal, gold_text):
        first = corrupt_ndl_proof(cases_premises, cases_goal, gold_text, seed=4)
        second = corrupt_ndl_proof(cases_premises, cases_goal, gold_text, seed=4)
        assert first.text == second.text

    def test_no_applicable_intervention(self, cases_premises, cases_goal, gold_text):
        # the written proof never uses left-and/right-and on a conjunction
        with pytest.raises(GenerationExhausted):
            corrupt_ndl_proof(cases_premises, cases_goal, gold_text, seed=0,
                              interventions=('conjunction-on-disjunction',))
