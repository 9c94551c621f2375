"""
NDL interpreter: the 24-rule catalog, proof forms and first-error reports
"""

import pytest

from conftest import CASES_PROOF, CASES_SCRIPT
from proofgrid_forge.errors import ProofSyntaxError
from proofgrid_forge.formula import FALSE, And, Atom, Iff, Implies, Not, Or, parse_formula
from proofgrid_forge.ndl_engine import (
    NdlError, apply_rule, check_argument, eval_proof, number_premises,
    parse_proof, print_proof, run_script,
)
from proofgrid_forge.pl3_families import debruijn_proof_text, gen_debruijn

A, B, C, D = Atom('A'), Atom('B'), Atom('C'), Atom('D')


def _wrap(*lines):
    return '{\n  ' + ';\n  '.join(lines) + '\n}'


class TestSampleProof:
    def test_case_analysis_proof_succeeds(self, cases_premises, cases_goal):
        report = check_argument(cases_premises, cases_goal, CASES_PROOF)
        assert report.success
        assert report.verdict.conclusion == cases_goal

    def test_script_with_asserts_runs_without_goal(self):
        verdict = run_script(parse_proof(CASES_SCRIPT))
        assert verdict.ok
        assert verdict.conclusion == Or(B, D)

    def test_printer_output_reparses_to_same_verdict(self, cases_premises, cases_goal):
        text = print_proof(parse_proof(CASES_PROOF))
        assert check_argument(cases_premises, cases_goal, text).success

    def test_wrong_goal_is_whole_proof_error(self, cases_premises):
        report = check_argument(cases_premises, parse_formula('(D | B)'), CASES_PROOF)
        assert not report.success
        assert report.error.kind == 'wrongConclusion'
        assert report.error.line == 0

    def test_asserting_a_non_premise_is_rejected(self, cases_premises, cases_goal):
        text = 'assert extra := (A & B)\n' + CASES_PROOF
        report = check_argument(cases_premises, cases_goal, text)
        assert report.error.kind == 'notInAB'

    def test_asserts_are_not_premises_when_none_are_given(self):
        report = check_argument([], A, 'assert A\nA BY claim on A')
        assert not report.success
        assert report.error.kind == 'notInAB'
        assert report.error.missing == A

    def test_conditionalized_argument_cannot_assert_its_antecedents(self):
        text = 'assert premise-1 := (A ==> B)\nassert premise-2 := A\nB BY mp on premise-1, premise-2'
        report = check_argument([], B, text)
        assert report.error.kind == 'notInAB'
        assert report.error.line == 1
        assert run_script(parse_proof(text)).conclusion == B


class TestFirstErrors:
    def test_not_in_assumption_base(self, cases_premises):
        report = check_argument(cases_premises, B, _wrap('B BY mp on premise-1, A'))
        assert report.error.kind == 'notInAB'
        assert report.error.missing == A
        assert report.error.rule == 'mp'

    def test_unbound_identifier(self, cases_premises):
        report = check_argument(cases_premises, B, _wrap('B BY mp on premise-9, A'))
        assert report.error.kind == 'unboundIdentifier'

    def test_malformed_rule_application(self, cases_premises):
        report = check_argument(cases_premises, D, _wrap('D BY mp on premise-3, A'))
        assert report.error.kind == 'malformedRuleApp'

    def test_unknown_rule(self, cases_premises):
        report = check_argument(cases_premises, B, 'B BY modus-ponens on premise-1, A')
        assert report.error.kind == 'malformedRuleApp'

    def test_wrong_advertised_conclusion(self, cases_premises):
        text = 'assume A {\n  C BY mp on premise-1, A\n}'
        report = check_argument(cases_premises, Implies(A, C), text)
        assert report.error.kind == 'wrongConclusion'
        assert report.error.expected == C
        assert report.error.actual == B
        assert report.error.line == 2

    def test_name_used_as_hypothesis(self, cases_premises):
        text = 'assume hyp {\n  claim on hyp\n}'
        report = check_argument(cases_premises, A, text)
        assert report.error.kind == 'malformedAssumption'

    def test_parse_error_carries_location(self, cases_premises):
        report = check_argument(cases_premises, B, '{\n  B BY mp on premise-1 A\n}')
        assert report.error.kind == 'parsing'
        assert report.error.line == 2

    def test_first_error_wins(self, cases_premises):
        text = _wrap('B BY mp on premise-1, A', 'D BY mp on premise-9, C')
        report = check_argument(cases_premises, D, text)
        assert report.error.kind == 'notInAB'
        assert report.error.step == 1

    def test_error_record_shape(self, cases_premises):
        report = check_argument(cases_premises, B, _wrap('B BY mp on premise-1, A'))
        record = report.error.to_record()
        assert record['errorType'] == 'notInAB'
        assert record['missingFormula'] == 'A'
        assert record['evaluatedArgs'] == ['(A ==> B)', 'A']


class TestParser:
    def test_semicolon_before_closing_brace_is_optional(self):
        assert parse_proof('{ claim on A; claim on B; }') == parse_proof('{ claim on A; claim on B }')

    def test_missing_separator_is_a_syntax_error(self):
        with pytest.raises(ProofSyntaxError):
            parse_proof('{ claim on A claim on B }')

    def test_empty_block_rejected(self):
        with pytest.raises(ProofSyntaxError):
            parse_proof('{ }')

    def test_named_steps_bind_conclusions(self):
        verdict = run_script(parse_proof(
            'assert p := (A & B)\n{ left := left-and on p; right-either on C, left }'))
        assert verdict.conclusion == Or(C, A)


class TestRules:
    @pytest.mark.parametrize('rule, args, base, expected', [
        ('mt', [Implies(A, B), Not(B)], {Implies(A, B), Not(B)}, Not(A)),
        ('both', [A, B], {A, B}, And(A, B)),
        ('right-and', [And(A, B)], {And(A, B)}, B),
        ('cd', [Or(A, B), Implies(A, C), Implies(B, D)], {Or(A, B), Implies(A, C), Implies(B, D)}, Or(C, D)),
        ('dn', [Not(Not(A))], {Not(Not(A))}, A),
        ('dm', [Not(And(A, B))], {Not(And(A, B))}, Or(Not(A), Not(B))),
        ('dm', [And(Not(A), Not(B))], {And(Not(A), Not(B))}, Not(Or(A, B))),
        ('dsyl', [Or(A, B), Not(A)], {Or(A, B), Not(A)}, B),
        ('cond-def', [Implies(A, B)], {Implies(A, B)}, Or(Not(A), B)),
        ('neg-cond-def', [Not(Implies(A, B))], {Not(Implies(A, B))}, And(A, Not(B))),
        ('bicond-def', [Iff(A, B)], {Iff(A, B)}, And(Implies(A, B), Implies(B, A))),
        ('equiv', [Implies(A, B), Implies(B, A)], {Implies(A, B), Implies(B, A)}, Iff(A, B)),
        ('right-iff', [Iff(A, B)], {Iff(A, B)}, Implies(B, A)),
        ('absurd', [A, Not(A)], {A, Not(A)}, FALSE),
        ('from-false', [C], {FALSE}, C),
        ('by-contradiction', [A, Implies(Not(A), FALSE)], {Implies(Not(A), FALSE)}, A),
        ('by-contradiction', [Not(A), Implies(A, FALSE)], {Implies(A, FALSE)}, Not(A)),
        ('ex-middle', [C], set(), Or(C, Not(C))),
        ('from-complements', [D, A, Not(A)], {A, Not(A)}, D),
    ])
    def test_rule_conclusions(self, rule, args, base, expected):
        assert apply_rule(rule, args, frozenset(base)) == expected

    def test_membership_side_condition(self):
        result = apply_rule('dsyl', [Or(A, B), Not(A)], frozenset({Or(A, B)}))
        assert isinstance(result, NdlError)
        assert result.kind == 'notInAB'
        assert result.missing == Not(A)

    def test_dn_needs_double_negation(self):
        result = apply_rule('dn', [Not(A)], frozenset({Not(A)}))
        assert result.kind == 'malformedRuleApp'

    def test_cases_requires_matching_consequents(self):
        args = [Or(A, B), Implies(A, C), Implies(B, D)]
        assert apply_rule('cases', args, frozenset(args)).kind == 'malformedRuleApp'

    def test_true_is_always_available(self):
        assert apply_rule('claim', [parse_formula('true')], frozenset()) == parse_formula('true')


class TestDischarge:
    def test_hypothesis_discharged_after_block(self):
        text = '{\n  assume A { claim on A };\n  claim on A\n}'
        verdict = eval_proof(parse_proof(text).body, [])
        assert verdict.error.kind == 'notInAB'

    def test_conditional_proof_without_premises(self):
        verdict = eval_proof(parse_proof('assume A { claim on A }').body, [])
        assert verdict.conclusion == Implies(A, A)


@pytest.mark.parametrize('n', [1, 3, 5])
def test_generated_debruijn_proofs_check(n):
    arg = gen_debruijn(n)
    report = check_argument(number_premises(arg.premises), arg.goal, debruijn_proof_text(n))
    assert report.success, report.error


def test_even_debruijn_rejected():
    with pytest.raises(ValueError):
        gen_debruijn(2)
