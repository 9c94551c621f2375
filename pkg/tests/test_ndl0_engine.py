"""
NDL0: semantic from-steps, reasoning depth and NDL translation
"""

import pytest

from conftest import CASES_PROOF
from proofgrid_forge.errors import ProofSyntaxError
from proofgrid_forge.formula import FALSE, Atom, Implies, conjoin, parse_formula
from proofgrid_forge.ndl0_engine import (
    FromStep, Ndl0Evaluator, check_ndl0, eval0, ndl_proof_to_ndl0, ndl_to_ndl0,
    parse_ndl0, reasoning_depth, reasoning_graph,
)
from proofgrid_forge.ndl_engine import RuleApp, check_script, number_premises, parse_proof

A, B, C = Atom('A'), Atom('B'), Atom('C')

CHAIN = '{\n  b := B from premise-1, premise-3;\n  c := C from premise-2, b\n}'


@pytest.fixture
def chain_premises():
    return number_premises([parse_formula('A ==> B'), parse_formula('B ==> C'), A])


class TestChecking:
    def test_chain_proof(self, chain_premises):
        report = check_ndl0(chain_premises, C, CHAIN)
        assert report.success

    def test_non_consequence_is_a_logic_error(self, chain_premises):
        report = check_ndl0(chain_premises, C, 'C from premise-1')
        assert report.error.kind == 'logic'
        model = report.error.countermodel
        assert model is not None
        assert not model['C']

    def test_argument_outside_base(self, chain_premises):
        report = check_ndl0(chain_premises, C, 'C from premise-2, B')
        assert report.error.kind == 'notInAB'
        assert report.error.missing == B

    def test_too_many_arguments(self):
        names = [Atom(f"X{k}") for k in range(6)]
        premises = number_premises(names)
        text = 'X0 from ' + ', '.join(f"premise-{k + 1}" for k in range(6))
        report = check_ndl0(premises, Atom('X0'), text)
        assert report.error.kind == 'arity'

    def test_conjunct_cap(self):
        premise = conjoin([Atom(f"X{k}") for k in range(6)])
        script = parse_ndl0('X0 from premise-1')
        premises = number_premises([premise])
        assert check_script(premises, Atom('X0'), script, Ndl0Evaluator(strict_conjunct_cap=False)).success
        report = check_script(premises, Atom('X0'), script, Ndl0Evaluator(strict_conjunct_cap=True))
        assert report.error.kind == 'arity'

    def test_rule_applications_do_not_parse(self, chain_premises):
        report = check_ndl0(chain_premises, B, 'B BY mp on premise-1, premise-3')
        assert report.error.kind == 'parsing'
        with pytest.raises(ProofSyntaxError):
            parse_ndl0('mp on premise-1, premise-3')

    def test_conditional_proof(self):
        premises = number_premises([parse_formula('A ==> B')])
        report = check_ndl0(premises, Implies(A, B), 'assume A { B from premise-1, A }')
        assert report.success


class TestEval0:
    def test_named_arguments(self):
        a1, a2 = Atom('A1'), Atom('A2')
        contrapositive = parse_formula('~A2 ==> ~A1')
        script = parse_ndl0('A2 from premise-2, premise-1')
        verdict = eval0(script.body, [a1, contrapositive], {'premise-1': a1, 'premise-2': contrapositive})
        assert verdict.ok
        assert verdict.conclusion == a2

    def test_countermodel_for_a_non_consequence(self):
        premise = parse_formula('A16 | A15')
        verdict = eval0(parse_ndl0('A15 from premise-1').body, [premise], {'premise-1': premise})
        assert verdict.error.kind == 'logic'
        assert verdict.error.countermodel == {'A16': True, 'A15': False}


class TestReasoningDepth:
    def test_direct_chain(self, chain_premises):
        graph = reasoning_graph(parse_ndl0(CHAIN), chain_premises)
        assert graph.terminal == 'c'
        assert sorted(graph.sources()) == ['premise-1', 'premise-2', 'premise-3']
        assert graph.depth() == 3
        assert graph.to_records()[-1] == {'source': 'c', 'target': 'false'}

    def test_refutation_ends_at_false(self):
        premises = number_premises([parse_formula('A ==> B'), A, parse_formula('~B')])
        text = '{\n  b := B from premise-1, premise-2;\n  false from b, premise-3\n}'
        assert check_ndl0(premises, FALSE, text).success
        graph = reasoning_graph(parse_ndl0(text), premises)
        assert graph.refutational
        assert reasoning_depth(parse_ndl0(text), premises) == 3

    def test_discharged_assumption_continues_the_chain(self):
        premises = number_premises([parse_formula('A ==> B'), parse_formula('B ==> C'),
                                    parse_formula('(A ==> C) ==> D')])
        text = ('{\n  h := assume A {\n    b := B from A, premise-1;\n    C from b, premise-2\n  };\n'
                '  D from h, premise-3\n}')
        assert check_ndl0(premises, parse_formula('D'), text).success
        graph = reasoning_graph(parse_ndl0(text), premises)
        assert sorted(graph.sources()) == ['hypothesis-1', 'premise-1', 'premise-2', 'premise-3']
        assert ('step-2', 'step-3') in graph.edges
        assert graph.depth() == 4

    def test_single_step(self, chain_premises):
        assert reasoning_depth(parse_ndl0('B from premise-1, premise-3'), chain_premises) == 2

    def test_empty_proof_has_no_depth(self, chain_premises):
        assert reasoning_depth(parse_ndl0(''), chain_premises) == 0


class TestTranslation:
    def test_single_rule(self):
        step = ndl_to_ndl0(RuleApp('mp', (Implies(A, B), A)))
        assert step == FromStep(B, (Implies(A, B), A))

    def test_rule_without_requirements_cites_true(self):
        step = ndl_to_ndl0(RuleApp('ex-middle', (A,)))
        assert step.args == (parse_formula('true'),)

    def test_left_either_cites_only_left_disjunct(self):
        assert ndl_to_ndl0(RuleApp('left-either', (A, B))).args == (A,)

    def test_whole_proof_keeps_conclusion(self, cases_premises, cases_goal):
        translated = ndl_proof_to_ndl0(parse_proof(CASES_PROOF), cases_premises)
        report = check_script(cases_premises, cases_goal, translated, Ndl0Evaluator())
        assert report.success

    def test_invalid_proof_is_not_translated(self, cases_premises):
        with pytest.raises(ValueError):
            ndl_proof_to_ndl0(parse_proof('B BY mp on premise-1, A'), cases_premises)
