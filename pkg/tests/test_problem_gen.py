"""
Tests for PL1/PL2 generation, proof-centric items and clause export
"""

from itertools import product

import pytest

from proofgrid_forge.errors import GenerationExhausted
from proofgrid_forge.formula import (
    And, Atom, Implies, Not, Or, entails, evaluate, flatten_or, parse_formula, satisfiable,
)
from proofgrid_forge.ndl_engine import check_argument, number_premises
from proofgrid_forge.problem_gen import (
    Argument, GenConfig, at_least, at_most, clauses_of, conditionalize, declausify, derive_seed,
    gen_pl1, gen_pl1_batch, gen_pl1_gf_item, gen_pl1_pc_item, gen_pl1_pm_item, gen_pl2_ab,
    gen_pl2_pw_from_pl1, minimal_premises, pl1_violations, proper_abduction, to_dimacs,
)
from proofgrid_forge.proof_transforms import GappedProof, MaskedProof, grade_gap_fill, grade_mask_assignment


def F(text):
    return parse_formula(text)


def _named(record):
    return number_premises([F(p) for p in record['premises']]), F(record['goal'])


class TestArgument:

    def test_render_layout(self):
        arg = Argument.from_formulas([F('A ==> B'), F('A')], F('B'))
        assert arg.render() == "assert premise-1 := (A ==> B)\nassert premise-2 := A\n# Goal: B\n"

    def test_record(self):
        arg = Argument.from_formulas([F('A ==> B'), F('A')], F('B'), seed=9)
        record = arg.to_record()
        assert record['premises'] == ['(A ==> B)', 'A']
        assert record['goal'] == 'B'
        assert record['atoms'] == 2
        assert record['seed'] == 9
        assert record['conditionalized'] is False
        assert record['problemText'] == arg.render()

    def test_oracle(self):
        assert Argument.from_formulas([F('A ==> B'), F('A')], F('B')).oracle_ok() is True
        assert Argument.from_formulas([F('A ==> B')], F('B')).oracle_ok() is False

    def test_derive_seed(self):
        assert derive_seed(2, 3) == 2_000_009
        assert derive_seed(0, 5) != derive_seed(1, 5)


class TestPL1Constraints:

    def test_valid_argument(self):
        assert pl1_violations([F('A'), F('A ==> B')], F('B')) == []

    def test_redundant_premise(self):
        assert pl1_violations([F('A'), F('B'), F('A ==> C')], F('C')) == ['necessary']

    def test_goal_repeats_premise(self):
        assert pl1_violations([F('A')], F('A')) == ['distinct']

    def test_not_entailed(self):
        assert pl1_violations([F('A')], F('B')) == ['entailed', 'goal-atoms']

    def test_inconsistent_premises(self):
        assert 'consistent' in pl1_violations([F('A & ~A')], F('A'))

    def test_minimal_premises(self):
        assert minimal_premises([F('A'), F('A ==> B'), F('C')], F('B')) == [F('A'), F('A ==> B')]

    def test_config_validation(self):
        with pytest.raises(ValueError):
            GenConfig(min_premises=3, max_premises=2)
        with pytest.raises(ValueError):
            GenConfig(connective_weights={'and': -1.0})


class TestPL1Generation:

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_generated_items_satisfy_constraints(self, seed):
        arg = gen_pl1(GenConfig(seed=seed))
        assert pl1_violations(arg.formulas, arg.goal) == []
        assert arg.family == 'pl1'

    def test_deterministic(self):
        config = GenConfig(seed=5)
        assert gen_pl1(config, 42).render() == gen_pl1(config, 42).render()

    def test_batch_is_alpha_distinct(self):
        items = gen_pl1_batch(GenConfig(seed=1), 6)
        keys = [item.to_record()['alphaKey'] for item in items]
        assert len(set(keys)) == 6

    def test_exhaustion(self):
        config = GenConfig(seed=0, max_retries=0)
        with pytest.raises(GenerationExhausted):
            gen_pl1(config)

    def test_conditionalize(self):
        arg = Argument.from_formulas([F('A'), F('A ==> B')], F('B'))
        folded = conditionalize(arg)
        assert folded.premises == []
        assert folded.goal == Implies(And(F('A'), F('A ==> B')), F('B'))
        assert folded.params['conditionalized'] is True
        assert entails([], folded.goal)

    def test_conditionalize_without_premises(self):
        with pytest.raises(ValueError):
            conditionalize(Argument([], F('A | ~A')))


class TestPL2:

    def test_gate_numbering_and_definitions(self):
        arg = gen_pl2_ab(F('(A & B) | ~C'), seed=0, transform=False)
        assert arg.formulas[:3] == [
            F('N1 ==> (G1 <==> (A & B))'),
            F('N2 ==> (G2 <==> ~C)'),
            F('N3 ==> (G3 <==> (G1 | G2))'),
        ]
        assert arg.formulas[3:] == [F('(A & B) | ~C'), F('~G3')]
        assert arg.goal == F('~N1 | ~N2 | ~N3')
        assert arg.params['gates'] == 3

    def test_transformed_guards_stay_entailed(self):
        arg = gen_pl2_ab(F('(A & B) | ~C'), seed=4)
        assert arg.oracle_ok() is True
        for formula in arg.formulas[:3]:
            assert isinstance(formula, (Or, Implies))

    def test_no_gates(self):
        with pytest.raises(ValueError):
            gen_pl2_ab(Atom('A'), seed=0)

    def test_proper_abduction_single_gate(self):
        interpretation = {'A': True, 'B': True, 'C': True}
        arg = proper_abduction(F('(A & B) | ~C'), seed=0, transform=False,
                               interpretation=interpretation, gate_index=1)
        assert arg.formulas[-2:] == [F('A & B & C'), F('~G1')]
        assert arg.goal == F('~N1')
        assert arg.oracle_ok() is True

    def test_proper_abduction_root_gate(self):
        interpretation = {'A': True, 'B': True, 'C': True}
        arg = proper_abduction(F('(A & B) | ~C'), seed=0, transform=False,
                               interpretation=interpretation, gate_index=3)
        assert arg.formulas[-1] == F('~G3')
        assert arg.goal == F('~N1 | ~N2 | ~N3')

    def test_lift_from_pl1(self):
        source = Argument.from_formulas([F('A ==> B'), F('A')], F('B'))
        arg = gen_pl2_pw_from_pl1(source, seed=3)
        assert arg.family == 'pl2'
        assert arg.params['segment'] >= 2
        assert 'source' in arg.params
        disjuncts = flatten_or(arg.goal)
        assert len(disjuncts) == arg.params['gates']
        assert all(isinstance(d, Not) for d in disjuncts)


class TestProofCentricItems:

    def test_checking_item_with_correct_proof(self):
        record = gen_pl1_pc_item(GenConfig(seed=0), seed=5, corrupt=False)
        premises, goal = _named(record)
        assert record['correctProof'] is True
        assert record['error'] is None
        assert check_argument(premises, goal, record['proof']).success

    def test_checking_item_with_corruption(self):
        record = gen_pl1_pc_item(GenConfig(seed=0), seed=5, corrupt=True)
        premises, goal = _named(record)
        report = check_argument(premises, goal, record['proof'])
        assert record['correctProof'] is False
        assert not report.success
        assert record['error']['errorType'] == report.error.kind

    def test_masking_item(self):
        record = gen_pl1_pm_item(GenConfig(seed=0), seed=6)
        premises, goal = _named(record)
        masked = MaskedProof(record['maskedProof'], record['masks'], record['maskKinds'], 0)
        assert record['masks']
        assert grade_mask_assignment(premises, goal, masked, record['masks'])[0]

    def test_gap_item(self):
        record = gen_pl1_gf_item(GenConfig(seed=0), seed=7)
        premises, goal = _named(record)
        gapped = GappedProof(record['gappedProof'], record['gaps'], record['elided'])
        assert record['gaps']
        assert grade_gap_fill(premises, goal, gapped, record['gaps'])[0]


class TestClauses:

    def test_clause_shapes(self):
        assert clauses_of(F('A | ~B')) == [[('A', True), ('B', False)]]
        assert clauses_of(F('A & B ==> C')) == [[('A', False), ('B', False), ('C', True)]]
        assert clauses_of(F('A ==> B & C')) == [[('A', False), ('B', True)], [('A', False), ('C', True)]]
        assert clauses_of(F('~(A & B)')) == [[('A', False), ('B', False)]]
        assert clauses_of(F('A ==> false')) == [[('A', False)]]

    def test_not_clause_shaped(self):
        with pytest.raises(ValueError):
            clauses_of(F('A <==> B'))

    def test_declausify(self):
        assert declausify([Not(Atom('a')), Not(Atom('b')), Atom('c')]) == F('a & b ==> c')
        assert declausify([Not(Atom('a'))]) == F('~a')
        assert declausify([Not(Atom('a')), Not(Atom('b'))]) == F('a ==> ~b')
        assert declausify([Atom('a'), Atom('b')]) == F('a | b')

    def test_dimacs(self):
        arg = Argument.from_formulas([F('A | ~B'), F('B')], F('A'))
        assert to_dimacs(arg) == "c pl1 {}\nc 1 A\nc 2 B\np cnf 2 3\n1 -2 0\n2 0\n-1 0\n"


LITS = [Atom('X'), Atom('Y'), Atom('Z')]


def _count(interpretation):
    return sum(interpretation[lit.name] for lit in LITS)


def _assignments():
    for values in product([False, True], repeat=len(LITS)):
        yield dict(zip([lit.name for lit in LITS], values))


class TestCardinality:

    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_direct_encodings(self, k):
        for interpretation in _assignments():
            assert all(evaluate(f, interpretation) for f in at_most(LITS, k)) == (_count(interpretation) <= k)
            assert all(evaluate(f, interpretation) for f in at_least(LITS, k)) == (_count(interpretation) >= k)

    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_counter_encodings(self, k):
        for interpretation in _assignments():
            fixed = [lit if interpretation[lit.name] else Not(lit) for lit in LITS]
            most = at_most(LITS, k, 'counter', 't') + fixed
            least = at_least(LITS, k, 'counter', 't') + fixed
            assert (satisfiable(most) is not None) == (_count(interpretation) <= k)
            assert (satisfiable(least) is not None) == (_count(interpretation) >= k)
