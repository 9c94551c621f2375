"""
Equational Task Grading

Scores model answers for the three equational tasks:
- EQ-PC: verdict plus explanation at rigor levels 1-3, L2 witness error typing,
  position similarity and invalid-position counts, L3 record comparison
- EQ-ER: per-step equation sets, proof- and step-level accuracy, error types
- EQ-GF: gap completions, error types, confidence, cycles and redundancy

Usage:
    problem = parse_eq_problem(text)
    grade = grade_eq_pc(problem, answer)
    grade.credited(2)
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

try:
    from .config import CONFIDENCE_LEVELS, GF_MAX_CITED, GF_SEARCH_BUDGET
    from .errors import CitationCapExceeded, TermSyntaxError, TermTypeError
    from .eq_engine import (EqProblem, EqStep, RewriteWitness, Term, check_eq_proof, completion_diagnostics,
                            disjoint, gap_oracle, is_valid_position, match_term, apply_subst, multi_rewrite_check,
                            parse_term, position_similarity, recover_equations, replace, signature, subterm,
                            verify_er_step, verify_gap_fill)
    from .instrumented_checker import load_answer_json
except ImportError:
    from config import CONFIDENCE_LEVELS, GF_MAX_CITED, GF_SEARCH_BUDGET
    from errors import CitationCapExceeded, TermSyntaxError, TermTypeError
    from eq_engine import (EqProblem, EqStep, RewriteWitness, Term, check_eq_proof, completion_diagnostics,
                           disjoint, gap_oracle, is_valid_position, match_term, apply_subst, multi_rewrite_check,
                           parse_term, position_similarity, recover_equations, replace, signature, subterm,
                           verify_er_step, verify_gap_fill)
    from instrumented_checker import load_answer_json

logger = logging.getLogger(__name__)

WITNESS_KEYS = {'redex', 'position', 'equation', 'contractum'}
CONTRACTUM_KEYS = {'step', 'equation', 'position', 'expectedContractum', 'actualContractum'}
EQUATION_KEYS = {'step', 'givenEquations', 'correctEquations'}

# EQ-PC level-2 error types
PC_FORMAT, PC_VERDICT, PC_POSITION, PC_REDEX, PC_CONTRACTUM, PC_EQUATION = 1, 2, 3, 4, 5, 6

# EQ-ER error types
ER_ILL_FORMED, ER_MISSED, ER_SPURIOUS, ER_WRONG_SET, ER_TRUNCATED = 1, 2, 3, 4, 5

# EQ-GF error types; 0 marks an answer whose structure is unusable
GF_STRUCTURE, GF_EMPTY, GF_SYNTAX, GF_TYPE, GF_INVALID_STEP, GF_SPURIOUS = 0, 1, 2, 3, 4, 5


def _safe_term(text, arities) -> Optional[Term]:
    if not isinstance(text, str):
        return None
    try:
        return parse_term(text, arities)
    except (TermSyntaxError, TermTypeError):
        return None


# ============================================================================
# EQ-PC
# ============================================================================

@dataclass
class EqPcGrade:
    """
    Credit at each rigor level plus the analytics behind it

    Acceptance is monotone: level3 implies level2 implies level1.
    """
    level1: bool = False
    level2: bool = False
    level3: bool = False
    error_type: Optional[int] = None
    witness_errors: List[int] = field(default_factory=list)
    similarities: List[float] = field(default_factory=list)
    invalid_positions: int = 0
    record_mismatches: List[str] = field(default_factory=list)

    def credited(self, level: int) -> bool:
        return {1: self.level1, 2: self.level2, 3: self.level3}[level]


def _witness_valid(s: Term, t: Term, cited: Sequence[str], claims: List[Dict], problem: EqProblem,
                   arities) -> bool:
    """An explanation step stands on its own: cited equations, disjoint redexes, exact result"""
    axiom_map = problem.axiom_map()
    if sorted(str(c.get('equation')) for c in claims) != sorted(cited):
        return False
    result = s
    spots = []
    for claim in claims:
        pos = tuple(claim['position']) if isinstance(claim['position'], list) else None
        redex = _safe_term(claim['redex'], arities)
        contractum = _safe_term(claim['contractum'], arities)
        if pos is None or redex is None or contractum is None or not is_valid_position(s, pos):
            return False
        eq = axiom_map[claim['equation']]
        theta = match_term(eq.lhs, redex)
        if subterm(s, pos) != redex or theta is None or apply_subst(eq.rhs, theta) != contractum:
            return False
        spots.append(pos)
        result = replace(result, pos, contractum)
    if any(not disjoint(p, q) for i, p in enumerate(spots) for q in spots[i + 1:]):
        return False
    return result == t


def _classify_claims(s: Term, claims: List[Dict], gold: List[RewriteWitness], grade: EqPcGrade, arities):
    by_equation = {w.equation: w for w in gold}
    by_position = {w.position: w for w in gold}
    seen = set()
    for claim in claims:
        pos = tuple(claim['position']) if isinstance(claim['position'], list) else ()
        if not is_valid_position(s, pos):
            grade.invalid_positions += 1
        witness = by_equation.get(claim['equation']) or by_position.get(pos)
        if witness is None or witness.equation != claim['equation']:
            grade.witness_errors.append(PC_EQUATION)
            continue
        seen.add(witness.equation)
        if pos != witness.position:
            grade.witness_errors.append(PC_POSITION)
            grade.similarities.append(position_similarity(pos, witness.position))
        elif _safe_term(claim['redex'], arities) != witness.redex:
            grade.witness_errors.append(PC_REDEX)
        elif _safe_term(claim['contractum'], arities) != witness.contractum:
            grade.witness_errors.append(PC_CONTRACTUM)
    if len(seen) < len(gold):
        grade.witness_errors.append(PC_EQUATION)


def _explanation_steps(explanation, count: int) -> Optional[Dict[int, List[Dict]]]:
    """Step -> witness claims, or None when the explanation breaks the schema"""
    if not isinstance(explanation, list):
        return None
    steps = {}
    for entry in explanation:
        if not isinstance(entry, dict) or not {'step', 'rewrites'} <= set(entry):
            return None
        if not isinstance(entry['rewrites'], list):
            return None
        for claim in entry['rewrites']:
            if not isinstance(claim, dict) or not WITNESS_KEYS <= set(claim):
                return None
        steps[entry['step']] = entry['rewrites']
    if set(steps) != set(range(1, count + 1)):
        return None
    return steps


def _compare_records(gold: Dict, claimed, problem: EqProblem, arities) -> List[str]:
    """Fields of an L3 error record that disagree with the gold record"""
    if not isinstance(claimed, dict):
        return ['format']
    if 'expectedContractum' in gold:
        if not CONTRACTUM_KEYS <= set(claimed):
            return ['format']
        mismatches = [k for k in ('step', 'equation', 'position') if claimed[k] != gold[k]]
        for key in ('expectedContractum', 'actualContractum'):
            if _safe_term(claimed[key], arities) != parse_term(gold[key]):
                mismatches.append(key)
        return mismatches

    if not EQUATION_KEYS <= set(claimed):
        return ['format']
    mismatches = []
    if claimed['step'] != gold['step']:
        return ['step']
    if sorted(claimed['givenEquations'] or []) != sorted(gold['givenEquations']):
        mismatches.append('givenEquations')
    proposed = claimed['correctEquations'] or []
    if not gold['correctEquations']:
        if proposed:
            mismatches.append('correctEquations')
    else:
        terms = problem.proof.terms()
        axiom_map = problem.axiom_map()
        step = gold['step']
        eqs = [axiom_map.get(n) for n in proposed]
        if not proposed or not all(eqs) or \
                multi_rewrite_check(terms[step - 1], terms[step], eqs) is None:
            mismatches.append('correctEquations')
    return mismatches


def grade_eq_pc(problem: EqProblem, answer) -> EqPcGrade:
    """
    Grade an EQ-PC answer {"correct": bool, "explanation": ...} at all three levels

    Level 1 needs the right verdict. Level 2 additionally needs a fully
    correct witness explanation when the proof is correct. Level 3 also
    needs the exact first-error record when it is not.
    """
    grade = EqPcGrade()
    ok, answer, message = load_answer_json(answer)
    if not ok or not isinstance(answer, dict) or not isinstance(answer.get('correct'), bool):
        grade.error_type = PC_FORMAT
        logger.debug(f"[X] EQ-PC answer unusable: {message or 'missing correct field'}")
        return grade

    gold = check_eq_proof(problem.axioms, problem.proof, level=3)
    arities = signature(problem.proof.terms())
    grade.level1 = answer['correct'] == gold.correct
    if not grade.level1:
        grade.error_type = PC_VERDICT
        return grade

    if not gold.correct:
        grade.level2 = True
        grade.record_mismatches = _compare_records(gold.explanation, answer.get('explanation'),
                                                   problem, arities)
        grade.level3 = not grade.record_mismatches
        return grade

    terms = problem.proof.terms()
    steps = _explanation_steps(answer.get('explanation'), len(problem.proof.steps))
    if steps is None:
        grade.error_type = PC_FORMAT
        return grade
    all_valid = True
    for k, step in enumerate(problem.proof.steps, 1):
        claims = steps[k]
        if not _witness_valid(terms[k - 1], terms[k], step.cited, claims, problem, arities):
            all_valid = False
            _classify_claims(terms[k - 1], claims, gold.witnesses[k - 1], grade, arities)
    grade.level2 = grade.level3 = all_valid
    if not all_valid:
        grade.error_type = grade.witness_errors[0] if grade.witness_errors else PC_EQUATION
    return grade


# ============================================================================
# EQ-ER
# ============================================================================

@dataclass
class ErGrade:
    proof_correct: bool = False
    step_correct: List[bool] = field(default_factory=list)
    step_errors: List[Optional[int]] = field(default_factory=list)
    proof_error: Optional[int] = None

    @property
    def step_accuracy(self) -> float:
        return sum(self.step_correct) / len(self.step_correct) if self.step_correct else 0.0


def grade_eq_er(problem: EqProblem, answer) -> ErGrade:
    """
    Grade an EQ-ER answer [{"step": k, "supportingEquations": [...]}, ...]

    Any set that justifies its step is credited, in either rewriting
    direction; an empty set is credited only for unjustifiable steps.
    """
    count = len(problem.proof.steps)
    grade = ErGrade(step_correct=[False] * count, step_errors=[None] * count)
    ok, answer, _ = load_answer_json(answer)
    if not ok or not isinstance(answer, list):
        grade.proof_error = ER_ILL_FORMED
        grade.step_errors = [ER_ILL_FORMED] * count
        return grade

    claimed: Dict[int, object] = {}
    for entry in answer:
        if isinstance(entry, dict) and 'step' in entry and 'supportingEquations' in entry:
            claimed[entry['step']] = entry['supportingEquations']

    terms = problem.proof.terms()
    gold = recover_equations(problem.axioms, problem.proof)
    for k in range(1, count + 1):
        if k not in claimed:
            continue
        names = claimed[k]
        if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
            grade.step_errors[k - 1] = ER_ILL_FORMED
            continue
        if verify_er_step(problem.axioms, terms[k - 1], terms[k], names):
            grade.step_correct[k - 1] = True
        elif not names:
            grade.step_errors[k - 1] = ER_MISSED
        elif not gold[k - 1]:
            grade.step_errors[k - 1] = ER_SPURIOUS
        else:
            grade.step_errors[k - 1] = ER_WRONG_SET

    if len(claimed) < count:
        grade.proof_error = ER_TRUNCATED
    grade.proof_correct = all(grade.step_correct)
    return grade


def er_accuracy(grades: Sequence[ErGrade]) -> Dict[str, float]:
    """Proof-level accuracy (every step right) and step-level accuracy (pooled steps)"""
    steps = [ok for g in grades for ok in g.step_correct]
    return {
        'PLA': sum(g.proof_correct for g in grades) / len(grades) if grades else 0.0,
        'SLA': sum(steps) / len(steps) if steps else 0.0,
    }


# ============================================================================
# EQ-GF
# ============================================================================

@dataclass
class GfGrade:
    credited: bool = False
    error_type: Optional[int] = None
    confidence: Optional[float] = None
    cycle: bool = False
    redundancy: float = 0.0
    steps_written: int = 0
    detail: str = ''


def grade_eq_gf(problem: EqProblem, answer, budget: int = GF_SEARCH_BUDGET) -> GfGrade:
    """
    Grade an EQ-GF answer {"explanation", "missingSteps", "confidence"}

    An empty completion is right iff the oracle certifies the gap unfillable;
    a non-empty one must bridge the gap step by step.
    """
    grade = GfGrade()
    ok, answer, message = load_answer_json(answer)
    if not ok or not isinstance(answer, dict) or not isinstance(answer.get('missingSteps'), list):
        grade.error_type = GF_STRUCTURE
        grade.detail = message or 'missingSteps absent'
        return grade

    level = answer.get('confidence')
    if isinstance(level, int) and level in CONFIDENCE_LEVELS:
        grade.confidence = CONFIDENCE_LEVELS[level]

    gap = problem.gap_index()
    if gap is None or gap + 1 >= len(problem.proof.steps):
        raise ValueError("Gap-filling problems need a gap followed by a cited step")
    pre_term = problem.proof.terms()[gap]
    post_step: EqStep = problem.proof.steps[gap + 1]

    candidates = []
    for entry in answer['missingSteps']:
        if not isinstance(entry, dict) or 'term' not in entry or 'supportingEquations' not in entry:
            grade.error_type = GF_STRUCTURE
            grade.detail = 'step without term or supportingEquations'
            return grade
        candidates.append((entry['term'], list(entry['supportingEquations'] or [])))
    grade.steps_written = len(candidates)

    if not candidates:
        verdict = gap_oracle(problem.axioms, pre_term, post_step, budget=budget)
        grade.credited = verdict == 'unfillable'
        grade.error_type = None if grade.credited else GF_EMPTY
        grade.detail = f"oracle: {verdict}"
        return grade

    try:
        result = verify_gap_fill(problem.axioms, pre_term, post_step, candidates,
                                 max_cited=GF_MAX_CITED, oracle_budget=budget)
    except TermSyntaxError as e:
        grade.error_type, grade.detail = GF_SYNTAX, str(e)
        return grade
    except TermTypeError as e:
        grade.error_type, grade.detail = GF_TYPE, str(e)
        return grade
    except CitationCapExceeded as e:
        grade.error_type, grade.detail = GF_INVALID_STEP, str(e)
        return grade

    arities = signature([pre_term, post_step.term] + [e.lhs for e in problem.axioms] + [e.rhs for e in problem.axioms])
    diagnostics = completion_diagnostics(pre_term, [parse_term(t, arities) for t, _ in candidates])
    grade.cycle = diagnostics['cycle']
    grade.redundancy = diagnostics['redundancy']

    if result.valid:
        grade.credited = True
        return grade
    if gap_oracle(problem.axioms, pre_term, post_step, budget=budget) == 'unfillable':
        grade.error_type = GF_SPURIOUS
    else:
        grade.error_type = GF_INVALID_STEP
    grade.detail = result.detail
    return grade
