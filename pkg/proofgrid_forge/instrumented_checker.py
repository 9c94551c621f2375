"""
Instrumented NDL Checker

Error-tolerant evaluation of NDL proofs:
- Syntax repair pass (run to fixpoint before evaluation): square brackets,
  trailing parentheses, missing/extra semicolons and braces, and
  'name BY rule on ...' written instead of 'name := rule on ...'
- Rule-level overlooks during evaluation: double negation, commutativity of
  & and |, left/right twin swaps, reversed argument lists, from-false on false
- Every intervention is logged; the first substantive error is reported

Associativity is never overlooked, and all overlooks keep the checker sound.
"""

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

try:
    from .config import COMMUTATIVITY_CORRECTION, DOUBLE_NEGATION_CORRECTION
    from .errors import AtomBudgetExceeded, ProofSyntaxError
    from .formula import (
        FALSE, And, Binary, Formula, Not, Or, atoms_of, entails, print_formula, show_formula, tokenize,
    )
    from .ndl_engine import (
        AssumptionBase, ByAnnotated, CheckReport, NamedFormulas, NdlError, NdlEvaluator,
        NdlVerdict, RuleApp, apply_rule, check_script, in_base, looks_like_name, parse_proof,
    )
except ImportError:
    from config import COMMUTATIVITY_CORRECTION, DOUBLE_NEGATION_CORRECTION
    from errors import AtomBudgetExceeded, ProofSyntaxError
    from formula import (
        FALSE, And, Binary, Formula, Not, Or, atoms_of, entails, print_formula, show_formula, tokenize,
    )
    from ndl_engine import (
        AssumptionBase, ByAnnotated, CheckReport, NamedFormulas, NdlError, NdlEvaluator,
        NdlVerdict, RuleApp, apply_rule, check_script, in_base, looks_like_name, parse_proof,
    )

logger = logging.getLogger(__name__)

MAX_REPAIR_ROUNDS = 50

TWIN_RULES = {
    'left-and': 'right-and',
    'right-and': 'left-and',
    'left-either': 'right-either',
    'right-either': 'left-either',
    'left-iff': 'right-iff',
    'right-iff': 'left-iff',
}

REVERSIBLE_RULES = {'mp', 'mt', 'dsyl', 'absurd', 'by-contradiction'}


# ============================================================================
# REPAIR LOG
# ============================================================================

@dataclass(frozen=True)
class Correction:
    location: str
    description: str
    line: int = 0


@dataclass
class RepairLog:
    syntax_corrections: List[Correction] = field(default_factory=list)
    structural_corrections: List[Correction] = field(default_factory=list)

    def add_syntax(self, location: str, description: str, line: int = 0):
        self.syntax_corrections.append(Correction(location, description, line))
        logger.debug(f"[REPAIR] {location}: {description}")

    def add_structural(self, location: str, description: str, line: int = 0):
        self.structural_corrections.append(Correction(location, description, line))
        logger.debug(f"[OVERLOOK] {location}: {description}")

    @property
    def empty(self) -> bool:
        return not self.syntax_corrections and not self.structural_corrections

    def to_record(self) -> Dict:
        return {
            'syntaxCorrections': [[c.location, f" {c.description} "] for c in self.syntax_corrections],
            'structuralCorrections': [[c.location, f" {c.description} "] for c in self.structural_corrections],
        }


@dataclass
class InstrumentedResult:
    """
    Outcome of an instrumented check

    result is 'correct', 'incorrect' or 'unknown'; strict_accepted records
    whether the unrepaired text passes the strict checker.
    """
    result: str
    first_error: Optional[NdlError] = None
    repairs: RepairLog = field(default_factory=RepairLog)
    strict_accepted: bool = False
    strict_diagnostics: str = ''
    conclusion: Optional[Formula] = None
    repaired_text: str = ''

    def to_record(self) -> Dict:
        """Archive-shaped instrumentedCheckerResult dict"""
        record = {
            'result': self.result,
            'errorType': None,
            'step': None,
            'offendingRule': None,
            'args': None,
            'evaluatedArgs': None,
            'missingFormula': None,
            'fixes': self.repairs.to_record(),
        }
        if self.first_error is not None:
            error = self.first_error.to_record()
            for key in ('errorType', 'step', 'offendingRule', 'args', 'evaluatedArgs', 'missingFormula'):
                record[key] = error[key]
            record['line'] = self.first_error.line
        record['strictAccepted'] = self.strict_accepted
        record['strictDiagnostics'] = self.strict_diagnostics
        return record


# ============================================================================
# OVERLOOK EQUIVALENCE
# ============================================================================

def strip_double_negations(f: Formula) -> Formula:
    if isinstance(f, Not):
        if isinstance(f.arg, Not):
            return strip_double_negations(f.arg.arg)
        return Not(strip_double_negations(f.arg))
    if isinstance(f, Binary):
        return type(f)(strip_double_negations(f.left), strip_double_negations(f.right))
    return f


def overlook_form(f: Formula) -> Formula:
    """
    Canonical representative modulo double negation and commutativity of & and |

    Implications and biconditionals keep their argument order; nesting is
    left untouched, so (p & (q & r)) and ((p & q) & r) stay distinct.
    """
    if isinstance(f, Not):
        if isinstance(f.arg, Not):
            return overlook_form(f.arg.arg)
        return Not(overlook_form(f.arg))
    if isinstance(f, Binary):
        left, right = overlook_form(f.left), overlook_form(f.right)
        if isinstance(f, (And, Or)) and print_formula(right) < print_formula(left):
            left, right = right, left
        return type(f)(left, right)
    return f


def overlook_equivalent(p: Formula, q: Formula) -> bool:
    return p == q or overlook_form(p) == overlook_form(q)


def describe_overlook(expected: Formula, actual: Formula) -> str:
    if strip_double_negations(expected) == strip_double_negations(actual):
        return DOUBLE_NEGATION_CORRECTION
    return COMMUTATIVITY_CORRECTION


# ============================================================================
# SYNTAX REPAIR
# ============================================================================

_BY_NAME_RE = re.compile(
    r'(?P<indent>(?:^|[{;])\s*)(?P<name>[A-Za-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)\s+BY\s+'
    r'(?=[A-Za-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*\s+on\b)',
    re.IGNORECASE,
)


# A line ending in a connective, an open parenthesis or a comma continues its formula
_CONTINUATION_RE = re.compile(r'(?:&|\||==>|~|\(|,)$')


def _line_of(text: str, offset: int) -> int:
    return text.count('\n', 0, offset) + 1


def _repair_lines(text: str, log: RepairLog, vocabulary: Sequence[str] = ()) -> str:
    lines = text.split('\n')
    carry = 0  # parentheses left open by earlier lines of the current statement
    for k, line in enumerate(lines):
        number = k + 1
        code, hash_sign, comment = line.partition('#')

        if '[' in code or ']' in code:
            code = code.replace('[', '(').replace(']', ')')
            log.add_syntax(f"line-{number}", "Replaced square brackets with parentheses", number)

        renamed = []

        def _bind(match):
            name = match.group('name')
            if not looks_like_name(name) or name in vocabulary:
                return match.group(0)
            renamed.append(name)
            return f"{match.group('indent')}{name} := "

        code = _BY_NAME_RE.sub(_bind, code)
        for name in renamed:
            log.add_syntax(f"line-{number}", f"Rewrote '{name} BY' as a naming binding ':='", number)

        if ';;' in code:
            code = re.sub(r';(\s*;)+', ';', code)
            log.add_syntax(f"line-{number}", "Removed duplicated semicolon", number)

        stripped = code.rstrip()
        if _CONTINUATION_RE.search(stripped):
            carry += code.count('(') - code.count(')')
        elif stripped:
            if not stripped.endswith('{'):
                code, delta = balance_right_parens(code, carry)
                if delta > 0:
                    log.add_syntax(f"line-{number}", f"Closed {delta} unbalanced parenthesis(es)", number)
                elif delta < 0:
                    log.add_syntax(f"line-{number}", f"Removed {-delta} surplus closing parenthesis(es)", number)
            carry = 0

        lines[k] = code + hash_sign + comment
    return '\n'.join(lines)


def balance_right_parens(code: str, carry: int = 0) -> Tuple[str, int]:
    """
    Balance a statement's parentheses by editing the right end of its last line

    carry counts parentheses left open by earlier lines of the same statement.
    Trailing ';' and '}' are kept after the edit. Returns the new text and
    the number of parentheses added (positive) or removed (negative).
    """
    opened, closed = code.count('(') + carry, code.count(')')
    if opened == closed:
        return code, 0
    stripped = code.rstrip()
    tail = ''
    while stripped.endswith(';') or stripped.endswith('}'):
        tail = stripped[-1] + tail
        stripped = stripped[:-1].rstrip()
    if opened > closed:
        return stripped + ')' * (opened - closed) + tail, opened - closed
    extra = closed - opened
    if stripped.endswith(')' * extra):
        return stripped[:len(stripped) - extra] + tail, -extra
    return code, 0


def _repair_structure(text: str, log: RepairLog) -> str:
    for _ in range(MAX_REPAIR_ROUNDS):
        try:
            parse_proof(text)
            return text
        except ProofSyntaxError as e:
            token_text = text[e.offset:e.offset + 1]
            line = _line_of(text, e.offset)
            at_eof = e.offset >= len(text.rstrip())
            if e.expected == "';'" and at_eof:
                text = text.rstrip() + '\n}\n'
                log.add_syntax(f"line-{line}", "Inserted missing closing brace", line)
            elif e.expected == "';'":
                previous = [t for t in tokenize(text) if t.offset < e.offset and t.kind != 'eof']
                cut = previous[-1].offset + len(previous[-1].text) if previous else e.offset
                text = text[:cut] + ';' + text[cut:]
                log.add_syntax(f"line-{line}", "Inserted missing semicolon", line)
            elif token_text == '}' and e.expected in ("';' or end of proof", 'a deduction'):
                text = text[:e.offset] + text[e.offset + 1:]
                log.add_syntax(f"line-{line}", "Removed unmatched closing brace", line)
            elif token_text == ';':
                text = text[:e.offset] + text[e.offset + 1:]
                log.add_syntax(f"line-{line}", "Removed misplaced semicolon", line)
            else:
                return text
    return text


def repair_syntax(text: str, vocabulary: Sequence[str] = ()) -> Tuple[str, List[Correction]]:
    """
    Repair minor syntax deviations, logging every edit

    Returns:
        (repaired text, syntax corrections). The text may still fail to parse;
        the residual parsing error surfaces at evaluation.
    """
    log = RepairLog()
    repaired = _repair_lines(text, log, vocabulary)
    repaired = _repair_structure(repaired, log)
    return repaired, log.syntax_corrections


# ============================================================================
# RELAXED EVALUATOR
# ============================================================================

class InstrumentedEvaluator(NdlEvaluator):
    """NDL evaluator that overlooks the fixed catalog of benign slips"""

    def __init__(self, log: RepairLog, vocabulary=None):
        super().__init__(vocabulary=vocabulary, record_trace=True)
        self.log = log
        self._pending: List[Formula] = []

    def _location(self) -> str:
        return f"step-{self.step_counter}"

    def member(self, f: Formula, base: AssumptionBase) -> bool:
        if in_base(f, base):
            return True
        target = overlook_form(f)
        if any(overlook_form(g) == target for g in base):
            self._pending.append(f)
            return True
        return False

    def _attempt(self, rule: str, args: List[Formula], base: AssumptionBase, relaxed: bool):
        self._pending = []
        same = overlook_equivalent if relaxed else (lambda x, y: x == y)
        return apply_rule(rule, args, base, same=same, member=self.member)

    def _commit_membership(self, line: int):
        for f in self._pending:
            self.log.add_structural(
                self._location(),
                f"Overlooking an argument {show_formula(f)} that holds only up to double negation or conj/disj commutativity",
                line)
        self._pending = []

    def apply(self, node: RuleApp, args: List[Formula], base: AssumptionBase, step: int) -> Formula:
        result = self._attempt(node.rule, args, base, relaxed=False)
        if not isinstance(result, NdlError):
            self._commit_membership(node.line)
            return result
        first = result

        candidates = [(node.rule, args, True, None)]
        if node.rule in REVERSIBLE_RULES and len(args) == 2:
            reason = f"Overlooking reversed arguments in an application of {node.rule}"
            candidates += [(node.rule, list(reversed(args)), False, reason),
                           (node.rule, list(reversed(args)), True, reason)]
        if node.rule in ('left-either', 'right-either') and first.kind == 'notInAB':
            twin = TWIN_RULES[node.rule]
            candidates.append((twin, args, False,
                               f"Overlooking application of {node.rule} that should be {twin}"))
        if node.rule == 'from-false' and len(args) == 2 and FALSE in args:
            target = args[1] if args[0] == FALSE else args[0]
            candidates.append(('from-false', [target], False,
                               "Overlooking from-false applied to false itself"))

        for rule, attempt_args, relaxed, reason in candidates:
            if first.kind == 'notInAB' and relaxed and rule == node.rule and attempt_args == args:
                continue
            outcome = self._attempt(rule, attempt_args, base, relaxed)
            if isinstance(outcome, NdlError):
                continue
            if reason is None:
                reason = (f"Overlooking a malformed application of {node.rule} that is well-formed "
                          f"up to double negation or conj/disj commutativity")
            self.log.add_structural(self._location(), reason, node.line)
            self._commit_membership(node.line)
            return outcome

        self._pending = []
        self.fail(first.kind, node, detail=first.detail, rule=node.rule, args=list(node.args),
                  evaluated_args=args, missing=first.missing)

    def check_annotation(self, node: ByAnnotated, claimed: Formula, actual: Formula,
                         base: AssumptionBase) -> Formula:
        if claimed == actual:
            return actual
        if overlook_equivalent(claimed, actual):
            self.log.add_structural(self._location(), describe_overlook(claimed, actual), node.line)
            return claimed

        inner = node.proof
        entry = self.trace[-1] if self.trace and self.trace[-1].node is inner else None
        if isinstance(inner, RuleApp) and entry is not None:
            twin = TWIN_RULES.get(inner.rule)
            if twin:
                self._pending = []
                outcome = apply_rule(twin, entry.evaluated_args, entry.base, member=self.member)
                if not isinstance(outcome, NdlError) and overlook_equivalent(outcome, claimed):
                    self.log.add_structural(
                        self._location(), f"Overlooking application of {inner.rule} that should be {twin}",
                        node.line)
                    self._commit_membership(node.line)
                    return claimed
                self._pending = []
            if inner.rule == 'from-false' and entry.evaluated_args == [FALSE] and FALSE in base:
                self.log.add_structural(self._location(), "Overlooking from-false applied to false itself",
                                        node.line)
                return claimed

        self.fail('wrongConclusion', node, expected=claimed, actual=actual,
                  detail=f"Advertised {show_formula(claimed)} but derived {show_formula(actual)}")


# ============================================================================
# ENTRY POINTS
# ============================================================================

def _strict_report(premises: NamedFormulas, goal: Formula, text: str) -> CheckReport:
    try:
        script = parse_proof(text)
    except ProofSyntaxError as e:
        error = NdlError('parsing', line=e.line, column=e.column, detail=str(e))
        return CheckReport(NdlVerdict(error=error), False, error)
    return check_script(premises, goal, script, NdlEvaluator())


def instrumented_eval(premises: NamedFormulas, goal: Formula, proof_text: str) -> InstrumentedResult:
    """
    Check a proof with syntax repairs and logged semantic overlooks

    Returns:
        InstrumentedResult with the repair log, the first unrepairable error
        (if any) and whether the original text passes the strict checker.
    """
    strict = _strict_report(premises, goal, proof_text)
    if strict.success:
        return InstrumentedResult('correct', None, RepairLog(), True, '', strict.verdict.conclusion, proof_text)
    strict_diagnostics = str(strict.error)

    log = RepairLog()
    vocabulary = atoms_of([f for _, f in premises] + [goal])
    repaired = _repair_lines(proof_text, log, vocabulary)
    repaired = _repair_structure(repaired, log)

    try:
        script = parse_proof(repaired)
    except ProofSyntaxError as e:
        error = NdlError('parsing', line=e.line, column=e.column, detail=str(e))
        logger.debug(f"[X] Residual parsing error after repairs: {e}")
        return InstrumentedResult('incorrect', error, log, False, strict_diagnostics,
                                  repaired_text=repaired)

    evaluator = InstrumentedEvaluator(log)
    report = check_script(premises, goal, script, evaluator)
    conclusion = report.verdict.conclusion
    error = report.error

    if error is not None and error.kind == 'wrongConclusion' and error.line == 0 \
            and conclusion is not None and overlook_equivalent(conclusion, goal):
        log.add_structural(f"step-{evaluator.step_counter}", describe_overlook(goal, conclusion))
        error = None

    if error is not None:
        return InstrumentedResult('incorrect', error, log, False, strict_diagnostics,
                                  conclusion, repaired)

    if log.structural_corrections:
        try:
            if not entails([f for _, f in premises], goal):
                error = NdlError('wrongConclusion', expected=goal, actual=conclusion,
                                 detail='Overlooked proof does not establish the goal')
                return InstrumentedResult('incorrect', error, log, False, strict_diagnostics,
                                          conclusion, repaired)
        except AtomBudgetExceeded:
            logger.warning("[X] Oracle budget exhausted while confirming an overlooked proof")
            return InstrumentedResult('unknown', None, log, False, strict_diagnostics,
                                      conclusion, repaired)

    return InstrumentedResult('correct', None, log, False, strict_diagnostics,
                              conclusion, repaired)


# ============================================================================
# PL1-PC SCORING
# ============================================================================

# NDL error kind -> accepted answer classes (syntax / type / logic)
ERROR_CLASSES = {
    'parsing': {'syntax'},
    'unboundIdentifier': {'syntax', 'logic'},
    'malformedAssumption': {'syntax', 'type'},
    'malformedRuleApp': {'type'},
    'notInAB': {'logic'},
    'wrongConclusion': {'logic'},
    'logic': {'logic'},
    'arity': {'type'},
}


def load_answer_json(answer) -> Tuple[bool, object, Optional[str]]:
    """Decode a model answer given as JSON text (code fences allowed) or as an object"""
    if not isinstance(answer, str):
        return True, answer, None
    text = answer.strip()
    fenced = re.search(r'```(?:json)?\s*(.*?)```', text, re.DOTALL)
    if fenced:
        text = fenced.group(1)
    try:
        return True, json.loads(text), None
    except json.JSONDecodeError as e:
        return False, None, f"Answer is not JSON: {e}"


def parse_pc_answer(answer) -> Tuple[bool, Optional[Dict], Optional[str]]:
    """
    Validate a proof-checking answer

    Returns:
        (success, parsed answer, error message)
    """
    ok, answer, message = load_answer_json(answer)
    if not ok:
        return False, None, message
    if not isinstance(answer, dict) or not isinstance(answer.get('correct'), bool):
        return False, None, "Answer lacks a boolean 'correct' field"
    if answer['correct']:
        return True, answer, None
    details = answer.get('errorDetails')
    if not isinstance(details, dict):
        return False, None, "Negative verdict without errorDetails"
    number = details.get('offendingLineNumber')
    if isinstance(number, str) and number.strip().isdigit():
        number = int(number.strip())
    if not isinstance(number, int) or details.get('errorType') not in ('syntax', 'type', 'logic'):
        return False, None, "errorDetails lacks offendingLineNumber or a valid errorType"
    details = dict(details, offendingLineNumber=number)
    return True, dict(answer, errorDetails=details), None


def score_pc_response(gold: InstrumentedResult, model_verdict) -> Tuple[bool, Optional[int]]:
    """
    Credit a proof-checking verdict against the instrumented gold result

    Returns:
        (credited, error type 1-5 or None when credited)
    """
    ok, answer, message = parse_pc_answer(model_verdict)
    if not ok:
        logger.debug(f"[X] Formatting error in proof-checking answer: {message}")
        return False, 3

    gold_clean = gold.result == 'correct' and not gold.repairs.structural_corrections
    if answer['correct']:
        return (True, None) if gold_clean else (False, 1)
    if gold_clean:
        return False, 2

    if gold.first_error is not None:
        gold_line = gold.first_error.line
        gold_classes = ERROR_CLASSES.get(gold.first_error.kind, {'logic'})
    else:
        first = gold.repairs.structural_corrections[0]
        gold_line = first.line
        gold_classes = {'logic', 'type'}

    details = answer['errorDetails']
    if details['offendingLineNumber'] != gold_line:
        return False, 4
    if details['errorType'] not in gold_classes:
        return False, 5
    return True, None
