"""
NDL Proof Interpreter

Evaluates natural-deduction proofs against an assumption base:
- Proof forms: rule applications, conditional proofs (assume), composition
  ({ D1; D2; ... }), conclusion annotations (p BY D) and naming (I := D)
- Assumption base discipline: conclusions of composed steps flow forward,
  hypotheses are discharged when an assume block closes
- Lexical environment: names bound to premises, lemmas and hypotheses
- 24-rule catalog with membership side-conditions

Usage:
    report = check_argument([('premise-1', parse_formula('(A ==> B)')), ...],
                            parse_formula('(B | D)'), proof_text)
    if report.success: ...
"""

import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

try:
    from .config import NDL_ERROR_PRECEDENCE
    from .errors import ProofSyntaxError
    from .formula import (
        FALSE, TRUE, And, Atom, Formula, Iff, Implies, Not, Or, TokenStream,
        atoms_of, complements, parse_formula_tokens, show_formula, substitute, tokenize,
    )
except ImportError:
    from config import NDL_ERROR_PRECEDENCE
    from errors import ProofSyntaxError
    from formula import (
        FALSE, TRUE, And, Atom, Formula, Iff, Implies, Not, Or, TokenStream,
        atoms_of, complements, parse_formula_tokens, show_formula, substitute, tokenize,
    )

logger = logging.getLogger(__name__)

AssumptionBase = FrozenSet[Formula]
Environment = Dict[str, Formula]


# ============================================================================
# AST
# ============================================================================

@dataclass(frozen=True)
class RuleApp:
    rule: str
    args: Tuple[Formula, ...]
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Assume:
    hypothesis: Formula
    name: Optional[str]
    body: object
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Step:
    name: Optional[str]
    proof: object


@dataclass(frozen=True)
class Compose:
    steps: Tuple[Step, ...]
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class ByAnnotated:
    claimed: Formula
    proof: object
    line: int = 0
    column: int = 0


@dataclass(frozen=True)
class Assert:
    name: Optional[str]
    formula: Formula
    line: int = 0


@dataclass(frozen=True)
class ProofScript:
    """Top-level assertions followed by the proof proper"""
    asserts: Tuple[Assert, ...]
    body: Optional[object]


NdlProof = Union[RuleApp, Assume, Compose, ByAnnotated]


# ============================================================================
# VERDICTS
# ============================================================================

@dataclass
class NdlError:
    """
    First error met during evaluation

    kind is one of parsing, unboundIdentifier, malformedAssumption,
    malformedRuleApp, notInAB, wrongConclusion (plus logic / arity for NDL0).
    """
    kind: str
    line: int = 0
    column: int = 0
    detail: str = ''
    rule: Optional[str] = None
    args: List[Formula] = field(default_factory=list)
    evaluated_args: List[Formula] = field(default_factory=list)
    missing: Optional[Formula] = None
    expected: Optional[Formula] = None
    actual: Optional[Formula] = None
    step: Optional[int] = None
    countermodel: Optional[Dict[str, bool]] = None

    def rank(self) -> int:
        if self.kind in NDL_ERROR_PRECEDENCE:
            return NDL_ERROR_PRECEDENCE.index(self.kind)
        return len(NDL_ERROR_PRECEDENCE)

    def to_record(self) -> Dict:
        """Archive-shaped error dict"""
        return {
            'errorType': self.kind,
            'step': f"step-{self.step}" if self.step is not None else None,
            'line': self.line,
            'offendingRule': self.rule,
            'args': [show_formula(a) for a in self.args],
            'evaluatedArgs': [show_formula(a) for a in self.evaluated_args],
            'missingFormula': show_formula(self.missing) if self.missing is not None else None,
            'detail': self.detail,
        }

    def __str__(self):
        return f"{self.kind} at line {self.line}: {self.detail}"


@dataclass
class NdlVerdict:
    conclusion: Optional[Formula] = None
    error: Optional[NdlError] = None

    @property
    def ok(self) -> bool:
        return self.error is None


class ProofAbort(Exception):
    """Unwinds evaluation to the top with the first error"""

    def __init__(self, error: NdlError):
        self.error = error
        super().__init__(str(error))


@dataclass
class TraceEntry:
    """One evaluated rule application (used by translators and transforms)"""
    node: object
    evaluated_args: List[Formula]
    conclusion: Formula
    base: AssumptionBase
    step: int


# ============================================================================
# PARSER
# ============================================================================

class NdlParser:
    """
    Recursive-descent parser for NDL listings

    Grammar:
        script    := assert* seq
        assert    := 'assert' [name ':='] formula [';']
        seq       := step (';' step)* [';']
        step      := [name ':='] deduction
        deduction := '{' seq '}' | 'assume' [name ':='] formula '{' seq '}'
                   | rule 'on' formula (',' formula)* | formula ('BY'|'by') deduction
    """

    def __init__(self, text: str):
        self.stream = TokenStream(tokenize(text), error_cls=ProofSyntaxError)
        for token in self.stream.tokens:
            if token.kind == 'error':
                raise ProofSyntaxError(f"Illegal character '{token.text}'", offset=token.offset,
                                       line=token.line, column=token.column)

    def parse_script(self) -> ProofScript:
        stream = self.stream
        asserts = []
        while stream.at_keyword('assert'):
            token = stream.next()
            name = self._binding_name()
            formula = parse_formula_tokens(stream)
            stream.accept(';')
            asserts.append(Assert(name, formula, token.line))
        if stream.peek().kind == 'eof':
            return ProofScript(tuple(asserts), None)
        steps = self.parse_seq(None)
        if stream.peek().kind != 'eof':
            stream.fail(f"Unexpected {stream.describe(stream.peek())}", expected="';' or end of proof")
        body = steps[0].proof if len(steps) == 1 and steps[0].name is None else Compose(tuple(steps))
        return ProofScript(tuple(asserts), body)

    def _binding_name(self) -> Optional[str]:
        stream = self.stream
        if stream.peek().kind == 'ident' and stream.at(':=', 1):
            name = stream.next().text
            stream.next()
            return name
        return None

    def _at_terminator(self, terminator: Optional[str]) -> bool:
        if terminator is None:
            return self.stream.peek().kind == 'eof'
        return self.stream.at(terminator)

    def parse_seq(self, terminator: Optional[str]) -> List[Step]:
        stream = self.stream
        steps = []
        while True:
            steps.append(self.parse_step())
            if stream.accept(';'):
                if self._at_terminator(terminator):
                    break
                continue
            if self._at_terminator(terminator):
                break
            stream.fail(f"Unexpected {stream.describe(stream.peek())}", expected="';'")
        return steps

    def parse_step(self) -> Step:
        name = self._binding_name()
        return Step(name, self.parse_deduction())

    def parse_block(self):
        stream = self.stream
        token = stream.expect('{')
        if stream.at('}'):
            stream.fail("Empty block", expected='a deduction')
        steps = self.parse_seq('}')
        stream.expect('}')
        return Compose(tuple(steps), token.line, token.column)

    def parse_deduction(self):
        stream = self.stream
        token = stream.peek()
        if stream.at('{'):
            return self.parse_block()
        if stream.at_keyword('assume'):
            stream.next()
            name = self._binding_name()
            hypothesis = parse_formula_tokens(stream)
            body = self.parse_block()
            return Assume(hypothesis, name, body, token.line, token.column)
        return self.parse_atomic()

    def parse_atomic(self):
        stream = self.stream
        token = stream.peek()
        if token.kind == 'ident' and stream.peek(1).kind == 'ident' and stream.peek(1).text.lower() == 'on':
            stream.next()
            stream.next()
            return RuleApp(token.text, tuple(self.parse_args()), token.line, token.column)
        claimed = parse_formula_tokens(stream)
        if not stream.at_keyword('by'):
            stream.fail(f"Unexpected {stream.describe(stream.peek())}", expected="'BY'")
        stream.next()
        return ByAnnotated(claimed, self.parse_deduction(), token.line, token.column)

    def parse_args(self) -> List[Formula]:
        stream = self.stream
        args = [parse_formula_tokens(stream)]
        while stream.accept(','):
            args.append(parse_formula_tokens(stream))
        return args


def parse_proof(text: str) -> ProofScript:
    """
    Parse an NDL listing

    Raises:
        ProofSyntaxError: with line and column of the offending token
    """
    return NdlParser(text).parse_script()


# ============================================================================
# PRINTER
# ============================================================================

def print_proof(script: ProofScript, indent: str = '  ') -> str:
    """Render a script in listing layout (one deduction per line)"""
    lines = []
    for item in script.asserts:
        prefix = f"{item.name} := " if item.name else ''
        lines.append(f"assert {prefix}{show_formula(item.formula)}")
    if script.body is not None:
        if lines:
            lines.append('')
        body = script.body if isinstance(script.body, Compose) else Compose((Step(None, script.body),))
        lines.extend(_print_block(body, 0, indent))
    return '\n'.join(lines) + '\n'


def _print_block(block: Compose, depth: int, indent: str) -> List[str]:
    pad = indent * depth
    lines = [f"{pad}{{"]
    for k, step in enumerate(block.steps):
        sub = _print_step(step, depth + 1, indent)
        if k < len(block.steps) - 1:
            sub[-1] += ';'
        lines.extend(sub)
    lines.append(f"{pad}}}")
    return lines


def print_steps(steps: Sequence[Step], depth: int = 0, indent: str = '  ') -> str:
    """Render a run of steps as a ';'-separated fragment (gap fills, spliced chains)"""
    lines = []
    for k, step in enumerate(steps):
        sub = _print_step(step, depth, indent)
        if k < len(steps) - 1:
            sub[-1] += ';'
        lines.extend(sub)
    return '\n'.join(lines)


def _print_step(step: Step, depth: int, indent: str) -> List[str]:
    pad = indent * depth
    prefix = f"{step.name} := " if step.name else ''
    lines = _print_deduction(step.proof, depth, indent)
    lines[0] = f"{pad}{prefix}{lines[0].lstrip()}"
    return lines


def _print_deduction(proof, depth: int, indent: str) -> List[str]:
    pad = indent * depth
    if isinstance(proof, RuleApp):
        args = ', '.join(show_formula(a) for a in proof.args)
        return [f"{pad}{proof.rule} on {args}"]
    if isinstance(proof, ByAnnotated):
        inner = _print_deduction(proof.proof, depth, indent)
        inner[0] = f"{pad}{show_formula(proof.claimed)} BY {inner[0].lstrip()}"
        return inner
    if isinstance(proof, Assume):
        name = f"{proof.name} := " if proof.name else ''
        body = _print_block(proof.body, depth, indent)
        body[0] = f"{pad}assume {name}{show_formula(proof.hypothesis)} {{"
        return body
    if isinstance(proof, Compose):
        return _print_block(proof, depth, indent)
    if hasattr(proof, 'render'):
        return [f"{pad}{proof.render()}"]
    raise TypeError(f"Not an NDL deduction: {proof!r}")


# ============================================================================
# RULE CATALOG
# ============================================================================

class _Malformed(Exception):
    pass


Same = Callable[[Formula, Formula], bool]


def _same(x: Formula, y: Formula) -> bool:
    return x == y


def _arity(args, n, rule):
    if len(args) != n:
        raise _Malformed(f"{rule} takes {n} argument(s), got {len(args)}")


def _shape(f, cls, rule, what):
    if not isinstance(f, cls):
        raise _Malformed(f"{rule} expects {what}, got {show_formula(f)}")


def _rule_claim(args, same):
    _arity(args, 1, 'claim')
    return args[0], [args[0]]


def _rule_mp(args, same):
    _arity(args, 2, 'mp')
    cond, ante = args
    _shape(cond, Implies, 'mp', 'a conditional first')
    if not same(cond.left, ante):
        raise _Malformed(f"mp: {show_formula(ante)} is not the antecedent of {show_formula(cond)}")
    return cond.right, [cond, ante]


def _rule_mt(args, same):
    _arity(args, 2, 'mt')
    cond, neg = args
    _shape(cond, Implies, 'mt', 'a conditional first')
    if not same(neg, Not(cond.right)):
        raise _Malformed(f"mt: {show_formula(neg)} is not the negation of the consequent of {show_formula(cond)}")
    return Not(cond.left), [cond, neg]


def _rule_both(args, same):
    _arity(args, 2, 'both')
    return And(args[0], args[1]), list(args)


def _rule_left_and(args, same):
    _arity(args, 1, 'left-and')
    _shape(args[0], And, 'left-and', 'a conjunction')
    return args[0].left, [args[0]]


def _rule_right_and(args, same):
    _arity(args, 1, 'right-and')
    _shape(args[0], And, 'right-and', 'a conjunction')
    return args[0].right, [args[0]]


def _rule_left_either(args, same):
    _arity(args, 2, 'left-either')
    return Or(args[0], args[1]), [args[0]]


def _rule_right_either(args, same):
    _arity(args, 2, 'right-either')
    return Or(args[0], args[1]), [args[1]]


def _split_case_args(args, rule):
    _arity(args, 3, rule)
    disj, first, second = args
    _shape(disj, Or, rule, 'a disjunction first')
    _shape(first, Implies, rule, 'a conditional second')
    _shape(second, Implies, rule, 'a conditional third')
    return disj, first, second


def _rule_cases(args, same):
    disj, first, second = _split_case_args(args, 'cases')
    if not (same(first.left, disj.left) and same(second.left, disj.right)):
        raise _Malformed("cases: conditionals do not match the disjuncts")
    if not same(first.right, second.right):
        raise _Malformed("cases: conditionals have different consequents")
    return first.right, list(args)


def _rule_cd(args, same):
    disj, first, second = _split_case_args(args, 'cd')
    if not (same(first.left, disj.left) and same(second.left, disj.right)):
        raise _Malformed("cd: conditionals do not match the disjuncts")
    return Or(first.right, second.right), list(args)


def _rule_dn(args, same):
    _arity(args, 1, 'dn')
    f = args[0]
    if not (isinstance(f, Not) and isinstance(f.arg, Not)):
        raise _Malformed(f"dn expects a double negation, got {show_formula(f)}")
    return f.arg.arg, [f]


def _rule_dm(args, same):
    _arity(args, 1, 'dm')
    f = args[0]
    if isinstance(f, Not) and isinstance(f.arg, And):
        return Or(Not(f.arg.left), Not(f.arg.right)), [f]
    if isinstance(f, Not) and isinstance(f.arg, Or):
        return And(Not(f.arg.left), Not(f.arg.right)), [f]
    if isinstance(f, Or) and isinstance(f.left, Not) and isinstance(f.right, Not):
        return Not(And(f.left.arg, f.right.arg)), [f]
    if isinstance(f, And) and isinstance(f.left, Not) and isinstance(f.right, Not):
        return Not(Or(f.left.arg, f.right.arg)), [f]
    raise _Malformed(f"dm does not apply to {show_formula(f)}")


def _rule_dsyl(args, same):
    _arity(args, 2, 'dsyl')
    disj, neg = args
    _shape(disj, Or, 'dsyl', 'a disjunction first')
    if complements(neg, disj.left) or (same is not _same and same(neg, Not(disj.left))):
        return disj.right, [disj, neg]
    if complements(neg, disj.right) or (same is not _same and same(neg, Not(disj.right))):
        return disj.left, [disj, neg]
    raise _Malformed(f"dsyl: {show_formula(neg)} complements neither disjunct of {show_formula(disj)}")


def _rule_cond_def(args, same):
    _arity(args, 1, 'cond-def')
    f = args[0]
    if isinstance(f, Implies):
        return Or(Not(f.left), f.right), [f]
    if isinstance(f, Or) and isinstance(f.left, Not):
        return Implies(f.left.arg, f.right), [f]
    raise _Malformed(f"cond-def does not apply to {show_formula(f)}")


def _rule_neg_cond_def(args, same):
    _arity(args, 1, 'neg-cond-def')
    f = args[0]
    if isinstance(f, Not) and isinstance(f.arg, Implies):
        return And(f.arg.left, Not(f.arg.right)), [f]
    if isinstance(f, And) and isinstance(f.right, Not):
        return Not(Implies(f.left, f.right.arg)), [f]
    raise _Malformed(f"neg-cond-def does not apply to {show_formula(f)}")


def _rule_bicond_def(args, same):
    _arity(args, 1, 'bicond-def')
    f = args[0]
    if isinstance(f, Iff):
        return And(Implies(f.left, f.right), Implies(f.right, f.left)), [f]
    if (isinstance(f, And) and isinstance(f.left, Implies) and isinstance(f.right, Implies)
            and same(f.left.left, f.right.right) and same(f.left.right, f.right.left)):
        return Iff(f.left.left, f.left.right), [f]
    raise _Malformed(f"bicond-def does not apply to {show_formula(f)}")


def _rule_equiv(args, same):
    _arity(args, 2, 'equiv')
    first, second = args
    _shape(first, Implies, 'equiv', 'a conditional first')
    _shape(second, Implies, 'equiv', 'a conditional second')
    if not (same(first.left, second.right) and same(first.right, second.left)):
        raise _Malformed("equiv: conditionals are not converses")
    return Iff(first.left, first.right), list(args)


def _rule_left_iff(args, same):
    _arity(args, 1, 'left-iff')
    _shape(args[0], Iff, 'left-iff', 'a biconditional')
    return Implies(args[0].left, args[0].right), [args[0]]


def _rule_right_iff(args, same):
    _arity(args, 1, 'right-iff')
    _shape(args[0], Iff, 'right-iff', 'a biconditional')
    return Implies(args[0].right, args[0].left), [args[0]]


def _rule_absurd(args, same):
    _arity(args, 2, 'absurd')
    if not same(args[1], Not(args[0])):
        raise _Malformed(f"absurd: {show_formula(args[1])} is not the negation of {show_formula(args[0])}")
    return FALSE, list(args)


def _rule_from_false(args, same):
    _arity(args, 1, 'from-false')
    return args[0], [FALSE]


def _rule_by_contradiction(args, same):
    _arity(args, 2, 'by-contradiction')
    target, cond = args
    _shape(cond, Implies, 'by-contradiction', 'a conditional second')
    if cond.right != FALSE:
        raise _Malformed("by-contradiction: the conditional must have consequent false")
    if same(cond.left, Not(target)) or (isinstance(target, Not) and same(cond.left, target.arg)):
        return target, [cond]
    raise _Malformed(f"by-contradiction: {show_formula(cond)} does not refute the complement of {show_formula(target)}")


def _rule_ex_middle(args, same):
    _arity(args, 1, 'ex-middle')
    return Or(args[0], Not(args[0])), []


def _rule_from_complements(args, same):
    _arity(args, 3, 'from-complements')
    target, p, q = args
    if not (complements(p, q) or (same is not _same and (same(q, Not(p)) or same(p, Not(q))))):
        raise _Malformed(f"from-complements: {show_formula(p)} and {show_formula(q)} are not complements")
    return target, [p, q]


RULES = {
    'claim': _rule_claim,
    'mp': _rule_mp,
    'mt': _rule_mt,
    'both': _rule_both,
    'left-and': _rule_left_and,
    'right-and': _rule_right_and,
    'left-either': _rule_left_either,
    'right-either': _rule_right_either,
    'cases': _rule_cases,
    'cd': _rule_cd,
    'dn': _rule_dn,
    'dm': _rule_dm,
    'dsyl': _rule_dsyl,
    'cond-def': _rule_cond_def,
    'neg-cond-def': _rule_neg_cond_def,
    'bicond-def': _rule_bicond_def,
    'equiv': _rule_equiv,
    'left-iff': _rule_left_iff,
    'right-iff': _rule_right_iff,
    'absurd': _rule_absurd,
    'from-false': _rule_from_false,
    'by-contradiction': _rule_by_contradiction,
    'ex-middle': _rule_ex_middle,
    'from-complements': _rule_from_complements,
}


def apply_rule(rule: str, args: Sequence[Formula], base: AssumptionBase,
               same: Same = _same,
               member: Optional[Callable[[Formula, AssumptionBase], bool]] = None
               ) -> Union[Formula, NdlError]:
    """
    Apply one catalog rule to evaluated arguments

    Args:
        rule: Rule name (e.g. 'mp')
        args: Evaluated argument formulas
        base: Current assumption base
        same: Formula comparison used for shape side-conditions
        member: Membership test (defaults to literal set membership)

    Returns:
        The conclusion, or an NdlError (malformedRuleApp / notInAB)
    """
    member = member or in_base
    impl = RULES.get(rule)
    if impl is None:
        return NdlError('malformedRuleApp', detail=f"Unknown rule '{rule}'", rule=rule,
                        evaluated_args=list(args))
    try:
        conclusion, required = impl(list(args), same)
    except _Malformed as e:
        return NdlError('malformedRuleApp', detail=str(e), rule=rule, evaluated_args=list(args))
    for f in required:
        if not member(f, base):
            return NdlError('notInAB', detail=f"{show_formula(f)} is not in the assumption base",
                            rule=rule, evaluated_args=list(args), missing=f)
    return conclusion


def in_base(f: Formula, base: AssumptionBase) -> bool:
    return f == TRUE or f in base


# ============================================================================
# EVALUATOR
# ============================================================================

def looks_like_name(name: str) -> bool:
    """Identifiers that read as proof names rather than atoms (premise-1, A_and_B, hyp)"""
    return '-' in name or '_' in name or name[0].islower()


class NdlEvaluator:
    """
    Interpreter for NDL deductions

    Subclasses override the hook methods (member, apply, check_annotation,
    check_hypothesis) to relax the strict semantics.

    Args:
        vocabulary: Atom names of the problem; identifiers outside it that
            look like names are reported as unbound
        record_trace: Keep a TraceEntry for every rule application
    """

    def __init__(self, vocabulary: Optional[Sequence[str]] = None, record_trace: bool = False):
        self.vocabulary = set(vocabulary or [])
        self.record_trace = record_trace
        self.trace: List[TraceEntry] = []
        self.step_counter = 0

    # ---------------- entry points ----------------

    def run(self, proof, base: AssumptionBase, env: Optional[Environment] = None) -> NdlVerdict:
        env = dict(env or {})
        self.vocabulary |= set(atoms_of(list(base) + list(env.values())))
        try:
            return NdlVerdict(conclusion=self.eval(proof, frozenset(base), env))
        except ProofAbort as abort:
            return NdlVerdict(error=abort.error)

    def eval(self, proof, base: AssumptionBase, env: Environment) -> Formula:
        if isinstance(proof, RuleApp):
            return self.eval_rule(proof, base, env)
        if isinstance(proof, ByAnnotated):
            return self.eval_annotated(proof, base, env)
        if isinstance(proof, Assume):
            return self.eval_assume(proof, base, env)
        if isinstance(proof, Compose):
            return self.eval_compose(proof, base, env)
        raise TypeError(f"Not a deduction: {proof!r}")

    # ---------------- proof forms ----------------

    def eval_rule(self, node: RuleApp, base: AssumptionBase, env: Environment) -> Formula:
        self.step_counter += 1
        step = self.step_counter
        args = [self.resolve(a, env, node) for a in node.args]
        conclusion = self.apply(node, args, base, step)
        if self.record_trace:
            self.trace.append(TraceEntry(node, args, conclusion, base, step))
        return conclusion

    def eval_annotated(self, node: ByAnnotated, base: AssumptionBase, env: Environment) -> Formula:
        claimed = self.resolve(node.claimed, env, node)
        actual = self.eval(node.proof, base, env)
        return self.check_annotation(node, claimed, actual, base)

    def eval_assume(self, node: Assume, base: AssumptionBase, env: Environment) -> Formula:
        self.step_counter += 1
        hypothesis = self.check_hypothesis(node, env)
        inner_env = dict(env)
        if node.name:
            inner_env[node.name] = hypothesis
        body = self.eval(node.body, base | {hypothesis}, inner_env)
        return Implies(hypothesis, body)

    def eval_compose(self, node: Compose, base: AssumptionBase, env: Environment) -> Formula:
        current_base = base
        current_env = dict(env)
        conclusion = None
        for step in node.steps:
            conclusion = self.eval(step.proof, current_base, current_env)
            current_base = current_base | {conclusion}
            if step.name:
                current_env[step.name] = conclusion
        return conclusion

    # ---------------- hooks ----------------

    def fail(self, kind: str, node, **details):
        error = NdlError(kind, line=getattr(node, 'line', 0), column=getattr(node, 'column', 0),
                         step=self.step_counter, **details)
        raise ProofAbort(error)

    def resolve(self, f: Formula, env: Environment, node) -> Formula:
        """Substitute bound names; report identifiers that are names but unbound"""
        for name in atoms_of([f]):
            if name not in env and name not in self.vocabulary and looks_like_name(name):
                self.fail('unboundIdentifier', node, detail=f"Unbound identifier {name}",
                          rule=getattr(node, 'rule', None), args=list(getattr(node, 'args', [])))
        return substitute(f, env)

    def check_hypothesis(self, node: Assume, env: Environment) -> Formula:
        hypothesis = node.hypothesis
        if isinstance(hypothesis, Atom) and hypothesis.name not in env \
                and hypothesis.name not in self.vocabulary and looks_like_name(hypothesis.name):
            self.fail('malformedAssumption', node,
                      detail=f"Hypothesis {hypothesis.name} is a name, not a formula")
        return self.resolve(hypothesis, env, node)

    def member(self, f: Formula, base: AssumptionBase) -> bool:
        return in_base(f, base)

    def apply(self, node: RuleApp, args: List[Formula], base: AssumptionBase, step: int) -> Formula:
        result = apply_rule(node.rule, args, base, member=self.member)
        if isinstance(result, NdlError):
            self.fail(result.kind, node, detail=result.detail, rule=node.rule, args=list(node.args),
                      evaluated_args=args, missing=result.missing)
        return result

    def check_annotation(self, node: ByAnnotated, claimed: Formula, actual: Formula,
                         base: AssumptionBase) -> Formula:
        if claimed != actual:
            self.fail('wrongConclusion', node, expected=claimed, actual=actual,
                      detail=f"Advertised {show_formula(claimed)} but derived {show_formula(actual)}")
        return actual


def eval_proof(proof, base: Sequence[Formula], env: Optional[Environment] = None) -> NdlVerdict:
    """Evaluate a deduction in an assumption base and environment"""
    return NdlEvaluator().run(proof, frozenset(base), env)


# ============================================================================
# ARGUMENT CHECKING
# ============================================================================

NamedFormulas = Sequence[Tuple[str, Formula]]


@dataclass
class CheckReport:
    verdict: NdlVerdict
    conclusion_matches_goal: bool
    error: Optional[NdlError] = None

    @property
    def success(self) -> bool:
        return self.error is None and self.conclusion_matches_goal


def _premise_scope(premises: NamedFormulas, script: ProofScript, allow_asserts: bool
                   ) -> Tuple[AssumptionBase, Environment, Optional[NdlError]]:
    base = {f for _, f in premises}
    env = {name: f for name, f in premises if name}
    given = set(base)
    for item in script.asserts:
        if not allow_asserts and item.formula not in given:
            return frozenset(base), env, NdlError(
                'notInAB', line=item.line, missing=item.formula,
                detail=f"Assertion of {show_formula(item.formula)}, which is not a premise")
        base.add(item.formula)
        if item.name:
            env[item.name] = item.formula
    return frozenset(base), env, None


def check_script(premises: NamedFormulas, goal: Formula, script: ProofScript,
                 evaluator: NdlEvaluator, allow_asserts: bool = False) -> CheckReport:
    """Evaluate a parsed script with a given evaluator and compare to the goal"""
    base, env, error = _premise_scope(premises, script, allow_asserts)
    if error is not None:
        return CheckReport(NdlVerdict(error=error), False, error)
    if script.body is None:
        error = NdlError('wrongConclusion', detail='Empty proof', expected=goal)
        return CheckReport(NdlVerdict(error=error), False, error)
    evaluator.vocabulary |= set(atoms_of([goal]))
    verdict = evaluator.run(script.body, base, env)
    if not verdict.ok:
        return CheckReport(verdict, False, verdict.error)
    if verdict.conclusion != goal:
        error = NdlError('wrongConclusion', line=0, expected=goal, actual=verdict.conclusion,
                         detail=f"Proof derives {show_formula(verdict.conclusion)}, not the goal {show_formula(goal)}")
        return CheckReport(verdict, False, error)
    return CheckReport(verdict, True, None)


def run_script(script: ProofScript, premises: NamedFormulas = (),
               evaluator: Optional[NdlEvaluator] = None) -> NdlVerdict:
    """Evaluate a script with no goal; its assert lines join the assumption base"""
    evaluator = evaluator or NdlEvaluator()
    base, env, _ = _premise_scope(premises, script, allow_asserts=True)
    if script.body is None:
        return NdlVerdict(error=NdlError('wrongConclusion', detail='Empty proof'))
    return evaluator.run(script.body, base, env)


def check_argument(premises: NamedFormulas, goal: Formula, proof_text: str) -> CheckReport:
    """
    Strict check of a proof of goal from named premises

    Returns:
        CheckReport; success requires the exact goal as conclusion. A goal
        mismatch is a whole-proof wrongConclusion at line 0.
    """
    try:
        script = parse_proof(proof_text)
    except ProofSyntaxError as e:
        error = NdlError('parsing', line=e.line, column=e.column, detail=str(e))
        logger.debug(f"[X] NDL parse failure: {e}")
        return CheckReport(NdlVerdict(error=error), False, error)
    report = check_script(premises, goal, script, NdlEvaluator())
    tag = '[OK]' if report.success else '[X]'
    logger.debug(f"{tag} NDL check for goal {show_formula(goal)}")
    return report


def number_premises(formulas: Sequence[Formula]) -> List[Tuple[str, Formula]]:
    """Name premises premise-1, premise-2, ..."""
    return [(f"premise-{k + 1}", f) for k, f in enumerate(formulas)]
