"""
Hilbert Calculus Checker

Three axiom schemas over ~ and ==> with modus ponens as the only rule:
- Axiom 1: (p ==> (q ==> p))
- Axiom 2: ((p ==> (q ==> r)) ==> ((p ==> q) ==> (p ==> r)))
- Axiom 3: ((~p ==> ~q) ==> ((~p ==> q) ==> p))

Features:
- Named, justified lines: axiom instances, premise citations, mp on two names
- Strict checking, plus a lenient mode with a fixed set of logged repairs
  (right-end parentheses, minimal parenthesization, semicolons, BY case,
  flipped mp arguments)
- Deduction-theorem compilation: discharge a premise into a conditional

Usage:
    report = check_hilbert(premises, goal, proof_text, lenient=True)
    compiled = deduction_compile(premises, 'premise-2', parse_hilbert(proof_text))
"""

import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

try:
    from .config import HILBERT_COMPILE_SLACK
    from .errors import ProofSyntaxError
    from .formula import (
        Atom, Binary, Formula, Implies, Not, TokenStream, parse_formula, parse_formula_tokens,
        show_formula, substitute, to_neg_imp, tokenize,
    )
    from .instrumented_checker import balance_right_parens
    from .ndl_engine import NamedFormulas, looks_like_name
except ImportError:
    from config import HILBERT_COMPILE_SLACK
    from errors import ProofSyntaxError
    from formula import (
        Atom, Binary, Formula, Implies, Not, TokenStream, parse_formula, parse_formula_tokens,
        show_formula, substitute, to_neg_imp, tokenize,
    )
    from instrumented_checker import balance_right_parens
    from ndl_engine import NamedFormulas, looks_like_name

logger = logging.getLogger(__name__)

_P, _Q, _R = Atom('p'), Atom('q'), Atom('r')

AXIOM_SCHEMAS: Dict[int, Formula] = {
    1: Implies(_P, Implies(_Q, _P)),
    2: Implies(Implies(_P, Implies(_Q, _R)), Implies(Implies(_P, _Q), Implies(_P, _R))),
    3: Implies(Implies(Not(_P), Not(_Q)), Implies(Implies(Not(_P), _Q), _P)),
}

_AXIOM_RE = re.compile(r'^axiom-(\d+)$', re.IGNORECASE)


# ============================================================================
# AST
# ============================================================================

@dataclass(frozen=True)
class HilbertLine:
    """
    One justified line

    kind is 'axiom' (axiom_id set), 'premise' (premise names the cited
    premise) or 'mp' (major and minor name earlier lines or premises).
    """
    name: str
    kind: str
    formula: Optional[Formula] = None
    axiom_id: Optional[int] = None
    premise: Optional[str] = None
    major: Optional[str] = None
    minor: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class HilbertProof:
    lines: Tuple[HilbertLine, ...]

    def __len__(self):
        return len(self.lines)


@dataclass
class HilbertReport:
    """
    Result of checking a Hilbert proof

    error is one of syntax, failedAxiom, failedMP, undefinedStepName,
    wrongConclusion (None on success); reason refines failedMP.
    """
    success: bool
    error: Optional[str] = None
    line: int = 0
    reason: Optional[str] = None
    detail: str = ''
    repairs: List[str] = field(default_factory=list)
    conclusion: Optional[Formula] = None

    def to_record(self) -> Dict:
        return {
            'success': self.success,
            'errorType': self.error,
            'line': self.line,
            'reason': self.reason,
            'detail': self.detail,
            'repairs': list(self.repairs),
        }


# ============================================================================
# AXIOM MATCHING
# ============================================================================

def _match(pattern: Formula, f: Formula, binding: Dict[str, Formula]) -> bool:
    if isinstance(pattern, Atom):
        bound = binding.get(pattern.name)
        if bound is None:
            binding[pattern.name] = f
            return True
        return bound == f
    if type(pattern) is not type(f):
        return False
    if isinstance(pattern, Not):
        return _match(pattern.arg, f.arg, binding)
    return _match(pattern.left, f.left, binding) and _match(pattern.right, f.right, binding)


def match_axiom(axiom_id: int, f: Formula) -> Optional[Dict[str, Formula]]:
    """
    Match a formula against an axiom schema

    Returns:
        Metavariable assignment (names p, q, r) or None
    """
    pattern = AXIOM_SCHEMAS.get(axiom_id)
    if pattern is None:
        return None
    binding: Dict[str, Formula] = {}
    return binding if _match(pattern, f, binding) else None


def axiom_instance(axiom_id: int, **binding: Formula) -> Formula:
    """Instantiate a schema, e.g. axiom_instance(1, p=A, q=B)"""
    return substitute(AXIOM_SCHEMAS[axiom_id], binding)


# ============================================================================
# PARSER
# ============================================================================

class HilbertParser:
    """
    Parser for Hilbert listings

    Grammar:
        proof := ['{'] line ([';'] line)* [';'] ['}']
        line  := name ':=' ( 'axiom-N' 'on' formula
                           | premise-name
                           | formula 'BY' 'mp' 'on' name ',' name )

    Args:
        text: Listing text
        lenient: Accept minimal parenthesization and lowercase 'by', logging
            each acceptance into repairs
    """

    def __init__(self, text: str, lenient: bool = False, repairs: Optional[List[str]] = None):
        self.stream = TokenStream(tokenize(text), error_cls=ProofSyntaxError)
        self.lenient = lenient
        self.repairs = repairs if repairs is not None else []
        for token in self.stream.tokens:
            if token.kind == 'error':
                raise ProofSyntaxError(f"Illegal character '{token.text}'", offset=token.offset,
                                       line=token.line, column=token.column)

    def parse(self) -> HilbertProof:
        stream = self.stream
        wrapped = stream.accept('{')
        lines = []
        while not self._at_end(wrapped):
            lines.append(self.parse_line())
            stream.accept(';')
        if wrapped:
            stream.expect('}')
        if stream.peek().kind != 'eof':
            stream.fail(f"Unexpected {stream.describe(stream.peek())}", expected='end of proof')
        return HilbertProof(tuple(lines))

    def _at_end(self, wrapped: bool) -> bool:
        token = self.stream.peek()
        return token.kind == 'eof' or (wrapped and self.stream.at('}'))

    def _at_line_break(self, ahead: int) -> bool:
        stream = self.stream
        token = stream.peek(ahead)
        if token.kind == 'eof' or stream.at(';', ahead) or stream.at('}', ahead):
            return True
        return token.kind == 'ident' and stream.at(':=', ahead + 1)

    def parse_line(self) -> HilbertLine:
        stream = self.stream
        token = stream.peek()
        if token.kind != 'ident':
            stream.fail(f"Unexpected {stream.describe(token)}", expected='a line name')
        name = stream.next().text
        stream.expect(':=')

        head = stream.peek()
        axiom = _AXIOM_RE.match(head.text) if head.kind == 'ident' else None
        if axiom and stream.peek(1).kind == 'ident' and stream.peek(1).text.lower() == 'on':
            stream.next()
            stream.next()
            formula = self._formula()
            return HilbertLine(name, 'axiom', formula, axiom_id=int(axiom.group(1)), line=token.line)

        if head.kind == 'ident' and looks_like_name(head.text) and self._at_line_break(1):
            stream.next()
            return HilbertLine(name, 'premise', premise=head.text, line=token.line)

        formula = self._formula()
        by = stream.peek()
        if not stream.at_keyword('by'):
            stream.fail(f"Unexpected {stream.describe(by)}", expected="'BY'")
        if by.text != 'BY':
            if not self.lenient:
                stream.fail(f"Keyword '{by.text}' must be written BY", expected="'BY'")
            self.repairs.append(f"line {by.line}: normalized '{by.text}' to 'BY'")
        stream.next()
        if not stream.at_keyword('mp'):
            stream.fail(f"Unexpected {stream.describe(stream.peek())}", expected="'mp'")
        stream.next()
        if not stream.at_keyword('on'):
            stream.fail(f"Unexpected {stream.describe(stream.peek())}", expected="'on'")
        stream.next()
        major = self._name()
        stream.expect(',')
        minor = self._name()
        return HilbertLine(name, 'mp', formula, major=major, minor=minor, line=token.line)

    def _name(self) -> str:
        token = self.stream.peek()
        if token.kind != 'ident':
            self.stream.fail(f"Unexpected {self.stream.describe(token)}", expected='a line name')
        return self.stream.next().text

    def _formula(self) -> Formula:
        stream = self.stream
        start = stream.pos
        formula = parse_formula_tokens(stream)
        if isinstance(formula, Binary) and not self._wrapped(start, stream.pos):
            token = stream.tokens[start]
            if not self.lenient:
                raise ProofSyntaxError("Binary formula without enclosing parentheses", offset=token.offset,
                                       expected="'('", line=token.line, column=token.column)
            self.repairs.append(f"line {token.line}: accepted minimal parenthesization of {show_formula(formula)}")
        return formula

    def _wrapped(self, start: int, end: int) -> bool:
        tokens = self.stream.tokens
        if not (tokens[start].text == '(' and tokens[end - 1].text == ')'):
            return False
        depth = 0
        for k in range(start, end):
            if tokens[k].text == '(':
                depth += 1
            elif tokens[k].text == ')':
                depth -= 1
                if depth == 0:
                    return k == end - 1
        return False


def _lenient_text(text: str, repairs: List[str]) -> str:
    lines = text.split('\n')
    for k, line in enumerate(lines):
        code, hash_sign, comment = line.partition('#')
        if re.search(r';\s*;', code):
            code = re.sub(r';(\s*;)+', ';', code)
            repairs.append(f"line {k + 1}: removed duplicated semicolon")
        code, delta = balance_right_parens(code)
        if delta:
            repairs.append(f"line {k + 1}: balanced {abs(delta)} parenthesis(es) at the right end")
        lines[k] = code + hash_sign + comment
    return '\n'.join(lines)


def parse_hilbert(text: str, lenient: bool = False, repairs: Optional[List[str]] = None) -> HilbertProof:
    """
    Parse a Hilbert listing

    Raises:
        ProofSyntaxError: with line and column of the offending token
    """
    if lenient:
        repairs = repairs if repairs is not None else []
        text = _lenient_text(text, repairs)
    return HilbertParser(text, lenient=lenient, repairs=repairs).parse()


def print_hilbert(proof: HilbertProof, indent: str = '  ') -> str:
    """Render a proof in listing layout"""
    rendered = []
    for line in proof.lines:
        if line.kind == 'axiom':
            body = f"axiom-{line.axiom_id} on {show_formula(line.formula)}"
        elif line.kind == 'premise':
            body = line.premise
        else:
            body = f"{show_formula(line.formula)} BY mp on {line.major}, {line.minor}"
        rendered.append(f"{indent}{line.name} := {body}")
    return '{\n' + ';\n'.join(rendered) + '\n}\n'


# ============================================================================
# CHECKER
# ============================================================================

def _mp_failure(major: Formula, minor: Formula, conclusion: Formula) -> Optional[str]:
    if not isinstance(major, Implies):
        return 'major-not-conditional'
    if major.left != minor:
        return 'antecedent-mismatch'
    if major.right != conclusion:
        return 'consequent-mismatch'
    return None


def _check_lines(premises: NamedFormulas, goal: Optional[Formula], proof: HilbertProof, lenient: bool,
                 repairs: List[str]) -> HilbertReport:
    premise_map = {name: f for name, f in premises}
    known: Dict[str, Formula] = {}

    def lookup(name: str) -> Optional[Formula]:
        return known.get(name, premise_map.get(name))

    for line in proof.lines:
        if line.name in known:
            return HilbertReport(False, 'syntax', line.line, detail=f"Duplicate line name {line.name}",
                                 repairs=repairs)

        if line.kind == 'axiom':
            if match_axiom(line.axiom_id, line.formula) is None:
                return HilbertReport(False, 'failedAxiom', line.line, repairs=repairs,
                                     detail=f"{show_formula(line.formula)} is not an instance of axiom {line.axiom_id}")
            known[line.name] = line.formula

        elif line.kind == 'premise':
            if line.premise not in premise_map:
                return HilbertReport(False, 'undefinedStepName', line.line, repairs=repairs,
                                     detail=f"No premise named {line.premise}")
            known[line.name] = premise_map[line.premise]

        else:
            major, minor = lookup(line.major), lookup(line.minor)
            if major is None or minor is None:
                missing = line.major if major is None else line.minor
                return HilbertReport(False, 'failedMP', line.line, reason='unknown-name', repairs=repairs,
                                     detail=f"mp cites undefined name {missing}")
            reason = _mp_failure(major, minor, line.formula)
            if reason is not None and lenient and _mp_failure(minor, major, line.formula) is None:
                repairs.append(f"line {line.line}: swapped flipped mp arguments {line.major}, {line.minor}")
                reason = None
            if reason is not None:
                return HilbertReport(False, 'failedMP', line.line, reason=reason, repairs=repairs,
                                     detail=f"mp on {line.major}, {line.minor} does not yield {show_formula(line.formula)}")
            known[line.name] = line.formula

    if not proof.lines:
        return HilbertReport(False, 'wrongConclusion', 0, detail='No proof lines', repairs=repairs)
    conclusion = known[proof.lines[-1].name]
    if goal is not None and conclusion != goal:
        return HilbertReport(False, 'wrongConclusion', proof.lines[-1].line, repairs=repairs, conclusion=conclusion,
                             detail=f"Last line is {show_formula(conclusion)}, not the goal {show_formula(goal)}")
    return HilbertReport(True, repairs=repairs, conclusion=conclusion)


def check_hilbert(premises: NamedFormulas, goal: Optional[Formula], proof: Union[str, HilbertProof],
                  lenient: bool = False) -> HilbertReport:
    """
    Check a Hilbert proof of goal from named premises

    Args:
        premises: (name, formula) pairs, citable by name
        goal: Formula the last line must state; None accepts any last line
        proof: Listing text or parsed proof
        lenient: Apply the repair set, logging each repair

    Returns:
        HilbertReport (lenient acceptance includes strict acceptance)
    """
    repairs: List[str] = []
    if isinstance(proof, str):
        try:
            proof = parse_hilbert(proof, lenient=lenient, repairs=repairs)
        except ProofSyntaxError as e:
            logger.debug(f"[X] Hilbert parse failure: {e}")
            return HilbertReport(False, 'syntax', e.line, detail=str(e), repairs=repairs)

    report = _check_lines(premises, goal, proof, lenient, repairs)
    for repair in report.repairs:
        logger.debug(f"[REPAIR] {repair}")
    tag = '[OK]' if report.success else '[X]'
    target = show_formula(goal) if goal is not None else '(any)'
    logger.debug(f"{tag} Hilbert check for goal {target} ({'lenient' if lenient else 'strict'})")
    return report


# ============================================================================
# DEDUCTION THEOREM
# ============================================================================

class _Compiler:
    def __init__(self, hypothesis: Formula):
        self.h = hypothesis
        self.lines: List[HilbertLine] = []
        self.proved: Dict[Formula, str] = {}

    def emit(self, kind: str, formula: Formula, **fields) -> str:
        name = f"d{len(self.lines) + 1}"
        self.lines.append(HilbertLine(name, kind, formula, **fields))
        return name

    def mp(self, major: str, minor: str) -> str:
        major_f = self.lines[int(major[1:]) - 1].formula
        return self.emit('mp', major_f.right, major=major, minor=minor)

    def identity(self) -> str:
        h = self.h
        hh = Implies(h, h)
        s = self.emit('axiom', axiom_instance(2, p=h, q=hh, r=h), axiom_id=2)
        k1 = self.emit('axiom', axiom_instance(1, p=h, q=hh), axiom_id=1)
        step = self.mp(s, k1)
        k2 = self.emit('axiom', axiom_instance(1, p=h, q=h), axiom_id=1)
        return self.mp(step, k2)

    def weaken(self, fact: str, formula: Formula) -> str:
        k = self.emit('axiom', axiom_instance(1, p=formula, q=self.h), axiom_id=1)
        return self.mp(k, fact)

    def conditioned(self, formula: Formula, source: Optional[HilbertLine], premise: Optional[str] = None) -> str:
        """Name of a line proving (h ==> formula)"""
        if formula in self.proved:
            return self.proved[formula]
        if formula == self.h:
            name = self.identity()
        elif premise is not None:
            name = self.weaken(self.emit('premise', formula, premise=premise), formula)
        elif source.kind == 'axiom':
            name = self.weaken(self.emit('axiom', formula, axiom_id=source.axiom_id), formula)
        else:
            raise ValueError(f"No derivation for {show_formula(formula)}")
        self.proved[formula] = name
        return name


def deduction_compile(premises: NamedFormulas, hypothesis: str, proof: HilbertProof) -> HilbertProof:
    """
    Discharge one premise of a strictly valid proof

    Args:
        premises: Named premises of the input proof, including the hypothesis
        hypothesis: Name of the premise h to discharge
        proof: Proof of p from premises

    Returns:
        Proof of (h ==> p) from the remaining premises, within 3*n plus a
        constant lines for n input lines and directly cited premises

    Raises:
        ValueError: if the input proof does not check strictly
    """
    premise_map = {name: f for name, f in premises}
    if hypothesis not in premise_map:
        raise ValueError(f"No premise named {hypothesis}")
    if not proof.lines:
        raise ValueError("Cannot discharge a hypothesis from an empty proof")
    goal = proof.lines[-1].formula
    if goal is None and proof.lines[-1].kind == 'premise':
        goal = premise_map.get(proof.lines[-1].premise)
    report = check_hilbert(premises, goal, proof)
    if not report.success:
        raise ValueError(f"Input proof does not check: {report.detail}")

    h = premise_map[hypothesis]
    compiler = _Compiler(h)
    formulas: Dict[str, Formula] = {}

    def resolve(name: str) -> str:
        if name in formulas:
            return compiler.proved[formulas[name]]
        formula = premise_map[name]
        return compiler.conditioned(formula, None, premise=name if name != hypothesis else None)

    for line in proof.lines:
        if line.kind == 'premise':
            formula = premise_map[line.premise]
            compiler.conditioned(formula, line, premise=line.premise if line.premise != hypothesis else None)
        elif line.kind == 'axiom':
            formula = line.formula
            compiler.conditioned(formula, line)
        else:
            formula = line.formula
            if formula not in compiler.proved:
                major = resolve(line.major)
                minor = resolve(line.minor)
                minor_f = formulas.get(line.minor, premise_map.get(line.minor))
                s = compiler.emit('axiom', axiom_instance(2, p=h, q=minor_f, r=formula), axiom_id=2)
                step = compiler.mp(s, major)
                compiler.proved[formula] = compiler.mp(step, minor)
        formulas[line.name] = formula

    final = compiler.proved[goal]
    compiled = list(compiler.lines)
    final_index = int(final[1:]) - 1
    if final_index != len(compiled) - 1:
        last = compiled[final_index]
        compiled.append(HilbertLine(f"d{len(compiled) + 1}", last.kind, last.formula, axiom_id=last.axiom_id,
                                    premise=last.premise, major=last.major, minor=last.minor))
    result = HilbertProof(tuple(compiled))

    remaining = [(name, f) for name, f in premises if name != hypothesis]
    check = check_hilbert(remaining, Implies(h, goal), result)
    if not check.success:
        raise ValueError(f"Compiled proof failed to check: {check.detail}")
    logger.debug(f"[OK] Discharged {hypothesis}: {len(proof)} lines -> {len(result)} lines "
                 f"(slack {HILBERT_COMPILE_SLACK})")
    return result


# ============================================================================
# THEOREMS
# ============================================================================

def hilbert_theorems() -> List[Formula]:
    """Hand-picked textbook tautologies, desugared to ~ and ==>"""
    texts = ['((~A ==> A) ==> A)', '(A ==> (~A ==> B))', '(A ==> ~~A)', '(A | ~A)', '(~~A ==> A)']
    return [to_neg_imp(parse_formula(t)) for t in texts]
