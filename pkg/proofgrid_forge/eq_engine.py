"""
Equational Rewriting Engine

First-order term machinery and proof checking for chains of identities:
- Terms (variables, constants, function applications), Dewey positions,
  subterm access and replacement, matching and substitution
- One-step rewriting and simultaneous multi-rewrites at disjoint positions
- Gold verdicts for equational proofs with per-step witnesses and
  first-error diagnosis (contractum or equation records)
- Equation recovery for citation-free proofs
- Gap-fill verification and a fillability oracle (symbol pre-filter plus
  bounded breadth-first search)
- Seeded proof corruption with engine-verified ground truth

Conventions: variables start with an upper-case letter, function symbols and
constants with a lower-case letter; f*, g*, h*, r* symbols have arities 1-4.
"""

import itertools
import logging
import random
import re
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

try:
    from .config import ER_MAX_SET_SIZE, GEN_MAX_RETRIES, GF_GAP_MARKER, GF_MAX_CITED, GF_SEARCH_BUDGET
    from .errors import CitationCapExceeded, GenerationExhausted, InvalidPosition, TermSyntaxError, TermTypeError
except ImportError:
    from config import ER_MAX_SET_SIZE, GEN_MAX_RETRIES, GF_GAP_MARKER, GF_MAX_CITED, GF_SEARCH_BUDGET
    from errors import CitationCapExceeded, GenerationExhausted, InvalidPosition, TermSyntaxError, TermTypeError

logger = logging.getLogger(__name__)

Position = Tuple[int, ...]

CONSTANTS = ('a', 'b', 'c', 'd', 'e')
FAMILY_ARITY = {'f': 1, 'g': 2, 'h': 3, 'r': 4}


# ============================================================================
# TERMS
# ============================================================================

@dataclass(frozen=True)
class Term:
    def __str__(self):
        return print_term(self)


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Constant(Term):
    name: str


@dataclass(frozen=True)
class App(Term):
    symbol: str
    args: Tuple[Term, ...]


Substitution = Dict[str, Term]


def print_term(t: Term) -> str:
    if isinstance(t, App):
        return f"{t.symbol}({','.join(print_term(a) for a in t.args)})"
    return t.name


def root_symbol(t: Term) -> Tuple[str, int]:
    if isinstance(t, App):
        return t.symbol, len(t.args)
    return t.name, 0


def conventional_arity(symbol: str) -> Optional[int]:
    """Arity implied by the f/g/h/r naming convention, if the symbol follows it"""
    match = re.fullmatch(r'([fghr])\d*', symbol)
    return FAMILY_ARITY[match.group(1)] if match else None


_TERM_TOKEN = re.compile(r'\s*(?:(?P<ident>[A-Za-z][A-Za-z0-9_]*)|(?P<sym>[(),])|(?P<error>\S))')


class _TermParser:
    def __init__(self, text: str, arities: Optional[Dict[str, int]]):
        self.text = text
        self.arities = arities
        self.tokens = []
        position = 0
        while position < len(text):
            match = _TERM_TOKEN.match(text, position)
            if match is None:
                break
            if match.group('error'):
                raise TermSyntaxError(f"Unexpected character '{match.group('error')}' in {text!r}")
            self.tokens.append(match.group('ident') or match.group('sym'))
            position = match.end()
        self.pos = 0

    def peek(self) -> Optional[str]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        token = self.peek()
        if token is None:
            raise TermSyntaxError(f"Unbalanced parentheses or truncated term in {self.text!r}")
        self.pos += 1
        return token

    def parse(self) -> Term:
        term = self.term()
        if self.peek() is not None:
            raise TermSyntaxError(f"Unexpected '{self.peek()}' after a complete term in {self.text!r}")
        return term

    def term(self) -> Term:
        token = self.take()
        if token in '(),':
            raise TermSyntaxError(f"Unexpected '{token}' in {self.text!r}")
        if token[0].isupper():
            if self.peek() == '(':
                raise TermSyntaxError(f"Variable {token} applied to arguments in {self.text!r}")
            return Var(token)
        if self.peek() != '(':
            expected = self._arity(token)
            if expected not in (None, 0):
                raise TermTypeError(f"{token} expects {expected} arguments, got 0")
            return Constant(token)
        self.take()
        args = [self.term()]
        while self.peek() == ',':
            self.take()
            args.append(self.term())
        if self.take() != ')':
            raise TermSyntaxError(f"Unbalanced parentheses in {self.text!r}")
        expected = self._arity(token)
        if expected is not None and expected != len(args):
            raise TermTypeError(f"{token} expects {expected} arguments, got {len(args)}")
        return App(token, tuple(args))

    def _arity(self, symbol: str) -> Optional[int]:
        if self.arities is not None and symbol in self.arities:
            return self.arities[symbol]
        if symbol in CONSTANTS:
            return 0
        return conventional_arity(symbol)


def parse_term(text: str, arities: Optional[Dict[str, int]] = None) -> Term:
    """
    Parse a term such as g(f(a),X)

    Raises:
        TermSyntaxError: unbalanced parentheses or stray tokens
        TermTypeError: a symbol applied to the wrong number of arguments
    """
    if text.count('(') != text.count(')'):
        raise TermSyntaxError(f"Unbalanced parentheses in {text!r}")
    return _TermParser(text.strip(), arities).parse()


def signature(terms: Iterable[Term]) -> Dict[str, int]:
    """Symbol arities occurring in the given terms"""
    arities: Dict[str, int] = {}
    stack = list(terms)
    while stack:
        t = stack.pop()
        if isinstance(t, App):
            arities.setdefault(t.symbol, len(t.args))
            stack.extend(t.args)
        elif isinstance(t, Constant):
            arities.setdefault(t.name, 0)
    return arities


def function_symbols(t: Term) -> Set[str]:
    symbols = set()
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, App):
            symbols.add(u.symbol)
            stack.extend(u.args)
        elif isinstance(u, Constant):
            symbols.add(u.name)
    return symbols


def term_size(t: Term) -> int:
    if isinstance(t, App):
        return 1 + sum(term_size(a) for a in t.args)
    return 1


# ============================================================================
# POSITIONS
# ============================================================================

def positions(t: Term) -> List[Position]:
    """dom(t) in pre-order, root first"""
    result = [()]
    if isinstance(t, App):
        for k, arg in enumerate(t.args, 1):
            result.extend((k,) + p for p in positions(arg))
    return result


def subterm(t: Term, pos: Sequence[int]) -> Term:
    current = t
    for index in pos:
        if not isinstance(current, App) or not 1 <= index <= len(current.args):
            raise InvalidPosition(pos)
        current = current.args[index - 1]
    return current


def is_valid_position(t: Term, pos: Sequence[int]) -> bool:
    try:
        subterm(t, pos)
        return True
    except InvalidPosition:
        return False


def replace(t: Term, pos: Sequence[int], s: Term) -> Term:
    if not pos:
        return s
    if not isinstance(t, App) or not 1 <= pos[0] <= len(t.args):
        raise InvalidPosition(pos)
    k = pos[0] - 1
    args = list(t.args)
    args[k] = replace(args[k], pos[1:], s)
    return App(t.symbol, tuple(args))


def is_prefix(p: Sequence[int], q: Sequence[int]) -> bool:
    return len(p) <= len(q) and tuple(q[:len(p)]) == tuple(p)


def disjoint(p: Sequence[int], q: Sequence[int]) -> bool:
    return not is_prefix(p, q) and not is_prefix(q, p)


def position_similarity(p: Sequence[int], q: Sequence[int]) -> float:
    """2 * |longest common prefix| / (|p| + |q|); 1.0 for identical paths"""
    if tuple(p) == tuple(q):
        return 1.0
    common = 0
    for x, y in zip(p, q):
        if x != y:
            break
        common += 1
    return 2.0 * common / (len(p) + len(q))


def disagreements(s: Term, t: Term, prefix: Position = ()) -> List[Position]:
    """Highest positions in the shared domain where the root symbols differ"""
    if root_symbol(s) != root_symbol(t):
        return [prefix]
    if not isinstance(s, App):
        return []
    result = []
    for k, (a, b) in enumerate(zip(s.args, t.args), 1):
        result.extend(disagreements(a, b, prefix + (k,)))
    return result


# ============================================================================
# MATCHING AND REWRITING
# ============================================================================

def match_term(pattern: Term, t: Term, binding: Optional[Substitution] = None) -> Optional[Substitution]:
    """Substitution theta with theta(pattern) == t, or None"""
    binding = dict(binding or {})
    stack = [(pattern, t)]
    while stack:
        p, u = stack.pop()
        if isinstance(p, Var):
            bound = binding.get(p.name)
            if bound is None:
                binding[p.name] = u
            elif bound != u:
                return None
        elif isinstance(p, Constant):
            if p != u:
                return None
        else:
            if not isinstance(u, App) or u.symbol != p.symbol or len(u.args) != len(p.args):
                return None
            stack.extend(zip(p.args, u.args))
    return binding


def apply_subst(t: Term, theta: Substitution) -> Term:
    if isinstance(t, Var):
        return theta.get(t.name, t)
    if isinstance(t, App):
        return App(t.symbol, tuple(apply_subst(a, theta) for a in t.args))
    return t


@dataclass(frozen=True)
class Equation:
    name: str
    lhs: Term
    rhs: Term

    def reversed(self) -> 'Equation':
        return Equation(self.name, self.rhs, self.lhs)

    def __str__(self):
        return f"{self.name}: {print_term(self.lhs)} = {print_term(self.rhs)}"


_EQUATION_RE = re.compile(r'^\s*(?P<name>E\d+)\s*:\s*(?P<lhs>.+?)\s*=\s*(?P<rhs>.+?)\s*$')


def parse_equation(text: str) -> Equation:
    """Parse 'E1: lhs = rhs'"""
    match = _EQUATION_RE.match(text)
    if match is None:
        raise TermSyntaxError(f"Not an equation: {text!r}")
    return Equation(match.group('name'), parse_term(match.group('lhs')), parse_term(match.group('rhs')))


def redexes(t: Term, eq: Equation) -> List[Tuple[Position, Term]]:
    """(position, contractum) for every eq-redex of t"""
    found = []
    for pos in positions(t):
        theta = match_term(eq.lhs, subterm(t, pos))
        if theta is not None:
            found.append((pos, apply_subst(eq.rhs, theta)))
    return found


def one_step_rewrites(t: Term, eq: Equation) -> List[Tuple[Position, Term]]:
    """(position, rewritten whole term) for every eq-redex of t"""
    return [(pos, replace(t, pos, contractum)) for pos, contractum in redexes(t, eq)]


@dataclass(frozen=True)
class RewriteWitness:
    redex: Term
    position: Position
    equation: str
    contractum: Term

    def to_record(self) -> Dict:
        return {
            'redex': print_term(self.redex),
            'position': list(self.position),
            'equation': self.equation,
            'contractum': print_term(self.contractum),
        }


def _viable(s: Term, t: Term, eq: Equation) -> List[Tuple[Position, Term]]:
    return [(pos, c) for pos, c in redexes(s, eq)
            if is_valid_position(t, pos) and subterm(t, pos) == c]


def multi_rewrite_check(s: Term, t: Term, eqs: Sequence[Equation]) -> Optional[List[RewriteWitness]]:
    """
    Witnesses for s =>_S t, one redex per equation at pairwise disjoint positions

    Returns:
        Witnesses in the order of eqs, or None when no assignment turns s into t
    """
    if not eqs or len({e.name for e in eqs}) != len(eqs):
        return None
    candidates = [_viable(s, t, eq) for eq in eqs]
    if any(not c for c in candidates):
        return None

    chosen: List[Tuple[Position, Term]] = []

    def search(k: int) -> bool:
        if k == len(eqs):
            result = s
            for pos, contractum in chosen:
                result = replace(result, pos, contractum)
            return result == t
        for pos, contractum in candidates[k]:
            if all(disjoint(pos, other) for other, _ in chosen):
                chosen.append((pos, contractum))
                if search(k + 1):
                    return True
                chosen.pop()
        return False

    if not search(0):
        return None
    return [RewriteWitness(subterm(s, pos), pos, eq.name, contractum)
            for eq, (pos, contractum) in zip(eqs, chosen)]


def related(s: Term, t: Term, eqs: Sequence[Equation]) -> bool:
    """Symmetric closure of =>_S: s =>_S t or t =>_S s"""
    return multi_rewrite_check(s, t, eqs) is not None or multi_rewrite_check(t, s, eqs) is not None


def justifying_set(s: Term, t: Term, axioms: Sequence[Equation],
                   max_size: Optional[int] = ER_MAX_SET_SIZE) -> Optional[List[str]]:
    """
    A minimum-cardinality S with s =>_S t, ties broken by lexicographic names

    Only equations with a viable redex on the path to a disagreement are
    considered; every disagreement must be covered by exactly one chosen
    redex. Returns the sorted names, or None when no such set exists
    (within max_size, if given).
    """
    diffs = disagreements(s, t)
    if not diffs:
        return None
    options: List[Tuple[Equation, Position]] = []
    for eq in axioms:
        for pos, _ in _viable(s, t, eq):
            if any(is_prefix(pos, d) for d in diffs):
                options.append((eq, pos))

    limit = len(diffs) if max_size is None else min(len(diffs), max_size)
    for size in range(1, limit + 1):
        found = []
        for combo in itertools.combinations(options, size):
            names = sorted(eq.name for eq, _ in combo)
            if len(set(names)) != size:
                continue
            spots = [pos for _, pos in combo]
            if not all(disjoint(p, q) for p, q in itertools.combinations(spots, 2)):
                continue
            if not all(sum(is_prefix(p, d) for p in spots) == 1 for d in diffs):
                continue
            if multi_rewrite_check(s, t, [eq for eq, _ in combo]) is not None:
                found.append(names)
        if found:
            return min(found)
    return None


# ============================================================================
# PROOFS
# ============================================================================

@dataclass(frozen=True)
class EqStep:
    term: Optional[Term]
    cited: Tuple[str, ...] = ()
    gap: bool = False


@dataclass(frozen=True)
class EqProof:
    start: Term
    steps: Tuple[EqStep, ...]

    def terms(self) -> List[Term]:
        return [self.start] + [step.term for step in self.steps]


@dataclass
class EqProblem:
    axioms: List[Equation]
    proof: EqProof

    def axiom_map(self) -> Dict[str, Equation]:
        return {eq.name: eq for eq in self.axioms}

    def gap_index(self) -> Optional[int]:
        for k, step in enumerate(self.proof.steps):
            if step.gap:
                return k
        return None


_STEP_RE = re.compile(r'^(?P<term>.*?)(?:\s+by\s+(?P<cited>[^#]*))?$', re.IGNORECASE)


def _parse_step_line(text: str, arities: Optional[Dict[str, int]]) -> EqStep:
    if text.startswith(GF_GAP_MARKER):
        return EqStep(None, (), gap=True)
    match = _STEP_RE.match(text)
    cited = tuple(n.strip() for n in (match.group('cited') or '').split(',') if n.strip())
    return EqStep(parse_term(match.group('term'), arities), cited)


def parse_eq_proof(text: str, arities: Optional[Dict[str, int]] = None) -> EqProof:
    """
    Parse the 's = term  # step 0' / 'term  by E1, E2  # step k' layout

    A '??' line marks an elided gap. Comments after '#' are ignored.
    """
    start = None
    steps = []
    for raw in text.splitlines():
        line = raw.split('#', 1)[0].strip()
        if not line or line.startswith('-'):
            continue
        if start is None:
            head = re.match(r'^s\s*=\s*(.+)$', line)
            if head is None:
                raise TermSyntaxError(f"Proof must start with 's = term', got {line!r}")
            start = parse_term(head.group(1), arities)
            continue
        steps.append(_parse_step_line(line, arities))
    if start is None:
        raise TermSyntaxError("Empty equational proof")
    return EqProof(start, tuple(steps))


def parse_eq_problem(text: str) -> EqProblem:
    """Parse an axioms-plus-proof listing ('- Axioms:' / '- Proof:' sections)"""
    axioms = []
    proof_lines = []
    for raw in text.splitlines():
        line = raw.split('#', 1)[0].strip()
        if _EQUATION_RE.match(line):
            axioms.append(parse_equation(line))
        elif line and not line.startswith('-') and not line.endswith(':'):
            proof_lines.append(line)
    return EqProblem(axioms, parse_eq_proof('\n'.join(proof_lines)))


def render_eq_proof(proof: EqProof) -> str:
    lines = [f"s = {print_term(proof.start)}"]
    for step in proof.steps:
        if step.gap:
            lines.append(f"    {GF_GAP_MARKER}    {GF_GAP_MARKER}")
        elif step.cited:
            lines.append(f"    {print_term(step.term)}    by {', '.join(step.cited)}")
        else:
            lines.append(f"    {print_term(step.term)}")
    return '\n'.join(lines) + '\n'


def strip_citations(proof: EqProof) -> EqProof:
    return EqProof(proof.start, tuple(EqStep(s.term) for s in proof.steps))


# ============================================================================
# PROOF CHECKING
# ============================================================================

@dataclass
class EqVerdict:
    """
    Gold verdict for an equational proof

    explanation is the witness list (correct proofs) or the first-error
    record (incorrect proofs), shaped as in the task answers; it is omitted
    below the level that demands it.
    """
    correct: bool
    explanation: Optional[Union[List[Dict], Dict]] = None
    first_error_step: Optional[int] = None
    error_kind: Optional[str] = None
    witnesses: List[List[RewriteWitness]] = field(default_factory=list)

    def to_record(self) -> Dict:
        return {'correct': self.correct, 'explanation': self.explanation}


def diagnose_step(step: int, s: Term, t: Term, cited: Sequence[str],
                  axioms: Sequence[Equation]) -> Dict:
    """
    First-error record for a failing step

    A cited equation with a redex above a disagreement whose expected
    contractum differs from the observed subterm yields a contractum record;
    otherwise the record names a minimum justifying set ([] if none).
    """
    axiom_map = {eq.name: eq for eq in axioms}
    diffs = disagreements(s, t)
    for name in cited:
        eq = axiom_map.get(name)
        if eq is None:
            continue
        for pos, contractum in redexes(s, eq):
            if not any(is_prefix(pos, d) for d in diffs) or not is_valid_position(t, pos):
                continue
            actual = subterm(t, pos)
            if actual != contractum:
                return {
                    'step': step,
                    'equation': name,
                    'position': list(pos),
                    'expectedContractum': print_term(contractum),
                    'actualContractum': print_term(actual),
                }
    correct = justifying_set(s, t, axioms) or []
    return {'step': step, 'givenEquations': list(cited), 'correctEquations': correct}


def check_eq_proof(axioms: Sequence[Equation], proof: EqProof, level: int = 3) -> EqVerdict:
    """
    Check every step s_i => s_{i+1} against its cited equations

    Args:
        axioms: Named equations
        proof: Proof with citations on every step
        level: 1 verdict only, 2 adds witnesses for correct proofs,
            3 adds the first-error record for incorrect proofs
    """
    axiom_map = {eq.name: eq for eq in axioms}
    all_witnesses = []
    terms = proof.terms()
    for k, step in enumerate(proof.steps, 1):
        eqs = [axiom_map.get(name) for name in step.cited]
        witnesses = None
        if step.cited and all(eqs):
            witnesses = multi_rewrite_check(terms[k - 1], terms[k], eqs)
        if witnesses is None:
            record = diagnose_step(k, terms[k - 1], terms[k], step.cited, axioms)
            kind = 'contractum' if 'expectedContractum' in record else 'equation'
            logger.debug(f"[X] Equational step {k} fails ({kind} error)")
            return EqVerdict(False, record if level >= 3 else None, k, kind, all_witnesses)
        all_witnesses.append(witnesses)

    explanation = None
    if level >= 2:
        explanation = [{'step': k, 'rewrites': [w.to_record() for w in ws]}
                       for k, ws in enumerate(all_witnesses, 1)]
    return EqVerdict(True, explanation, witnesses=all_witnesses)


# ============================================================================
# EQUATION RECOVERY
# ============================================================================

def recover_equations(axioms: Sequence[Equation], proof: EqProof) -> List[List[str]]:
    """One justifying set per step, or [] when no S with s_i =>_S s_{i+1} exists"""
    terms = proof.terms()
    return [justifying_set(terms[k - 1], terms[k], axioms, max_size=None) or []
            for k in range(1, len(terms))]


def verify_er_step(axioms: Sequence[Equation], s: Term, t: Term, names: Sequence[str]) -> bool:
    """
    Validate one recovered set independently

    Non-empty sets must justify the step (right-to-left use is credited);
    the empty set is valid only when no justifying set exists at all.
    """
    axiom_map = {eq.name: eq for eq in axioms}
    if not names:
        return justifying_set(s, t, axioms, max_size=None) is None
    if any(n not in axiom_map for n in names) or len(set(names)) != len(names):
        return False
    return related(s, t, [axiom_map[n] for n in names])


# ============================================================================
# GAP FILLING
# ============================================================================

@dataclass
class GapFillResult:
    valid: bool
    failed_step: Optional[int] = None
    detail: str = ''


def _as_term(value: Union[str, Term], arities: Optional[Dict[str, int]]) -> Term:
    return parse_term(value, arities) if isinstance(value, str) else value


def verify_gap_fill(axioms: Sequence[Equation], pre_term: Term, post_step: EqStep,
                    candidates: Sequence[Tuple[Union[str, Term], Sequence[str]]],
                    max_cited: int = GF_MAX_CITED, oracle_budget: int = GF_SEARCH_BUDGET) -> GapFillResult:
    """
    Check that candidate steps bridge pre_term to the post-gap step

    Each consecutive pair must be related by the symmetric closure of =>_N
    for its cited names N (at most max_cited of them); the last candidate
    must relate to the post-gap term under the post-gap citations. An empty
    candidate list is valid only when the oracle certifies unfillability.

    Raises:
        CitationCapExceeded: a step cites more than max_cited equations
        TermSyntaxError, TermTypeError: a candidate term is malformed
    """
    axiom_map = {eq.name: eq for eq in axioms}
    arities = signature([pre_term, post_step.term] + [e.lhs for e in axioms] + [e.rhs for e in axioms])

    if not candidates:
        verdict = gap_oracle(axioms, pre_term, post_step, budget=oracle_budget)
        return GapFillResult(verdict == 'unfillable', None if verdict == 'unfillable' else 0,
                             f"Empty completion; oracle says {verdict}")

    terms = [pre_term]
    for k, (value, cited) in enumerate(candidates, 1):
        if len(cited) > max_cited:
            raise CitationCapExceeded(k, len(cited), max_cited)
        terms.append(_as_term(value, arities))

    for k, (_, cited) in enumerate(candidates, 1):
        eqs = [axiom_map.get(n) for n in cited]
        if not cited or not all(eqs) or not related(terms[k - 1], terms[k], eqs):
            return GapFillResult(False, k, f"Step {k} is not justified by {list(cited)}")

    post_eqs = [axiom_map.get(n) for n in post_step.cited]
    if not all(post_eqs) or not related(terms[-1], post_step.term, post_eqs):
        return GapFillResult(False, len(candidates) + 1, "The completion does not reach the post-gap step")
    return GapFillResult(True)


def producible_symbols(start: Term, axioms: Sequence[Equation]) -> Set[str]:
    """
    Over-approximation of the symbols that can occur in terms reachable from start

    An equation side can fire only if its own symbols are available; the
    symbols of the other side then become available.
    """
    available = function_symbols(start)
    oriented = [(e.lhs, e.rhs) for e in axioms] + [(e.rhs, e.lhs) for e in axioms]
    changed = True
    while changed:
        changed = False
        for lhs, rhs in oriented:
            if function_symbols(lhs) <= available and not function_symbols(rhs) <= available:
                available |= function_symbols(rhs)
                changed = True
    return available


def gap_oracle(axioms: Sequence[Equation], pre_term: Term, post_step: EqStep,
               budget: int = GF_SEARCH_BUDGET) -> str:
    """
    Decide whether a gap can be filled: 'fillable', 'unfillable' or 'undecided'

    A symbol of the post-gap term that no rewrite sequence can introduce
    certifies unfillability; otherwise a breadth-first search over single
    bidirectional rewrites runs until the node budget is spent.
    """
    axiom_map = {eq.name: eq for eq in axioms}
    post_eqs = [axiom_map[n] for n in post_step.cited if n in axiom_map]
    target = post_step.term

    if not function_symbols(target) <= producible_symbols(pre_term, axioms):
        return 'unfillable'

    oriented = list(axioms) + [eq.reversed() for eq in axioms]
    seen = {pre_term}
    queue = deque([pre_term])
    while queue:
        current = queue.popleft()
        if current != pre_term and post_eqs and related(current, target, post_eqs):
            return 'fillable'
        for eq in oriented:
            for _, rewritten in one_step_rewrites(current, eq):
                if rewritten not in seen:
                    if len(seen) >= budget:
                        return 'undecided'
                    seen.add(rewritten)
                    queue.append(rewritten)
    return 'unfillable'


def completion_diagnostics(pre_term: Term, terms: Sequence[Term]) -> Dict:
    """Cycle flag and redundancy ratio of a gap completion"""
    path = [pre_term] + list(terms)
    repeats = len(path) - len(set(path))
    return {
        'cycle': repeats > 0,
        'redundancy': repeats / len(terms) if terms else 0.0,
        'length': len(terms),
    }


# ============================================================================
# CORRUPTION
# ============================================================================

def _perturb_constant(t: Term, rng: random.Random) -> Optional[Term]:
    leaves = [p for p in positions(t) if isinstance(subterm(t, p), Constant)]
    if not leaves:
        return None
    pos = rng.choice(leaves)
    current = subterm(t, pos).name
    replacement = rng.choice([c for c in CONSTANTS if c != current])
    return replace(t, pos, Constant(replacement))


def corrupt_eq_proof(axioms: Sequence[Equation], proof: EqProof, mode: str,
                     seed: int) -> Tuple[EqProof, Dict]:
    """
    Insert one error into a correct proof

    Args:
        mode: 'contractum' perturbs a constant inside one step's contractum;
            'equation' swaps one cited equation for another axiom

    Returns:
        (corrupted proof, ground-truth first-error record), verified by
        re-checking the corrupted proof

    Raises:
        GenerationExhausted: no corruption found within the retry budget
    """
    if mode not in ('contractum', 'equation'):
        raise ValueError(f"Unknown corruption mode {mode}")
    gold = check_eq_proof(axioms, proof, level=2)
    if not gold.correct:
        raise ValueError("Only correct proofs can be corrupted")

    rng = random.Random(seed)
    names = [eq.name for eq in axioms]
    steps = list(proof.steps)
    for attempt in range(GEN_MAX_RETRIES):
        k = rng.randrange(len(steps))
        step = steps[k]
        if mode == 'contractum':
            witness = rng.choice(gold.witnesses[k])
            bad = _perturb_constant(witness.contractum, rng)
            if bad is None:
                continue
            new_step = EqStep(replace(step.term, witness.position, bad), step.cited)
        else:
            slot = rng.randrange(len(step.cited))
            pool = [n for n in names if n not in step.cited]
            if not pool:
                continue
            cited = list(step.cited)
            cited[slot] = rng.choice(pool)
            new_step = EqStep(step.term, tuple(cited))

        corrupted = EqProof(proof.start, tuple(steps[:k] + [new_step] + steps[k + 1:]))
        verdict = check_eq_proof(axioms, corrupted, level=3)
        if not verdict.correct and verdict.first_error_step == k + 1 and verdict.error_kind == mode:
            logger.debug(f"[GEN] {mode} corruption at step {k + 1} after {attempt + 1} attempt(s)")
            return corrupted, verdict.explanation
        logger.debug(f"[GEN] Rejected {mode} corruption candidate at step {k + 1}")
    raise GenerationExhausted(f"eq-{mode}", GEN_MAX_RETRIES)


def baseline_normalized_accuracy(accuracy: float, baseline: float = 0.5) -> float:
    """Share of the possible improvement over guessing, (acc - b) / (1 - b)"""
    return (accuracy - baseline) / (1.0 - baseline)
