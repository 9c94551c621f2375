"""
Propositional Formula Core

Provides:
- Formula AST (atoms, true/false, ~, &, |, ==>, <==>) as immutable values
- Shared lexer used by every proof-language parser in the package
- Recursive-descent formula parser and canonical / compact printers
- Vectorized truth-table semantics (numpy) and the entailment oracle
- Structural metrics, complements, ~/==> desugaring and alpha-normal keys

Precedence (tightest first): ~, &, |, ==>, <==>. All binary connectives
associate to the right, so (p1 & p2 & p3) reads as (p1 & (p2 & p3)).
"""

import itertools
import logging
import math
import re
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

try:
    from .config import ATOM_BUDGET, TRUTH_TABLE_BLOCK_BITS
    from .errors import AtomBudgetExceeded, FormulaSyntaxError, MissingAtom
except ImportError:
    from config import ATOM_BUDGET, TRUTH_TABLE_BLOCK_BITS
    from errors import AtomBudgetExceeded, FormulaSyntaxError, MissingAtom

logger = logging.getLogger(__name__)

Interpretation = Dict[str, bool]

ALPHA_MAX_ORDERINGS = 5040


# ============================================================================
# AST
# ============================================================================


class Formula:
    """Base class of the propositional AST"""

    def __str__(self):
        return show_formula(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str


@dataclass(frozen=True)
class Const(Formula):
    value: bool


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Binary(Formula):
    left: Formula
    right: Formula

    symbol = '?'


@dataclass(frozen=True)
class And(Binary):
    symbol = '&'


@dataclass(frozen=True)
class Or(Binary):
    symbol = '|'


@dataclass(frozen=True)
class Implies(Binary):
    symbol = '==>'


@dataclass(frozen=True)
class Iff(Binary):
    symbol = '<==>'

TRUE = Const(True)
FALSE = Const(False)

RESERVED_WORDS = {'true', 'false'}


# ============================================================================
# LEXER
# ============================================================================


@dataclass(frozen=True)
class Token:
    kind: str    # 'ident', 'sym', 'error', 'eof'
    text: str
    offset: int
    line: int
    column: int

_TOKEN_RE = re.compile(
    r'(?P<ws>[ \t\r\n]+)'
    r'|(?P<comment>#[^\n]*)'
    r'|(?P<sym><==>|==>|:=|[()\[\]{},;~&|])'
    r'|(?P<ident>[A-Za-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)'
    r'|(?P<error>.)'
)


def tokenize(text: str) -> List[Token]:
    """
    Split proof or formula text into tokens

    Whitespace and '#' comments are dropped. Unknown characters become
    'error' tokens so that parsers can report them with a location.
    """
    tokens = []
    line, line_start = 1, 0
    for match in _TOKEN_RE.finditer(text):
        kind = match.lastgroup
        start = match.start()
        value = match.group()
        if kind in ('sym', 'ident', 'error'):
            tokens.append(Token(kind, value, start, line, start - line_start + 1))
        newlines = value.count('\n')
        if newlines:
            line += newlines
            line_start = start + value.rfind('\n') + 1
    tokens.append(Token('eof', '', len(text), line, len(text) - line_start + 1))
    return tokens


class TokenStream:
    """Cursor over a token list shared by the formula and proof parsers"""

    def __init__(self, tokens: List[Token], error_cls=FormulaSyntaxError):
        self.tokens = tokens
        self.pos = 0
        self.error_cls = error_cls

    def peek(self, ahead: int = 0) -> Token:
        index = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[index]

    def next(self) -> Token:
        token = self.peek()
        if token.kind != 'eof':
            self.pos += 1
        return token

    def at(self, text: str, ahead: int = 0) -> bool:
        token = self.peek(ahead)
        return token.kind in ('sym', 'ident') and token.text == text

    def at_keyword(self, *words: str) -> bool:
        token = self.peek()
        return token.kind == 'ident' and token.text.lower() in words

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"Unexpected {self.describe(self.peek())}", expected=f"'{text}'")
        return self.next()

    def fail(self, message: str, expected: Optional[str] = None):
        token = self.peek()
        raise self.error_cls(message, offset=token.offset, expected=expected,
                             line=token.line, column=token.column)

    @staticmethod
    def describe(token: Token) -> str:
        if token.kind == 'eof':
            return 'end of input'
        return f"token '{token.text}'"


# ============================================================================
# PARSER
# ============================================================================

_BINARY_LEVELS = [('<==>', Iff), ('==>', Implies), ('|', Or), ('&', And)]


def parse_formula_tokens(stream: TokenStream) -> Formula:
    """Parse one formula at the stream cursor, leaving trailing tokens unread"""
    return _parse_level(stream, 0)


def _parse_level(stream: TokenStream, level: int) -> Formula:
    if level == len(_BINARY_LEVELS):
        return _parse_unary(stream)
    symbol, cls = _BINARY_LEVELS[level]
    left = _parse_level(stream, level + 1)
    if stream.accept(symbol):
        right = _parse_level(stream, level)  # right-associative
        return cls(left, right)
    return left


def _parse_unary(stream: TokenStream) -> Formula:
    if stream.accept('~'):
        return Not(_parse_unary(stream))
    token = stream.peek()
    if stream.accept('('):
        inner = _parse_level(stream, 0)
        stream.expect(')')
        return inner
    if token.kind == 'ident':
        stream.next()
        if token.text == 'true':
            return TRUE
        if token.text == 'false':
            return FALSE
        return Atom(token.text)
    stream.fail(f"Unexpected {stream.describe(token)}", expected='a formula')


def parse_formula(text: str) -> Formula:
    """
    Parse formula text into an AST

    Raises:
        FormulaSyntaxError: with character offset and expected-token hint
    """
    stream = TokenStream(tokenize(text))
    for token in stream.tokens:
        if token.kind == 'error':
            raise FormulaSyntaxError(f"Illegal character '{token.text}'", offset=token.offset,
                                     line=token.line, column=token.column)
    formula = parse_formula_tokens(stream)
    if stream.peek().kind != 'eof':
        stream.fail(f"Unexpected {stream.describe(stream.peek())}", expected='end of formula')
    return formula


# ============================================================================
# PRINTERS
# ============================================================================


def print_formula(f: Formula) -> str:
    """Fully parenthesized canonical text: parse_formula(print_formula(f)) == f"""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Const):
        return 'true' if f.value else 'false'
    if isinstance(f, Not):
        return f"(~ {print_formula(f.arg)})"
    return f"({print_formula(f.left)} {f.symbol} {print_formula(f.right)})"


def show_formula(f: Formula) -> str:
    """Compact listing-style text, e.g. (~C | B) and ~(A & B)"""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Const):
        return 'true' if f.value else 'false'
    if isinstance(f, Not):
        return f"~{show_formula(f.arg)}"
    return f"({show_formula(f.left)} {f.symbol} {show_formula(f.right)})"


# ============================================================================
# STRUCTURE
# ============================================================================


def atoms(f: Formula) -> List[str]:
    """Atom names in first-occurrence (left-to-right) order"""
    seen: Dict[str, None] = {}
    stack = [f]
    while stack:
        node = stack.pop()
        if isinstance(node, Atom):
            seen.setdefault(node.name, None)
        elif isinstance(node, Not):
            stack.append(node.arg)
        elif isinstance(node, Binary):
            stack.append(node.right)
            stack.append(node.left)
    return list(seen)


def atoms_of(formulas: Iterable[Formula]) -> List[str]:
    seen: Dict[str, None] = {}
    for f in formulas:
        for name in atoms(f):
            seen.setdefault(name, None)
    return list(seen)


def substitute(f: Formula, mapping: Dict[str, Formula]) -> Formula:
    """Replace atoms by formulas (names bound in a proof environment, renamings)"""
    if not mapping:
        return f
    if isinstance(f, Atom):
        return mapping.get(f.name, f)
    if isinstance(f, Const):
        return f
    if isinstance(f, Not):
        return Not(substitute(f.arg, mapping))
    return type(f)(substitute(f.left, mapping), substitute(f.right, mapping))


def rename_atoms(f: Formula, mapping: Dict[str, str]) -> Formula:
    return substitute(f, {old: Atom(new) for old, new in mapping.items()})


def conjoin(formulas: Sequence[Formula]) -> Formula:
    """Right-associated conjunction; true for an empty list"""
    if not formulas:
        return TRUE
    result = formulas[-1]
    for f in reversed(formulas[:-1]):
        result = And(f, result)
    return result


def disjoin(formulas: Sequence[Formula]) -> Formula:
    """Right-associated disjunction; false for an empty list"""
    if not formulas:
        return FALSE
    result = formulas[-1]
    for f in reversed(formulas[:-1]):
        result = Or(f, result)
    return result


def flatten_and(f: Formula) -> List[Formula]:
    if isinstance(f, And):
        return flatten_and(f.left) + flatten_and(f.right)
    return [f]


def flatten_or(f: Formula) -> List[Formula]:
    if isinstance(f, Or):
        return flatten_or(f.left) + flatten_or(f.right)
    return [f]


def negate(f: Formula) -> Formula:
    return Not(f)


def complements(p: Formula, q: Formula) -> bool:
    """True iff one formula is the syntactic negation of the other"""
    return p == Not(q) or q == Not(p)


def complement_of(p: Formula) -> Formula:
    """The complement of p: drop a leading negation, otherwise add one"""
    return p.arg if isinstance(p, Not) else Not(p)


# ============================================================================
# METRICS
# ============================================================================


@dataclass(frozen=True)
class FormulaMetrics:
    ast_size: int
    atom_set: FrozenSet[str]
    negations: int = 0
    conjunctions: int = 0
    disjunctions: int = 0
    conditionals: int = 0
    biconditionals: int = 0
    constants: int = 0

    def counts(self) -> Dict[str, int]:
        return {
            'negations': self.negations,
            'conjunctions': self.conjunctions,
            'disjunctions': self.disjunctions,
            'conditionals': self.conditionals,
            'biconditionals': self.biconditionals,
            'constants': self.constants,
        }

_COUNTER_FIELDS = {
    Not: 'negations',
    And: 'conjunctions',
    Or: 'disjunctions',
    Implies: 'conditionals',
    Iff: 'biconditionals',
    Const: 'constants',
}


def metrics(f: Formula) -> FormulaMetrics:
    """Node count, atom set and per-connective counts"""
    counts = {name: 0 for name in _COUNTER_FIELDS.values()}
    size = 0
    stack = [f]
    while stack:
        node = stack.pop()
        size += 1
        kind = _COUNTER_FIELDS.get(type(node))
        if kind:
            counts[kind] += 1
        if isinstance(node, Not):
            stack.append(node.arg)
        elif isinstance(node, Binary):
            stack.extend((node.left, node.right))
    return FormulaMetrics(ast_size=size, atom_set=frozenset(atoms(f)), **counts)


def problem_size(premises: Sequence[Formula], goal: Formula) -> int:
    """Total AST size of an argument (sum of per-formula node counts)"""
    return sum(metrics(p).ast_size for p in premises) + metrics(goal).ast_size


# ============================================================================
# SEMANTICS
# ============================================================================


def evaluate(f: Formula, interpretation: Interpretation) -> bool:
    """
    Classical truth value of f

    Raises:
        MissingAtom: if an atom of f has no assignment
    """
    if isinstance(f, Atom):
        if f.name not in interpretation:
            raise MissingAtom(f.name)
        return bool(interpretation[f.name])
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        return not evaluate(f.arg, interpretation)
    left = evaluate(f.left, interpretation)
    right = evaluate(f.right, interpretation)
    if isinstance(f, And):
        return left and right
    if isinstance(f, Or):
        return left or right
    if isinstance(f, Implies):
        return (not left) or right
    return left == right


def _table(f: Formula, columns: Dict[str, np.ndarray], size: int) -> np.ndarray:
    if isinstance(f, Atom):
        return columns[f.name]
    if isinstance(f, Const):
        return np.full(size, f.value, dtype=bool)
    if isinstance(f, Not):
        return ~_table(f.arg, columns, size)
    left = _table(f.left, columns, size)
    right = _table(f.right, columns, size)
    if isinstance(f, And):
        return left & right
    if isinstance(f, Or):
        return left | right
    if isinstance(f, Implies):
        return ~left | right
    return left == right


def _assignment_blocks(names: List[str]):
    """Yield (start, columns, size) blocks enumerating all 2^n assignments in order"""
    n = len(names)
    total = 1 << n
    block = 1 << min(n, TRUTH_TABLE_BLOCK_BITS)
    for start in range(0, total, block):
        index = np.arange(start, start + block, dtype=np.int64)
        columns = {
            name: ((index >> (n - 1 - k)) & 1).astype(bool)
            for k, name in enumerate(names)
        }
        yield start, columns, block


def _oracle_atoms(formulas: Sequence[Formula], budget: Optional[int]) -> List[str]:
    names = sorted(atoms_of(formulas))
    limit = ATOM_BUDGET if budget is None else budget
    if len(names) > limit:
        raise AtomBudgetExceeded(len(names), limit)
    return names


def _decode(names: List[str], index: int) -> Interpretation:
    n = len(names)
    return {name: bool((index >> (n - 1 - k)) & 1) for k, name in enumerate(names)}


def countermodel(premises: Sequence[Formula], goal: Formula,
                 budget: Optional[int] = None) -> Optional[Interpretation]:
    """
    First interpretation (lexicographic over sorted atom names, false before
    true) satisfying every premise and falsifying goal, or None.
    """
    names = _oracle_atoms(list(premises) + [goal], budget)
    for start, columns, size in _assignment_blocks(names):
        holds = np.ones(size, dtype=bool)
        for premise in premises:
            holds &= _table(premise, columns, size)
            if not holds.any():
                break
        holds &= ~_table(goal, columns, size)
        hits = np.flatnonzero(holds)
        if hits.size:
            return _decode(names, start + int(hits[0]))
    return None


def entails(premises: Sequence[Formula], goal: Formula, budget: Optional[int] = None) -> bool:
    """
    True iff every interpretation satisfying all premises satisfies goal

    Raises:
        AtomBudgetExceeded: above the configured atom bound
    """
    return countermodel(premises, goal, budget) is None


def satisfiable(formulas: Sequence[Formula], budget: Optional[int] = None) -> Optional[Interpretation]:
    """A model of all formulas, or None"""
    return countermodel(formulas, FALSE, budget)


def equivalent(p: Formula, q: Formula, budget: Optional[int] = None) -> bool:
    return entails([], Iff(p, q), budget)


# ============================================================================
# TRANSFORMATIONS
# ============================================================================


def to_neg_imp(f: Formula) -> Formula:
    """Rewrite into the ~ / ==> fragment, preserving truth tables"""
    if isinstance(f, (Atom, Const)):
        return f
    if isinstance(f, Not):
        return Not(to_neg_imp(f.arg))
    left = to_neg_imp(f.left)
    right = to_neg_imp(f.right)
    if isinstance(f, Implies):
        return Implies(left, right)
    if isinstance(f, Or):
        return Implies(Not(left), right)
    if isinstance(f, And):
        return Not(Implies(left, Not(right)))
    return Not(Implies(Implies(left, right), Not(Implies(right, left))))


def _shape(f: Formula) -> str:
    return print_formula(substitute(f, {name: Atom('_') for name in atoms(f)}))


def _canonical_text(body: Formula) -> Tuple[str, int]:
    names = atoms(body)
    renamed = rename_atoms(body, {name: f"v{k + 1}" for k, name in enumerate(names)})
    return print_formula(renamed), len(names)


def alpha_key(premises: Sequence[Formula], goal: Formula) -> str:
    """
    Canonical key of an argument up to premise order and atom renaming

    The premises are conjoined into the antecedent of a conditional whose
    consequent is the goal; the closure's atoms are renamed v1, v2, ... in
    first-occurrence order. Premises with the same shape are tried in every
    order (up to a cap) and the smallest text wins.
    """
    groups: Dict[str, List[Formula]] = {}
    for premise in premises:
        groups.setdefault(_shape(premise), []).append(premise)
    ordered_groups = [sorted(groups[key], key=print_formula) for key in sorted(groups)]

    combinations = 1
    for group in ordered_groups:
        combinations *= math.factorial(len(group))

    if combinations <= ALPHA_MAX_ORDERINGS:
        candidates = itertools.product(*(itertools.permutations(g) for g in ordered_groups))
    else:
        candidates = [tuple(tuple(g) for g in ordered_groups)]

    best = None
    for choice in candidates:
        ordering = [p for group in choice for p in group]
        body = Implies(conjoin(ordering), goal) if ordering else goal
        text, count = _canonical_text(body)
        if best is None or text < best[0]:
            best = (text, count)

    text, count = best
    bound = ' '.join(f"v{k + 1}" for k in range(count))
    return f"forall {bound}. {text}" if count else text
