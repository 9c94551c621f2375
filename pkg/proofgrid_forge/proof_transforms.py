"""
NDL Proof Transformations

Builds and rewrites NDL proofs for the proof-centric task variants:
- Gold proof writer: case analysis on atoms down to decided partial
  interpretations, closing each branch structurally
- Masking (MASKk tokens over conclusions, rules, hypotheses and rule
  arguments) with semantic grading by unmask + re-check
- Gap insertion (GAP-k over single steps, chains and conditional subproofs)
  with grading by splice + re-check against the goal
- Seeded corruption of valid proofs with a ground-truth first error that both
  the strict and the instrumented checker agree on

Usage:
    text = write_case_analysis_proof(premises, goal)
    masked = mask_proof(text, 0.5, seed=7)
    ok, error_type, message = grade_mask_assignment(premises, goal, masked, masked.assignment)
"""

import logging
import random
import re
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple, Union

try:
    from .config import GEN_MAX_RETRIES
    from .errors import GenerationExhausted, ProofSyntaxError
    from .formula import FALSE, TRUE, And, Atom, Const, Formula, Iff, Implies, Not, Or, atoms_of, show_formula
    from .instrumented_checker import instrumented_eval
    from .ndl_engine import (
        Assert, Assume, ByAnnotated, Compose, NamedFormulas, ProofScript, RuleApp, Step,
        check_argument, parse_proof, print_proof, print_steps,
    )
except ImportError:
    from config import GEN_MAX_RETRIES
    from errors import GenerationExhausted, ProofSyntaxError
    from formula import FALSE, TRUE, And, Atom, Const, Formula, Iff, Implies, Not, Or, atoms_of, show_formula
    from instrumented_checker import instrumented_eval
    from ndl_engine import (
        Assert, Assume, ByAnnotated, Compose, NamedFormulas, ProofScript, RuleApp, Step,
        check_argument, parse_proof, print_proof, print_steps,
    )

logger = logging.getLogger(__name__)

PartialInterpretation = Dict[str, bool]

MASK_RE = re.compile(r'\bMASK(\d+)\b')
GAP_RE = re.compile(r'\bGAP-(\d+)\b')
_IDENT_RE = re.compile(r'^[A-Za-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*$')


def _as_script(proof: Union[str, ProofScript]) -> ProofScript:
    return parse_proof(proof) if isinstance(proof, str) else proof


# ============================================================================
# GOLD PROOF WRITER
# ============================================================================

def _value(f: Formula, partial: PartialInterpretation) -> Optional[bool]:
    """Three-valued (Kleene) truth value under a partial interpretation"""
    if isinstance(f, Atom):
        return partial.get(f.name)
    if isinstance(f, Const):
        return f.value
    if isinstance(f, Not):
        inner = _value(f.arg, partial)
        return None if inner is None else not inner
    left = _value(f.left, partial)
    right = _value(f.right, partial)
    if isinstance(f, And):
        if left is False or right is False:
            return False
        return True if left and right else None
    if isinstance(f, Or):
        if left is True or right is True:
            return True
        return False if left is False and right is False else None
    if isinstance(f, Implies):
        if left is False or right is True:
            return True
        return False if left is True and right is False else None
    if left is None or right is None:
        return None
    return left == right


def _app(rule: str, *args: Formula) -> Step:
    return Step(None, RuleApp(rule, tuple(args)))


def _assume(hypothesis: Formula, steps: Sequence[Step], name: Optional[str] = None) -> Step:
    return Step(None, Assume(hypothesis, name, Compose(tuple(steps))))


def _refute(hypothesis: Formula, steps: Sequence[Step], target: Formula) -> List[Step]:
    """assume hypothesis { steps ending in false }; by-contradiction on target"""
    return [_assume(hypothesis, steps),
            _app('by-contradiction', target, Implies(hypothesis, FALSE))]


def establish(f: Formula, partial: PartialInterpretation) -> List[Step]:
    """
    Steps deriving f (if true) or ~f (if false) from the literals in scope

    Args:
        f: Formula whose value is decided by partial
        partial: Atom values available as hypotheses in the assumption base

    Returns:
        Steps whose last conclusion is f or ~f
    """
    value = _value(f, partial)
    if value is None:
        raise ValueError(f"{show_formula(f)} is undecided under the partial interpretation")

    if isinstance(f, Atom):
        return [_app('claim', f if value else Not(f))]
    if isinstance(f, Const):
        if value:
            return [_app('claim', TRUE)]
        return [_assume(FALSE, [_app('claim', FALSE)]),
                _app('by-contradiction', Not(FALSE), Implies(FALSE, FALSE))]
    if isinstance(f, Not):
        steps = establish(f.arg, partial)
        if value:
            return steps
        return steps + _refute(Not(f.arg), [_app('absurd', f.arg, Not(f.arg))], Not(f))

    left, right = f.left, f.right
    lv, rv = _value(left, partial), _value(right, partial)

    if isinstance(f, And):
        if value:
            return establish(left, partial) + establish(right, partial) + [_app('both', left, right)]
        side, pick = (left, 'left-and') if lv is False else (right, 'right-and')
        return establish(side, partial) + _refute(
            f, [_app(pick, f), _app('absurd', side, Not(side))], Not(f))

    if isinstance(f, Or):
        if value:
            if lv:
                return establish(left, partial) + [_app('left-either', left, right)]
            return establish(right, partial) + [_app('right-either', left, right)]
        both = And(Not(left), Not(right))
        return (establish(left, partial) + establish(right, partial)
                + [_app('both', Not(left), Not(right)), _app('dm', both)])

    if isinstance(f, Implies):
        if value:
            if lv is False:
                return establish(left, partial) + [
                    _assume(left, [_app('from-complements', right, left, Not(left))])]
            return establish(right, partial) + [_assume(left, [_app('claim', right)])]
        witness = And(left, Not(right))
        return (establish(left, partial) + establish(right, partial)
                + [_app('both', left, Not(right)), _app('neg-cond-def', witness)])

    # Iff
    steps = establish(left, partial) + establish(right, partial)
    if value:
        if lv:
            forward = _assume(left, [_app('claim', right)])
            backward = _assume(right, [_app('claim', left)])
        else:
            forward = _assume(left, [_app('from-complements', right, left, Not(left))])
            backward = _assume(right, [_app('from-complements', left, right, Not(right))])
        return steps + [forward, backward, _app('equiv', Implies(left, right), Implies(right, left))]
    if lv:
        body = [_app('left-iff', f), _app('mp', Implies(left, right), left),
                _app('absurd', right, Not(right))]
    else:
        body = [_app('right-iff', f), _app('mp', Implies(right, left), right),
                _app('absurd', left, Not(left))]
    return steps + _refute(f, body, Not(f))


def _close_branch(premises: Sequence[Formula], goal: Formula,
                  partial: PartialInterpretation) -> Optional[List[Step]]:
    if _value(goal, partial) is True:
        return establish(goal, partial)
    for premise in premises:
        if _value(premise, partial) is False:
            return establish(premise, partial) + [
                _app('from-complements', goal, premise, Not(premise))]
    return None


def _split(premises: Sequence[Formula], goal: Formula, names: List[str],
           partial: PartialInterpretation) -> List[Step]:
    closed = _close_branch(premises, goal, partial)
    if closed is not None:
        return closed
    pending = [name for name in names if name not in partial]
    if not pending:
        raise ValueError(f"Premises do not entail {show_formula(goal)}")
    atom = Atom(pending[0])
    positive = _split(premises, goal, names, {**partial, atom.name: True})
    negative = _split(premises, goal, names, {**partial, atom.name: False})
    return [
        _app('ex-middle', atom),
        _assume(atom, positive),
        _assume(Not(atom), negative),
        _app('cases', Or(atom, Not(atom)), Implies(atom, goal), Implies(Not(atom), goal)),
    ]


def build_case_analysis_proof(premises: NamedFormulas, goal: Formula) -> ProofScript:
    """Case-analysis proof of goal as a ProofScript (premises asserted by name)"""
    formulas = [f for _, f in premises]
    names = sorted(atoms_of(formulas + [goal]))
    steps = _split(formulas, goal, names, {})
    asserts = tuple(Assert(name, f) for name, f in premises)
    return ProofScript(asserts, Compose(tuple(steps)))


def write_case_analysis_proof(premises: NamedFormulas, goal: Formula) -> str:
    """
    Write a strict-checker-valid NDL proof of goal from premises

    Splits on atoms in sorted order and stops a branch as soon as the partial
    interpretation makes the goal true or some premise false.

    Raises:
        ValueError: if the premises do not entail the goal
    """
    return print_proof(build_case_analysis_proof(premises, goal))


# ============================================================================
# AST WALKING
# ============================================================================

def _nested_block(proof) -> Optional[Compose]:
    """The block a step opens, if any (assume bodies, bare blocks, annotated blocks)"""
    if isinstance(proof, Compose):
        return proof
    if isinstance(proof, Assume):
        return proof.body
    if isinstance(proof, ByAnnotated):
        return _nested_block(proof.proof)
    return None


def _with_block(proof, block: Compose):
    if isinstance(proof, Compose):
        return block
    if isinstance(proof, Assume):
        return replace(proof, body=block)
    if isinstance(proof, ByAnnotated):
        return replace(proof, proof=_with_block(proof.proof, block))
    raise TypeError(f"{proof!r} opens no block")


def _top_block(script: ProofScript) -> Compose:
    body = script.body
    return body if isinstance(body, Compose) else Compose((Step(None, body),))


def _blocks(block: Compose, path: Tuple[int, ...] = ()):
    """Yield (path, block) for every block, outermost first"""
    yield path, block
    for k, step in enumerate(block.steps):
        inner = _nested_block(step.proof)
        if inner is not None:
            yield from _blocks(inner, path + (k,))


def _edit_block(block: Compose, path: Tuple[int, ...], fn) -> Compose:
    """Rebuild block with fn applied to the block at path"""
    if not path:
        return fn(block)
    head, rest = path[0], path[1:]
    step = block.steps[head]
    inner = _edit_block(_nested_block(step.proof), rest, fn)
    steps = list(block.steps)
    steps[head] = Step(step.name, _with_block(step.proof, inner))
    return replace(block, steps=tuple(steps))


def _count_applications(proof) -> int:
    if isinstance(proof, RuleApp):
        return 1
    if isinstance(proof, Compose):
        return sum(_count_applications(step.proof) for step in proof.steps)
    if isinstance(proof, Assume):
        return _count_applications(proof.body)
    if isinstance(proof, ByAnnotated):
        return _count_applications(proof.proof)
    return 0


def _count_lines(proof) -> int:
    """Rule applications plus assume lines"""
    if isinstance(proof, Assume):
        return 1 + _count_lines(proof.body)
    if isinstance(proof, Compose):
        return sum(_count_lines(step.proof) for step in proof.steps)
    if isinstance(proof, ByAnnotated):
        return _count_lines(proof.proof)
    return 1 if isinstance(proof, RuleApp) else 0


# ============================================================================
# MASKING
# ============================================================================

MASK_KINDS = ('conclusion', 'rule', 'assumption', 'rule-argument')


@dataclass
class MaskedProof:
    """
    A proof with MASKk tokens

    assignment maps each label to the masked text (formula or rule name);
    kinds maps each label to conclusion / rule / assumption / rule-argument.
    """
    text: str
    assignment: Dict[str, str]
    kinds: Dict[str, str]
    candidates: int

    @property
    def density(self) -> float:
        return mask_density(self.text)


class _Masker:
    """Two passes over the AST in print order: count occupants, then replace chosen ones"""

    def __init__(self, chosen: Optional[set] = None):
        self.chosen = chosen
        self.index = 0
        self.kinds: List[str] = []
        self.labels: Dict[int, str] = {}
        self.assignment: Dict[str, str] = {}
        self.label_kinds: Dict[str, str] = {}

    def _slot(self, kind: str, text: str) -> Optional[str]:
        index = self.index
        self.index += 1
        self.kinds.append(kind)
        if self.chosen is None or index not in self.chosen:
            return None
        label = f"MASK{len(self.assignment) + 1}"
        self.assignment[label] = text
        self.label_kinds[label] = kind
        return label

    def _formula(self, f: Formula, kind: str) -> Formula:
        label = self._slot(kind, show_formula(f))
        return Atom(label) if label else f

    def visit(self, proof):
        if isinstance(proof, RuleApp):
            label = self._slot('rule', proof.rule)
            rule = label or proof.rule
            args = tuple(self._formula(a, 'rule-argument') for a in proof.args)
            return replace(proof, rule=rule, args=args)
        if isinstance(proof, ByAnnotated):
            claimed = self._formula(proof.claimed, 'conclusion')
            return replace(proof, claimed=claimed, proof=self.visit(proof.proof))
        if isinstance(proof, Assume):
            hypothesis = self._formula(proof.hypothesis, 'assumption')
            return replace(proof, hypothesis=hypothesis, body=self.visit(proof.body))
        if isinstance(proof, Compose):
            return replace(proof, steps=tuple(Step(s.name, self.visit(s.proof)) for s in proof.steps))
        return proof


def mask_proof(proof: Union[str, ProofScript], fraction: float, seed: int) -> MaskedProof:
    """
    Mask a fraction of the top-level occupants of a proof

    Args:
        proof: Valid NDL proof (text or parsed script)
        fraction: Share of maskable occupants to hide (at least one is masked)
        seed: RNG seed

    Returns:
        MaskedProof with labels MASK1, MASK2, ... numbered in reading order
    """
    script = _as_script(proof)
    counter = _Masker()
    counter.visit(script.body)
    total = counter.index
    if total == 0:
        return MaskedProof(print_proof(script), {}, {}, 0)

    rng = random.Random(seed)
    k = min(total, max(1, round(fraction * total)))
    chosen = set(rng.sample(range(total), k))
    masker = _Masker(chosen)
    body = masker.visit(script.body)
    text = print_proof(ProofScript(script.asserts, body))
    logger.debug(f"[GEN] Masked {k}/{total} occupants (fraction {fraction:.2f})")
    return MaskedProof(text, masker.assignment, masker.label_kinds, total)


def _fill_text(value: str, kind: Optional[str]) -> str:
    value = value.strip()
    if kind == 'rule' or _IDENT_RE.match(value) or value.startswith('('):
        return value
    return f"({value})"


def unmask(masked_text: str, assignment: Dict[str, str], kinds: Optional[Dict[str, str]] = None) -> str:
    """
    Replace every MASKk token with its assigned text

    Raises:
        KeyError: if a mask in the text has no assignment
    """
    kinds = kinds or {}

    def fill(match):
        label = match.group(0)
        return _fill_text(str(assignment[label]), kinds.get(label))

    return MASK_RE.sub(fill, masked_text)


_RULE_SLOT_RE = re.compile(r'\b(MASK\d+)\s+on\b')


def infer_mask_kinds(masked_text: str) -> Dict[str, str]:
    """
    Positional mask kinds for archived masked proofs: 'rule' or 'formula'

    A mask written right before the `on` keyword can only stand for a rule.
    """
    rules = set(_RULE_SLOT_RE.findall(masked_text))
    return {f"MASK{k}": 'rule' if f"MASK{k}" in rules else 'formula'
            for k in sorted({int(n) for n in MASK_RE.findall(masked_text)})}


def mask_density(masked_text: str) -> float:
    """Distinct masks over rule-application plus assume lines"""
    masks = len(set(MASK_RE.findall(masked_text)))
    lines = _count_lines(_top_block(parse_proof(masked_text)))
    return masks / lines if lines else 0.0


def grade_mask_assignment(premises: NamedFormulas, goal: Formula, masked: MaskedProof,
                          assignment: Dict[str, str], instrumented: bool = False
                          ) -> Tuple[bool, Optional[str], Optional[str]]:
    """
    Grade a candidate unmasking semantically

    Args:
        premises: Named premises of the item
        goal: Goal formula
        masked: The masked proof
        assignment: Candidate MASKk -> text mapping
        instrumented: Check with syntax repairs and overlooks instead of strictly

    Returns:
        (success, error_type, error_message)
    """
    missing = sorted(set(masked.assignment) - set(assignment or {}))
    if missing:
        return False, 'missing', f"No assignment for {', '.join(missing)}"
    text = unmask(masked.text, assignment, masked.kinds)
    return _grade_text(premises, goal, text, instrumented)


def _grade_text(premises: NamedFormulas, goal: Formula, text: str,
                instrumented: bool) -> Tuple[bool, Optional[str], Optional[str]]:
    if instrumented:
        result = instrumented_eval(premises, goal, text)
        if result.result == 'correct':
            return True, None, None
        error = result.first_error
        return False, error.kind if error else result.result, str(error) if error else None
    report = check_argument(premises, goal, text)
    if report.success:
        return True, None, None
    return False, report.error.kind, str(report.error)


# ============================================================================
# GAPS
# ============================================================================

@dataclass(frozen=True)
class GapMarker:
    label: str

    def render(self) -> str:
        return self.label


@dataclass
class GappedProof:
    """
    A proof with GAP-k tokens

    gold maps each label to the elided steps; fraction is the share of rule
    applications elided.
    """
    text: str
    gold: Dict[str, str]
    fraction: float


def _overlaps(a, b) -> bool:
    """Runs are (block path, start, end); overlap includes nesting"""
    path_a, start_a, end_a = a
    path_b, start_b, end_b = b
    if path_a == path_b:
        return start_a < end_b and start_b < end_a
    if len(path_b) > len(path_a) and path_b[:len(path_a)] == path_a:
        return start_a <= path_b[len(path_a)] < end_a
    if len(path_a) > len(path_b) and path_a[:len(path_b)] == path_b:
        return start_b <= path_a[len(path_b)] < end_b
    return False


def insert_gaps(proof: Union[str, ProofScript], fraction: float, seed: int,
                max_chain: int = 3) -> GappedProof:
    """
    Replace steps, chains of steps and conditional subproofs with gaps

    Gaps are added until the elided share of rule applications reaches
    fraction. At fraction >= 0.99 the whole body becomes a single gap.

    Args:
        proof: Valid NDL proof
        fraction: Target elided share
        seed: RNG seed
        max_chain: Longest run of consecutive steps a single gap covers
    """
    script = _as_script(proof)
    top = _top_block(script)
    total = _count_applications(top) or 1

    if fraction >= 0.99:
        gold = {'GAP-1': print_steps(top.steps)}
        body = Compose((Step(None, GapMarker('GAP-1')),))
        return GappedProof(print_proof(ProofScript(script.asserts, body)), gold, 1.0)

    rng = random.Random(seed)
    blocks = dict(_blocks(top))
    paths = sorted(blocks)
    chosen = []
    elided = 0
    for _ in range(GEN_MAX_RETRIES):
        if elided >= fraction * total:
            break
        path = rng.choice(paths)
        block = blocks[path]
        start = rng.randrange(len(block.steps))
        end = min(len(block.steps), start + rng.randint(1, max_chain))
        run = (path, start, end)
        if any(_overlaps(run, other) for other in chosen):
            continue
        chosen.append(run)
        elided += sum(_count_applications(s.proof) for s in block.steps[start:end])

    if not chosen:
        chosen = [((), 0, len(top.steps))]
        elided = total

    gold = {}
    edits = {}
    for k, (path, start, end) in enumerate(sorted(chosen, key=lambda run: run[0] + (run[1],)), start=1):
        label = f"GAP-{k}"
        gold[label] = print_steps(blocks[path].steps[start:end])
        edits.setdefault(path, []).append((start, end, label))

    # deepest blocks first so outer step indices stay valid
    for path in sorted(edits, key=len, reverse=True):
        runs = sorted(edits[path], reverse=True)

        def splice(block, runs=runs):
            steps = list(block.steps)
            for start, end, label in runs:
                steps[start:end] = [Step(None, GapMarker(label))]
            return replace(block, steps=tuple(steps))

        top = _edit_block(top, path, splice)

    text = print_proof(ProofScript(script.asserts, top))
    logger.debug(f"[GEN] Inserted {len(gold)} gap(s), elided {elided}/{total} applications")
    return GappedProof(text, gold, elided / total)


def fill_gaps(gapped_text: str, fills: Dict[str, str]) -> str:
    """
    Splice fills into a gapped proof

    Raises:
        KeyError: if a gap in the text has no fill
    """
    def fill(match):
        return str(fills[match.group(0)]).strip().rstrip(';').strip()

    return GAP_RE.sub(fill, gapped_text)


def grade_gap_fill(premises: NamedFormulas, goal: Formula, gapped: GappedProof,
                   fills: Dict[str, str], instrumented: bool = False
                   ) -> Tuple[bool, Optional[str], Optional[str]]:
    """
    Grade candidate gap fills: splice, then check the whole proof against the goal

    Returns:
        (success, error_type, error_message)
    """
    missing = sorted(set(gapped.gold) - set(fills or {}))
    if missing:
        return False, 'missing', f"No fill for {', '.join(missing)}"
    return _grade_text(premises, goal, fill_gaps(gapped.text, fills), instrumented)


# ============================================================================
# CORRUPTION
# ============================================================================

INTERVENTIONS = ('conjunction-on-disjunction', 'arity-change', 'remove-step', 'rule-swap')


@dataclass
class CorruptedProof:
    text: str
    intervention: str
    error: Dict = field(default_factory=dict)

    def to_record(self) -> Dict:
        return {'proof': self.text, 'intervention': self.intervention, **self.error}


def _rule_sites(top: Compose) -> List[Tuple[Tuple[int, ...], int]]:
    """(block path, step index) of every step that is a (possibly annotated) rule application"""
    sites = []
    for path, block in _blocks(top):
        for k, step in enumerate(block.steps):
            if isinstance(_unwrap(step.proof), RuleApp):
                sites.append((path, k))
    return sites


def _unwrap(proof):
    while isinstance(proof, ByAnnotated):
        proof = proof.proof
    return proof


def _rewrap(proof, node):
    if isinstance(proof, ByAnnotated):
        return replace(proof, proof=_rewrap(proof.proof, node))
    return node


def _mutate_rule(app: RuleApp, intervention: str, rng: random.Random) -> Optional[RuleApp]:
    if intervention == 'conjunction-on-disjunction':
        if app.rule in ('left-and', 'right-and') and isinstance(app.args[0], And):
            conj = app.args[0]
            return replace(app, args=(Or(conj.left, conj.right),) + app.args[1:])
        return None
    if intervention == 'arity-change':
        if len(app.args) > 1 and rng.random() < 0.5:
            return replace(app, args=app.args[:-1])
        return replace(app, args=app.args + (app.args[rng.randrange(len(app.args))],))
    if intervention == 'rule-swap':
        swap = {'mp': 'mt', 'mt': 'mp', 'left-and': 'right-and', 'right-and': 'left-and'}
        if app.rule in swap:
            return replace(app, rule=swap[app.rule])
        return None
    return None


def _apply_intervention(top: Compose, intervention: str, rng: random.Random) -> Optional[Compose]:
    if intervention == 'remove-step':
        candidates = [(path, k) for path, block in _blocks(top) if len(block.steps) >= 2
                      for k in range(len(block.steps) - 1)]
        if not candidates:
            return None
        path, index = rng.choice(candidates)
        return _edit_block(top, path, lambda b: replace(
            b, steps=b.steps[:index] + b.steps[index + 1:]))

    sites = _rule_sites(top)
    rng.shuffle(sites)
    for path, index in sites:
        holder = top
        for k in path:
            holder = _nested_block(holder.steps[k].proof)
        step = holder.steps[index]
        mutated = _mutate_rule(_unwrap(step.proof), intervention, rng)
        if mutated is None:
            continue

        def swap_step(block, index=index, step=step, mutated=mutated):
            steps = list(block.steps)
            steps[index] = Step(step.name, _rewrap(step.proof, mutated))
            return replace(block, steps=tuple(steps))

        return _edit_block(top, path, swap_step)
    return None


def corrupt_ndl_proof(premises: NamedFormulas, goal: Formula, proof: Union[str, ProofScript],
                      seed: int, interventions: Sequence[str] = INTERVENTIONS) -> CorruptedProof:
    """
    Introduce one error into a valid proof

    The corrupted text must fail the strict checker, and the instrumented
    checker's first error must agree with it on kind and line.

    Returns:
        CorruptedProof with the ground-truth error record
        {intervention, errorType, line, step, offendingRule}

    Raises:
        GenerationExhausted: if no intervention yields an agreed error
    """
    script = _as_script(proof)
    top = _top_block(script)
    rng = random.Random(seed)
    for attempt in range(GEN_MAX_RETRIES):
        intervention = rng.choice(list(interventions))
        corrupted = _apply_intervention(top, intervention, rng)
        if corrupted is None:
            continue
        text = print_proof(ProofScript(script.asserts, corrupted))
        try:
            parse_proof(text)
        except ProofSyntaxError:
            continue
        report = check_argument(premises, goal, text)
        if report.success:
            continue
        gold = instrumented_eval(premises, goal, text)
        error = gold.first_error
        if error is None or error.kind != report.error.kind or error.line != report.error.line:
            continue
        record = {
            'intervention': intervention,
            'errorType': error.kind,
            'line': error.line,
            'step': error.step,
            'offendingRule': error.rule,
        }
        logger.debug(f"[GEN] Corrupted proof via {intervention} after {attempt + 1} attempt(s): "
                     f"{error.kind} at line {error.line}")
        return CorruptedProof(text, intervention, record)
    raise GenerationExhausted('ndl-corruption', GEN_MAX_RETRIES)
