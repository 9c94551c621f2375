"""
Problem Generation (PL1 / PL2)

Seeded generators and shared problem plumbing:
- Argument records with the textual layout (assert premise-k := ...; # Goal:)
  and structured archive records
- PL1 sampling under five constraints (distinct, entailed, every premise
  necessary, no goal-only atoms, consistent premises and refutable goal)
  with alpha-key deduplication
- Conditionalization for premise-free proof writing
- PL2 guarded-definition (gate diagnosis) construction, its proper-abduction
  variant and the PL2-PW lift from PL1 items
- PL1 proof-centric items (checking, masking, gap filling)
- Clause extraction, declausification and DIMACS export

Usage:
    config = GenConfig(seed=11)
    arg = gen_pl1(config)
    print(arg.render())
"""

import logging
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Set, Tuple

try:
    from .config import (
        ATOM_BUDGET, DEFAULT_SEED, GAP_FRACTION_RANGE, GEN_MAX_RETRIES, KEEP_REDUNDANT_PREMISES,
        MASK_FRACTION_RANGE, PL1_ATOM_POOL, PL1_CONNECTIVE_WEIGHTS, PL1_MAX_DEPTH,
        PL1_MAX_PREMISES, PL1_MIN_PREMISES,
    )
    from .errors import ForgeError, GenerationExhausted
    from .formula import (
        FALSE, And, Atom, Const, Formula, Iff, Implies, Not, Or, alpha_key, atoms, atoms_of,
        complement_of, conjoin, disjoin, entails, evaluate, flatten_and, flatten_or, metrics,
        satisfiable, show_formula,
    )
    from .ndl_engine import number_premises
    from .proof_transforms import corrupt_ndl_proof, insert_gaps, mask_proof, write_case_analysis_proof
except ImportError:
    from config import (
        ATOM_BUDGET, DEFAULT_SEED, GAP_FRACTION_RANGE, GEN_MAX_RETRIES, KEEP_REDUNDANT_PREMISES,
        MASK_FRACTION_RANGE, PL1_ATOM_POOL, PL1_CONNECTIVE_WEIGHTS, PL1_MAX_DEPTH,
        PL1_MAX_PREMISES, PL1_MIN_PREMISES,
    )
    from errors import ForgeError, GenerationExhausted
    from formula import (
        FALSE, And, Atom, Const, Formula, Iff, Implies, Not, Or, alpha_key, atoms, atoms_of,
        complement_of, conjoin, disjoin, entails, evaluate, flatten_and, flatten_or, metrics,
        satisfiable, show_formula,
    )
    from ndl_engine import number_premises
    from proof_transforms import corrupt_ndl_proof, insert_gaps, mask_proof, write_case_analysis_proof

logger = logging.getLogger(__name__)

Clause = List[Tuple[str, bool]]


# ============================================================================
# ARGUMENTS
# ============================================================================

@dataclass
class Argument:
    """
    Premises (named premise-1, premise-2, ...) and a goal

    guaranteed marks instances whose entailment rests on a family-level
    argument because their atom count is above the oracle budget.
    """
    premises: List[Tuple[str, Formula]]
    goal: Formula
    family: str = 'pl1'
    params: Dict = field(default_factory=dict)
    seed: Optional[int] = None
    guaranteed: bool = False

    @classmethod
    def from_formulas(cls, formulas: Sequence[Formula], goal: Formula, **kwargs) -> 'Argument':
        return cls(number_premises(list(formulas)), goal, **kwargs)

    @property
    def formulas(self) -> List[Formula]:
        return [f for _, f in self.premises]

    @property
    def atoms(self) -> List[str]:
        return atoms_of(self.formulas + [self.goal])

    def size(self) -> int:
        return sum(metrics(f).ast_size for f in self.formulas) + metrics(self.goal).ast_size

    def lines(self) -> List[str]:
        return [f"assert {name} := {show_formula(f)}" for name, f in self.premises]

    def render(self) -> str:
        """Problem text: one assert per premise, then the goal comment"""
        return '\n'.join(self.lines() + [f"# Goal: {show_formula(self.goal)}"]) + '\n'

    def oracle_ok(self) -> Optional[bool]:
        """Entailment verdict, or None above the atom budget"""
        if len(self.atoms) > ATOM_BUDGET:
            return None
        return entails(self.formulas, self.goal)

    def to_record(self) -> Dict:
        return {
            'family': self.family,
            'params': dict(self.params),
            'seed': self.seed,
            'problem': ' # '.join(show_formula(f) for f in self.formulas + [self.goal]),
            'problemText': self.render(),
            'conditionalized': bool(self.params.get('conditionalized', False)),
            'premises': [show_formula(f) for f in self.formulas],
            'goal': show_formula(self.goal),
            'alphaKey': alpha_key(self.formulas, self.goal),
            'atoms': len(self.atoms),
            'size': self.size(),
            'guaranteed': self.guaranteed,
        }


def derive_seed(seed: int, index: int) -> int:
    """Per-item seed; batches partition the seed space by item index"""
    return seed * 1_000_003 + index


def finalize(arg: Argument) -> Argument:
    """
    Confirm entailment with the oracle when the instance fits the budget

    Raises:
        ForgeError: if a generator produced a non-entailed argument
    """
    verdict = arg.oracle_ok()
    if verdict is None:
        arg.guaranteed = True
        logger.debug(f"[GEN] {arg.family}: {len(arg.atoms)} atoms, entailment by construction")
    elif not verdict:
        raise ForgeError(f"Generator {arg.family} produced a non-entailed argument {arg.params}")
    return arg


def minimal_premises(premises: Sequence[Formula], goal: Formula) -> List[Formula]:
    """Drop premises one at a time (in order) while the rest still entail goal"""
    kept = list(premises)
    k = 0
    while k < len(kept):
        trial = kept[:k] + kept[k + 1:]
        if entails(trial, goal):
            kept = trial
        else:
            k += 1
    return kept


def unsat_argument(family: str, formulas: Sequence[Formula], params: Dict, seed: Optional[int],
                   goal_mode: str = 'false', rng: Optional[random.Random] = None,
                   keep_redundant: bool = KEEP_REDUNDANT_PREMISES) -> Argument:
    """
    Pose a jointly unsatisfiable set as a forward-inference problem

    Args:
        goal_mode: 'false' keeps every formula and asks for false; 'negate'
            removes one formula and asks for its complement
        keep_redundant: Leave premises outside an unsatisfiable core in place
    """
    formulas = list(formulas)
    if goal_mode == 'false':
        goal = FALSE
    elif goal_mode == 'negate':
        rng = rng or random.Random(seed)
        removed = formulas.pop(rng.randrange(len(formulas)))
        goal = complement_of(removed)
    else:
        raise ValueError(f"Unknown goal mode '{goal_mode}'")

    if not keep_redundant and len(atoms_of(formulas + [goal])) <= ATOM_BUDGET:
        formulas = minimal_premises(formulas, goal)

    params = dict(params, goalMode=goal_mode)
    return finalize(Argument.from_formulas(formulas, goal, family=family, params=params, seed=seed))


# ============================================================================
# CONFIG
# ============================================================================

@dataclass
class GenConfig:
    seed: int = DEFAULT_SEED
    max_depth: int = PL1_MAX_DEPTH
    atom_pool: List[str] = field(default_factory=lambda: list(PL1_ATOM_POOL))
    connective_weights: Dict[str, float] = field(default_factory=lambda: dict(PL1_CONNECTIVE_WEIGHTS))
    min_premises: int = PL1_MIN_PREMISES
    max_premises: int = PL1_MAX_PREMISES
    max_retries: int = GEN_MAX_RETRIES
    keep_redundant: bool = KEEP_REDUNDANT_PREMISES
    family_params: Dict = field(default_factory=dict)

    def __post_init__(self):
        if self.max_depth < 1 or self.min_premises < 1 or self.max_premises < self.min_premises:
            raise ValueError("GenConfig needs max_depth >= 1 and 1 <= min_premises <= max_premises")
        if any(w < 0 for w in self.connective_weights.values()):
            raise ValueError("Connective weights must be non-negative")


# ============================================================================
# PL1
# ============================================================================

_CONNECTIVES = {'and': And, 'or': Or, 'implies': Implies, 'iff': Iff}
LEAF_PROBABILITY = 0.3


def random_formula(rng: random.Random, pool: Sequence[str], depth: int,
                   weights: Dict[str, float]) -> Formula:
    """Sample an AST of depth at most depth over the atom pool"""
    if depth <= 0 or rng.random() < LEAF_PROBABILITY:
        return Atom(rng.choice(list(pool)))
    names = list(weights)
    kind = rng.choices(names, weights=[weights[n] for n in names])[0]
    if kind == 'not':
        return Not(random_formula(rng, pool, depth - 1, weights))
    return _CONNECTIVES[kind](random_formula(rng, pool, depth - 1, weights),
                              random_formula(rng, pool, depth - 1, weights))


def _subformulas(f: Formula) -> List[Formula]:
    if isinstance(f, (Atom, Const)):
        return [f]
    if isinstance(f, Not):
        return [f] + _subformulas(f.arg)
    return [f] + _subformulas(f.left) + _subformulas(f.right)


def pl1_violations(premises: Sequence[Formula], goal: Formula) -> List[str]:
    """
    Names of the PL1 constraints an argument breaks (empty when valid)

    distinct, entailed, necessary, goal-atoms, consistent
    """
    premises = list(premises)
    violations = []
    if len(set(premises + [goal])) != len(premises) + 1:
        violations.append('distinct')
    if not entails(premises, goal):
        violations.append('entailed')
    elif any(entails(premises[:k] + premises[k + 1:], goal) for k in range(len(premises))):
        violations.append('necessary')
    if not set(atoms(goal)) <= set(atoms_of(premises)):
        violations.append('goal-atoms')
    if satisfiable(premises) is None or satisfiable([Not(goal)]) is None:
        violations.append('consistent')
    return violations


def gen_pl1(config: GenConfig, seed: Optional[int] = None, seen: Optional[Set[str]] = None) -> Argument:
    """
    Sample a PL1 argument satisfying every constraint

    Args:
        config: Generator settings
        seed: Overrides config.seed
        seen: Alpha keys already used; the new key is added

    Raises:
        GenerationExhausted: after config.max_retries rejected samples
    """
    seed = config.seed if seed is None else seed
    rng = random.Random(seed)
    seen = seen if seen is not None else set()
    for attempt in range(config.max_retries):
        width = rng.randint(2, len(config.atom_pool))
        pool = sorted(rng.sample(config.atom_pool, width))
        count = rng.randint(config.min_premises, config.max_premises)
        premises = [random_formula(rng, pool, rng.randint(1, config.max_depth), config.connective_weights)
                    for _ in range(count)]
        if rng.random() < 0.5:
            candidates = [f for p in premises for f in _subformulas(p)]
            goal = rng.choice(candidates)
        else:
            goal = random_formula(rng, pool, rng.randint(0, config.max_depth - 1), config.connective_weights)

        if pl1_violations(premises, goal):
            continue
        key = alpha_key(premises, goal)
        if key in seen:
            continue
        seen.add(key)
        logger.debug(f"[GEN] PL1 item after {attempt + 1} attempt(s): {count} premises, goal {show_formula(goal)}")
        return Argument.from_formulas(premises, goal, family='pl1', seed=seed,
                                      params={'atoms': len(atoms_of(premises))})
    raise GenerationExhausted('pl1', config.max_retries)


def gen_pl1_batch(config: GenConfig, count: int) -> List[Argument]:
    """count alpha-distinct PL1 arguments with per-index seeds"""
    seen: Set[str] = set()
    items = [gen_pl1(config, derive_seed(config.seed, k), seen) for k in range(count)]
    logger.info(f"[GEN] Generated {len(items)} PL1 arguments (seed {config.seed})")
    return items


def conditionalize(arg: Argument) -> Argument:
    """
    Fold the premises into the goal: {p1..pn} |- q becomes |- (p1 & ... & pn ==> q)

    Raises:
        ValueError: for an argument without premises
    """
    if not arg.premises:
        raise ValueError("Nothing to conditionalize: the argument has no premises")
    goal = Implies(conjoin(arg.formulas), arg.goal)
    return Argument([], goal, family=arg.family, params=dict(arg.params, conditionalized=True),
                    seed=arg.seed, guaranteed=arg.guaranteed)


# ============================================================================
# PL2 (gate diagnosis)
# ============================================================================

@dataclass
class Gate:
    index: int
    node: Formula
    children: Tuple[Formula, ...]
    path: Tuple[int, ...]


def _gates(p: Formula) -> List[Gate]:
    """Internal AST nodes numbered deepest level first, left to right within a level"""
    level = [((), p)]
    depth = 0
    found = []
    while level:
        following = []
        for order, (path, node) in enumerate(level):
            if isinstance(node, Not):
                found.append((depth, order, path, node, (node.arg,)))
                following.append((path + (0,), node.arg))
            elif isinstance(node, (And, Or, Implies, Iff)):
                found.append((depth, order, path, node, (node.left, node.right)))
                following.append((path + (0,), node.left))
                following.append((path + (1,), node.right))
        level = following
        depth += 1
    found.sort(key=lambda item: (-item[0], item[1]))
    return [Gate(k + 1, node, children, path) for k, (_, _, path, node, children) in enumerate(found)]


def _gate_definitions(p: Formula) -> Tuple[List[Gate], Dict[Tuple[int, ...], Atom], List[Formula]]:
    gates = _gates(p)
    wires = {g.path: Atom(f"G{g.index}") for g in gates}
    definitions = []
    for g in gates:
        inputs = tuple(wires.get(g.path + (k,), child) for k, child in enumerate(g.children))
        op = Not(inputs[0]) if isinstance(g.node, Not) else type(g.node)(*inputs)
        definitions.append(Implies(Atom(f"N{g.index}"), Iff(wires[g.path], op)))
    return gates, wires, definitions


def _transform_guard(rng: random.Random, definition: Implies) -> Formula:
    """A guarded conditional becomes its disjunction form or its contrapositive"""
    if rng.random() < 0.5:
        return Or(Not(definition.left), definition.right)
    return Implies(Not(definition.right), Not(definition.left))


def gen_pl2_ab(p: Formula, seed: int, transform: bool = True) -> Argument:
    """
    Gate-diagnosis argument for formula p

    Every internal node v of p gets a wire atom Gv and a normality atom Nv with
    the guarded definition Nv ==> (Gv <=> op(inputs)); with the observations p
    and ~G_root, at least one gate is abnormal.

    Raises:
        ValueError: if p has no internal node
    """
    gates, wires, definitions = _gate_definitions(p)
    if not gates:
        raise ValueError(f"{show_formula(p)} has no gates")
    rng = random.Random(seed)
    if transform:
        definitions = [_transform_guard(rng, d) for d in definitions]
    root = wires[()]
    premises = definitions + [p, Not(root)]
    goal = disjoin([Not(Atom(f"N{g.index}")) for g in gates])
    arg = Argument.from_formulas(premises, goal, family='pl2', seed=seed, params={'gates': len(gates)})
    return finalize(arg)


def proper_abduction(p: Formula, seed: int, transform: bool = True,
                     interpretation: Optional[Dict[str, bool]] = None,
                     gate_index: Optional[int] = None) -> Argument:
    """
    Diagnosis of a single gate under a concrete test case

    Picks an interpretation of p's atoms and a gate v, observes the opposite
    of v's expected output, and asks for an abnormal gate among v and the
    gates feeding it.
    """
    gates, wires, definitions = _gate_definitions(p)
    if not gates:
        raise ValueError(f"{show_formula(p)} has no gates")
    rng = random.Random(seed)
    names = sorted(atoms(p))
    drawn = {name: rng.random() < 0.5 for name in names}
    interpretation = interpretation if interpretation is not None else drawn
    drawn_gate = rng.choice(gates)
    gate = drawn_gate if gate_index is None else gates[gate_index - 1]
    expected = evaluate(gate.node, interpretation)
    wire = wires[gate.path]
    observation = Not(wire) if expected else wire
    test_case = conjoin([Atom(n) if interpretation[n] else Not(Atom(n)) for n in names])
    feeding = [g for g in gates if g.path[:len(gate.path)] == gate.path]
    if transform:
        definitions = [_transform_guard(rng, d) for d in definitions]
    goal = disjoin([Not(Atom(f"N{g.index}")) for g in sorted(feeding, key=lambda g: g.index)])
    params = {'gate': gate.index, 'interpretation': interpretation}
    arg = Argument.from_formulas(definitions + [test_case, observation], goal,
                                 family='pl2-abduction', seed=seed, params=params)
    return finalize(arg)


def gen_pl2_pw_from_pl1(arg: Argument, seed: int) -> Argument:
    """
    Lift a PL1 argument into a gate-diagnosis problem

    The premises and goal are sorted by decreasing size, a random initial
    segment (at least two formulas) is kept, each member is negated with
    probability 0.5 and the results are folded with random connectives.
    """
    rng = random.Random(seed)
    pool = sorted(arg.formulas + [arg.goal], key=lambda f: -metrics(f).ast_size)
    if len(pool) < 2:
        raise ValueError("Need at least two formulas to build a circuit")
    segment = pool[:rng.randint(2, len(pool))]
    parts = [Not(f) if rng.random() < 0.5 else f for f in segment]
    p = parts[0]
    for part in parts[1:]:
        p = rng.choice([And, Or, Implies, Iff])(p, part)
    result = gen_pl2_ab(p, seed)
    result.params.update({'source': show_formula(p), 'segment': len(segment)})
    return result


# ============================================================================
# PL1 PROOF-CENTRIC ITEMS
# ============================================================================

def gen_pl1_pc_item(config: GenConfig, seed: int, corrupt: Optional[bool] = None) -> Dict:
    """
    Proof-checking item: an argument, a proof, and the gold verdict

    Half of the items (unless corrupt is given) carry a seeded corruption with
    its ground-truth error record.
    """
    rng = random.Random(seed)
    arg = gen_pl1(config, seed)
    proof = write_case_analysis_proof(arg.premises, arg.goal)
    corrupt = rng.random() < 0.5 if corrupt is None else corrupt
    record = arg.to_record()
    if corrupt:
        corrupted = corrupt_ndl_proof(arg.premises, arg.goal, proof, seed)
        record.update({'proof': corrupted.text, 'correctProof': False, 'error': corrupted.error})
    else:
        record.update({'proof': proof, 'correctProof': True, 'error': None})
    return record


def gen_pl1_pm_item(config: GenConfig, seed: int) -> Dict:
    """Masking item: masked proof text plus the gold assignment and mask kinds"""
    rng = random.Random(seed)
    arg = gen_pl1(config, seed)
    proof = write_case_analysis_proof(arg.premises, arg.goal)
    masked = mask_proof(proof, rng.uniform(*MASK_FRACTION_RANGE), seed)
    record = arg.to_record()
    record.update({'proof': proof, 'correctProof': True, 'maskedProof': masked.text, 'masks': masked.assignment,
                   'maskKinds': masked.kinds, 'density': masked.density})
    return record


def gen_pl1_gf_item(config: GenConfig, seed: int) -> Dict:
    """Gap-filling item: gapped proof text plus the gold fills"""
    rng = random.Random(seed)
    arg = gen_pl1(config, seed)
    proof = write_case_analysis_proof(arg.premises, arg.goal)
    gapped = insert_gaps(proof, rng.uniform(*GAP_FRACTION_RANGE), seed)
    record = arg.to_record()
    record.update({'proof': proof, 'gappedProof': gapped.text, 'gaps': gapped.gold, 'elided': gapped.fraction})
    return record


# ============================================================================
# CLAUSES AND DIMACS
# ============================================================================

def _literal(f: Formula) -> Optional[Tuple[str, bool]]:
    if isinstance(f, Atom):
        return f.name, True
    if isinstance(f, Not) and isinstance(f.arg, Atom):
        return f.arg.name, False
    return None


def _literals(parts: Sequence[Formula]) -> Optional[Clause]:
    lits = [_literal(p) for p in parts]
    return None if any(lit is None for lit in lits) else lits


def clauses_of(f: Formula) -> List[Clause]:
    """
    Clauses of a clause-shaped formula

    Accepts literals, disjunctions of literals, conjunctions of those, negated
    conjunctions of literals and conditionals from a conjunction of literals
    to a disjunction or conjunction of literals (or false).

    Raises:
        ValueError: for anything else
    """
    lits = _literals(flatten_or(f))
    if lits is not None:
        return [lits]
    if isinstance(f, And):
        return clauses_of(f.left) + clauses_of(f.right)
    if isinstance(f, Not) and isinstance(f.arg, And):
        body = _literals(flatten_and(f.arg))
        if body is not None:
            return [[(name, not sign) for name, sign in body]]
    if isinstance(f, Implies):
        body = _literals(flatten_and(f.left))
        if body is not None:
            negated = [(name, not sign) for name, sign in body]
            if f.right == FALSE:
                return [negated]
            head = _literals(flatten_or(f.right))
            if head is not None:
                return [negated + head]
            conjuncts = _literals(flatten_and(f.right))
            if conjuncts is not None:
                return [negated + [lit] for lit in conjuncts]
    raise ValueError(f"{show_formula(f)} is not clause-shaped")


def declausify(clause: Sequence[Formula]) -> Formula:
    """
    Conditional reading of a clause of literals

    (~a | ~b | c) becomes (a & b ==> c); an all-negative clause keeps its last
    literal as the negated consequent; a positive clause stays a disjunction.
    """
    negatives = [lit.arg for lit in clause if isinstance(lit, Not)]
    positives = [lit for lit in clause if not isinstance(lit, Not)]
    if not negatives:
        return disjoin(positives)
    if positives:
        return Implies(conjoin(negatives), disjoin(positives))
    if len(negatives) == 1:
        return Not(negatives[0])
    return Implies(conjoin(negatives[:-1]), Not(negatives[-1]))


def to_dimacs(arg: Argument) -> str:
    """
    DIMACS CNF of the premises plus the complement of the goal

    Raises:
        ValueError: if a formula is not clause-shaped
    """
    formulas = arg.formulas if arg.goal == FALSE else arg.formulas + [complement_of(arg.goal)]
    clauses = [clause for f in formulas for clause in clauses_of(f)]
    numbering: Dict[str, int] = {}
    for clause in clauses:
        for name, _ in clause:
            numbering.setdefault(name, len(numbering) + 1)
    lines = [f"c {arg.family} {arg.params}"]
    lines += [f"c {number} {name}" for name, number in numbering.items()]
    lines.append(f"p cnf {len(numbering)} {len(clauses)}")
    for clause in clauses:
        lits = [str(numbering[name] if sign else -numbering[name]) for name, sign in clause]
        lines.append(' '.join(lits + ['0']))
    return '\n'.join(lines) + '\n'


def at_least_direct(lits: Sequence[Formula], k: int) -> List[Formula]:
    """At least k of lits: every (n-k+1)-subset has a true member"""
    if k <= 0:
        return []
    return [disjoin(list(subset)) for subset in combinations(lits, len(lits) - k + 1)]


def at_most_direct(lits: Sequence[Formula], k: int) -> List[Formula]:
    """
    At most k of lits, as conditionals

    k = 0 negates every literal; k = 1 reads each literal as excluding the
    rest (a single conditional for a pair); larger k excludes every (k+1)-subset.
    """
    lits = list(lits)
    if k >= len(lits):
        return []
    if k == 0:
        return [complement_of(lit) for lit in lits]
    if k == 1:
        if len(lits) == 2:
            return [Implies(lits[0], complement_of(lits[1]))]
        return [Implies(lit, conjoin([complement_of(o) for m, o in enumerate(lits) if m != k_]))
                for k_, lit in enumerate(lits)]
    return [Implies(conjoin(list(subset[:-1])), complement_of(subset[-1]))
            for subset in combinations(lits, k + 1)]


def at_most_counter(lits: Sequence[Formula], k: int, tag: str) -> List[Formula]:
    """
    At most k of lits via a sequential counter, declausified

    Auxiliary atom S_{tag}_{i}_{j} holds when at least j of the first i
    literals hold.
    """
    lits = list(lits)
    n = len(lits)
    if k >= n:
        return []
    if k == 0:
        return [complement_of(lit) for lit in lits]

    def s(i, j):
        return Atom(f"S_{tag}_{i}_{j}")

    clauses = [[complement_of(lits[0]), s(1, 1)]]
    clauses += [[Not(s(1, j))] for j in range(2, k + 1)]
    for i in range(2, n):
        x = lits[i - 1]
        clauses.append([complement_of(x), s(i, 1)])
        clauses.append([Not(s(i - 1, 1)), s(i, 1)])
        for j in range(2, k + 1):
            clauses.append([complement_of(x), Not(s(i - 1, j - 1)), s(i, j)])
            clauses.append([Not(s(i - 1, j)), s(i, j)])
        clauses.append([complement_of(x), Not(s(i - 1, k))])
    clauses.append([complement_of(lits[n - 1]), Not(s(n - 1, k))])
    return [declausify(clause) for clause in clauses]


def at_least(lits: Sequence[Formula], k: int, encoding: str = 'direct', tag: str = '') -> List[Formula]:
    if encoding == 'counter':
        return at_most_counter([complement_of(lit) for lit in lits], len(lits) - k, f"L{tag}")
    return at_least_direct(lits, k)


def at_most(lits: Sequence[Formula], k: int, encoding: str = 'direct', tag: str = '') -> List[Formula]:
    if encoding == 'counter':
        return at_most_counter(lits, k, tag)
    return at_most_direct(lits, k)
