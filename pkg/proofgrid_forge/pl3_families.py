"""
PL3 Problem Families

Generators for the solver-era families, each posed as forward inference:
- Pyramid pebbling (two atoms per node, four precedence conditionals per
  internal node) and simple Horn pebbling with equivalence-preserving rewrites
- Graph 3-colouring of random graphs that are not 3-colourable (exact
  backtracking filter, recursion count kept as difficulty)
- Relativized pigeonhole, subset cardinality, Tseitin parity and counting
  principle instances (unsatisfiable sets, goal false or a negated member)
- De Bruijn formulas and a case-analysis proof writer for odd n

Usage:
    arg = gen_rel_php(2, 2, 1)
    record = gen_pl3_item('tseitin', seed=5)
"""

import logging
import math
import random
import string
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

try:
    from .config import (
        COLORING_COLORS, COLORING_EDGE_PROB_RANGE, COLORING_MAX_NODES, GEN_MAX_RETRIES,
        KEEP_REDUNDANT_PREMISES, SIMPLE_PEBBLING_MAX_DEPTH,
    )
    from .errors import GenerationExhausted
    from .formula import (
        FALSE, And, Atom, Formula, Iff, Implies, Not, Or, complement_of, conjoin, disjoin, flatten_and,
    )
    from .ndl_engine import Assume, Compose, ProofScript, RuleApp, Step, print_proof
    from .problem_gen import Argument, at_least, at_most, finalize, unsat_argument
except ImportError:
    from config import (
        COLORING_COLORS, COLORING_EDGE_PROB_RANGE, COLORING_MAX_NODES, GEN_MAX_RETRIES,
        KEEP_REDUNDANT_PREMISES, SIMPLE_PEBBLING_MAX_DEPTH,
    )
    from errors import GenerationExhausted
    from formula import (
        FALSE, And, Atom, Formula, Iff, Implies, Not, Or, complement_of, conjoin, disjoin, flatten_and,
    )
    from ndl_engine import Assume, Compose, ProofScript, RuleApp, Step, print_proof
    from problem_gen import Argument, at_least, at_most, finalize, unsat_argument

logger = logging.getLogger(__name__)

Edge = Tuple[int, int]


# ============================================================================
# GRAPHS
# ============================================================================

def erdos_renyi(n: int, p: float, rng: random.Random) -> List[Edge]:
    """G(n, p): each of the n(n-1)/2 vertex pairs is an edge with probability p"""
    return [(u, v) for u, v in combinations(range(n), 2) if rng.random() < p]


def is_connected(n: int, edges: Sequence[Edge]) -> bool:
    if n == 0:
        return True
    adjacency = {v: set() for v in range(n)}
    for u, v in edges:
        adjacency[u].add(v)
        adjacency[v].add(u)
    seen = {0}
    frontier = [0]
    while frontier:
        for w in adjacency[frontier.pop()]:
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return len(seen) == n


def color_graph(n: int, edges: Sequence[Edge], colors: int) -> Tuple[Optional[List[int]], int]:
    """
    Exact backtracking colouring in vertex order

    Returns:
        (colouring or None, number of recursive calls)
    """
    adjacency = {v: set() for v in range(n)}
    for u, v in edges:
        adjacency[u].add(v)
        adjacency[v].add(u)
    assignment = [-1] * n
    calls = 0

    def place(v: int) -> bool:
        nonlocal calls
        calls += 1
        if v == n:
            return True
        for c in range(colors):
            if all(assignment[w] != c for w in adjacency[v]):
                assignment[v] = c
                if place(v + 1):
                    return True
        assignment[v] = -1
        return False

    found = place(0)
    return (list(assignment) if found else None), calls


# ============================================================================
# PEBBLING
# ============================================================================

def _node_letter(index: int) -> str:
    letters = string.ascii_uppercase
    return letters[index] if index < 26 else f"{letters[index // 26 - 1]}{letters[index % 26]}"


def gen_pyramid_pebbling(height: int) -> Argument:
    """
    Pyramid of the given height (rows 0..height, row r has r+1 nodes)

    Node v carries atoms v1 and v2. Sources get (v1 | v2); a node above
    children u and w gets (ui & wj ==> (v1 | v2)) for i, j in {1, 2}. The
    goal is the disjunction at the top.
    """
    if height < 1:
        raise ValueError("Pyramid height must be at least 1")

    def node(r: int, c: int) -> str:
        return _node_letter(r * (r + 1) // 2 + c)

    def pair(name: str) -> Formula:
        return Or(Atom(f"{name}1"), Atom(f"{name}2"))

    formulas = [pair(node(height, c)) for c in range(height + 1)]
    for r in range(height - 1, -1, -1):
        for c in range(r + 1):
            v, u, w = node(r, c), node(r + 1, c), node(r + 1, c + 1)
            for i in (1, 2):
                for j in (1, 2):
                    formulas.append(Implies(And(Atom(f"{u}{i}"), Atom(f"{w}{j}")), pair(v)))
    arg = Argument.from_formulas(formulas, pair(node(0, 0)), family='pyramid-pebbling',
                                 params={'height': height})
    return finalize(arg)


def simple_pebbling_premises(predecessors: Dict[int, Sequence[int]], n: int) -> List[Formula]:
    """Horn premises of a DAG over A1..An: sources as atoms, (preds ==> node) otherwise"""
    formulas = []
    for v in range(1, n + 1):
        preds = sorted(predecessors.get(v, ()))
        if preds:
            formulas.append(Implies(conjoin([Atom(f"A{u}") for u in preds]), Atom(f"A{v}")))
        else:
            formulas.append(Atom(f"A{v}"))
    return formulas


def rewrite_horn(formula: Formula, rng: random.Random) -> Formula:
    """
    Re-read a Horn conditional through its clause

    A random nonempty proper subset of the clause's literals moves to the
    antecedent (complemented); the rest form the consequent.
    """
    if not isinstance(formula, Implies):
        return formula
    body = flatten_and(formula.left)
    literals = [Not(b) for b in body] + [formula.right]
    size = rng.randint(1, len(literals) - 1)
    chosen = set(rng.sample(range(len(literals)), size))
    antecedent = conjoin([complement_of(literals[k]) for k in sorted(chosen)])
    consequent = disjoin([literals[k] for k in range(len(literals)) if k not in chosen])
    return Implies(antecedent, consequent)


def gen_simple_pebbling(depth: Optional[int] = None, seed: int = 0, rewrite_prob: float = 0.5,
                        extra_edge_prob: float = 0.3) -> Argument:
    """
    Layered Horn pebbling DAG with a single sink

    Layer 0 holds the sources; each later node draws predecessors from the
    previous layer plus, with extra_edge_prob, one from an earlier layer.
    Every non-sink node feeds some later node. Conditionals are rewritten with
    probability rewrite_prob.
    """
    rng = random.Random(seed)
    depth = depth if depth is not None else rng.randint(2, SIMPLE_PEBBLING_MAX_DEPTH)
    if depth < 2:
        raise ValueError("Simple pebbling needs at least two layers")

    layers: List[List[int]] = []
    counter = 0
    for level in range(depth):
        width = 1 if level == depth - 1 else rng.randint(1, 2)
        layers.append(list(range(counter + 1, counter + width + 1)))
        counter += width
    n = counter

    predecessors: Dict[int, set] = {}
    for level in range(1, depth):
        earlier = [v for layer in layers[:level - 1] for v in layer]
        for v in layers[level]:
            preds = set(rng.sample(layers[level - 1], rng.randint(1, len(layers[level - 1]))))
            if earlier and rng.random() < extra_edge_prob:
                preds.add(rng.choice(earlier))
            predecessors[v] = preds

    for level in range(depth - 1):
        for v in layers[level]:
            if not any(v in preds for preds in predecessors.values()):
                predecessors[rng.choice(layers[level + 1])].add(v)

    premises = simple_pebbling_premises(predecessors, n)
    premises = [rewrite_horn(f, rng) if rng.random() < rewrite_prob else f for f in premises]
    arg = Argument.from_formulas(premises, Atom(f"A{n}"), family='simple-pebbling', seed=seed,
                                 params={'depth': depth, 'nodes': n})
    return finalize(arg)


# ============================================================================
# GRAPH COLOURING
# ============================================================================

def coloring_formulas(n: int, edges: Sequence[Edge], colors: int) -> List[Formula]:
    """Standard encoding over atoms C{vertex}_{colour} (both 1-based)"""
    def x(v, c):
        return Atom(f"C{v + 1}_{c + 1}")

    formulas = []
    for v in range(n):
        formulas.append(disjoin([x(v, c) for c in range(colors)]))
        for c1, c2 in combinations(range(colors), 2):
            formulas.append(Implies(x(v, c1), Not(x(v, c2))))
    for u, v in edges:
        for c in range(colors):
            formulas.append(Implies(x(u, c), Not(x(v, c))))
    return formulas


def gen_graph_coloring(n: Optional[int] = None, p: Optional[float] = None, seed: int = 0,
                       colors: int = COLORING_COLORS, goal_mode: str = 'false',
                       keep_redundant: bool = KEEP_REDUNDANT_PREMISES) -> Argument:
    """
    Colouring constraints of a random graph that has no proper colouring

    Graphs are redrawn until backtracking finds no colouring; the recursion
    count of that refutation is recorded as params['difficulty'].

    Raises:
        GenerationExhausted: if every draw was colourable
    """
    rng = random.Random(seed)
    for attempt in range(GEN_MAX_RETRIES):
        size = n if n is not None else rng.randint(colors + 1, COLORING_MAX_NODES)
        prob = p if p is not None else rng.uniform(*COLORING_EDGE_PROB_RANGE)
        edges = erdos_renyi(size, prob, rng)
        coloring, calls = color_graph(size, edges, colors)
        if coloring is not None:
            continue
        params = {'nodes': size, 'edgeProbability': round(prob, 4), 'edges': len(edges),
                  'colors': colors, 'difficulty': calls}
        logger.debug(f"[GEN] Non-{colors}-colourable graph after {attempt + 1} draw(s), difficulty {calls}")
        return unsat_argument('graph-coloring', coloring_formulas(size, edges, colors), params, seed,
                              goal_mode, rng, keep_redundant)
    raise GenerationExhausted('graph-coloring', GEN_MAX_RETRIES)


# ============================================================================
# RELATIVIZED PIGEONHOLE
# ============================================================================

def rel_php_formulas(m: int, t: int, n: int) -> List[Formula]:
    """
    Pigeons 1..m via resting places 1..t into holes 1..n

    P_i_k: pigeon i rests at k; Q_k_j: place k routes to hole j.
    """
    def P(i, k):
        return Atom(f"P_{i}_{k}")

    def Q(k, j):
        return Atom(f"Q_{k}_{j}")

    formulas = [disjoin([P(i, k) for k in range(1, t + 1)]) for i in range(1, m + 1)]
    for k in range(1, t + 1):
        for i, j in combinations(range(1, m + 1), 2):
            formulas.append(Implies(P(i, k), Not(P(j, k))))
    for i in range(1, m + 1):
        for k in range(1, t + 1):
            formulas.append(Implies(P(i, k), disjoin([Q(k, j) for j in range(1, n + 1)])))
    for j in range(1, n + 1):
        for k1, k2 in combinations(range(1, t + 1), 2):
            formulas.append(Implies(Q(k1, j), Not(Q(k2, j))))
    return formulas


def gen_rel_php(m: int, t: int, n: int, goal_mode: str = 'false', seed: int = 0,
                keep_redundant: bool = KEEP_REDUNDANT_PREMISES) -> Argument:
    """
    Relativized pigeonhole instance; satisfiable exactly when m <= t <= n

    Raises:
        ValueError: for a satisfiable triple
    """
    if m <= t <= n:
        raise ValueError(f"m={m}, t={t}, n={n} satisfies m <= t <= n; the instance is satisfiable")
    return unsat_argument('rel-php', rel_php_formulas(m, t, n), {'m': m, 't': t, 'n': n}, seed,
                          goal_mode, keep_redundant=keep_redundant)


# ============================================================================
# SUBSET CARDINALITY
# ============================================================================

def subset_card_formulas(left: int, right: int, edges: Sequence[Edge],
                         encoding: str = 'direct') -> List[Formula]:
    """
    Left vertices select at least half their edges, right vertices at most half

    Edge (i, j) is the atom X{i}{letter} with i 1-based on the left and the
    right side lettered A, B, ...
    """
    def x(i, j):
        return Atom(f"X{i + 1}{_node_letter(j)}")

    formulas = []
    for i in range(left):
        lits = [x(i, j) for (a, j) in edges if a == i]
        if lits:
            formulas += at_least(lits, math.ceil(len(lits) / 2), encoding, f"L{i + 1}")
    for j in range(right):
        lits = [x(i, j) for (i, b) in sorted(edges) if b == j]
        if lits:
            formulas += at_most(lits, len(lits) // 2, encoding, f"R{_node_letter(j)}")
    return formulas


def _cardinality_gap(left: int, right: int, edges: Sequence[Edge]) -> int:
    """Forced selections on the left minus allowed selections on the right"""
    degree_l = [sum(1 for a, _ in edges if a == i) for i in range(left)]
    degree_r = [sum(1 for _, b in edges if b == j) for j in range(right)]
    return sum(math.ceil(d / 2) for d in degree_l) - sum(d // 2 for d in degree_r)


def gen_subset_card(left: Optional[int] = None, right: Optional[int] = None,
                    edges: Optional[Sequence[Edge]] = None, seed: int = 0,
                    encoding: str = 'direct', goal_mode: str = 'negate', edge_prob: float = 0.5,
                    keep_redundant: bool = KEEP_REDUNDANT_PREMISES) -> Argument:
    """
    Subset-cardinality instance over a bipartite graph

    Random graphs are redrawn until the left side forces more selected edges
    than the right side allows, which makes the constraints unsatisfiable.

    Raises:
        ValueError: for given edges without that counting gap
        GenerationExhausted: if no random graph qualifies
    """
    rng = random.Random(seed)
    if edges is not None:
        if _cardinality_gap(left, right, edges) <= 0:
            raise ValueError("Edges leave no counting gap; the instance may be satisfiable")
    else:
        for _ in range(GEN_MAX_RETRIES):
            left = left if left is not None else rng.randint(2, 5)
            right = right if right is not None else rng.randint(2, 5)
            drawn = [(i, j) for i in range(left) for j in range(right) if rng.random() < edge_prob]
            touched_l = {i for i, _ in drawn}
            touched_r = {j for _, j in drawn}
            if len(touched_l) == left and len(touched_r) == right and _cardinality_gap(left, right, drawn) > 0:
                edges = drawn
                break
        else:
            raise GenerationExhausted('subset-cardinality', GEN_MAX_RETRIES)
    params = {'left': left, 'right': right, 'edges': len(edges), 'encoding': encoding}
    return unsat_argument('subset-cardinality', subset_card_formulas(left, right, edges, encoding),
                          params, seed, goal_mode, rng, keep_redundant)


# ============================================================================
# TSEITIN
# ============================================================================

def xor(p: Formula, q: Formula) -> Formula:
    return Or(And(p, Not(q)), And(q, Not(p)))


def tseitin_definitions(n: int, edges: Sequence[Edge]) -> List[Formula]:
    """Node atom (A, B, ...) <=> XOR of its incident edge atoms X1, X2, ..."""
    definitions = []
    for v in range(n):
        incident = [Atom(f"X{k + 1}") for k, (a, b) in enumerate(edges) if v in (a, b)]
        if not incident:
            raise ValueError(f"Node {_node_letter(v)} has no incident edge")
        parity = incident[0]
        for atom in incident[1:]:
            parity = xor(parity, atom)
        definitions.append(Iff(Atom(_node_letter(v)), parity))
    return definitions


def gen_tseitin(n: Optional[int] = None, edges: Optional[Sequence[Edge]] = None,
                charge: Optional[Sequence[bool]] = None, seed: int = 0,
                edge_prob: float = 0.5) -> Argument:
    """
    Tseitin parity problem: from the node definitions, refute a node
    assignment with an odd number of true nodes

    Args:
        n: Node count (random 3-6 when omitted)
        edges: Edge list; a connected random graph is drawn when omitted
        charge: Node truth values with an odd number of True entries
        seed: RNG seed
    """
    rng = random.Random(seed)
    if edges is not None and n is None:
        n = 1 + max(max(edge) for edge in edges)
    if edges is None:
        n = n if n is not None else rng.randint(3, 6)
        for _ in range(GEN_MAX_RETRIES):
            edges = erdos_renyi(n, edge_prob, rng)
            if is_connected(n, edges):
                break
        else:
            raise GenerationExhausted('tseitin', GEN_MAX_RETRIES)
    if charge is None:
        while True:
            charge = [rng.random() < 0.5 for _ in range(n)]
            if sum(charge) % 2 == 1:
                break
    if sum(charge) % 2 != 1:
        raise ValueError("The charge must make an odd number of nodes true")
    literals = [Atom(_node_letter(v)) if on else Not(Atom(_node_letter(v))) for v, on in enumerate(charge)]
    arg = Argument.from_formulas(tseitin_definitions(n, edges), Not(conjoin(literals)),
                                 family='tseitin', seed=seed, params={'nodes': n, 'edges': len(edges)})
    return finalize(arg)


# ============================================================================
# COUNTING PRINCIPLE
# ============================================================================

def counting_formulas(M: int, p: int, encoding: str = 'direct') -> List[Formula]:
    """Partition M elements into ceil(M/p) blocks of exactly p (atoms X{e}_{b})"""
    blocks = math.ceil(M / p)

    def x(e, b):
        return Atom(f"X{e}_{b}")

    formulas = []
    for e in range(1, M + 1):
        formulas.append(disjoin([x(e, b) for b in range(1, blocks + 1)]))
        for b1, b2 in combinations(range(1, blocks + 1), 2):
            formulas.append(Implies(x(e, b1), Not(x(e, b2))))
    for b in range(1, blocks + 1):
        lits = [x(e, b) for e in range(1, M + 1)]
        formulas += at_least(lits, p, encoding, f"B{b}")
        formulas += at_most(lits, p, encoding, f"B{b}")
    return formulas


def gen_counting(M: int, p: int, goal_mode: str = 'false', seed: int = 0, encoding: str = 'direct',
                 keep_redundant: bool = KEEP_REDUNDANT_PREMISES) -> Argument:
    """
    Counting-principle instance; satisfiable exactly when p divides M

    Raises:
        ValueError: when p divides M
    """
    if p < 1 or M % p == 0:
        raise ValueError(f"p={p} divides M={M}; the instance is satisfiable")
    params = {'M': M, 'p': p, 'blocks': math.ceil(M / p), 'encoding': encoding}
    return unsat_argument('counting', counting_formulas(M, p, encoding), params, seed, goal_mode,
                          keep_redundant=keep_redundant)


# ============================================================================
# DE BRUIJN
# ============================================================================

def _debruijn_parts(n: int) -> Tuple[List[Formula], Formula]:
    names = [Atom(f"A{k}") for k in range(1, n + 1)]
    q = conjoin(names)
    conditionals = [Implies(Iff(names[k], names[(k + 1) % n]), q) for k in range(n)]
    return conditionals, q


def debruijn_formula(n: int) -> Formula:
    """(p ==> q) with q = A1 & ... & An and p the conjunction of ((Ak <=> Ak+1) ==> q), cyclic"""
    if n < 1:
        raise ValueError("De Bruijn index must be positive")
    conditionals, q = _debruijn_parts(n)
    return Implies(conjoin(conditionals), q)


def debruijn_countermodel(n: int) -> Dict[str, bool]:
    """Alternating assignment; falsifies the formula for even n"""
    return {f"A{k}": k % 2 == 1 for k in range(1, n + 1)}


def gen_debruijn(n: int) -> Argument:
    """
    Premise-free De Bruijn problem

    Raises:
        ValueError: for even n (the formula is not a tautology)
    """
    if n < 1 or n % 2 == 0:
        raise ValueError(f"De Bruijn formula {n} is only valid for odd n")
    return finalize(Argument([], debruijn_formula(n), family='debruijn', params={'n': n}))


def _rule(rule: str, *args: Formula, name: Optional[str] = None) -> Step:
    return Step(name, RuleApp(rule, tuple(args)))


def _assume(hypothesis: Formula, steps: Sequence[Step], name: Optional[str] = None) -> Step:
    return Step(None, Assume(hypothesis, name, Compose(tuple(steps))))


def _biconditional(a: Atom, b: Atom, value: bool) -> List[Step]:
    """Derive (a <=> b) when a and b share the given value"""
    if value:
        forward = _assume(a, [_rule('claim', b)])
        backward = _assume(b, [_rule('claim', a)])
    else:
        forward = _assume(a, [_rule('from-complements', b, a, Not(a))])
        backward = _assume(b, [_rule('from-complements', a, b, Not(b))])
    return [forward, backward, _rule('equiv', Implies(a, b), Implies(b, a))]


def _cycle_branch(n: int, first: bool) -> List[Step]:
    """Walk the cycle from A1 = first, forcing alternating values, until Dn breaks"""
    atoms_ = [Atom(f"A{k}") for k in range(1, n + 1)]
    steps = []
    value = first
    for k in range(n - 1):
        a, b = atoms_[k], atoms_[k + 1]
        refuted = Atom(f"d{k + 1}")
        # b must differ from a: assuming b has a's value yields (a <=> b)
        same = b if value else Not(b)
        body = _biconditional(a, b, value) + [_rule('absurd', Iff(a, b), refuted)]
        steps.append(_assume(same, body))
        steps.append(_rule('by-contradiction', complement_of(same), Implies(same, FALSE)))
        value = not value
    last, head = atoms_[n - 1], atoms_[0]
    steps += _biconditional(last, head, value)
    steps.append(_rule('absurd', Iff(last, head), Atom(f"d{n}")))
    return steps


def write_debruijn_proof(n: int) -> ProofScript:
    """
    NDL proof of the n-th De Bruijn formula (n odd)

    Assume p and suppose ~q. Each conditional of p then yields a broken
    biconditional by mt. A case split on A1 forces alternating values around
    the cycle; since n is odd, An and A1 agree, contradicting the last one.

    Raises:
        ValueError: for even n
    """
    if n < 1 or n % 2 == 0:
        raise ValueError(f"De Bruijn formula {n} is only valid for odd n")
    conditionals, q = _debruijn_parts(n)
    a1 = Atom('A1')

    outer = []
    names = []
    rest = Atom('h')
    for k in range(1, n):
        outer.append(_rule('left-and', rest, name=f"c{k}"))
        outer.append(_rule('right-and', rest, name=f"r{k}"))
        names.append(Atom(f"c{k}"))
        rest = Atom(f"r{k}")
    names.append(rest)

    refutation = [_rule('mt', names[k], Atom('nq'), name=f"d{k + 1}") for k in range(n)]
    refutation += [
        _rule('ex-middle', a1),
        _assume(a1, _cycle_branch(n, True)),
        _assume(Not(a1), _cycle_branch(n, False)),
        _rule('cases', Or(a1, Not(a1)), Implies(a1, FALSE), Implies(Not(a1), FALSE)),
    ]
    outer.append(_assume(Not(q), refutation, name='nq'))
    outer.append(_rule('by-contradiction', q, Implies(Not(q), FALSE)))

    body = Compose((Step(None, Assume(conjoin(conditionals), 'h', Compose(tuple(outer)))),))
    return ProofScript((), body)


def debruijn_proof_text(n: int) -> str:
    return print_proof(write_debruijn_proof(n))


# ============================================================================
# ITEMS
# ============================================================================

PL3_FAMILIES = ('pyramid-pebbling', 'simple-pebbling', 'graph-coloring', 'rel-php',
                'subset-cardinality', 'tseitin', 'counting', 'debruijn')


def _violating_triple(rng: random.Random, limit: int = 3) -> Tuple[int, int, int]:
    while True:
        m, t, n = (rng.randint(1, limit) for _ in range(3))
        if not m <= t <= n:
            return m, t, n


def _non_dividing_pair(rng: random.Random, limit: int = 6) -> Tuple[int, int]:
    pairs = [(M, p) for M in range(3, limit + 1) for p in range(2, M) if M % p]
    return rng.choice(pairs)


def gen_pl3_argument(family: str, seed: int, **params) -> Argument:
    """One argument of a PL3 family with sampled defaults for missing parameters"""
    rng = random.Random(seed)
    if family == 'pyramid-pebbling':
        return gen_pyramid_pebbling(params.get('height', rng.randint(1, 3)))
    if family == 'simple-pebbling':
        return gen_simple_pebbling(params.get('depth'), seed)
    if family == 'graph-coloring':
        return gen_graph_coloring(params.get('n'), params.get('p'), seed)
    if family == 'rel-php':
        m, t, n = params.get('m'), params.get('t'), params.get('n')
        if m is None or t is None or n is None:
            m, t, n = _violating_triple(rng)
        return gen_rel_php(m, t, n, params.get('goal_mode', 'false'), seed)
    if family == 'subset-cardinality':
        return gen_subset_card(params.get('left'), params.get('right'), params.get('edges'), seed,
                               params.get('encoding', 'direct'))
    if family == 'tseitin':
        return gen_tseitin(params.get('n'), params.get('edges'), params.get('charge'), seed)
    if family == 'counting':
        M, p = params.get('M'), params.get('p')
        if M is None or p is None:
            M, p = _non_dividing_pair(rng)
        return gen_counting(M, p, params.get('goal_mode', 'false'), seed)
    if family == 'debruijn':
        return gen_debruijn(params.get('n', rng.choice(range(1, 12, 2))))
    raise ValueError(f"Unknown PL3 family '{family}'")


def gen_pl3_item(family: str, seed: int, **params) -> Dict:
    """Archive record of a PL3 argument (De Bruijn items carry the gold proof)"""
    arg = gen_pl3_argument(family, seed, **params)
    arg.seed = seed
    record = arg.to_record()
    if family == 'debruijn':
        record['proof'] = debruijn_proof_text(arg.params['n'])
    logger.info(f"[GEN] PL3 {family} item: {len(arg.premises)} premises, {len(arg.atoms)} atoms")
    return record
