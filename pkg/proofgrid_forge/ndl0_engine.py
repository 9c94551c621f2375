"""
NDL0 Proof Checker and Reasoning Graphs

NDL0 drops the rule catalog: every atomic step claims that a conclusion
follows semantically from at most five formulas in the assumption base.
- 'p from p1, ..., pn' checked by membership plus the truth-table oracle
- assume / composition / naming scaffolding shared with NDL
- Reasoning graph (premises and lemmas as nodes, argument -> conclusion arcs)
  and reasoning depth (longest source-to-sink path)
- Stepwise and whole-proof translation of NDL proofs into NDL0

Usage:
    report = check_ndl0(number_premises(premises), goal, proof_text)
    depth = reasoning_depth(parse_ndl0(proof_text), number_premises(premises))
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

try:
    from .config import NDL0_MAX_ARGS, NDL0_STRICT_CONJUNCT_CAP
    from .errors import ProofSyntaxError
    from .formula import (
        FALSE, TRUE, Formula, Implies, countermodel, flatten_and, parse_formula_tokens, show_formula, substitute,
    )
    from .ndl_engine import (
        RULES, Assume, AssumptionBase, ByAnnotated, CheckReport, Compose, Environment,
        NamedFormulas, NdlError, NdlEvaluator, NdlParser, NdlVerdict, ProofScript, RuleApp,
        Step, TraceEntry, check_script, print_proof,
    )
except ImportError:
    from config import NDL0_MAX_ARGS, NDL0_STRICT_CONJUNCT_CAP
    from errors import ProofSyntaxError
    from formula import (
        FALSE, TRUE, Formula, Implies, countermodel, flatten_and, parse_formula_tokens, show_formula, substitute,
    )
    from ndl_engine import (
        RULES, Assume, AssumptionBase, ByAnnotated, CheckReport, Compose, Environment,
        NamedFormulas, NdlError, NdlEvaluator, NdlParser, NdlVerdict, ProofScript, RuleApp,
        Step, TraceEntry, check_script, print_proof,
    )

logger = logging.getLogger(__name__)

SINK = 'false'


@dataclass(frozen=True)
class FromStep:
    conclusion: Formula
    args: Tuple[Formula, ...]
    line: int = 0
    column: int = 0

    def render(self) -> str:
        args = ', '.join(show_formula(a) for a in self.args)
        return f"{show_formula(self.conclusion)} from {args}"


# ============================================================================
# PARSER
# ============================================================================

class Ndl0Parser(NdlParser):
    """NDL scaffolding with 'conclusion from args' as the only atomic deduction"""

    def parse_atomic(self):
        stream = self.stream
        token = stream.peek()
        conclusion = parse_formula_tokens(stream)
        if not stream.at_keyword('from'):
            stream.fail(f"Unexpected {stream.describe(stream.peek())}", expected="'from'")
        stream.next()
        return FromStep(conclusion, tuple(self.parse_args()), token.line, token.column)


def parse_ndl0(text: str) -> ProofScript:
    """
    Parse an NDL0 listing

    Raises:
        ProofSyntaxError: with line and column of the offending token
    """
    return Ndl0Parser(text).parse_script()


def print_ndl0(script: ProofScript) -> str:
    return print_proof(script)


# ============================================================================
# EVALUATOR
# ============================================================================

class Ndl0Evaluator(NdlEvaluator):
    """
    Strict NDL0 interpreter

    Args:
        strict_conjunct_cap: Also bound the number of flattened conjuncts
            across all arguments by the argument cap
    """

    def __init__(self, vocabulary=None, record_trace: bool = False,
                 strict_conjunct_cap: bool = NDL0_STRICT_CONJUNCT_CAP, atom_budget: Optional[int] = None):
        super().__init__(vocabulary=vocabulary, record_trace=record_trace)
        self.strict_conjunct_cap = strict_conjunct_cap
        self.atom_budget = atom_budget

    def eval(self, proof, base: AssumptionBase, env: Environment) -> Formula:
        if isinstance(proof, FromStep):
            return self.eval_from(proof, base, env)
        if isinstance(proof, (RuleApp, ByAnnotated)):
            self.fail('parsing', proof, detail='NDL0 proofs contain no rule applications')
        return super().eval(proof, base, env)

    def eval_from(self, node: FromStep, base: AssumptionBase, env: Environment) -> Formula:
        self.step_counter += 1
        step = self.step_counter
        if not 1 <= len(node.args) <= NDL0_MAX_ARGS:
            self.fail('arity', node, detail=f"A from-step takes 1 to {NDL0_MAX_ARGS} arguments, got {len(node.args)}")

        conclusion = self.resolve(node.conclusion, env, node)
        args = [self.resolve(a, env, node) for a in node.args]

        if self.strict_conjunct_cap:
            conjuncts = sum(len(flatten_and(a)) for a in args)
            if conjuncts > NDL0_MAX_ARGS:
                self.fail('arity', node, evaluated_args=args,
                          detail=f"{conjuncts} conjuncts across the arguments exceed the cap of {NDL0_MAX_ARGS}")

        for arg in args:
            if not self.member(arg, base):
                self.fail('notInAB', node, evaluated_args=args, missing=arg,
                          detail=f"{show_formula(arg)} is not in the assumption base")

        model = countermodel(args, conclusion, self.atom_budget)
        if model is not None:
            self.fail('logic', node, evaluated_args=args, expected=conclusion, countermodel=model,
                      detail=f"The conclusion {show_formula(conclusion)} does not follow from "
                             f"{', '.join(show_formula(a) for a in args)}")

        if self.record_trace:
            self.trace.append(TraceEntry(node, args, conclusion, base, step))
        return conclusion


def eval0(proof, base: Sequence[Formula], env: Optional[Environment] = None) -> NdlVerdict:
    """Evaluate an NDL0 deduction in an assumption base and environment"""
    return Ndl0Evaluator().run(proof, frozenset(base), env)


def check_ndl0(premises: NamedFormulas, goal: Formula, proof_text: str) -> CheckReport:
    """Strict check of an NDL0 proof of goal from named premises"""
    try:
        script = parse_ndl0(proof_text)
    except ProofSyntaxError as e:
        error = NdlError('parsing', line=e.line, column=e.column, detail=str(e))
        logger.debug(f"[X] NDL0 parse failure: {e}")
        return CheckReport(NdlVerdict(error=error), False, error)
    report = check_script(premises, goal, script, Ndl0Evaluator())
    tag = '[OK]' if report.success else '[X]'
    logger.debug(f"{tag} NDL0 check for goal {show_formula(goal)}")
    return report


# ============================================================================
# REASONING GRAPH
# ============================================================================

@dataclass
class ReasoningGraph:
    """
    Dependency DAG of an NDL0 proof

    nodes maps node ids (premise, hypothesis and lemma names) to formula
    text; edges run from each argument of a from-step to its conclusion.
    A discharged assumption (p ==> q) is the node of the lemma that derived q.
    terminal is the lemma that receives the mock arc into the false sink.
    """
    nodes: Dict[str, str] = field(default_factory=dict)
    edges: List[Tuple[str, str]] = field(default_factory=list)
    terminal: Optional[str] = None
    refutational: bool = False

    def sources(self) -> List[str]:
        targets = {v for _, v in self.edges}
        return [n for n in self.nodes if n not in targets and n != SINK]

    def depth(self) -> int:
        """Edge count of the longest source-to-sink path, mock arc included"""
        if self.terminal is None:
            return 0
        longest = {n: 0 for n in self.nodes}
        # nodes are created before any arc leaves them, so edge order is topological
        for u, v in self.edges:
            longest[v] = max(longest[v], longest[u] + 1)
        return longest[self.terminal] + 1

    def to_records(self) -> List[Dict]:
        records = [{'source': u, 'target': v} for u, v in self.edges]
        if self.terminal is not None:
            records.append({'source': self.terminal, 'target': SINK})
        return records


class _GraphBuilder:
    def __init__(self, graph: ReasoningGraph):
        self.graph = graph
        self.counter = 0
        self.last: Optional[str] = None

    def node(self, node_id: str, f: Formula) -> str:
        while node_id in self.graph.nodes:
            self.counter += 1
            node_id = f"{node_id}#{self.counter}"
        self.graph.nodes[node_id] = show_formula(f)
        return node_id

    def walk(self, proof, env: Environment, scope: Dict[Formula, str], name: Optional[str]) -> Formula:
        if isinstance(proof, FromStep):
            self.counter += 1
            conclusion = substitute(proof.conclusion, env)
            target = self.node(name or f"step-{self.counter}", conclusion)
            for arg in (substitute(a, env) for a in proof.args):
                source = scope.get(arg) or self.node(show_formula(arg), arg)
                scope.setdefault(arg, source)
                self.graph.edges.append((source, target))
            scope[conclusion] = target
            self.last = target
            if conclusion == FALSE:
                self.graph.terminal = target
                self.graph.refutational = True
            elif not self.graph.refutational:
                self.graph.terminal = target
            return conclusion
        if isinstance(proof, Assume):
            hypothesis = substitute(proof.hypothesis, env)
            inner_scope = dict(scope)
            inner_scope[hypothesis] = self.node(proof.name or f"hypothesis-{self.counter + 1}", hypothesis)
            inner_env = dict(env)
            if proof.name:
                inner_env[proof.name] = hypothesis
            conclusion = Implies(hypothesis, self.walk(proof.body, inner_env, inner_scope, None))
            if self.last is not None:
                scope[conclusion] = self.last
            return conclusion
        if isinstance(proof, Compose):
            current_env = dict(env)
            conclusion = None
            for step in proof.steps:
                conclusion = self.walk(step.proof, current_env, scope, step.name)
                if step.name:
                    current_env[step.name] = conclusion
            return conclusion
        raise TypeError(f"Not an NDL0 deduction: {proof!r}")


def reasoning_graph(proof, premises: NamedFormulas) -> ReasoningGraph:
    """
    Build the reasoning DAG of a proof (script or deduction)

    Premise nodes are the sources; refutational proofs end at the lemma that
    derives false, direct proofs at their last lemma.
    """
    body = proof.body if isinstance(proof, ProofScript) else proof
    graph = ReasoningGraph()
    builder = _GraphBuilder(graph)
    scope: Dict[Formula, str] = {}
    env: Environment = {}
    for name, formula in premises:
        scope[formula] = builder.node(name, formula)
        if name:
            env[name] = formula
    if body is not None:
        builder.walk(body, env, scope, None)
    return graph


def reasoning_depth(proof, premises: NamedFormulas) -> int:
    """
    Longest premise-to-sink path length of an accepted NDL0 proof

    The final lemma (the false-deriving one for refutations) carries one
    mock arc into the sink, which counts toward the length.
    """
    return reasoning_graph(proof, premises).depth()


# ============================================================================
# NDL -> NDL0 TRANSLATION
# ============================================================================

def ndl_to_ndl0(step: RuleApp, evaluated_args: Optional[Sequence[Formula]] = None) -> FromStep:
    """
    Translate one valid rule application into an equivalent from-step

    The from-step cites exactly the formulas the rule needs in the assumption
    base, so left-either keeps only its left disjunct and by-contradiction
    only its refuted conditional; rules that need nothing cite true.
    """
    args = list(evaluated_args if evaluated_args is not None else step.args)
    conclusion, required = RULES[step.rule](args, lambda x, y: x == y)
    cited = list(dict.fromkeys(required)) or [TRUE]
    return FromStep(conclusion, tuple(cited), step.line, step.column)


def _translate(proof, entries: Dict[int, List[Formula]]):
    if isinstance(proof, RuleApp):
        return ndl_to_ndl0(proof, entries.get(id(proof)))
    if isinstance(proof, ByAnnotated):
        return _translate(proof.proof, entries)
    if isinstance(proof, Assume):
        return Assume(proof.hypothesis, proof.name, _translate(proof.body, entries), proof.line, proof.column)
    if isinstance(proof, Compose):
        steps = tuple(Step(s.name, _translate(s.proof, entries)) for s in proof.steps)
        return Compose(steps, proof.line, proof.column)
    raise TypeError(f"Not an NDL deduction: {proof!r}")


def ndl_proof_to_ndl0(script: ProofScript, premises: NamedFormulas) -> ProofScript:
    """
    Translate a whole strictly valid NDL proof into NDL0

    Returns:
        A script with the same asserts whose body evaluates to the same
        conclusion under eval0.

    Raises:
        ValueError: if the NDL proof does not evaluate
    """
    evaluator = NdlEvaluator(record_trace=True)
    report = check_script(premises, FALSE, script, evaluator, allow_asserts=True)
    if report.verdict.error is not None:
        raise ValueError(f"Cannot translate an invalid proof: {report.verdict.error}")
    entries = {id(entry.node): entry.evaluated_args for entry in evaluator.trace}
    body = _translate(script.body, entries) if script.body is not None else None
    return ProofScript(script.asserts, body)
