"""
Task Evaluation

Scores archived model responses for every benchmark task and aggregates
them per model:
- PL1-PC / PL3-PC: verdict plus offending line against the checker's gold
  (PL3-PC credits a flagged proof when the erroneous step is located)
- PL1-PW / PL2-PW / PL3-PW / PL4-PW: proofs run through the instrumented,
  NDL0 or Hilbert checkers, with strict acceptance kept alongside
- PL1-PM: semantic unmasking plus the mask error categories
- PL1-GF: gap fills spliced in and checked
- EQ-PC (levels 1-3), EQ-ER (proof- and step-level), EQ-GF (with calibration)

The `-c` variants share the scoring of their base task. Responses with no
answer (API failures) are excluded from the denominators.

Usage:
    task, records = load_archive('PL1-PM.yaml')
    report = evaluate_task(task, records)
    print(report.accuracy_table())
"""

import json
import logging
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import pandas as pd

try:
    from .archive import (API_FAILURE_FLAGS, ILL_FORMATTED_FLAGS, ResultRecord, attach_outcome, forge_stamp)
    from .config import REPORT_SEPARATOR, TASK_IDS
    from .eq_engine import parse_eq_problem
    from .eq_grading import er_accuracy, grade_eq_er, grade_eq_gf, grade_eq_pc
    from .errors import ForgeError
    from .formula import Formula, Implies, conjoin, parse_formula
    from .hilbert_engine import check_hilbert
    from .instrumented_checker import instrumented_eval, load_answer_json, parse_pc_answer, score_pc_response
    from .ndl0_engine import check_ndl0
    from .ndl_engine import RULES, number_premises
    from .proof_transforms import (GAP_RE, GappedProof, MaskedProof, grade_gap_fill, grade_mask_assignment,
                                   infer_mask_kinds)
    from .psychometrics import CalibrationSummary, accuracy_table, calibration, di, esi, lorenz_gini
except ImportError:
    from archive import (API_FAILURE_FLAGS, ILL_FORMATTED_FLAGS, ResultRecord, attach_outcome, forge_stamp)
    from config import REPORT_SEPARATOR, TASK_IDS
    from eq_engine import parse_eq_problem
    from eq_grading import er_accuracy, grade_eq_er, grade_eq_gf, grade_eq_pc
    from errors import ForgeError
    from formula import Formula, Implies, conjoin, parse_formula
    from hilbert_engine import check_hilbert
    from instrumented_checker import instrumented_eval, load_answer_json, parse_pc_answer, score_pc_response
    from ndl0_engine import check_ndl0
    from ndl_engine import RULES, number_premises
    from proof_transforms import (GAP_RE, GappedProof, MaskedProof, grade_gap_fill, grade_mask_assignment,
                                  infer_mask_kinds)
    from psychometrics import CalibrationSummary, accuracy_table, calibration, di, esi, lorenz_gini

logger = logging.getLogger(__name__)

PM_CATEGORIES = ('illFormattedAnswers', 'emptyAnswers', 'bogusMasks', 'missingMasks',
                 'rulesToFormulas', 'formulasToRules')

FORMAT_ERROR = 'illFormatted'

_FENCE_RE = re.compile(r'^\s*```[A-Za-z0-9_+-]*[ \t]*\n?(.*?)\n?\s*```\s*$', re.DOTALL)
_BOLD_GAP_RE = re.compile(r'\*\*\s*(GAP-\d+)\s*(:?)\s*\*\*')
_GAP_HEADER_RE = re.compile(r'^\s*(GAP-\d+)\s*:?\s*$', re.MULTILINE)


def base_task(task: str) -> str:
    """PL1-PC-c -> PL1-PC; ids are validated against TASK_IDS"""
    if task not in TASK_IDS:
        raise ValueError(f"Unknown task '{task}'. Known tasks: {', '.join(TASK_IDS)}")
    return task[:-2] if task.endswith('-c') else task


# ============================================================================
# ANSWER NORMALIZATION
# ============================================================================

def normalize_answer(answer) -> Tuple[object, List[str]]:
    """
    Strip the markdown wrappers models put around answers

    Returns:
        (normalized answer, names of the normalizations applied)
    """
    if not isinstance(answer, str):
        return answer, []
    applied = []
    text = answer
    fenced = _FENCE_RE.match(text)
    if fenced:
        text = fenced.group(1)
        applied.append('code-fence')
    if _BOLD_GAP_RE.search(text):
        text = _BOLD_GAP_RE.sub(r'\1\2', text)
        applied.append('bold-gap-header')
    return text.strip(), applied


def parse_gap_fills(answer) -> Optional[Dict[str, str]]:
    """Gap fills from a {"GAP-k": steps} object or from 'GAP-k:' headed text"""
    if isinstance(answer, dict):
        return {str(k): '' if v is None else str(v) for k, v in answer.items()}
    if not isinstance(answer, str):
        return None
    ok, decoded, _ = load_answer_json(answer)
    if ok and isinstance(decoded, dict):
        return {str(k): '' if v is None else str(v) for k, v in decoded.items()}

    headers = list(_GAP_HEADER_RE.finditer(answer))
    if not headers:
        return None
    fills = {}
    for k, match in enumerate(headers):
        end = headers[k + 1].start() if k + 1 < len(headers) else len(answer)
        fills[match.group(1)] = answer[match.end():end].strip()
    return fills


# ============================================================================
# RECORD ACCESS
# ============================================================================

def argument_of(record: ResultRecord) -> Tuple[List[Tuple[str, Formula]], Formula]:
    """
    Named premises and goal of an NDL-family record

    Structured `premises`/`goal` keys win; otherwise the `problem` string
    'p1 # p2 # ... # goal' is split. Conditionalized records fold the
    premises into the goal.
    """
    data = record.data
    if 'goal' in data and 'premises' in data:
        premises = [parse_formula(p) for p in data['premises']]
        goal = parse_formula(data['goal'])
    else:
        parts = [p.strip() for p in str(data.get('problem', '')).split('#') if p.strip()]
        if not parts:
            raise ForgeError(f"Record {record.index} has no problem")
        formulas = [parse_formula(p) for p in parts]
        premises, goal = formulas[:-1], formulas[-1]
        if record.flag('conditionalized') and premises:
            goal = Implies(conjoin(premises), goal)
            premises = []
    return number_premises(premises), goal


def is_api_failure(response: Optional[Dict]) -> bool:
    """No response at all, or one flagged as a failed call without a readable answer"""
    if response is None:
        return True
    if any(response.get(flag) for flag in ILL_FORMATTED_FLAGS):
        return False
    if any(response.get(flag) for flag in API_FAILURE_FLAGS):
        return True
    return response.get('answer') is None


# ============================================================================
# OUTCOMES
# ============================================================================

@dataclass
class Outcome:
    """Verdict on one model's response to one record"""
    index: int
    model: str
    credited: Optional[bool] = None
    error_type: Optional[object] = None
    excluded: bool = False
    strict: Optional[bool] = None
    guessed: Optional[bool] = None
    repairs: int = 0
    categories: List[str] = field(default_factory=list)
    normalization: List[str] = field(default_factory=list)
    detail: Dict = field(default_factory=dict)


def _score_pc(record: ResultRecord, answer, outcome: Outcome):
    premises, goal = argument_of(record)
    gold = instrumented_eval(premises, goal, record.data.get('proof', ''))
    credited, error_type = score_pc_response(gold, answer)
    outcome.credited, outcome.error_type = credited, error_type
    ok, parsed, _ = parse_pc_answer(answer)
    gold_clean = gold.result == 'correct' and not gold.repairs.structural_corrections
    outcome.guessed = ok and parsed['correct'] == gold_clean


def _score_pl3_pc(record: ResultRecord, answer, outcome: Outcome):
    premises, goal = argument_of(record)
    gold = check_ndl0(premises, goal, record.data.get('proof', ''))
    ok, parsed, _ = parse_pc_answer(answer)
    if not ok:
        outcome.credited, outcome.error_type = False, 3
        return
    outcome.guessed = parsed['correct'] == gold.success
    if parsed['correct']:
        outcome.credited = gold.success
        outcome.error_type = None if gold.success else 1
    elif gold.success:
        outcome.credited, outcome.error_type = False, 2
    else:
        line = parsed['errorDetails']['offendingLineNumber']
        outcome.credited = line == gold.error.line
        outcome.error_type = None if outcome.credited else 4


def _proof_text(answer) -> Optional[str]:
    if isinstance(answer, dict):
        answer = answer.get('proof')
    return answer if isinstance(answer, str) and answer.strip() else None


def _score_ndl_pw(record: ResultRecord, answer, outcome: Outcome):
    text = _proof_text(answer)
    if text is None:
        outcome.credited, outcome.error_type = False, FORMAT_ERROR
        return
    premises, goal = argument_of(record)
    result = instrumented_eval(premises, goal, text)
    outcome.credited = result.result == 'correct'
    outcome.strict = result.strict_accepted
    outcome.repairs = len(result.repairs.syntax_corrections) + len(result.repairs.structural_corrections)
    if not outcome.credited:
        outcome.error_type = result.first_error.kind if result.first_error else result.result
    outcome.detail['instrumentedCheckerResult'] = result.to_record()


def _score_pl3_pw(record: ResultRecord, answer, outcome: Outcome):
    text = _proof_text(answer)
    if text is None:
        outcome.credited, outcome.error_type = False, FORMAT_ERROR
        return
    premises, goal = argument_of(record)
    report = check_ndl0(premises, goal, text)
    outcome.credited = outcome.strict = report.success
    if not report.success:
        outcome.error_type = report.error.kind if report.error else 'wrongConclusion'


def _score_pl4_pw(record: ResultRecord, answer, outcome: Outcome):
    text = _proof_text(answer)
    if text is None:
        outcome.credited, outcome.error_type = False, FORMAT_ERROR
        return
    premises, goal = argument_of(record)
    lenient = check_hilbert(premises, goal, text, lenient=True)
    strict = check_hilbert(premises, goal, text)
    outcome.credited = lenient.success
    outcome.strict = strict.success
    outcome.repairs = len(lenient.repairs)
    if not lenient.success:
        outcome.error_type = lenient.error
    outcome.detail['hilbertResult'] = lenient.to_record()


def _mask_kind(kind: str) -> str:
    return 'rule' if kind == 'rule' else 'formula'


def _looks_like_formula(value: str) -> bool:
    try:
        parse_formula(value)
    except ForgeError:
        return False
    return True


def _score_pm(record: ResultRecord, answer, outcome: Outcome):
    data = record.data
    masked_text = data.get('maskedProof', '')
    gold = {str(k): str(v) for k, v in (data.get('masks') or {}).items()}
    kinds = {k: _mask_kind(v) for k, v in (data.get('maskKinds') or infer_mask_kinds(masked_text)).items()}

    ok, decoded, _ = load_answer_json(answer)
    if not ok or not isinstance(decoded, dict):
        outcome.credited, outcome.error_type = False, 'illFormattedAnswers'
        outcome.categories.append('illFormattedAnswers')
        return
    if not decoded:
        outcome.credited, outcome.error_type = False, 'emptyAnswers'
        outcome.categories.append('emptyAnswers')
        return

    assignment = {str(k): '' if v is None else str(v).strip() for k, v in decoded.items()}
    labels = set(gold) | set(kinds)
    counts = Counter()
    counts['bogusMasks'] = len(set(assignment) - labels)
    counts['missingMasks'] = len(labels - set(assignment))
    for label, value in assignment.items():
        kind = kinds.get(label)
        if kind == 'rule' and value not in RULES and _looks_like_formula(value):
            counts['rulesToFormulas'] += 1
        elif kind == 'formula' and value in RULES:
            counts['formulasToRules'] += 1
    for category in PM_CATEGORIES:
        outcome.categories.extend([category] * counts[category])
    outcome.detail['maskErrors'] = {c: counts[c] for c in PM_CATEGORIES if counts[c]}

    if counts['missingMasks']:
        outcome.credited, outcome.error_type = False, 'missingMasks'
        return

    premises, goal = argument_of(record)
    masked = MaskedProof(masked_text, gold, dict(kinds), len(labels))
    credited, error_type, _ = grade_mask_assignment(premises, goal, masked, assignment, instrumented=True)
    strict, _, _ = grade_mask_assignment(premises, goal, masked, assignment)
    outcome.credited, outcome.strict = credited, strict
    if not credited:
        for category in ('rulesToFormulas', 'formulasToRules', 'bogusMasks'):
            if counts[category]:
                error_type = category
                break
        outcome.error_type = error_type


def _score_gf(record: ResultRecord, answer, outcome: Outcome):
    data = record.data
    gapped_text = data.get('gappedProof', '')
    gold = {str(k): str(v) for k, v in (data.get('gaps') or {}).items()}
    if not gold:
        gold = {f"GAP-{n}": '' for n in sorted(set(GAP_RE.findall(gapped_text)), key=int)}

    fills = parse_gap_fills(answer)
    if not fills:
        outcome.credited, outcome.error_type = False, FORMAT_ERROR
        return
    premises, goal = argument_of(record)
    gapped = GappedProof(gapped_text, gold, float(data.get('elided', 0.0)))
    credited, error_type, _ = grade_gap_fill(premises, goal, gapped, fills, instrumented=True)
    strict, _, _ = grade_gap_fill(premises, goal, gapped, fills)
    outcome.credited, outcome.strict = credited, strict
    outcome.error_type = None if credited else error_type


def _score_eq_pc(record: ResultRecord, answer, outcome: Outcome, level: int):
    problem = parse_eq_problem(record.data.get('problem', ''))
    grade = grade_eq_pc(problem, answer)
    outcome.detail['levels'] = {f"L{k}": grade.credited(k) for k in (1, 2, 3)}
    outcome.guessed = grade.level1
    outcome.credited = grade.credited(level)
    if not outcome.credited:
        outcome.error_type = grade.error_type if grade.error_type is not None else 'recordMismatch'
    outcome.detail['invalidPositions'] = grade.invalid_positions


def _score_eq_er(record: ResultRecord, answer, outcome: Outcome):
    problem = parse_eq_problem(record.data.get('problem', ''))
    grade = grade_eq_er(problem, answer)
    outcome.credited = grade.proof_correct
    outcome.detail['steps'] = [bool(s) for s in grade.step_correct]
    outcome.detail['grade'] = grade
    if not grade.proof_correct:
        step_errors = [e for e in grade.step_errors if e is not None]
        outcome.error_type = grade.proof_error or (step_errors[0] if step_errors else None)


def _score_eq_gf(record: ResultRecord, answer, outcome: Outcome):
    problem = parse_eq_problem(record.data.get('problem', ''))
    grade = grade_eq_gf(problem, answer)
    outcome.credited = grade.credited
    outcome.error_type = grade.error_type
    outcome.detail.update({'cycle': grade.cycle, 'redundancy': grade.redundancy})
    ok, decoded, _ = load_answer_json(answer)
    level = decoded.get('confidence') if ok and isinstance(decoded, dict) else None
    if isinstance(level, int) and not isinstance(level, bool) and 1 <= level <= 5:
        outcome.detail['confidence'] = level


SCORERS = {
    'PL1-PC': _score_pc,
    'PL3-PC': _score_pl3_pc,
    'PL1-PW': _score_ndl_pw,
    'PL2-PW': _score_ndl_pw,
    'PL3-PW': _score_pl3_pw,
    'PL4-PW': _score_pl4_pw,
    'PL1-PM': _score_pm,
    'PL1-GF': _score_gf,
    'EQ-ER': _score_eq_er,
    'EQ-GF': _score_eq_gf,
}


def score_response(task: str, record: ResultRecord, model: str, response: Optional[Dict],
                   eq_level: int = 3) -> Outcome:
    """
    Score one response; never raises on malformed answers

    Returns:
        Outcome; excluded=True for API failures, otherwise credited is set
    """
    outcome = Outcome(record.index, model)
    if is_api_failure(response):
        outcome.excluded = True
        return outcome

    if any(response.get(flag) for flag in ILL_FORMATTED_FLAGS) and response.get('answer') is None:
        outcome.credited, outcome.error_type = False, FORMAT_ERROR
        return outcome

    answer, outcome.normalization = normalize_answer(response.get('answer'))
    if outcome.normalization:
        logger.debug(f"[EVAL] record {record.index} / {model}: normalized {', '.join(outcome.normalization)}")

    base = base_task(task)
    try:
        if base == 'EQ-PC':
            _score_eq_pc(record, answer, outcome, eq_level)
        else:
            SCORERS[base](record, answer, outcome)
    except (ForgeError, ValueError, KeyError, TypeError) as e:
        logger.warning(f"[X] record {record.index} / {model}: unscorable response ({e})")
        outcome.credited, outcome.error_type = False, FORMAT_ERROR
        outcome.detail['exception'] = str(e)
    return outcome


# ============================================================================
# REPORTS
# ============================================================================

@dataclass
class ModelScore:
    """Per-model tallies; credited + sum(errors) + excluded == records"""
    model: str
    credited: int = 0
    scored: int = 0
    excluded: int = 0
    strict_credited: int = 0
    strict_scored: int = 0
    guessed: int = 0
    guess_scored: int = 0
    repairs: int = 0
    errors: Counter = field(default_factory=Counter)
    categories: Counter = field(default_factory=Counter)
    levels: Counter = field(default_factory=Counter)
    confidence: List[Tuple[int, bool]] = field(default_factory=list)

    @property
    def accuracy(self) -> Optional[float]:
        return self.credited / self.scored if self.scored else None

    def add(self, outcome: Outcome):
        if outcome.excluded:
            self.excluded += 1
            return
        self.scored += 1
        if outcome.credited:
            self.credited += 1
        else:
            self.errors[outcome.error_type] += 1
        if outcome.strict is not None:
            self.strict_scored += 1
            self.strict_credited += int(outcome.strict)
        if outcome.guessed is not None:
            self.guess_scored += 1
            self.guessed += int(outcome.guessed)
        self.repairs += outcome.repairs
        self.categories.update(outcome.categories)
        for level, ok in outcome.detail.get('levels', {}).items():
            self.levels[level] += int(ok)
        if 'confidence' in outcome.detail:
            self.confidence.append((outcome.detail['confidence'], bool(outcome.credited)))


@dataclass
class EvalReport:
    task: str
    scores: Dict[str, ModelScore]
    outcomes: List[Outcome]

    def accuracies(self) -> Dict[str, float]:
        return {m: s.accuracy for m, s in self.scores.items() if s.accuracy is not None}

    def accuracy_table(self) -> pd.DataFrame:
        """Accuracy with Wilson interval per model, plus strict/guessing/excluded columns"""
        table = accuracy_table({m: (s.credited, s.scored) for m, s in self.scores.items()})
        table['excluded'] = [self.scores[m].excluded for m in table.index]
        table['repairs'] = [self.scores[m].repairs for m in table.index]
        if any(s.strict_scored for s in self.scores.values()):
            table['strict_accuracy'] = [
                self.scores[m].strict_credited / self.scores[m].strict_scored
                if self.scores[m].strict_scored else None for m in table.index]
        if any(s.guess_scored for s in self.scores.values()):
            table['guessing_accuracy'] = [
                self.scores[m].guessed / self.scores[m].guess_scored
                if self.scores[m].guess_scored else None for m in table.index]
        if any(s.levels for s in self.scores.values()):
            for level in ('L1', 'L2', 'L3'):
                table[level] = [self.scores[m].levels[level] / self.scores[m].scored for m in table.index]
        return table

    def error_table(self) -> pd.DataFrame:
        """Error-type counts per model (rows) and type (columns)"""
        rows = {m: {str(k): v for k, v in s.errors.items()} for m, s in self.scores.items()}
        return pd.DataFrame.from_dict(rows, orient='index').fillna(0).astype(int).sort_index(axis=1)

    def category_table(self) -> pd.DataFrame:
        rows = {m: {c: s.categories[c] for c in PM_CATEGORIES} for m, s in self.scores.items()}
        return pd.DataFrame.from_dict(rows, orient='index')

    def di(self) -> Optional[float]:
        values = list(self.accuracies().values())
        return di(values) if len(values) >= 2 else None

    def gini(self) -> Optional[Dict[str, float]]:
        values = list(self.accuracies().values())
        return lorenz_gini(values) if len(values) >= 2 else None

    def calibration(self) -> Dict[str, CalibrationSummary]:
        return {m: calibration(s.confidence) for m, s in self.scores.items() if s.confidence}

    def er_accuracy(self) -> Dict[str, Dict[str, float]]:
        """Proof-level and step-level accuracy per model (EQ-ER)"""
        grades: Dict[str, list] = {}
        for outcome in self.outcomes:
            if not outcome.excluded and 'grade' in outcome.detail:
                grades.setdefault(outcome.model, []).append(outcome.detail['grade'])
        return {m: er_accuracy(g) for m, g in grades.items()}

    def esi(self, incompatible: Mapping[str, int]) -> Dict[str, float]:
        """ESI per model from counts of self-precluded responses over the scored ones"""
        return {m: esi(incompatible[m], self.scores[m].scored)
                for m in incompatible if m in self.scores and self.scores[m].scored}

    def to_dict(self) -> Dict:
        table = self.accuracy_table()
        summary = {
            'task': self.task,
            'models': json.loads(table.reset_index().to_json(orient='records')),
            'errors': {m: {str(k): v for k, v in s.errors.items()} for m, s in self.scores.items()},
            'di': self.di(),
            'gini': self.gini(),
        }
        if any(s.categories for s in self.scores.values()):
            summary['maskErrors'] = {m: dict(s.categories) for m, s in self.scores.items()}
        if base_task(self.task) == 'EQ-ER':
            summary['erAccuracy'] = self.er_accuracy()
        cal = self.calibration()
        if cal:
            summary['calibration'] = {m: c.to_dict() for m, c in cal.items()}
        return summary

    def to_csv(self, path_or_buf=None, sep: str = REPORT_SEPARATOR):
        return self.accuracy_table().to_csv(path_or_buf, sep=sep)


def evaluate_task(task: str, records: Sequence[ResultRecord], eq_level: int = 3,
                  workers: int = 1) -> EvalReport:
    """
    Score every model response in a task's records

    Args:
        task: One of TASK_IDS (the -c variants score like their base task)
        records: Archive records
        eq_level: Rigor level credited for EQ-PC
        workers: Thread count; outcomes are reduced in (index, model) order

    Returns:
        EvalReport (records are not modified; see annotate_records)
    """
    base_task(task)
    ordered = sorted(records, key=lambda r: r.index)
    jobs = [(record, model, response)
            for record in ordered
            for model, response in sorted(record.responses.items())]
    logger.info(f"[EVAL] {task}: {len(ordered)} records, {len(jobs)} responses")

    def run(job):
        record, model, response = job
        return score_response(task, record, model, response, eq_level)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(run, jobs))
    else:
        outcomes = [run(job) for job in jobs]

    scores: Dict[str, ModelScore] = {}
    for outcome in outcomes:
        scores.setdefault(outcome.model, ModelScore(outcome.model)).add(outcome)
    scores = dict(sorted(scores.items()))

    for model, score in scores.items():
        accuracy = f"{score.accuracy:.3f}" if score.accuracy is not None else 'n/a'
        logger.info(f"[EVAL] {model}: {score.credited}/{score.scored} credited "
                    f"({accuracy}), {score.excluded} excluded")
    return EvalReport(task, scores, outcomes)


def annotate_records(records: Sequence[ResultRecord], report: EvalReport):
    """Write each outcome into its response's `forge` sub-dict"""
    by_index = {r.index: r for r in records}
    for outcome in report.outcomes:
        if outcome.excluded:
            continue
        attach_outcome(by_index[outcome.index], outcome.model,
                       forge_stamp(outcome.credited, outcome.error_type, outcome.normalization))
