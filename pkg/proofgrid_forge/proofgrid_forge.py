"""
ProofGrid Forge Command Line

Entry point wiring the checkers, generators, transforms, scoring pipelines and
psychometrics into one tool.

Subcommands:
- check {ndl|ndl0|hilbert|eq}: verify a proof, print the verdict as JSON
- gen <family>: seeded problem generation (record JSON or problem text)
- mask / gap / corrupt: proof transforms with their gold artifacts
- eval <task> <archive>: score an archive, print the report table and JSON
- fit <matrix.csv>: 2PL MAP fit, optionally written to a directory
- report: Wright map and band scores from fitted parameter tables

Exit status:
- 0 success
- 1 verification failure (proof rejected, generation exhausted)
- 2 usage or schema error

Usage:
    python -m proofgrid_forge.proofgrid_forge check ndl sample.ndl
    python -m proofgrid_forge.proofgrid_forge gen pl1-pm --seed 7
    python -m proofgrid_forge.proofgrid_forge eval PL1-PM PL1-PM.yaml --annotate scored.yaml
    python -m proofgrid_forge.proofgrid_forge fit matrix.csv --seed 7 --out fit/
    python -m proofgrid_forge.proofgrid_forge report --abilities fit/abilities.csv \\
        --items fit/items.csv --wright --bands -1 1
"""

import argparse
import json
import logging
import os
import random
import sys
from dataclasses import fields
from datetime import datetime
from typing import Dict, List, Optional, Sequence

import pandas as pd
import yaml

try:
    from .archive import load_archive, save_archive
    from .config import (
        DEFAULT_SEED, GAP_FRACTION_RANGE, LOG_DIR, LOG_LEVEL, MASK_FRACTION_RANGE, REPORT_SEPARATOR,
        TASK_IDS, WRIGHT_MAP_BINS,
    )
    from .eq_engine import check_eq_proof, corrupt_eq_proof, parse_eq_problem, render_eq_proof
    from .errors import ForgeError, GenerationExhausted, ProofSyntaxError, SchemaError
    from .evaluation import annotate_records, evaluate_task
    from .formula import Implies, conjoin, parse_formula, show_formula
    from .hilbert_engine import check_hilbert
    from .instrumented_checker import instrumented_eval
    from .irt import Band, IrtConfig, ResponseMatrix, band_scores, fit_2pl, load_params, wright_map
    from .ndl0_engine import Ndl0Evaluator, check_ndl0, parse_ndl0, reasoning_depth
    from .ndl_engine import NdlError, check_argument, number_premises, parse_proof, run_script
    from .pl3_families import gen_pl3_item
    from .problem_gen import (
        GenConfig, conditionalize, gen_pl1, gen_pl1_gf_item, gen_pl1_pc_item, gen_pl1_pm_item,
        gen_pl2_pw_from_pl1, proper_abduction,
    )
    from .proof_transforms import corrupt_ndl_proof, insert_gaps, mask_proof
except ImportError:
    from archive import load_archive, save_archive
    from config import (
        DEFAULT_SEED, GAP_FRACTION_RANGE, LOG_DIR, LOG_LEVEL, MASK_FRACTION_RANGE, REPORT_SEPARATOR,
        TASK_IDS, WRIGHT_MAP_BINS,
    )
    from eq_engine import check_eq_proof, corrupt_eq_proof, parse_eq_problem, render_eq_proof
    from errors import ForgeError, GenerationExhausted, ProofSyntaxError, SchemaError
    from evaluation import annotate_records, evaluate_task
    from formula import Implies, conjoin, parse_formula, show_formula
    from hilbert_engine import check_hilbert
    from instrumented_checker import instrumented_eval
    from irt import Band, IrtConfig, ResponseMatrix, band_scores, fit_2pl, load_params, wright_map
    from ndl0_engine import Ndl0Evaluator, check_ndl0, parse_ndl0, reasoning_depth
    from ndl_engine import NdlError, check_argument, number_premises, parse_proof, run_script
    from pl3_families import gen_pl3_item
    from problem_gen import (
        GenConfig, conditionalize, gen_pl1, gen_pl1_gf_item, gen_pl1_pc_item, gen_pl1_pm_item,
        gen_pl2_pw_from_pl1, proper_abduction,
    )
    from proof_transforms import corrupt_ndl_proof, insert_gaps, mask_proof

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

PL1_FAMILIES = ('pl1', 'pl1-pc', 'pl1-pm', 'pl1-gf', 'pl2', 'pl2-abduction')
PL3_FAMILIES = ('pyramid-pebbling', 'simple-pebbling', 'graph-coloring', 'rel-php',
                'subset-cardinality', 'tseitin', 'counting', 'debruijn')


def setup_logging(level: str = LOG_LEVEL):
    """File log under LOG_DIR plus standard error; stdout is kept for results"""
    os.makedirs(LOG_DIR, exist_ok=True)
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.FileHandler(os.path.join(LOG_DIR, f'proofgrid_forge_{datetime.now().strftime("%Y%m%d")}.log')),
            logging.StreamHandler(),
        ]
    )


# ============================================================================
# HELPERS
# ============================================================================

def emit(payload):
    print(json.dumps(payload, indent=2, default=str))


def read_input(path: Optional[str]) -> str:
    if path is None or path == '-':
        return sys.stdin.read()
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def parse_premises(text: Optional[str]) -> List:
    """'p1 # p2 # ...' -> [(premise-1, p1), ...]"""
    if not text:
        return []
    return number_premises([parse_formula(part) for part in text.split('#') if part.strip()])


def parse_params(pairs: Sequence[str]) -> Dict:
    """key=value pairs; values are read as YAML scalars (ints, floats, booleans, lists)"""
    params = {}
    for pair in pairs or []:
        if '=' not in pair:
            raise ValueError(f"Parameter {pair!r} is not of the form key=value")
        key, value = pair.split('=', 1)
        params[key.strip()] = yaml.safe_load(value)
    return params


def _verdict_record(conclusion, error) -> Dict:
    return {
        'success': error is None,
        'conclusion': show_formula(conclusion) if conclusion is not None else None,
        'error': error.to_record() if error is not None else None,
    }


# ============================================================================
# CHECK
# ============================================================================

def _parse_failure(e: ProofSyntaxError) -> int:
    error = NdlError('parsing', line=e.line, column=e.column, detail=str(e))
    emit(_verdict_record(None, error))
    return EXIT_FAILED


def _check_ndl(args, text: str, premises, goal) -> int:
    if goal is None:
        try:
            script = parse_proof(text)
        except ProofSyntaxError as e:
            return _parse_failure(e)
        verdict = run_script(script, premises)
        emit(_verdict_record(verdict.conclusion, verdict.error))
        return EXIT_OK if verdict.ok else EXIT_FAILED

    if args.instrumented:
        result = instrumented_eval(premises, goal, text)
        record = result.to_record()
        record['conclusion'] = show_formula(result.conclusion) if result.conclusion is not None else None
        emit(record)
        return EXIT_OK if result.result == 'correct' else EXIT_FAILED

    report = check_argument(premises, goal, text)
    emit(_verdict_record(report.verdict.conclusion, report.error))
    return EXIT_OK if report.success else EXIT_FAILED


def _check_ndl0(args, text: str, premises, goal) -> int:
    if goal is None:
        try:
            script = parse_ndl0(text)
        except ProofSyntaxError as e:
            return _parse_failure(e)
        verdict = run_script(script, premises, Ndl0Evaluator())
        record = _verdict_record(verdict.conclusion, verdict.error)
    else:
        report = check_ndl0(premises, goal, text)
        verdict = report.verdict
        record = _verdict_record(verdict.conclusion, report.error)
        script = parse_ndl0(text) if report.success else None
    if record['success'] and script is not None and script.body is not None:
        scope = premises or [(a.name, a.formula) for a in script.asserts]
        record['reasoningDepth'] = reasoning_depth(script.body, scope)
    emit(record)
    return EXIT_OK if record['success'] else EXIT_FAILED


def _check_hilbert(args, text: str, premises, goal) -> int:
    report = check_hilbert(premises, goal, text, lenient=args.lenient)
    record = report.to_record()
    record['conclusion'] = show_formula(report.conclusion) if report.conclusion is not None else None
    emit(record)
    return EXIT_OK if report.success else EXIT_FAILED


def _check_eq(args, text: str, premises, goal) -> int:
    problem = parse_eq_problem(text)
    verdict = check_eq_proof(problem.axioms, problem.proof, level=args.level)
    record = verdict.to_record()
    record['firstErrorStep'] = verdict.first_error_step
    record['errorKind'] = verdict.error_kind
    emit(record)
    return EXIT_OK if verdict.correct else EXIT_FAILED


CHECKERS = {
    'ndl': _check_ndl,
    'ndl0': _check_ndl0,
    'hilbert': _check_hilbert,
    'eq': _check_eq,
}


def cmd_check(args) -> int:
    text = read_input(args.file)
    premises = parse_premises(args.premises)
    goal = parse_formula(args.goal) if args.goal else None
    return CHECKERS[args.system](args, text, premises, goal)


# ============================================================================
# GENERATE
# ============================================================================

def _gen_config(seed: int, params: Dict) -> GenConfig:
    names = {f.name for f in fields(GenConfig)}
    return GenConfig(seed=seed, **{k: v for k, v in params.items() if k in names})


def generate(family: str, seed: int, params: Dict) -> Dict:
    """Archive-shaped record for one generated item"""
    if family in PL3_FAMILIES:
        return gen_pl3_item(family, seed, **params)
    if family not in PL1_FAMILIES:
        raise ValueError(f"Unknown family '{family}'")

    config = _gen_config(seed, params)
    if family == 'pl1-pc':
        return gen_pl1_pc_item(config, seed, params.get('corrupt'))
    if family == 'pl1-pm':
        return gen_pl1_pm_item(config, seed)
    if family == 'pl1-gf':
        return gen_pl1_gf_item(config, seed)

    arg = gen_pl1(config, seed)
    if family == 'pl2':
        arg = gen_pl2_pw_from_pl1(arg, seed)
    elif family == 'pl2-abduction':
        circuit = parse_formula(params['formula']) if 'formula' in params else Implies(conjoin(arg.formulas), arg.goal)
        arg = proper_abduction(circuit, seed)
    if params.get('conditionalized'):
        arg = conditionalize(arg)
    arg.seed = seed
    return arg.to_record()


def cmd_gen(args) -> int:
    record = generate(args.family, args.seed, parse_params(args.params))
    if args.text:
        print(record['problemText'], end='')
    else:
        emit(record)
    return EXIT_OK


# ============================================================================
# TRANSFORMS
# ============================================================================

def cmd_mask(args) -> int:
    fraction = args.fraction if args.fraction is not None else random.Random(args.seed).uniform(*MASK_FRACTION_RANGE)
    masked = mask_proof(read_input(args.file), fraction, args.seed)
    emit({'maskedProof': masked.text, 'masks': masked.assignment, 'maskKinds': masked.kinds,
          'density': masked.density})
    return EXIT_OK


def cmd_gap(args) -> int:
    fraction = args.fraction if args.fraction is not None else random.Random(args.seed).uniform(*GAP_FRACTION_RANGE)
    gapped = insert_gaps(read_input(args.file), fraction, args.seed)
    emit({'gappedProof': gapped.text, 'gaps': gapped.gold, 'elided': gapped.fraction})
    return EXIT_OK


def cmd_corrupt(args) -> int:
    text = read_input(args.file)
    if args.system == 'eq':
        problem = parse_eq_problem(text)
        corrupted, error = corrupt_eq_proof(problem.axioms, problem.proof, args.mode, args.seed)
        emit({'proof': render_eq_proof(corrupted), 'error': error})
        return EXIT_OK

    premises = parse_premises(args.premises)
    if args.goal:
        goal = parse_formula(args.goal)
    else:
        verdict = run_script(parse_proof(text), premises)
        if not verdict.ok:
            logger.error(f"[X] Only valid proofs can be corrupted: {verdict.error}")
            return EXIT_FAILED
        goal = verdict.conclusion
    emit(corrupt_ndl_proof(premises, goal, text, args.seed).to_record())
    return EXIT_OK


# ============================================================================
# EVALUATE
# ============================================================================

def cmd_eval(args) -> int:
    inferred, records = load_archive(args.archive)
    if inferred is not None and inferred != args.task:
        logger.warning(f"[EVAL] File name suggests {inferred}, scoring as {args.task}")
    report = evaluate_task(args.task, records, eq_level=args.eq_level, workers=args.workers)

    summary = report.to_dict()
    if args.out:
        with open(args.out, 'w', encoding='utf-8') as f:
            json.dump(summary, f, indent=2, default=str)
        logger.info(f"[EVAL] Report written to {args.out}")
    if args.annotate:
        annotate_records(records, report)
        save_archive(records, args.annotate)

    print(report.to_csv(sep=args.sep), end='')
    if not args.table_only:
        print()
        emit(summary)
    return EXIT_OK


# ============================================================================
# PSYCHOMETRICS
# ============================================================================

def cmd_fit(args) -> int:
    matrix = ResponseMatrix.from_csv(args.matrix)
    config = IrtConfig(seed=args.seed, max_iter=args.max_iter)
    result = fit_2pl(matrix, config)
    if args.out:
        result.save(args.out)
    diagnostics = {k: v for k, v in result.diagnostics.items() if k not in ('warning', 'trace')}
    emit({
        'diagnostics': diagnostics,
        'abilities': result.abilities.round(6).to_dict(),
        'items': result.items.round(6).to_dict(orient='index'),
    })
    return EXIT_OK


def cmd_report(args) -> int:
    abilities = load_params(args.abilities) if args.abilities else None
    items = load_params(args.items) if args.items else None
    if abilities is not None and not isinstance(abilities, pd.Series):
        raise SchemaError(f"{args.abilities}: expected a theta table")
    if items is not None and not isinstance(items, pd.DataFrame):
        raise SchemaError(f"{args.items}: expected an item table with a and b")

    if args.wright:
        if abilities is None or items is None:
            raise ValueError("--wright needs --abilities and --items")
        print(wright_map(abilities, items['b'].tolist(), labels=list(items.index), n_bins=args.bins))
    if args.bands:
        if items is None:
            raise ValueError("--bands needs --items")
        lo, hi = args.bands
        emit({'band': [lo, hi], **band_scores(items, Band(lo, hi))})
    return EXIT_OK


# ============================================================================
# PARSER
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='proofgrid_forge',
        description='ProofGrid Forge - proof checkers, generators and benchmark scoring'
    )
    parser.add_argument('--log-level', default=LOG_LEVEL, help='DEBUG, INFO, WARNING, ERROR')
    sub = parser.add_subparsers(dest='command', required=True)

    check = sub.add_parser('check', help='Verify a proof and print the verdict as JSON')
    check.add_argument('system', choices=sorted(CHECKERS))
    check.add_argument('file', nargs='?', default='-', help='Proof file (default: stdin)')
    check.add_argument('--premises', help="Premises separated by '#', named premise-1, premise-2, ...")
    check.add_argument('--goal', help='Goal formula; without it the conclusion is reported')
    check.add_argument('--instrumented', action='store_true', help='NDL: repair slips and log overlooks')
    check.add_argument('--lenient', action='store_true', help='Hilbert: apply the repair set')
    check.add_argument('--level', type=int, default=3, choices=(1, 2, 3), help='EQ rigor level')
    check.set_defaults(handler=cmd_check)

    gen = sub.add_parser('gen', help='Generate one problem')
    gen.add_argument('family', choices=PL1_FAMILIES + PL3_FAMILIES)
    gen.add_argument('--seed', type=int, default=DEFAULT_SEED)
    gen.add_argument('--params', nargs='*', default=[], metavar='KEY=VALUE')
    gen.add_argument('--text', action='store_true', help='Print the problem text only')
    gen.set_defaults(handler=cmd_gen)

    for name, handler, help_text in (('mask', cmd_mask, 'Mask proof occupants'),
                                     ('gap', cmd_gap, 'Replace proof steps with gaps')):
        transform = sub.add_parser(name, help=help_text)
        transform.add_argument('file', nargs='?', default='-', help='NDL proof file (default: stdin)')
        transform.add_argument('--fraction', type=float)
        transform.add_argument('--seed', type=int, default=DEFAULT_SEED)
        transform.set_defaults(handler=handler)

    corrupt = sub.add_parser('corrupt', help='Introduce one verified error into a correct proof')
    corrupt.add_argument('system', choices=('ndl', 'eq'))
    corrupt.add_argument('file', nargs='?', default='-')
    corrupt.add_argument('--premises')
    corrupt.add_argument('--goal')
    corrupt.add_argument('--mode', choices=('contractum', 'equation'), default='contractum')
    corrupt.add_argument('--seed', type=int, default=DEFAULT_SEED)
    corrupt.set_defaults(handler=cmd_corrupt)

    evaluate = sub.add_parser('eval', help='Score an archive of model responses')
    evaluate.add_argument('task', choices=TASK_IDS)
    evaluate.add_argument('archive')
    evaluate.add_argument('--out', help='Write the JSON report here')
    evaluate.add_argument('--annotate', metavar='PATH', help='Write the archive with forge stamps here')
    evaluate.add_argument('--eq-level', type=int, default=3, choices=(1, 2, 3))
    evaluate.add_argument('--workers', type=int, default=1)
    evaluate.add_argument('--sep', default=REPORT_SEPARATOR)
    evaluate.add_argument('--table-only', action='store_true')
    evaluate.set_defaults(handler=cmd_eval)

    fit = sub.add_parser('fit', help='Fit the 2PL model to a response matrix')
    fit.add_argument('matrix', help='CSV: respondents as rows, items as columns, 0/1 cells')
    fit.add_argument('--seed', type=int, default=DEFAULT_SEED)
    fit.add_argument('--max-iter', type=int, default=IrtConfig.max_iter)
    fit.add_argument('--out', help='Directory for abilities.csv, items.csv, diagnostics.json')
    fit.set_defaults(handler=cmd_fit)

    report = sub.add_parser('report', help='Wright map and band scores from fitted parameters')
    report.add_argument('--abilities')
    report.add_argument('--items')
    report.add_argument('--wright', action='store_true')
    report.add_argument('--bins', type=int, default=WRIGHT_MAP_BINS)
    report.add_argument('--bands', nargs=2, type=float, metavar=('LO', 'HI'))
    report.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the exit status"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    setup_logging(args.log_level)
    if args.command == 'report' and not (args.wright or args.bands):
        parser.print_usage(sys.stderr)
        logger.error("[X] report needs --wright and/or --bands")
        return EXIT_USAGE

    try:
        return args.handler(args)
    except GenerationExhausted as e:
        logger.error(f"[X] {e}")
        return EXIT_FAILED
    except (ForgeError, ValueError, KeyError, OSError) as e:
        logger.error(f"[X] {type(e).__name__}: {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"[X] Unexpected error: {e}", exc_info=True)
        return EXIT_FAILED


if __name__ == '__main__':
    sys.exit(main())
