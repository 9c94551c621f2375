"""
ProofGrid Forge Toolkit

Components:
- formula: Propositional AST, parser, printer, truth-table entailment oracle
- ndl_engine: NDL proof interpreter (strict)
- instrumented_checker: Error-tolerant NDL checking with logged repairs
- ndl0_engine: Single-inference-rule proofs and reasoning depth
- hilbert_engine: Hilbert listings, modus ponens checker, deduction theorem
- eq_engine / eq_grading: Equational rewriting proofs and their grading
- problem_gen / pl3_families: Seeded PL1/PL2/PL3 argument generators
- proof_transforms: Gold proofs, masking, gaps, corruption
- psychometrics / irt: Accuracy intervals, DI, Gini, ESI, calibration, 2PL fits
- archive / evaluation: Result files and per-task scoring
- proofgrid_forge: Command-line entry point
"""

__version__ = '1.0.0'
