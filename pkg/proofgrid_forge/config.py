"""
Configuration for the ProofGrid Forge toolkit

Checkers:
- Entailment oracle: exhaustive truth tables, 24-atom budget
- NDL / NDL0 / Hilbert proof checkers with strict and lenient modes
- Equational rewriting engine (citation cap 2 per step for gap fills)

Generators:
- Seeded PL1/PL2/PL3 problem families, masking, gaps, corruption

Psychometrics:
- 2PL MAP fit: sigma_a 0.5, sigma_b 2.0, damping 0.5 with halving
- Discrimination clip box [0.2, 4.0], tol 1e-6, 500 iterations
- Band scores on a 201-point grid
"""

import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# ============================================================================
# ORACLE
# ============================================================================

ATOM_BUDGET = int(os.getenv('FORGE_ATOM_BUDGET', '24'))
TRUTH_TABLE_BLOCK_BITS = 16  # Evaluate 2^16 assignments per numpy block

# ============================================================================
# NDL CHECKING
# ============================================================================

# Error kinds in "first error" reading order
NDL_ERROR_PRECEDENCE = [
    'parsing',
    'unboundIdentifier',
    'malformedAssumption',
    'malformedRuleApp',
    'notInAB',
    'wrongConclusion',
]

COMMUTATIVITY_CORRECTION = (
    "Overlooking a wrong conclusion that's equivalent up to conj/disj commutativity"
)
DOUBLE_NEGATION_CORRECTION = (
    "Overlooking a wrong conclusion that's equivalent up to double negation"
)

# ============================================================================
# NDL0 CHECKING
# ============================================================================

NDL0_MAX_ARGS = 5
NDL0_STRICT_CONJUNCT_CAP = os.getenv('FORGE_NDL0_STRICT_CONJUNCT_CAP', 'false').lower() == 'true'

# ============================================================================
# HILBERT
# ============================================================================

HILBERT_COMPILE_SLACK = 5  # Compiled proofs stay within 3*n + slack lines

# ============================================================================
# EQUATIONAL
# ============================================================================

GF_MAX_CITED = 2                 # Equations a gap-fill step may cite
GF_SEARCH_BUDGET = int(os.getenv('FORGE_GF_SEARCH_BUDGET', '20000'))
ER_MAX_SET_SIZE = 3              # Largest equation set tried per step
GF_GAP_MARKER = '??'

# ============================================================================
# GENERATION
# ============================================================================

DEFAULT_SEED = int(os.getenv('FORGE_SEED', '0'))
GEN_MAX_RETRIES = 500
PL1_MAX_DEPTH = 4
PL1_ATOM_POOL = ['A', 'B', 'C', 'D', 'E']
PL1_MIN_PREMISES = 1
PL1_MAX_PREMISES = 4

# Conjunction > conditional > negation > disjunction >> biconditional
PL1_CONNECTIVE_WEIGHTS = {
    'and': 0.34,
    'implies': 0.27,
    'not': 0.20,
    'or': 0.16,
    'iff': 0.03,
}

COLORING_EDGE_PROB_RANGE = (0.6, 0.9)
COLORING_MAX_NODES = 10
COLORING_COLORS = 3
SIMPLE_PEBBLING_MAX_DEPTH = 6
KEEP_REDUNDANT_PREMISES = os.getenv('FORGE_KEEP_REDUNDANT', 'true').lower() == 'true'

# ============================================================================
# TRANSFORMS
# ============================================================================

MASK_FRACTION_RANGE = (0.3, 0.9)
GAP_FRACTION_RANGE = (0.3, 0.99)

# ============================================================================
# PSYCHOMETRICS
# ============================================================================

WILSON_Z = 1.96
ESI_GAMMA = 5.0

# Stated confidence level -> probability
CONFIDENCE_LEVELS = {1: 0.05, 2: 0.25, 3: 0.5, 4: 0.75, 5: 0.95}

IRT_SIGMA_A = 0.5
IRT_SIGMA_B = 2.0
IRT_DAMPING = 0.5
IRT_MAX_HALVINGS = 20
IRT_A_MIN = 0.2
IRT_A_MAX = 4.0
IRT_TOL = 1e-6
IRT_MAX_ITER = 500
IRT_INIT_LOG_A_SD = 0.25
IRT_INIT_B_SD = 1.0

BAND_GRID_SIZE = 201
WRIGHT_MAP_BINS = 20

# ============================================================================
# ARCHIVE
# ============================================================================

ARCHIVE_NAMESPACE = 'forge'
TIMESTAMP_FORMAT = '%Y-%m-%d %H:%M:%S.%f'
TIMEZONE = os.getenv('FORGE_TIMEZONE', 'UTC')
REPORT_SEPARATOR = ','

TASK_IDS = [
    'PL1-PC', 'PL1-PC-c', 'PL1-PW', 'PL1-PM', 'PL1-PM-c', 'PL1-GF', 'PL1-GF-c',
    'PL2-PW', 'PL3-PC', 'PL3-PW', 'PL4-PW', 'PL4-PW-c', 'EQ-PC', 'EQ-ER', 'EQ-GF',
]

# ============================================================================
# LOGGING
# ============================================================================

LOG_DIR = os.getenv('FORGE_LOG_DIR', os.path.join(os.path.dirname(__file__), 'logs'))
LOG_LEVEL = os.getenv('FORGE_LOG_LEVEL', 'INFO')  # DEBUG, INFO, WARNING, ERROR, CRITICAL
