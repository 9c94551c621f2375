"""
Psychometric Metrics

Summary statistics computed over per-model benchmark results:
- Wilson score intervals and the "0.87 (±0.02)" accuracy table
- Discrimination index (mean pairwise accuracy gap) and its reading bands
- Lorenz curve and Gini index, by trapezoidal integration and from the DI
- Epistemic stability index, global and error-triggered
- Calibration gaps, ECE and MCE over five discrete confidence levels

The 2PL fitting and information analytics live in irt.py.

Usage:
    center, half, lo, hi = wilson(282, 300)
    di([0.94, 0.23, 0.61])
    esi(58, 300)
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

try:
    from .config import CONFIDENCE_LEVELS, ESI_GAMMA, WILSON_Z
except ImportError:
    from config import CONFIDENCE_LEVELS, ESI_GAMMA, WILSON_Z

logger = logging.getLogger(__name__)

# Upper edges of the DI reading bands
DI_BANDS = [
    (0.05, 'saturated'),
    (0.10, 'compressing'),
    (0.20, 'healthy'),
    (math.inf, 'strong'),
]


# ============================================================================
# INTERVALS
# ============================================================================

def wilson(k: int, n: int, z: float = WILSON_Z) -> Tuple[float, float, float, float]:
    """
    Wilson score interval for k successes out of n trials

    Args:
        k: Number of successes (0 <= k <= n)
        n: Number of trials (n >= 1)
        z: Normal quantile

    Returns:
        (center, half_width, lo, hi); the interval always lies within [0, 1]

    Raises:
        ValueError: If the counts are out of range
    """
    if n < 1 or k < 0 or k > n:
        raise ValueError(f"wilson needs 0 <= k <= n and n >= 1, got k={k}, n={n}")

    p = k / n
    z2 = z * z
    denom = 1 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    return center, half, max(0.0, center - half), min(1.0, center + half)


def format_accuracy(k: int, n: int, z: float = WILSON_Z) -> str:
    """Render an accuracy the way the published tables do: 0.87 (±0.02)"""
    _, half, _, _ = wilson(k, n, z)
    return f"{k / n:.2f} (±{half:.2f})"


def accuracy_table(counts: Mapping[str, Tuple[int, int]], z: float = WILSON_Z) -> pd.DataFrame:
    """
    Per-model accuracy with Wilson half-widths, best model first

    Args:
        counts: model id -> (credited, total)

    Returns:
        DataFrame indexed by model with columns credited, total, accuracy,
        half_width, lo, hi and display
    """
    rows = []
    for model, (k, n) in counts.items():
        if n == 0:
            logger.warning(f"[X] {model}: no scored records, left out of the accuracy table")
            continue
        _, half, lo, hi = wilson(k, n, z)
        rows.append({
            'model': model,
            'credited': k,
            'total': n,
            'accuracy': k / n,
            'half_width': half,
            'lo': lo,
            'hi': hi,
            'display': format_accuracy(k, n, z),
        })

    columns = ['model', 'credited', 'total', 'accuracy', 'half_width', 'lo', 'hi', 'display']
    table = pd.DataFrame(rows, columns=columns)
    table = table.sort_values(['accuracy', 'model'], ascending=[False, True], kind='mergesort')
    return table.set_index('model')


# ============================================================================
# DISCRIMINATION
# ============================================================================

def _accuracy_array(accuracies: Iterable[float]) -> np.ndarray:
    values = np.asarray(list(accuracies), dtype=float)
    if values.size < 2:
        raise ValueError("At least two accuracies are needed")
    if np.any((values < 0) | (values > 1)) or np.any(np.isnan(values)):
        raise ValueError("Accuracies must lie in [0, 1]")
    return values


def di(accuracies: Iterable[float]) -> float:
    """Mean absolute accuracy difference over all unordered model pairs"""
    values = _accuracy_array(accuracies)
    gaps = [abs(x - y) for x, y in combinations(values, 2)]
    return float(np.mean(gaps))


def di_band(value: float) -> str:
    """Qualitative reading of a DI value"""
    for edge, label in DI_BANDS:
        if value < edge:
            return label
    return DI_BANDS[-1][1]


def lorenz_curve(accuracies: Iterable[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Lorenz points: share of models (ascending accuracy) vs share of accuracy mass

    Both arrays start at 0 and end at 1.
    """
    values = np.sort(_accuracy_array(accuracies))
    total = values.sum()
    x = np.linspace(0.0, 1.0, values.size + 1)
    if total == 0:
        return x, x.copy()
    y = np.concatenate([[0.0], np.cumsum(values) / total])
    return x, y


def lorenz_gini(accuracies: Iterable[float]) -> Dict[str, float]:
    """
    Gini index two ways

    Returns:
        {'integrated': 1 - 2 * area under the Lorenz curve (trapezoidal rule),
         'from_di': DI / (2 * mean accuracy)}
    """
    values = _accuracy_array(accuracies)
    mean = values.mean()
    if mean == 0:
        return {'integrated': 0.0, 'from_di': 0.0}

    x, y = lorenz_curve(values)
    integrated = 1.0 - 2.0 * trapezoid(y, x)
    return {'integrated': float(integrated), 'from_di': di(values) / (2 * mean)}


# ============================================================================
# EPISTEMIC STABILITY
# ============================================================================

def esi(incompatible: int, total: int, gamma: float = ESI_GAMMA) -> float:
    """
    Epistemic stability index

    1 - log(1 + gamma * inc / total) / log(1 + gamma). It is 1 when nothing is
    precluded and 0 when everything is.

    Raises:
        ValueError: On counts out of range or non-positive gamma
    """
    if total < 1 or incompatible < 0 or incompatible > total:
        raise ValueError(f"esi needs 0 <= incompatible <= total and total >= 1, "
                         f"got {incompatible}/{total}")
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    return 1.0 - math.log1p(gamma * incompatible / total) / math.log1p(gamma)


def esi_error_triggered(incompatible_on_errors: int, errors: int, gamma: float = ESI_GAMMA) -> float:
    """ESI over the model's incorrect outputs only"""
    return esi(incompatible_on_errors, errors, gamma)


def esi_from_sets(reference: Sequence, judged: Sequence, incompatible: Callable[[object, object], bool],
                  gamma: float = ESI_GAMMA) -> float:
    """
    ESI of `judged` relative to `reference`

    A judgment in `judged` counts as inconsistent when some judgment in
    `reference` precludes it, i.e. incompatible(ref, item) holds. The score is
    normalized by len(judged), so swapping the arguments measures something else.
    """
    precluded = [item for item in judged if any(incompatible(ref, item) for ref in reference)]
    logger.debug(f"{len(precluded)} of {len(judged)} judgments precluded")
    return esi(len(precluded), len(judged), gamma)


# ============================================================================
# CALIBRATION
# ============================================================================

@dataclass(frozen=True)
class CalibrationRecord:
    """One confidence-tagged answer"""
    level: int
    correct: bool

    def __post_init__(self):
        if self.level not in CONFIDENCE_LEVELS:
            raise ValueError(f"Confidence level must be one of {sorted(CONFIDENCE_LEVELS)}, got {self.level}")

    @property
    def confidence(self) -> float:
        return CONFIDENCE_LEVELS[self.level]


@dataclass
class CalibrationSummary:
    bins: pd.DataFrame
    ece: float
    mce: float
    n: int

    def to_dict(self) -> dict:
        return {
            'ece': self.ece,
            'mce': self.mce,
            'n': self.n,
            'gaps': {int(level): (None if pd.isna(gap) else float(gap))
                     for level, gap in self.bins['gap'].items()},
        }


def calibration(records: Sequence) -> CalibrationSummary:
    """
    Per-level calibration gaps plus ECE and MCE

    Args:
        records: CalibrationRecord objects or (level, correct) pairs

    Returns:
        CalibrationSummary; bins has one row per confidence level with count,
        accuracy, confidence and gap (NaN accuracy and gap for empty bins)

    Raises:
        ValueError: If there are no records
    """
    items: List[CalibrationRecord] = [
        r if isinstance(r, CalibrationRecord) else CalibrationRecord(int(r[0]), bool(r[1]))
        for r in records
    ]
    if not items:
        raise ValueError("calibration needs at least one record")

    frame = pd.DataFrame({'level': [r.level for r in items], 'correct': [r.correct for r in items]})
    grouped = frame.groupby('level')['correct'].agg(['count', 'mean'])

    bins = pd.DataFrame(index=pd.Index(sorted(CONFIDENCE_LEVELS), name='level'))
    bins['confidence'] = [CONFIDENCE_LEVELS[level] for level in bins.index]
    bins['count'] = grouped['count'].reindex(bins.index).fillna(0).astype(int)
    bins['accuracy'] = grouped['mean'].reindex(bins.index)
    bins['gap'] = (bins['accuracy'] - bins['confidence']).abs()

    n = len(items)
    filled = bins[bins['count'] > 0]
    ece = float((filled['count'] / n * filled['gap']).sum())
    mce = float(filled['gap'].max())
    return CalibrationSummary(bins=bins, ece=ece, mce=mce, n=n)
