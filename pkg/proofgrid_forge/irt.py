"""
Two-Parameter IRT

Fits and analyses the 2PL model P(correct) = sigmoid(a * (theta - b)):
- ResponseMatrix: respondents x items 0/1 outcomes, non-informative items dropped
- fit_2pl: joint MAP estimation by alternating damped Newton steps
  (2x2 per item on (log a, b), scalar per respondent on theta), with
  step halving, a-clipping and per-iteration standardization of theta
- icc / item_info / task_info and the Fisher information grid
- band_scores: average task information over an ability band, normalized
  by the best any item set of that size could reach on it
- wright_map: models and items on one shared theta scale, as text
- load_params: replay archived (theta) or (a, b) tables

Usage:
    matrix = ResponseMatrix.from_csv('matrix.csv')
    fit = fit_2pl(matrix, IrtConfig(seed=7))
    band_scores(fit.items, Band(-0.7, 0.7))
    print(wright_map(fit.abilities, fit.items['b']))
"""

import json
import logging
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.optimize import minimize_scalar
from scipy.special import expit, log_expit

try:
    from .config import (BAND_GRID_SIZE, IRT_A_MAX, IRT_A_MIN, IRT_DAMPING, IRT_INIT_B_SD, IRT_INIT_LOG_A_SD,
                         IRT_MAX_HALVINGS, IRT_MAX_ITER, IRT_SIGMA_A, IRT_SIGMA_B, IRT_TOL, WRIGHT_MAP_BINS)
    from .errors import NonConvergence, SchemaError
except ImportError:
    from config import (BAND_GRID_SIZE, IRT_A_MAX, IRT_A_MIN, IRT_DAMPING, IRT_INIT_B_SD, IRT_INIT_LOG_A_SD,
                        IRT_MAX_HALVINGS, IRT_MAX_ITER, IRT_SIGMA_A, IRT_SIGMA_B, IRT_TOL, WRIGHT_MAP_BINS)
    from errors import NonConvergence, SchemaError

logger = logging.getLogger(__name__)

ItemsLike = Union[pd.DataFrame, Sequence[Tuple[float, float]], np.ndarray]


# ============================================================================
# RESPONSE MATRIX
# ============================================================================

@dataclass
class ResponseMatrix:
    """
    Binary outcomes, one row per respondent (model) and one column per item

    Items answered identically by everyone carry no information about the
    respondents and are moved to `dropped` on construction.
    """
    respondents: List[str]
    items: List[str]
    outcomes: np.ndarray
    dropped: List[str] = field(default_factory=list)

    def __post_init__(self):
        outcomes = np.asarray(self.outcomes, dtype=float)
        if outcomes.ndim != 2 or outcomes.shape != (len(self.respondents), len(self.items)):
            raise ValueError(f"Outcome shape {outcomes.shape} does not match "
                             f"{len(self.respondents)} respondents x {len(self.items)} items")
        if np.isnan(outcomes).any():
            raise ValueError("Response matrix contains missing outcomes")
        if not np.isin(outcomes, (0.0, 1.0)).all():
            raise ValueError("Response matrix cells must be 0 or 1")

        means = outcomes.mean(axis=0) if outcomes.size else np.zeros(len(self.items))
        keep = (means > 0) & (means < 1)
        newly_dropped = [label for label, k in zip(self.items, keep) if not k]
        if newly_dropped:
            logger.info(f"[FIT] Dropping {len(newly_dropped)} non-informative items")
        self.dropped = list(self.dropped) + newly_dropped
        self.items = [label for label, k in zip(self.items, keep) if k]
        self.outcomes = outcomes[:, keep].astype(bool)

    @property
    def shape(self) -> Tuple[int, int]:
        return self.outcomes.shape

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> 'ResponseMatrix':
        """Rows are respondents (index), columns are items"""
        return cls(respondents=[str(r) for r in frame.index],
                   items=[str(c) for c in frame.columns],
                   outcomes=frame.to_numpy(dtype=float))

    @classmethod
    def from_dict(cls, responses: Mapping[str, Mapping[str, int]]) -> 'ResponseMatrix':
        """respondent -> {item: 0/1}; every respondent must answer every item"""
        frame = pd.DataFrame.from_dict(responses, orient='index')
        if frame.isna().any().any():
            raise ValueError("Every respondent must have an outcome for every item")
        return cls.from_frame(frame)

    @classmethod
    def from_csv(cls, path: str) -> 'ResponseMatrix':
        """First column holds respondent labels, the header row item labels"""
        frame = pd.read_csv(path, index_col=0)
        return cls.from_frame(frame)


# ============================================================================
# MODEL FUNCTIONS
# ============================================================================

def icc(a, b, theta):
    """Probability of a correct response"""
    return expit(np.asarray(a) * (np.asarray(theta) - np.asarray(b)))


def item_info(a, b, theta):
    """Fisher information a^2 P (1 - P); peaks at theta = b with value a^2 / 4"""
    p = icc(a, b, theta)
    return np.asarray(a) ** 2 * p * (1 - p)


def _item_arrays(items: ItemsLike) -> Tuple[np.ndarray, np.ndarray, List[str]]:
    if isinstance(items, pd.DataFrame):
        return (items['a'].to_numpy(dtype=float), items['b'].to_numpy(dtype=float),
                [str(i) for i in items.index])
    array = np.asarray(items, dtype=float).reshape(-1, 2)
    return array[:, 0], array[:, 1], [str(i) for i in range(len(array))]


def task_info(items: ItemsLike, theta):
    """Sum of the item informations at theta (scalar or array)"""
    a, b, _ = _item_arrays(items)
    theta = np.asarray(theta, dtype=float)
    info = item_info(a[:, None], b[:, None], theta.reshape(1, -1)).sum(axis=0)
    return info.reshape(theta.shape) if theta.ndim else float(info[0])


def fisher_grid(items: ItemsLike, grid: Sequence[float]) -> pd.DataFrame:
    """Per-item and total information on a theta grid, one row per grid point"""
    a, b, labels = _item_arrays(items)
    grid = np.asarray(grid, dtype=float)
    values = item_info(a[None, :], b[None, :], grid[:, None])
    frame = pd.DataFrame(values, index=pd.Index(grid, name='theta'), columns=labels)
    frame['task'] = frame.sum(axis=1)
    return frame


# ============================================================================
# FITTING
# ============================================================================

@dataclass
class IrtConfig:
    """Prior scales, step control and stopping rule of the MAP fit"""
    sigma_a: float = IRT_SIGMA_A
    sigma_b: float = IRT_SIGMA_B
    damping: float = IRT_DAMPING
    max_halvings: int = IRT_MAX_HALVINGS
    a_min: float = IRT_A_MIN
    a_max: float = IRT_A_MAX
    tol: float = IRT_TOL
    max_iter: int = IRT_MAX_ITER
    init_log_a_sd: float = IRT_INIT_LOG_A_SD
    init_b_sd: float = IRT_INIT_B_SD
    seed: int = 0

    def __post_init__(self):
        if self.sigma_a <= 0 or self.sigma_b <= 0:
            raise ValueError("Prior scales must be positive")
        if not 0 < self.damping <= 1:
            raise ValueError(f"damping must lie in (0, 1], got {self.damping}")
        if not 0 < self.a_min < self.a_max:
            raise ValueError(f"Need 0 < a_min < a_max, got [{self.a_min}, {self.a_max}]")


def _log_lik(y: np.ndarray, z: np.ndarray) -> np.ndarray:
    return y * log_expit(z) + (1 - y) * log_expit(-z)


def item_objective(theta: np.ndarray, y: np.ndarray, log_a: np.ndarray, b: np.ndarray,
                   config: IrtConfig) -> np.ndarray:
    """Itemwise MAP objective, one value per item (columns of y)"""
    z = np.exp(log_a)[None, :] * (theta[:, None] - b[None, :])
    return (_log_lik(y, z).sum(axis=0)
            - log_a ** 2 / (2 * config.sigma_a ** 2)
            - b ** 2 / (2 * config.sigma_b ** 2))


def item_gradient(theta: np.ndarray, y: np.ndarray, log_a: np.ndarray, b: np.ndarray,
                  config: IrtConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Gradient of item_objective in (log a, b)"""
    a = np.exp(log_a)
    t = theta[:, None] - b[None, :]
    r = y - expit(a[None, :] * t)
    g_log_a = (r * a[None, :] * t).sum(axis=0) - log_a / config.sigma_a ** 2
    g_b = -(r * a[None, :]).sum(axis=0) - b / config.sigma_b ** 2
    return g_log_a, g_b


def ability_objective(theta: np.ndarray, y: np.ndarray, log_a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Respondent-wise MAP objective under the standard normal prior"""
    z = np.exp(log_a)[None, :] * (theta[:, None] - b[None, :])
    return _log_lik(y, z).sum(axis=1) - theta ** 2 / 2


def map_objective(theta: np.ndarray, y: np.ndarray, log_a: np.ndarray, b: np.ndarray,
                  config: IrtConfig) -> float:
    """Joint log-posterior up to a constant"""
    z = np.exp(log_a)[None, :] * (theta[:, None] - b[None, :])
    return float(_log_lik(y, z).sum()
                 - (theta ** 2).sum() / 2
                 - (log_a ** 2).sum() / (2 * config.sigma_a ** 2)
                 - (b ** 2).sum() / (2 * config.sigma_b ** 2))


def log_likelihood(theta: np.ndarray, y: np.ndarray, log_a: np.ndarray, b: np.ndarray) -> float:
    z = np.exp(log_a)[None, :] * (theta[:, None] - b[None, :])
    return float(_log_lik(y, z).sum())


def rescale(theta: np.ndarray, log_a: np.ndarray, b: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Standardize theta to mean 0 and variance 1

    b and log a shift to compensate, so every a * (theta - b) is unchanged.
    """
    mean = theta.mean()
    sd = theta.std()
    if sd <= 0:
        return theta - mean, log_a, b - mean
    return (theta - mean) / sd, log_a + math.log(sd), (b - mean) / sd


def _item_step(theta, y, log_a, b, config: IrtConfig) -> Tuple[np.ndarray, np.ndarray, int]:
    a = np.exp(log_a)
    t = theta[:, None] - b[None, :]
    p = expit(a[None, :] * t)
    r = y - p
    w = p * (1 - p)
    at = a[None, :] * t

    g1, g2 = item_gradient(theta, y, log_a, b, config)
    h11 = -(w * at ** 2).sum(axis=0) - 1 / config.sigma_a ** 2
    h22 = -w.sum(axis=0) * a ** 2 - 1 / config.sigma_b ** 2
    h12 = (w * at).sum(axis=0) * a
    det = h11 * h22 - h12 ** 2

    d1 = -(h22 * g1 - h12 * g2) / det
    d2 = -(h11 * g2 - h12 * g1) / det

    lo, hi = math.log(config.a_min), math.log(config.a_max)
    base = item_objective(theta, y, log_a, b, config)
    new_log_a, new_b = log_a.copy(), b.copy()
    pending = np.ones_like(log_a, dtype=bool)
    scale = config.damping
    for _ in range(config.max_halvings + 1):
        cand_log_a = np.clip(log_a + scale * d1, lo, hi)
        cand_b = b + scale * d2
        accepted = pending & (item_objective(theta, y, cand_log_a, cand_b, config) >= base)
        new_log_a[accepted] = cand_log_a[accepted]
        new_b[accepted] = cand_b[accepted]
        pending &= ~accepted
        if not pending.any():
            break
        scale /= 2
    return new_log_a, new_b, int(pending.sum())


def _ability_step(theta, y, log_a, b, config: IrtConfig) -> Tuple[np.ndarray, int]:
    a = np.exp(log_a)
    p = expit(a[None, :] * (theta[:, None] - b[None, :]))
    grad = ((y - p) * a[None, :]).sum(axis=1) - theta
    hess = -(p * (1 - p) * a[None, :] ** 2).sum(axis=1) - 1
    delta = -grad / hess

    base = ability_objective(theta, y, log_a, b)
    new_theta = theta.copy()
    pending = np.ones_like(theta, dtype=bool)
    scale = config.damping
    for _ in range(config.max_halvings + 1):
        cand = theta + scale * delta
        accepted = pending & (ability_objective(cand, y, log_a, b) >= base)
        new_theta[accepted] = cand[accepted]
        pending &= ~accepted
        if not pending.any():
            break
        scale /= 2
    return new_theta, int(pending.sum())


def initial_parameters(y: np.ndarray, config: IrtConfig) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Theta from smoothed accuracy logits (standardized), log a and b drawn from seeded normals"""
    n, m = y.shape
    rng = np.random.default_rng(config.seed)
    accuracy = (y.sum(axis=1) + 0.5) / (m + 1)
    theta = np.log(accuracy / (1 - accuracy))
    sd = theta.std()
    theta = (theta - theta.mean()) / sd if sd > 0 else theta - theta.mean()
    log_a = np.clip(rng.normal(0.0, config.init_log_a_sd, size=m), math.log(config.a_min), math.log(config.a_max))
    b = rng.normal(0.0, config.init_b_sd, size=m)
    return theta, log_a, b


@dataclass
class FitResult:
    """
    Fitted abilities and item parameters

    abilities is a Series indexed by respondent; items a DataFrame indexed by
    item label with columns a and b. diagnostics records convergence, the
    objective trace and the configuration used.
    """
    abilities: pd.Series
    items: pd.DataFrame
    diagnostics: Dict

    @property
    def converged(self) -> bool:
        return bool(self.diagnostics['converged'])

    def save(self, directory: str, sep: str = ',') -> Dict[str, str]:
        """Write abilities.csv, items.csv and diagnostics.json under directory"""
        os.makedirs(directory, exist_ok=True)
        paths = {
            'abilities': os.path.join(directory, 'abilities.csv'),
            'items': os.path.join(directory, 'items.csv'),
            'diagnostics': os.path.join(directory, 'diagnostics.json'),
        }
        self.abilities.rename('theta').to_frame().to_csv(paths['abilities'], sep=sep, index_label='respondent')
        self.items.to_csv(paths['items'], sep=sep, index_label='item')
        diagnostics = {k: v for k, v in self.diagnostics.items() if k != 'warning'}
        with open(paths['diagnostics'], 'w') as f:
            json.dump(diagnostics, f, indent=2)
        logger.info(f"[FIT] Parameters written to {directory}")
        return paths


def fit_2pl(matrix: ResponseMatrix, config: Optional[IrtConfig] = None) -> FitResult:
    """
    Joint MAP fit of the 2PL model

    Each iteration takes one damped Newton step per item on (log a, b) with
    theta fixed, one per respondent on theta with the items fixed, then
    standardizes theta. A step is halved until its block objective does not
    decrease; items or respondents with no acceptable step keep their values.
    Stops when the relative l2 change of (theta, log a, b) drops below tol.

    Args:
        matrix: Response matrix (non-informative items already dropped)
        config: Fit settings, defaults from config.py

    Returns:
        FitResult. Hitting max_iter does not raise: diagnostics['converged']
        is False and diagnostics['warning'] holds the NonConvergence.

    Raises:
        ValueError: With fewer than two respondents or no informative item
    """
    config = config or IrtConfig()
    n, m = matrix.shape
    if n < 2:
        raise ValueError(f"fit_2pl needs at least two respondents, got {n}")
    if m < 1:
        raise ValueError("fit_2pl needs at least one informative item")

    y = matrix.outcomes.astype(float)
    theta, log_a, b = initial_parameters(y, config)
    lo, hi = math.log(config.a_min), math.log(config.a_max)

    trace = []
    converged = False
    change = math.inf
    iteration = 0
    logger.info(f"[FIT] 2PL fit on {n} respondents x {m} items (seed={config.seed})")

    while iteration < config.max_iter:
        iteration += 1
        before = np.concatenate([theta, log_a, b])
        start = map_objective(theta, y, log_a, b, config)

        log_a, b, stuck_items = _item_step(theta, y, log_a, b, config)
        after_items = map_objective(theta, y, log_a, b, config)

        theta, stuck_abilities = _ability_step(theta, y, log_a, b, config)
        after_abilities = map_objective(theta, y, log_a, b, config)

        theta, log_a, b = rescale(theta, log_a, b)
        log_a = np.clip(log_a, lo, hi)

        after = np.concatenate([theta, log_a, b])
        change = float(np.linalg.norm(after - before) / max(np.linalg.norm(before), 1e-12))
        trace.append({
            'iteration': iteration,
            'objective_start': start,
            'objective_items': after_items,
            'objective_abilities': after_abilities,
            'objective_rescaled': map_objective(theta, y, log_a, b, config),
            'change': change,
            'stuck_items': stuck_items,
            'stuck_abilities': stuck_abilities,
        })
        logger.debug(f"[FIT] iter {iteration}: objective={after_abilities:.6f} change={change:.3e}")

        if change < config.tol:
            converged = True
            break

    diagnostics = {
        'converged': converged,
        'iterations': iteration,
        'change': change,
        'objective': map_objective(theta, y, log_a, b, config),
        'log_likelihood': log_likelihood(theta, y, log_a, b),
        'dropped_items': list(matrix.dropped),
        'config': asdict(config),
        'trace': trace,
    }
    if converged:
        logger.info(f"[OK] 2PL fit converged after {iteration} iterations")
    else:
        warning = NonConvergence(iteration, change)
        diagnostics['warning'] = warning
        logger.warning(f"[X] {warning}")

    abilities = pd.Series(theta, index=pd.Index(matrix.respondents, name='respondent'), name='theta')
    items = pd.DataFrame({'a': np.exp(log_a), 'b': b}, index=pd.Index(matrix.items, name='item'))
    return FitResult(abilities=abilities, items=items, diagnostics=diagnostics)


def load_params(path: str, sep: str = ',') -> Union[pd.Series, pd.DataFrame]:
    """
    Read archived parameters for replay

    A table with a `theta` column yields an ability Series; one with `a` and
    `b` columns yields an item DataFrame. The first column holds the labels.

    Raises:
        SchemaError: If neither layout matches
    """
    frame = pd.read_csv(path, sep=sep, index_col=0)
    frame.index = frame.index.map(str)
    if 'theta' in frame.columns:
        return frame['theta'].astype(float)
    if {'a', 'b'} <= set(frame.columns):
        items = frame[['a', 'b']].astype(float)
        if (items['a'] <= 0).any():
            raise SchemaError(f"{path}: discriminations must be positive", key='a')
        return items
    raise SchemaError(f"{path}: expected a 'theta' column or 'a' and 'b' columns",
                      key=','.join(map(str, frame.columns)))


# ============================================================================
# BAND ANALYTICS
# ============================================================================

@dataclass(frozen=True)
class Band:
    """Ability interval [lo, hi] sampled on grid_size points"""
    lo: float
    hi: float
    grid_size: int = BAND_GRID_SIZE

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"Band needs lo < hi, got [{self.lo}, {self.hi}]")
        if self.grid_size < 2:
            raise ValueError(f"Band grid needs at least 2 points, got {self.grid_size}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.grid_size)


def band_item_average(a: float, b: float, band: Band) -> float:
    """
    Exact band-average information of one item

    The integral of a^2 P (1 - P) over the band is a [P(hi) - P(lo)].
    """
    return a * (expit(a * (band.hi - b)) - expit(a * (band.lo - b))) / band.width


def band_upper_bound(a: float, band: Band) -> float:
    """Largest band-average information an item with slope a can have (b at the midpoint)"""
    return band_item_average(a, band.midpoint, band)


def band_upper_bound_grid(a: float, band: Band, points: int = 2001) -> float:
    """Numerical maximization of the band average over b, to cross-check band_upper_bound"""
    candidates = np.linspace(band.lo - band.width, band.hi + band.width, points)
    values = np.array([band_item_average(a, b, band) for b in candidates])
    best = candidates[int(values.argmax())]
    step = candidates[1] - candidates[0]
    result = minimize_scalar(lambda b: -band_item_average(a, b, band),
                             bounds=(best - step, best + step), method='bounded',
                             options={'xatol': 1e-10})
    return float(max(values.max(), -result.fun))


def band_scores(items: ItemsLike, band: Band) -> Dict[str, float]:
    """
    Information a task delivers over an ability band

    Returns:
        avg_info: average height of the task-information curve over the band
        mean_info_per_item: avg_info / number of items
        upper_bound: sum of the per-item idealized band averages
        score: avg_info / upper_bound, in [0, 1]
    """
    a, _, _ = _item_arrays(items)
    if a.size == 0:
        raise ValueError("band_scores needs at least one item")

    grid = band.grid
    avg_info = float(trapezoid(task_info(items, grid), grid) / band.width)
    upper = float(sum(band_upper_bound(float(ai), band) for ai in a))
    return {
        'avg_info': avg_info,
        'mean_info_per_item': avg_info / a.size,
        'upper_bound': upper,
        'score': min(1.0, avg_info / upper),
    }


# ============================================================================
# WRIGHT MAP
# ============================================================================

def wright_map(abilities: Union[pd.Series, Mapping[str, float]], difficulties: Sequence[float],
               labels: Optional[Sequence[str]] = None, n_bins: int = WRIGHT_MAP_BINS) -> str:
    """
    Text Wright map: respondents left, item labels right, one row per theta bin

    Bins split the observed theta range (abilities and difficulties together)
    into n_bins equal slices, highest first. A zero range gives one row.
    """
    if isinstance(abilities, pd.Series):
        abilities = abilities.to_dict()
    if not abilities and len(difficulties) == 0:
        raise ValueError("wright_map needs at least one ability or difficulty")

    difficulties = [float(d) for d in difficulties]
    if labels is None:
        labels = [str(i) for i in range(len(difficulties))]
    if len(labels) != len(difficulties):
        raise ValueError("One label per difficulty is required")

    values = list(abilities.values()) + difficulties
    lo, hi = min(values), max(values)
    width = (hi - lo) / n_bins
    bins = 1 if width == 0 else n_bins

    def bin_of(value: float) -> int:
        if bins == 1:
            return 0
        return min(int((value - lo) / width), bins - 1)

    left: List[List[str]] = [[] for _ in range(bins)]
    right: List[List[str]] = [[] for _ in range(bins)]
    for name, theta in sorted(abilities.items(), key=lambda kv: (kv[1], kv[0])):
        left[bin_of(theta)].append(str(name))
    for label, b in sorted(zip(labels, difficulties), key=lambda kv: (kv[1], str(kv[0]))):
        right[bin_of(b)].append(str(label))

    left_cells = [' '.join(names) for names in left]
    left_width = max([len(cell) for cell in left_cells] + [len('models')])
    lines = [f"{'theta':>7}  {'models':>{left_width}} | items"]
    for k in reversed(range(bins)):
        center = lo + (k + 0.5) * width if bins > 1 else lo
        lines.append(f"{center:+7.2f}  {left_cells[k]:>{left_width}} | {' '.join(right[k])}".rstrip())
    return '\n'.join(lines)
