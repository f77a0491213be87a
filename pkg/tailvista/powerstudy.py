"""
Monte Carlo estimates of how well the diagnostics discriminate between families.

Trial i always draws from seed + i, so a report depends only on its seed and
trial count, whether or not the trials run in a process pool.
"""
import json
import logging
import math
from dataclasses import asdict, dataclass
from functools import partial
from multiprocessing import Pool
from typing import Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from .diagnostics import ZoneLabel, classify_moment_point
from .distributions import GPD, DistributionModel, Lognormal, ParetoI, ParetoII, sample
from .empirical import Sample, moment_stats
from .errors import DataError, DomainError
from .settings import DEFAULT_SEED
from .utils import trial_seed

logger = logging.getLogger("tailvista.power")

MIN_TRIALS = 100
# 97.5% standard normal quantile
_Z_975 = 1.959963984540054


@dataclass(frozen=True)
class PowerReport:
    model_true: str
    model_alt: str
    n: int
    trials: int
    error_rate: float
    ci_halfwidth: float
    seed: int
    skipped: int = 0

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_table(self) -> str:
        frame = pd.DataFrame([self.to_dict()])
        return frame.to_string(index=False, float_format=lambda v: f"{v:.4f}")


def reports_table(reports: Iterable[PowerReport]) -> str:
    frame = pd.DataFrame([report.to_dict() for report in reports])
    return frame.to_string(index=False, float_format=lambda v: f"{v:.4f}")


def _accepted_zones(model: DistributionModel):
    if isinstance(model, (ParetoI, ParetoII)) or (isinstance(model, GPD) and model.xi > 0):
        return (ZoneLabel.PARETIAN, ZoneLabel.ABOVE_PARETO), "lognormal"
    if isinstance(model, Lognormal):
        return (ZoneLabel.LOGNORMAL, ZoneLabel.GRAY), "pareto1"
    raise DomainError(f"No competing family defined for {model.describe()}; "
                      f"use a Pareto-type or lognormal model")


def _check_trials(trials: int) -> None:
    if trials < MIN_TRIALS:
        raise DomainError(f"Power studies need at least {MIN_TRIALS} trials, got {trials}")


def _run_trials(task, trials: int, workers: Optional[int]) -> list:
    if workers and workers > 1:
        with Pool(workers) as pool:
            return pool.map(task, range(trials))
    return [task(i) for i in range(trials)]


def _classification_trial(i: int, model: DistributionModel, n: int, seed: int,
                          formula_mode: str) -> Optional[ZoneLabel]:
    try:
        point = moment_stats(sample(model, n, trial_seed(seed, i)))
        return classify_moment_point(point, formula_mode).label
    except (DataError, DomainError):
        return None


def _binomial_halfwidth(rate: float, count: int) -> float:
    if count == 0:
        return math.nan
    return _Z_975 * math.sqrt(rate * (1.0 - rate) / count)


def classification_error_rates(true_model: DistributionModel, n: int, trials: int = 1000,
                               seed: int = DEFAULT_SEED, formula_mode: str = "corrected",
                               workers: Optional[int] = None) -> PowerReport:
    """
    Share of simulated samples whose moment point lands outside the zones of
    the true family.

    A Pareto-type truth must land in the Paretian or AbovePareto zone (the
    rule-of-thumb override already relabels Gray points as Paretian); a
    lognormal truth must land in the Lognormal or Gray zone. Draws whose
    moment point cannot be computed are skipped and counted.
    """
    _check_trials(trials)
    accepted, alternative = _accepted_zones(true_model)
    task = partial(_classification_trial, model=true_model, n=n, seed=seed,
                   formula_mode=formula_mode)
    labels = _run_trials(task, trials, workers)

    valid = [label for label in labels if label is not None]
    skipped = trials - len(valid)
    if skipped:
        logger.info(f"Skipped {skipped} degenerate draws out of {trials}")
    errors = sum(label not in accepted for label in valid)
    rate = errors / len(valid) if valid else math.nan
    logger.info(f"{true_model.describe()}, n={n}: error rate {rate:.4f} over {len(valid)} trials")

    return PowerReport(model_true=true_model.describe(), model_alt=alternative, n=n,
                       trials=trials, error_rate=rate,
                       ci_halfwidth=_binomial_halfwidth(rate, len(valid)),
                       seed=seed, skipped=skipped)


def error_rate_curve(true_model: DistributionModel, sizes: Iterable[int], trials: int = 1000,
                     seed: int = DEFAULT_SEED, formula_mode: str = "corrected",
                     workers: Optional[int] = None) -> List[PowerReport]:
    """classification_error_rates over a grid of sample sizes with a common seed"""
    return [classification_error_rates(true_model, n, trials, seed, formula_mode, workers)
            for n in sizes]


# Quantile levels of the three mean excess thresholds
ME_CURVATURE_LEVELS = (0.05, 0.4, 0.8)


@dataclass(frozen=True)
class MeCurvature:
    thresholds: Tuple[float, ...]
    mean_excess: Tuple[float, ...]
    curvature: float
    stderr: float

    @property
    def significant(self) -> bool:
        return abs(self.curvature) > 2.0 * self.stderr


def mean_excess_curvature(s: Sample,
                          levels: Tuple[float, float, float] = ME_CURVATURE_LEVELS) -> MeCurvature:
    """
    Change of slope of the mean excess plot across three sample quantiles.

    The curvature is slope(u2, u3) - slope(u1, u2) of the points (u, e_n(u)).
    Its standard error comes from the influence function of each nested
    exceedance mean, so the overlap of the exceedance sets is accounted for.
    """
    if len(levels) != 3 or not 0 <= levels[0] < levels[1] < levels[2] < 1:
        raise DomainError(f"Curvature levels must be three increasing values in [0, 1), "
                          f"got {levels}")
    values = s.values
    n = values.size
    u = values[[int(level * n) for level in levels]]
    above = values[:, None] > u[None, :]
    counts = above.sum(axis=0)
    if np.any(counts < 2) or np.any(np.diff(u) <= 0):
        raise DataError(f"insufficient data: mean excess thresholds {u.tolist()} are not "
                        f"distinct or leave fewer than 2 exceedances")

    excess = np.where(above, values[:, None] - u[None, :], 0.0)
    e = excess.sum(axis=0) / counts
    low, high = 1.0 / (u[1] - u[0]), 1.0 / (u[2] - u[1])
    weights = np.array([low, -(low + high), high])
    curvature = float(weights @ e)

    influence = np.where(above, excess - e[None, :], 0.0) / (counts / n)[None, :]
    stderr = float(math.sqrt(np.sum((influence @ weights) ** 2)) / n)
    return MeCurvature(thresholds=tuple(u.tolist()), mean_excess=tuple(e.tolist()),
                       curvature=curvature, stderr=stderr)


def _curved_mean_excess(i: int, model: DistributionModel, n: int, seed: int,
                        levels: Tuple[float, float, float]) -> bool:
    try:
        return mean_excess_curvature(sample(model, n, trial_seed(seed, i)), levels).significant
    except DataError:
        return False


def me_discrimination_power(n: int, trials: int = 500, seed: int = DEFAULT_SEED,
                            model: Optional[DistributionModel] = None,
                            levels: Tuple[float, float, float] = ME_CURVATURE_LEVELS,
                            workers: Optional[int] = None) -> float:
    """
    Fraction of simulated mean excess plots that are visibly not straight.

    A Paretian mean excess plot is a straight line. A trial counts as
    distinguished when the curvature of `mean_excess_curvature` exceeds twice
    its standard error in absolute value. The default model is Lognormal(0, 1).
    """
    _check_trials(trials)
    model = model if model is not None else Lognormal(0.0, 1.0)
    task = partial(_curved_mean_excess, model=model, n=n, seed=seed, levels=levels)
    outcomes = _run_trials(task, trials, workers)
    fraction = sum(outcomes) / trials
    logger.info(f"{model.describe()}, n={n}: {fraction:.3f} of mean excess plots distinguished")
    return fraction
