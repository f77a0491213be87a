"""
Mechanized reading of the Zipf, mean excess, moment-ratio and Zenga plots.

Each plot becomes a small pass/fail test; `verdict` combines them. A linear
Zipf tail and an upward mean excess are necessary for Paretianity, never
sufficient: the moment-ratio zone and the Zenga shape must agree before a
sample is called Paretian.
"""
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional

import numpy as np
from scipy import stats

from .distributions import (DistributionModel, ParetoI, sample, theoretical_moments,
                            zenga_theoretical)
from .empirical import (Sample, SpacingRatios, ZengaSeries, empirical_zenga, log_bin,
                        mean_excess_points, moment_stats, pairwise_aggregate,
                        spacing_ratios, survival_points)
from .errors import DataError, DomainError
from .series import AxisScale, MomentPoint, PlotSeries
from .settings import DEFAULT_SEED, FORMULA_MODES, DiagnosticSettings, GlobalSettings
from .utils import trial_seed

logger = logging.getLogger("tailvista.diagnostics")

VERDICT_SCHEMA = 1
PARETO_CV_LIMIT = 1.0 / math.sqrt(3.0)


def _settings_or_default(settings: Optional[DiagnosticSettings]) -> DiagnosticSettings:
    return settings if settings is not None else GlobalSettings.get_default_settings()


def _check_formula_mode(formula_mode: str) -> None:
    if formula_mode not in FORMULA_MODES:
        raise DomainError(f"Unknown formula mode {formula_mode!r}, expected one of {FORMULA_MODES}")


# Zipf plot

@dataclass(frozen=True)
class TailFit:
    slope: float
    intercept: float
    r2: float
    n_points: int
    passed: bool

    def to_dict(self) -> dict:
        return {'pass': self.passed, 'slope': self.slope, 'r2': self.r2,
                'n_points': self.n_points}


def zipf_series(s: Sample, binned: Optional[float] = None) -> PlotSeries:
    """Survival points on log-log axes, log-binned with base `binned` when given"""
    if binned is None:
        return survival_points(s)
    if s.n < 2:
        raise DataError(f"Zipf plot needs at least 2 observations, got {s.n}")
    return log_bin(s, binned).to_plot_series()


def tail_linearity(series: PlotSeries, tail_fraction: float = 0.2,
                   min_r2: float = 0.98, min_points: int = 10) -> TailFit:
    """
    Least squares of log y on log x over the points with the largest x.

    The top `tail_fraction` of the points is used. Passes when the slope is
    negative and r^2 reaches `min_r2`.
    """
    if not 0 < tail_fraction <= 1:
        raise DomainError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")

    order = np.argsort(series.x, kind='stable')
    k = int(math.ceil(tail_fraction * len(series) - 1e-9))
    tail = order[len(series) - k:]
    if k < min_points:
        raise DataError(
            f"insufficient tail: {k} points in the top {tail_fraction:g}, need {min_points}")

    x, y = series.x[tail], series.y[tail]
    if np.any(x <= 0) or np.any(y <= 0):
        raise DataError(f"Series {series.label!r} has non-positive values in its tail")
    log_x, log_y = np.log(x), np.log(y)
    if np.ptp(log_x) == 0:
        raise DataError("insufficient tail: all tail points share the same x")

    fit = stats.linregress(log_x, log_y)
    r2 = float(fit.rvalue) ** 2
    passed = bool(fit.slope < 0 and r2 >= min_r2)
    logger.debug(f"Tail fit over {k} points: slope={fit.slope:.4f}, r2={r2:.4f}")
    return TailFit(slope=float(fit.slope), intercept=float(fit.intercept), r2=r2,
                   n_points=k, passed=passed)


# Mean excess plot

@dataclass(frozen=True)
class MeTrend:
    slope: float
    intercept: float
    n_points: int
    passed: bool

    def to_dict(self) -> dict:
        return {'pass': self.passed, 'slope': self.slope, 'n_points': self.n_points}


def meplot_series(s: Sample, cut: int = 5) -> PlotSeries:
    return mean_excess_points(s, cut)


def me_trend(series: PlotSeries, min_slope: float = 0.1) -> MeTrend:
    """
    Least-squares slope of e(u) on u over the thresholds between the 10% and
    90% positions of the series. An upward trend (slope above `min_slope`)
    passes.
    """
    m = len(series)
    lower, upper = int(math.floor(0.1 * m)), int(math.ceil(0.9 * m))
    u, e = series.x[lower:upper], series.y[lower:upper]
    if u.size < 3 or np.ptp(u) == 0:
        raise DataError(f"insufficient data: {u.size} distinct thresholds for the trend")

    fit = stats.linregress(u, e)
    return MeTrend(slope=float(fit.slope), intercept=float(fit.intercept),
                   n_points=int(u.size), passed=bool(fit.slope > min_slope))


# Moment-ratio plot

@dataclass(frozen=True)
class BoundaryCurves:
    """Skewness of each boundary curve at one CV; None where a curve is undefined"""
    cv: float
    pareto: Optional[float]
    inv_gamma: Optional[float]
    lognormal: float
    gamma: float
    bernoulli: float

    def as_dict(self) -> Dict[str, Optional[float]]:
        return {'pareto': self.pareto, 'inv_gamma': self.inv_gamma,
                'lognormal': self.lognormal, 'gamma': self.gamma,
                'bernoulli': self.bernoulli}


def _pareto_boundary(cv: float, formula_mode: str) -> Optional[float]:
    if cv >= PARETO_CV_LIMIT:
        return None
    p = 1.0 + math.sqrt(1.0 + cv ** -2)
    if formula_mode == "paper_verbatim":
        return (1.0 + p) / (p - 3.0) * 2.0 / math.sqrt(1.0 - 2.0 / p)
    return 2.0 * (1.0 + p) / (p - 3.0) * math.sqrt(1.0 - 2.0 / p)


def boundary_curves(cv: float, formula_mode: str = "corrected") -> BoundaryCurves:
    """
    Evaluate the five reference curves of the moment-ratio plot at `cv`.

    Lognormal is cv^3 + 3 cv, gamma 2 cv, Bernoulli cv - 1/cv. The inverted
    gamma curve exists for cv < 1, the Pareto curve for cv < 1/sqrt(3),
    parameterized through p = 1 + sqrt(1 + cv^-2).
    """
    _check_formula_mode(formula_mode)
    if not (math.isfinite(cv) and cv > 0):
        raise DomainError(f"Boundary curves need a positive finite CV, got {cv}")
    return BoundaryCurves(
        cv=cv,
        pareto=_pareto_boundary(cv, formula_mode),
        inv_gamma=4.0 * cv / (1.0 - cv ** 2) if cv < 1.0 else None,
        lognormal=cv ** 3 + 3.0 * cv,
        gamma=2.0 * cv,
        bernoulli=cv - 1.0 / cv,
    )


def boundary_curve_series(cv_max: float = 20.0, n_points: int = 400,
                          formula_mode: str = "corrected") -> Dict[str, PlotSeries]:
    """Each boundary curve sampled over (0, cv_max], only where it is defined"""
    grid = np.linspace(cv_max / n_points, cv_max, n_points)
    # the Pareto and inverted gamma curves blow up at their limits, densify there
    grid = np.union1d(grid, PARETO_CV_LIMIT * (1.0 - np.geomspace(1e-4, 1.0, 60, endpoint=False)))
    grid = np.union1d(grid, 1.0 - np.geomspace(1e-4, 0.5, 40))
    grid = grid[(grid > 0) & (grid <= cv_max)]

    columns: Dict[str, List[tuple]] = {name: [] for name in
                                       ('pareto', 'inv_gamma', 'lognormal', 'gamma', 'bernoulli')}
    for cv in grid:
        for name, value in boundary_curves(float(cv), formula_mode).as_dict().items():
            if value is not None:
                columns[name].append((float(cv), value))
    return {name: PlotSeries(x=[p[0] for p in points], y=[p[1] for p in points], label=name)
            for name, points in columns.items() if points}


class ZoneLabel(str, Enum):
    PARETIAN = "Paretian"
    GRAY = "Gray"
    LOGNORMAL = "Lognormal"
    EXPONENTIAL_THIN = "ExponentialThin"
    SUB_BERNOULLI = "SubBernoulli"
    SYMMETRIC = "Symmetric"
    ABOVE_PARETO = "AbovePareto"


@dataclass(frozen=True)
class Zone:
    label: ZoneLabel
    rule_of_thumb_override: bool = False
    thin_tail_precheck: bool = False

    def to_dict(self) -> dict:
        return {'label': self.label.value,
                'rule_of_thumb_override': self.rule_of_thumb_override,
                'thin_tail_precheck': self.thin_tail_precheck}


def classify_moment_point(pt: MomentPoint, formula_mode: str = "corrected",
                          settings: Optional[DiagnosticSettings] = None) -> Zone:
    """
    Place a (CV, skewness) point into one zone of the moment-ratio plot.

    A point lying exactly on a curve belongs to the zone above it, except on
    the lognormal curve, which stays in the Lognormal zone. Between the
    inverted gamma and Pareto curves (or above inverted gamma for
    1/sqrt(3) <= cv < 1) the point is Paretian. A Gray point with cv below
    `rule_of_thumb_max_cv` and skewness above `rule_of_thumb_skewness` is
    relabelled Paretian.
    """
    settings = _settings_or_default(settings)
    _check_formula_mode(formula_mode)
    cv, skew = pt.cv, pt.skewness
    if not (math.isfinite(cv) and math.isfinite(skew)):
        raise DomainError(f"Moment point must be finite, got cv={cv}, skewness={skew}")

    precheck = cv <= 0 or skew < settings.symmetric_band
    if abs(skew) < settings.symmetric_band:
        return Zone(ZoneLabel.SYMMETRIC, thin_tail_precheck=precheck)
    if cv <= 0:
        return Zone(ZoneLabel.SUB_BERNOULLI, thin_tail_precheck=precheck)

    curves = boundary_curves(cv, formula_mode)
    lognormal_edge = curves.lognormal + 1e-9 * max(1.0, abs(curves.lognormal))

    if curves.pareto is not None and skew >= curves.pareto:
        label = ZoneLabel.ABOVE_PARETO
    elif curves.inv_gamma is not None and skew >= curves.inv_gamma:
        label = ZoneLabel.PARETIAN
    elif skew > lognormal_edge:
        label = ZoneLabel.GRAY
    elif skew >= curves.gamma:
        label = ZoneLabel.LOGNORMAL
    elif skew >= curves.bernoulli:
        label = ZoneLabel.EXPONENTIAL_THIN
    else:
        label = ZoneLabel.SUB_BERNOULLI

    if (label is ZoneLabel.GRAY and cv < settings.rule_of_thumb_max_cv
            and skew > settings.rule_of_thumb_skewness):
        logger.info(f"Gray point (cv={cv:.3f}, skewness={skew:.2f}) treated as Paretian "
                    f"by the skewness rule of thumb")
        return Zone(ZoneLabel.PARETIAN, rule_of_thumb_override=True, thin_tail_precheck=precheck)
    return Zone(label, thin_tail_precheck=precheck)


def moment_ratio_series(models: Iterable[DistributionModel]) -> PlotSeries:
    """Theoretical (CV, skewness) points of the models whose third moment is finite"""
    cvs, skews, names = [], [], []
    for model in models:
        point = theoretical_moments(model)
        if point is None:
            logger.info(f"{model.describe()} has no finite skewness, left off the plot")
            continue
        cvs.append(point[0])
        skews.append(point[1])
        names.append(model.describe())
    return PlotSeries(x=cvs, y=skews, label="; ".join(names))


# Zenga plot

class ZengaShape(str, Enum):
    INCREASING = "increasing"
    CONSTANT = "constant"
    CONVEX_MIN = "convex_min"
    OTHER = "other"


@dataclass(frozen=True)
class ZengaShapeFit:
    shape: ZengaShape
    slope: float
    rank_correlation: float
    z_range: float
    minimum_u: float
    n_points: int

    def to_dict(self) -> dict:
        return {'shape': self.shape.value, 'slope': self.slope,
                'rank_correlation': self.rank_correlation, 'range': self.z_range,
                'minimum_u': self.minimum_u}


def zenga_shape(series: ZengaSeries, settings: Optional[DiagnosticSettings] = None) -> ZengaShapeFit:
    """
    Classify a Zenga curve as constant, increasing, convex with an interior
    minimum, or other, after trimming u to `zenga_trim`.
    """
    settings = _settings_or_default(settings)
    low, high = settings.zenga_trim
    keep = (series.u >= low) & (series.u <= high)
    u, z = series.u[keep], series.z[keep]
    if u.size < settings.zenga_min_points:
        raise DataError(f"insufficient data: {u.size} Zenga points in [{low}, {high}], "
                        f"need {settings.zenga_min_points}")

    z_range = float(np.ptp(z))
    lowest = int(np.argmin(z))
    if z_range == 0:
        slope, rank_correlation = 0.0, 0.0
    else:
        slope = float(stats.linregress(u, z).slope)
        rank_correlation = float(stats.spearmanr(u, z).statistic)
        if not math.isfinite(rank_correlation):
            rank_correlation = 0.0

    left_rise, right_rise = z[0] - z[lowest], z[-1] - z[lowest]
    if z_range < settings.zenga_constant_range:
        shape = ZengaShape.CONSTANT
    elif slope > settings.zenga_increasing_slope and rank_correlation > settings.zenga_increasing_rank_corr:
        shape = ZengaShape.INCREASING
    elif (0 < lowest < u.size - 1 and left_rise > settings.zenga_min_rise
          and right_rise > settings.zenga_min_rise):
        shape = ZengaShape.CONVEX_MIN
    else:
        shape = ZengaShape.OTHER

    return ZengaShapeFit(shape=shape, slope=slope, rank_correlation=rank_correlation,
                         z_range=z_range, minimum_u=float(u[lowest]), n_points=int(u.size))


def theoretical_zenga_series(model: DistributionModel, n_points: int = 199,
                             formula_mode: str = "corrected") -> ZengaSeries:
    """Closed-form Zenga curve on the grid u = i/(n_points+1)"""
    u = np.arange(1, n_points + 1, dtype=np.float64) / (n_points + 1)
    z = np.asarray(zenga_theoretical(model, u, formula_mode), dtype=np.float64)
    return ZengaSeries(u=u, z=z)


# Aggregation

@dataclass(frozen=True)
class AggregationCheck:
    slope_original: float
    slope_aggregated: Optional[float]
    delta: Optional[float]
    passed: bool
    applicable: bool = True
    slope_reference: Optional[float] = None

    def to_dict(self) -> dict:
        return {'slope_original': self.slope_original, 'slope_aggregated': self.slope_aggregated,
                'slope_reference': self.slope_reference, 'delta': self.delta,
                'pass': self.passed, 'applicable': self.applicable}


def _aggregated_tail_slope(s: Sample, seed: int, settings: DiagnosticSettings) -> float:
    return tail_linearity(survival_points(pairwise_aggregate(s, seed)), settings.tail_fraction,
                          0.0, settings.min_tail_points).slope


def reference_aggregated_slope(alpha: float, n: int, seed: int = DEFAULT_SEED,
                               settings: Optional[DiagnosticSettings] = None) -> float:
    """
    Mean aggregated Zipf tail slope of ParetoI(1, alpha) samples of size n.

    Pair sums of an exact power law reach their limiting slope slowly, so the
    top of their Zipf plot is steeper than -alpha at any finite n. Draw r uses
    seed + r + 1 for both sampling and pairing.
    """
    settings = _settings_or_default(settings)
    if settings.aggregation_reference_draws < 1:
        raise DomainError("aggregation_reference_draws must be at least 1 for a reference slope")
    model = ParetoI(1.0, alpha)
    slopes = []
    for r in range(settings.aggregation_reference_draws):
        draw_seed = trial_seed(seed, r + 1)
        slopes.append(_aggregated_tail_slope(sample(model, n, draw_seed), draw_seed, settings))
    return float(np.mean(slopes))


def aggregation_stability(s: Sample, seed: int = DEFAULT_SEED,
                          settings: Optional[DiagnosticSettings] = None) -> AggregationCheck:
    """
    Compare the Zipf tail slope before and after summing random pairs.

    Power-law tails keep their slope under aggregation up to a finite-sample
    steepening. The aggregated slope is compared with the one Pareto draws of
    the fitted index show after the same aggregation; with
    `aggregation_reference_draws = 0` it is compared with the original slope
    directly. When the original tail is not linear the check is reported as
    not applicable.
    """
    settings = _settings_or_default(settings)
    if s.n < settings.aggregation_min_n:
        raise DataError(f"insufficient data: aggregation check needs "
                        f"{settings.aggregation_min_n} observations, got {s.n}")

    original = tail_linearity(survival_points(s), settings.tail_fraction,
                              settings.min_r2, settings.min_tail_points)
    if not original.passed:
        logger.info("Zipf tail of the original sample is not linear, aggregation check skipped")
        return AggregationCheck(slope_original=original.slope, slope_aggregated=None,
                                delta=None, passed=False, applicable=False)

    aggregated = _aggregated_tail_slope(s, seed, settings)
    if settings.aggregation_reference_draws > 0:
        reference = reference_aggregated_slope(-original.slope, s.n, seed, settings)
    else:
        reference = original.slope
    delta = abs(aggregated - reference)
    logger.debug(f"Aggregated slope {aggregated:.4f} against reference {reference:.4f}")
    return AggregationCheck(slope_original=original.slope, slope_aggregated=aggregated,
                            delta=delta, passed=delta <= settings.aggregation_max_delta,
                            slope_reference=reference)


def spacings_series(s: Sample, tail_fraction: Optional[float] = None) -> SpacingRatios:
    """Geometric spacings, restricted to the largest `tail_fraction` of the sample if given"""
    if tail_fraction is not None:
        if not 0 < tail_fraction <= 1:
            raise DomainError(f"tail_fraction must lie in (0, 1], got {tail_fraction}")
        k = max(3, int(math.ceil(tail_fraction * s.n)))
        s = Sample(s.values[-k:]) if k < s.n else s
    return spacing_ratios(s)


# Verdict

class VerdictLabel(str, Enum):
    PARETIAN_CONSISTENT = "ParetianConsistent"
    LOGNORMAL_LIKE = "LognormalLike"
    THIN_TAILED = "ThinTailed"
    INCONCLUSIVE = "Inconclusive"


_THIN_ZONES = (ZoneLabel.EXPONENTIAL_THIN, ZoneLabel.SUB_BERNOULLI, ZoneLabel.SYMMETRIC)
_LOGNORMAL_ZONES = (ZoneLabel.LOGNORMAL, ZoneLabel.GRAY)
_PARETIAN_ZONES = (ZoneLabel.PARETIAN, ZoneLabel.ABOVE_PARETO)
# lognormal Zenga curves read as flat or as a shallow U
_LOGNORMAL_SHAPES = (ZengaShape.CONSTANT, ZengaShape.CONVEX_MIN)


@dataclass(frozen=True)
class Verdict:
    n: int
    seed: int
    zipf_tail_linear: TailFit
    me_trend: MeTrend
    moment_point: MomentPoint
    zone: Zone
    zenga: ZengaShapeFit
    label: VerdictLabel
    aggregation: Optional[AggregationCheck] = None
    settings: DiagnosticSettings = field(default_factory=DiagnosticSettings)

    @property
    def zenga_shape(self) -> ZengaShape:
        return self.zenga.shape

    def to_dict(self) -> dict:
        return {
            'schema': VERDICT_SCHEMA,
            'n': self.n,
            'seed': self.seed,
            'zipf_tail_linear': self.zipf_tail_linear.to_dict(),
            'me_trend': self.me_trend.to_dict(),
            'moment_point': self.moment_point.to_dict(),
            'zone': self.zone.to_dict(),
            'zenga_shape': self.zenga.shape.value,
            'zenga': self.zenga.to_dict(),
            'aggregation': self.aggregation.to_dict() if self.aggregation else None,
            'label': self.label.value,
            'config': self.settings.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _verdict_label(tail: TailFit, trend: MeTrend, zone: Zone, shape: ZengaShape,
                   settings: DiagnosticSettings) -> VerdictLabel:
    if tail.passed and trend.passed:
        if zone.label is ZoneLabel.PARETIAN and shape is ZengaShape.INCREASING:
            return VerdictLabel.PARETIAN_CONSISTENT
        return VerdictLabel.INCONCLUSIVE

    if zone.label in _THIN_ZONES or zone.thin_tail_precheck:
        return VerdictLabel.THIN_TAILED
    # flat or falling mean excess: exponential or thinner
    if trend.slope <= settings.me_min_slope and zone.label not in _PARETIAN_ZONES:
        return VerdictLabel.THIN_TAILED
    if zone.label in _LOGNORMAL_ZONES and shape in _LOGNORMAL_SHAPES:
        return VerdictLabel.LOGNORMAL_LIKE
    return VerdictLabel.INCONCLUSIVE


def verdict(s: Sample, settings: Optional[DiagnosticSettings] = None,
            seed: int = DEFAULT_SEED) -> Verdict:
    """
    Run the four plot tests on `s` and combine them into one label.

    ParetianConsistent requires a linear Zipf tail, an upward mean excess, a
    Paretian moment-ratio zone and an increasing Zenga curve.
    """
    settings = _settings_or_default(settings)
    if s.n < settings.min_verdict_n:
        raise DataError(f"insufficient data: a verdict needs at least "
                        f"{settings.min_verdict_n} observations, got {s.n}; "
                        f"inspect the plots individually instead")

    tail = tail_linearity(survival_points(s), settings.tail_fraction,
                          settings.min_r2, settings.min_tail_points)
    trend = me_trend(meplot_series(s, settings.me_cut), settings.me_min_slope)
    point = moment_stats(s)
    zone = classify_moment_point(point, settings.formula_mode, settings)
    shape = zenga_shape(empirical_zenga(s), settings)

    aggregation = None
    if s.n >= settings.aggregation_min_n:
        try:
            aggregation = aggregation_stability(s, seed, settings)
        except DataError as exc:
            logger.info(f"Aggregation check unavailable: {exc}")

    label = _verdict_label(tail, trend, zone, shape.shape, settings)
    logger.info(f"Verdict for n={s.n}: {label.value} (zone {zone.label.value}, "
                f"zenga {shape.shape.value})")
    return Verdict(n=s.n, seed=seed, zipf_tail_linear=tail, me_trend=trend,
                   moment_point=point, zone=zone, zenga=shape, label=label,
                   aggregation=aggregation, settings=settings.copy())
