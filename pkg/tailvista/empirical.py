"""Sample-side computations behind the four diagnostic plots"""
import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

import numpy as np
from scipy import stats

from .errors import DataError, DomainError
from .series import AxisScale, MomentPoint, PlotSeries
from .utils import make_rng

logger = logging.getLogger("tailvista.empirical")


@dataclass(frozen=True, eq=False)
class Sample:
    """Ascending-sorted, strictly positive observations"""
    values: np.ndarray
    dropped_nonfinite: int = 0
    dropped_nonpositive: int = 0

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).ravel()
        if values.size == 0:
            raise DataError("no usable observations")
        if not np.all(np.isfinite(values)) or np.any(values <= 0):
            raise DataError("Sample values must be finite and strictly positive")
        if np.any(np.diff(values) < 0):
            values = np.sort(values)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.n

    def scaled(self, factor: float) -> 'Sample':
        if not factor > 0:
            raise DomainError(f"Scale factor must be positive, got {factor}")
        return Sample(self.values * factor)

    def report(self) -> str:
        parts = []
        if self.dropped_nonfinite:
            parts.append(f"{self.dropped_nonfinite} non-finite dropped")
        if self.dropped_nonpositive:
            parts.append(f"{self.dropped_nonpositive} non-positive dropped")
        return ", ".join(parts)


@dataclass(frozen=True)
class LogBin:
    lower: float
    upper: float
    x_bar: float
    y_bar: float
    count: int


@dataclass(frozen=True)
class BinnedSeries:
    """Logarithmically binned Zipf points"""
    bins: List[LogBin]
    base: float

    @property
    def total_count(self) -> int:
        return sum(b.count for b in self.bins)

    def to_plot_series(self, label: str = "Zipf (log-binned)") -> PlotSeries:
        return PlotSeries(x=[b.x_bar for b in self.bins], y=[b.y_bar for b in self.bins],
                          x_scale=AxisScale.LOG, y_scale=AxisScale.LOG, label=label)


@dataclass(frozen=True, eq=False)
class ZengaSeries:
    """Empirical Zenga points (u_j, Z(u_j)) over the distinct sample values"""
    u: np.ndarray
    z: np.ndarray
    endpoint_rescaled: bool = False

    def __len__(self) -> int:
        return len(self.u)

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.u.tolist(), self.z.tolist()))

    def to_plot_series(self, label: str = "Zenga") -> PlotSeries:
        return PlotSeries(x=self.u, y=self.z, label=label)


@dataclass(frozen=True)
class SpacingRatios:
    series: PlotSeries
    rank_correlation: float


@dataclass(frozen=True)
class BootstrapCloud:
    points: List[MomentPoint] = field(default_factory=list)
    skipped: int = 0


def make_sample(raw: Iterable[float]) -> Sample:
    """Validate raw observations: drop non-finite and non-positive values, sort"""
    values = np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw,
                        dtype=np.float64).ravel()
    finite = np.isfinite(values)
    dropped_nonfinite = int(np.count_nonzero(~finite))
    values = values[finite]
    positive = values > 0
    dropped_nonpositive = int(np.count_nonzero(~positive))
    values = values[positive]

    if dropped_nonfinite:
        logger.warning(f"{dropped_nonfinite} non-finite observations dropped")
    if dropped_nonpositive:
        logger.warning(f"{dropped_nonpositive} non-positive observations dropped")
    if values.size == 0:
        raise DataError("no usable observations")

    return Sample(np.sort(values), dropped_nonfinite=dropped_nonfinite,
                  dropped_nonpositive=dropped_nonpositive)


def _plotting_positions(n: int) -> np.ndarray:
    return 1.0 - (np.arange(1, n + 1) - 0.5) / n


def survival_points(s: Sample) -> PlotSeries:
    """Empirical survival 1 - (i - 0.5)/n at each order statistic, for log-log axes"""
    if s.n < 2:
        raise DataError(f"Survival points need at least 2 observations, got {s.n}")
    return PlotSeries(x=s.values, y=_plotting_positions(s.n),
                      x_scale=AxisScale.LOG, y_scale=AxisScale.LOG, label="Zipf")


def log_bin(s: Sample, base: float = 2.0) -> BinnedSeries:
    """
    Bin the Zipf points on a geometric grid anchored at the sample minimum.

    Bin k covers (min*base^k, min*base^(k+1)], the first bin also holds the
    minimum itself. Each bin reports the geometric mean of its edges and the
    arithmetic mean of the survival ordinates falling inside; empty bins are
    omitted.
    """
    if not (math.isfinite(base) and base > 1):
        raise DomainError(f"Bin base must exceed 1, got {base}")

    x = s.values
    y = _plotting_positions(s.n)
    lowest = x[0]
    n_bins = max(1, math.ceil(math.log(x[-1] / lowest) / math.log(base)))
    edges = lowest * base ** np.arange(n_bins + 1, dtype=np.float64)
    while edges[-1] < x[-1]:
        edges = np.append(edges, edges[-1] * base)

    index = np.maximum(np.searchsorted(edges, x, side='left'), 1) - 1
    bins = []
    for k in range(len(edges) - 1):
        members = index == k
        count = int(np.count_nonzero(members))
        if count == 0:
            continue
        lower, upper = float(edges[k]), float(edges[k + 1])
        bins.append(LogBin(lower=lower, upper=upper, x_bar=math.sqrt(lower * upper),
                           y_bar=float(np.mean(y[members])), count=count))
    return BinnedSeries(bins=bins, base=float(base))


def mean_excess_points(s: Sample, cut: int = 5) -> PlotSeries:
    """
    Empirical mean excess e_n(u) at every order statistic used as threshold.

    Only strictly larger observations count as exceedances. Thresholds without
    exceedances are dropped, then the largest `cut` remaining thresholds.
    """
    if cut < 0:
        raise DomainError(f"cut must be non-negative, got {cut}")
    if s.n <= cut + 1:
        raise DataError(
            f"Mean excess plot needs more than {cut + 1} observations, got {s.n}")

    x = s.values
    first_above = np.searchsorted(x, x, side='right')
    exceedances = s.n - first_above
    suffix = np.concatenate([np.cumsum(x[::-1])[::-1], [0.0]])
    keep = exceedances > 0
    thresholds = x[keep]
    excess = suffix[first_above[keep]] / exceedances[keep] - thresholds

    if cut:
        thresholds = thresholds[:-cut]
        excess = excess[:-cut]
    if thresholds.size == 0:
        raise DataError("insufficient data: no thresholds left after the cut")

    return PlotSeries(x=thresholds, y=excess, label="Mean excess")


def _moment_point(values: np.ndarray) -> Optional[MomentPoint]:
    mean = float(np.mean(values))
    sd = float(np.std(values, ddof=1))
    if not sd > 0:
        return None
    skewness = float(np.mean(((values - mean) / sd) ** 3))
    if mean <= 0:
        return MomentPoint(cv=sd / mean if mean else math.inf, skewness=skewness,
                           nonpositive_mean=True)
    return MomentPoint(cv=sd / mean, skewness=skewness)


def moment_stats(s: Sample) -> MomentPoint:
    """CV with the (n-1) standard deviation, skewness as the 1/n average of cubed z-scores"""
    if s.n < 3:
        raise DataError(f"Moment statistics need at least 3 observations, got {s.n}")
    point = _moment_point(s.values)
    if point is None:
        raise DataError("degenerate sample: zero variance")
    if point.nonpositive_mean:
        logger.warning("Non-positive sample mean; CV is not usable for classification")
    return point


def _distinct_cumulatives(s: Sample):
    distinct, counts = np.unique(s.values, return_counts=True)
    cum_counts = np.cumsum(counts)
    cum_totals = np.cumsum(distinct * counts)
    return distinct, cum_counts, cum_totals


def empirical_lorenz(s: Sample) -> PlotSeries:
    """Lorenz points (N_j/N, T_j/T) over the distinct sorted values"""
    if s.n < 2:
        raise DataError(f"Lorenz curve needs at least 2 observations, got {s.n}")
    _, cum_counts, cum_totals = _distinct_cumulatives(s)
    u = cum_counts / s.n
    lorenz = cum_totals / cum_totals[-1]
    lorenz[-1] = 1.0
    return PlotSeries(x=u, y=lorenz, label="Lorenz")


def empirical_zenga(s: Sample, rescale_endpoints: bool = False) -> ZengaSeries:
    """
    Empirical Zenga curve 1 - Q^-(u_j) / Q^+(u_j).

    Q^- is the mean of the values up to x_j, Q^+ the mean of the values above
    it (the maximum itself at the last point). With `rescale_endpoints` the
    first point copies the second and the last copies the one before.
    """
    if s.n < 3:
        raise DataError(f"Zenga curve needs at least 3 observations, got {s.n}")
    distinct, cum_counts, cum_totals = _distinct_cumulatives(s)
    total_count, total = s.n, cum_totals[-1]

    lower_mean = cum_totals / cum_counts
    upper_mean = np.empty_like(lower_mean)
    upper_mean[:-1] = (total - cum_totals[:-1]) / (total_count - cum_counts[:-1])
    upper_mean[-1] = distinct[-1]
    z = np.clip(1.0 - lower_mean / upper_mean, 0.0, 1.0)

    if rescale_endpoints and z.size >= 3:
        z[0] = z[1]
        z[-1] = z[-2]
    return ZengaSeries(u=cum_counts / total_count, z=z,
                       endpoint_rescaled=bool(rescale_endpoints and z.size >= 3))


def tail_truncate(s: Sample, threshold: float) -> Sample:
    """Observations strictly above `threshold`"""
    kept = s.values[s.values > threshold]
    if kept.size < 2:
        raise DataError(
            f"insufficient tail: {kept.size} observations exceed {threshold:g}, need 2")
    logger.info(f"Kept {kept.size} of {s.n} observations above {threshold:g}")
    return Sample(kept)


def pairwise_aggregate(s: Sample, seed: int, shuffle: bool = True) -> Sample:
    """
    Sums of disjoint consecutive pairs X1+X2, X3+X4, ...

    The values are permuted with `seed` first; `shuffle=False` pairs them in
    sorted order. An odd leftover is dropped.
    """
    if s.n < 4:
        raise DataError(f"Aggregation needs at least 4 observations, got {s.n}")
    values = make_rng(seed).permutation(s.values) if shuffle else s.values
    half = s.n // 2
    sums = values[:2 * half:2] + values[1:2 * half:2]
    return Sample(np.sort(sums))


def spacing_ratios(s: Sample) -> SpacingRatios:
    """
    Geometric spacings X_{i+1:n}/X_{i:n} against X_{i:n}.

    The rank correlation is taken between X_{i:n} and the normalized log
    spacings (n - i) log(X_{i+1:n}/X_{i:n}), which are independent of X_{i:n}
    for a Pareto sample; the raw ratios are not identically distributed in i.
    Constant ratios give 0.
    """
    if s.n < 3:
        raise DataError(f"Spacing ratios need at least 3 observations, got {s.n}")
    x = s.values[:-1]
    ratios = s.values[1:] / x
    if np.ptp(ratios) == 0 or np.ptp(x) == 0:
        correlation = 0.0
    else:
        normalized = np.arange(s.n - 1, 0, -1) * np.log(ratios)
        correlation = float(stats.spearmanr(x, normalized).statistic)
        if not math.isfinite(correlation):
            correlation = 0.0
    series = PlotSeries(x=x, y=ratios, x_scale=AxisScale.LOG, label="Geometric spacings")
    return SpacingRatios(series=series, rank_correlation=correlation)


def bootstrap_moments(s: Sample, B: int, seed: int) -> BootstrapCloud:
    """Moment points of B resamples drawn with replacement; zero-variance resamples are skipped"""
    if B < 1:
        raise DomainError(f"Bootstrap needs B >= 1, got {B}")
    if s.n < 3:
        raise DataError(f"Bootstrap needs at least 3 observations, got {s.n}")

    rng = make_rng(seed)
    points, skipped = [], 0
    for _ in range(B):
        resample = s.values[rng.integers(0, s.n, size=s.n)]
        point = _moment_point(resample)
        if point is None:
            skipped += 1
            continue
        points.append(point)

    if skipped:
        logger.info(f"Skipped {skipped} of {B} degenerate bootstrap resamples")
    return BootstrapCloud(points=points, skipped=skipped)
