"""Figure specifications for the diagnostic plots"""
import math
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Tuple

import numpy as np

from ..diagnostics import (MeTrend, TailFit, boundary_curve_series, boundary_curves,
                           meplot_series, moment_ratio_series, spacings_series,
                           theoretical_zenga_series, zipf_series)
from ..distributions import DistributionModel
from ..empirical import BootstrapCloud, Sample, empirical_zenga
from ..errors import RenderError
from ..series import AxisScale, MomentPoint, PlotSeries

MOMENT_RATIO_X_RANGE = (0.0, 20.0)
MOMENT_RATIO_Y_RANGE = (-1.0, 40.0)


@dataclass(frozen=True)
class Annotation:
    x: float
    y: float
    text: str
    rotation: float = 0.0


@dataclass
class FigureSpec:
    series: List[PlotSeries]
    x_scale: AxisScale = AxisScale.LINEAR
    y_scale: AxisScale = AxisScale.LINEAR
    reference_curves: List[PlotSeries] = field(default_factory=list)
    shaded_region: Optional[PlotSeries] = None
    annotations: List[Annotation] = field(default_factory=list)
    title: str = ""
    x_label: str = ""
    y_label: str = ""
    x_range: Optional[Tuple[float, float]] = None
    y_range: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        self.x_scale = AxisScale(self.x_scale)
        self.y_scale = AxisScale(self.y_scale)

    def validate(self) -> None:
        """Raise RenderError for empty series or non-positive values on a log axis"""
        for series in self.series:
            if len(series) == 0:
                raise RenderError(f"Series {series.label!r} has no points")
        elements = list(self.series) + list(self.reference_curves)
        if self.shaded_region is not None:
            elements.append(self.shaded_region)
        for axis, scale in (('x', self.x_scale), ('y', self.y_scale)):
            if scale is not AxisScale.LOG:
                continue
            for element in elements:
                if np.any(getattr(element, axis) <= 0):
                    raise RenderError(
                        f"Series {element.label!r} has non-positive {axis} values on a log axis")
            for annotation in self.annotations:
                if getattr(annotation, axis) <= 0:
                    raise RenderError(f"Annotation {annotation.text!r} sits at a non-positive {axis}")
            fixed = self.x_range if axis == 'x' else self.y_range
            if fixed is not None and min(fixed) <= 0:
                raise RenderError(f"Log {axis} axis range must be positive, got {fixed}")


def zipf_figure(s: Sample, bin_base: Optional[float] = None, fit: Optional[TailFit] = None,
                title: str = "Zipf plot") -> FigureSpec:
    series = [zipf_series(s)]
    if bin_base is not None:
        series.append(zipf_series(s, bin_base))

    curves = []
    if fit is not None:
        tail_x = np.geomspace(s.values[-min(fit.n_points, s.n)], s.values[-1], 50)
        curves.append(PlotSeries(x=tail_x, y=np.exp(fit.intercept) * tail_x ** fit.slope,
                                 label=f"Tail fit, slope {fit.slope:.3g}"))
    return FigureSpec(series=series, x_scale=AxisScale.LOG, y_scale=AxisScale.LOG,
                      reference_curves=curves, title=title, x_label="x on log scale",
                      y_label="Survival function on log scale")


def meplot_figure(s: Sample, cut: int = 5, trend: Optional[MeTrend] = None,
                  title: str = "Mean excess plot") -> FigureSpec:
    series = meplot_series(s, cut)
    curves = []
    if trend is not None:
        u = np.array([series.x[0], series.x[-1]])
        curves.append(PlotSeries(x=u, y=trend.intercept + trend.slope * u,
                                 label=f"Trend, slope {trend.slope:.3g}"))
    return FigureSpec(series=[series], reference_curves=curves, title=title,
                      x_label="Threshold u", y_label="Mean Excess e(u)")


def paretian_region(cv_max: float, skew_max: float, formula_mode: str = "corrected",
                    n_points: int = 200) -> PlotSeries:
    """Polygon between the inverted gamma curve and the Pareto curve, cut at skew_max"""
    # inverted gamma reaches skew_max here
    cv_top = (-4.0 + math.sqrt(16.0 + 4.0 * skew_max ** 2)) / (2.0 * skew_max)
    cv_top = min(cv_top, cv_max)
    grid = np.linspace(cv_top / n_points, cv_top, n_points)

    upper, lower = [], []
    for cv in grid:
        curves = boundary_curves(float(cv), formula_mode)
        pareto = curves.pareto if curves.pareto is not None else math.inf
        upper.append(min(pareto, skew_max))
        lower.append(min(curves.inv_gamma, skew_max))
    x = np.concatenate([grid, grid[::-1]])
    y = np.concatenate([upper, lower[::-1]])
    return PlotSeries(x=x, y=y, label="Paretian region")


def moment_ratio_figure(point: MomentPoint, formula_mode: str = "corrected",
                        cloud: Optional[BootstrapCloud] = None,
                        models: Iterable[DistributionModel] = (),
                        title: str = "Moment-ratio plot") -> FigureSpec:
    """
    Sample point over the five boundary curves and the shaded Paretian region.

    The default window is CV in [0, 20] and skewness in [-1, 40], widened when
    the sample point falls outside.
    """
    x_low, x_high = MOMENT_RATIO_X_RANGE
    y_low, y_high = MOMENT_RATIO_Y_RANGE
    if point.cv > x_high:
        x_high = 1.1 * point.cv
    if point.cv < x_low:
        x_low = 1.1 * point.cv
    if point.skewness > y_high:
        y_high = 1.1 * point.skewness
    if point.skewness < y_low:
        y_low = point.skewness - 0.1 * abs(point.skewness) - 1.0

    curves = list(boundary_curve_series(x_high, formula_mode=formula_mode).values())
    series = [PlotSeries(x=[point.cv], y=[point.skewness], label="Sample")]
    if cloud is not None and cloud.points:
        series.append(PlotSeries(x=[p.cv for p in cloud.points],
                                 y=[p.skewness for p in cloud.points], label="Bootstrap"))
    models = list(models)
    if models:
        theoretical = moment_ratio_series(models)
        if len(theoretical):
            series.append(theoretical)

    annotations = [
        Annotation(0.25, 30.0, "Paretian", rotation=80.0),
        Annotation(4.0, 33.0, "Gray", rotation=0.0),
        Annotation(7.0, 20.0, "Lognormal", rotation=20.0),
        Annotation(10.0, 5.0, "Exponential / thin", rotation=0.0),
    ]
    return FigureSpec(series=series, reference_curves=curves,
                      shaded_region=paretian_region(x_high, y_high, formula_mode),
                      annotations=annotations, title=title, x_label="CV", y_label="Skewness",
                      x_range=(x_low, x_high), y_range=(y_low, y_high))


def zenga_figure(s: Sample, rescale_endpoints: bool = True,
                 reference: Optional[DistributionModel] = None, formula_mode: str = "corrected",
                 title: str = "Zenga plot") -> FigureSpec:
    zenga = empirical_zenga(s, rescale_endpoints=rescale_endpoints)
    curves = []
    if reference is not None:
        theoretical = theoretical_zenga_series(reference, formula_mode=formula_mode)
        curves.append(theoretical.to_plot_series(label=reference.describe()))
    return FigureSpec(series=[zenga.to_plot_series()], reference_curves=curves, title=title,
                      x_label="u", y_label="Z(u)", x_range=(0.0, 1.0), y_range=(0.0, 1.0))


def spacings_figure(s: Sample, tail_fraction: Optional[float] = None,
                    title: str = "Geometric spacings") -> FigureSpec:
    spacings = spacings_series(s, tail_fraction)
    annotation = Annotation(float(spacings.series.x[0]), float(np.max(spacings.series.y)),
                            f"rank correlation {spacings.rank_correlation:.3f}")
    return FigureSpec(series=[spacings.series], x_scale=AxisScale.LOG, title=title,
                      annotations=[annotation], x_label="X(i) on log scale",
                      y_label="X(i+1) / X(i)")
