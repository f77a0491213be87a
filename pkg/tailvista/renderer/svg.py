"""
Standalone SVG output for figure specifications.

Data coordinates are mapped to pixels by an affine map of the scaled value
(log10 first on log axes). Every data point becomes one `circle.marker` that
carries its data coordinates in `data-x`/`data-y`; every reference curve
becomes one `path.curve`.
"""
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from yattag import Doc

from ..errors import RenderError
from ..series import AxisScale, PlotSeries
from .base import Renderer
from .figures import FigureSpec
from .render_settings import FigureRenderSettings

logger = logging.getLogger("tailvista.renderer")

SVG_NAMESPACE = "http://www.w3.org/2000/svg"
CLIP_ID = "plot-area"
XML_DECLARATION = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _px(value: float) -> str:
    return f"{value:.3f}"


def _data(value: float) -> str:
    return f"{value:.10g}"


class Axis:
    """Affine map from scaled data coordinates to one pixel axis"""

    def __init__(self, scale: AxisScale, low: float, high: float,
                 pixel_start: float, pixel_end: float):
        self.scale = scale
        self.low, self.high = self.transform(low), self.transform(high)
        if not self.high > self.low:
            raise RenderError(f"Empty axis range [{low}, {high}]")
        self.pixel_start, self.pixel_end = pixel_start, pixel_end

    def transform(self, value):
        return np.log10(value) if self.scale is AxisScale.LOG else np.asarray(value, dtype=np.float64)

    def to_pixel(self, value):
        fraction = (self.transform(value) - self.low) / (self.high - self.low)
        return self.pixel_start + fraction * (self.pixel_end - self.pixel_start)

    def ticks(self, count: int) -> List[float]:
        if self.scale is AxisScale.LOG:
            decades = np.arange(math.ceil(self.low - 1e-9), math.floor(self.high + 1e-9) + 1)
            if decades.size >= 2:
                step = max(1, int(math.ceil(decades.size / max(count, 2))))
                return [float(10.0 ** k) for k in decades[::step]]
            return [float(10.0 ** self.low), float(10.0 ** self.high)]
        return np.linspace(self.low, self.high, count).tolist()


def _data_range(values: Sequence[np.ndarray], scale: AxisScale) -> Tuple[float, float]:
    stacked = np.concatenate([np.asarray(v, dtype=np.float64) for v in values]) if values else np.array([])
    stacked = stacked[np.isfinite(stacked)]
    if scale is AxisScale.LOG:
        stacked = stacked[stacked > 0]
    if stacked.size == 0:
        return (1.0, 10.0) if scale is AxisScale.LOG else (0.0, 1.0)

    low, high = float(stacked.min()), float(stacked.max())
    if scale is AxisScale.LOG:
        log_low, log_high = math.log10(low), math.log10(high)
        pad = 0.05 * (log_high - log_low) or 0.5
        return 10.0 ** (log_low - pad), 10.0 ** (log_high + pad)
    pad = 0.05 * (high - low) or 0.5
    return low - pad, high + pad


class SvgRenderer(Renderer):
    def get_default_settings(self) -> FigureRenderSettings:
        return FigureRenderSettings()

    def validate_settings(self, settings: FigureRenderSettings) -> bool:
        return (isinstance(settings, FigureRenderSettings)
                and settings.width > 0 and settings.height > 0
                and 0 <= settings.margin < 0.5)

    def render(self, spec: FigureSpec, settings: Optional[FigureRenderSettings] = None) -> str:
        settings = settings if settings is not None else self.get_default_settings()
        if not self.validate_settings(settings):
            raise RenderError("Invalid settings for figure rendering")
        spec.validate()

        left = settings.margin * settings.width
        top = settings.margin * settings.height
        right = settings.width - left
        bottom = settings.height - top
        x_axis = Axis(spec.x_scale, *self._range(spec, 'x'), left, right)
        y_axis = Axis(spec.y_scale, *self._range(spec, 'y'), bottom, top)

        doc, tag, text = Doc().tagtext()
        with tag('svg', xmlns=SVG_NAMESPACE, width=str(settings.width), height=str(settings.height),
                 viewBox=f"0 0 {settings.width} {settings.height}"):
            if spec.title:
                with tag('title'):
                    text(spec.title)
            with tag('defs'):
                with tag('clipPath', id=CLIP_ID):
                    doc.stag('rect', x=_px(left), y=_px(top), width=_px(right - left),
                             height=_px(bottom - top))
            doc.stag('rect', klass='background', x='0', y='0', width=str(settings.width),
                     height=str(settings.height), fill=settings.background)

            with tag('g', ('clip-path', f"url(#{CLIP_ID})"), klass='plot'):
                if spec.shaded_region is not None:
                    self._region(doc, spec.shaded_region, x_axis, y_axis, settings)
                for index, curve in enumerate(spec.reference_curves):
                    color = settings.curve_colors[index % len(settings.curve_colors)]
                    self._curve(doc, curve, x_axis, y_axis, color, settings)
                for index, series in enumerate(spec.series):
                    color = settings.series_colors[index % len(settings.series_colors)]
                    self._markers(doc, tag, series, x_axis, y_axis, color, settings)

            self._axes(doc, tag, text, spec, x_axis, y_axis, settings)
            for annotation in spec.annotations:
                x, y = x_axis.to_pixel(annotation.x), y_axis.to_pixel(annotation.y)
                with tag('text', ('font-size', str(settings.font_size)), klass='annotation',
                         x=_px(x), y=_px(y),
                         transform=f"rotate({-annotation.rotation:g} {_px(x)} {_px(y)})"):
                    text(annotation.text)
            if settings.show_legend:
                self._legend(doc, tag, text, spec, settings, right)

        logger.debug(f"Rendered figure {spec.title!r} with {sum(len(s) for s in spec.series)} markers")
        return XML_DECLARATION + doc.getvalue() + "\n"

    def _range(self, spec: FigureSpec, axis: str) -> Tuple[float, float]:
        fixed = spec.x_range if axis == 'x' else spec.y_range
        if fixed is not None:
            return fixed
        scale = spec.x_scale if axis == 'x' else spec.y_scale
        values = [getattr(s, axis) for s in spec.series]
        values += [getattr(c, axis) for c in spec.reference_curves]
        return _data_range(values, scale)

    def _region(self, doc, region: PlotSeries, x_axis: Axis, y_axis: Axis,
                settings: FigureRenderSettings) -> None:
        xs, ys = x_axis.to_pixel(region.x), y_axis.to_pixel(region.y)
        points = " ".join(f"{_px(x)},{_px(y)}" for x, y in zip(xs, ys))
        doc.stag('polygon', ('data-label', region.label), ('fill-opacity', f"{settings.region_opacity:g}"),
                 klass='region', points=points, fill=settings.region_fill, stroke='none')

    def _curve(self, doc, curve: PlotSeries, x_axis: Axis, y_axis: Axis, color: str,
               settings: FigureRenderSettings) -> None:
        finite = np.isfinite(curve.x) & np.isfinite(curve.y)
        xs, ys = x_axis.to_pixel(curve.x[finite]), y_axis.to_pixel(curve.y[finite])
        commands = [f"{'M' if i == 0 else 'L'}{_px(x)},{_px(y)}" for i, (x, y) in enumerate(zip(xs, ys))]
        doc.stag('path', ('data-label', curve.label), ('stroke-width', f"{settings.curve_width:g}"),
                 klass='curve', d=" ".join(commands), fill='none', stroke=color)

    def _markers(self, doc, tag, series: PlotSeries, x_axis: Axis, y_axis: Axis, color: str,
                 settings: FigureRenderSettings) -> None:
        xs, ys = x_axis.to_pixel(series.x), y_axis.to_pixel(series.y)
        with tag('g', ('data-label', series.label), klass='series', fill=color):
            for x, y, px, py in zip(series.x, series.y, xs, ys):
                doc.stag('circle', ('data-x', _data(x)), ('data-y', _data(y)), klass='marker',
                         cx=_px(px), cy=_px(py), r=f"{settings.marker_radius:g}")

    def _axes(self, doc, tag, text, spec: FigureSpec, x_axis: Axis, y_axis: Axis,
              settings: FigureRenderSettings) -> None:
        left, right = x_axis.pixel_start, x_axis.pixel_end
        bottom, top = y_axis.pixel_start, y_axis.pixel_end
        with tag('g', ('stroke-width', f"{settings.axis_width:g}"), klass='axes', stroke='#000000'):
            doc.stag('line', x1=_px(left), y1=_px(bottom), x2=_px(right), y2=_px(bottom))
            doc.stag('line', x1=_px(left), y1=_px(bottom), x2=_px(left), y2=_px(top))
            for value in x_axis.ticks(settings.n_ticks):
                x = float(x_axis.to_pixel(value))
                doc.stag('line', klass='tick', x1=_px(x), y1=_px(bottom), x2=_px(x), y2=_px(bottom + 5))
            for value in y_axis.ticks(settings.n_ticks):
                y = float(y_axis.to_pixel(value))
                doc.stag('line', klass='tick', x1=_px(left - 5), y1=_px(y), x2=_px(left), y2=_px(y))

        font = ('font-size', str(settings.font_size))
        for value in x_axis.ticks(settings.n_ticks):
            with tag('text', font, ('text-anchor', 'middle'), klass='tick-label',
                     x=_px(float(x_axis.to_pixel(value))), y=_px(bottom + 5 + settings.font_size)):
                text(f"{value:.4g}")
        for value in y_axis.ticks(settings.n_ticks):
            with tag('text', font, ('text-anchor', 'end'), klass='tick-label', x=_px(left - 8),
                     y=_px(float(y_axis.to_pixel(value)) + settings.font_size / 3)):
                text(f"{value:.4g}")

        middle_x, middle_y = (left + right) / 2, (top + bottom) / 2
        with tag('text', font, ('text-anchor', 'middle'), klass='axis-label', x=_px(middle_x),
                 y=_px(bottom + 2.5 * settings.font_size + 5)):
            text(spec.x_label)
        label_x = left - 3.5 * settings.font_size
        with tag('text', font, ('text-anchor', 'middle'), klass='axis-label', x=_px(label_x),
                 y=_px(middle_y), transform=f"rotate(-90 {_px(label_x)} {_px(middle_y)})"):
            text(spec.y_label)
        if spec.title:
            with tag('text', ('font-size', str(settings.font_size + 2)), ('text-anchor', 'middle'),
                     klass='figure-title', x=_px(middle_x), y=_px(top / 2 + settings.font_size / 2)):
                text(spec.title)

    def _legend(self, doc, tag, text, spec: FigureSpec, settings: FigureRenderSettings,
                right: float) -> None:
        entries = [(s.label, settings.series_colors[i % len(settings.series_colors)])
                   for i, s in enumerate(spec.series) if s.label]
        entries += [(c.label, settings.curve_colors[i % len(settings.curve_colors)])
                    for i, c in enumerate(spec.reference_curves) if c.label]
        if not entries:
            return
        with tag('g', klass='legend'):
            for row, (label, color) in enumerate(entries):
                y = settings.margin * settings.height + 10 + row * (settings.font_size + 4)
                doc.stag('rect', klass='legend-swatch', x=_px(right - 160), y=_px(y - settings.font_size / 2),
                         width='10', height='10', fill=color)
                with tag('text', ('font-size', str(settings.font_size - 2)), x=_px(right - 145),
                         y=_px(y + 4)):
                    text(label)


def render_figure(spec: FigureSpec, settings: Optional[FigureRenderSettings] = None) -> str:
    """Render `spec` as a standalone SVG document"""
    return SvgRenderer().render(spec, settings)
