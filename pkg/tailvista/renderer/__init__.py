from .base import Renderer
from .figures import (Annotation, FigureSpec, meplot_figure, moment_ratio_figure,
                      spacings_figure, zenga_figure, zipf_figure)
from .render_settings import FigureRenderSettings
from .svg import SvgRenderer, render_figure

__all__ = ['Renderer', 'SvgRenderer', 'FigureRenderSettings', 'FigureSpec', 'Annotation',
           'render_figure', 'zipf_figure', 'meplot_figure', 'moment_ratio_figure',
           'zenga_figure', 'spacings_figure']
