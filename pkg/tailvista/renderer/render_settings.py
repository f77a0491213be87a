from dataclasses import dataclass
from typing import Tuple
import copy


@dataclass
class RenderSettings:
    def copy(self):
        return copy.deepcopy(self)


@dataclass
class FigureRenderSettings(RenderSettings):
    width: int = 800
    height: int = 600
    margin: float = 0.1  # fraction of the canvas on every side
    marker_radius: float = 2.5
    curve_width: float = 1.5
    axis_width: float = 1.0
    font_size: int = 14
    n_ticks: int = 5
    series_colors: Tuple[str, ...] = ('#000000', '#1f77b4', '#d62728', '#2ca02c')
    curve_colors: Tuple[str, ...] = ('#d62728', '#9467bd', '#1f77b4', '#2ca02c', '#ff7f0e')
    region_fill: str = '#bdbdbd'
    region_opacity: float = 0.5
    background: str = '#ffffff'
    show_legend: bool = True
