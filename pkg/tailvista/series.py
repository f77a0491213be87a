"""Value types shared by the empirical, diagnostic and rendering layers"""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Tuple

import numpy as np
import pandas as pd


class AxisScale(str, Enum):
    LINEAR = "linear"
    LOG = "log"


def _frozen_array(values) -> np.ndarray:
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PlotSeries:
    """Ordered (x, y) points with the axis scales they are meant for"""
    x: np.ndarray
    y: np.ndarray
    x_scale: AxisScale = AxisScale.LINEAR
    y_scale: AxisScale = AxisScale.LINEAR
    label: str = ""

    def __post_init__(self):
        x = _frozen_array(self.x)
        y = _frozen_array(self.y)
        if x.shape != y.shape or x.ndim != 1:
            raise ValueError(
                f"Series {self.label!r} needs matching 1-d x and y, got {x.shape} and {y.shape}")
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'y', y)
        object.__setattr__(self, 'x_scale', AxisScale(self.x_scale))
        object.__setattr__(self, 'y_scale', AxisScale(self.y_scale))

    def __len__(self) -> int:
        return len(self.x)

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.x.tolist(), self.y.tolist()))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'x': self.x, 'y': self.y})


@dataclass(frozen=True)
class MomentPoint:
    """Empirical (CV, skewness) couple placed on the moment-ratio plot"""
    cv: float
    skewness: float
    nonpositive_mean: bool = False

    def to_dict(self) -> dict:
        return {'cv': self.cv, 'skewness': self.skewness,
                'nonpositive_mean': self.nonpositive_mean}
