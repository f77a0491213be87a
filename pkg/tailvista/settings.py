from dataclasses import asdict, dataclass
from typing import Tuple
import copy

FORMULA_MODES = ("corrected", "paper_verbatim")


@dataclass
class DiagnosticSettings:
    """Thresholds that turn the graphical diagnostics into pass/fail decisions"""
    # Zipf plot
    tail_fraction: float = 0.2
    min_r2: float = 0.98
    min_tail_points: int = 10
    bin_base: float = 2.0
    # Mean excess plot
    me_cut: int = 5
    me_min_slope: float = 0.1
    # Moment-ratio plot
    formula_mode: str = "corrected"
    symmetric_band: float = 0.15
    rule_of_thumb_skewness: float = 14.0
    rule_of_thumb_max_cv: float = 2.0
    # Zenga plot
    zenga_trim: Tuple[float, float] = (0.05, 0.95)
    zenga_min_points: int = 10
    zenga_constant_range: float = 0.08
    zenga_increasing_slope: float = 0.1
    zenga_increasing_rank_corr: float = 0.8
    zenga_min_rise: float = 0.01
    # Aggregation check
    aggregation_min_n: int = 200
    aggregation_max_delta: float = 0.2
    aggregation_reference_draws: int = 8
    # Verdict
    min_verdict_n: int = 100

    def copy(self):
        return copy.deepcopy(self)

    def to_dict(self) -> dict:
        data = asdict(self)
        data['zenga_trim'] = list(self.zenga_trim)
        return data


class GlobalSettings:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance.diagnostic_settings = DiagnosticSettings()
        return cls._instance

    @classmethod
    def get_default_settings(cls) -> DiagnosticSettings:
        return cls().diagnostic_settings.copy()


# Seed used whenever the caller does not pass one
DEFAULT_SEED = 20240601
