from .distributions import (GPD, Exponential, Gamma, Lognormal, ParetoI, ParetoII,
                            lorenz_theoretical, mean_excess_theoretical, quantile, sample,
                            survival, zenga_theoretical)
from .empirical import Sample, make_sample
from .diagnostics import Verdict, VerdictLabel, ZoneLabel, classify_moment_point, verdict
from .errors import ConfigError, DataError, DomainError, RenderError, TailVistaError
from .settings import DEFAULT_SEED, DiagnosticSettings, GlobalSettings

__version__ = "0.1.0"

__all__ = ['ParetoI', 'ParetoII', 'GPD', 'Lognormal', 'Exponential', 'Gamma',
           'survival', 'quantile', 'sample', 'mean_excess_theoretical', 'lorenz_theoretical',
           'zenga_theoretical', 'Sample', 'make_sample', 'Verdict', 'VerdictLabel', 'ZoneLabel',
           'classify_moment_point', 'verdict', 'TailVistaError', 'DataError', 'DomainError',
           'RenderError', 'ConfigError', 'DiagnosticSettings', 'GlobalSettings', 'DEFAULT_SEED']
