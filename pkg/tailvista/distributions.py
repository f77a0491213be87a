"""
Closed-form machinery of the candidate size distributions.

Every model exposes survival, quantile, mean excess, Lorenz and Zenga curves.
These are the oracles the empirical routines are checked against.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, Optional, Tuple, Type, Union

import numpy as np
from scipy import special

from .empirical import Sample
from .errors import DomainError
from .settings import FORMULA_MODES
from .utils import make_rng, open_unit_uniforms

logger = logging.getLogger("tailvista.distributions")

ArrayLike = Union[float, np.ndarray]


def _as_array(value) -> Tuple[np.ndarray, bool]:
    array = np.asarray(value, dtype=np.float64)
    return array, array.ndim == 0


def _restore(array: np.ndarray, scalar: bool):
    return float(array) if scalar else array


def _check_probability(u: np.ndarray) -> None:
    if np.any(~np.isfinite(u)) or np.any(u <= 0.0) or np.any(u >= 1.0):
        raise DomainError("Probability level must lie strictly inside (0, 1)")


def _require_positive(**params) -> None:
    for name, value in params.items():
        if not (math.isfinite(value) and value > 0):
            raise DomainError(f"Parameter {name} must be a positive real, got {value}")


def _require_finite(**params) -> None:
    for name, value in params.items():
        if not math.isfinite(value):
            raise DomainError(f"Parameter {name} must be finite, got {value}")


@dataclass(frozen=True)
class DistributionModel(ABC):
    """Base class of the parametric families"""

    family = "generic"

    @abstractmethod
    def _survival(self, x: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def _quantile(self, u: np.ndarray) -> np.ndarray:
        pass

    @property
    @abstractmethod
    def lower_bound(self) -> float:
        pass

    def mean(self) -> float:
        """Expected value; raises when it is infinite"""
        raise DomainError(f"{self.describe()} has no finite mean")

    def moments(self) -> Tuple[float, float]:
        """Theoretical (CV, skewness); raises when the third moment is infinite"""
        raise DomainError(f"{self.describe()} has no finite skewness")

    def _mean_excess(self, u: np.ndarray) -> np.ndarray:
        raise DomainError(f"Mean excess undefined for {self.describe()}")

    def _lorenz(self, u: np.ndarray) -> np.ndarray:
        raise DomainError(f"Lorenz undefined for {self.describe()}")

    def _zenga(self, u: np.ndarray, formula_mode: str) -> np.ndarray:
        lorenz = self._lorenz(u)
        return (u - lorenz) / (u * (1.0 - lorenz))

    def describe(self) -> str:
        params = ', '.join(f"{name}={value:g}" for name, value in self.parameters().items())
        return f"{self.family}({params})"

    def parameters(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in self.__dataclass_fields__}

    def to_dict(self) -> dict:
        return {'family': self.family, **self.parameters()}


@dataclass(frozen=True)
class ParetoI(DistributionModel):
    x0: float
    alpha: float

    family = "pareto1"

    def __post_init__(self):
        _require_positive(x0=self.x0, alpha=self.alpha)

    @property
    def lower_bound(self) -> float:
        return self.x0

    def _survival(self, x):
        ratio = np.maximum(x, self.x0) / self.x0
        return ratio ** (-self.alpha)

    def _quantile(self, u):
        return self.x0 * (1.0 - u) ** (-1.0 / self.alpha)

    def mean(self):
        if self.alpha <= 1:
            raise DomainError(f"{self.describe()} has infinite mean (alpha <= 1)")
        return self.alpha * self.x0 / (self.alpha - 1.0)

    def moments(self):
        a = self.alpha
        if a <= 3:
            raise DomainError(f"{self.describe()} has infinite skewness (alpha <= 3)")
        cv = 1.0 / math.sqrt(a * (a - 2.0))
        skewness = 2.0 * (1.0 + a) / (a - 3.0) * math.sqrt((a - 2.0) / a)
        return cv, skewness

    def _mean_excess(self, u):
        if self.alpha <= 1:
            raise DomainError("Mean excess undefined: Pareto I requires alpha > 1")
        # Below the scale every observation exceeds u
        return np.where(u >= self.x0, u / (self.alpha - 1.0), self.mean() - u)

    def _lorenz(self, u):
        if self.alpha <= 1:
            raise DomainError("Lorenz undefined: Pareto I requires alpha > 1")
        return 1.0 - (1.0 - u) ** (1.0 - 1.0 / self.alpha)

    def _zenga(self, u, formula_mode):
        if self.alpha <= 1:
            raise DomainError("Zenga undefined: Pareto I requires alpha > 1")
        if formula_mode == "paper_verbatim":
            return 1.0 - (1.0 - u) ** (1.0 / (self.alpha * (self.alpha - 1.0)))
        upper = 1.0 - u
        return 1.0 - (upper ** (1.0 / self.alpha) - upper) / u


@dataclass(frozen=True)
class ParetoII(DistributionModel):
    """Lomax distribution, a Pareto I shifted to start at zero"""
    b: float
    alpha: float

    family = "pareto2"

    def __post_init__(self):
        _require_positive(b=self.b, alpha=self.alpha)

    @property
    def lower_bound(self) -> float:
        return 0.0

    def _survival(self, x):
        return (1.0 + np.maximum(x, 0.0) / self.b) ** (-self.alpha)

    def _quantile(self, u):
        return self.b * np.expm1(-np.log1p(-u) / self.alpha)

    def mean(self):
        if self.alpha <= 1:
            raise DomainError(f"{self.describe()} has infinite mean (alpha <= 1)")
        return self.b / (self.alpha - 1.0)

    def moments(self):
        a = self.alpha
        if a <= 3:
            raise DomainError(f"{self.describe()} has infinite skewness (alpha <= 3)")
        cv = math.sqrt(a / (a - 2.0))
        skewness = 2.0 * (1.0 + a) / (a - 3.0) * math.sqrt((a - 2.0) / a)
        return cv, skewness

    def _mean_excess(self, u):
        if self.alpha <= 1:
            raise DomainError("Mean excess undefined: Pareto II requires alpha > 1")
        return (np.maximum(u, 0.0) + self.b) / (self.alpha - 1.0) - np.minimum(u, 0.0)

    def _lorenz(self, u):
        if self.alpha <= 1:
            raise DomainError("Lorenz undefined: Pareto II requires alpha > 1")
        a = self.alpha
        return a * (1.0 - (1.0 - u) ** (1.0 - 1.0 / a)) - (a - 1.0) * u


@dataclass(frozen=True)
class GPD(DistributionModel):
    """Generalized Pareto distribution with shape xi, scale beta and location nu"""
    xi: float
    beta: float
    nu: float = 0.0

    family = "gpd"

    def __post_init__(self):
        _require_finite(xi=self.xi, nu=self.nu)
        _require_positive(beta=self.beta)

    @property
    def lower_bound(self) -> float:
        return self.nu

    @property
    def upper_bound(self) -> float:
        if self.xi < 0:
            return self.nu - self.beta / self.xi
        return math.inf

    def _survival(self, x):
        z = np.maximum(x - self.nu, 0.0) / self.beta
        if self.xi == 0:
            return np.exp(-z)
        base = 1.0 + self.xi * z
        with np.errstate(divide='ignore', invalid='ignore'):
            tail = np.where(base > 0, np.abs(base) ** (-1.0 / self.xi), 0.0)
        return tail

    def _quantile(self, u):
        if self.xi == 0:
            return self.nu - self.beta * np.log1p(-u)
        return self.nu + self.beta / self.xi * np.expm1(-self.xi * np.log1p(-u))

    def mean(self):
        if self.xi >= 1:
            raise DomainError(f"{self.describe()} has infinite mean (xi >= 1)")
        return self.nu + self.beta / (1.0 - self.xi)

    def moments(self):
        xi = self.xi
        if xi >= 1.0 / 3.0:
            raise DomainError(f"{self.describe()} has infinite skewness (xi >= 1/3)")
        sd = self.beta / ((1.0 - xi) * math.sqrt(1.0 - 2.0 * xi))
        skewness = 2.0 * (1.0 + xi) * math.sqrt(1.0 - 2.0 * xi) / (1.0 - 3.0 * xi)
        return sd / self.mean(), skewness

    def _mean_excess(self, u):
        if self.xi >= 1:
            raise DomainError("Mean excess undefined: GPD requires xi < 1")
        excess_scale = self.beta + self.xi * np.maximum(u - self.nu, 0.0)
        if np.any(excess_scale <= 0):
            raise DomainError("Mean excess undefined: threshold beyond the GPD upper endpoint")
        return excess_scale / (1.0 - self.xi) - np.minimum(u - self.nu, 0.0)

    def _lorenz(self, u):
        mean = self.mean()
        if self.nu < 0 or mean <= 0:
            raise DomainError("Lorenz undefined: GPD support must be non-negative")
        if self.xi == 0:
            integral = self.nu * u + self.beta * ((1.0 - u) * np.log1p(-u) + u)
        else:
            power = (1.0 - (1.0 - u) ** (1.0 - self.xi)) / (1.0 - self.xi)
            integral = self.nu * u + self.beta / self.xi * (power - u)
        return integral / mean


@dataclass(frozen=True)
class Lognormal(DistributionModel):
    mu: float
    sigma: float

    family = "lognormal"

    def __post_init__(self):
        _require_finite(mu=self.mu)
        _require_positive(sigma=self.sigma)

    @property
    def lower_bound(self) -> float:
        return 0.0

    def _survival(self, x):
        with np.errstate(divide='ignore'):
            z = (np.log(np.maximum(x, 0.0)) - self.mu) / self.sigma
        return special.ndtr(-z)

    def _quantile(self, u):
        return np.exp(self.mu + self.sigma * special.ndtri(u))

    def mean(self):
        return math.exp(self.mu + 0.5 * self.sigma ** 2)

    def moments(self):
        omega = math.exp(self.sigma ** 2)
        cv = math.sqrt(omega - 1.0)
        return cv, (omega + 2.0) * cv

    def _mean_excess(self, u):
        # Leading-order asymptote only, valid for large thresholds
        if np.any(u <= math.exp(self.mu)):
            raise DomainError(
                "Lognormal mean excess asymptote needs thresholds above exp(mu)")
        return self.sigma ** 2 * u / (np.log(u) - self.mu)

    def _lorenz(self, u):
        return special.ndtr(special.ndtri(u) - self.sigma)

    def _zenga(self, u, formula_mode):
        if formula_mode == "paper_verbatim":
            return np.full_like(u, 1.0 - math.exp(-self.sigma ** 2))
        return super()._zenga(u, formula_mode)


@dataclass(frozen=True)
class Exponential(DistributionModel):
    rate: float

    family = "exponential"

    def __post_init__(self):
        _require_positive(rate=self.rate)

    @property
    def lower_bound(self) -> float:
        return 0.0

    def _survival(self, x):
        return np.exp(-self.rate * np.maximum(x, 0.0))

    def _quantile(self, u):
        return -np.log1p(-u) / self.rate

    def mean(self):
        return 1.0 / self.rate

    def moments(self):
        return 1.0, 2.0

    def _mean_excess(self, u):
        return 1.0 / self.rate - np.minimum(u, 0.0)

    def _lorenz(self, u):
        return u + (1.0 - u) * np.log1p(-u)

    def _zenga(self, u, formula_mode):
        tail_log = -np.log1p(-u)
        return tail_log / (u * (1.0 + tail_log))


@dataclass(frozen=True)
class Gamma(DistributionModel):
    k: float
    theta: float

    family = "gamma"

    def __post_init__(self):
        _require_positive(k=self.k, theta=self.theta)

    @property
    def lower_bound(self) -> float:
        return 0.0

    def _survival(self, x):
        return special.gammaincc(self.k, np.maximum(x, 0.0) / self.theta)

    def _quantile(self, u):
        return self.theta * np.where(u < 0.5,
                                     special.gammaincinv(self.k, u),
                                     special.gammainccinv(self.k, 1.0 - u))

    def mean(self):
        return self.k * self.theta

    def moments(self):
        return 1.0 / math.sqrt(self.k), 2.0 / math.sqrt(self.k)

    def _mean_excess(self, u):
        z = np.maximum(u, 0.0) / self.theta
        tail = special.gammaincc(self.k, z)
        if np.any(tail <= 0):
            raise DomainError("Mean excess undefined: threshold survival underflows to zero")
        upper_mean = self.k * self.theta * special.gammaincc(self.k + 1.0, z) / tail
        return upper_mean - u

    def _lorenz(self, u):
        return special.gammainc(self.k + 1.0, self._quantile(u) / self.theta)


MODEL_FAMILIES: Dict[str, Type[DistributionModel]] = {
    cls.family: cls for cls in (ParetoI, ParetoII, GPD, Lognormal, Exponential, Gamma)
}


def model_from_dict(data: dict) -> DistributionModel:
    """Build a model from {'family': name, **parameters}"""
    params = dict(data)
    family = params.pop('family', None)
    if family not in MODEL_FAMILIES:
        raise DomainError(f"Unknown distribution family: {family!r}")
    try:
        return MODEL_FAMILIES[family](**params)
    except TypeError as exc:
        raise DomainError(f"Invalid parameters for {family}: {exc}") from exc


def survival(model: DistributionModel, x: ArrayLike) -> ArrayLike:
    """Exact 1 - F(x); equals 1 below the support"""
    array, scalar = _as_array(x)
    return _restore(np.clip(model._survival(array), 0.0, 1.0), scalar)


def quantile(model: DistributionModel, u: ArrayLike) -> ArrayLike:
    """Inverse cdf F^{-1}(u) for u in (0, 1)"""
    array, scalar = _as_array(u)
    _check_probability(array)
    return _restore(model._quantile(array), scalar)


def sample(model: DistributionModel, n: int, seed: int):
    """Seeded inverse-transform sample, returned as a sorted Sample"""
    if n < 1:
        raise DomainError(f"Sample size must be at least 1, got {n}")
    rng = make_rng(seed)
    values = np.sort(model._quantile(open_unit_uniforms(rng, n)))
    logger.debug(f"Drew {n} values from {model.describe()} with seed {seed}")
    return Sample(values)


def mean_excess_theoretical(model: DistributionModel, u: ArrayLike) -> ArrayLike:
    """
    Theoretical mean excess e(u) = E[X - u | X > u].

    Exact for Pareto I/II, GPD, exponential and gamma. For the lognormal the
    leading-order asymptote sigma^2 u / (log u - mu) is returned, which is only
    meaningful for large thresholds.
    """
    array, scalar = _as_array(u)
    return _restore(model._mean_excess(array), scalar)


def lorenz_theoretical(model: DistributionModel, u: ArrayLike) -> ArrayLike:
    """
    Lorenz curve L(u): share of the total held by the lowest u-fraction.

    The lognormal uses the standard identity L(u) = Phi(Phi^{-1}(u) - sigma).
    """
    array, scalar = _as_array(u)
    _check_probability(array)
    return _restore(model._lorenz(array), scalar)


def zenga_theoretical(model: DistributionModel, u: ArrayLike,
                      formula_mode: str = "corrected") -> ArrayLike:
    """
    Zenga curve Z(u) = 1 - Q^-(u) / Q^+(u), the ratio of lower and upper means.

    In "corrected" mode every family satisfies Z(u) = (u - L(u)) / (u (1 - L(u))),
    the quantity the empirical curve estimates. "paper_verbatim" mode swaps in
    the printed closed forms: 1 - (1-u)^{1/(alpha(alpha-1))} for Pareto I and the
    constant 1 - exp(-sigma^2) for the lognormal.
    """
    if formula_mode not in FORMULA_MODES:
        raise DomainError(f"Unknown formula mode {formula_mode!r}")
    array, scalar = _as_array(u)
    _check_probability(array)
    try:
        values = model._zenga(array, formula_mode)
    except DomainError as exc:
        raise DomainError(f"Zenga undefined for {model.describe()}: {exc}") from exc
    return _restore(values, scalar)


def theoretical_moments(model: DistributionModel) -> Optional[Tuple[float, float]]:
    """(CV, skewness) of the model, or None when the third moment is infinite"""
    try:
        return model.moments()
    except DomainError:
        return None
