import math

import numpy as np
import pytest
from scipy import special

from tailvista.distributions import (GPD, MODEL_FAMILIES, Exponential, Gamma, Lognormal, ParetoI,
                                     ParetoII, lorenz_theoretical, mean_excess_theoretical,
                                     model_from_dict, quantile, sample, survival,
                                     theoretical_moments, zenga_theoretical)
from tailvista.errors import DomainError

FINITE_MEAN_MODELS = [
    ParetoI(1.0, 2.0),
    ParetoI(3.0, 3.5),
    ParetoII(2.0, 3.0),
    GPD(0.2, 1.0),
    GPD(-0.5, 2.0, 1.0),
    Lognormal(0.0, 1.0),
    Lognormal(1.5, 0.4),
    Exponential(2.0),
    Gamma(2.5, 1.5),
]


class TestSurvival:
    def test_pareto_examples(self):
        """Test the Pareto I survival at and above the scale"""
        model = ParetoI(1.0, 2.0)
        assert survival(model, 1.0) == 1.0
        assert survival(model, 2.0) == pytest.approx(0.25)

    def test_below_support_is_one(self):
        """Test that survival is one below the support"""
        assert survival(ParetoI(1.0, 2.0), 0.5) == 1.0
        assert survival(Exponential(1.0), -3.0) == 1.0

    def test_gpd_exponential_branch(self):
        """Test the exponential branch of the GPD at zero shape"""
        assert survival(GPD(0.0, 1.0, 0.0), 1.0) == pytest.approx(math.exp(-1.0))

    def test_gpd_bounded_support(self):
        """Test that a negative shape gives zero survival beyond the upper endpoint"""
        model = GPD(-0.5, 1.0, 0.0)
        assert model.upper_bound == pytest.approx(2.0)
        assert survival(model, 2.5) == 0.0
        assert 0.0 < survival(model, 1.5) < 1.0

    @pytest.mark.parametrize("model", FINITE_MEAN_MODELS, ids=lambda m: m.describe())
    def test_monotone_in_unit_interval(self, model):
        """Test that survival stays in [0, 1] and never increases"""
        x = np.linspace(0.0, 50.0, 2001)
        values = survival(model, x)
        assert np.all(values >= 0.0) and np.all(values <= 1.0)
        assert np.all(np.diff(values) <= 0.0)

    def test_pareto2_shift_matches_pareto1(self):
        """Test that a Pareto II shifted by its scale is a Pareto I"""
        b, alpha = 2.0, 1.7
        x = np.linspace(b, 100.0, 500)
        np.testing.assert_allclose(survival(ParetoII(b, alpha), x - b),
                                   survival(ParetoI(b, alpha), x), rtol=1e-12)

    def test_gpd_positive_shape_matches_pareto1(self):
        """Test that a GPD with positive shape matches the equivalent Pareto I"""
        xi, beta = 0.5, 1.0
        x = np.linspace(2.0, 80.0, 400)
        np.testing.assert_allclose(survival(GPD(xi, beta, beta / xi), x),
                                   survival(ParetoI(beta / xi, 1.0 / xi), x), rtol=1e-12)

    def test_invalid_parameters(self):
        """Test that invalid parameters raise DomainError"""
        with pytest.raises(DomainError):
            ParetoI(-1.0, 2.0)
        with pytest.raises(DomainError):
            Lognormal(0.0, 0.0)
        with pytest.raises(DomainError):
            Exponential(float('nan'))


class TestQuantile:
    def test_examples(self):
        """Test quantiles against closed-form values"""
        assert quantile(ParetoI(1.0, 2.0), 0.75) == pytest.approx(2.0)
        assert quantile(Exponential(1.0), 1.0 - math.exp(-1.0)) == pytest.approx(1.0)
        assert quantile(Lognormal(0.0, 1.0), 0.5) == pytest.approx(1.0)

    @pytest.mark.parametrize("u", [0.0, 1.0, -0.1, 1.5, float('nan')])
    def test_outside_unit_interval(self, u):
        """Test that levels outside (0, 1) raise DomainError"""
        with pytest.raises(DomainError):
            quantile(ParetoI(1.0, 2.0), u)

    @pytest.mark.parametrize("model", FINITE_MEAN_MODELS, ids=lambda m: m.describe())
    def test_round_trip(self, model):
        """Test survival(quantile(u)) = 1 - u on a fine grid"""
        u = np.arange(1, 1000) / 1000.0
        tolerance = 1e-9 if isinstance(model, Gamma) else 1e-12
        np.testing.assert_allclose(survival(model, quantile(model, u)), 1.0 - u, atol=tolerance)

    def test_monotone(self):
        """Test that quantiles increase with the level"""
        u = np.linspace(0.01, 0.99, 99)
        for model in FINITE_MEAN_MODELS:
            assert np.all(np.diff(quantile(model, u)) > 0)

    def test_tiny_levels_stay_positive(self):
        """Test that Lomax and GPD quantiles do not round to zero for tiny u"""
        assert quantile(ParetoII(1.0, 2.0), 1e-17) > 0.0
        assert quantile(GPD(0.3, 1.0), 1e-17) > 0.0


class TestSample:
    def test_single_value_in_support(self):
        """Test that a single draw lies in the support"""
        s = sample(ParetoI(3.0, 2.0), 1, 7)
        assert s.n == 1
        assert s.values[0] >= 3.0

    def test_deterministic(self):
        """Test that equal seeds give equal samples"""
        first = sample(Lognormal(0.0, 1.0), 200, 11)
        second = sample(Lognormal(0.0, 1.0), 200, 11)
        np.testing.assert_array_equal(first.values, second.values)

    def test_seed_changes_draws(self):
        """Test that a different seed gives different draws"""
        first = sample(Lognormal(0.0, 1.0), 200, 11)
        second = sample(Lognormal(0.0, 1.0), 200, 12)
        assert not np.array_equal(first.values, second.values)

    def test_sorted(self):
        """Test that samples come back sorted"""
        s = sample(Gamma(0.5, 2.0), 1000, 3)
        assert np.all(np.diff(s.values) >= 0)

    def test_invalid_size(self):
        """Test that a zero size raises DomainError"""
        with pytest.raises(DomainError):
            sample(Exponential(1.0), 0, 1)

    def test_lognormal_exceedance_fraction(self, lognormal_sample):
        """Test the share of Lognormal(0, 1) values above 2"""
        fraction = np.mean(lognormal_sample.values > 2.0)
        assert fraction == pytest.approx(0.244, abs=0.06)

    def test_pareto_mean(self):
        """Test the Pareto I sample mean against alpha / (alpha - 1)"""
        s = sample(ParetoI(1.0, 2.5), 100_000, 5)
        assert np.mean(s.values) == pytest.approx(2.5 / 1.5, rel=0.02)

    def test_pareto_empirical_survival(self):
        """Test the empirical survival of a large Pareto sample against the closed form"""
        model = ParetoI(1.0, 2.0)
        s = sample(model, 100_000, 9)
        deciles = np.quantile(s.values, np.arange(1, 10) / 10.0)
        empirical = np.array([np.mean(s.values > d) for d in deciles])
        assert np.max(np.abs(empirical - survival(model, deciles))) < 0.01


class TestMeanExcess:
    def test_examples(self):
        """Test mean excess against closed-form values"""
        assert mean_excess_theoretical(ParetoI(1.0, 2.5), 10.0) == pytest.approx(10.0 / 1.5)
        assert mean_excess_theoretical(GPD(0.5, 1.0, 0.0), 2.0) == pytest.approx(4.0)
        assert mean_excess_theoretical(Exponential(2.0), 3.7) == pytest.approx(0.5)
        assert mean_excess_theoretical(ParetoII(2.0, 3.0), 4.0) == pytest.approx(3.0)

    def test_van_der_wijk(self):
        """Test that the Pareto I mean excess is proportional to the threshold"""
        u = np.linspace(1.0, 1000.0, 200)
        ratio = mean_excess_theoretical(ParetoI(1.0, 3.0), u) / u
        np.testing.assert_allclose(ratio, 0.5, rtol=1e-12)

    def test_gamma_matches_exponential(self):
        """Test that a Gamma with unit shape has constant mean excess"""
        u = np.linspace(0.0, 5.0, 11)
        np.testing.assert_allclose(mean_excess_theoretical(Gamma(1.0, 2.0), u), 2.0, rtol=1e-10)

    def test_undefined(self):
        """Test that mean excess is undefined for infinite means"""
        with pytest.raises(DomainError, match="Mean excess undefined"):
            mean_excess_theoretical(ParetoI(1.0, 0.9), 2.0)
        with pytest.raises(DomainError, match="Mean excess undefined"):
            mean_excess_theoretical(GPD(1.0, 1.0), 2.0)

    def test_lognormal_asymptote_domain(self):
        """Test the lognormal asymptote and its threshold domain"""
        with pytest.raises(DomainError):
            mean_excess_theoretical(Lognormal(0.0, 1.0), 0.5)
        assert mean_excess_theoretical(Lognormal(0.0, 1.0), math.e ** 3) == \
            pytest.approx(math.e ** 3 / 3.0)


class TestLorenz:
    def test_examples(self):
        """Test Lorenz values against closed forms"""
        assert lorenz_theoretical(ParetoI(1.0, 2.0), 0.75) == pytest.approx(0.5)
        assert lorenz_theoretical(Lognormal(0.0, 1.0), 0.5) == pytest.approx(special.ndtr(-1.0))

    @pytest.mark.parametrize("model", FINITE_MEAN_MODELS, ids=lambda m: m.describe())
    def test_shape(self, model):
        """Test that the Lorenz curve starts at 0, ends at 1 and stays below the diagonal"""
        u = np.linspace(1e-6, 1 - 1e-6, 1001)
        lorenz = lorenz_theoretical(model, u)
        assert lorenz[0] == pytest.approx(0.0, abs=1e-4)
        assert lorenz[-1] == pytest.approx(1.0, abs=1e-2)
        assert np.all(np.diff(lorenz) >= -1e-12)
        assert np.all(lorenz <= u + 1e-12)

    def test_infinite_mean(self):
        """Test that the Lorenz curve is undefined for infinite means"""
        with pytest.raises(DomainError, match="Lorenz undefined"):
            lorenz_theoretical(ParetoI(1.0, 0.8), 0.5)


class TestZenga:
    def test_lognormal_printed_constant(self):
        """Test the constant lognormal curve of the printed formula"""
        u = np.linspace(0.01, 0.99, 99)
        z = zenga_theoretical(Lognormal(3.0, 1.0), u, "paper_verbatim")
        np.testing.assert_allclose(z, 1.0 - math.exp(-1.0), atol=1e-12)

    def test_lognormal_corrected_not_constant(self):
        """Test that the corrected lognormal curve is not constant"""
        model = Lognormal(0.0, 1.0)
        assert zenga_theoretical(model, 0.5) == pytest.approx(0.8114, abs=1e-3)
        assert zenga_theoretical(model, 0.1) > zenga_theoretical(model, 0.5)
        assert zenga_theoretical(model, 0.9) > zenga_theoretical(model, 0.5)

    def test_pareto_printed_closed_form(self):
        """Test the printed Pareto closed form"""
        assert zenga_theoretical(ParetoI(5.0, 2.0), 0.5, "paper_verbatim") == \
            pytest.approx(1.0 - 0.5 ** 0.5, abs=1e-5)

    def test_pareto_corrected_form(self):
        """Test the corrected Pareto closed form"""
        assert zenga_theoretical(ParetoI(5.0, 2.0), 0.5) == pytest.approx(2.0 - 2.0 ** 0.5)

    def test_pareto_increasing(self):
        """Test that the Pareto Zenga curve increases"""
        u = np.linspace(0.01, 0.99, 99)
        for alpha in (1.5, 2.0, 5.0):
            z = zenga_theoretical(ParetoI(1.0, alpha), u)
            assert np.all(np.diff(z) > 0)

    def test_exponential_minimum(self):
        """Test the location and value of the exponential Zenga minimum"""
        u = np.arange(1, 10_000) / 10_000.0
        z = zenga_theoretical(Exponential(1.0), u)
        assert u[np.argmin(z)] == pytest.approx(0.8336, abs=0.005)
        assert zenga_theoretical(Exponential(1.0), 0.8336) == pytest.approx(0.7701, abs=1e-3)

    def test_exponential_rate_free(self):
        """Test that the exponential curve does not depend on the rate"""
        u = np.linspace(0.05, 0.95, 19)
        np.testing.assert_allclose(zenga_theoretical(Exponential(0.1), u),
                                   zenga_theoretical(Exponential(7.0), u))

    @pytest.mark.parametrize("model", FINITE_MEAN_MODELS, ids=lambda m: m.describe())
    def test_lorenz_consistency(self, model):
        """Test Z(u) = (u - L(u)) / (u (1 - L(u)))"""
        u = np.linspace(0.01, 0.99, 99)
        lorenz = lorenz_theoretical(model, u)
        np.testing.assert_allclose(zenga_theoretical(model, u), (u - lorenz) / (u * (1.0 - lorenz)),
                                   atol=1e-10)

    def test_infinite_mean(self):
        """Test that the Zenga curve is undefined for infinite means"""
        with pytest.raises(DomainError, match="Zenga undefined"):
            zenga_theoretical(ParetoI(1.0, 1.0), 0.5)

    def test_unknown_formula_mode(self):
        """Test that an unknown formula mode raises DomainError"""
        with pytest.raises(DomainError):
            zenga_theoretical(ParetoI(1.0, 2.0), 0.5, "approximate")


class TestMoments:
    def test_lognormal(self):
        """Test the lognormal moment pair"""
        cv, skewness = theoretical_moments(Lognormal(0.0, 1.0))
        assert cv == pytest.approx(math.sqrt(math.e - 1.0))
        assert skewness == pytest.approx((math.e + 2.0) * math.sqrt(math.e - 1.0))

    def test_exponential_and_gamma(self):
        """Test the exponential and Gamma moment pairs"""
        assert theoretical_moments(Exponential(3.0)) == (1.0, 2.0)
        assert theoretical_moments(Gamma(4.0, 1.0)) == pytest.approx((0.5, 1.0))

    def test_pareto(self):
        """Test the Pareto I moment pair"""
        cv, skewness = theoretical_moments(ParetoI(1.0, 4.0))
        assert cv == pytest.approx(1.0 / math.sqrt(8.0))
        assert skewness == pytest.approx(10.0 * math.sqrt(0.5))

    def test_infinite_skewness(self):
        """Test that an infinite skewness gives no moment pair"""
        assert theoretical_moments(ParetoI(1.0, 2.5)) is None
        assert theoretical_moments(GPD(0.4, 1.0)) is None

    def test_mean(self):
        """Test model means and the infinite-mean error"""
        assert ParetoI(2.0, 3.0).mean() == pytest.approx(3.0)
        assert GPD(0.5, 1.0, 1.0).mean() == pytest.approx(3.0)
        with pytest.raises(DomainError):
            ParetoII(1.0, 1.0).mean()


class TestModelRegistry:
    @pytest.mark.parametrize("model", FINITE_MEAN_MODELS, ids=lambda m: m.describe())
    def test_dict_round_trip(self, model):
        """Test that a model survives a dictionary round trip"""
        assert model_from_dict(model.to_dict()) == model

    def test_families(self):
        assert set(MODEL_FAMILIES) == {"pareto1", "pareto2", "gpd", "lognormal",
                                       "exponential", "gamma"}

    def test_unknown_family(self):
        """Test that an unknown family raises DomainError"""
        with pytest.raises(DomainError):
            model_from_dict({'family': 'burr', 'c': 1.0})

    def test_bad_parameters(self):
        """Test that missing parameters raise DomainError"""
        with pytest.raises(DomainError):
            model_from_dict({'family': 'pareto1', 'x0': 1.0})

    def test_describe(self):
        assert ParetoI(1.0, 2.5).describe() == "pareto1(x0=1, alpha=2.5)"
