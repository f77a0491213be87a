import pathlib

import numpy as np
import pytest
from scipy import special

from tailvista.distributions import Exponential, Lognormal, ParetoI, sample
from tailvista.empirical import Sample, make_sample

FIXTURE_SEED = 20240601


@pytest.fixture(scope="session")
def pareto_sample():
    """ParetoI(1, 2.5) sample of 5000 values"""
    return sample(ParetoI(1.0, 2.5), 5000, FIXTURE_SEED)


@pytest.fixture(scope="session")
def pareto4_sample():
    """ParetoI(1, 4) sample of 5000 values, finite skewness"""
    return sample(ParetoI(1.0, 4.0), 5000, FIXTURE_SEED)


@pytest.fixture(scope="session")
def lognormal_sample():
    """Lognormal(0, 1) sample of 500 values"""
    return sample(Lognormal(0.0, 1.0), 500, FIXTURE_SEED)


@pytest.fixture(scope="session")
def lognormal_trap_sample():
    """Lognormal(0, 1) sample of 500 values (seed 2) whose Zipf tail and mean excess look Paretian"""
    return sample(Lognormal(0.0, 1.0), 500, 2)


@pytest.fixture(scope="session")
def lognormal_ideal_sample():
    """Noise-free Lognormal(0, 1) sample: the quantiles at (i - 0.5)/n, n = 500"""
    n = 500
    levels = (np.arange(1, n + 1) - 0.5) / n
    return Sample(np.exp(special.ndtri(levels)))


@pytest.fixture(scope="session")
def exponential_sample():
    """Exponential(1) sample of 5000 values"""
    return sample(Exponential(1.0), 5000, FIXTURE_SEED)


@pytest.fixture
def small_sample():
    return make_sample([1.0, 2.0, 3.0, 4.0])


@pytest.fixture
def csv_file(tmp_path):
    """Write a one-column CSV, optionally with a header, and return its path"""
    def _write(values, header=None, name="data.csv"):
        path = tmp_path / name
        lines = [header] if header is not None else []
        lines += [repr(float(v)) if not isinstance(v, str) else v for v in values]
        path.write_text("\n".join(lines) + ("\n" if lines else ""))
        return path
    return _write


@pytest.fixture
def lognormal_csv(csv_file, lognormal_sample):
    return csv_file(lognormal_sample.values, header="value", name="lognormal.csv")


@pytest.fixture
def output_dir(tmp_path) -> pathlib.Path:
    path = tmp_path / "out"
    path.mkdir()
    return path
