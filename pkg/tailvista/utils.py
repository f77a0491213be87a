import numpy as np

# 2**52 cell midpoints, each exactly representable and strictly inside (0, 1)
_UNIT_CELLS = 2 ** 52


def make_rng(seed: int) -> np.random.Generator:
    """Seeded counter-based generator used for every random draw"""
    return np.random.Generator(np.random.Philox(int(seed)))


def open_unit_uniforms(rng: np.random.Generator, size: int) -> np.ndarray:
    """Uniform draws on the open interval (0, 1)"""
    cells = rng.integers(0, _UNIT_CELLS, size=size, dtype=np.int64)
    return (cells.astype(np.float64) + 0.5) / _UNIT_CELLS


def trial_seed(seed: int, trial: int) -> int:
    """Seed of Monte Carlo trial number `trial`"""
    return int(seed) + int(trial)
