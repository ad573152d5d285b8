import numpy as np
import pytest

from polyan import builtin_algebra
from polyan.fields import gamma_from_prescribed, random_smooth_field


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def h4_psi():
    return builtin_algebra("h4-psi")


@pytest.fixture
def h4_e():
    return builtin_algebra("h4-e")


@pytest.fixture
def pair_factory():
    """Factory for generalized-analytic pairs from random smooth fields."""

    def make(S, rng, amplitude=0.8):
        f = random_smooth_field(S.n, rng, amplitude=amplitude)
        fprime = random_smooth_field(S.n, rng, amplitude=amplitude)
        return gamma_from_prescribed(f, fprime, S)

    return make
