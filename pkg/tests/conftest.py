import numpy as np
import pytest

from rates_lab import SpectrumModel, power_law_spectrum


@pytest.fixture(scope="session")
def two_mode():
    """Smallest nontrivial spectrum: mu = (1, 1/2)."""
    return SpectrumModel(eigenvalues=np.array([1.0, 0.5]))


@pytest.fixture(scope="session")
def power8():
    """Exact power law mu_i = i^(-2) truncated at T = 8."""
    return power_law_spectrum(c=1.0, p=0.5, truncation=8)


@pytest.fixture(scope="session")
def power64():
    return power_law_spectrum(c=1.0, p=0.5, truncation=64)
