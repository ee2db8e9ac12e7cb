import os
import sys

import numpy as np
import pytest

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.cf_core import (CompoundPoissonSymCF, GaussianCF, SymmetricStableCF,
                          SymmetrizedGammaCF)
from core.diagnostics import DiagnosticsBus


@pytest.fixture
def laplace_cf():
    """(1 + t^2)^-1, variance 2"""
    return SymmetrizedGammaCF(1.0)


@pytest.fixture
def gauss2():
    return GaussianCF(2.0)


@pytest.fixture
def cauchy():
    return SymmetricStableCF(1.0, 1.0)


@pytest.fixture
def poisson_cf():
    return CompoundPoissonSymCF(2.0, 1.0)


@pytest.fixture
def bus():
    return DiagnosticsBus()


@pytest.fixture
def t_grid():
    return np.linspace(-10.0, 10.0, 101)


@pytest.fixture
def sample_file(tmp_path):
    def write(text, name="samples.txt"):
        path = tmp_path / name
        path.write_text(text)
        return str(path)
    return write
