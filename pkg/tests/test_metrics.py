import math

import numpy as np
import pytest

from analysis.metrics import (EXCLUDE, LambdaConfig, backward_bound, clt_bound_check, lambda_r,
                              matched_gaussian)
from core.cf_core import (CompoundPoissonSymCF, GaussianCF, SymmetrizedGammaCF, convolve, dilate,
                          root_rescale, sum_rescale)
from core.errors import ConfigError

# dense oracle grid on [1e-3, 20]
ORACLE_T = np.linspace(1e-3, 20.0, 10**6)


def oracle(f_u, f_v, r=3.0):
    return float(np.max(np.abs(f_u(ORACLE_T) - f_v(ORACLE_T)) / ORACLE_T ** r))


def test_identical_laws_are_at_distance_zero(laplace_cf):
    report = lambda_r(laplace_cf, laplace_cf)
    assert report.value == 0.0
    assert report.metric == "lambda_r"


def test_laplace_vs_matched_gaussian(laplace_cf, gauss2):
    expected = oracle(lambda t: 1.0 / (1.0 + t * t), lambda t: np.exp(-t * t))
    report = lambda_r(laplace_cf, gauss2)
    assert report.value == pytest.approx(expected, abs=1e-4)
    assert report.value == pytest.approx(0.174, abs=1e-3)
    assert 0.3 < report.parameters["argmax_t"] < 1.0
    assert not report.parameters["diverged"]
    assert report.parameters["extensions"] == 0


def test_symmetry(laplace_cf, gauss2):
    assert lambda_r(laplace_cf, gauss2).value == lambda_r(gauss2, laplace_cf).value


def test_mismatched_variance_diverges():
    report = lambda_r(GaussianCF(1.0), GaussianCF(2.0))
    assert math.isinf(report.value)
    assert report.parameters["diverged"]
    assert report.parameters["extensions"] == 3


def test_exclude_policy_keeps_the_grid_sup():
    config = LambdaConfig(small_t_policy=EXCLUDE)
    report = lambda_r(GaussianCF(1.0), GaussianCF(2.0), config)
    # |e^{-t^2/2} - e^{-t^2}| / t^3 ~ 1 / (2 t) at the grid edge
    assert report.value == pytest.approx(500.0, rel=1e-2)
    assert report.parameters["effective_t_min"] == 1e-3


def test_scale_homogeneity(laplace_cf, gauss2):
    c = 2.0
    base = lambda_r(laplace_cf, gauss2, LambdaConfig(t_min=1e-3, t_max=50.0))
    scaled = lambda_r(dilate(laplace_cf, c), dilate(gauss2, c), LambdaConfig(t_min=1e-3 / c, t_max=50.0 / c))
    assert scaled.value == pytest.approx(c ** 3 * base.value, rel=1e-12)


@pytest.mark.parametrize("kwargs", [
    {"r": 2.0},
    {"r": 1.5},
    {"t_min": 0.0},
    {"t_min": 10.0, "t_max": 5.0},
    {"grid_size": 1},
    {"small_t_policy": "clamp"},
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        LambdaConfig(**kwargs)


def test_matched_gaussian(laplace_cf):
    assert matched_gaussian(laplace_cf).variance == pytest.approx(2.0)


def test_forward_bound_gaussian_is_trivial():
    check = clt_bound_check(GaussianCF(1.0), 5, r=3.0)
    assert check.lhs == 0.0 and check.rhs == 0.0
    assert check.holds


def test_forward_bound_oracle_values(laplace_cf):
    check = clt_bound_check(laplace_cf, 4, r=3.0)
    lhs = oracle(lambda t: (1.0 + t * t / 4.0) ** -4, lambda t: np.exp(-t * t))
    base = oracle(lambda t: 1.0 / (1.0 + t * t), lambda t: np.exp(-t * t))
    assert check.lhs == pytest.approx(lhs, abs=1e-4)
    assert check.rhs == pytest.approx(base / 2.0, abs=1e-4)
    assert check.lhs == pytest.approx(0.05036, abs=1e-4)
    assert check.base_distance == pytest.approx(0.174158, abs=1e-4)
    assert check.rhs == pytest.approx(0.087, abs=1e-3)
    assert check.holds and check.applicable


FINITE_VARIANCE_LAWS = [
    SymmetrizedGammaCF(0.5),
    SymmetrizedGammaCF(1.0),
    SymmetrizedGammaCF(2.0),
    CompoundPoissonSymCF(3.0, 1.0),
    convolve(GaussianCF(1.4), CompoundPoissonSymCF(3.0, 1.0)),
]


@pytest.mark.parametrize("cf", FINITE_VARIANCE_LAWS)
@pytest.mark.parametrize("r", [2.5, 3.0])
@pytest.mark.parametrize("m", [2, 4, 8, 16])
def test_forward_bound_holds(cf, r, m):
    check = clt_bound_check(cf, m, r=r)
    assert check.applicable
    assert check.holds
    assert check.lhs > 0.0
    assert check.rhs == pytest.approx(m ** -(r / 2.0 - 1.0) * check.base_distance)


def test_backward_bound_gaussian_is_trivial():
    check = backward_bound(GaussianCF(2.0), 4)
    assert check.lhs == 0.0 and check.rhs == 0.0 and check.holds


@pytest.mark.parametrize("m", [4, 16])
def test_backward_bound_holds(laplace_cf, m):
    check = backward_bound(laplace_cf, m, r=3.0)
    assert check.holds
    assert check.base_distance == pytest.approx(0.174, abs=1e-3)
    assert check.rhs == pytest.approx(math.sqrt(m) * check.base_distance)


def test_backward_bound_lhs_oracle(laplace_cf):
    check = backward_bound(laplace_cf, 4, r=3.0)
    lhs = oracle(lambda t: (1.0 + 4.0 * t * t) ** -0.25, lambda t: np.exp(-t * t))
    assert check.lhs == pytest.approx(lhs, abs=1e-4)
    assert check.lhs == pytest.approx(0.499055, abs=1e-4)
    assert check.rhs == pytest.approx(0.35, abs=5e-3)


def test_backward_bound_is_forward_bound_rearranged(laplace_cf):
    m = 4
    backward = backward_bound(laplace_cf, m)
    forward = clt_bound_check(root_rescale(laplace_cf, m), m)
    factor = m ** 0.5
    assert forward.rhs * factor == pytest.approx(backward.lhs, rel=1e-10)
    assert forward.lhs * factor == pytest.approx(backward.rhs, rel=1e-10)


def test_normalized_sum_approaches_gaussian(laplace_cf, gauss2):
    distances = [lambda_r(sum_rescale(laplace_cf, m), gauss2).value for m in (1, 4, 16)]
    assert distances[0] > distances[1] > distances[2]
