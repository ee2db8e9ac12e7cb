import math

import numpy as np
import pytest

from core.errors import InputError
from core.laplace_core import (Drift, GammaSub, LaplaceTransform, PoissonSub, StableSub, default_s_grid,
                               estimate_drift, evaluate_L, family_from_name, limit_deviation_L,
                               multiply, root_rescale_L, shape_check, support_touches_zero)


def test_closed_form_values():
    assert evaluate_L(GammaSub(1.0), 1.0) == pytest.approx(0.5)
    assert evaluate_L(Drift(2.0), 3.0) == pytest.approx(2.4788e-3, rel=1e-4)
    assert evaluate_L(PoissonSub(1.0), 10.0) == pytest.approx(0.367896, abs=1e-6)


@pytest.mark.parametrize("s", [0.0, -1.0, float("nan"), float("inf")])
def test_s_must_be_positive_and_finite(s):
    with pytest.raises(InputError):
        GammaSub(1.0).evaluate(s)


def test_stable_subordinator_index_below_one():
    with pytest.raises(InputError):
        StableSub(1.0)


def test_root_rescale_closed_forms():
    assert root_rescale_L(GammaSub(1.0), 4).evaluate(1.0) == pytest.approx(0.668740, abs=1e-6)
    assert root_rescale_L(StableSub(0.5), 4).evaluate(1.0) == pytest.approx(0.60653, abs=1e-5)


@pytest.mark.parametrize("m", [1, 3, 1000])
def test_drift_is_a_fixed_point(m):
    s = default_s_grid(10.0, 200)
    gap = np.abs(root_rescale_L(Drift(2.0), m).evaluate(s) - Drift(2.0).evaluate(s))
    assert gap.max() < 1e-12


def test_root_rescale_semigroup():
    s = default_s_grid(100.0, 300)
    lt = multiply(GammaSub(1.5), PoissonSub(2.0))
    nested = root_rescale_L(root_rescale_L(lt, 3), 5).evaluate(s)
    direct = root_rescale_L(lt, 15).evaluate(s)
    assert np.max(np.abs(nested - direct)) < 1e-12


def test_multiply_flattens():
    lt = multiply(multiply(Drift(1.0), GammaSub(1.0)), PoissonSub(1.0))
    assert len(lt.factors) == 3
    assert lt.evaluate(1.0) == pytest.approx(math.exp(-1.0) * 0.5 * math.exp(math.expm1(-1.0)))


def test_drift_estimates():
    exact = estimate_drift(Drift(2.0))
    assert exact.sigma_hat == 2.0
    assert all(v == pytest.approx(2.0) for v in exact.values)

    gamma = estimate_drift(GammaSub(1.0))
    assert gamma.sigma_hat == pytest.approx(math.log1p(1e4) / 1e4)
    assert gamma.error_bound > gamma.sigma_hat

    schedule = np.geomspace(1.0, 1e3, 7)
    mixed = estimate_drift(multiply(Drift(0.5), PoissonSub(2.0)), schedule)
    assert mixed.sigma_hat == pytest.approx(0.5, abs=2.5e-3)


@pytest.mark.parametrize("lt,touches", [
    (GammaSub(2.0), True),
    (GammaSub(1.0), True),
    (Drift(0.0), True),
    (PoissonSub(3.0), True),
    (multiply(Drift(1.0), GammaSub(1.0)), False),
    (Drift(2.0), False),
])
def test_support_touches_zero(lt, touches):
    assert support_touches_zero(lt, tol=1e-4).touches_zero is touches


def test_support_reports_the_drift():
    decision = support_touches_zero(multiply(Drift(1.0), GammaSub(1.0)))
    assert decision.sigma_hat == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("m", [100, 10_000])
def test_gamma_limit_deviation_matches_closed_form(m):
    deviation = limit_deviation_L(GammaSub(1.0), m, 10.0)
    assert deviation.limit_coefficient == 0.0
    assert deviation.value == pytest.approx(1.0 - (1.0 + 10.0 * m) ** (-1.0 / m), abs=1e-9)


def test_gamma_limit_deviation_decreases():
    values = [limit_deviation_L(GammaSub(1.0), m, 10.0).value for m in (10, 100, 1000, 10_000)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[1] == pytest.approx(0.0668, abs=1e-4)


@pytest.mark.parametrize("m", [100, 10_000])
def test_drift_plus_gamma_converges_to_drift(m):
    lt = multiply(Drift(1.0), GammaSub(1.0))
    deviation = limit_deviation_L(lt, m, 10.0)
    assert deviation.limit_coefficient == 1.0
    s = deviation.grid
    oracle = np.max(np.exp(-s) * (1.0 - (1.0 + m * s) ** (-1.0 / m)))
    assert deviation.value == pytest.approx(oracle, abs=1e-12)


def test_drift_plus_gamma_deviation_decreases():
    lt = multiply(Drift(2.0), GammaSub(1.0))
    values = [limit_deviation_L(lt, m, 10.0).value for m in (10, 100, 1000, 10_000)]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] < 1e-3


@pytest.mark.parametrize("lt", [PoissonSub(3.0), StableSub(0.5)])
def test_zero_drift_deviation_decreases(lt):
    values = [limit_deviation_L(lt, m, 10.0).value for m in (10, 100, 1000)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_exact_drifts():
    assert Drift(2.0).drift == 2.0
    for lt in (GammaSub(1.0), PoissonSub(2.0), StableSub(0.5)):
        assert lt.drift == 0.0
    assert multiply(Drift(0.5), multiply(Drift(1.5), GammaSub(1.0))).drift == 2.0
    assert PoissonSub(2.0).to_canonical().drift == 0.0


@pytest.mark.parametrize("lt", [Drift(1.5), GammaSub(2.0), multiply(Drift(0.5), PoissonSub(2.0))])
@pytest.mark.parametrize("m", [2, 10, 1000])
def test_root_rescale_keeps_the_drift(lt, m):
    rescaled = root_rescale_L(lt, m)
    assert rescaled.drift == lt.drift
    # -log L_m(s) / s still tends to the drift
    assert estimate_drift(rescaled).sigma_hat == pytest.approx(lt.drift, abs=2e-3)


class OpaqueDriftedGamma(LaplaceTransform):
    """exp(-sigma s) (1 + s)^-1 with no drift attribute"""
    kind = "opaque"

    def __init__(self, sigma):
        self.sigma = sigma

    def _log(self, s):
        return -self.sigma * s - np.log1p(s)


def test_limit_reference_falls_back_to_the_estimate():
    lt = OpaqueDriftedGamma(1.0)
    assert lt.drift is None
    deviation = limit_deviation_L(lt, 100, 10.0)
    assert deviation.limit_coefficient == pytest.approx(1.0, abs=2e-3)
    assert deviation.limit_coefficient == estimate_drift(lt).sigma_hat
    assert multiply(lt, GammaSub(1.0)).drift is None


def test_drift_limit_deviation_is_zero():
    assert limit_deviation_L(Drift(2.0), 50, 10.0).value < 1e-12


def test_canonical_encodings_round_trip():
    s = default_s_grid(20.0, 100)
    for lt in (PoissonSub(2.5), Drift(0.7)):
        canonical = lt.to_canonical()
        assert np.max(np.abs(canonical.evaluate(s) - lt.evaluate(s))) < 1e-12


@pytest.mark.parametrize("lt", [GammaSub(0.5), PoissonSub(2.0), StableSub(0.3), Drift(0.5),
                                multiply(Drift(0.5), GammaSub(2.0))])
def test_shape_check_passes_for_subordinators(lt):
    assert shape_check(lt).passed


@pytest.mark.parametrize("lt", [GammaSub(0.5), PoissonSub(2.0), StableSub(0.3),
                                multiply(Drift(0.2), GammaSub(2.0))])
@pytest.mark.parametrize("m", [2, 10, 100])
def test_shape_check_passes_after_root_rescale(lt, m):
    check = shape_check(root_rescale_L(lt, m), default_s_grid(100.0, 512))
    assert check.passed
    assert check.grid_size == 512


def test_shape_check_rejects_underflow():
    # exp(-1000) is 0.0 in double precision
    check = shape_check(Drift(1.0), default_s_grid(1e3, 64))
    assert not check.positive
    assert not check.passed
    assert shape_check(Drift(1.0), default_s_grid(100.0, 64)).positive


def test_grid_validation():
    with pytest.raises(InputError):
        default_s_grid(1.0, 100, 2.0)
    with pytest.raises(InputError):
        estimate_drift(GammaSub(1.0), [1.0, 2.0, 3.0])


def test_family_from_name():
    assert isinstance(family_from_name("gamma", shape=1.0), GammaSub)
    with pytest.raises(InputError):
        family_from_name("beta")
    with pytest.raises(InputError):
        family_from_name("drift", sigma=1.0, rate=2.0)
