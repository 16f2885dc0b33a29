import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from isoprofile.placement import (PlacementScenario, find_witness, fubini_average_check,
                                  lambda_bound, scenario_from_config, uncovered_measure)
from isoprofile.space_forms import SpaceForm, ball_volume
from isoprofile.surface import SymmetricRegion, cigar, hyperbolic, plane

P, H = plane(), hyperbolic()


def flat_empty():
    return PlacementScenario(P, SymmetricRegion(), 1.0, 3.0, 1.0)


def flat_ball():
    return PlacementScenario(P, SymmetricRegion.disk(1.0), 2.0, 4.0, 1.0)


def hyp_ball():
    return PlacementScenario(H, SymmetricRegion.disk(1.0), 2.0, 4.0, 1.0)


HYP_LAMBDA = ((math.cosh(2) - math.cosh(1)) / (math.cosh(4) - 1)
              * 2 * math.pi * (math.cosh(0.5) - 1))


@pytest.mark.parametrize("make, expected", [
    (flat_empty, math.pi / 36),
    (flat_ball, 3 * math.pi / 64),
    (hyp_ball, HYP_LAMBDA),
])
def test_lambda_closed_forms(make, expected):
    assert lambda_bound(make(), 0.5) == pytest.approx(expected, rel=1e-9)


def test_hyperbolic_lambda_value():
    assert HYP_LAMBDA == pytest.approx(0.06764, abs=5e-6)


def test_delta_defaults_to_curvature_sup():
    assert flat_ball().delta == 0.0
    assert hyp_ball().delta == pytest.approx(-1.0)
    assert flat_ball().inj_bound == math.inf


def test_cigar_radius_cap_uses_conjugate_bound():
    sc = PlacementScenario(cigar(), SymmetricRegion(), 1.0, 3.0, 1.5)
    # sup K = 2 at the pole: pi / sqrt 2 < r0 would not bind, r0 = 1.5 does
    assert sc.inj_bound == pytest.approx(math.pi / math.sqrt(2))
    assert sc.radius_cap == pytest.approx(1.5)


@pytest.mark.parametrize("kwargs, msg", [
    (dict(b=2.0, dD=4.0, r0=2.5), "r0"),
    (dict(b=3.0, dD=2.0, r0=0.5), "b < dD"),
])
def test_invalid_scenarios(kwargs, msg):
    with pytest.raises(ValueError, match=msg):
        PlacementScenario(P, SymmetricRegion(), **kwargs)


def test_E_too_large_rejected():
    with pytest.raises(ValueError, match="positive"):
        PlacementScenario(P, SymmetricRegion.disk(2.5), 2.0, 4.0, 1.0)


@pytest.mark.parametrize("r", [0.0, -0.1, 1.0, 2.0])
def test_inadmissible_radius(r):
    with pytest.raises(ValueError, match="admissible"):
        lambda_bound(flat_ball(), r)


@given(st.floats(0.01, 0.98), st.floats(0.01, 0.98))
def test_lambda_increasing_and_below_model_volume(r1, r2):
    sc = hyp_ball()
    a, b = sorted((r1, r2))
    if b - a < 1e-6:
        return
    assert lambda_bound(sc, a) < lambda_bound(sc, b)
    assert lambda_bound(sc, b) <= ball_volume(SpaceForm(sc.delta, 2), b)


def test_lambda_vanishes_at_zero():
    assert lambda_bound(flat_ball(), 1e-6) < 1e-12


@pytest.mark.parametrize("make, measured", [
    (flat_empty, math.pi / 4),
    (flat_ball, math.pi / 4),
    (hyp_ball, 2 * math.pi * (math.cosh(0.5) - 1)),
])
def test_find_witness(make, measured):
    res = find_witness(make(), 0.5, grid_density=12, mc_samples=20_000, seed=3)
    assert res.passed
    assert res.measured == pytest.approx(measured, rel=0.02)
    assert res.measured - 3 * res.sigma >= res.lam


def test_witness_avoids_E():
    res = find_witness(flat_ball(), 0.5, grid_density=12, mc_samples=20_000, seed=0)
    assert res.x_t >= 1.5 - 1e-9


def test_witness_deterministic():
    a = find_witness(hyp_ball(), 0.5, 8, 5_000, 11)
    b = find_witness(hyp_ball(), 0.5, 8, 5_000, 11)
    assert a == b


@pytest.mark.parametrize("make", [flat_empty, flat_ball, hyp_ball])
def test_fubini_average(make):
    res = fubini_average_check(make(), 0.5, grid_density=16, mc_samples=20_000, seed=1)
    assert res.passed
    assert res.mean + 3 * res.sigma >= res.bound


def test_fubini_empty_E_is_constant():
    res = fubini_average_check(flat_empty(), 0.5, grid_density=8, mc_samples=8_000, seed=2)
    assert res.mean == pytest.approx(math.pi / 4, rel=0.05)


def test_sigma_scaling():
    sc = flat_ball()
    _, s1 = uncovered_measure(sc, 1.0, 0.5, 20_000, 0)
    _, s2 = uncovered_measure(sc, 1.0, 0.5, 40_000, 0)
    assert s2 / s1 == pytest.approx(1 / math.sqrt(2), rel=0.2)


def test_scenario_from_config():
    sc = scenario_from_config({"surface": {"catalog": "plane"}, "E": [[0, 1]],
                               "B": 2, "D": 4, "r0": 1})
    assert lambda_bound(sc, 0.5) == pytest.approx(3 * math.pi / 64)
    with pytest.raises(ValueError, match="missing key"):
        scenario_from_config({"surface": {"catalog": "plane"}, "B": 2, "D": 4})


def test_mc_measure_partially_covered():
    # ball of radius 0.5 centred at t=1 straddles the unit disk: half-ish is outside
    est, sig = uncovered_measure(flat_ball(), 1.0, 0.5, 50_000, 0)
    assert 0.3 < est < 0.5 and sig < 0.01
    assert np.isfinite(est)
