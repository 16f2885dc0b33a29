import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isoprofile.geodesics import (ExpBall, GeodesicState, cmc_arc_shoot, exp_ball,
                                  geodesic_integrate, offset_ball_measure)
from isoprofile.space_forms import SpaceForm, ball_area, ball_volume
from isoprofile.surface import (SymmetricRegion, cigar, curvature_inf, curvature_sup, flare,
                                hyperbolic, plane, pole_ball_area, pole_ball_volume)


def test_radial_ray_in_plane():
    traj = geodesic_integrate(plane(), GeodesicState.from_angle(plane(), 1.0, 0.3, 0.0), 2.0)
    ts = np.array([st.t for st in traj.states])
    assert np.allclose(ts, 1.0 + traj.s, atol=1e-10)


def test_tangent_line_in_plane():
    P = plane()
    start = GeodesicState.from_angle(P, 1.0, 0.0, math.pi / 2)
    traj = geodesic_integrate(P, start, 3.0, n_out=301)
    ts = traj.radius(traj.s)
    assert ts.min() == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(ts, np.sqrt(1 + traj.s**2), atol=1e-9)


def test_clairaut_conservation_hyperbolic():
    H = hyperbolic()
    traj = geodesic_integrate(H, GeodesicState.from_angle(H, 1.0, 0.0, math.pi / 2), 5.0)
    c = traj.clairaut()
    assert c[0] == pytest.approx(math.sinh(1.0), rel=1e-12)
    assert np.max(np.abs(c - c[0])) < 1e-8 * 5.0
    assert np.max(traj.speed_error()) < 1e-8


@pytest.mark.parametrize("W", [hyperbolic(), cigar(), flare()], ids=lambda W: W.catalog_id)
def test_geodesics_through_the_pole_are_smooth(W):
    # start near the pole heading across it: Clairaut constant ~ 0 and stays so
    start = GeodesicState.from_angle(W, 0.3, 0.0, math.pi - 1e-3)
    traj = geodesic_integrate(W, start, 0.6)
    c = traj.clairaut()
    assert np.max(np.abs(c - c[0])) < 1e-9
    assert np.max(traj.speed_error()) < 1e-8


def test_leaving_domain_raises():
    F = flare()
    with pytest.raises(ValueError):
        geodesic_integrate(F, GeodesicState.from_angle(F, 1.0, 0.0, 0.0), 5.0)


def test_cmc_flat_circle():
    P = plane()
    arc = cmc_arc_shoot(P, 1.0, GeodesicState.from_angle(P, 2.0, 0.4, 0.7))
    assert arc.stop == "closure"
    assert arc.length == pytest.approx(2 * math.pi, rel=1e-9)
    assert abs(arc.swept_area) == pytest.approx(math.pi, rel=1e-8)


def test_cmc_hyperbolic_circle():
    H = hyperbolic()
    h = 1 / math.tanh(1.0)
    arc = cmc_arc_shoot(H, h, GeodesicState.from_angle(H, 1.5, 0.0, 1.1))
    assert arc.length == pytest.approx(2 * math.pi * math.sinh(1), rel=1e-8)
    assert abs(arc.swept_area) == pytest.approx(2 * math.pi * (math.cosh(1) - 1), rel=1e-7)


def test_cmc_zero_curvature_is_geodesic():
    H = hyperbolic()
    start = GeodesicState.from_angle(H, 1.0, 0.2, 2.0)
    arc = cmc_arc_shoot(H, 0.0, start, stop="max_length", max_length=3.0, n_out=31)
    geo = geodesic_integrate(H, start, 3.0, n_out=31)
    for a, b in zip(arc.trajectory.states, geo.states):
        assert a.t == pytest.approx(b.t, abs=1e-9)
        assert math.cos(a.theta - b.theta) == pytest.approx(1.0, abs=1e-12)


def test_cmc_boundary_stop():
    P = plane()
    arc = cmc_arc_shoot(P, 0.0, GeodesicState.from_angle(P, 0.5, 0.0, 0.0), stop="boundary", rho=2.0)
    assert arc.stop == "boundary"
    assert arc.length == pytest.approx(1.5, rel=1e-10)
    with pytest.raises(ValueError):
        cmc_arc_shoot(P, 0.0, GeodesicState.from_angle(P, 0.5, 0.0, 0.0), stop="nowhere")


@pytest.mark.parametrize("W, t0, s, expected", [
    (plane(), 3.0, 0.5, math.pi / 4),
    (hyperbolic(), 2.0, 0.5, 2 * math.pi * (math.cosh(0.5) - 1)),
    (cigar(), 0.0, 1.0, 2 * math.pi * math.log(math.cosh(1))),
], ids=["plane", "hyperbolic", "cigar-pole"])
def test_offset_ball_examples(W, t0, s, expected):
    est, sig = offset_ball_measure(W, (t0, 0.0), s, 100_000, seed=3)
    assert abs(est - expected) <= 3 * sig + 1e-12
    assert exp_ball(W, t0, s).volume() == pytest.approx(expected, rel=1e-9)


def test_exp_ball_at_pole_matches_pole_ball():
    for W in (cigar(), flare()):
        ball = ExpBall(W, 0.0, 0.8)
        assert ball.volume() == pytest.approx(pole_ball_volume(W, 0.8), rel=1e-9)
        assert ball.boundary_length() == pytest.approx(pole_ball_area(W, 0.8), rel=1e-9)
        assert ball.volume_at(0.5) == pytest.approx(pole_ball_volume(W, 0.5), rel=1e-9)


def test_exp_ball_exact_outside_measure_flat_lens():
    ball = exp_ball(plane(), 1.2, 0.5)
    E = SymmetricRegion.disk(1.0)
    # |B(x, s) \ D(1)| with |x| = 1.2: flat disk minus lens
    d, r1, r2 = 1.2, 1.0, 0.5
    a1 = r1**2 * math.acos((d * d + r1 * r1 - r2 * r2) / (2 * d * r1))
    a2 = r2**2 * math.acos((d * d + r2 * r2 - r1 * r1) / (2 * d * r2))
    k = 0.5 * math.sqrt((-d + r1 + r2) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2))
    expected = math.pi * r2**2 - (a1 + a2 - k)
    assert ball.measure_outside_exact(E) == pytest.approx(expected, abs=5e-5)


def test_ball_rejections():
    with pytest.raises(ValueError):
        ExpBall(flare(), 2.5, 1.0)  # leaves the domain
    with pytest.raises(ValueError):
        ExpBall(cigar(), 0.0, 2.5)  # beyond pi / sqrt(sup K)


def test_sigma_scaling():
    ball = exp_ball(hyperbolic(), 1.0, 0.5)
    E = SymmetricRegion.disk(1.0)
    _, s1 = ball.measure(50_000, 1, outside=E)
    _, s2 = ball.measure(100_000, 1, outside=E)
    assert s2 / s1 == pytest.approx(1 / math.sqrt(2), rel=0.2)


@settings(max_examples=12)
@given(st.sampled_from(["plane", "hyperbolic", "cigar", "flare"]), st.floats(0.0, 1.0),
       st.floats(0.1, 0.8), st.integers(0, 2**31))
def test_gunther_bishop_sandwich(name, frac, s, seed):
    W = {"plane": plane, "hyperbolic": hyperbolic, "cigar": cigar, "flare": flare}[name]()
    t0 = frac * (min(2.0, W.T_num - 1.0))
    lo, hi = max(0.0, t0 - s), t0 + s
    k_plus, k_minus = curvature_sup(W, (lo, hi)), curvature_inf(W, (lo, hi))
    est, sig = offset_ball_measure(W, (t0, 0.0), s, 50_000, seed)
    # 5 sigma: many independent draws per run, each compared twice
    assert ball_volume(SpaceForm(k_plus), s) - 5 * sig - 1e-9 <= est
    assert est <= ball_volume(SpaceForm(k_minus), s) + 5 * sig + 1e-9
    exact = exp_ball(W, t0, s)
    assert ball_volume(SpaceForm(k_plus), s) * (1 - 1e-9) <= exact.volume()
    assert exact.volume() <= ball_volume(SpaceForm(k_minus), s) * (1 + 1e-9)
    assert exact.boundary_length() <= ball_area(SpaceForm(k_minus), s) * (1 + 1e-9)
