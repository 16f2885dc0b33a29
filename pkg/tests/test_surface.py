import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from isoprofile._expr import ExpressionError, compile_expression
from isoprofile.space_forms import SpaceForm, ball_volume
from isoprofile.surface import (SymmetricRegion, catalog_surface, cigar, curvature_inf,
                                curvature_sup, custom_surface, flare, gauss_curvature,
                                hyperbolic, load_surface, plane, pole_ball_area,
                                pole_ball_volume, pole_radius, region_perimeter,
                                region_truncate, region_volume, surface_from_config)

CATALOG = [plane(), hyperbolic(), cigar(), flare()]


def test_curvature_examples():
    assert gauss_curvature(plane(), 3.0) == 0.0
    assert gauss_curvature(hyperbolic(), 1.0) == pytest.approx(-1.0, rel=1e-12)
    assert gauss_curvature(cigar(), 0.0) == pytest.approx(2.0, rel=1e-9)
    assert gauss_curvature(cigar(), 1.0) == pytest.approx(2 / math.cosh(1) ** 2, rel=1e-12)
    assert gauss_curvature(flare(), 1.0) < 0
    assert flare().pole_curvature == pytest.approx(-6.0, rel=1e-8)


def test_curvature_bounds():
    assert curvature_sup(hyperbolic(), SymmetricRegion(((0.5, 1.0), (2.0, 3.0)))) == pytest.approx(-1.0)
    assert curvature_sup(cigar(), (0.0, 1.0)) == pytest.approx(2.0, rel=1e-9)
    assert curvature_inf(cigar(), (0.0, 1.0)) == pytest.approx(2 / math.cosh(1) ** 2, rel=1e-9)
    # the flare has K(0) = -6 and K decreasing, so the supremum is attained at the pole
    assert curvature_sup(flare(), (0.0, 2.0)) == pytest.approx(-6.0, rel=1e-8)
    with pytest.raises(ValueError):
        curvature_sup(plane(), SymmetricRegion())


def test_curvature_scan_agrees_with_hint():
    W = cigar()
    scanned = custom_surface("tanh(t)", "1 - tanh(t)^2", "-2*tanh(t)*(1 - tanh(t)^2)", T_num=5.0)
    for rng in [(0.0, 1.0), (0.3, 2.0), 1.5]:
        assert curvature_sup(scanned, rng) == pytest.approx(curvature_sup(W, rng), rel=1e-8)
        assert curvature_inf(scanned, rng) == pytest.approx(curvature_inf(W, rng), rel=1e-8)


def test_pole_ball_examples():
    assert pole_ball_volume(plane(), 1.0) == pytest.approx(math.pi)
    assert pole_ball_area(plane(), 1.0) == pytest.approx(2 * math.pi)
    assert pole_ball_volume(hyperbolic(), 1.0) == pytest.approx(2 * math.pi * (math.cosh(1) - 1), rel=1e-12)
    assert pole_ball_volume(cigar(), 1.0) == pytest.approx(2 * math.pi * math.log(math.cosh(1)), rel=1e-12)
    with pytest.raises(ValueError):
        pole_ball_volume(flare(), 3.5)


@pytest.mark.parametrize("W", CATALOG, ids=lambda W: W.catalog_id)
def test_volume_derivative_is_area(W):
    for R in np.linspace(0.1, min(2.5, 0.9 * W.T_num), 7):
        h = 1e-5
        fd = (pole_ball_volume(W, R + h) - pole_ball_volume(W, R - h)) / (2 * h)
        assert fd == pytest.approx(pole_ball_area(W, R), rel=1e-6)


@pytest.mark.parametrize("W", CATALOG, ids=lambda W: W.catalog_id)
def test_pole_radius_round_trip(W):
    for R in (0.01, 0.5, 1.0, 2.0):
        assert pole_radius(W, pole_ball_volume(W, R)) == pytest.approx(R, rel=1e-12)


def test_constant_curvature_matches_space_form():
    for R in (0.2, 1.0, 3.0):
        assert pole_ball_volume(hyperbolic(), R) == pytest.approx(ball_volume(SpaceForm(-1.0), R), rel=1e-12)


def test_custom_surface_matches_catalog():
    W = custom_surface("sinh(t)", "cosh(t)", "sinh(t)", T_num=5.0)
    for R in (0.3, 1.0, 4.0):
        assert pole_ball_volume(W, R) == pytest.approx(pole_ball_volume(hyperbolic(), R), rel=1e-10)


def test_custom_surface_validation():
    with pytest.raises(ValueError):
        custom_surface("t + 1", "1", "0")  # no smooth pole
    with pytest.raises(ExpressionError):
        compile_expression("__import__('os')")
    with pytest.raises(ExpressionError):
        compile_expression("t +* 2")


def test_config_loading(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"catalog": "cigar", "T_num": 10}))
    W = load_surface(path)
    assert W.catalog_id == "cigar" and W.T_num == 10
    with pytest.raises(ValueError):
        surface_from_config({"name": "cigar"})
    with pytest.raises(ValueError):
        catalog_surface("torus")
    W = surface_from_config({"catalog": "custom", "warp": {"phi": "t", "dphi": "1", "ddphi": "0"}})
    assert pole_ball_volume(W, 1.0) == pytest.approx(math.pi)


def test_region_examples():
    P, H = plane(), hyperbolic()
    assert region_volume(P, SymmetricRegion.disk(1.0)) == pytest.approx(math.pi)
    assert region_perimeter(P, SymmetricRegion.disk(1.0)) == pytest.approx(2 * math.pi)
    ann = SymmetricRegion(((1.0, 2.0),))
    assert region_volume(P, ann) == pytest.approx(3 * math.pi)
    assert region_perimeter(P, ann) == pytest.approx(6 * math.pi)
    S = SymmetricRegion(((0.0, 1.0), (2.0, 3.0)))
    c, s = math.cosh, math.sinh
    assert region_volume(H, S) == pytest.approx(2 * math.pi * (c(1) - 1 + c(3) - c(2)), rel=1e-12)
    assert region_perimeter(H, S) == pytest.approx(2 * math.pi * (s(1) + s(2) + s(3)), rel=1e-12)


def test_region_truncate_examples():
    P = plane()
    R, sl = region_truncate(P, SymmetricRegion.disk(2.0), 1.0)
    assert R.intervals == ((0.0, 1.0),) and sl == pytest.approx(2 * math.pi)
    R, sl = region_truncate(P, SymmetricRegion.disk(0.5), 1.0)
    assert R.intervals == ((0.0, 0.5),) and sl == 0.0
    R, sl = region_truncate(P, SymmetricRegion(((1.0, 2.0),)), 1.0)
    assert R.is_empty and sl == 0.0


def test_region_validation():
    assert SymmetricRegion(((1.0, 1.0),)).is_empty
    with pytest.raises(ValueError):
        SymmetricRegion(((0.0, 1.0), (1.0, 2.0)))
    with pytest.raises(ValueError):
        SymmetricRegion(((-1.0, 1.0),))
    with pytest.raises(ValueError):
        region_volume(flare(), SymmetricRegion.disk(4.0))


interval_lists = st.lists(st.floats(0.0, 4.0), min_size=2, max_size=8, unique=True).map(
    lambda xs: sorted(xs)).filter(lambda xs: min(np.diff(xs)) > 1e-6)


@given(interval_lists, st.sampled_from(CATALOG[:3]))
def test_region_additivity(edges, W):
    if len(edges) % 2:
        edges = edges[:-1]
    ivs = [(edges[i], edges[i + 1]) for i in range(0, len(edges), 2)]
    S = SymmetricRegion(tuple(ivs))
    parts = [SymmetricRegion((iv,)) for iv in ivs]
    assert region_volume(W, S) == pytest.approx(sum(region_volume(W, p) for p in parts), rel=1e-12)
    assert region_perimeter(W, S) == pytest.approx(sum(region_perimeter(W, p) for p in parts), rel=1e-12)


@given(interval_lists, st.floats(0.1, 4.0))
def test_truncation_volume_and_perimeter(edges, rho):
    if len(edges) % 2:
        edges = edges[:-1]
    W = hyperbolic()
    S = SymmetricRegion(tuple((edges[i], edges[i + 1]) for i in range(0, len(edges), 2)))
    T, sl = region_truncate(W, S, rho)
    assert region_volume(W, T) <= region_volume(W, S) + 1e-12
    assert all(b <= rho for _, b in T.intervals)
    cut = any(a < rho < b for a, b in S.intervals)
    assert (sl > 0) == cut
