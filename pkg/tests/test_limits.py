import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra.numpy import arrays

from isoprofile.limits import (MonotoneFamily, default_probes, left_continuity_check,
                               load_family, pointwise_limit, remark_family, remark_limit,
                               remark_report, right_continuity_check)


@pytest.mark.parametrize("i, x, expected", [(5, 0.0, 1.0), (5, -0.1, 0.5), (5, -1.0, 0.0),
                                            (5, 2.0, 1.0), (1, -0.25, 0.75)])
def test_remark_family_values(i, x, expected):
    assert remark_family(i, x) == pytest.approx(expected)


def test_remark_family_bad_index():
    with pytest.raises(ValueError):
        remark_family(0, 0.0)


def test_constant_family():
    fam = MonotoneFamily.from_function(lambda i, x: np.full_like(x, 3.0), np.linspace(0, 1, 11), 4)
    lim = pointwise_limit(fam)
    assert np.all(lim.y == 3.0) and np.all(lim.tail == 0.0)


def test_shifted_family():
    m = 50
    x = np.linspace(0, 1, 21)
    lim = pointwise_limit(MonotoneFamily.from_function(lambda i, x: x + 1 / i, x, m))
    assert np.allclose(lim.y, x + 1 / m)
    assert np.allclose(lim.tail, 1 / (m - 1) - 1 / m)
    assert lim.flagged.all()  # tail ~ 4e-4 exceeds the default 1e-6


def test_tail_flagging():
    x = np.linspace(0, 1, 5)
    lim = pointwise_limit(MonotoneFamily.from_function(lambda i, x: x + 1 / i, x, 10), 1e-6)
    assert lim.flagged.all()


def test_remark_limit_at_sample_point():
    x = np.linspace(-1, 1, 201)
    lim = pointwise_limit(MonotoneFamily.from_function(remark_family, x, 10))
    assert lim(-0.5)[0] == 0.0
    assert lim(0.0)[0] == 1.0
    with pytest.raises(KeyError):
        lim(0.123456)


def test_rows_must_be_nondecreasing():
    with pytest.raises(ValueError, match="decreases"):
        MonotoneFamily([0.0, 1.0], [[1.0, 0.0]])


def test_rows_must_decrease_in_index():
    with pytest.raises(ValueError, match="f_2 > f_1"):
        MonotoneFamily([0.0, 1.0], [[0.0, 1.0], [0.5, 1.0]])


def test_grid_must_increase():
    with pytest.raises(ValueError):
        MonotoneFamily([1.0, 0.0], [[0.0, 1.0]])


def test_right_continuity_at_zero():
    rep = right_continuity_check(remark_limit, 0.0, [2.0 ** -k for k in range(1, 13)])
    assert rep.passed and max(rep.gaps) == 0.0


def test_left_continuity_fails_at_zero():
    rep = left_continuity_check(remark_limit, 0.0)
    assert not rep.passed and rep.gap == 1.0


def test_flat_profile_continuous():
    g = lambda v: 2 * math.sqrt(math.pi * v)  # noqa: E731
    for v0 in (0.5, 1.0, 7.0):
        assert right_continuity_check(g, v0).passed
        assert left_continuity_check(g, v0).passed


def test_probe_validation():
    with pytest.raises(ValueError):
        right_continuity_check(remark_limit, 0.0, [0.1, 0.2])
    assert default_probes()[0] == 0.5 and len(default_probes()) == 13


def test_remark_report():
    rep = remark_report()
    assert rep["pass"] and rep["limit_matches_indicator"]
    assert rep["right"]["pass"] and not rep["left"]["pass"]
    assert rep["left"]["final_gap"] == 1.0


@given(arrays(float, (4, 12), elements=st.floats(0, 1)))
def test_limit_preserves_order(raw):
    # sort rows along x, then along i in reverse to satisfy both invariants
    rows = np.sort(np.sort(raw, axis=1), axis=0)[::-1]
    fam = MonotoneFamily(np.arange(12.0), rows)
    lim = pointwise_limit(fam)
    assert np.all(np.diff(lim.y) >= 0)


@given(st.integers(2, 200), st.floats(0.05, 0.95))
def test_discrete_right_continuity(m, x0):
    # limit of continuous rows x^2 + 1/i: tail is 1/(m-1) - 1/m, and the limit is continuous
    x = np.linspace(0, 1, 101)
    lim = pointwise_limit(MonotoneFamily.from_function(lambda i, x: x * x + 1 / i, x, m))
    g = lambda t: float(np.interp(t, lim.x, lim.y))  # noqa: E731
    h0 = 0.5 * min(x0, 1 - x0)
    assert right_continuity_check(g, x0, default_probes(h0)).passed


def test_load_family_csv(tmp_path):
    p = tmp_path / "fam.csv"
    p.write_text("# grid then rows\n0,0.5,1\n2,3,4\n1,2,3\n")
    fam = load_family(p)
    assert fam.m == 2 and np.allclose(pointwise_limit(fam).y, [1, 2, 3])


def test_load_family_too_short(tmp_path):
    p = tmp_path / "fam.csv"
    p.write_text("0,1\n")
    with pytest.raises(ValueError):
        load_family(p)


def test_extrapolated_gap():
    from isoprofile.limits import extrapolated_gap
    assert extrapolated_gap([0.3 + 2.0 ** -k for k in range(10)]) == pytest.approx(0.3)
    assert extrapolated_gap([1.0, 1.0, 1.0]) == 1.0
    assert extrapolated_gap([0.0, 0.0, 0.0]) == 0.0


def test_final_gap_rule_is_stricter():
    g = lambda v: 2 * math.sqrt(math.pi * v)  # noqa: E731
    rep = right_continuity_check(g, 1.0, rule="final")
    assert not rep.passed and rep.gap > 1e-5
    assert right_continuity_check(g, 1.0, default_probes(1e-4), rule="final").passed


def test_sqrt_cusp_is_continuous():
    # Hoelder-1/2 at the origin: gaps ~ sqrt(h) still extrapolate to 0
    rep = right_continuity_check(lambda x: math.sqrt(abs(x)), 0.0)
    assert rep.passed
