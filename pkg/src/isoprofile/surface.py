"""Rotationally symmetric surfaces ``dt^2 + phi(t)^2 dtheta^2`` with a smooth pole.

The surface stands in for the abstract complete manifold: ``t`` is the
distance to the pole ``x0`` and the sublevel sets of any radial exhaustion
are pole balls.  Sets are represented by :class:`SymmetricRegion`, a finite
union of closed annuli, whose volume and perimeter are exact.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np
from scipy import integrate, interpolate, optimize

from ._expr import compile_expression

TWO_PI = 2 * math.pi
POLE_EPS = 1e-6

CATALOG = ("plane", "hyperbolic", "cigar", "flare", "custom")


def _log_cosh(t):
    t = np.abs(t)
    return t + np.log1p(np.exp(-2 * t)) - math.log(2.0)


def _sech2(t):
    return 1.0 / np.cosh(t) ** 2


@dataclass(frozen=True, eq=False)
class WarpedSurface:
    """Surface of revolution given by its warping function and two derivatives.

    ``Phi`` is the antiderivative of ``phi`` vanishing at 0; when omitted it is
    tabulated by quadrature.  ``monotone_curvature`` is a hint: ``"const"``,
    ``"decreasing"`` or ``None`` (no hint, sample densely).
    """

    catalog_id: str
    phi: Callable
    dphi: Callable
    ddphi: Callable
    T: float = math.inf
    T_num: float = 20.0
    Phi: Optional[Callable] = None
    params: dict = field(default_factory=dict)
    monotone_curvature: Optional[str] = None

    def __post_init__(self):
        if self.catalog_id not in CATALOG:
            raise ValueError(f"unknown catalog id {self.catalog_id!r}")
        if not 0 < self.T_num <= self.T:
            raise ValueError("need 0 < T_num <= T")

    def __repr__(self):
        return f"WarpedSurface({self.catalog_id!r}, T_num={self.T_num})"

    @property
    def name(self) -> str:
        return self.catalog_id

    def check_t(self, t, what="t"):
        if not (0 <= t < self.T) or t > self.T_num:
            raise ValueError(f"{what}={t} outside the numerical domain [0, {self.T_num}]")

    @cached_property
    def _Phi_table(self):
        # cumulative quadrature of phi, for surfaces without a closed-form Phi
        grid = np.linspace(0.0, self.T_num, 4097)
        vals = np.zeros_like(grid)
        for i in range(1, len(grid)):
            seg, _ = integrate.quad(self.phi, grid[i - 1], grid[i], epsabs=1e-14, epsrel=1e-13)
            vals[i] = vals[i - 1] + seg
        return interpolate.CubicHermiteSpline(grid, vals, self.phi(grid))

    def antiderivative(self, t):
        """Phi(t) = int_0^t phi."""
        if self.Phi is not None:
            return self.Phi(t)
        return self._Phi_table(t)

    @cached_property
    def pole_curvature(self) -> float:
        """K(0) = -phi'''(0), by Richardson extrapolation of -phi''/phi."""
        e = 1e-3
        k1 = -self.ddphi(e) / self.phi(e)
        k2 = -self.ddphi(e / 2) / self.phi(e / 2)
        return float((4 * k2 - k1) / 3)


def plane(T_num: float = 100.0) -> WarpedSurface:
    return WarpedSurface(
        "plane",
        phi=lambda t: t * 1.0,
        dphi=lambda t: np.ones_like(t, dtype=float) if np.ndim(t) else 1.0,
        ddphi=lambda t: np.zeros_like(t, dtype=float) if np.ndim(t) else 0.0,
        Phi=lambda t: 0.5 * t * t,
        T_num=T_num,
        monotone_curvature="const",
    )


def hyperbolic(T_num: float = 20.0) -> WarpedSurface:
    return WarpedSurface(
        "hyperbolic",
        phi=np.sinh,
        dphi=np.cosh,
        ddphi=np.sinh,
        Phi=lambda t: 2 * np.sinh(t / 2) ** 2,
        T_num=T_num,
        monotone_curvature="const",
    )


def cigar(T_num: float = 50.0) -> WarpedSurface:
    return WarpedSurface(
        "cigar",
        phi=np.tanh,
        dphi=_sech2,
        ddphi=lambda t: -2 * _sech2(t) * np.tanh(t),
        Phi=_log_cosh,
        T_num=T_num,
        monotone_curvature="decreasing",
    )


def _flare_Phi(t):
    s = t * t
    return 0.5 * s + 0.5 * (s * np.exp(s) - np.expm1(s))


def flare(T_num: float = 3.0) -> WarpedSurface:
    return WarpedSurface(
        "flare",
        phi=lambda t: t + t**3 * np.exp(t * t),
        dphi=lambda t: 1 + (3 * t**2 + 2 * t**4) * np.exp(t * t),
        ddphi=lambda t: np.exp(t * t) * (6 * t + 14 * t**3 + 4 * t**5),
        Phi=_flare_Phi,
        T_num=T_num,
        monotone_curvature="decreasing",
    )


_FACTORIES = {"plane": plane, "hyperbolic": hyperbolic, "cigar": cigar, "flare": flare}
CATALOG_NAMES = tuple(_FACTORIES)


def catalog_surface(name: str, T_num: Optional[float] = None) -> WarpedSurface:
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise ValueError(f"unknown catalog surface {name!r}; choose from {sorted(_FACTORIES)}") from None
    return factory() if T_num is None else factory(T_num=T_num)


def custom_surface(phi: str, dphi: str, ddphi: str, T_num: float = 10.0, T: float = math.inf,
                   params: Optional[dict] = None) -> WarpedSurface:
    """Build a surface from closed-form expressions in ``t``."""
    f, df, ddf = (compile_expression(s) for s in (phi, dphi, ddphi))
    W = WarpedSurface("custom", phi=f, dphi=df, ddphi=ddf, T=T, T_num=T_num,
                      params=dict(params or {}, phi=phi, dphi=dphi, ddphi=ddphi))
    _check_smooth_pole(W)
    return W


def _check_smooth_pole(W: WarpedSurface):
    if abs(W.phi(0.0)) > 1e-12 or abs(W.dphi(0.0) - 1.0) > 1e-9:
        raise ValueError("warping function must satisfy phi(0)=0, phi'(0)=1")
    ts = np.linspace(0.0, W.T_num, 2001)[1:]
    if np.any(~np.isfinite(W.phi(ts))) or np.any(W.phi(ts) <= 0):
        raise ValueError("warping function must be positive on (0, T_num]")


def surface_from_config(cfg: dict) -> WarpedSurface:
    """Surface from a JSON-style mapping.

    ``{"catalog": "hyperbolic", "params": {}, "T_num": 20.0}`` or
    ``{"catalog": "custom", "warp": {"phi": ..., "dphi": ..., "ddphi": ...}}``.
    """
    if not isinstance(cfg, dict) or "catalog" not in cfg:
        raise ValueError("surface config must be an object with a 'catalog' key")
    name = cfg["catalog"]
    T_num = cfg.get("T_num")
    if T_num is not None and not (isinstance(T_num, (int, float)) and T_num > 0):
        raise ValueError("T_num must be a positive number")
    if name == "custom":
        warp = cfg.get("warp")
        if not isinstance(warp, dict) or not {"phi", "dphi", "ddphi"} <= warp.keys():
            raise ValueError("custom surface needs warp.phi, warp.dphi and warp.ddphi")
        return custom_surface(warp["phi"], warp["dphi"], warp["ddphi"],
                              T_num=10.0 if T_num is None else float(T_num),
                              params=cfg.get("params"))
    W = catalog_surface(name, None if T_num is None else float(T_num))
    if cfg.get("params"):
        W = WarpedSurface(W.catalog_id, W.phi, W.dphi, W.ddphi, W.T, W.T_num, W.Phi,
                          dict(cfg["params"]), W.monotone_curvature)
    return W


def load_surface(path) -> WarpedSurface:
    return surface_from_config(json.loads(Path(path).read_text()))


# --- curvature -------------------------------------------------------------

def gauss_curvature(W: WarpedSurface, t: float) -> float:
    """K(t) = -phi''(t)/phi(t), with the pole value from its limit."""
    W.check_t(t)
    if t < POLE_EPS:
        return W.pole_curvature
    return float(-W.ddphi(t) / W.phi(t))


def _curvature_array(W: WarpedSurface, ts: np.ndarray) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)
    out = np.empty_like(ts)
    small = ts < POLE_EPS
    out[small] = W.pole_curvature
    big = ~small
    out[big] = -W.ddphi(ts[big]) / W.phi(ts[big])
    return out


def _radial_hull(W, region) -> tuple[float, float]:
    if isinstance(region, SymmetricRegion):
        if region.is_empty:
            raise ValueError("curvature bound over an empty region")
        lo, hi = region.intervals[0][0], region.intervals[-1][1]
    elif isinstance(region, (tuple, list)):
        lo, hi = float(region[0]), float(region[1])
    else:
        lo, hi = 0.0, float(region)
    if not 0 <= lo <= hi:
        raise ValueError(f"invalid radial range [{lo}, {hi}]")
    W.check_t(hi, "radius")
    return lo, hi


def _curvature_extreme(W, region, sign):
    lo, hi = _radial_hull(W, region)
    hint = W.monotone_curvature
    if hint == "const":
        return gauss_curvature(W, lo)
    if hint == "decreasing":
        return gauss_curvature(W, lo if sign > 0 else hi)
    ts = np.linspace(lo, hi, 2001)
    ks = sign * _curvature_array(W, ts)
    j = int(np.argmax(ks))
    a, b = ts[max(j - 1, 0)], ts[min(j + 1, len(ts) - 1)]
    best = ks[j]
    if b > a:
        res = optimize.minimize_scalar(lambda t: -sign * gauss_curvature(W, t), bounds=(a, b),
                                       method="bounded", options={"xatol": 1e-12})
        best = max(best, -res.fun)
    return sign * best


def curvature_sup(W: WarpedSurface, region) -> float:
    """Supremum of K over the radial hull of ``region``.

    ``region`` is a SymmetricRegion, a ``(t_lo, t_hi)`` pair or a pole-ball radius.
    """
    return _curvature_extreme(W, region, +1)


def curvature_inf(W: WarpedSurface, region) -> float:
    return _curvature_extreme(W, region, -1)


# --- pole balls ------------------------------------------------------------

def pole_ball_volume(W: WarpedSurface, R: float) -> float:
    if not 0 < R < W.T or R > W.T_num:
        raise ValueError(f"radius {R} outside (0, {min(W.T, W.T_num)}]")
    return TWO_PI * float(W.antiderivative(R))


def pole_ball_area(W: WarpedSurface, R: float) -> float:
    if not 0 < R < W.T or R > W.T_num:
        raise ValueError(f"radius {R} outside (0, {min(W.T, W.T_num)}]")
    return TWO_PI * float(W.phi(R))


def pole_radius(W: WarpedSurface, v: float) -> float:
    """Radius R of the pole ball with volume v."""
    if not v > 0:
        raise ValueError(f"volume must be positive, got {v}")
    vmax = pole_ball_volume(W, W.T_num)
    if v >= vmax:
        raise ValueError(f"volume {v} exceeds the numerically reachable volume {vmax:.6g}")
    target = v / TWO_PI
    R = optimize.brentq(lambda r: float(W.antiderivative(r)) - target, 0.0, W.T_num,
                        xtol=1e-15, rtol=1e-15, maxiter=500)
    for _ in range(2):
        p = float(W.phi(R))
        if p <= 0:
            break
        R -= (float(W.antiderivative(R)) - target) / p
    return R


# --- symmetric regions -----------------------------------------------------

@dataclass(frozen=True)
class SymmetricRegion:
    """Finite union of closed annuli ``a <= t <= b`` (a disk when a = 0)."""

    intervals: tuple = ()

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals if b > a)
        for a, b in ivs:
            if a < 0:
                raise ValueError(f"interval [{a}, {b}] starts below 0")
        for (a0, b0), (a1, b1) in zip(ivs, ivs[1:]):
            if not a1 > b0:
                raise ValueError(f"intervals [{a0}, {b0}] and [{a1}, {b1}] are not separated")
        object.__setattr__(self, "intervals", ivs)

    @classmethod
    def disk(cls, R: float) -> "SymmetricRegion":
        return cls(((0.0, R),))

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.zeros(t.shape, dtype=bool)
        for a, b in self.intervals:
            inside |= (t >= a) & (t <= b)
        return inside

    def validate(self, W: WarpedSurface):
        if self.intervals and self.intervals[-1][1] > W.T_num:
            raise ValueError("region extends beyond the numerical domain")
        return self


def region_volume(W: WarpedSurface, S: SymmetricRegion) -> float:
    S.validate(W)
    return sum(TWO_PI * float(W.antiderivative(b) - W.antiderivative(a)) for a, b in S.intervals)


def region_perimeter(W: WarpedSurface, S: SymmetricRegion) -> float:
    S.validate(W)
    total = 0.0
    for a, b in S.intervals:
        if a > 0:
            total += TWO_PI * float(W.phi(a))
        total += TWO_PI * float(W.phi(b))
    return total


def region_truncate(W: WarpedSurface, S: SymmetricRegion, rho: float):
    """Return ``(S ∩ C_rho, slice_length)``.

    ``slice_length`` is the length of ``S ∩ ∂C_rho`` when ``rho`` cuts through
    the interior of an interval, else 0, so that the perimeter of the truncated
    set is its perimeter inside the open ball plus ``slice_length``.
    """
    if not 0 < rho < W.T:
        raise ValueError(f"truncation radius {rho} outside (0, T)")
    S.validate(W)
    kept = []
    slice_length = 0.0
    for a, b in S.intervals:
        if a >= rho:
            continue
        if b > rho:
            kept.append((a, rho))
            slice_length = TWO_PI * float(W.phi(rho))
        else:
            kept.append((a, b))
    return SymmetricRegion(tuple(kept)), slice_length


def as_region(obj: Sequence) -> SymmetricRegion:
    if isinstance(obj, SymmetricRegion):
        return obj
    return SymmetricRegion(tuple(tuple(iv) for iv in obj))
