"""Strictly convex Lipschitz exhaustion functions on warped surfaces.

The exhaustion is radial, ``f = m(h)`` with ``h = d^2 / 2`` and ``d`` the
distance to the pole; the default outer function is ``m(x) = sqrt(1 + x)``.
Sublevel sets are closed pole balls.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .geodesics import _initial, _solve
from .surface import WarpedSurface, curvature_sup

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class OuterFunction:
    """Increasing outer function m with derivatives and inverse."""

    name: str
    m: Callable
    dm: Callable
    ddm: Callable
    inverse: Callable
    lipschitz: float


SQRT_OUTER = OuterFunction(
    "sqrt1p",
    m=lambda x: np.sqrt(1.0 + x),
    dm=lambda x: 0.5 / np.sqrt(1.0 + x),
    ddm=lambda x: -0.25 / (1.0 + x) ** 1.5,
    inverse=lambda r: r * r - 1.0,
    lipschitz=SQRT2,
)


@dataclass(frozen=True, eq=False)
class ExhaustionSpec:
    surface: WarpedSurface
    outer: OuterFunction = SQRT_OUTER

    @property
    def inf_value(self) -> float:
        return float(self.outer.m(0.0))

    @property
    def lipschitz_constant(self) -> float:
        return self.outer.lipschitz

    def value(self, d):
        """f at radial distance d."""
        d = np.asarray(d, dtype=float)
        return self.outer.m(0.5 * d * d)

    def value_xy(self, x, y):
        return self.outer.m(0.5 * (x * x + y * y))


@dataclass
class ConvexityReport:
    lipschitz_constant: float
    sandwich_constant: Optional[float]
    min_hessian_margin: Optional[float]
    min_second_derivative: float
    geodesic_count: int
    domain: dict
    bound: Optional[str]
    passed: bool
    worst: Optional[dict] = None
    samples: int = 0

    def to_json(self) -> dict:
        out = {
            "L": self.lipschitz_constant,
            "K": self.sandwich_constant,
            "min_hessian_margin": self.min_hessian_margin,
            "min_second_derivative": self.min_second_derivative,
            "geodesic_count": self.geodesic_count,
            "bound": self.bound,
            "domain": self.domain,
            "pass": self.passed,
        }
        if self.worst is not None:
            out["worst"] = self.worst
        return out


def build_sqrt_exhaustion(W: WarpedSurface) -> ExhaustionSpec:
    """Exhaustion f = (1 + d^2/2)^(1/2) on ``W``.

    Level circles must be convex, so phi' > 0 is required on the numerical
    domain; otherwise the surface is rejected.
    """
    ts = np.linspace(0.0, W.T_num, 4001)
    dphi = np.asarray(W.dphi(ts), dtype=float)
    bad = np.flatnonzero(~(dphi > 0))
    if bad.size:
        t_bad = ts[bad[0]]
        raise ValueError(
            f"phi' = {dphi[bad[0]]:.3g} <= 0 at t = {t_bad:.6g}: level circles are not convex"
        )
    return ExhaustionSpec(W)


def gradient_norm(spec: ExhaustionSpec, d: float) -> float:
    """|grad f| = m'(d^2/2) d at distance d.

    For the default m this is d / (2 (1 + d^2/2)^(1/2)), increasing to 1/sqrt 2.
    """
    if d < 0:
        raise ValueError("distance must be non-negative")
    return float(spec.outer.dm(0.5 * d * d) * d)


def gradient_majorant(spec: ExhaustionSpec, d: float) -> float:
    """d / (1 + d^2/2)^(1/2) = 2 |grad f|, increasing to sqrt 2 = L.

    A Lipschitz majorant for the default exhaustion (the factor 1/2 of m' dropped).
    """
    if d < 0:
        raise ValueError("distance must be non-negative")
    return float(d / math.sqrt(1.0 + 0.5 * d * d))


def hessian_lower_bound(spec: ExhaustionSpec, d: float) -> float:
    """(1 + d^2) / (4 (1 + d^2/2)^(3/2)).

    Obtained from Hess h >= 1 together with |<grad h, e>| <= 1.  Since
    |grad h| = d, the second estimate only holds for d <= 1, and radial
    geodesics fall below this value once d > 1; see
    :func:`sharp_hessian_lower_bound`.
    """
    if d < 0:
        raise ValueError("distance must be non-negative")
    return 0.25 * (1 + d * d) / (1 + 0.5 * d * d) ** 1.5


def sharp_hessian_lower_bound(spec: ExhaustionSpec, d: float) -> float:
    """1 / (2 (1 + d^2/2)^(3/2)), attained by radial geodesics on Hadamard surfaces."""
    if d < 0:
        raise ValueError("distance must be non-negative")
    return 0.5 / (1 + 0.5 * d * d) ** 1.5


BOUNDS = {"unit": hessian_lower_bound, "sharp": sharp_hessian_lower_bound}


def sublevel_radius(spec: ExhaustionSpec, r: float) -> float:
    """Radius of the pole ball C_r = {f <= r}."""
    if r < spec.inf_value:
        raise ValueError(f"level {r} is below inf f = {spec.inf_value}")
    return math.sqrt(max(0.0, 2.0 * spec.outer.inverse(r)))


def level_for_radius(spec: ExhaustionSpec, d: float) -> float:
    return float(spec.value(d))


def level_normal_divergence(spec: ExhaustionSpec, t: float) -> float:
    """div(grad f / |grad f|) on the level circle at distance t, i.e. phi'/phi."""
    W = spec.surface
    if not t > 0:
        raise ValueError("the unit normal field is undefined at the pole (t = 0)")
    W.check_t(t)
    return float(W.dphi(t) / W.phi(t))


@dataclass
class SandwichReport:
    L: float
    K: float
    passed: bool
    inner_ok: bool
    outer_ok: bool
    rows: list = field(default_factory=list)

    def to_json(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def greene_wu_sandwich(spec: ExhaustionSpec, r_grid) -> SandwichReport:
    """Check B(x0, (r - inf f)/L) ⊆ C_r and fit the outer constant K.

    K is the largest constant with sublevel_radius(r) <= r/K + 1 on the grid.
    """
    r_grid = np.asarray(r_grid, dtype=float)
    if np.any(r_grid < spec.inf_value):
        raise ValueError("r_grid must lie in [inf f, inf)")
    L = spec.lipschitz_constant
    rows = []
    inner_ok = True
    K = math.inf
    for r in r_grid:
        d = sublevel_radius(spec, r)
        inner = (r - spec.inf_value) / L
        ok = inner <= d * (1 + 1e-12) + 1e-15
        inner_ok &= ok
        if d > 1:
            K = min(K, r / (d - 1))
        rows.append({"r": float(r), "sublevel_radius": d, "inner_radius": inner})
    outer_ok = all(row["sublevel_radius"] <= row["r"] / K + 1 + 1e-12 for row in rows)
    for row in rows:
        row["outer_radius"] = row["r"] / K + 1 if math.isfinite(K) else math.inf
    if not inner_ok:
        raise AssertionError("inner Lipschitz inclusion failed; sublevel radius below (r - inf f)/L")
    return SandwichReport(L, K, inner_ok and outer_ok and K > 0, inner_ok, outer_ok, rows)


def _default_domain(W: WarpedSurface) -> dict:
    # start radius and length chosen so (f o gamma)'' stays well above finite-difference noise
    table = {"plane": (3.0, 3.0), "hyperbolic": (3.0, 3.0), "cigar": (2.0, 2.0), "flare": (1.0, 1.0)}
    start, length = table.get(W.catalog_id, (min(2.0, W.T_num / 3), min(2.0, W.T_num / 3)))
    return {"start_radius_max": start, "length": length}


def verify_strict_convexity(spec: ExhaustionSpec, geodesics: int = 100, seed: int = 0,
                            tol: float = 1e-4, bound: Optional[str] = "unit",
                            step: float = 1e-3, samples_per_geodesic: int = 41,
                            domain: Optional[dict] = None) -> ConvexityReport:
    """Second differences of f along seeded random geodesics.

    Positivity is always required.  On surfaces with K <= 0 the values are
    also compared with ``BOUNDS[bound](d) - tol``; ``bound=None`` skips that.
    """
    W = spec.surface
    dom = dict(_default_domain(W), **(domain or {}))
    t_max, length = dom["start_radius_max"], dom["length"]
    if t_max + length >= W.T_num:
        raise ValueError("sampling domain leaves the numerical domain")
    hadamard = curvature_sup(W, (0.0, t_max + length)) <= 0
    check_bound = bound is not None and hadamard
    bound_fn = BOUNDS[bound] if check_bound else None

    rng = np.random.default_rng(seed)
    t0 = t_max * np.sqrt(rng.random(geodesics))
    theta0 = 2 * math.pi * rng.random(geodesics)
    psi = 2 * math.pi * rng.random(geodesics)

    z0 = _initial(W, t0, theta0, psi)
    sol = _solve(W, z0, length, 0.0, geodesics)
    if sol.status != 0:
        raise RuntimeError(f"geodesic integration failed: {sol.message}")
    s = np.linspace(step, length - step, samples_per_geodesic)
    pts = np.concatenate([s - step, s, s + step])
    Z = sol.sol(pts).reshape(7, geodesics, 3, samples_per_geodesic)
    F = spec.value_xy(Z[0], Z[1])
    second = (F[:, 0] - 2 * F[:, 1] + F[:, 2]) / step**2
    dist = np.hypot(Z[0][:, 1], Z[1][:, 1])

    min_second = float(second.min())
    positive = bool(min_second > 0)
    margin = None
    worst = None
    passed = positive
    if check_bound:
        lower = np.vectorize(lambda d: bound_fn(spec, d))(dist)
        margins = second - lower
        margin = float(margins.min())
        passed = positive and margin >= -tol
        i, k = np.unravel_index(int(np.argmin(margins)), margins.shape)
    else:
        i, k = np.unravel_index(int(np.argmin(second)), second.shape)
    if not passed or check_bound:
        worst = {
            "geodesic": int(i),
            "start": {"t": float(t0[i]), "theta": float(theta0[i]), "psi": float(psi[i])},
            "s": float(s[k]),
            "d": float(dist[i, k]),
            "second_difference": float(second[i, k]),
            "bound": float(bound_fn(spec, dist[i, k])) if check_bound else None,
        }
    dom.update({"seed": seed, "step": step, "surface": W.catalog_id, "hadamard": hadamard})
    return ConvexityReport(
        lipschitz_constant=spec.lipschitz_constant,
        sandwich_constant=None,
        min_hessian_margin=margin,
        min_second_derivative=min_second,
        geodesic_count=geodesics,
        domain=dom,
        bound=bound if check_bound else None,
        passed=passed,
        worst=worst,
        samples=int(second.size),
    )


def radial_second_derivative(spec: ExhaustionSpec, d: float) -> float:
    """(f o gamma)'' along a unit-speed radial geodesic at distance d."""
    h = 0.5 * d * d
    return float(spec.outer.ddm(h) * d * d + spec.outer.dm(h))


__all__ = [
    "ExhaustionSpec", "ConvexityReport", "SandwichReport", "OuterFunction", "SQRT_OUTER",
    "build_sqrt_exhaustion", "gradient_norm", "gradient_majorant", "hessian_lower_bound", "sharp_hessian_lower_bound",
    "verify_strict_convexity", "sublevel_radius", "level_for_radius", "greene_wu_sandwich",
    "level_normal_divergence", "radial_second_derivative",
]
