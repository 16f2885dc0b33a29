"""Geodesic balls in the simply connected space forms.

A space form is the complete simply connected n-manifold of constant
sectional curvature ``delta``.  Ball volumes have closed forms in dimension
two; in higher dimension the model area element is integrated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate, optimize

QUAD_TOL = 1e-10
ROOT_TOL = 1e-10


@dataclass(frozen=True)
class SpaceForm:
    delta: float
    n: int = 2

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"dimension must be an integer >= 2, got {self.n}")

    @property
    def max_radius(self) -> float:
        """pi / sqrt(delta), or +inf when delta <= 0."""
        if self.delta > 0:
            return math.pi / math.sqrt(self.delta)
        return math.inf

    @property
    def total_volume(self) -> float:
        if self.delta > 0:
            return _quad_volume(self, self.max_radius) if self.n != 2 else 4 * math.pi / self.delta
        return math.inf


def unit_ball_volume(n: int) -> float:
    """omega_n, the Euclidean volume of the unit n-ball."""
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def sn(delta: float, r: float) -> float:
    """Generalized sine: the warping function of the model space."""
    x = delta * r * r
    if abs(x) < 1e-6:
        return r * (1 - x / 6 + x * x / 120)
    if delta > 0:
        k = math.sqrt(delta)
        return math.sin(k * r) / k
    if delta < 0:
        k = math.sqrt(-delta)
        return math.sinh(k * r) / k


def _check_radius(sf: SpaceForm, r: float, allow_cap: bool = False):
    if not r > 0:
        raise ValueError(f"radius must be positive, got {r}")
    cap = sf.max_radius
    if r > cap or (r == cap and not allow_cap):
        raise ValueError(
            f"radius {r} outside the model domain r < pi/sqrt(delta) = {cap} (delta={sf.delta})"
        )


def _quad_volume(sf: SpaceForm, r: float) -> float:
    c = sf.n * unit_ball_volume(sf.n)
    val, _ = integrate.quad(
        lambda t: sn(sf.delta, t) ** (sf.n - 1), 0.0, r,
        epsabs=QUAD_TOL * 1e-2, epsrel=1e-13, limit=200,
    )
    return c * val


def ball_volume(sf: SpaceForm, r: float, method: str = "auto") -> float:
    """Volume V_{delta,n}(r) of a geodesic ball of radius r.

    ``method`` is ``"closed"`` (n=2 only), ``"quad"`` or ``"auto"`` (closed
    form in dimension two, quadrature otherwise).
    """
    _check_radius(sf, r)
    if method == "auto":
        method = "closed" if sf.n == 2 else "quad"
    if method == "quad":
        return _quad_volume(sf, r)
    if method != "closed":
        raise ValueError(f"unknown method {method!r}")
    if sf.n != 2:
        raise ValueError("closed-form ball volume is only available for n = 2")
    d = sf.delta
    x = d * r * r
    if abs(x) < 1e-6:
        # (sin u / u)^2 series with u^2 = x/4; also covers delta == 0 exactly
        return math.pi * r * r * (1 - x / 12 + x * x / 360)
    if d < 0:
        k = math.sqrt(-d)
        # 2*pi*(cosh(kr) - 1)/k^2 written to avoid cancellation at small kr
        return 4 * math.pi * math.sinh(k * r / 2) ** 2 / (-d)
    k = math.sqrt(d)
    return 4 * math.pi * math.sin(k * r / 2) ** 2 / d


def ball_area(sf: SpaceForm, r: float) -> float:
    """Boundary measure of the model ball; the r-derivative of ball_volume."""
    _check_radius(sf, r)
    return sf.n * unit_ball_volume(sf.n) * sn(sf.delta, r) ** (sf.n - 1)


def inverse_volume(sf: SpaceForm, v: float) -> float:
    """Radius of the model ball of volume v."""
    if not v > 0:
        raise ValueError(f"volume must be positive, got {v}")
    if sf.delta > 0 and v >= sf.total_volume:
        raise ValueError(f"volume {v} not attainable: total model volume is {sf.total_volume}")
    # bracket by doubling; the cap pi/sqrt(delta) can be astronomically large for tiny delta
    hi = min(1.0, sf.max_radius)
    while hi < sf.max_radius and ball_volume(sf, hi) < v:
        hi = min(2.0 * hi, sf.max_radius)
        if hi > 1e6:
            raise ValueError(f"volume {v} not attainable numerically")

    def g(r):
        if r <= 0:
            return -v
        if r >= sf.max_radius:
            return sf.total_volume - v
        return ball_volume(sf, r) - v

    r = optimize.brentq(g, 0.0, hi, xtol=1e-15, rtol=1e-15, maxiter=400)
    # Newton polish; the derivative of the volume is the sphere area
    for _ in range(3):
        if r >= sf.max_radius:
            break
        a = ball_area(sf, r)
        if a <= 0:
            break
        step = g(r) / a
        r_new = r - step
        if not 0 < r_new < sf.max_radius:
            break
        r = r_new
        if abs(step) < 1e-16 * max(1.0, r):
            break
    if abs(g(r)) > ROOT_TOL * max(1.0, v):
        raise RuntimeError(f"inverse_volume did not converge for v={v}")
    return r


def space_form_profile(sf: SpaceForm, v: float) -> float:
    """Isoperimetric profile of the model surface (geodesic disks are optimal)."""
    if sf.n != 2:
        raise ValueError("space_form_profile is implemented for n = 2 only")
    if not v > 0:
        raise ValueError(f"volume must be positive, got {v}")
    if sf.delta == 0:
        return 2 * math.sqrt(math.pi * v)
    if sf.delta == -1:
        return math.sqrt(v * v + 4 * math.pi * v)
    return ball_area(sf, inverse_volume(sf, v))
