"""Geodesics, constant-curvature arcs and exponential-map balls on warped surfaces.

Curves are integrated in Cartesian coordinates ``u = (t cos theta, t sin theta)``
around the pole, where the metric is smooth.  With ``L = u x p`` the
Hamiltonian is

    H(u, p) = |p|^2 / 2 + L^2 G(t^2) / 2,     G = 1/phi^2 - 1/t^2,

and ``G`` extends smoothly to ``t = 0`` because ``phi`` is odd.  A prescribed
geodesic curvature ``h`` enters as a magnetic term ``h * (area form)(T, .)``,
which keeps unit speed and bends the curve to the left for ``h > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy import integrate, interpolate
from scipy.integrate import trapezoid

from .surface import TWO_PI, WarpedSurface, curvature_sup

RTOL = 1e-11
ATOL = 1e-12

_T_G = 1e-3      # below this G is evaluated by its Taylor polynomial
_T_GP = 2e-2     # same for dG/d(t^2), which cancels much harder


@dataclass(frozen=True)
class GeodesicState:
    """Point and unit velocity in polar coordinates, plus accumulated length."""

    t: float
    theta: float
    vt: float
    vtheta: float
    arc_length: float = 0.0

    @classmethod
    def from_angle(cls, W: WarpedSurface, t: float, theta: float, psi: float) -> "GeodesicState":
        """Unit-speed state whose velocity makes angle ``psi`` with the outward radial direction."""
        phi = float(W.phi(t)) if t > 0 else 0.0
        vtheta = math.sin(psi) / phi if phi > 0 else 0.0
        return cls(t, theta, math.cos(psi), vtheta)

    def speed2(self, W: WarpedSurface) -> float:
        return self.vt**2 + float(W.phi(self.t)) ** 2 * self.vtheta**2

    def clairaut(self, W: WarpedSurface) -> float:
        return float(W.phi(self.t)) ** 2 * self.vtheta


class _Coefficients:
    """Pole-safe evaluation of G, dG/d(t^2), K and Phi/t^2 for one surface."""

    def __init__(self, W: WarpedSurface):
        self.W = W
        k0 = W.pole_curvature
        self.G0 = k0 / 3.0
        self.G1 = float(self._gp_direct(np.array([_T_GP]))[0])
        self.k0 = k0
        self.flat = W.catalog_id == "plane"

    def _g_direct(self, t):
        phi = self.W.phi(t)
        return (t - phi) * (t + phi) / (phi * phi * t * t)

    def _gp_direct(self, t):
        phi = self.W.phi(t)
        return 1.0 / t**4 - self.W.dphi(t) / (t * phi**3)

    def G(self, t):
        out = np.empty_like(t)
        small = t < _T_G
        out[small] = self.G0 + self.G1 * t[small] ** 2
        big = ~small
        out[big] = self._g_direct(t[big])
        return out

    def Gp(self, t):
        out = np.empty_like(t)
        small = t < _T_GP
        out[small] = self.G1
        big = ~small
        out[big] = self._gp_direct(t[big])
        return out

    def K(self, t):
        out = np.empty_like(t)
        small = t < 1e-6
        out[small] = self.k0
        big = ~small
        out[big] = -self.W.ddphi(t[big]) / self.W.phi(t[big])
        return out

    def phi_over_t(self, t):
        out = np.ones_like(t)
        big = t > 1e-8
        out[big] = self.W.phi(t[big]) / t[big]
        return out

    def Phi_over_t2(self, t):
        out = np.full_like(t, 0.5)
        big = t > 1e-6
        out[big] = self.W.antiderivative(t[big]) / t[big] ** 2
        return out


@lru_cache(maxsize=64)
def _coefficients(W: WarpedSurface) -> _Coefficients:
    return _Coefficients(W)


def _rhs_factory(W: WarpedSurface, h, n: int):
    """Vector field for n curves; state rows x, y, px, py, J, J', A."""
    c = _coefficients(W)
    h = np.broadcast_to(np.asarray(h, dtype=float), (n,))

    def rhs(_s, z):
        x, y, px, py, J, Jd, _A = z.reshape(7, n)
        t = np.hypot(x, y)
        L = x * py - y * px
        if c.flat:
            g = gp = np.zeros_like(t)
        else:
            g, gp = c.G(t), c.Gp(t)
        xd = px - L * g * y
        yd = py + L * g * x
        pxd = -(L * g * py + L * L * gp * x)
        pyd = L * g * px - L * L * gp * y
        if np.any(h):
            w = h * c.phi_over_t(t)
            pxd = pxd - w * yd
            pyd = pyd + w * xd
        Jdd = -c.K(t) * J
        Ad = c.Phi_over_t2(t) * (x * yd - y * xd)
        return np.concatenate([xd, yd, pxd, pyd, Jd, Jdd, Ad])

    return rhs


def _initial(W: WarpedSurface, t0, theta0, psi):
    """Cartesian state for unit-speed curves leaving (t0, theta0) at angle psi."""
    t0 = np.asarray(t0, dtype=float)
    theta0 = np.asarray(theta0, dtype=float)
    psi = np.asarray(psi, dtype=float)
    t0, theta0, psi = np.broadcast_arrays(t0, theta0, psi)
    c = _coefficients(W)
    ratio = c.phi_over_t(t0.astype(float).copy())
    ux, uy = np.cos(theta0), np.sin(theta0)
    x, y = t0 * ux, t0 * uy
    # p = cos(psi) u_hat + (phi/t) sin(psi) u_perp
    px = np.cos(psi) * ux - ratio * np.sin(psi) * uy
    py = np.cos(psi) * uy + ratio * np.sin(psi) * ux
    n = t0.size
    zeros = np.zeros(n)
    return np.concatenate([x.ravel(), y.ravel(), px.ravel(), py.ravel(), zeros, np.ones(n), zeros])


def _state_from_polar(W: WarpedSurface, st: GeodesicState):
    phi = float(W.phi(st.t)) if st.t > 0 else 0.0
    tangential = phi * st.vtheta
    psi = math.atan2(tangential, st.vt)
    return _initial(W, st.t, st.theta, psi)


def _polar(W: WarpedSurface, z, h, s_offset=0.0, s=None):
    """Convert one Cartesian state column to a GeodesicState."""
    x, y, px, py = z[0], z[1], z[2], z[3]
    rhs = _rhs_factory(W, h, 1)
    d = rhs(0.0, np.array([x, y, px, py, 0.0, 1.0, 0.0]))
    xd, yd = d[0], d[1]
    t = math.hypot(x, y)
    theta = math.atan2(y, x)
    if t > 0:
        vt = (x * xd + y * yd) / t
        vtheta = (x * yd - y * xd) / (t * t)
    else:
        vt, vtheta = math.hypot(xd, yd), 0.0
    return GeodesicState(t, theta, vt, vtheta, (s if s is not None else 0.0) + s_offset)


@dataclass
class Trajectory:
    """Dense trajectory of a single curve; ``states`` sampled at ``s``."""

    surface: WarpedSurface
    s: np.ndarray
    states: list
    sol: object
    h: float = 0.0
    closed: bool = False

    @property
    def end(self) -> GeodesicState:
        return self.states[-1]

    @property
    def length(self) -> float:
        return float(self.s[-1])

    def cartesian(self, s):
        z = self.sol(s)
        return z[0], z[1]

    def radius(self, s):
        x, y = self.cartesian(s)
        return np.hypot(x, y)

    def swept_area(self, s=None) -> float:
        """Integral of the 1-form Phi(t) dtheta along the curve (enclosed area when closed)."""
        s = self.length if s is None else s
        return float(self.sol(s)[6])

    def clairaut(self) -> np.ndarray:
        return np.array([st.clairaut(self.surface) for st in self.states])

    def speed_error(self) -> np.ndarray:
        return np.array([abs(st.speed2(self.surface) - 1.0) for st in self.states])


def _solve(W, z0, length, h, n, events=None, rtol=RTOL, atol=ATOL, method="DOP853"):
    rhs = _rhs_factory(W, h, n)
    with np.errstate(over="ignore", invalid="ignore"):
        return integrate.solve_ivp(rhs, (0.0, length), z0, method=method, rtol=rtol, atol=atol,
                                   dense_output=True, events=events)


def _domain_event(W):
    def ev(_s, z):
        return W.T_num - math.hypot(z[0], z[1])
    ev.terminal = True
    ev.direction = -1
    return ev


def geodesic_integrate(W: WarpedSurface, start: GeodesicState, length: float,
                       n_out: int = 101, rtol: float = RTOL) -> Trajectory:
    """Integrate the unit-speed geodesic leaving ``start`` for arc length ``length``."""
    return _integrate_curve(W, start, length, 0.0, n_out, rtol)


def _integrate_curve(W, start, length, h, n_out, rtol, extra_events=()):
    if not length > 0:
        raise ValueError("length must be positive")
    W.check_t(start.t, "start radius")
    if abs(start.speed2(W) - 1.0) > 1e-8:
        raise ValueError("start state is not unit speed")
    z0 = _state_from_polar(W, start)
    events = [_domain_event(W), *extra_events]
    sol = _solve(W, z0, length, h, 1, events=events, rtol=rtol)
    if sol.status == -1:
        raise RuntimeError(f"integration failed: {sol.message}")
    if sol.t_events[0].size:
        raise ValueError("trajectory leaves the numerical domain [0, T_num]")
    s_end = float(sol.t[-1])
    s = np.linspace(0.0, s_end, n_out)
    zs = sol.sol(s)
    states = [_polar(W, zs[:, k], h, start.arc_length, s[k]) for k in range(n_out)]
    return Trajectory(W, s, states, sol.sol, h)


@dataclass
class CmcArc:
    trajectory: Trajectory
    length: float
    swept_area: float
    stop: str  # "boundary", "closure" or "max_length"
    points: np.ndarray  # (n, 2) polar samples (t, theta)


def cmc_arc_shoot(W: WarpedSurface, h: float, start: GeodesicState, stop: str = "closure",
                  rho: Optional[float] = None, max_length: float = 50.0,
                  n_out: int = 201, rtol: float = RTOL) -> CmcArc:
    """Unit-speed curve of constant geodesic curvature ``h`` from ``start``.

    ``stop`` is ``"boundary"`` (first outward crossing of the circle t = rho),
    ``"closure"`` (first return to the start point) or ``"max_length"``.
    """
    if stop not in ("boundary", "closure", "max_length"):
        raise ValueError(f"unknown stop condition {stop!r}")
    extra = []
    if stop == "boundary":
        if rho is None or not 0 < rho <= W.T_num:
            raise ValueError("boundary stop needs 0 < rho <= T_num")

        def hit(_s, z):
            return math.hypot(z[0], z[1]) - rho
        hit.terminal = True
        hit.direction = 1
        extra.append(hit)
    traj = _integrate_curve(W, start, max_length, h, 2, rtol, extra)
    reason = "max_length"
    s_end = traj.length
    if stop == "boundary":
        if s_end >= max_length - 1e-12:
            raise ValueError("arc did not reach the boundary circle within max_length")
        reason = "boundary"
    elif stop == "closure":
        s_close = _closure_length(traj)
        if s_close is None:
            raise ValueError("arc did not close within max_length")
        s_end, reason = s_close, "closure"
    if s_end != traj.length:
        s = np.linspace(0.0, s_end, n_out)
        zs = traj.sol(s)
        states = [_polar(W, zs[:, k], h, start.arc_length, s[k]) for k in range(n_out)]
        traj = Trajectory(W, s, states, traj.sol, h, closed=reason == "closure")
    else:
        traj = Trajectory(W, *_resample(traj, n_out), traj.sol, h, closed=False)
    pts = np.array([(st.t, st.theta) for st in traj.states])
    return CmcArc(traj, s_end, traj.swept_area(s_end), reason, pts)


def _resample(traj, n_out):
    s = np.linspace(0.0, traj.length, n_out)
    zs = traj.sol(s)
    states = [_polar(traj.surface, zs[:, k], traj.h, 0.0, s[k]) for k in range(n_out)]
    return s, states


def _closure_length(traj: Trajectory) -> Optional[float]:
    from scipy.optimize import brentq

    z0 = traj.sol(0.0)
    x0, y0 = z0[0], z0[1]
    d = _rhs_factory(traj.surface, traj.h, 1)(0.0, np.array([*z0[:4], 0.0, 1.0, 0.0]))
    tx, ty = d[0], d[1]
    scale = math.hypot(tx, ty)

    def g(s):
        z = traj.sol(s)
        return ((z[0] - x0) * tx + (z[1] - y0) * ty) / scale

    s = np.linspace(0.0, traj.length, 4001)
    vals = np.array([g(si) for si in s])
    for k in range(1, len(s) - 1):
        if vals[k] < 0 <= vals[k + 1]:
            root = brentq(g, s[k], s[k + 1], xtol=1e-14)
            z = traj.sol(root)
            if math.hypot(z[0] - x0, z[1] - y0) < 1e-6 * max(1.0, traj.length):
                return root
    return None


# --- exponential-map balls -------------------------------------------------

def _check_ball(W: WarpedSurface, t0: float, s: float):
    if not s > 0:
        raise ValueError("ball radius must be positive")
    if t0 < 0:
        raise ValueError("center radius must be non-negative")
    if t0 + s >= W.T_num:
        raise ValueError(f"ball of radius {s} at t0={t0} leaves the numerical domain (T_num={W.T_num})")
    kmax = curvature_sup(W, (max(0.0, t0 - s), t0 + s))
    if kmax > 0 and s >= math.pi / math.sqrt(kmax):
        raise ValueError(f"radius {s} exceeds the conjugate-distance bound pi/sqrt({kmax:.6g})")


class ExpBall:
    """Exponential-map parametrisation of the geodesic ball B(x, s), x = (t0, 0).

    Geodesics are shot in ``n_dir`` directions on [0, pi] (the other half is
    the mirror image) together with their Jacobi fields, which give the area
    density ``J`` in geodesic polar coordinates.
    """

    def __init__(self, W: WarpedSurface, t0: float, s: float, n_dir: int = 65, n_rad: int = 129):
        _check_ball(W, t0, s)
        self.W, self.t0, self.s = W, float(t0), float(s)
        self.psi = np.linspace(0.0, math.pi, n_dir)
        self.rad = np.linspace(0.0, s, n_rad)
        z0 = _initial(W, np.full(n_dir, t0), np.zeros(n_dir), self.psi)
        sol = _solve(W, z0, s, 0.0, n_dir)
        if sol.status != 0:
            raise RuntimeError(f"exponential map integration failed: {sol.message}")
        self._sol = sol.sol
        Z = sol.sol(self.rad).reshape(7, n_dir, n_rad)
        self.X, self.Y, self.J = Z[0].T, Z[1].T, Z[4].T  # shape (n_rad, n_dir)
        w = np.ones_like(self.J)
        w[1:] = self.J[1:] / self.rad[1:, None]
        self.weight = w
        kx = min(3, n_rad - 1)
        ky = min(3, n_dir - 1)
        self._sx = interpolate.RectBivariateSpline(self.rad, self.psi, self.X, kx=kx, ky=ky)
        self._sy = interpolate.RectBivariateSpline(self.rad, self.psi, self.Y, kx=kx, ky=ky)
        self._sw = interpolate.RectBivariateSpline(self.rad, self.psi, self.weight, kx=kx, ky=ky)

    def volume(self) -> float:
        """Deterministic |B(x, s)|: trapezoid in the angle (spectral for periodic data)."""
        area_per_dir = _cumulative_area(self._sol, np.array([self.s]), len(self.psi))[0]
        return 2.0 * trapezoid(area_per_dir, self.psi)

    def boundary_length(self) -> float:
        J = self._sol(self.s).reshape(7, -1)[4]
        return 2.0 * trapezoid(J, self.psi)

    def sample(self, n: int, rng: np.random.Generator):
        """Uniform points of the flat model disk mapped through exp, with area weights."""
        r = self.s * np.sqrt(rng.random(n))
        ang = TWO_PI * rng.random(n)
        mirror = ang > math.pi
        psi = np.where(mirror, TWO_PI - ang, ang)
        x = self._sx.ev(r, psi)
        y = self._sy.ev(r, psi)
        y = np.where(mirror, -y, y)
        w = self._sw.ev(r, psi)
        return x, y, w

    def radii(self, n: int, rng: np.random.Generator):
        x, y, w = self.sample(n, rng)
        return np.hypot(x, y), w

    def measure(self, n: int, seed: int, outside=None):
        """Monte-Carlo |B(x,s) \\ E| (or |B(x,s)| when ``outside`` is None) and its standard error."""
        rng = np.random.default_rng(seed)
        t, w = self.radii(n, rng)
        vals = w if outside is None else w * (~outside.contains(t))
        flat = math.pi * self.s**2
        est = flat * float(np.mean(vals))
        sigma = flat * float(np.std(vals, ddof=1)) / math.sqrt(n)
        return est, sigma

    def volume_at(self, r: float) -> float:
        """Deterministic |B(x, r)| for 0 < r <= s from the stored solution."""
        if not 0 < r <= self.s * (1 + 1e-12):
            raise ValueError(f"radius {r} outside (0, {self.s}]")
        per_dir = _cumulative_area(self._sol, np.array([min(r, self.s)]), len(self.psi))[0]
        return 2.0 * trapezoid(per_dir, self.psi)

    def boundary_length_at(self, r: float) -> float:
        J = self._sol(min(r, self.s)).reshape(7, -1)[4]
        return 2.0 * trapezoid(J, self.psi)

    def _fine(self, n_dir_fine):
        cache = getattr(self, "_fine_cache", None)
        if cache is None or cache[0] != n_dir_fine:
            psi = np.linspace(0.0, math.pi, n_dir_fine)
            z0 = _initial(self.W, np.full(n_dir_fine, self.t0), np.zeros(n_dir_fine), psi)
            sol = _solve(self.W, z0, self.s, 0.0, n_dir_fine)
            grid = np.linspace(0.0, self.s, 513)
            Z = sol.sol(grid).reshape(7, n_dir_fine, -1)
            tt = np.hypot(Z[0], Z[1])
            area = _cumulative_area(sol.sol, grid, n_dir_fine).T
            splines = [(interpolate.CubicSpline(grid, tt[j]), interpolate.CubicSpline(grid, area[j]))
                       for j in range(n_dir_fine)]
            cache = (n_dir_fine, psi, splines)
            self._fine_cache = cache
        return cache

    def measure_outside_exact(self, region, radius: Optional[float] = None,
                              n_dir_fine: int = 257) -> float:
        """Deterministic |B(x, radius) \\ E| for a symmetric region E.

        For each direction the radii where the geodesic enters or leaves E are
        located on the dense solution; the angular integral is a trapezoid rule,
        so accuracy is limited by directions tangent to the edges of E.
        """
        radius = self.s if radius is None else float(radius)
        if not 0 < radius <= self.s * (1 + 1e-12):
            raise ValueError(f"radius {radius} outside (0, {self.s}]")
        radius = min(radius, self.s)
        _, psi, splines = self._fine(n_dir_fine)
        per_dir = np.empty(len(psi))
        for j, (ts, As) in enumerate(splines):
            cuts = [0.0, radius]
            for a, b in region.intervals:
                for edge in (a, b):
                    if edge > 0:
                        roots = ts.solve(edge, extrapolate=False)
                        cuts.extend(r for r in roots if 0 < r < radius)
            cuts = np.unique(cuts)
            total = 0.0
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                if not region.contains(float(ts(0.5 * (lo + hi)))):
                    total += float(As(hi) - As(lo))
            per_dir[j] = total
        return 2.0 * trapezoid(per_dir, psi)


def _cumulative_area(sol, radii, n_dir):
    """int_0^r J(rho, psi) d rho per direction, via Gauss-Legendre on each radius."""
    nodes, weights = np.polynomial.legendre.leggauss(24)
    out = np.empty((len(radii), n_dir))
    for i, r in enumerate(radii):
        if r == 0:
            out[i] = 0.0
            continue
        pts = 0.5 * r * (nodes + 1.0)
        J = sol(pts).reshape(7, n_dir, -1)[4]
        out[i] = 0.5 * r * (J @ weights)
    return out


def offset_ball_measure(W: WarpedSurface, center, s: float, samples: int = 100_000,
                        seed: int = 0) -> tuple[float, float]:
    """Monte-Carlo estimate of |B(x, s)| with its standard error.

    ``center`` is ``(t0, theta0)``; by rotational symmetry only ``t0`` matters.
    """
    t0 = float(center[0])
    ball = exp_ball(W, t0, s)
    return ball.measure(samples, seed)


@lru_cache(maxsize=256)
def exp_ball(W: WarpedSurface, t0: float, s: float) -> ExpBall:
    return ExpBall(W, t0, s)
