"""Isoperimetric profiles of pole balls and of the whole surface.

``I_r(v)`` is the least *total* perimeter of a set of volume v inside the
sublevel set C_r (boundary lying on ∂C_r counts).  It is bounded above here by
explicit candidate families, which are exact in constant curvature while the
optimal disk fits.  ``I_M(v)`` is approached as the infimum of ``I_r(v)``
over an increasing schedule of levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy import optimize

from .exhaustion import ExhaustionSpec, level_for_radius, sublevel_radius
from .geodesics import _initial, _solve, exp_ball
from .placement import PlacementScenario, find_witness, witness_grid
from .space_forms import SpaceForm, ball_area, inverse_volume
from .surface import (TWO_PI, SymmetricRegion, WarpedSurface, curvature_inf, pole_ball_area,
                      pole_ball_volume, pole_radius, region_perimeter, region_truncate,
                      region_volume)

FAMILIES = ("PoleDisk", "InteriorBall", "ComplementAnnulus", "BoundaryBite")


def sweep_families(W: WarpedSurface) -> tuple:
    """Families worth evaluating in long sweeps over levels.

    When the curvature does not increase away from the pole, pole disks are
    isoperimetric in the whole surface (classical for constant curvature,
    Ritoré's theorem otherwise), so no bite can undercut the pole disk and
    the expensive bite shooting is skipped.
    """
    if W.monotone_curvature in ("const", "decreasing"):
        return tuple(f for f in FAMILIES if f != "BoundaryBite")
    return FAMILIES


@dataclass
class CandidateRegion:
    kind: str
    params: dict
    volume: float
    perimeter: float
    approximate: bool = False

    def describe(self) -> str:
        if not self.params:
            return ""
        return ";".join(f"{k}={v:.12g}" for k, v in self.params.items())


@dataclass
class ProfileCurve:
    surface: str
    kind: str
    grid: np.ndarray
    values: np.ndarray
    witnesses: list = field(default_factory=list)
    r: Optional[np.ndarray] = None

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.grid.shape != self.values.shape:
            raise ValueError("grid and values differ in length")
        if np.any(np.diff(self.grid) <= 0):
            raise ValueError("volume grid must be strictly increasing")

    def rows(self):
        for j, (v, val) in enumerate(zip(self.grid, self.values)):
            w = self.witnesses[j] if j < len(self.witnesses) else None
            r = None if self.r is None else self.r[j]
            yield {
                "v": float(v),
                "I": float(val),
                "kind": self.kind,
                "r": None if r is None else float(r),
                "candidate": w.kind if w else "",
                "candidate_param": w.describe() if w else "",
            }


# --- candidate families ----------------------------------------------------

def _pole_disk(W: WarpedSurface, v: float) -> CandidateRegion:
    R = pole_radius(W, v)
    return CandidateRegion("PoleDisk", {"R": R}, pole_ball_volume(W, R), pole_ball_area(W, R))


def disk_profile(W: WarpedSurface, v_grid: Sequence[float]) -> ProfileCurve:
    """Perimeter of the pole disk of volume v, for each v in the grid."""
    cands = [_pole_disk(W, float(v)) for v in v_grid]
    return ProfileCurve(W.catalog_id, "disk_profile", v_grid, [c.perimeter for c in cands], cands)


def _interior_ball(W, rho, v):
    if W.monotone_curvature != "const":
        return None
    sf = SpaceForm(float(W.pole_curvature if W.catalog_id != "plane" else 0.0), 2)
    try:
        s = inverse_volume(sf, v)
    except ValueError:
        return None
    if s > rho:
        return None
    return CandidateRegion("InteriorBall", {"t0": 0.0, "s": s}, v, ball_area(sf, s))


def _complement_annulus(W, rho, v):
    Vrho = pole_ball_volume(W, rho)
    a = pole_radius(W, Vrho - v)
    S = SymmetricRegion(((a, rho),))
    return CandidateRegion("ComplementAnnulus", {"a": a}, region_volume(W, S), region_perimeter(W, S))


@dataclass
class _Bite:
    x0: float
    h: float
    cap: float        # removed area
    perimeter: float  # total perimeter of C_rho minus the cap
    theta_end: float
    half_length: float


def _shoot_bite(W: WarpedSurface, rho: float, x0: float, h: float) -> Optional[_Bite]:
    """Half of the cut arc, from (x0, 0) heading in +y with geodesic curvature h."""
    t0 = abs(x0)
    theta0 = 0.0 if x0 >= 0 else math.pi
    psi = math.pi / 2 if x0 >= 0 else -math.pi / 2
    z0 = _initial(W, t0, theta0, psi)
    phi_r = float(W.phi(rho))

    def hit(_s, z):
        return math.hypot(z[0], z[1]) - rho
    hit.terminal, hit.direction = True, 1

    def back(_s, z):
        return z[1]
    back.terminal, back.direction = True, -1

    L_max = 2 * math.pi * phi_r + 4 * rho
    sol = _solve(W, z0, L_max, h, 1, events=[hit, back], rtol=1e-11)
    if sol.status != 1 or not sol.t_events[0].size:
        return None
    z = sol.y[:, -1]
    theta_e = math.atan2(z[1], z[0])
    if not 0 < theta_e < math.pi:
        return None
    cap_half = float(W.antiderivative(rho)) * theta_e - z[6]
    if not cap_half > 0:
        return None
    s_end = float(sol.t[-1])
    perim = TWO_PI * phi_r - 2 * theta_e * phi_r + 2 * s_end
    return _Bite(x0, h, 2 * cap_half, perim, theta_e, s_end)


class BiteFamily:
    """Precomputed table of boundary bites of C_rho over (h, x0).

    The cut arc is symmetric about the ray theta = 0 and crosses it at
    Cartesian abscissa ``x0``; the removed cap contains the point (rho, 0).
    """

    LAMBDAS = (-4.0, -2.0, -1.0, -0.5, -0.25, 0.0, 0.25, 0.5, 0.75, 0.9, 0.97)

    def __init__(self, W: WarpedSurface, rho: float, n_x: int = 20):
        self.W, self.rho = W, rho
        kappa = float(W.dphi(rho) / W.phi(rho))
        self.hs = [lam * kappa for lam in self.LAMBDAS]
        xs = rho * np.cos(np.pi * np.arange(1, n_x + 1) / (n_x + 1))
        self.table = []
        for h in self.hs:
            run = []
            for x0 in xs:
                b = _shoot_bite(W, rho, float(x0), h)
                if b is None:
                    if run:
                        break
                    continue
                if run and b.cap <= run[-1].cap:
                    break
                run.append(b)
            self.table.append(run)

    def estimate(self, cap: float):
        """Cheapest bite removing area ``cap`` by interpolation in the table."""
        best = None
        for h, run in zip(self.hs, self.table):
            for b0, b1 in zip(run, run[1:]):
                if b0.cap <= cap <= b1.cap:
                    w = (cap - b0.cap) / (b1.cap - b0.cap)
                    p = (1 - w) * b0.perimeter + w * b1.perimeter
                    if best is None or p < best[0]:
                        best = (p, h, b0.x0, b1.x0)
                    break
        return best

    def solve(self, cap: float, h: float, x_lo: float, x_hi: float) -> Optional[_Bite]:
        def g(x0):
            b = _shoot_bite(self.W, self.rho, x0, h)
            return math.nan if b is None else b.cap - cap
        try:
            x = optimize.brentq(g, x_lo, x_hi, xtol=1e-14, rtol=1e-14)
        except (ValueError, RuntimeError):
            return None
        return _shoot_bite(self.W, self.rho, x, h)


@lru_cache(maxsize=128)
def bite_family(W: WarpedSurface, rho: float) -> BiteFamily:
    return BiteFamily(W, rho)


def _boundary_bite(W, rho, v, threshold):
    fam = bite_family(W, float(rho))
    Vrho = pole_ball_volume(W, rho)
    cap = Vrho - v
    est = fam.estimate(cap)
    if est is None:
        return None
    p, h, xa, xb = est
    if p > threshold * (1 + 1e-6):
        return CandidateRegion("BoundaryBite", {"h": h, "x0": 0.5 * (xa + xb)}, v, p, approximate=True)
    b = fam.solve(cap, h, xa, xb)
    if b is None:
        return CandidateRegion("BoundaryBite", {"h": h, "x0": 0.5 * (xa + xb)}, v, p, approximate=True)
    return CandidateRegion("BoundaryBite", {"h": h, "x0": b.x0}, Vrho - b.cap, b.perimeter)


def sublevel_profile_candidates(W: WarpedSurface, rho: float, v: float,
                                families: Sequence[str] = FAMILIES):
    """Least total perimeter over the candidate families inside C_rho.

    Returns ``(value, best, candidates)``; ties go to the first family in
    FAMILIES order, so the pole disk wins ties.
    """
    Vrho = pole_ball_volume(W, rho)
    if not 0 < v < Vrho:
        raise ValueError(f"volume {v} outside (0, |C_rho|) = (0, {Vrho:.12g})")
    cands = []
    if "PoleDisk" in families:
        cands.append(_pole_disk(W, v))
    if "InteriorBall" in families:
        c = _interior_ball(W, rho, v)
        if c is not None:
            cands.append(c)
    if "ComplementAnnulus" in families:
        cands.append(_complement_annulus(W, rho, v))
    if "BoundaryBite" in families:
        threshold = min((c.perimeter for c in cands), default=math.inf)
        c = _boundary_bite(W, rho, v, threshold)
        if c is not None:
            cands.append(c)
    exact = [c for c in cands if not c.approximate]
    if not exact:
        raise RuntimeError("no candidate matches the volume constraint")
    best = exact[0]
    for c in exact[1:]:
        if c.perimeter < best.perimeter * (1 - 1e-12):
            best = c
    return best.perimeter, best, cands


def sublevel_profile(W: WarpedSurface, rho: float, v_grid, families=FAMILIES) -> ProfileCurve:
    vals, wits = [], []
    for v in v_grid:
        val, best, _ = sublevel_profile_candidates(W, rho, float(v), families)
        vals.append(val)
        wits.append(best)
    return ProfileCurve(W.catalog_id, f"sublevel_candidates({rho:.12g})", v_grid, vals, wits,
                        r=np.full(len(vals), rho))


# --- approximation by sublevel sets ----------------------------------------

@dataclass
class InfOverR:
    value: float
    r_achieving: float
    converged: bool
    levels: np.ndarray
    radii: np.ndarray
    values: np.ndarray
    running: np.ndarray
    witness: Optional[CandidateRegion] = None
    domain_monotone: bool = True


def default_schedule(spec: ExhaustionSpec, v: float, n: int = 32) -> np.ndarray:
    """Levels whose sublevel radii are geometric between R_v and 4 R_v (R_v excluded)."""
    W = spec.surface
    Rv = pole_radius(W, v)
    radii = np.geomspace(Rv, min(4 * Rv, W.T_num), n + 1)[1:]
    return np.array([level_for_radius(spec, d) for d in radii])


def inf_over_r(W: WarpedSurface, spec: ExhaustionSpec, v: float, r_schedule=None,
               families: Optional[Sequence[str]] = None, tail: int = 3) -> InfOverR:
    """Running infimum of I_r(v) along an increasing schedule of levels.

    ``families`` defaults to :func:`sweep_families`.
    """
    if spec.surface is not W:
        raise ValueError("exhaustion is defined on a different surface")
    families = sweep_families(W) if families is None else families
    levels = default_schedule(spec, v) if r_schedule is None else np.asarray(r_schedule, float)
    if np.any(np.diff(levels) <= 0):
        raise ValueError("r_schedule must be strictly increasing")
    radii = np.array([sublevel_radius(spec, r) for r in levels])
    vals = np.full(len(levels), math.inf)
    wits = [None] * len(levels)
    for k, rho in enumerate(radii):
        if rho <= 0 or rho > W.T_num or pole_ball_volume(W, rho) <= v:
            continue
        vals[k], wits[k], _ = sublevel_profile_candidates(W, float(rho), v, families)
    if not np.any(np.isfinite(vals)):
        raise ValueError(
            f"volume {v} does not fit in any scheduled sublevel set "
            f"(largest |C_r| = {pole_ball_volume(W, min(radii[-1], W.T_num)):.6g}); extend the schedule"
        )
    running = np.minimum.accumulate(vals)
    assert np.all(running[1:] <= running[:-1])
    finite = vals[np.isfinite(vals)]
    domain_monotone = bool(np.all(np.diff(finite) <= 1e-9 * np.abs(finite[:-1])))
    k_best = int(np.argmin(vals))
    last = running[-tail:]
    converged = bool(len(finite) >= tail and np.all(np.isfinite(last))
                     and np.ptp(last) <= 1e-12 * abs(last[-1]))
    return InfOverR(float(running[-1]), float(levels[k_best]), converged, levels, radii, vals,
                    running, wits[k_best], domain_monotone)


def inf_over_r_curve(W: WarpedSurface, spec: ExhaustionSpec, v_grid,
                     families: Optional[Sequence[str]] = None) -> ProfileCurve:
    vals, wits, rs = [], [], []
    for v in v_grid:
        res = inf_over_r(W, spec, float(v), families=families)
        vals.append(res.value)
        wits.append(res.witness)
        rs.append(res.r_achieving)
    return ProfileCurve(W.catalog_id, "inf_over_r", v_grid, vals, wits, r=np.array(rs))


# --- truncate and compensate -----------------------------------------------

@dataclass
class Compensation:
    E_truncated: SymmetricRegion
    ball_center: Optional[float]
    ball_radius: float
    sizing_radius: float
    deficit: float
    volume: float
    target_volume: float
    certificate: float
    exact_perimeter: Optional[float]
    slice_length: float
    disjoint: bool

    def to_json(self) -> dict:
        return {
            "E_truncated": [list(iv) for iv in self.E_truncated.intervals],
            "ball_center_t": self.ball_center,
            "ball_radius": self.ball_radius,
            "sizing_radius": self.sizing_radius,
            "deficit": self.deficit,
            "volume": self.volume,
            "target_volume": self.target_volume,
            "certificate": self.certificate,
            "exact_perimeter": self.exact_perimeter,
            "slice_length": self.slice_length,
            "disjoint": self.disjoint,
        }


def _hull_misses(region: SymmetricRegion, t0: float, s: float) -> bool:
    lo, hi = max(0.0, t0 - s), t0 + s
    return all(b < lo or a > hi for a, b in region.intervals)


def truncate_and_compensate(W: WarpedSurface, E: SymmetricRegion, rho: float,
                            placement: PlacementScenario, mc_samples: int = 100_000,
                            seed: int = 0, grid_density: int = 24) -> Compensation:
    """Replace E by (E ∩ C_rho) ∪ B(x, s*) with the same volume.

    The ball radius is first sized from Lambda (``sizing_radius``), a centre
    is found by the witness search in D, and s* is then fitted so the ball
    adds exactly the lost volume.  The certificate bounds P(F) by
    P(E, int C_rho) + |E ∩ ∂C_rho| + A_kappa(s*), with kappa the least
    curvature around the ball (area comparison).
    """
    E_cut, slice_length = region_truncate(W, E, rho)
    vol_E = region_volume(W, E)
    deficit = vol_E - region_volume(W, E_cut)
    if deficit <= 1e-15 * max(1.0, vol_E):
        P = region_perimeter(W, E)
        return Compensation(E, None, 0.0, 0.0, 0.0, vol_E, vol_E, P, P, 0.0, True)

    sc = placement.with_E(E_cut) if placement.surface is W else None
    if sc is None:
        raise ValueError("placement scenario lives on a different surface")
    factor = sc.volume_D / (sc.volume_B - sc.volume_E)
    sf = SpaceForm(sc.delta, 2)
    try:
        s_size = inverse_volume(sf, deficit * factor)
    except ValueError:
        s_size = math.inf
    if not s_size < sc.radius_cap:
        raise ValueError(
            f"deficit {deficit:.6g} needs a compensating ball of radius {s_size:.6g}, "
            f"beyond the admissible bound {sc.radius_cap:.6g}"
        )
    wit = find_witness(sc, s_size, grid_density, mc_samples, seed)
    if not wit.passed:
        raise RuntimeError("witness search failed to certify a ball placement")

    t0 = wit.x_t
    if not _hull_misses(E_cut, t0, s_size):
        for cand in witness_grid(sc, s_size, grid_density):
            if _hull_misses(E_cut, cand, s_size):
                t0 = float(cand)
                break
    disjoint = _hull_misses(E_cut, t0, s_size)
    ball = exp_ball(W, float(t0), float(s_size))
    if disjoint:
        def added(s):
            return ball.volume_at(s) - deficit
    else:
        def added(s):
            return ball.measure_outside_exact(E_cut, s) - deficit
    s_star = optimize.brentq(added, s_size * 1e-9, s_size, xtol=1e-15, rtol=1e-15)
    volume = region_volume(W, E_cut) + added(s_star) + deficit

    kappa = curvature_inf(W, (max(0.0, t0 - s_star), t0 + s_star))
    certificate = region_perimeter(W, E_cut) + ball_area(SpaceForm(kappa, 2), s_star)
    exact = region_perimeter(W, E_cut) + ball.boundary_length_at(s_star) if disjoint else None
    return Compensation(E_cut, t0, s_star, s_size, deficit, volume, vol_E, certificate, exact,
                        slice_length, disjoint)


# --- monotonicity and continuity checks ------------------------------------

@dataclass
class ContinuityReport:
    passed: bool
    nondecreasing: bool
    worst_decrease: float
    modulus: float
    max_jump: float
    refined_max_jump: Optional[float] = None
    jump_ratio: Optional[float] = None
    refinement_ok: Optional[bool] = None
    violations: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in (
            "passed", "nondecreasing", "worst_decrease", "modulus", "max_jump",
            "refined_max_jump", "jump_ratio", "refinement_ok")} | {"violations": self.violations}


def _jumps(curve: ProfileCurve):
    dI = np.diff(curve.values)
    dv = np.diff(curve.grid)
    return dI, dv


def monotone_continuity_report(curve: ProfileCurve, refined: Optional[ProfileCurve] = None,
                               tol: float = 1e-9, ratio_target: float = 0.5,
                               ratio_slack: float = 0.3) -> ContinuityReport:
    """Non-decrease and vanishing jumps of a sampled profile.

    With ``refined`` (the same profile on a 2x refined grid) the largest jump
    must shrink by ``ratio_target`` within ``ratio_slack`` relative.
    """
    dI, dv = _jumps(curve)
    scale = np.maximum(1.0, np.abs(curve.values[:-1]))
    dec = -dI / scale
    bad = np.flatnonzero(dec > tol)
    violations = [{"v0": float(curve.grid[j]), "v1": float(curve.grid[j + 1]),
                   "I0": float(curve.values[j]), "I1": float(curve.values[j + 1])} for j in bad]
    nondecreasing = not violations
    max_jump = float(np.max(np.abs(dI))) if dI.size else 0.0
    modulus = float(np.max(np.abs(dI) / dv)) if dI.size else 0.0
    report = ContinuityReport(nondecreasing, nondecreasing, float(max(0.0, dec.max(initial=0.0))),
                              modulus, max_jump, violations=violations)
    if refined is not None:
        rI, _ = _jumps(refined)
        rj = float(np.max(np.abs(rI)))
        ratio = rj / max_jump if max_jump > 0 else 0.0
        ok = abs(ratio - ratio_target) <= ratio_slack * ratio_target
        r_rep = monotone_continuity_report(refined, tol=tol)
        report.refined_max_jump = rj
        report.jump_ratio = ratio
        report.refinement_ok = ok
        report.passed = report.passed and ok and r_rep.nondecreasing
    return report


def refine_grid(grid) -> np.ndarray:
    """Insert midpoints: n points become 2n - 1."""
    grid = np.asarray(grid, dtype=float)
    out = np.empty(2 * len(grid) - 1)
    out[0::2] = grid
    out[1::2] = 0.5 * (grid[:-1] + grid[1:])
    return out


@dataclass
class StrictReport:
    passed: bool
    min_relative_increase: float
    violations: list

    def to_json(self) -> dict:
        return {"pass": self.passed, "min_relative_increase": self.min_relative_increase,
                "violations": self.violations}


def strictly_increasing(values, grid, tol: float = 1e-9) -> StrictReport:
    values = np.asarray(values, dtype=float)
    rel = np.diff(values) / np.abs(values[:-1])
    bad = np.flatnonzero(~(rel > tol))
    viol = [{"v0": float(grid[j]), "v1": float(grid[j + 1])} for j in bad]
    return StrictReport(not viol, float(rel.min()) if rel.size else math.inf, viol)


def strict_monotonicity_check(W: WarpedSurface, rho: float, v_grid,
                              families: Sequence[str] = FAMILIES, tol: float = 1e-9):
    """Candidate profile of C_rho must increase strictly along ``v_grid``."""
    Vrho = pole_ball_volume(W, rho)
    v_grid = np.asarray(v_grid, dtype=float)
    if np.any(np.diff(v_grid) <= 0) or v_grid[0] <= 0 or v_grid[-1] >= Vrho:
        raise ValueError("v_grid must be strictly increasing inside (0, |C_rho|)")
    curve = sublevel_profile(W, rho, v_grid, families)
    return strictly_increasing(curve.values, v_grid, tol), curve


def clip_volumes(Vrho: float, n: int, lo: float = 1e-4, hi: float = 1 - 1e-4) -> np.ndarray:
    """Volume sweep inside C_rho, clipped away from 0 and |C_rho|."""
    return np.linspace(lo * Vrho, hi * Vrho, n)
