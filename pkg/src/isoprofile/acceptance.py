"""Acceptance suite: one function per criterion, each returning a JSON-able dict.

Every result carries ``id``, ``name`` and ``pass``; the remaining keys are the
measured quantities.  No timings are recorded so reports are reproducible
byte for byte.  ``quick=True`` shrinks sample sizes and grids (used for the
determinism check, never for the pass/fail verdicts of the full suite).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exhaustion import (build_sqrt_exhaustion, gradient_majorant, gradient_norm, greene_wu_sandwich,
                         level_normal_divergence, verify_strict_convexity)
from .limits import remark_report
from .placement import PlacementScenario, fubini_average_check, find_witness, lambda_bound
from .profile import (FAMILIES, disk_profile, inf_over_r, inf_over_r_curve,
                      monotone_continuity_report, refine_grid, strict_monotonicity_check,
                      strictly_increasing, sublevel_profile_candidates, truncate_and_compensate)
from .space_forms import SpaceForm, ball_area, ball_volume, space_form_profile
from .surface import (SymmetricRegion, catalog_surface, cigar, hyperbolic, plane,
                      pole_ball_volume, region_volume)

CATALOG = ("plane", "hyperbolic", "cigar", "flare")


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    quick: bool = False
    mc_samples: int = 100_000

    @property
    def samples(self) -> int:
        return 20_000 if self.quick else self.mc_samples


def _rel(a, b) -> float:
    return abs(a - b) / abs(b)


def criterion_1(cfg: SuiteConfig) -> dict:
    """Quadrature vs closed-form ball volumes, and dV/dr vs sphere area."""
    rng = np.random.default_rng(cfg.seed)
    worst_vol = worst_fd = 0.0
    for _ in range(100):
        delta = float(rng.uniform(-4.0, 4.0))
        sf = SpaceForm(delta, 2)
        r_max = min(5.0, 0.99 * sf.max_radius)
        r = float(rng.uniform(0.01, r_max))
        worst_vol = max(worst_vol, _rel(ball_volume(sf, r, "quad"), ball_volume(sf, r, "closed")))
        h = 1e-5 * r
        fd = (ball_volume(sf, r + h, "closed") - ball_volume(sf, r - h, "closed")) / (2 * h)
        worst_fd = max(worst_fd, _rel(fd, ball_area(sf, r)))
    return {"id": 1, "name": "space-form consistency", "pairs": 100,
            "max_rel_volume_error": worst_vol, "max_rel_fd_error": worst_fd,
            "pass": worst_vol <= 1e-9 and worst_fd <= 1e-6}


def criterion_2(cfg: SuiteConfig) -> dict:
    """Running infimum over levels equals the space-form profile in constant curvature."""
    rows = {}
    ok = True
    for W, delta, special in ((plane(), 0.0, math.pi),
                              (hyperbolic(), -1.0, 2 * math.pi * (math.cosh(1) - 1))):
        spec = build_sqrt_exhaustion(W)
        sf = SpaceForm(delta, 2)
        vols = np.append(np.geomspace(0.1, 50.0, 20), special)
        worst = 0.0
        converged = True
        for v in vols:
            res = inf_over_r(W, spec, float(v))
            worst = max(worst, _rel(res.value, space_form_profile(sf, float(v))))
            converged &= res.converged
        special_val = inf_over_r(W, spec, special).value
        expect = 2 * math.pi if delta == 0 else 2 * math.pi * math.sinh(1)
        rows[W.catalog_id] = {"max_rel_error": worst, "all_converged": converged,
                              "special_volume": special, "special_value": special_val,
                              "special_expected": expect}
        ok &= worst <= 1e-8 and converged and _rel(special_val, expect) <= 1e-8
    return {"id": 2, "name": "profile oracle equality", "volumes_per_surface": 20, **rows, "pass": ok}


def _nested_radii(W):
    return np.linspace(0.6, 1.3, 8) if W.catalog_id == "flare" else np.linspace(0.8, 2.2, 8)


def criterion_3(cfg: SuiteConfig) -> dict:
    """Candidate profiles do not increase as the sublevel set grows."""
    out, ok = {}, True
    for name in CATALOG:
        W = catalog_surface(name)
        radii = _nested_radii(W)
        n_v = 10
        if cfg.quick:
            radii, n_v = radii[::2], 4
        vols = np.linspace(0.1, 0.95, n_v) * pole_ball_volume(W, radii[0])
        M = np.array([[sublevel_profile_candidates(W, float(r), float(v), FAMILIES)[0]
                       for v in vols] for r in radii])
        worst = float((np.diff(M, axis=0) / M[:-1]).max())
        out[name] = {"levels": len(radii), "volumes": n_v, "max_relative_increase": worst}
        ok &= worst <= 1e-9
    return {"id": 3, "name": "domain monotonicity", **out, "pass": ok}


def criterion_4(cfg: SuiteConfig) -> dict:
    """Strict increase of the candidate profile of C_1, with a corrupted negative control."""
    out, ok = {}, True
    for W in (plane(), hyperbolic(), cigar()):
        V = pole_ball_volume(W, 1.0)
        grid = np.linspace(0.05, 0.99, 50) * V
        rep, curve = strict_monotonicity_check(W, 1.0, grid)
        bad = curve.values.copy()
        bad[25] = bad[24] * (1 - 1e-6)
        control = strictly_increasing(bad, grid)
        out[W.catalog_id] = {"pass": rep.passed, "min_relative_increase": rep.min_relative_increase,
                             "negative_control_rejected": not control.passed}
        ok &= rep.passed and not control.passed
    return {"id": 4, "name": "strict monotonicity", **out, "pass": ok}


def _continuity_grid(W, n):
    R = 0.7 if W.catalog_id == "flare" else 2.0
    return np.linspace(0.1, pole_ball_volume(W, R), n)


def criterion_5(cfg: SuiteConfig) -> dict:
    """Non-decrease and vanishing jumps of disk and inf-over-levels profiles."""
    n = 21 if cfg.quick else 41
    out, ok = {}, True
    for name in CATALOG:
        W = catalog_surface(name)
        spec = build_sqrt_exhaustion(W)
        grid = _continuity_grid(W, n)
        fine = refine_grid(grid)
        row = {}
        for label, make in (("disk_profile", lambda g: disk_profile(W, g)),
                            ("inf_over_r", lambda g: inf_over_r_curve(W, spec, g))):
            rep = monotone_continuity_report(make(grid), make(fine))
            row[label] = {"pass": rep.passed, "max_jump": rep.max_jump,
                          "refined_max_jump": rep.refined_max_jump, "jump_ratio": rep.jump_ratio}
            ok &= rep.passed
        out[name] = row
    return {"id": 5, "name": "continuity suite", "points": n, **out, "pass": ok}


def placement_scenarios():
    P, H = plane(), hyperbolic()
    return {
        "flat_empty": (PlacementScenario(P, SymmetricRegion(), 1.0, 3.0, 1.0), math.pi / 36),
        "flat_ball": (PlacementScenario(P, SymmetricRegion.disk(1.0), 2.0, 4.0, 1.0), 3 * math.pi / 64),
        "hyperbolic_ball": (PlacementScenario(H, SymmetricRegion.disk(1.0), 2.0, 4.0, 1.0),
                            (math.cosh(2) - math.cosh(1)) / (math.cosh(4) - 1)
                            * 2 * math.pi * (math.cosh(0.5) - 1)),
    }


def criterion_6(cfg: SuiteConfig) -> dict:
    """Witness search, Fubini average and Lambda closed forms on three scenarios."""
    out, ok = {}, True
    r = 0.5
    for label, (sc, lam_expected) in placement_scenarios().items():
        lam = lambda_bound(sc, r)
        wit = find_witness(sc, r, 12 if cfg.quick else 24, cfg.samples, cfg.seed)
        fub = fubini_average_check(sc, r, 16 if cfg.quick else 64, cfg.samples, cfg.seed)
        lam_err = _rel(lam, lam_expected)
        out[label] = {"lambda": lam, "lambda_expected": lam_expected, "lambda_rel_error": lam_err,
                      "witness": wit.to_json(), "fubini": fub.to_json()}
        ok &= wit.passed and fub.passed and lam_err <= 1e-6
    return {"id": 6, "name": "placement witness", "r": r, "samples": cfg.samples, **out, "pass": ok}


def criterion_7(cfg: SuiteConfig) -> dict:
    """Hessian lower bound along random geodesics, gradient bound and sandwich on H^2."""
    W = hyperbolic()
    spec = build_sqrt_exhaustion(W)
    n = 20 if cfg.quick else 100
    stated = verify_strict_convexity(spec, n, cfg.seed, bound="unit")
    sharp = verify_strict_convexity(spec, n, cfg.seed, bound="sharp")
    d = np.linspace(0.0, 200.0, 2001)
    g = np.array([gradient_norm(spec, x) for x in d])
    maj = np.array([gradient_majorant(spec, x) for x in d])
    # |grad f| increases to 1/sqrt 2; the majorant 2|grad f| increases to L = sqrt 2
    grad_ok = bool(np.all(g <= math.sqrt(2)) and np.all(np.diff(g) > 0)
                   and math.sqrt(0.5) - g[-1] < 1e-4
                   and np.all(np.diff(maj) > 0) and math.sqrt(2) - maj[-1] < 1e-4)
    sandwich = greene_wu_sandwich(spec, np.linspace(1.0, 10.0, 91))
    return {"id": 7, "name": "convex exhaustion on the hyperbolic plane",
            "hessian_bound": stated.to_json(), "sharp_bound_check": sharp.to_json(),
            "gradient_norm_ok": grad_ok, "gradient_norm_max": float(g.max()),
            "gradient_majorant_max": float(maj.max()),
            "sandwich": {"L": sandwich.L, "K": sandwich.K, "pass": sandwich.passed},
            "pass": stated.passed and grad_ok and sandwich.passed}


def criterion_8(cfg: SuiteConfig) -> dict:
    """Positive-curvature instance: cigar convexity, convex level sets, disk profile below 2 pi."""
    W = cigar()
    spec = build_sqrt_exhaustion(W)
    conv = verify_strict_convexity(spec, 20 if cfg.quick else 100, cfg.seed, bound=None)
    ts = np.linspace(0.0, W.T_num, 2001)[1:]
    div = np.array([level_normal_divergence(spec, t) for t in ts])
    vols = np.linspace(0.1, 2 * math.pi * math.log(math.cosh(6.0)), 200)
    curve = disk_profile(W, vols)
    inc = bool(np.all(np.diff(curve.values) > 0))
    below = bool(np.all(curve.values < 2 * math.pi))
    return {"id": 8, "name": "cigar instance", "convexity": conv.to_json(),
            "min_level_divergence": float(div.min()), "disk_profile_increasing": inc,
            "disk_profile_below_2pi": below, "disk_profile_max": float(curve.values.max()),
            "pass": conv.passed and bool(div.min() > 0) and inc and below}


def criterion_9(cfg: SuiteConfig) -> dict:
    rep = remark_report()
    return {"id": 9, "name": "monotone limits", **rep}


FLAT_CERTIFICATE = 2 * math.pi * (1 + math.sqrt(0.0201))
STATED_CERTIFICATE = 7.173958


def criterion_10(cfg: SuiteConfig) -> dict:
    """Truncate-and-compensate on the flat example E = disk(1.01), rho = 1."""
    P = plane()
    E = SymmetricRegion.disk(1.01)
    sc = PlacementScenario(P, SymmetricRegion(), 2.0, 4.0, 1.0)
    comp = truncate_and_compensate(P, E, 1.0, sc, mc_samples=cfg.samples, seed=cfg.seed)
    vol_err = _rel(comp.volume, region_volume(P, E))
    cert_err = abs(comp.certificate - FLAT_CERTIFICATE)
    exceeds = comp.exact_perimeter is not None and comp.certificate >= comp.exact_perimeter * (1 - 1e-12)
    return {"id": 10, "name": "truncate and compensate", **comp.to_json(),
            "volume_rel_error": vol_err, "closed_form_certificate": FLAT_CERTIFICATE,
            "certificate_error": cert_err, "stated_certificate": STATED_CERTIFICATE,
            "stated_certificate_difference": comp.certificate - STATED_CERTIFICATE,
            "certificate_dominates_exact": exceeds,
            "pass": vol_err <= 1e-8 and cert_err <= 1e-6 and exceeds}


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10}


def run_suite(cfg: SuiteConfig, which=None) -> dict:
    which = sorted(CRITERIA) if which is None else list(which)
    results = [CRITERIA[k](cfg) for k in which]
    return {"seed": cfg.seed, "quick": cfg.quick, "criteria": results,
            "pass": all(r["pass"] for r in results)}
