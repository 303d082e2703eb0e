"""Acceptance battery: named checks measuring documented properties.

Each check exercises one end-to-end property of the toolkit against a
stated tolerance and reports the measured value next to it, so a failure
is directly actionable.  Checks are grouped into suites; ``all`` runs
the full battery in order.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .bifurcation import (
    classify_at,
    cup_reference,
    cup_section,
    discriminant_angles,
    kstar_field,
    pairing_flip_1param,
    two_degenerate_vertex,
    vertex_set_self_intersection,
)
from .errors import InputError, VertexSetError
from .poly import BivarPoly
from .surface import make_canonical_family
from .tracer import TRACE_TOL, PolyField, analyze_vertex_set, intersect_curves, trace_zero_set
from .vertexfn import (
    build_vertex_function,
    jet_structure_check,
    oracle_residuals,
    vertex_poly,
)
from .vertices import LevelAnalyzer


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: str
    seconds: float


def _circ_dist_deg(a: float, b: float) -> float:
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def _dir(theta_deg: float, r: float) -> tuple:
    th = math.radians(theta_deg)
    return (r * math.cos(th), r * math.sin(th))


def _xy() -> tuple:
    return BivarPoly.variable("x"), BivarPoly.variable("y")


# -- the checks --------------------------------------------------------------


def _check_curvature_identity():
    # calibrated identity V = |grad f|^6 dkappa/ds at 1000 random points of
    # the working disc r <= 0.5 per surface, relative residual < 1e-8;
    # surfaces of revolution give V identically zero
    X, Y = _xy()
    surfaces = [X**2 + Y**2 + X**3, X**2 + Y**2 + X**3 - Y**3]
    rng = np.random.default_rng(0)
    worst = 0.0
    for f in surfaces:
        fx, fy = f.diff("x"), f.diff("y")
        pts = []
        while len(pts) < 1000:
            u, th = rng.uniform(0.0, 1.0), rng.uniform(0.0, 2.0 * math.pi)
            r = 0.5 * math.sqrt(u)
            p = (r * math.cos(th), r * math.sin(th))
            if math.hypot(fx.eval(*p), fy.eval(*p)) > 1e-6:
                pts.append(p)
        res = oracle_residuals(f, np.array(pts), grad_floor=1e-6)
        worst = max(worst, float(res.max()))
    revolution_zero = vertex_poly(X**2 + Y**2).is_zero
    passed = worst < 1e-8 and revolution_zero
    return passed, (f"max rel residual {worst:.3e} (tol 1e-8) over 2x1000 "
                    f"points; V(x^2+y^2) == 0: {revolution_zero}")


def _check_jet_structure():
    # parameter-linear quartic jet and tau = 0 quintic jet are exact
    # multiples of their model shapes for three normal-form families
    worst = 0.0
    for abc in ((1, 0, 2), (0, 0, 1), (1, 2, 0)):
        js = jet_structure_check(make_canonical_family(*abc))
        worst = max(worst, float(js.defect4), float(js.defect5),
                    float(js.quartic_at_zero_size))
    passed = worst < 1e-10
    return passed, (f"max coefficient defect {worst:.3e} (tol 1e-10) over "
                    f"(a,b,c) in {{(1,0,2),(0,0,1),(1,2,0)}}")


def _branch_angles(v: BivarPoly, radius: float, resolution: int = 512,
                   r_fit: float | None = None) -> list:
    an = analyze_vertex_set(v, radius=radius, resolution=resolution,
                            r_fit=r_fit)
    return sorted(math.degrees(b.line_angle) % 180.0
                  for b in an.branches.branches)


def _line_dist_deg(a: float, b: float) -> float:
    d = abs(a - b) % 180.0
    return min(d, 180.0 - d)


def _match_line_angles(got: list, want: list) -> float:
    # unordered matching so a branch reported as 179.99 pairs with 0
    best = math.inf
    for perm in itertools.permutations(got):
        worst = max(_line_dist_deg(g, w) for g, w in zip(perm, want))
        best = min(best, worst)
    return best


def _check_origin_branches():
    fam = make_canonical_family(1, 0, 2)
    vp = build_vertex_function(fam)
    worst = 0.0

    got0 = _branch_angles(vp.at_zero(), 0.25)
    if len(got0) != 3:
        return False, f"tau=0 gave {len(got0)} branches, expected 3"
    worst = max(worst, _match_line_angles(got0, [30.0, 90.0, 150.0]))

    rho = 0.1
    got_ax = _branch_angles(vp.substitute_params((0.1, 0.0)), rho / 12.0,
                            r_fit=rho / 16.0)
    if len(got_ax) != 2:
        return False, f"tau=(0.1,0) gave {len(got_ax)} branches, expected 2"
    worst = max(worst, _match_line_angles(got_ax, [0.0, 90.0]))

    r = 0.05
    for th in (20.0, 45.0, 80.0, 110.0, 170.0, 200.0, 265.0, 290.0):
        lam, mu = _dir(th, r)
        got = _branch_angles(vp.substitute_params((lam, mu)), r / 12.0,
                             r_fit=r / 16.0)
        if len(got) != 2:
            return False, f"theta={th} gave {len(got)} branches, expected 2"
        s = math.hypot(lam, mu)
        want = [math.degrees(math.atan2(-lam + sgn * s, mu)) % 180.0
                for sgn in (1, -1)]
        worst = max(worst, _match_line_angles(got, want))
        ortho_gap = abs(_line_dist_deg(got[0], got[1]) - 90.0)
        worst = max(worst, ortho_gap)
    passed = worst < 2.0
    return passed, (f"max tangent deviation {worst:.3f} deg (tol 2 deg) over "
                    f"tau=0, tau=(0.1,0), and 8 split directions at r=0.05")


def _check_discriminant_angles():
    fam = make_canonical_family(1, 0, 2)
    devs = {}
    for rp in (0.03, 0.015):
        scan = discriminant_angles(fam, rp)
        if len(scan.angles) != 6:
            return False, f"r_param={rp} found {len(scan.angles)} angles"
        devs[rp] = max(min(a % 60.0, 60.0 - a % 60.0) for a in scan.angles)
    passed = devs[0.03] < 3.0 and devs[0.015] < devs[0.03]
    return passed, (f"max deviation from 60k: {devs[0.03]:.3f} deg at "
                    f"r_param=0.03 (tol 3 deg), {devs[0.015]:.3f} deg at "
                    f"0.015 (must shrink)")


def _check_pairing_flip():
    fam = make_canonical_family(1, 0, 2)
    flips = []
    for th in (20.0, 80.0, 140.0):
        f = pairing_flip_1param(fam, th)
        if (f.label_minus + 3) % 6 != f.label_plus:
            return False, f"theta={th}: labels {f.label_minus}->{f.label_plus}"
        flips.append((th, f.label_minus, f.label_plus))
    want = {30.0: 3, 90.0: 2, 150.0: 1, 210.0: 0, 270.0: 5, 330.0: 4}
    for th, label in want.items():
        lab = classify_at(fam, _dir(th, 0.03))
        if lab.kind != "split" or lab.label != label:
            return False, (f"sector midpoint {th} deg classified "
                           f"{lab.kind}/{lab.label}, expected split/{label}")
    return True, (f"flips {flips} all shift by 3; six sector midpoints "
                  f"labeled 3,2,1,0,5,4")


def _check_count_transition():
    fam = make_canonical_family(1, 0, 2)
    la = LevelAnalyzer(fam.f_at((0.05, 0.02)))
    res = la.count_transition(2e-4, 2e-3)
    below = la.census(res.kstar / 2.0, classify=False).vertex_count
    above = la.census(2.0 * res.kstar, classify=False).vertex_count
    if (below, above) != (4, 6):
        return False, f"counts ({below}, {above}) across k*, expected (4, 6)"
    if res.degeneracy != 1:
        return False, f"merge degeneracy {res.degeneracy}, expected 1"
    radii = (0.04, 0.02, 0.01)
    field = kstar_field(fam, [_dir(20.0, r) for r in radii])
    qs = [s.q_value for s in field.samples]
    if any(q is None for q in qs):
        return False, f"k* field failed on the ray: {[s.error for s in field.samples]}"
    ratio = max(qs) / min(qs)
    passed = ratio < 2.0
    return passed, (f"counts 4 -> 6 across k* = {res.kstar:.6e}, merge "
                    f"degeneracy 1; k*/r^2 spread factor {ratio:.4f} over "
                    f"r in {radii} (tol 2)")


def _check_degenerate_level():
    fam = make_canonical_family(1, 0, 2)
    si = vertex_set_self_intersection(fam, (0.05, 0.0))
    td = two_degenerate_vertex(fam, (0.05, 0.0))
    sep = math.hypot(si.point[0] - td.point[0], si.point[1] - td.point[1])
    dmu = abs(si.tau[1] - td.tau[1])
    dk = abs(si.level - td.level) / td.level
    if not (sep < 1e-4 and dmu < 1e-6 and dk < 1e-4):
        return False, (f"node and doubly degenerate point disagree: "
                       f"sep={sep:.3e}, dmu={dmu:.3e}, dk_rel={dk:.3e}")
    if td.record.degeneracy != 2:
        return False, f"degeneracy {td.record.degeneracy} at the self-intersection level, expected 2"
    census = LevelAnalyzer(fam.f_at(td.tau)).census(td.level)
    degs = [r.degeneracy for r in census.records if r.degeneracy > 0]
    if degs != [2]:
        return False, f"census at the self-intersection level found degeneracies {degs}"
    # no level in the window carries two degenerate vertices at once
    worst_simultaneous = 0
    for tau in (td.tau, (0.05, 0.0)):
        la = LevelAnalyzer(fam.f_at(tau))
        for k in np.geomspace(2e-5, 5e-3, 16):
            cen = la.census(float(k))
            n_deg = sum(1 for r in cen.records if r.degeneracy > 0)
            worst_simultaneous = max(worst_simultaneous, n_deg)
    passed = worst_simultaneous <= 1
    return passed, (f"self-intersection level carries one degeneracy-2 vertex "
                    f"(sep {sep:.2e}, dmu {dmu:.2e}); max simultaneous "
                    f"degenerate vertices over 32 levels: {worst_simultaneous}")


def _check_cup_section():
    fam = make_canonical_family(1, 0, 2)
    k_hi, k_lo = 6e-4, 1.5e-4
    sec_hi = cup_section(fam, k_hi, 0.095)
    sec_lo = cup_section(fam, k_lo, 0.05)
    for name, sec in (("k", sec_hi), ("k/4", sec_lo)):
        if sec.partial:
            return False, f"{name} section partial: {sec.failed[:3]}"
        if len(sec.cusp_angles) != 6:
            return False, f"{name} section has {len(sec.cusp_angles)} cusps"
        if not np.allclose(sec.locus[0], sec.locus[-1]):
            return False, f"{name} section locus not closed"
    fan_step = 360.0 / 96.0
    align = 0.0
    for sec, rp in ((sec_hi, 0.06), (sec_lo, 0.03)):
        angles = discriminant_angles(fam, rp).angles
        for c in sec.cusp_angles:
            align = max(align, min(_circ_dist_deg(c, a) for a in angles))
    third = 96 // 3
    sym = float(np.max(np.abs(np.roll(sec_lo.radii, third) - sec_lo.radii))
                / np.min(sec_lo.radii))
    ratio = float(np.max(sec_hi.radii) / np.max(sec_lo.radii))
    ref0 = cup_reference(1.0)[0]
    ref_ok = abs(ref0[0] + 12.0) < 1e-12 and abs(ref0[1]) < 1e-12
    passed = (align <= fan_step and sym < 0.15 and 1.5 <= ratio <= 2.5
              and ref_ok)
    return passed, (f"6 cusps at both levels; cusp-discriminant alignment "
                    f"{align:.2f} deg (tol {fan_step:.2f}); 2pi/3 radius "
                    f"defect {sym:.3f} (tol 0.15); k -> k/4 diameter ratio "
                    f"{ratio:.3f} (tol [1.5, 2.5]); reference(1, 0) = (-12, 0): "
                    f"{ref_ok}")


def _check_fixture_branches():
    X, Y = _xy()
    worst = 0.0
    got_e = _branch_angles(vertex_poly(X**2 + 2 * Y**2 + X**3), 0.25)
    if len(got_e) != 2:
        return False, f"elliptic fixture gave {len(got_e)} branches, expected 2"
    for g, w in zip(got_e, (0.0, 90.0)):
        worst = max(worst, min(abs(g - w), 180.0 - abs(g - w)))
    worst = max(worst, abs(abs(got_e[0] - got_e[1]) - 90.0))
    got_h = _branch_angles(vertex_poly(X**2 - Y**2 + X**3 + Y**4), 0.25)
    if len(got_h) != 4:
        return False, f"hyperbolic fixture gave {len(got_h)} branches, expected 4"
    passed = worst < 2.0
    return passed, (f"elliptic: 2 orthogonal branches (max deviation "
                    f"{worst:.3f} deg, tol 2); hyperbolic: 4 branches at "
                    f"{[round(a, 1) for a in got_h]}")


def _check_cross_pipeline():
    fam = make_canonical_family(1, 0, 2)
    rng = np.random.default_rng(7)
    tol = 10.0 * TRACE_TOL
    worst = 0.0
    for _ in range(5):
        while True:
            th = rng.uniform(0.0, 360.0)
            if min(th % 60.0, 60.0 - th % 60.0) >= 8.0:
                break
        r = rng.uniform(0.02, 0.06)
        tau = _dir(th, r)
        k = float(np.exp(rng.uniform(np.log(2e-4), np.log(2e-3))))
        la = LevelAnalyzer(fam.f_at(tau))
        cen = la.census(k, classify=False)
        level = PolyField(la.f - k)
        lc = trace_zero_set(level, cen.trace_radius * 1.05, 384)
        vc = trace_zero_set(la.field_v, cen.trace_radius * 1.05, 384)
        pts = intersect_curves(lc.curves, vc.curves, level, la.field_v)
        if len(pts) != cen.vertex_count:
            return False, (f"tau={tau}, k={k:.3e}: census {cen.vertex_count} "
                           f"vs {len(pts)} intersections")
        census_pts = np.array([rec.point for rec in cen.records])
        used = set()
        for p in pts:
            d = np.linalg.norm(census_pts - p, axis=1)
            i = int(d.argmin())
            if i in used:
                return False, f"two intersections matched one census vertex"
            used.add(i)
            worst = max(worst, float(d[i]))
    passed = worst < tol
    return passed, (f"5 random (tau, k): counts equal, one-to-one match, "
                    f"max pairing distance {worst:.3e} (tol {tol:.1e})")


_CHECKS = {
    "curvature-identity": _check_curvature_identity,
    "jet-structure": _check_jet_structure,
    "origin-branches": _check_origin_branches,
    "discriminant-angles": _check_discriminant_angles,
    "pairing-flip": _check_pairing_flip,
    "count-transition": _check_count_transition,
    "degenerate-level": _check_degenerate_level,
    "cup-section": _check_cup_section,
    "fixture-branches": _check_fixture_branches,
    "cross-pipeline": _check_cross_pipeline,
}

SUITES = {
    "oracle": ("curvature-identity", "cross-pipeline"),
    "jets": ("jet-structure",),
    "branches": ("origin-branches", "fixture-branches"),
    "discriminant": ("discriminant-angles", "pairing-flip", "degenerate-level"),
    "cup": ("count-transition", "cup-section"),
    "all": tuple(_CHECKS),
}


def run_check(name: str) -> CheckResult:
    """Run one named check, timing it; library errors count as failure."""
    if name not in _CHECKS:
        raise InputError(f"unknown check {name!r}; have {sorted(_CHECKS)}")
    t0 = time.perf_counter()
    try:
        passed, measured = _CHECKS[name]()
    except VertexSetError as e:
        passed, measured = False, f"raised {type(e).__name__}: {e}"
    return CheckResult(name=name, passed=passed, measured=measured,
                       seconds=time.perf_counter() - t0)


def run_suite(suite: str) -> list:
    if suite not in SUITES:
        raise InputError(f"unknown suite {suite!r}; have {sorted(SUITES)}")
    return [run_check(name) for name in SUITES[suite]]
