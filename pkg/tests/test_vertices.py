import math
from fractions import Fraction

import numpy as np
import pytest

from vertexset.errors import (
    DegenerateLevelError,
    InputError,
    NoTransitionError,
)
from vertexset.poly import BivarPoly
from vertexset.surface import make_canonical_family
from vertexset.tracer import PolyField, intersect_curves, trace_zero_set
from vertexset.vertices import LevelAnalyzer, vertex_census_sweep

ELLIPSE = BivarPoly({(2, 0): Fraction(1, 4), (0, 2): Fraction(1)})
CIRCLE = BivarPoly({(2, 0): Fraction(1), (0, 2): Fraction(1)})

# transition level for the (1,0,2) family at (0.05, 0.02), polished on the
# tangency system; frozen from a converged run
KSTAR_05_02 = 6.81571725e-04
# saddle of the same family at (0.05, 0): nearest positive critical value
SADDLE_05_0 = (-0.046272, -0.301243, 0.02948599)


@pytest.fixture(scope="module")
def ellipse():
    return LevelAnalyzer(ELLIPSE)


@pytest.fixture(scope="module")
def deformed():
    return LevelAnalyzer(make_canonical_family(1, 0, 2).f_at((0.05, 0.02)))


class TestCensus:
    def test_ellipse_four_vertices(self, ellipse):
        c = ellipse.census(1.0, window=3.0)
        assert c.vertex_count == 4
        assert c.closed
        pts = sorted((round(x, 6), round(y, 6)) for x, y in
                     (r.point for r in c.records))
        assert pts == [(-2.0, 0.0), (0.0, -1.0), (0.0, 1.0), (2.0, 0.0)]
        for r in c.records:
            x, y = r.point
            if abs(x) > 1:
                assert abs(r.kappa - 2.0) < 1e-9
                assert r.extremum == "max"
            else:
                assert abs(r.kappa - 0.25) < 1e-9
                assert r.extremum == "min"
            assert r.degeneracy == 0

    def test_ellipse_vertex_residuals(self, ellipse):
        c = ellipse.census(1.0, window=3.0)
        for r in c.records:
            x, y = r.point
            assert abs(ellipse.field_f.value(x, y) - 1.0) < 1e-12
            assert abs(ellipse.field_v.value(x, y)) < 1e-9

    def test_circle_everywhere_vertex(self):
        with pytest.raises(DegenerateLevelError):
            LevelAnalyzer(CIRCLE).census(1.0, window=2.0)

    def test_nonpositive_level(self, ellipse):
        with pytest.raises(DegenerateLevelError):
            ellipse.census(0.0)
        with pytest.raises(DegenerateLevelError):
            ellipse.census(-0.5)

    def test_level_outside_window(self, ellipse):
        with pytest.raises(DegenerateLevelError):
            ellipse.census(1.0, window=0.6)

    def test_umbilic_level_has_six_vertices(self):
        la = LevelAnalyzer(make_canonical_family(1, 0, 2).f_at((0.0, 0.0)))
        c = la.census(1e-3)
        assert c.vertex_count == 6
        assert c.closed
        exts = [r.extremum for r in c.records]
        assert exts.count("max") == 3
        assert exts.count("min") == 3

    def test_counts_straddle_transition(self, deformed):
        assert deformed.census(KSTAR_05_02 * 0.5, classify=False).vertex_count == 4
        assert deformed.census(KSTAR_05_02 * 2.0, classify=False).vertex_count == 6

    def test_count_even_for_closed(self, deformed):
        for k in (2e-4, 1e-3, 4e-3):
            c = deformed.census(k, classify=False)
            assert c.closed
            assert c.vertex_count % 2 == 0

    def test_extrema_alternate_along_curve(self, deformed):
        c = deformed.census(2e-3)
        recs = sorted(c.records,
                      key=lambda r: math.atan2(r.point[1], r.point[0]))
        exts = [r.extremum for r in recs]
        assert all(e in ("max", "min") for e in exts)
        for a, b in zip(exts, exts[1:] + exts[:1]):
            assert a != b

    def test_rotation_invariant_count(self):
        f = make_canonical_family(1, 0, 2).f_at((0.05, 0.02))
        base = LevelAnalyzer(f).census(2e-3, classify=False).vertex_count
        rot = LevelAnalyzer(f.rotate(0.7)).census(2e-3, classify=False).vertex_count
        assert rot == base == 6

    def test_census_matches_curve_intersection(self, deformed):
        k = 2e-3
        c = deformed.census(k, classify=False)
        level = PolyField(deformed.f - k)
        lc = trace_zero_set(level, c.trace_radius * 1.05, 384)
        vc = trace_zero_set(deformed.field_v, c.trace_radius * 1.05, 384)
        pts = intersect_curves(lc.curves, vc.curves, level, deformed.field_v)
        assert len(pts) == c.vertex_count
        census_pts = np.array([r.point for r in c.records])
        for p in pts:
            d = np.linalg.norm(census_pts - p, axis=1).min()
            assert d < 1e-8


class TestClassify:
    def test_fd_matches_exact_on_ellipse(self, ellipse):
        for m in ("exact", "fd"):
            r = ellipse.classify_vertex((2.0, 0.0), 1.0, method=m, window=3.0)
            assert r.degeneracy == 0
            assert r.extremum == "max"
            assert abs(r.kappa - 2.0) < 1e-6

    def test_unknown_method(self, ellipse):
        with pytest.raises(InputError):
            ellipse.classify_vertex((2.0, 0.0), 1.0, method="magic", window=3.0)

    def test_merge_vertex_degeneracy_one_both_methods(self, deformed):
        res = deformed.count_transition(1e-4, 1e-2)
        for m in ("exact", "fd"):
            r = deformed.classify_vertex(res.merge_point, res.kstar, method=m)
            assert r.degeneracy == 1, m
            assert r.extremum == "none"


class TestCountTransition:
    def test_kstar_value_frozen(self, deformed):
        res = deformed.count_transition(1e-4, 1e-2)
        assert res.polished
        assert abs(res.kstar - KSTAR_05_02) / KSTAR_05_02 < 1e-6
        assert res.count_low == 4
        assert res.count_high == 6
        assert res.degeneracy == 1

    def test_kstar_independent_of_resolution(self, deformed):
        a = deformed.count_transition(1e-4, 1e-2, resolution=256)
        b = deformed.count_transition(1e-4, 1e-2, resolution=320)
        assert abs(a.kstar - b.kstar) / a.kstar < 1e-9

    def test_merge_point_on_both_loci(self, deformed):
        res = deformed.count_transition(1e-4, 1e-2)
        x, y = res.merge_point
        assert abs(deformed.field_v.value(x, y)) < 1e-15
        assert abs(deformed.field_w.value(x, y)) < 1e-12
        assert abs(deformed.field_f.value(x, y) - res.kstar) < 1e-15

    def test_no_transition_in_flat_range(self, deformed):
        with pytest.raises(NoTransitionError):
            deformed.count_transition(1e-4, 2e-4)

    def test_bad_bracket(self, deformed):
        with pytest.raises(InputError):
            deformed.count_transition(1e-2, 1e-4)
        with pytest.raises(InputError):
            deformed.count_transition(-1e-3, 1e-2)

    def test_scaling_along_ray(self):
        fam = make_canonical_family(1, 0, 2)
        u = np.array([0.05, 0.02])
        u /= np.linalg.norm(u)
        ratios = []
        for r in (0.04, 0.02):
            la = LevelAnalyzer(fam.f_at(tuple(r * u)))
            res = la.count_transition(0.02 * r * r, 2.0 * r * r,
                                      resolution=256)
            ratios.append(res.kstar / r ** 2)
        assert max(ratios) / min(ratios) < 2.0


class TestCriticalPoints:
    def test_deformed_critical_points(self):
        la = LevelAnalyzer(make_canonical_family(1, 0, 2).f_at((0.05, 0.0)))
        cps = la.critical_points(window=0.6)
        assert cps[0].kind == "min"
        assert abs(cps[0].value) < 1e-12
        assert np.hypot(*cps[0].point) < 1e-10
        sx, sy, sv = SADDLE_05_0
        saddles = [c for c in cps if c.kind == "saddle" and c.value > 0]
        s = min(saddles, key=lambda c: c.value)
        assert abs(s.value - sv) / sv < 1e-4
        assert abs(s.point[0] - sx) < 1e-4
        assert abs(s.point[1] - sy) < 1e-4

    def test_pure_quadratic_min_only(self):
        la = LevelAnalyzer(BivarPoly({(2, 0): Fraction(1), (0, 2): Fraction(2)}))
        cps = la.critical_points(window=0.5)
        assert len(cps) == 1
        assert cps[0].kind == "min"


class TestSweep:
    def test_errors_collected(self, deformed):
        sw = vertex_census_sweep(deformed, [2e-4, -1.0, 3e-3], classify=False)
        assert len(sw.censuses) == 2
        assert len(sw.errors) == 1
        assert sw.errors[0][0] == -1.0
        assert [c.vertex_count for c in sw.censuses] == [4, 6]

    def test_empty(self, deformed):
        sw = vertex_census_sweep(deformed, [])
        assert sw.censuses == []
        assert sw.errors == []

    def test_single_transition_in_ladder(self, deformed):
        # endpoints chosen so no ladder point sits on the transition itself
        ks = np.geomspace(KSTAR_05_02 / 3, KSTAR_05_02 * 5, 13)
        sw = vertex_census_sweep(deformed, ks, classify=False)
        counts = [c.vertex_count for c in sw.censuses]
        jumps = sum(1 for a, b in zip(counts, counts[1:]) if a != b)
        assert jumps == 1
        assert counts[0] == 4
        assert counts[-1] == 6


class TestAnalyzerValidation:
    def test_requires_bivar(self):
        with pytest.raises(InputError):
            LevelAnalyzer(make_canonical_family(1, 0, 2).f)

    def test_chain_matches_vertex_poly(self, ellipse):
        # first chain element pair: P1 is the vertex function itself;
        # exact coefficients make the identity exact
        p1, e1 = ellipse.kappa_polys[1]
        assert p1 == ellipse.vpoly
        assert e1 == 6
