"""Vertex censuses of individual level curves.

A vertex of a level curve of f is a point where the arclength derivative
of the curve's curvature vanishes, i.e. where the vertex function V of f
meets the curve.  For a fixed surface this module locates vertices level
by level: trace f = k, find sign changes of V along the traced curve,
sharpen each with a two-variable Newton iteration on (f - k, V), and
classify every vertex by curvature value, extremum type, and degeneracy.
Degeneracy uses the exact tangential derivative chain of the curvature by
default, with an independent finite-difference probe available for
cross-checking.  A transition search finds the level k* at which the
vertex count changes, polishing the merge point on the tangency system
(V, dV/ds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DegenerateLevelError,
    InputError,
    NoTransitionError,
    NumericError,
)
from .poly import BivarPoly
from .tracer import GRAD_FLOOR, TRACE_TOL, PolyField, trace_zero_set
from .vertexfn import kappa_derivative_polys, vertex_poly

DEG_TOL = 1e-4
FD_STEP_FACTOR = 1e-3


@dataclass(frozen=True)
class VertexRecord:
    """One vertex of one level curve.

    ``degeneracy`` is 0 for an ordinary vertex (second tangential curvature
    derivative nonzero), 1 when the second vanishes but the third does not,
    2 when the third also vanishes but the fourth does not, and
    "unresolved" when the first four derivatives all sit below threshold.
    ``extremum`` reads the first nonvanishing even derivative: "max", "min",
    or "none" for odd-order (inflection-like) vertices.
    """
    point: tuple
    level: float
    kappa: float
    degeneracy: int | str
    extremum: str


@dataclass
class LevelCensus:
    level: float
    vertex_count: int
    records: tuple
    closed: bool
    trace_radius: float
    residual_bound: float


@dataclass
class KStarResult:
    kstar: float
    merge_point: tuple
    bracket: tuple
    count_low: int
    count_high: int
    degeneracy: int | str
    polished: bool


@dataclass(frozen=True)
class CriticalPoint:
    point: tuple
    value: float
    kind: str  # "min" | "max" | "saddle"


class LevelAnalyzer:
    """Shared exact machinery for all level censuses of one surface."""

    def __init__(self, f: BivarPoly, *, grad_floor: float = GRAD_FLOOR):
        if not isinstance(f, BivarPoly):
            raise InputError("LevelAnalyzer works on a single surface polynomial")
        self.f = f
        self.grad_floor = grad_floor
        self.field_f = PolyField(f)
        self.vpoly = vertex_poly(f)
        self.field_v = PolyField(self.vpoly)
        chain = kappa_derivative_polys(f, 4)
        self.kappa_polys = chain
        self.g_poly = f.diff("x") ** 2 + f.diff("y") ** 2
        w = (self.vpoly.diff("y") * f.diff("x")
             - self.vpoly.diff("x") * f.diff("y"))
        self.wpoly = w
        self.field_w = PolyField(w)
        q = f.homogeneous_part(2)
        qm = np.array([[float(q.coeff(2, 0)), float(q.coeff(1, 1)) / 2.0],
                       [float(q.coeff(1, 1)) / 2.0, float(q.coeff(0, 2))]])
        self.quad_eigs = tuple(np.linalg.eigvalsh(qm))
        self._vertex_scale_cache: dict = {}

    # -- curvature derivative evaluation -----------------------------------

    def kappa_derivatives(self, pts: np.ndarray, order: int = 4) -> np.ndarray:
        """kappa and tangential derivatives 1..order at points, columns j=0..order."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        g = self.g_poly.eval_grid(pts[:, 0], pts[:, 1])
        g = np.maximum(g, self.grad_floor ** 2)
        out = np.empty((len(pts), order + 1))
        for j, (p, e) in enumerate(self.kappa_polys[:order + 1]):
            out[:, j] = p.eval_grid(pts[:, 0], pts[:, 1]) / g ** (e / 2.0)
        return out

    def _vertex_scale(self, radius: float) -> float:
        s = self._vertex_scale_cache.get(radius)
        if s is None:
            s = sum(abs(float(c)) * radius ** (i + j)
                    for (i, j), c in self.vpoly.terms.items())
            self._vertex_scale_cache[radius] = s
        return s

    # -- tracing a level -----------------------------------------------------

    def trace_level(self, k: float, *, resolution: int = 384,
                    window: float = 0.6, trace_tol: float = TRACE_TOL):
        """Trace f = k adaptively: grow the disc until the curve closes."""
        k = float(k)
        e_min = self.quad_eigs[0]
        if e_min > 0:
            if k <= 0:
                raise DegenerateLevelError(
                    f"level {k} at or below the organizing minimum has no curve"
                )
            r = min(window, 1.35 * math.sqrt(k / e_min))
        else:
            r = window
        level_poly = self.f - k
        tr = None
        while True:
            tr = trace_zero_set(PolyField(level_poly), r, resolution,
                                trace_tol=trace_tol)
            if not any(c.boundary_hits for c in tr.curves) and tr.curves:
                break
            if r >= window or not tr.curves:
                break
            r = min(window, 1.8 * r)
        if not tr.curves:
            raise DegenerateLevelError(f"no level curve found for k={k} "
                                       f"within radius {r}")
        return tr, r

    # -- the census -----------------------------------------------------------

    def census(self, k: float, *, resolution: int = 384, window: float = 0.6,
               deg_tol: float = DEG_TOL, trace_tol: float = TRACE_TOL,
               classify: bool = True) -> LevelCensus:
        """Count and classify the vertices of the level curve f = k."""
        tr, radius = self.trace_level(k, resolution=resolution, window=window,
                                      trace_tol=trace_tol)
        vmax = 0.0
        crossings = []
        for c in tr.curves:
            pts = c.points
            vv = self.field_v.values(pts)
            vmax = max(vmax, float(np.abs(vv).max()))
            s = np.where(vv >= 0.0, 1, -1)
            n = len(pts)
            idx_pairs = [(i, i + 1) for i in range(n - 1)]
            if c.closed and n > 2:
                idx_pairs.append((n - 1, 0))
            for i, j in idx_pairs:
                if s[i] * s[j] < 0:
                    crossings.append((pts[i], pts[j]))
        if vmax < 1e-13 * max(self._vertex_scale(radius), 1e-300):
            raise DegenerateLevelError(
                "vertex function vanishes along the whole level curve; "
                "every point is a vertex"
            )
        vertices = []
        for pa, pb in crossings:
            p = self._polish_vertex(pa, pb, k)
            if p is not None:
                vertices.append(p)
        vertices = self._drop_duplicates(vertices)
        records = tuple(self._record(p, k, radius, deg_tol, classify)
                        for p in vertices)
        return LevelCensus(level=k, vertex_count=len(records), records=records,
                           closed=all(c.closed for c in tr.curves),
                           trace_radius=radius,
                           residual_bound=max((c.residual_bound
                                               for c in tr.curves), default=0.0))

    def _project_to_level(self, p: np.ndarray, k: float, iters: int = 8) -> np.ndarray:
        for _ in range(iters):
            fv = self.field_f.value(p[0], p[1]) - k
            g = self.field_f.grads(p[None, :])[0]
            g2 = float(g @ g)
            if g2 < self.grad_floor ** 2:
                break
            p = p - (fv / g2) * g
            if abs(fv) / math.sqrt(g2) < 1e-14:
                break
        return p

    def _polish_vertex(self, pa: np.ndarray, pb: np.ndarray, k: float):
        """Bisect the sign change of V along the level arc, then Newton-polish."""
        va = self.field_v.value(pa[0], pa[1])
        lo, hi = np.array(pa, float), np.array(pb, float)
        for _ in range(30):
            mid = self._project_to_level(0.5 * (lo + hi), k)
            vm = self.field_v.value(mid[0], mid[1])
            if va * vm <= 0:
                hi = mid
            else:
                lo = mid
        p = 0.5 * (lo + hi)
        # joint Newton on (f - k, V)
        for _ in range(12):
            fv = self.field_f.value(p[0], p[1]) - k
            vv = self.field_v.value(p[0], p[1])
            gf = self.field_f.grads(p[None, :])[0]
            gv = self.field_v.grads(p[None, :])[0]
            det = gf[0] * gv[1] - gf[1] * gv[0]
            if abs(det) < 1e-300:
                break
            delta = np.linalg.solve(np.array([gf, gv]), -np.array([fv, vv]))
            p = p + delta
            if np.linalg.norm(delta) < 1e-14:
                break
        return p

    @staticmethod
    def _drop_duplicates(pts: list, eps: float = 1e-11) -> list:
        out: list = []
        for p in pts:
            if all(np.linalg.norm(p - q) > eps for q in out):
                out.append(p)
        return out

    def _record(self, p: np.ndarray, k: float, radius: float, deg_tol: float,
                classify: bool) -> VertexRecord:
        d = self.kappa_derivatives(p[None, :], order=4)[0]
        kappa = float(d[0])
        if not classify:
            return VertexRecord(point=(float(p[0]), float(p[1])), level=k,
                                kappa=kappa, degeneracy="unchecked",
                                extremum="none")
        scales = self._derivative_scales(k, radius)
        deg, extremum = _classify_from_derivatives(d[1:], scales, deg_tol)
        return VertexRecord(point=(float(p[0]), float(p[1])), level=k,
                            kappa=kappa, degeneracy=deg, extremum=extremum)

    def _derivative_scales(self, k: float, radius: float) -> np.ndarray:
        """Typical magnitudes of derivatives 1..4 along the level curve."""
        key = ("scales", k, radius)
        s = self._vertex_scale_cache.get(key)
        if s is not None:
            return s
        ring = np.linspace(0, 2 * math.pi, 96, endpoint=False)
        seeds = radius * 0.7 * np.column_stack([np.cos(ring), np.sin(ring)])
        pts = []
        for q in seeds:
            q = self._project_to_level(q.copy(), k)
            if abs(self.field_f.value(q[0], q[1]) - k) < 1e-9 * max(abs(k), 1e-9):
                pts.append(q)
        if len(pts) < 8:
            raise NumericError("could not sample the level curve for scaling")
        d = self.kappa_derivatives(np.array(pts), order=4)
        s = np.median(np.abs(d[:, 1:]), axis=0)
        s = np.maximum(s, 1e-300)
        self._vertex_scale_cache[key] = s
        return s

    # -- degeneracy classification -------------------------------------------

    def classify_vertex(self, point, level: float, *, method: str = "exact",
                        h_factor: float = FD_STEP_FACTOR,
                        deg_tol: float = DEG_TOL,
                        window: float = 0.6) -> VertexRecord:
        """Classify one vertex; ``method`` "exact" uses the derivative chain,
        "fd" differentiates the curvature along the curve numerically."""
        p = np.asarray(point, dtype=float)
        tr, radius = self.trace_level(level, window=window)
        scales = self._derivative_scales(level, radius)
        if method == "exact":
            d = self.kappa_derivatives(p[None, :], order=4)[0]
            derivs = d[1:]
            kappa = float(d[0])
        elif method == "fd":
            kappa, derivs = self._fd_derivatives(p, level, radius, h_factor)
        else:
            raise InputError(f"unknown classification method {method!r}")
        deg, extremum = _classify_from_derivatives(derivs, scales, deg_tol)
        return VertexRecord(point=(float(p[0]), float(p[1])), level=level,
                            kappa=kappa, degeneracy=deg, extremum=extremum)

    def _fd_derivatives(self, p: np.ndarray, k: float, radius: float,
                        h_factor: float):
        """Walk the level curve through p and fit curvature against arclength."""
        # the curve carries about three curvature oscillations, so one
        # oscillation spans roughly circumference / 3; step a small fraction
        circumference = 2 * math.pi * radius * 0.85
        h = max(h_factor, 1e-6) * circumference / (6 * math.pi) * 40
        center = np.array(p, float)
        sides = {}
        for direction in (1.0, -1.0):
            q = center.copy()
            walked = []
            for _ in range(4):
                g = self.field_f.grads(q[None, :])[0]
                t = np.array([-g[1], g[0]])
                t /= max(np.linalg.norm(t), 1e-300)
                q = self._project_to_level(q + direction * h * t, k)
                walked.append(q.copy())
            sides[direction] = walked
        ordered = list(reversed(sides[-1.0])) + [center] + sides[1.0]
        ss = [0.0]
        for a, b in zip(ordered[:-1], ordered[1:]):
            ss.append(ss[-1] + float(np.linalg.norm(b - a)))
        ss = np.array(ss) - ss[4]
        pts = np.array(ordered)
        kap = self.kappa_derivatives(pts, order=0)[:, 0]
        # degree-6 fit in arclength
        vmat = np.vander(ss, 7, increasing=True)
        coef, *_ = np.linalg.lstsq(vmat, kap, rcond=None)
        derivs = np.array([coef[j] * math.factorial(j) for j in range(1, 5)])
        return float(coef[0]), derivs

    # -- vertex count transitions -----------------------------------------------

    def count_transition(self, k_lo: float, k_hi: float, *,
                         counts: tuple = (4, 6), ladder: int = 49,
                         resolution: int = 256, rel_tol: float = 1e-4,
                         window: float = 0.6, deg_tol: float = DEG_TOL) -> KStarResult:
        """Find the level k* where the vertex count steps from counts[0] to [1].

        A geometric ladder locates a bracket, bisection narrows it to
        ``rel_tol`` relative width, and the merge point is polished on the
        tangency system (V = 0, dV/ds = 0); k* is then f at the merge point
        when that lands inside the bracket, otherwise the bisection midpoint.
        """
        if not 0 < k_lo < k_hi:
            raise InputError("need 0 < k_lo < k_hi")
        lo_c, hi_c = counts

        def count(k):
            try:
                return self.census(k, resolution=resolution, window=window,
                                   classify=False).vertex_count
            except DegenerateLevelError:
                return -1

        ks = np.geomspace(k_lo, k_hi, ladder)
        cs = [count(k) for k in ks]
        lo = hi = None
        for a, b, ca, cb in zip(ks, ks[1:], cs, cs[1:]):
            if ca == lo_c and cb == hi_c:
                lo, hi = a, b
                break
        if lo is None:
            raise NoTransitionError(
                f"no {lo_c} -> {hi_c} vertex count transition in "
                f"[{k_lo:.3e}, {k_hi:.3e}]; counts seen: {sorted(set(cs))}"
            )
        while hi / lo - 1.0 > rel_tol:
            mid = math.sqrt(lo * hi)
            if count(mid) <= lo_c:
                lo = mid
            else:
                hi = mid
        # the two nearest vertices just above the transition are the merging pair
        above = self.census(hi, resolution=resolution, window=window,
                            classify=False)
        pts = np.array([r.point for r in above.records])
        if len(pts) < 2:
            raise NumericError("transition bracket lost the merging pair")
        dd = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=2)
        dd[np.diag_indices(len(pts))] = np.inf
        i, j = np.unravel_index(np.argmin(dd), dd.shape)
        seed = 0.5 * (pts[i] + pts[j])
        merge = self._polish_tangency(seed)
        polished = False
        kstar = math.sqrt(lo * hi)
        if merge is not None:
            k_cand = self.field_f.value(merge[0], merge[1])
            if lo * (1 - 5 * rel_tol) <= k_cand <= hi * (1 + 5 * rel_tol):
                kstar = k_cand
                polished = True
        if merge is None:
            merge = seed
        rec = self.classify_vertex(merge, kstar, deg_tol=deg_tol)
        return KStarResult(kstar=float(kstar),
                           merge_point=(float(merge[0]), float(merge[1])),
                           bracket=(float(lo), float(hi)),
                           count_low=lo_c, count_high=hi_c,
                           degeneracy=rec.degeneracy, polished=polished)

    def _polish_tangency(self, seed: np.ndarray, iters: int = 20):
        p = np.array(seed, dtype=float)
        for _ in range(iters):
            vv = self.field_v.value(p[0], p[1])
            wv = self.field_w.value(p[0], p[1])
            gv = self.field_v.grads(p[None, :])[0]
            gw = self.field_w.grads(p[None, :])[0]
            det = gv[0] * gw[1] - gv[1] * gw[0]
            if abs(det) < 1e-300:
                return None
            delta = np.linalg.solve(np.array([gv, gw]), -np.array([vv, wv]))
            step = float(np.linalg.norm(delta))
            if step > 0.5:
                return None
            p = p + delta
            if step < 1e-14:
                return p
        return p

    # -- critical points of the surface ------------------------------------------

    def critical_points(self, window: float = 0.6, *, seeds: int = 21) -> list:
        """Nondegenerate critical points of f inside the window square."""
        xs = np.linspace(-window, window, seeds)
        found: list[CriticalPoint] = []
        for x0 in xs:
            for y0 in xs:
                p = np.array([x0, y0])
                ok = False
                for _ in range(30):
                    g = self.field_f.grads(p[None, :])[0]
                    if np.linalg.norm(g) < 1e-13:
                        ok = True
                        break
                    h = self.field_f.hessian(p[0], p[1])
                    det = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
                    if abs(det) < 1e-300:
                        break
                    delta = np.linalg.solve(h, -g)
                    if np.linalg.norm(delta) > 0.5 * window:
                        break
                    p = p + delta
                    if np.linalg.norm(delta) < 1e-15:
                        ok = np.linalg.norm(self.field_f.grads(p[None, :])[0]) < 1e-10
                        break
                if not ok or np.abs(p).max() > window:
                    continue
                if any(np.linalg.norm(p - np.array(c.point)) < 1e-8 for c in found):
                    continue
                h = self.field_f.hessian(p[0], p[1])
                det = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
                if det < 0:
                    kind = "saddle"
                elif h[0, 0] + h[1, 1] > 0:
                    kind = "min"
                else:
                    kind = "max"
                found.append(CriticalPoint(point=(float(p[0]), float(p[1])),
                                           value=float(self.field_f.value(*p)),
                                           kind=kind))
        found.sort(key=lambda c: abs(c.value))
        return found


def _classify_from_derivatives(derivs: np.ndarray, scales: np.ndarray,
                               deg_tol: float) -> tuple:
    """Degeneracy and extremum type from tangential derivatives 1..4."""
    small = [abs(float(derivs[j])) < deg_tol * float(scales[j])
             for j in range(4)]
    if not small[1]:
        deg = 0
    elif not small[2]:
        deg = 1
    elif not small[3]:
        deg = 2
    else:
        return "unresolved", "none"
    if deg == 0:
        extremum = "max" if derivs[1] < 0 else "min"
    elif deg == 2:
        extremum = "max" if derivs[3] < 0 else "min"
    else:
        extremum = "none"
    return deg, extremum


@dataclass
class CensusSweep:
    censuses: list
    errors: list


def vertex_census_sweep(analyzer: LevelAnalyzer, levels, **kwargs) -> CensusSweep:
    """Census many levels, collecting per-level failures instead of raising."""
    out = []
    errors = []
    for k in levels:
        try:
            out.append(analyzer.census(float(k), **kwargs))
        except (DegenerateLevelError, NumericError) as e:
            errors.append((float(k), f"{type(e).__name__}: {e}"))
    return CensusSweep(censuses=out, errors=errors)
