"""Tracing zero sets of bivariate polynomials on a disc.

The tracer walks a square-lattice sign grid (marching squares, lattice
zeros counted as positive so every cell has an even crossing count),
links edge crossings into chains, sharpens every point with a vectorized
Newton projection onto the zero set, and clips the chains to the disc,
recording where each curve meets the boundary circle.

Near a point where several arcs of the zero set cross (the origin for a
vertex function, a node of a level curve) the sign grid cannot be linked
reliably, so cells there are either excluded up front (``exclude_radius``)
or detected as singular and dropped, with the crossing point itself
recovered by a Newton iteration on the gradient.  Excluded origin zones
are repaired afterwards by ``origin_branches``, which pairs the cut ends
into straight-through branches and fits each branch tangent by a
total-least-squares line through the origin, sampled symmetrically on
both sides so the leading curvature bias of the two sides cancels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, InsufficientSamplingError, UnresolvedTopologyError
from .poly import BivarPoly
from .util import wrap_angle

TRACE_TOL = 1e-10
GRAD_FLOOR = 1e-9
MIN_RESOLUTION = 16


class PolyField:
    """A polynomial with cached first derivatives and array evaluation."""

    def __init__(self, p: BivarPoly):
        self.p = p
        self.px = p.diff("x")
        self.py = p.diff("y")
        self._hess = None

    def value(self, x: float, y: float) -> float:
        return float(self.p.eval(float(x), float(y)))

    def values(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return self.p.eval_grid(pts[..., 0], pts[..., 1])

    def grads(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        gx = self.px.eval_grid(pts[..., 0], pts[..., 1])
        gy = self.py.eval_grid(pts[..., 0], pts[..., 1])
        return np.stack([gx, gy], axis=-1)

    def values_grid(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        return self.p.eval_grid(X, Y)

    def hessian(self, x: float, y: float) -> np.ndarray:
        if self._hess is None:
            self._hess = (self.px.diff("x"), self.px.diff("y"), self.py.diff("y"))
        hxx, hxy, hyy = self._hess
        a = float(hxx.eval(float(x), float(y)))
        b = float(hxy.eval(float(x), float(y)))
        c = float(hyy.eval(float(x), float(y)))
        return np.array([[a, b], [b, c]])


@dataclass
class TracedCurve:
    """One connected arc of the zero set inside the disc.

    Points run along the curve so that steps align with the tangent frame
    (-Fy, Fx)/|grad F|.  ``boundary_hits`` holds the polar angles of the
    endpoints that lie on the disc boundary, in curve order; a closed curve
    has none.  ``residuals`` are first-order distances |F|/|grad F| to the
    true zero set, pointwise.
    """
    points: np.ndarray
    tangents: np.ndarray
    residuals: np.ndarray
    residual_bound: float
    closed: bool
    boundary_hits: tuple


@dataclass
class TraceResult:
    curves: list
    singular_points: np.ndarray
    radius: float
    resolution: int


@dataclass
class Branch:
    """A branch of the zero set through the origin, stitched across the cut."""
    points: np.ndarray
    line_angle: float
    side_angles: tuple
    boundary_hits: tuple
    fit_points: int
    fit_rms: float


@dataclass
class BranchSet:
    branches: list
    loose_curves: list
    r_origin: float
    r_fit: float


@dataclass
class PairingLabel:
    """How the six sector directions are joined by the traced curves.

    ``kind`` is "umbilic" when three branches pass straight through the
    origin, "split" when two do and one curve avoids it; then ``label`` is
    the lower sector index of the adjacent pair joined by the avoiding
    curve.
    """
    kind: str
    label: int | None
    pairs: tuple
    hit_angles: tuple
    anchor_angles: tuple


# -- marching squares -------------------------------------------------------


def _newton_project(field: PolyField, pts: np.ndarray, trace_tol: float,
                    grad_floor: float, step_cap: float, iters: int = 8):
    """Project points onto the zero set along the gradient, vectorized."""
    pts = np.array(pts, dtype=float)
    res = np.full(len(pts), np.inf)
    if not len(pts):
        return pts, res
    for _ in range(iters):
        f = field.values(pts)
        g = field.grads(pts)
        g2 = np.einsum("ij,ij->i", g, g)
        gn = np.sqrt(g2)
        res = np.abs(f) / np.maximum(gn, grad_floor)
        if res.max() <= trace_tol:
            break
        step = f / np.maximum(g2, grad_floor * grad_floor)
        move = step[:, None] * g
        mlen = np.linalg.norm(move, axis=1)
        scale = np.minimum(1.0, step_cap / np.maximum(mlen, 1e-300))
        pts = pts - move * scale[:, None]
    return pts, res


def _polish_critical(field: PolyField, p0: np.ndarray, tol: float, max_iter: int = 15):
    p = np.array(p0, dtype=float)
    for _ in range(max_iter):
        g = field.grads(p[None, :])[0]
        if np.linalg.norm(g) < tol:
            return p
        h = field.hessian(p[0], p[1])
        det = h[0, 0] * h[1, 1] - h[0, 1] * h[1, 0]
        if abs(det) < 1e-300:
            return None
        delta = np.linalg.solve(h, -g)
        if np.linalg.norm(delta) > 1.0:
            return None
        p = p + delta
    return p if np.linalg.norm(field.grads(p[None, :])[0]) < tol * 10 else None


def trace_zero_set(field: PolyField, radius: float, resolution: int = 512, *,
                   trace_tol: float = TRACE_TOL, exclude_radius: float = 0.0,
                   grad_floor: float = GRAD_FLOOR) -> TraceResult:
    """Trace {F = 0} inside the disc of the given radius around the origin.

    ``exclude_radius`` drops all lattice cells within that distance of the
    origin before linking, leaving cut ends for ``origin_branches`` to
    stitch.  Cells where four crossings meet a vanishing gradient and a
    near-zero value are recorded in ``singular_points`` and not linked.
    """
    if not isinstance(field, PolyField):
        field = PolyField(field)
    if radius <= 0:
        raise InputError("trace radius must be positive")
    if resolution < MIN_RESOLUTION:
        raise InputError(f"resolution below {MIN_RESOLUTION} cannot resolve a disc")
    n = int(resolution)
    # lattice square slightly larger than the disc, so that curves reaching
    # the boundary circle cross it strictly inside the grid
    half = radius * (1.0 + 8.0 / n)
    xs = np.linspace(-half, half, n + 1)
    h = xs[1] - xs[0]
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    Z = field.values_grid(X, Y)
    S = np.where(Z >= 0.0, 1, -1).astype(np.int8)

    cross_x = (S[:-1, :] * S[1:, :]) < 0          # edge (i,j)-(i+1,j)
    cross_y = (S[:, :-1] * S[:, 1:]) < 0          # edge (i,j)-(i,j+1)

    ix, jx = np.nonzero(cross_x)
    iy, jy = np.nonzero(cross_y)
    nx = len(ix)
    with np.errstate(divide="ignore", invalid="ignore"):
        tx = Z[ix, jx] / (Z[ix, jx] - Z[ix + 1, jx])
        ty = Z[iy, jy] / (Z[iy, jy] - Z[iy, jy + 1])
    px = np.column_stack([xs[ix] + tx * h, xs[jx]])
    py = np.column_stack([xs[iy], xs[jy] + ty * h])
    pos = np.vstack([px, py]) if nx + len(iy) else np.zeros((0, 2))

    ex_id = np.full(cross_x.shape, -1, dtype=np.int64)
    ex_id[ix, jx] = np.arange(nx)
    ey_id = np.full(cross_y.shape, -1, dtype=np.int64)
    ey_id[iy, jy] = nx + np.arange(len(iy))

    cnt = (cross_x[:, :-1].astype(np.int8) + cross_x[:, 1:]
           + cross_y[:-1, :] + cross_y[1:, :])
    active = cnt >= 2
    centers = 0.5 * (xs[:-1] + xs[1:])
    cr2 = centers[:, None] ** 2 + centers[None, :] ** 2
    if exclude_radius > 0:
        active &= cr2 > exclude_radius * exclude_radius

    # decide which four-crossing cells sit on a crossing of the zero set
    singular_cells = set()
    singular_pts = []
    quad = np.argwhere((cnt == 4) & active)
    if len(quad):
        qc = np.column_stack([centers[quad[:, 0]], centers[quad[:, 1]]])
        fq = field.values(qc)
        gq = np.linalg.norm(field.grads(qc), axis=1)
        gmed = float(np.median(np.linalg.norm(field.grads(pos), axis=1))) if len(pos) else 1.0
        gmed = max(gmed, grad_floor)
        for (ci, cj), fv, gv, c in zip(quad, fq, gq, qc):
            if exclude_radius > 0 and c[0] ** 2 + c[1] ** 2 <= (2 * exclude_radius) ** 2:
                continue
            if gv < 0.35 * gmed and abs(fv) < 0.5 * gmed * h:
                singular_cells.add((int(ci), int(cj)))
                p = _polish_critical(field, c, tol=grad_floor * 10)
                if p is not None and abs(field.value(*p)) < gmed * h:
                    singular_pts.append(p)

    adj: list[list[int]] = [[] for _ in range(len(pos))]

    def link(a: int, b: int):
        adj[a].append(b)
        adj[b].append(a)

    for ci, cj in np.argwhere(active):
        ci, cj = int(ci), int(cj)
        if (ci, cj) in singular_cells:
            continue
        bottom = ex_id[ci, cj] if cross_x[ci, cj] else -1
        top = ex_id[ci, cj + 1] if cross_x[ci, cj + 1] else -1
        left = ey_id[ci, cj] if cross_y[ci, cj] else -1
        right = ey_id[ci + 1, cj] if cross_y[ci + 1, cj] else -1
        edges = [e for e in (bottom, top, left, right) if e >= 0]
        if len(edges) == 2:
            link(edges[0], edges[1])
        elif len(edges) == 4:
            s_center = 1 if field.value(centers[ci], centers[cj]) >= 0 else -1
            if s_center == S[ci, cj]:
                link(bottom, right)
                link(top, left)
            else:
                link(bottom, left)
                link(top, right)

    pos, residuals = _newton_project(field, pos, trace_tol, grad_floor, step_cap=h)

    chains = _assemble_chains(adj)
    curves = []
    for node_ids, closed in chains:
        pts = pos[node_ids]
        res = residuals[node_ids]
        keep = np.ones(len(pts), dtype=bool)
        if len(pts) > 1:
            d = np.linalg.norm(np.diff(pts, axis=0), axis=1)
            keep[1:] = d > h * 1e-6
        pts, res = pts[keep], res[keep]
        if len(pts) < 2:
            continue
        curves.extend(_clip_to_disc(field, pts, res, radius, closed, trace_tol,
                                    grad_floor))
    curves = [c for c in curves
              if len(c.points) >= 3 or len(c.boundary_hits) == 2]
    sing = (np.array(singular_pts) if singular_pts else np.zeros((0, 2)))
    if len(sing) > 1:
        sing = _dedupe_points(sing, 2 * h)
    return TraceResult(curves=curves, singular_points=sing, radius=radius,
                       resolution=n)


def _assemble_chains(adj: list) -> list:
    """Split the degree-at-most-two link graph into open chains and cycles."""
    nnodes = len(adj)
    visited = np.zeros(nnodes, dtype=bool)
    chains = []
    for start in range(nnodes):
        if visited[start] or len(adj[start]) != 1:
            continue
        chain = [start]
        visited[start] = True
        prev, cur = start, adj[start][0]
        while True:
            chain.append(cur)
            visited[cur] = True
            nxt = [v for v in adj[cur] if v != prev]
            if not nxt or visited[nxt[0]]:
                break
            prev, cur = cur, nxt[0]
        chains.append((chain, False))
    for start in range(nnodes):
        if visited[start] or len(adj[start]) != 2:
            continue
        chain = [start]
        visited[start] = True
        prev, cur = start, adj[start][0]
        while cur != start and not visited[cur]:
            chain.append(cur)
            visited[cur] = True
            nxt = [v for v in adj[cur] if v != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
        closed = cur == start and len(chain) > 2
        chains.append((chain, closed))
    return chains


def _circle_hit(p_in: np.ndarray, p_out: np.ndarray, radius: float) -> np.ndarray:
    d = p_out - p_in
    a = float(d @ d)
    b = 2.0 * float(p_in @ d)
    c = float(p_in @ p_in) - radius * radius
    disc = b * b - 4 * a * c
    if a == 0 or disc < 0:
        return p_out * (radius / max(np.linalg.norm(p_out), 1e-300))
    t = (-b + math.sqrt(disc)) / (2 * a)
    t = min(max(t, 0.0), 1.0)
    return p_in + t * d


def _point_residual(field: PolyField, q: np.ndarray, grad_floor: float) -> float:
    g = field.grads(q[None, :])[0]
    return abs(field.value(q[0], q[1])) / max(float(np.linalg.norm(g)), grad_floor)


def _refine_on_circle(field: PolyField, q: np.ndarray, radius: float,
                      grad_floor: float) -> np.ndarray:
    for _ in range(6):
        f = field.value(q[0], q[1])
        g = field.grads(q[None, :])[0]
        g2 = float(g @ g)
        if g2 < grad_floor * grad_floor:
            break
        # project onto the zero set, then back onto the circle
        q = q - (f / g2) * g
        q = q * (radius / max(np.linalg.norm(q), 1e-300))
    return q


def _clip_to_disc(field: PolyField, pts: np.ndarray, res: np.ndarray,
                  radius: float, closed: bool, trace_tol: float,
                  grad_floor: float) -> list:
    norms = np.linalg.norm(pts, axis=1)
    inside = norms <= radius
    if closed and inside.all():
        return [_finish_curve(field, pts, res, True, (), grad_floor)]
    if closed:
        k0 = int(np.argmin(inside))
        pts = np.roll(pts, -k0, axis=0)
        res = np.roll(res, -k0)
        inside = np.roll(inside, -k0)
        pts = np.vstack([pts, pts[:1]])
        res = np.append(res, res[0])
        inside = np.append(inside, inside[0])
    if not inside.any():
        return []
    out = []
    k = 0
    n = len(pts)
    while k < n:
        if not inside[k]:
            k += 1
            continue
        a = k
        while k + 1 < n and inside[k + 1]:
            k += 1
        b = k
        seg = pts[a:b + 1]
        sres = res[a:b + 1]
        hits = []
        if a > 0:
            q = _refine_on_circle(field, _circle_hit(pts[a], pts[a - 1], radius),
                                  radius, grad_floor)
            seg = np.vstack([q, seg])
            sres = np.append(_point_residual(field, q, grad_floor), sres)
            hits.append(math.atan2(q[1], q[0]))
        if b < n - 1:
            q = _refine_on_circle(field, _circle_hit(pts[b], pts[b + 1], radius),
                                  radius, grad_floor)
            seg = np.vstack([seg, q])
            sres = np.append(sres, _point_residual(field, q, grad_floor))
            hits.append(math.atan2(q[1], q[0]))
        if len(seg) >= 2:
            out.append(_finish_curve(field, seg, sres, False, tuple(hits),
                                     grad_floor))
        k += 1
    return out


def _finish_curve(field: PolyField, pts: np.ndarray, res: np.ndarray,
                  closed: bool, hits: tuple, grad_floor: float) -> TracedCurve:
    g = field.grads(pts)
    gn = np.maximum(np.linalg.norm(g, axis=1), grad_floor)
    tangents = np.column_stack([-g[:, 1], g[:, 0]]) / gn[:, None]
    if len(pts) > 1:
        d = np.diff(pts, axis=0)
        score = float(np.sum(np.sign(np.einsum("ij,ij->i", d,
                                               0.5 * (tangents[:-1] + tangents[1:])))))
        if score < 0:
            pts = pts[::-1].copy()
            res = res[::-1].copy()
            tangents = tangents[::-1].copy()
            hits = tuple(reversed(hits))
    return TracedCurve(points=pts, tangents=tangents, residuals=res,
                       residual_bound=float(res.max()) if len(res) else 0.0,
                       closed=closed, boundary_hits=hits)


def _dedupe_points(pts: np.ndarray, eps: float) -> np.ndarray:
    kept: list[np.ndarray] = []
    for p in pts:
        if all(np.linalg.norm(p - q) > eps for q in kept):
            kept.append(p)
    return np.array(kept)


# -- origin branches ---------------------------------------------------------


def _min_cost_matching(cost: np.ndarray) -> list:
    n = cost.shape[0]
    best_pairs: list | None = None
    best_total = math.inf

    def rec(remaining: list, acc: list, total: float):
        nonlocal best_pairs, best_total
        if total >= best_total:
            return
        if not remaining:
            best_pairs, best_total = list(acc), total
            return
        a = remaining[0]
        for k in range(1, len(remaining)):
            b = remaining[k]
            rec(remaining[1:k] + remaining[k + 1:], acc + [(a, b)],
                total + cost[a, b])

    rec(list(range(n)), [], 0.0)
    return best_pairs if best_pairs is not None else []


def _mean_direction(pts: np.ndarray) -> float:
    u = pts / np.maximum(np.linalg.norm(pts, axis=1), 1e-300)[:, None]
    m = u.mean(axis=0)
    return math.atan2(m[1], m[0])


def _fit_line_through_origin(sides: list) -> tuple:
    """Total-least-squares line through the origin from per-side samples.

    Each side gets equal total weight so symmetric curvature bias cancels.
    Returns (line angle in [0, pi), angular rms, point count).
    """
    m = np.zeros((2, 2))
    npts = 0
    wtot = 0.0
    for pts in sides:
        if not len(pts):
            continue
        u = pts / np.linalg.norm(pts, axis=1)[:, None]
        w = 1.0 / len(pts)
        m += w * (u.T @ u)
        npts += len(pts)
        wtot += 1.0
    _, evecs = np.linalg.eigh(m)
    direction = evecs[:, 1]
    normal = evecs[:, 0]
    angle = math.atan2(direction[1], direction[0]) % math.pi
    # angular spread around the fitted line
    sq = 0.0
    for pts in sides:
        if not len(pts):
            continue
        u = pts / np.linalg.norm(pts, axis=1)[:, None]
        sq += (1.0 / len(pts)) * float(np.sum((u @ normal) ** 2))
    rms = math.sqrt(sq / max(wtot, 1e-300))
    return angle, rms, npts


def _split_end_hits(pts: np.ndarray, hits: tuple) -> tuple:
    """Assign each boundary-hit angle to the curve end it belongs to."""
    first, last = [], []
    a0 = math.atan2(pts[0][1], pts[0][0])
    a1 = math.atan2(pts[-1][1], pts[-1][0])
    for h in hits:
        if abs(wrap_angle(a0 - h)) <= abs(wrap_angle(a1 - h)):
            first.append(h)
        else:
            last.append(h)
    return tuple(first), tuple(last)


def origin_branches(curves: list, r_fit: float, *, fit_min: int = 8,
                    r_origin: float | None = None) -> BranchSet:
    """Stitch the cut ends around the origin into straight-through branches.

    Open curves with exactly one endpoint inside ``r_origin`` are rays; rays
    are paired into branches by minimizing the total mismatch between
    opposite directions over all perfect matchings.  A curve with both
    endpoints inside the origin zone, or one passing straight through it,
    already is a branch.  Tangents come from a through-origin
    total-least-squares fit over all branch points within ``r_fit``.
    """
    if r_origin is None:
        r_origin = r_fit / 10.0
    if not 0 < r_origin < r_fit:
        raise InputError("need 0 < r_origin < r_fit")
    rays = []        # (points ordered origin -> out, boundary hit angles)
    branches_raw = []  # (points, hits)
    loose = []
    for c in curves:
        if c.closed or not len(c.points):
            loose.append(c)
            continue
        d0 = float(np.linalg.norm(c.points[0]))
        d1 = float(np.linalg.norm(c.points[-1]))
        near0 = d0 <= 1.2 * r_origin
        near1 = d1 <= 1.2 * r_origin
        mind = float(np.min(np.linalg.norm(c.points, axis=1)))
        if near0 and near1:
            branches_raw.append((c.points, tuple(c.boundary_hits)))
        elif near0:
            rays.append((c.points, tuple(c.boundary_hits)))
        elif near1:
            rays.append((c.points[::-1], tuple(reversed(c.boundary_hits))))
        elif mind <= r_origin:
            # passes through the zone without being cut; split at the closest
            # approach so direction matching can re-pair the two halves (a
            # degenerate crossing may have been linked around the corner)
            m = int(np.argmin(np.linalg.norm(c.points, axis=1)))
            if m >= 3 and len(c.points) - m >= 4:
                ha, hb = _split_end_hits(c.points, c.boundary_hits)
                rays.append((c.points[m::-1], ha))
                rays.append((c.points[m:], hb))
            else:
                branches_raw.append((c.points, tuple(c.boundary_hits)))
        else:
            loose.append(c)
    if len(rays) % 2:
        raise UnresolvedTopologyError(
            f"odd number of cut ends ({len(rays)}) at the origin zone"
        )
    if len(rays) > 10:
        raise UnresolvedTopologyError(
            f"{len(rays)} cut ends at the origin zone; refine the grid"
        )
    if rays:
        phis = [_mean_direction(p[:max(3, len(p) // 4)]) for p, _ in rays]
        n = len(rays)
        cost = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                cost[i, j] = abs(wrap_angle(phis[i] + math.pi - phis[j]))
        for i, j in _min_cost_matching(cost):
            pi, hi = rays[i]
            pj, hj = rays[j]
            pts = np.vstack([pi[::-1], pj])
            branches_raw.append((pts, tuple(reversed(hi)) + hj))
    branches = []
    for pts, hits in branches_raw:
        norms = np.linalg.norm(pts, axis=1)
        gap = int(np.argmin(norms))
        side_a = pts[:gap + 1][norms[:gap + 1] <= r_fit]
        side_b = pts[gap + 1:][norms[gap + 1:] <= r_fit]
        if len(side_a) + len(side_b) < fit_min:
            raise InsufficientSamplingError(
                f"branch has {len(side_a) + len(side_b)} fit points, "
                f"needs {fit_min}; enlarge the fit radius or the grid"
            )
        angle, rms, npts = _fit_line_through_origin([side_a, side_b])
        sa = _mean_direction(side_a) if len(side_a) else angle
        sb = _mean_direction(side_b) if len(side_b) else angle + math.pi
        branches.append(Branch(points=pts, line_angle=angle,
                               side_angles=(sa, sb), boundary_hits=hits,
                               fit_points=npts, fit_rms=rms))
    return BranchSet(branches=branches, loose_curves=loose,
                     r_origin=r_origin, r_fit=r_fit)


def boundary_crossings(curves: list) -> list:
    """All boundary hit angles over a set of curves, sorted."""
    hits = []
    for c in curves:
        hits.extend(c.boundary_hits)
    return sorted(hits)


def classify_pairing(bs: BranchSet, anchor_angles) -> PairingLabel:
    """Match boundary hits to the six sector directions and read the pairing.

    Requires exactly six boundary hits matched one-to-one to the anchors.
    Three through-branches mean the configuration is the umbilic one; two
    through-branches plus one avoiding curve joining adjacent anchors give
    a split configuration labeled by the lower anchor index of that pair.
    """
    anchors = sorted(wrap_angle(a) for a in anchor_angles)
    if len(anchors) != 6:
        raise InputError("six anchor directions required")
    pair_sources = []
    for b in bs.branches:
        pair_sources.append(("branch", b.boundary_hits))
    for c in bs.loose_curves:
        if c.closed:
            continue
        pair_sources.append(("loose", c.boundary_hits))
    hits = []
    for _, hh in pair_sources:
        if len(hh) != 2:
            raise UnresolvedTopologyError(
                f"curve with {len(hh)} boundary hits cannot be paired"
            )
        hits.extend(hh)
    if len(hits) != 6:
        raise UnresolvedTopologyError(
            f"expected 6 boundary crossings, found {len(hits)}"
        )
    assignment = {}
    for h in hits:
        dists = [abs(wrap_angle(h - a)) for a in anchors]
        k = int(np.argmin(dists))
        if k in assignment.values():
            raise UnresolvedTopologyError(
                "two boundary crossings map to the same sector direction"
            )
        assignment[h] = k
    pairs = []
    avoiding = None
    for kind, (h1, h2) in pair_sources:
        i, j = sorted((assignment[h1], assignment[h2]))
        pairs.append((i, j))
        if kind == "loose":
            avoiding = (i, j)
    if len(bs.branches) == 3 and avoiding is None:
        return PairingLabel(kind="umbilic", label=None, pairs=tuple(pairs),
                            hit_angles=tuple(hits), anchor_angles=tuple(anchors))
    if len(bs.branches) == 2 and avoiding is not None:
        i, j = avoiding
        if (i + 1) % 6 == j:
            label = i
        elif (j + 1) % 6 == i:
            label = j
        else:
            raise UnresolvedTopologyError(
                f"avoiding curve joins non-adjacent sectors {avoiding}"
            )
        return PairingLabel(kind="split", label=label, pairs=tuple(pairs),
                            hit_angles=tuple(hits), anchor_angles=tuple(anchors))
    raise UnresolvedTopologyError(
        f"unexpected configuration: {len(bs.branches)} branches, "
        f"{len(pair_sources) - len(bs.branches)} avoiding curves"
    )


# -- curve intersections ------------------------------------------------------


def _segment_intersections(A: np.ndarray, B: np.ndarray) -> list:
    out = []
    a0, a1 = A[:-1], A[1:]
    b0, b1 = B[:-1], B[1:]
    da = a1 - a0
    db = b1 - b0
    amin = np.minimum(a0, a1)
    amax = np.maximum(a0, a1)
    bmin = np.minimum(b0, b1)
    bmax = np.maximum(b0, b1)
    chunk = 2048
    for s in range(0, len(a0), chunk):
        e = min(s + chunk, len(a0))
        overlap = ((amin[s:e, None, 0] <= bmax[None, :, 0])
                   & (amax[s:e, None, 0] >= bmin[None, :, 0])
                   & (amin[s:e, None, 1] <= bmax[None, :, 1])
                   & (amax[s:e, None, 1] >= bmin[None, :, 1]))
        ii, jj = np.nonzero(overlap)
        if not len(ii):
            continue
        ii = ii + s
        d = da[ii]
        e2 = db[jj]
        det = d[:, 0] * e2[:, 1] - d[:, 1] * e2[:, 0]
        ok = np.abs(det) > 1e-300
        r = b0[jj] - a0[ii]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (r[:, 0] * e2[:, 1] - r[:, 1] * e2[:, 0]) / det
            u = (r[:, 0] * d[:, 1] - r[:, 1] * d[:, 0]) / det
        ok &= (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
        for k in np.nonzero(ok)[0]:
            out.append(a0[ii[k]] + t[k] * d[k])
    return out


def intersect_curves(curves_a: list, curves_b: list, field_a: PolyField,
                     field_b: PolyField, *, tol: float = 1e-12,
                     max_iter: int = 12) -> np.ndarray:
    """Intersection points of two traced curve families, Newton-polished.

    Seeds come from exact polyline segment crossings; each seed is polished
    on the joint system (F_a, F_b) with the exact Jacobian.
    """
    seeds = []
    for ca in curves_a:
        if len(ca.points) < 2:
            continue
        alo = ca.points.min(axis=0)
        ahi = ca.points.max(axis=0)
        for cb in curves_b:
            if len(cb.points) < 2:
                continue
            blo = cb.points.min(axis=0)
            bhi = cb.points.max(axis=0)
            if (alo[0] > bhi[0] or blo[0] > ahi[0]
                    or alo[1] > bhi[1] or blo[1] > ahi[1]):
                continue
            seeds.extend(_segment_intersections(ca.points, cb.points))
    refined = []
    for p in seeds:
        q = np.array(p, dtype=float)
        for _ in range(max_iter):
            fa = field_a.value(q[0], q[1])
            fb = field_b.value(q[0], q[1])
            ga = field_a.grads(q[None, :])[0]
            gb = field_b.grads(q[None, :])[0]
            jac = np.array([ga, gb])
            det = jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0]
            if abs(det) < 1e-300:
                break
            delta = np.linalg.solve(jac, -np.array([fa, fb]))
            q = q + delta
            if np.linalg.norm(delta) < tol:
                break
        refined.append(q)
    if not refined:
        return np.zeros((0, 2))
    return _dedupe_points(np.array(refined), 10 * tol)


# -- driver --------------------------------------------------------------------


@dataclass
class VertexSetAnalysis:
    trace: TraceResult
    branches: BranchSet
    field: PolyField
    exclude_radius: float


def analyze_vertex_set(vpoly: BivarPoly, *, radius: float = 0.25,
                       resolution: int = 512, r_fit: float | None = None,
                       fit_min: int = 8, trace_tol: float = TRACE_TOL) -> VertexSetAnalysis:
    """Trace the zero set of a vertex function and assemble origin branches."""
    if r_fit is None:
        r_fit = radius / 3.0
    if not 0 < r_fit <= radius:
        raise InputError("need 0 < r_fit <= radius")
    field = PolyField(vpoly)
    h = 2.0 * radius / resolution
    exclude = max(r_fit / 20.0, 4.0 * h)
    tr = trace_zero_set(field, radius, resolution, trace_tol=trace_tol,
                        exclude_radius=exclude)
    bs = origin_branches(tr.curves, r_fit, fit_min=fit_min,
                         r_origin=exclude + 3.0 * h)
    return VertexSetAnalysis(trace=tr, branches=bs, field=field,
                             exclude_radius=exclude)
