"""Weighted (omega) lengths of paths and omega-distances between points.

The omega-distance is an infimum over all rectifiable paths. It is
approximated from above by minimising the omega-length of a polyline whose
end points are pinned. An independent shortest-path search on a planar grid
graph serves as a cross-check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import DomainError
from .geometry import Ball, as_vector, bounding_box, contains, domain_norm, project
from .paths import Polyline, integrate, integrate_segment, segment
from .weights import Weight

log = logging.getLogger(__name__)

__all__ = [
    "GeodesicConfig",
    "DistanceResult",
    "omega_length",
    "omega_distance",
    "omega_distance_grid_oracle",
    "LimRatioRow",
    "LimRatioTable",
    "lim_ratio_check",
    "unit_directions",
]

# Gauss-Legendre rule on [0, 1] for the per-segment surrogate objective
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL_NODES = 0.5 * (_GL_NODES + 1.0)
_GL_WEIGHTS = 0.5 * _GL_WEIGHTS


@dataclass(frozen=True)
class GeodesicConfig:
    control_points: int = 33
    max_iters: int = 2000
    step: float = 0.05
    shrink: float = 0.5
    tol: float = 1e-7
    margin: float = 1e-6
    integrate_tol: float = 1e-8
    # on the whole space, control points stay in the Euclidean ball of this
    # radius times max(1, |x|, |y|) about the origin
    confine: float = 10.0

    def __post_init__(self):
        if self.control_points < 2:
            raise ValueError("control_points must be at least 2")
        if self.max_iters < 1 or not self.step > 0 or not self.tol > 0 or not self.integrate_tol > 0:
            raise ValueError("max_iters, step, tol and integrate_tol must be positive")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if self.margin < 0:
            raise ValueError("margin must be non-negative")
        if not self.confine > 1:
            raise ValueError("confine must exceed 1")


@dataclass
class DistanceResult:
    value: float
    path: Polyline
    iterations: int
    converged: bool
    bound: str = "upper"
    history: list = field(default_factory=list, repr=False)

    def to_dict(self) -> dict:
        return {
            "value": float(self.value),
            "bound": self.bound,
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "control_points": len(self.path),
        }


def _check_path_inside(p: Polyline, w: Weight, margin: float):
    # the domain is convex, so checking the vertices covers every segment
    if w.domain is not None and not np.all(contains(w.domain, p.points, margin)):
        raise DomainError(f"path leaves the domain of weight {w.label!r}")


def omega_length(p: Polyline, w: Weight, tol: float = 1e-8, margin: float = 0.0) -> float:
    """Integral of ``w`` along ``p``."""
    _check_path_inside(p, w, margin)
    return integrate(w, p, tol)


def _polyline_length(p: Polyline, w: Weight, tol: float) -> float:
    """omega-length by adaptive quadrature on each straight piece."""
    pts = p.points
    per = tol / (len(pts) - 1)
    return float(sum(integrate_segment(w, a, b, per, p.norm) for a, b in zip(pts[:-1], pts[1:])))


class _SegmentCost:
    """Gauss-Legendre approximation of the omega-length of straight segments."""

    def __init__(self, w: Weight, order: float):
        self.w = w
        self.order = order

    def __call__(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        diff = b - a
        seg_len = np.linalg.norm(diff, ord=self.order, axis=-1)
        nodes = a[..., None, :] + _GL_NODES[:, None] * diff[..., None, :]
        return seg_len * (self.w(nodes) @ _GL_WEIGHTS)


def _refine(points: np.ndarray, target: int) -> np.ndarray:
    """Insert midpoints (or resample uniformly) to reach ``target`` points on the same path."""
    n = len(points)
    if 2 * n - 1 <= target:
        mids = 0.5 * (points[:-1] + points[1:])
        out = np.empty((2 * n - 1, points.shape[1]))
        out[0::2] = points
        out[1::2] = mids
        return out
    # resample at uniform arclength fractions
    gaps = np.linalg.norm(np.diff(points, axis=0), axis=-1)
    cum = np.concatenate([[0.0], np.cumsum(gaps)])
    s = np.linspace(0.0, cum[-1], target)
    return np.stack([np.interp(s, cum, points[:, k]) for k in range(points.shape[1])], axis=-1)


def _level_sizes(n: int) -> list[int]:
    sizes = [n]
    while sizes[-1] > 3:
        sizes.append((sizes[-1] + 1) // 2)
    return sizes[::-1]


def _descend(points, cost, dom, margin, cfg, budget, tol, history):
    """Red-black block descent on interior control points.

    Interior points of equal index parity do not share a segment, so each
    half-sweep updates them independently. Every accepted move strictly lowers
    its local cost, hence the total objective never increases.
    """
    pts = points.copy()
    n, m = pts.shape
    if n <= 2:
        return pts, 0, True
    seg = np.linalg.norm(np.diff(pts, axis=0), axis=-1)
    steps = np.minimum(cfg.step, 0.5 * np.minimum(seg[:-1], seg[1:]))
    seg_costs = cost(pts[:-1], pts[1:])
    total = float(seg_costs.sum())
    history.append(total)
    window = []
    it = 0
    converged = False
    eye = np.eye(m)
    while it < budget:
        it += 1
        start_total = total
        for parity in (1, 2):
            idx = np.arange(parity, n - 1, 2)
            if idx.size == 0:
                continue
            left, mid, right = pts[idx - 1], pts[idx], pts[idx + 1]
            local = seg_costs[idx - 1] + seg_costs[idx]
            h = 1e-6 * np.maximum(np.minimum(np.linalg.norm(mid - left, axis=-1), np.linalg.norm(right - mid, axis=-1)), 1e-12)
            grad = np.empty_like(mid)
            for k in range(m):
                e = h[:, None] * eye[k]
                up = cost(left, mid + e) + cost(mid + e, right)
                dn = cost(left, mid - e) + cost(mid - e, right)
                grad[:, k] = (up - dn) / (2 * h)
            gnorm = np.linalg.norm(grad, axis=-1)
            ok = gnorm > 0
            direction = np.where(ok[:, None], grad / np.where(ok, gnorm, 1.0)[:, None], 0.0)
            # moves stay within half the shorter adjacent segment, so the
            # Gauss-Legendre surrogate never has to resolve a stretched segment
            gaps = np.minimum(np.linalg.norm(mid - left, axis=-1), np.linalg.norm(right - mid, axis=-1))
            s = np.minimum(steps[idx - 1], 0.5 * gaps)
            trial = mid - s[:, None] * direction
            if dom is not None:
                trial = project(dom, trial, margin)
            c_left = cost(left, trial)
            c_right = cost(trial, right)
            better = ok & (c_left + c_right < local)
            # keep consecutive points distinct
            better &= np.any(trial != left, axis=-1) & np.any(trial != right, axis=-1)
            pts[idx[better]] = trial[better]
            seg_costs[idx[better] - 1] = c_left[better]
            seg_costs[idx[better]] = c_right[better]
            steps[idx - 1] = np.where(better, s * 1.25, s * cfg.shrink)
        total = float(seg_costs.sum())
        history.append(total)
        window.append(start_total - total)
        if len(window) > 20:
            window.pop(0)
        scale = max(float(np.linalg.norm(pts[-1] - pts[0])), 1e-300)
        if (len(window) == 20 and sum(window) < tol) or np.all(steps < 1e-13 * scale):
            converged = True
            break
    return pts, it, converged


def omega_distance(x, y, w: Weight, cfg: GeodesicConfig | None = None) -> DistanceResult:
    """Upper bound on the omega-distance from a locally optimised polyline.

    The straight chord is the starting path (valid because every shipped
    domain is convex). Optimisation runs coarse to fine: a 3-point polyline
    is relaxed, its segments are split, and so on up to
    ``cfg.control_points`` points. The reported value is the accurate
    omega-length of the final path, or of the chord if that is shorter.
    """
    cfg = cfg or GeodesicConfig()
    x = as_vector(x)
    y = as_vector(y, x.shape[-1])
    if np.array_equal(x, y):
        raise ValueError("omega_distance needs distinct points")
    dom = w.domain
    if dom is not None and not (contains(dom, x, cfg.margin) and contains(dom, y, cfg.margin)):
        raise DomainError("end points must lie inside the weight's domain (with margin)")
    nspec = domain_norm(dom)
    cost = _SegmentCost(w, nspec.exponent)
    search = dom
    if dom is None:
        radius = cfg.confine * max(1.0, float(np.linalg.norm(x)), float(np.linalg.norm(y)))
        search = Ball(np.zeros(x.shape[-1]), radius)

    chord = segment(x, y, nspec)
    history: list = []
    pts = np.stack([x, y])
    iters = 0
    converged = True
    sizes = _level_sizes(cfg.control_points)
    if cfg.control_points == 2:
        sizes = []
    for level, size in enumerate(sizes):
        pts = _refine(pts, size)
        final = level == len(sizes) - 1
        tol = cfg.tol if final else 10 * cfg.tol
        budget = cfg.max_iters - iters if final else max(1, min(200, cfg.max_iters - iters))
        if budget <= 0:
            converged = False
            break
        pts, used, conv = _descend(pts, cost, search, cfg.margin if dom is not None else 0.0, cfg, budget, tol, history)
        iters += used
        if final:
            converged = conv

    path = Polyline(pts, nspec)
    value = _polyline_length(path, w, cfg.integrate_tol)
    chord_value = _polyline_length(chord, w, cfg.integrate_tol)
    if chord_value <= value:
        path, value = chord, chord_value
    if not converged:
        log.warning("omega_distance stopped after %d sweeps without meeting tol=%g", iters, cfg.tol)
    return DistanceResult(value=value, path=path, iterations=iters, converged=converged, history=history)


_STENCILS = {
    8: [(1, 0), (0, 1), (1, 1), (1, -1)],
    16: [(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1)],
    32: [
        (1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1),
        (1, 3), (3, 1), (1, -3), (3, -1), (2, 3), (3, 2), (2, -3), (3, -2),
    ],
}


def omega_distance_grid_oracle(x, y, w: Weight, resolution: int = 400, stencil: int = 8, margin: float = 1e-6) -> float:
    """Shortest-path approximation of the omega-distance on a regular planar grid.

    Grid nodes inside the margin-shrunk domain are linked to their
    ``stencil``-neighbourhood (8, 16 or 32 neighbours); an edge costs its
    length times the mean of the end-point weights. ``x`` and ``y`` are
    attached to every grid node within two cells.
    """
    x = as_vector(x, 2)
    y = as_vector(y, 2)
    if stencil not in _STENCILS:
        raise ValueError("stencil must be 8, 16 or 32")
    dom = w.domain
    if dom is None:
        raise ValueError("the grid oracle needs a bounded domain")
    if not (contains(dom, x, margin) and contains(dom, y, margin)):
        raise DomainError("end points must lie inside the domain")
    order = domain_norm(dom).exponent
    lo, hi = bounding_box(dom, 2)
    n = resolution + 1
    gx = np.linspace(lo[0], hi[0], n)
    gy = np.linspace(lo[1], hi[1], n)
    h = max(gx[1] - gx[0], gy[1] - gy[0])
    X, Y = np.meshgrid(gx, gy, indexing="ij")
    nodes = np.stack([X.ravel(), Y.ravel()], axis=-1)
    inside = contains(dom, nodes, margin)
    ids = -np.ones(n * n, dtype=np.int64)
    ids[inside] = np.arange(inside.sum())
    ids = ids.reshape(n, n)
    coords = nodes[inside]
    wv = w(coords)

    rows, cols, vals = [], [], []
    for di, dj in _STENCILS[stencil]:
        i0, i1 = max(0, -di), n - max(0, di)
        j0, j1 = max(0, -dj), n - max(0, dj)
        a = ids[i0:i1, j0:j1].ravel()
        b = ids[i0 + di:i1 + di, j0 + dj:j1 + dj].ravel()
        keep = (a >= 0) & (b >= 0)
        a, b = a[keep], b[keep]
        d = np.linalg.norm(coords[a] - coords[b], ord=order, axis=-1)
        rows.append(a)
        cols.append(b)
        vals.append(d * 0.5 * (wv[a] + wv[b]))

    k = coords.shape[0]
    src, dst = k, k + 1
    wx, wy = float(w(x)), float(w(y))
    for node, idx, wn in ((x, src, wx), (y, dst, wy)):
        d = np.linalg.norm(coords - node, ord=order, axis=-1)
        near = np.nonzero(d <= 2.0 * h)[0]
        if near.size == 0:
            raise DomainError("end point not connectable to the grid; increase resolution")
        rows.append(np.full(near.size, idx))
        cols.append(near)
        vals.append(np.maximum(d[near], 1e-300) * 0.5 * (wv[near] + wn))
    graph = coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(k + 2, k + 2)
    ).tocsr()
    dist = dijkstra(graph, directed=False, indices=src)
    out = float(dist[dst])
    if not np.isfinite(out):
        raise DomainError("end points not connected on the grid; increase resolution")
    return out


def unit_directions(dim: int, count: int) -> np.ndarray:
    """Deterministic, evenly spread unit vectors.

    Equally spaced angles in the plane; a Fibonacci lattice on the sphere in
    three dimensions; coordinate axes plus normalised Halton points otherwise.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim == 2:
        ang = 2 * np.pi * np.arange(count) / count
        return np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    if dim == 3:
        i = np.arange(count) + 0.5
        z = 1 - 2 * i / count
        r = np.sqrt(1 - z * z)
        th = np.pi * (1 + 5 ** 0.5) * i
        return np.stack([r * np.cos(th), r * np.sin(th), z], axis=-1)
    from scipy.stats import qmc
    from scipy.special import ndtri

    axes = np.concatenate([np.eye(dim), -np.eye(dim)])
    extra = max(count - axes.shape[0], 0)
    if extra == 0:
        return axes[:count]
    pts = qmc.Halton(dim, scramble=False).random(extra + 1)[1:]
    g = ndtri(np.clip(pts, 1e-12, 1 - 1e-12))
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    return np.concatenate([axes, g])


@dataclass(frozen=True)
class LimRatioRow:
    radius: float
    max_deviation: float
    min_ratio: float
    max_ratio: float


@dataclass(frozen=True)
class LimRatioTable:
    point: tuple
    weight_at_point: float
    rows: tuple
    shrinking: bool

    def to_dict(self) -> dict:
        return {
            "point": list(self.point),
            "weight_at_point": self.weight_at_point,
            "rows": [
                {"radius": r.radius, "max_deviation": r.max_deviation, "min_ratio": r.min_ratio, "max_ratio": r.max_ratio}
                for r in self.rows
            ],
            "shrinking": self.shrinking,
        }


def lim_ratio_check(x, w: Weight, radii, cfg: GeodesicConfig | None = None, directions: int = 16) -> LimRatioTable:
    """Worst deviation of d_w(x, x + r u) / r from w(x) over a fixed direction set, per radius.

    ``radii`` must be decreasing. ``shrinking`` records whether the worst
    deviation is non-increasing along the sequence.
    """
    cfg = cfg or GeodesicConfig()
    x = as_vector(x)
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii) or any(a <= b for a, b in zip(radii, radii[1:])):
        raise ValueError("radii must be positive and strictly decreasing")
    wx = float(w(x))
    dirs = unit_directions(x.shape[-1], directions)
    rows = []
    for r in radii:
        ys = x + r * dirs
        if w.domain is not None and not np.all(contains(w.domain, ys, cfg.margin)):
            raise DomainError(f"radius {r} leaves the domain")
        ratios = np.array([omega_distance(x, y, w, cfg).value / r for y in ys])
        dev = np.abs(ratios - wx)
        rows.append(LimRatioRow(r, float(dev.max()), float(ratios.min()), float(ratios.max())))
    devs = [row.max_deviation for row in rows]
    shrinking = all(b <= a for a, b in zip(devs, devs[1:]))
    return LimRatioTable(tuple(float(c) for c in x), wx, tuple(rows), shrinking)
