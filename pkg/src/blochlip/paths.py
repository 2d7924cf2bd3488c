"""Rectifiable paths as polylines: length, restriction, Riemann sums and path integrals.

A :class:`Polyline` is parameterised by the fraction of arclength travelled,
so ``s = 0`` is the start point, ``s = 1`` the end point, and a parameter cell
``[a, b]`` always has length ``(b - a) * length(p)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import integrate as _quad

from .errors import NonConvergenceError
from .geometry import EUCLIDEAN, NormSpec, as_vector, norm

MAX_CELLS = 2 ** 20

__all__ = [
    "Polyline",
    "Partition",
    "segment",
    "length",
    "restrict",
    "riemann_sum",
    "integrate",
    "integrate_segment",
    "uniform_partition",
    "read_polyline_csv",
    "write_polyline_csv",
]


class Polyline:
    """Ordered list of points (at least two) joined by straight segments."""

    def __init__(self, points, norm: NormSpec = EUCLIDEAN):
        pts = as_vector(points)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise ValueError("a polyline needs an (n >= 2, m) array of points")
        gaps = np.linalg.norm(np.diff(pts, axis=0), ord=norm.exponent, axis=-1)
        if np.any(gaps == 0):
            raise ValueError("consecutive duplicate points are not allowed")
        pts = pts.copy()
        pts.setflags(write=False)
        self.points = pts
        self.norm = norm
        self._gaps = gaps
        self._cum = np.concatenate([[0.0], np.cumsum(gaps)])

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def length(self) -> float:
        return float(self._cum[-1])

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"Polyline(n={len(self)}, dim={self.dim}, norm={self.norm}, length={self.length:.6g})"

    def __call__(self, s):
        """Point(s) at arclength fraction(s) ``s`` in [0, 1]."""
        s = np.asarray(s, dtype=float)
        target = np.clip(s, 0.0, 1.0) * self._cum[-1]
        idx = np.searchsorted(self._cum, target, side="right") - 1
        idx = np.clip(idx, 0, len(self._gaps) - 1)
        frac = (target - self._cum[idx]) / self._gaps[idx]
        p0 = self.points[idx]
        p1 = self.points[idx + 1]
        return p0 + frac[..., None] * (p1 - p0)

    def knot_fractions(self) -> np.ndarray:
        """Arclength fractions of the stored points."""
        return self._cum / self._cum[-1]


@dataclass(frozen=True)
class Partition:
    """Knots ``0 = t_0 < ... < t_n = 1`` with one tag ``s_i`` in each cell."""

    knots: np.ndarray
    tags: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        tags = np.asarray(self.tags, dtype=float)
        if knots.ndim != 1 or len(knots) < 2 or knots[0] != 0.0 or knots[-1] != 1.0:
            raise ValueError("knots must run from 0 to 1")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if tags.shape != (len(knots) - 1,):
            raise ValueError("need exactly one tag per cell")
        if np.any(tags < knots[:-1]) or np.any(tags > knots[1:]):
            raise ValueError("each tag must lie in its cell")
        object.__setattr__(self, "knots", knots)
        object.__setattr__(self, "tags", tags)


def uniform_partition(n: int, tag: str = "mid") -> Partition:
    """``n`` equal cells tagged at the left end, midpoint or right end."""
    knots = np.linspace(0.0, 1.0, n + 1)
    offset = {"left": 0.0, "mid": 0.5, "right": 1.0}[tag]
    tags = knots[:-1] + offset * np.diff(knots)
    return Partition(knots, np.clip(tags, knots[:-1], knots[1:]))


def segment(x, y, n: NormSpec = EUCLIDEAN) -> Polyline:
    x = as_vector(x)
    y = as_vector(y, x.shape[-1])
    if np.array_equal(x, y):
        raise ValueError("segment endpoints coincide")
    return Polyline(np.stack([x, y]), n)


def length(p: Polyline) -> float:
    return p.length


def restrict(p: Polyline, c: float, d: float) -> Polyline:
    """Sub-path between arclength fractions ``c < d``."""
    if not 0.0 <= c < d <= 1.0:
        raise ValueError(f"need 0 <= c < d <= 1, got c={c}, d={d}")
    if c == 0.0 and d == 1.0:
        return p
    frac = p.knot_fractions()
    inner = (frac > c) & (frac < d)
    pts = np.concatenate([p(np.array([c])), p.points[inner], p(np.array([d]))])
    # drop zero-length steps created when c or d falls on a knot
    keep = np.concatenate([[True], np.any(np.diff(pts, axis=0) != 0, axis=-1)])
    return Polyline(pts[keep], p.norm)


def _eval_field(f, pts):
    vals = np.asarray(f(pts), dtype=float).reshape(pts.shape[:-1])
    if not np.all(np.isfinite(vals)):
        raise ValueError("integrand is not finite at a tag point")
    return vals


def riemann_sum(f, p: Polyline, part: Partition) -> float:
    """sum_i f(p(s_i)) * length of p over cell i."""
    vals = _eval_field(f, p(part.tags))
    cells = np.diff(part.knots) * p.length
    return float(np.dot(vals, cells))


def integrate(f, p: Polyline, tol: float = 1e-8) -> float:
    """Path integral of a continuous field by dyadic midpoint refinement.

    Doubles the number of equal arclength cells until two successive sums
    differ by less than ``tol`` and returns the last one.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    n = 2
    prev = riemann_sum(f, p, uniform_partition(1))
    while n <= MAX_CELLS:
        cur = riemann_sum(f, p, uniform_partition(n))
        if abs(cur - prev) < tol:
            return cur
        prev = cur
        n *= 2
    raise NonConvergenceError(
        f"path integral did not settle to {tol:g} within {MAX_CELLS} cells",
        last=cur,
        previous=prev,
    )


def integrate_segment(f, x, y, tol: float = 1e-8, n: NormSpec = EUCLIDEAN) -> float:
    """||x - y|| times the ordinary integral of t -> f((1-t)x + ty) over [0, 1]."""
    x = as_vector(x)
    y = as_vector(y, x.shape[-1])
    scale = norm(x - y, n)
    if scale == 0:
        return 0.0

    def g(t):
        return float(_eval_field(f, ((1.0 - t) * x + t * y)[None, :])[0])

    out = _quad.quad(g, 0.0, 1.0, epsabs=0.5 * tol / scale, epsrel=0.0, limit=500, full_output=1)
    # a fourth element is QUADPACK's warning message
    if len(out) > 3:
        raise NonConvergenceError(f"segment quadrature did not reach {tol:g}: {out[3]}", last=scale * out[0])
    return float(scale * out[0])


def write_polyline_csv(p: Polyline, path) -> None:
    """One point per line after a ``# dim=<m> norm=<kind>`` header."""
    lines = [f"# dim={p.dim} norm={p.norm}"]
    lines += [",".join(repr(float(c)) for c in pt) for pt in p.points]
    Path(path).write_text("\n".join(lines) + "\n")


def read_polyline_csv(path) -> Polyline:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError("missing '# dim=<m> norm=<kind>' header")
    fields = dict(tok.split("=", 1) for tok in text[0][1:].split())
    dim = int(fields["dim"])
    nspec = NormSpec.parse(fields.get("norm", "euclidean"))
    rows = [[float(c) for c in line.split(",")] for line in text[1:] if line.strip()]
    pts = np.array(rows, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != dim:
        raise ValueError(f"rows do not match declared dim={dim}")
    return Polyline(pts, nspec)
