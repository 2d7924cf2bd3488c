"""Points, norms and convex domains of R^m.

Points are plain 1-D float arrays; every function here also accepts a stack
of points of shape ``(..., m)`` and acts on the last axis.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


__all__ = [
    "NormSpec",
    "EUCLIDEAN",
    "MAX_NORM",
    "p_norm",
    "as_vector",
    "norm",
    "UnitBall",
    "Ball",
    "Box",
    "ConvexDomain",
    "contains",
    "project",
    "boundary_distance",
    "inradius",
    "bounding_box",
    "domain_norm",
]


@dataclass(frozen=True)
class NormSpec:
    """Selects a norm on R^m: ``euclidean``, ``p_norm`` (with ``p >= 1``) or ``max_norm``."""

    kind: str = "euclidean"
    p: float = 2.0

    def __post_init__(self):
        if self.kind not in ("euclidean", "p_norm", "max_norm"):
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "p_norm" and not self.p >= 1:
            raise ValueError(f"p-norm needs p >= 1, got {self.p}")

    @property
    def exponent(self) -> float:
        if self.kind == "euclidean":
            return 2.0
        if self.kind == "max_norm":
            return np.inf
        return float(self.p)

    def __str__(self):
        if self.kind == "p_norm":
            return f"p_norm({self.p:g})"
        return self.kind

    @classmethod
    def parse(cls, text: str) -> "NormSpec":
        text = text.strip()
        if text in ("euclidean", "max_norm"):
            return cls(text)
        if text.startswith("p_norm(") and text.endswith(")"):
            return cls("p_norm", float(text[7:-1]))
        raise ValueError(f"cannot parse norm spec {text!r}")


EUCLIDEAN = NormSpec("euclidean")
MAX_NORM = NormSpec("max_norm")


def p_norm(p: float) -> NormSpec:
    return NormSpec("p_norm", p)


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite float array, optionally checking the last-axis dimension."""
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if dim is not None and v.shape[-1] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.shape[-1]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite coordinates")
    return v


def norm(v, n: NormSpec = EUCLIDEAN, dim: int | None = None) -> np.ndarray | float:
    """Norm of ``v`` (last axis) for the selected :class:`NormSpec`."""
    v = as_vector(v, dim)
    out = np.linalg.norm(v, ord=n.exponent, axis=-1)
    return float(out) if out.ndim == 0 else out


def _euclid_expansion(n: NormSpec, dim: int) -> float:
    """sup of ||u||_n over Euclidean unit vectors u in R^dim."""
    p = n.exponent
    if p >= 2:
        return 1.0
    return float(dim ** (1.0 / p - 0.5))


@dataclass(frozen=True)
class UnitBall:
    """Open unit ball of a norm, centred at the origin (any dimension)."""

    norm: NormSpec = EUCLIDEAN

    def __str__(self):
        return f"unit_ball({self.norm})"


@dataclass(frozen=True)
class Ball:
    """Open Euclidean ball with a given centre and radius."""

    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    def __str__(self):
        return f"ball(center={list(self.center)}, r={self.radius:g})"


@dataclass(frozen=True)
class Box:
    """Open axis-aligned box ``lo < x < hi``."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(float(c) for c in self.lo))
        object.__setattr__(self, "hi", tuple(float(c) for c in self.hi))
        if len(self.lo) != len(self.hi) or not all(a < b for a, b in zip(self.lo, self.hi)):
            raise ValueError("box needs lo < hi coordinatewise")

    def __str__(self):
        return f"box(lo={list(self.lo)}, hi={list(self.hi)})"


ConvexDomain = UnitBall | Ball | Box


def inradius(d: ConvexDomain) -> float:
    """Largest admissible shrink margin (in the domain's own units)."""
    if isinstance(d, UnitBall):
        return 1.0
    if isinstance(d, Ball):
        return d.radius
    return 0.5 * min(b - a for a, b in zip(d.lo, d.hi))


def _check_margin(d, margin):
    if margin < 0 or margin >= inradius(d):
        raise ValueError(f"margin {margin} outside [0, inradius) for {d}")


def contains(d: ConvexDomain | None, x, margin: float = 0.0):
    """True iff ``x`` lies strictly inside ``d`` shrunk by ``margin``.

    ``d = None`` stands for the whole space. Boundary points are excluded even
    for ``margin = 0``: every domain here is open.
    """
    x = as_vector(x)
    if d is None:
        out = np.ones(x.shape[:-1], dtype=bool)
        return bool(out) if out.ndim == 0 else out
    _check_margin(d, margin)
    if isinstance(d, UnitBall):
        out = norm(x, d.norm) < 1.0 - margin
    elif isinstance(d, Ball):
        c = np.asarray(d.center)
        out = np.linalg.norm(x - c, axis=-1) < d.radius - margin
    else:
        lo = np.asarray(d.lo) + margin
        hi = np.asarray(d.hi) - margin
        out = np.all((x > lo) & (x < hi), axis=-1)
    out = np.asarray(out)
    return bool(out) if out.ndim == 0 else out


def _project_p_ball(v: np.ndarray, p: float, radius: float) -> np.ndarray:
    """Euclidean projection of rows of ``v`` onto {||x||_p <= radius}, 1 < p < inf.

    Solves the KKT system |v_i| = a_i + lam * p * a_i^(p-1) by nested bisection.
    """
    a_abs = np.abs(v)
    sign = np.sign(v)
    inside = np.linalg.norm(v, ord=p, axis=-1) <= radius
    out = v.copy()
    if np.all(inside):
        return out
    rows = ~inside
    av = a_abs[rows]

    def solve_a(lam):
        # per-coordinate root of a + lam*p*a^(p-1) = |v|, a in [0, |v|]
        lo = np.zeros_like(av)
        hi = av.copy()
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            g = mid + lam[:, None] * p * mid ** (p - 1) - av
            hi = np.where(g > 0, mid, hi)
            lo = np.where(g > 0, lo, mid)
        return 0.5 * (lo + hi)

    lam_lo = np.zeros(av.shape[0])
    lam_hi = np.ones(av.shape[0])
    while True:
        too_big = np.sum(solve_a(lam_hi) ** p, axis=-1) > radius ** p
        if not np.any(too_big):
            break
        lam_hi = np.where(too_big, lam_hi * 4.0, lam_hi)
    for _ in range(100):
        mid = 0.5 * (lam_lo + lam_hi)
        over = np.sum(solve_a(mid) ** p, axis=-1) > radius ** p
        lam_lo = np.where(over, mid, lam_lo)
        lam_hi = np.where(over, lam_hi, mid)
    a = solve_a(lam_hi)
    out[rows] = sign[rows] * a
    return out


def project(d: ConvexDomain | None, x, margin: float = 0.0) -> np.ndarray:
    """Euclidean nearest point of the closed ``margin``-shrunk domain.

    Points already inside are returned unchanged, so the map is idempotent.
    """
    x = as_vector(x)
    if d is None:
        return x.copy()
    _check_margin(d, margin)
    if isinstance(d, Box):
        return np.clip(x, np.asarray(d.lo) + margin, np.asarray(d.hi) - margin)
    if isinstance(d, Ball):
        c = np.asarray(d.center)
        r = d.radius - margin
        dx = x - c
        nrm = np.linalg.norm(dx, axis=-1, keepdims=True)
        scale = np.where(nrm > r, r / np.where(nrm > 0, nrm, 1.0), 1.0)
        return c + dx * scale
    r = 1.0 - margin
    p = d.norm.exponent
    if p == np.inf:
        return np.clip(x, -r, r)
    if p == 2.0:
        nrm = np.linalg.norm(x, axis=-1, keepdims=True)
        scale = np.where(nrm > r, r / np.where(nrm > 0, nrm, 1.0), 1.0)
        return x * scale
    flat = x.reshape(-1, x.shape[-1])
    if p == 1.0:
        out = flat.copy()
        for i, v in enumerate(flat):
            if np.abs(v).sum() > r:
                out[i] = _project_l1(v, r)
        return out.reshape(x.shape)
    return _project_p_ball(flat, p, r).reshape(x.shape)


def _project_l1(v: np.ndarray, r: float) -> np.ndarray:
    # sort-based simplex projection (Duchi et al.)
    u = np.sort(np.abs(v))[::-1]
    css = np.cumsum(u)
    k = np.arange(1, len(u) + 1)
    rho = np.nonzero(u * k > css - r)[0][-1]
    theta = (css[rho] - r) / (rho + 1.0)
    return np.sign(v) * np.maximum(np.abs(v) - theta, 0.0)


def boundary_distance(d: ConvexDomain | None, x) -> np.ndarray | float:
    """Lower bound on the Euclidean distance from ``x`` to the complement of ``d``.

    Exact for Euclidean balls and boxes. Negative outside the domain.
    """
    x = as_vector(x)
    if d is None:
        out = np.full(x.shape[:-1], np.inf)
    elif isinstance(d, Ball):
        out = d.radius - np.linalg.norm(x - np.asarray(d.center), axis=-1)
    elif isinstance(d, Box):
        out = np.min(np.minimum(x - np.asarray(d.lo), np.asarray(d.hi) - x), axis=-1)
    else:
        k = _euclid_expansion(d.norm, x.shape[-1])
        out = (1.0 - norm(x, d.norm)) / k
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def bounding_box(d: ConvexDomain, dim: int) -> tuple[np.ndarray, np.ndarray]:
    """Axis-aligned box enclosing ``d`` in R^dim."""
    if isinstance(d, Box):
        return np.asarray(d.lo), np.asarray(d.hi)
    if isinstance(d, Ball):
        c = np.asarray(d.center)
        return c - d.radius, c + d.radius
    # every norm unit ball sits inside the max-norm unit ball
    return -np.ones(dim), np.ones(dim)


def domain_norm(d: ConvexDomain | None) -> NormSpec:
    """The norm that measures distances in ``d``; Euclidean unless ``d`` is a norm ball."""
    if isinstance(d, UnitBall):
        return d.norm
    return EUCLIDEAN
