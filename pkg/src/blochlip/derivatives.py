"""Operator norms of differentials and the metric upper derivative.

For a map f between normed spaces the upper derivative at x is

    d*_f(x) = limsup_{y -> x} ||f(x) - f(y)|| / ||x - y||,

which equals the operator norm of the Frechet differential wherever f is
differentiable. Both sides are computed here: the operator norm from an exact
or finite-difference Jacobian, the limsup from sampled difference quotients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import special_ortho_group

from .errors import DomainError, NonConvergenceError
from .geometry import EUCLIDEAN, ConvexDomain, NormSpec, as_vector, boundary_distance, domain_norm
from .omega_distance import unit_directions

__all__ = [
    "MappingUnderTest",
    "DerivativeConfig",
    "jacobian_at",
    "operator_norm",
    "spectral_norms",
    "upper_derivative",
    "upper_derivative_levels",
    "upper_derivatives",
]

POWER_RTOL = 1e-15
POWER_MAX_SQUARINGS = 64


@dataclass(frozen=True)
class MappingUnderTest:
    """A map from a convex domain in R^dim to R^codomain_dim.

    ``evaluator`` and ``jacobian`` act on stacks: ``(..., dim) -> (..., k)``
    and ``(..., dim) -> (..., k, dim)``.
    """

    domain: ConvexDomain
    dim: int
    codomain_dim: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None
    codomain_norm: NormSpec = EUCLIDEAN
    label: str = "map"

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    @property
    def domain_norm(self) -> NormSpec:
        return domain_norm(self.domain)


@dataclass(frozen=True)
class DerivativeConfig:
    fd_step: float = 1e-4
    radii_levels: int = 6
    directions: int = 64
    seed: int = 0
    # sampling radius is also capped at this fraction of the distance to the boundary
    boundary_fraction: float = 1e-4
    climb_steps: int = 40

    def __post_init__(self):
        if not self.fd_step > 0 or self.radii_levels < 1 or self.directions < 2:
            raise ValueError("fd_step, radii_levels and directions must be positive")
        if not 0 < self.boundary_fraction < 1:
            raise ValueError("boundary_fraction must lie in (0, 1)")


def jacobian_at(f: MappingUnderTest, x, cfg: DerivativeConfig | None = None, exact: bool = True) -> np.ndarray:
    """Exact Jacobian when the mapping supplies one, else central differences with step ``fd_step``."""
    cfg = cfg or DerivativeConfig()
    x = as_vector(x, f.dim)
    if exact and f.jacobian is not None:
        return np.asarray(f.jacobian(x), dtype=float)
    h = cfg.fd_step
    if np.any(boundary_distance(f.domain, x) <= h):
        raise DomainError("finite-difference stencil leaves the domain")
    steps = h * np.eye(f.dim)
    up = f(x[..., None, :] + steps)
    dn = f(x[..., None, :] - steps)
    # (..., dim, k) -> (..., k, dim)
    return np.swapaxes((up - dn) / (2 * h), -1, -2)


def spectral_norms(J) -> np.ndarray:
    """Largest singular value of each matrix in a stack, by power iteration on J^T J.

    The iteration is accelerated by repeated squaring: after k squarings of
    A = J^T J the ratio of the two leading eigenvalues enters as its 2^k-th
    power, so near-degenerate leading pairs converge too. The dominant
    direction is the largest column of the squared matrix, and the value is
    its Rayleigh quotient.
    """
    J = np.asarray(J, dtype=float)
    if not np.all(np.isfinite(J)):
        raise NonConvergenceError("power iteration on a non-finite matrix")
    A = np.swapaxes(J, -1, -2) @ J
    scale = np.max(np.abs(A), axis=(-1, -2), keepdims=True)
    zero = scale[..., 0, 0] == 0
    M = A / np.where(scale > 0, scale, 1.0)
    for _ in range(POWER_MAX_SQUARINGS):
        prev = M
        M = M @ M
        M = M / np.maximum(np.max(np.abs(M), axis=(-1, -2), keepdims=True), 1e-300)
        if np.max(np.abs(M - prev)) <= POWER_RTOL:
            break
    cols = np.linalg.norm(M, axis=-2)
    k = np.argmax(cols, axis=-1)
    v = np.take_along_axis(M, k[..., None, None], axis=-1)[..., 0]
    v = v / np.maximum(np.linalg.norm(v, axis=-1, keepdims=True), 1e-300)
    lam = np.einsum("...i,...ij,...j->...", v, A, v)
    return np.where(zero, 0.0, np.sqrt(np.maximum(lam, 0.0)))


def _unit_sphere(dirs: np.ndarray, n: NormSpec) -> np.ndarray:
    return dirs / np.linalg.norm(dirs, ord=n.exponent, axis=-1, keepdims=True)


def _seeded_directions(dim: int, count: int, seed: int, n: NormSpec) -> np.ndarray:
    dirs = unit_directions(dim, count)
    if dim >= 2:
        rot = special_ortho_group.rvs(dim, random_state=seed)
        dirs = dirs @ rot.T
    return _unit_sphere(dirs, n)


def _climb(objective, u, n: NormSpec, steps: int, theta0: float):
    """Compass hill-climb of ``objective`` over unit vectors, one start per row of ``u``.

    ``objective`` maps ``(batch, c, dim)`` candidates to ``(batch, c)`` values.
    """
    batch, dim = u.shape
    best = objective(u[:, None, :])[:, 0]
    theta = np.full(batch, theta0)
    eye = np.concatenate([np.eye(dim), -np.eye(dim)])
    for _ in range(steps):
        # move along unit tangent directions; a raw axis nearly parallel to u
        # would give tiny accepted steps that never let theta shrink
        uh = u / np.linalg.norm(u, axis=-1, keepdims=True)
        along = np.einsum("cd,bd->bc", eye, uh)
        tang = eye[None, :, :] - along[:, :, None] * uh[:, None, :]
        tn = np.linalg.norm(tang, axis=-1, keepdims=True)
        tang = np.where(tn > 1e-8, tang / np.where(tn > 0, tn, 1.0), 0.0)
        cand = _unit_sphere(u[:, None, :] + theta[:, None, None] * tang, n)
        vals = objective(cand)
        j = np.argmax(vals, axis=1)
        top = vals[np.arange(batch), j]
        better = top > best
        u = np.where(better[:, None], cand[np.arange(batch), j], u)
        best = np.where(better, top, best)
        theta = np.where(better, theta, 0.5 * theta)
    return best, u


def operator_norm(
    J,
    domain_norm: NormSpec = EUCLIDEAN,
    codomain_norm: NormSpec = EUCLIDEAN,
    cfg: DerivativeConfig | None = None,
    method: str = "auto",
) -> float:
    """sup of ||J z|| over the unit sphere of the domain norm.

    Euclidean to Euclidean uses power iteration. Other pairs (or
    ``method="sample"``) maximise over quasi-uniform directions refined by
    hill-climbing, which can only under-estimate the true norm.
    """
    cfg = cfg or DerivativeConfig()
    J = np.atleast_2d(np.asarray(J, dtype=float))
    euclid = domain_norm.kind == "euclidean" and codomain_norm.kind == "euclidean"
    if method == "power" or (method == "auto" and euclid):
        if not euclid:
            raise ValueError("power iteration only applies to Euclidean norms")
        return float(spectral_norms(J))
    dim = J.shape[-1]
    dirs = _seeded_directions(dim, max(cfg.directions, 2 * dim), cfg.seed, domain_norm)
    q = codomain_norm.exponent

    def objective(c):
        return np.linalg.norm(c @ J.T, ord=q, axis=-1)

    vals = objective(dirs[None])[0]
    start = dirs[int(np.argmax(vals))][None]
    best, _ = _climb(objective, start, domain_norm, 200, 0.5)
    return float(max(best[0], vals.max()))


def _ratio_objective(f: MappingUnderTest, X: np.ndarray, fX: np.ndarray, radii: np.ndarray):
    """Max over the given radii of ||f(x + r u) - f(x)|| / ||(x + r u) - x|| for candidate directions u.

    The denominator is the step actually taken: near the boundary ``r`` can be
    so small that rounding in ``x + r u`` changes it by a relative 1e-4.
    """
    p = f.domain_norm.exponent
    q = f.codomain_norm.exponent

    def objective(u):
        # u: (batch, c, dim); radii: (batch, R)
        y = X[:, None, None, :] + radii[:, :, None, None] * u[:, None, :, :]
        diff = f(y) - fX[:, None, None, :]
        step = np.linalg.norm(y - X[:, None, None, :], ord=p, axis=-1)
        ratio = np.linalg.norm(diff, ord=q, axis=-1) / np.where(step > 0, step, np.inf)
        return ratio.max(axis=1)

    return objective


def _base_radius(f: MappingUnderTest, X: np.ndarray, cfg: DerivativeConfig) -> np.ndarray:
    dist = np.atleast_1d(boundary_distance(f.domain, X))
    if np.any(dist <= 0):
        raise DomainError("upper derivative requested at a point outside the domain")
    return np.minimum(cfg.fd_step, cfg.boundary_fraction * dist)


def upper_derivatives(
    f: MappingUnderTest, X, cfg: DerivativeConfig | None = None, use_jacobian: bool = True, fX=None
) -> np.ndarray:
    """Sampled estimate of d*_f at each row of ``X``.

    Difference quotients are taken over ``cfg.directions`` seeded directions
    at radii ``r0 * 2**-k``, ``k = 0..radii_levels``; the estimate is the
    largest quotient at the two smallest radii after hill-climbing the best
    direction. ``r0`` is ``fd_step`` capped by a fraction of the distance to
    the boundary. With ``use_jacobian`` and an exact Jacobian available the
    result is ``max(sampled, ||J||)``.
    """
    cfg = cfg or DerivativeConfig()
    X = np.atleast_2d(as_vector(X, f.dim))
    fX = f(X) if fX is None else np.asarray(fX, dtype=float)
    r0 = _base_radius(f, X, cfg)
    levels = np.array([cfg.radii_levels - 1, cfg.radii_levels], dtype=float)
    radii = r0[:, None] * 2.0 ** -levels
    n = f.domain_norm
    dirs = _seeded_directions(f.dim, max(cfg.directions, 2 * f.dim), cfg.seed, n)
    out = np.empty(X.shape[0])
    chunk = 512
    for lo in range(0, X.shape[0], chunk):
        sl = slice(lo, lo + chunk)
        sub = _ratio_objective(f, X[sl], fX[sl], radii[sl])
        vals = sub(np.broadcast_to(dirs, (X[sl].shape[0],) + dirs.shape))
        start = dirs[np.argmax(vals, axis=1)]
        best, _ = _climb(sub, start, n, cfg.climb_steps, 2.0 / cfg.directions)
        out[sl] = np.maximum(best, vals.max(axis=1))
    if use_jacobian and f.jacobian is not None:
        J = f.jacobian(X)
        if n.kind == "euclidean" and f.codomain_norm.kind == "euclidean":
            out = np.maximum(out, spectral_norms(J))
        else:
            out = np.maximum(out, [operator_norm(j, n, f.codomain_norm, cfg) for j in J])
    return out


def upper_derivative(f: MappingUnderTest, x, cfg: DerivativeConfig | None = None, use_jacobian: bool = True) -> float:
    """Single-point form of :func:`upper_derivatives`."""
    x = as_vector(x, f.dim)
    if x.ndim != 1:
        raise ValueError("upper_derivative takes one point; use upper_derivatives for stacks")
    return float(upper_derivatives(f, x[None], cfg, use_jacobian)[0])


def upper_derivative_levels(f: MappingUnderTest, x, cfg: DerivativeConfig | None = None) -> list[tuple[float, float]]:
    """Per-radius table ``(r, max quotient over sampled directions)`` for ``k = 0..radii_levels``."""
    cfg = cfg or DerivativeConfig()
    x = as_vector(x, f.dim)
    r0 = _base_radius(f, x[None], cfg)[0]
    dirs = _seeded_directions(f.dim, max(cfg.directions, 2 * f.dim), cfg.seed, f.domain_norm)
    fx = f(x)
    q = f.codomain_norm.exponent
    rows = []
    for k in range(cfg.radii_levels + 1):
        r = r0 * 2.0 ** -k
        y = x + r * dirs
        step = np.linalg.norm(y - x, ord=f.domain_norm.exponent, axis=-1)
        ratio = np.linalg.norm(f(y) - fx, ord=q, axis=-1) / step
        rows.append((float(r), float(ratio.max())))
    return rows
