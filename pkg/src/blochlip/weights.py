"""Weight functions and the closed-form hyperbolic and spherical distances."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .geometry import EUCLIDEAN, ConvexDomain, UnitBall, as_vector, contains
from .operator_monotone import Artanh, OMFunction, is_derivative_increasing, parse_om_spec

__all__ = [
    "Weight",
    "evaluate",
    "constant_one",
    "hyperbolic",
    "spherical",
    "phi_prime",
    "parse_weight",
    "hyperbolic_distance",
    "spherical_distance",
    "spherical_geodesic_distance",
    "check_declared_monotonicity",
]

MONOTONICITY = ("increasing_in_norm", "decreasing_in_norm", "none")


@dataclass(frozen=True)
class Weight:
    """Positive continuous scalar field on a domain.

    ``evaluator`` maps an ``(..., m)`` array to ``(...)`` values. ``domain=None``
    means the weight is defined on the whole space. ``exact_distance``, when
    set, is the closed-form weighted distance and is used as a cross-check.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    monotonicity: str = "none"
    domain: ConvexDomain | None = None
    label: str = "weight"
    exact_distance: Callable | None = None

    def __post_init__(self):
        if self.monotonicity not in MONOTONICITY:
            raise ValueError(f"unknown monotonicity {self.monotonicity!r}")

    def __call__(self, x):
        return self.evaluator(np.asarray(x, dtype=float))

    def scaled(self, c: float) -> "Weight":
        """``c * w`` for a constant ``c > 0``; monotonicity is preserved."""
        if not c > 0:
            raise ValueError("scale must be positive")
        ev = self.evaluator
        exact = self.exact_distance
        scaled_exact = None if exact is None else (lambda x, y: c * exact(x, y))
        return Weight(lambda x: c * ev(x), self.monotonicity, self.domain, f"{c!r}*{self.label}", scaled_exact)


def evaluate(w: Weight, x, margin: float = 0.0):
    x = as_vector(x)
    if not np.all(contains(w.domain, x, margin)):
        raise DomainError(f"point outside the domain of weight {w.label!r}")
    out = w(x)
    return float(out) if np.ndim(out) == 0 else out


def _sqnorm(x):
    return np.sum(x * x, axis=-1)


def hyperbolic_distance(x, y):
    """asinh(|x - y| / (sqrt(1 - |x|^2) sqrt(1 - |y|^2))) on the Euclidean unit ball."""
    x = as_vector(x)
    y = as_vector(y, x.shape[-1])
    ax = 1.0 - _sqnorm(x)
    ay = 1.0 - _sqnorm(y)
    if np.any(ax <= 0) or np.any(ay <= 0):
        raise DomainError("hyperbolic distance needs points in the open unit ball")
    out = np.arcsinh(np.linalg.norm(x - y, axis=-1) / np.sqrt(ax * ay))
    return float(out) if np.ndim(out) == 0 else out


def spherical_distance(z, w):
    """|z - w| / (sqrt(1 + |z|^2) sqrt(1 + |w|^2)).

    This is the chordal form; it is sin of the geodesic distance for the
    weight (1 + |z|^2)^-1, so it never exceeds that distance.
    """
    z = as_vector(z)
    w = as_vector(w, z.shape[-1])
    out = np.linalg.norm(z - w, axis=-1) / np.sqrt((1.0 + _sqnorm(z)) * (1.0 + _sqnorm(w)))
    return float(out) if np.ndim(out) == 0 else out


def spherical_geodesic_distance(z, w):
    """arcsin of :func:`spherical_distance`: the exact distance for the spherical weight."""
    out = np.arcsin(np.minimum(spherical_distance(z, w), 1.0))
    return float(out) if np.ndim(out) == 0 else out


def _euclidean_distance(x, y):
    out = np.linalg.norm(as_vector(x) - as_vector(y), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def constant_one() -> Weight:
    return Weight(lambda x: np.ones(np.shape(x)[:-1]), "none", None, "const1", _euclidean_distance)


def hyperbolic() -> Weight:
    """(1 - |x|^2)^-1 on the Euclidean unit ball."""
    return Weight(
        lambda x: 1.0 / (1.0 - _sqnorm(x)),
        "increasing_in_norm",
        UnitBall(EUCLIDEAN),
        "hyperbolic",
        hyperbolic_distance,
    )


def spherical() -> Weight:
    """(1 + |z|^2)^-1 on the whole space."""
    return Weight(
        lambda z: 1.0 / (1.0 + _sqnorm(z)),
        "decreasing_in_norm",
        None,
        "spherical",
        spherical_geodesic_distance,
    )


def phi_prime(phi: OMFunction, samples: int = 2001) -> Weight:
    """x -> phi'(|x|) on the Euclidean unit ball."""
    report = is_derivative_increasing(phi, 1.0, samples)
    mono = "increasing_in_norm" if report.increasing else "none"
    exact = hyperbolic_distance if isinstance(phi, Artanh) else None
    return Weight(
        lambda x: phi.derivative(np.sqrt(_sqnorm(x))),
        mono,
        UnitBall(EUCLIDEAN),
        f"phi_prime:{phi}",
        exact,
    )


def parse_weight(text: str) -> Weight:
    """``const1 | hyperbolic | spherical | phi_prime:<om-spec>``."""
    text = text.strip()
    if text == "const1":
        return constant_one()
    if text == "hyperbolic":
        return hyperbolic()
    if text == "spherical":
        return spherical()
    if text.startswith("phi_prime:"):
        return phi_prime(parse_om_spec(text[len("phi_prime:"):]))
    raise ValueError(f"unknown weight spec {text!r}")


def check_declared_monotonicity(w: Weight, dim: int, pairs: int = 1000, seed: int = 0, radius: float = 0.999):
    """Sample radial pairs r1 < r2 along random directions and test the declared trend.

    Returns ``(ok, witness)`` where the witness is the first violating pair
    of points, or ``None``.
    """
    if w.monotonicity == "none":
        return True, None
    rng = np.random.default_rng(seed)
    u = rng.normal(size=(pairs, dim))
    u /= np.linalg.norm(u, axis=-1, keepdims=True)
    r = np.sort(rng.uniform(0.0, radius, size=(pairs, 2)), axis=-1)
    x1 = r[:, :1] * u
    x2 = r[:, 1:] * u
    v1, v2 = w(x1), w(x2)
    if w.monotonicity == "increasing_in_norm":
        bad = v2 < v1
    else:
        bad = v2 > v1
    idx = np.nonzero(bad)[0]
    if idx.size:
        i = int(idx[0])
        return False, (x1[i].tolist(), x2[i].tolist())
    return True, None
