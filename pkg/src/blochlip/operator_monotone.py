"""Operator monotone functions on (-1, 1).

Two concrete families are supported: the closed form ``artanh`` and finite
atomic Nevanlinna representations

    phi(t) = phi(0) + phi'(0) * sum_i w_i * t / (1 - t_i t),

with atoms ``t_i`` in [-1, 1] and probability weights ``w_i``. Such a sum is
operator monotone by construction, so no operator ordering is ever tested.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .errors import PoleError

__all__ = [
    "Artanh",
    "Nevanlinna",
    "OMFunction",
    "om_eval",
    "om_derivative",
    "check_sqrt_mean_inequality",
    "is_derivative_increasing",
    "MonotonicityReport",
    "parse_om_spec",
    "random_nevanlinna",
]


def _check_open_interval(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) >= 1):
        raise PoleError("evaluation point must satisfy |t| < 1")
    return t


@dataclass(frozen=True)
class Artanh:
    """phi(t) = artanh(t); phi'(t) = 1 / (1 - t^2)."""

    def value(self, t):
        t = _check_open_interval(t)
        return np.arctanh(t)

    def derivative(self, t):
        t = _check_open_interval(t)
        return 1.0 / (1.0 - t * t)

    def __str__(self):
        return "artanh"


@dataclass(frozen=True)
class Nevanlinna:
    phi0: float
    dphi0: float
    atoms: tuple  # ((t_i, w_i), ...)

    def __post_init__(self):
        atoms = tuple((float(t), float(w)) for t, w in self.atoms)
        if not atoms:
            raise ValueError("need at least one atom")
        if not self.dphi0 > 0:
            raise ValueError("phi'(0) must be positive")
        ts = np.array([a[0] for a in atoms])
        ws = np.array([a[1] for a in atoms])
        if np.any(np.abs(ts) > 1):
            raise ValueError("atoms must lie in [-1, 1]")
        if np.any(ws <= 0):
            raise ValueError("atom weights must be positive")
        if abs(ws.sum() - 1.0) > 1e-9:
            raise ValueError(f"atom weights must sum to 1, got {ws.sum():.12g}")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "phi0", float(self.phi0))
        object.__setattr__(self, "dphi0", float(self.dphi0))

    @property
    def nodes(self) -> np.ndarray:
        return np.array([a[0] for a in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([a[1] for a in self.atoms])

    def _denominators(self, t):
        t = _check_open_interval(t)
        den = 1.0 - np.multiply.outer(t, self.nodes)
        if np.any(den == 0):
            raise PoleError("evaluation point hits a pole t * t_i = 1")
        return t, den

    def value(self, t):
        t, den = self._denominators(t)
        return self.phi0 + self.dphi0 * np.sum(self.weights * t[..., None] / den, axis=-1)

    def derivative(self, t):
        _, den = self._denominators(t)
        return self.dphi0 * np.sum(self.weights / den ** 2, axis=-1)

    def __str__(self):
        atoms = ";".join(f"{t!r}:{w!r}" for t, w in self.atoms)
        return f"nev:phi0={self.phi0!r},dphi0={self.dphi0!r},atoms=({atoms})"


OMFunction = Artanh | Nevanlinna


def om_eval(phi: OMFunction, t):
    out = phi.value(t)
    return float(out) if np.ndim(out) == 0 else out


def om_derivative(phi: OMFunction, t):
    out = phi.derivative(t)
    return float(out) if np.ndim(out) == 0 else out


def check_sqrt_mean_inequality(phi: OMFunction, s, t):
    """Slack sqrt(phi'(t) phi'(s)) (t - s) - (phi(t) - phi(s)) for s < t.

    Non-negative slack (up to round-off) is what every operator monotone
    function guarantees.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s >= t):
        raise ValueError("need s < t")
    slack = np.sqrt(phi.derivative(t) * phi.derivative(s)) * (t - s) - (phi.value(t) - phi.value(s))
    return float(slack) if np.ndim(slack) == 0 else slack


@dataclass(frozen=True)
class MonotonicityReport:
    increasing: bool
    witness: tuple | None  # (a, b) with a < b and phi'(a) > phi'(b)
    atoms_nonnegative: bool | None  # sufficient condition, Nevanlinna only

    def __bool__(self):
        return self.increasing


def is_derivative_increasing(phi: OMFunction, hi: float = 1.0, samples: int = 1001) -> MonotonicityReport:
    """Check that phi' is non-decreasing on a uniform grid of [0, hi)."""
    if samples < 2:
        raise ValueError("need at least two samples")
    if hi > 1:
        raise ValueError("hi must be at most 1")
    grid = np.linspace(0.0, hi, samples + 1)[:-1]
    d = phi.derivative(grid)
    drops = np.nonzero(np.diff(d) < -1e-12 * np.abs(d[1:]))[0]
    witness = None
    if drops.size:
        i = int(drops[0])
        witness = (float(grid[i]), float(grid[i + 1]))
    atoms_ok = bool(np.all(phi.nodes >= 0)) if isinstance(phi, Nevanlinna) else None
    return MonotonicityReport(increasing=drops.size == 0, witness=witness, atoms_nonnegative=atoms_ok)


_NEV_RE = re.compile(
    r"^nev:phi0=(?P<phi0>[^,]+),dphi0=(?P<dphi0>[^,]+),atoms=\((?P<atoms>[^)]*)\)$"
)


def parse_om_spec(text: str) -> OMFunction:
    """Parse ``artanh`` or ``nev:phi0=<v>,dphi0=<v>,atoms=(t1:w1;t2:w2;...)``."""
    text = text.strip().replace(" ", "")
    if text == "artanh":
        return Artanh()
    m = _NEV_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse om-spec {text!r}")
    atoms = []
    for item in m.group("atoms").split(";"):
        if not item:
            continue
        t, w = item.split(":")
        atoms.append((float(t), float(w)))
    return Nevanlinna(float(m.group("phi0")), float(m.group("dphi0")), tuple(atoms))


def random_nevanlinna(rng: np.random.Generator, max_atoms: int = 5, lo: float = -1.0, hi: float = 1.0) -> Nevanlinna:
    """A random atomic Nevanlinna function with atoms drawn from [lo, hi]."""
    k = int(rng.integers(1, max_atoms + 1))
    nodes = rng.uniform(lo, hi, size=k)
    w = rng.uniform(0.1, 1.0, size=k)
    w = w / w.sum()
    w[-1] = 1.0 - w[:-1].sum()
    return Nevanlinna(float(rng.normal()), float(rng.uniform(0.2, 3.0)), tuple(zip(nodes, w)))
