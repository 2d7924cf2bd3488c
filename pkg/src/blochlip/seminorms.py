"""Bloch numbers, Lipschitz numbers and admissible functions.

For weights w on the domain and cw on the target, the Bloch number of f is

    B_f = sup_x cw(f(x)) / w(x) * d*_f(x),

and, for an admissible function Psi, the Lipschitz number is

    L_f = sup_{x != y} Psi(x, y) * ||f(x) - f(y)|| / ||x - y||.

The two coincide for every admissible Psi. Both suprema are estimated from
below by low-discrepancy sampling followed by local refinement, and
:func:`certify_equality` reports the relative gap between the estimates.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .derivatives import DerivativeConfig, MappingUnderTest, upper_derivatives
from .errors import DomainError, NonConvergenceError
from .geometry import EUCLIDEAN, Ball, Box, NormSpec, UnitBall, as_vector, project
from .omega_distance import GeodesicConfig, omega_distance
from .operator_monotone import OMFunction, parse_om_spec
from .weights import Weight

log = logging.getLogger(__name__)

__all__ = [
    "AdmissibleFn",
    "SupremumConfig",
    "ShellResult",
    "BlochEstimate",
    "LipschitzEstimate",
    "EqualityCertificate",
    "AdmissibilityConfig",
    "ConditionResult",
    "AdmissibilityReport",
    "bloch_number",
    "bloch_integrand",
    "lipschitz_number",
    "lipschitz_ratio",
    "symmetrize",
    "geometric_mean_phi",
    "minmax",
    "hyperbolic_psi",
    "spherical_normal",
    "ratio_psi",
    "scaled_psi",
    "make_admissible",
    "parse_psi",
    "check_admissible",
    "certify_equality",
    "sample_domain",
]


# ---------------------------------------------------------------------------
# admissible functions


@dataclass(frozen=True)
class AdmissibleFn:
    """Positive symmetric function of point pairs.

    ``evaluator(x, y, fx, fy)`` takes stacks of points and the mapping's
    values at them; functions that ignore f have ``requires_mapping=False``.
    """

    evaluator: Callable
    label: str
    requires_mapping: bool = False

    def __call__(self, x, y, fx=None, fy=None):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.requires_mapping and (fx is None or fy is None):
            raise ValueError(f"admissible function {self.label!r} needs the mapping values")
        return np.asarray(self.evaluator(x, y, fx, fy), dtype=float)


def _sq(x):
    return np.sum(np.asarray(x) ** 2, axis=-1)


def symmetrize(psi: AdmissibleFn) -> AdmissibleFn:
    """max(Psi(x, y), Psi(y, x))."""
    ev = psi.evaluator
    return AdmissibleFn(
        lambda x, y, fx, fy: np.maximum(ev(x, y, fx, fy), ev(y, x, fy, fx)),
        f"sym({psi.label})",
        psi.requires_mapping,
    )


def scaled_psi(psi: AdmissibleFn, c: float) -> AdmissibleFn:
    ev = psi.evaluator
    return AdmissibleFn(lambda x, y, fx, fy: c * ev(x, y, fx, fy), f"{c!r}*{psi.label}", psi.requires_mapping)


def geometric_mean_phi(phi: OMFunction, norm: NormSpec = EUCLIDEAN) -> AdmissibleFn:
    """(phi'(||x||) phi'(||y||))^(-1/2)."""
    q = norm.exponent

    def ev(x, y, fx, fy):
        dx = phi.derivative(np.linalg.norm(x, ord=q, axis=-1))
        dy = phi.derivative(np.linalg.norm(y, ord=q, axis=-1))
        return 1.0 / np.sqrt(dx * dy)

    return AdmissibleFn(ev, f"geomean:{phi}")


def minmax(w: Weight, cw: Weight) -> AdmissibleFn:
    """min(cw(f(x)), cw(f(y))) / max(w(x), w(y)); needs w and cw monotone in norm."""
    for weight in (w, cw):
        if weight.monotonicity == "none" and weight.label != "const1":
            log.warning("minmax: weight %r is not declared monotone in norm", weight.label)

    def ev(x, y, fx, fy):
        return np.minimum(cw(fx), cw(fy)) / np.maximum(w(x), w(y))

    return AdmissibleFn(ev, "minmax", requires_mapping=True)


def hyperbolic_psi() -> AdmissibleFn:
    """sqrt(1 - |x|^2) sqrt(1 - |y|^2)."""
    return AdmissibleFn(lambda x, y, fx, fy: np.sqrt((1.0 - _sq(x)) * (1.0 - _sq(y))), "hyperbolic")


def spherical_normal() -> AdmissibleFn:
    """Hyperbolic Psi divided by sqrt(1 + |f(x)|^2) sqrt(1 + |f(y)|^2)."""

    def ev(x, y, fx, fy):
        return np.sqrt((1.0 - _sq(x)) * (1.0 - _sq(y)) / ((1.0 + _sq(fx)) * (1.0 + _sq(fy))))

    return AdmissibleFn(ev, "spherical_normal", requires_mapping=True)


def ratio_psi(w: Weight, cw: Weight, cfg: GeodesicConfig | None = None) -> AdmissibleFn:
    """[d_cw(f(x), f(y)) / |f(x) - f(y)|] / [d_w(x, y) / |x - y|] with numerical distances.

    Degenerate branches: cw(f(x)) in place of the first ratio when
    f(x) = f(y), and cw(f(x)) / w(x) on the diagonal. Every pair costs two
    geodesic optimisations, so this is meant for small pair counts.
    """
    cfg = cfg or GeodesicConfig()

    def dist(weight, a, b):
        if weight.exact_distance is not None:
            return float(weight.exact_distance(a, b))
        return omega_distance(a, b, weight, cfg).value

    def ev(x, y, fx, fy):
        x, y = np.atleast_2d(x), np.atleast_2d(y)
        fx, fy = np.atleast_2d(fx), np.atleast_2d(fy)
        out = np.empty(x.shape[0])
        for i in range(x.shape[0]):
            if np.array_equal(x[i], y[i]):
                out[i] = float(cw(fx[i])) / float(w(x[i]))
                continue
            dom_ratio = dist(w, x[i], y[i]) / np.linalg.norm(x[i] - y[i])
            if np.array_equal(fx[i], fy[i]):
                out[i] = float(cw(fx[i])) / dom_ratio
            else:
                out[i] = dist(cw, fx[i], fy[i]) / np.linalg.norm(fx[i] - fy[i]) / dom_ratio
        return out

    return AdmissibleFn(ev, "ratio", requires_mapping=True)


def make_admissible(kind: str, **context) -> AdmissibleFn:
    """Constructor dispatch for the admissible-function catalogue.

    ``kind`` is one of ``geometric_mean_phi`` (``phi``), ``minmax`` (``w``,
    ``cw``), ``hyperbolic``, ``spherical_normal``, ``ratio`` (``w``, ``cw``,
    optional ``cfg``).
    """
    if kind == "geometric_mean_phi":
        return geometric_mean_phi(context["phi"], context.get("norm", EUCLIDEAN))
    if kind == "minmax":
        return minmax(context["w"], context["cw"])
    if kind == "hyperbolic":
        return hyperbolic_psi()
    if kind == "spherical_normal":
        return spherical_normal()
    if kind == "ratio":
        return ratio_psi(context["w"], context["cw"], context.get("cfg"))
    raise ValueError(f"unknown admissible function kind {kind!r}")


def parse_psi(text: str, w: Weight | None = None, cw: Weight | None = None) -> AdmissibleFn:
    """``hyperbolic | spherical_normal | minmax | ratio | geomean:<om-spec>``."""
    text = text.strip()
    if text in ("hyperbolic", "spherical_normal"):
        return make_admissible(text)
    if text in ("minmax", "ratio"):
        if w is None or cw is None:
            raise ValueError(f"psi {text!r} needs both weights")
        return make_admissible(text, w=w, cw=cw)
    for prefix in ("geomean:", "geometric_mean_phi:"):
        if text.startswith(prefix):
            return geometric_mean_phi(parse_om_spec(text[len(prefix):]))
    raise ValueError(f"unknown psi {text!r}")


# ---------------------------------------------------------------------------
# sampling


def _sobol(d: int, n: int, seed: int) -> np.ndarray:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        eng = qmc.Sobol(d, scramble=True, seed=seed)
        pts = eng.random_base2(int(np.ceil(np.log2(max(n, 2)))))
    return pts[:n]


def _cube_to_domain(u: np.ndarray, dom, dim: int, margin: float) -> np.ndarray:
    """Map points of [0,1]^(dim+1) into the closed ``margin``-shrunk domain."""
    if isinstance(dom, Box):
        lo = np.asarray(dom.lo) + margin
        hi = np.asarray(dom.hi) - margin
        return lo + u[:, :dim] * (hi - lo)
    g = ndtri(np.clip(u[:, :dim], 1e-12, 1 - 1e-12))
    if isinstance(dom, Ball):
        dirs = g / np.linalg.norm(g, axis=-1, keepdims=True)
        r = (dom.radius - margin) * u[:, dim] ** (1.0 / dim)
        return np.asarray(dom.center) + r[:, None] * dirs
    dirs = g / np.linalg.norm(g, ord=dom.norm.exponent, axis=-1, keepdims=True)
    r = (1.0 - margin) * u[:, dim] ** (1.0 / dim)
    return r[:, None] * dirs


def sample_domain(dom, dim: int, n: int, seed: int, margin: float = 0.0) -> np.ndarray:
    """``n`` scrambled-Sobol points spread over the ``margin``-shrunk domain."""
    return _cube_to_domain(_sobol(dim + 1, n, seed), dom, dim, margin)


def _spacing(dom, dim: int, n: int) -> float:
    if isinstance(dom, Box):
        width = min(b - a for a, b in zip(dom.lo, dom.hi))
    elif isinstance(dom, Ball):
        width = 2 * dom.radius
    else:
        width = 2.0
    return width / n ** (1.0 / dim)


# ---------------------------------------------------------------------------
# configuration and results


@dataclass(frozen=True)
class SupremumConfig:
    interior_samples: int = 4096
    pair_samples: int = 8192
    refine_rounds: int = 3
    shell_deltas: tuple = (1e-2, 1e-3, 1e-4)
    seed: int = 42
    cloud_points: int = 64
    polish_iters: int = 200

    def __post_init__(self):
        object.__setattr__(self, "shell_deltas", tuple(sorted((float(d) for d in self.shell_deltas), reverse=True)))
        if self.interior_samples < 1 or self.pair_samples < 2 or self.refine_rounds < 0:
            raise ValueError("sample counts must be positive")
        if not self.shell_deltas or any(d <= 0 for d in self.shell_deltas):
            raise ValueError("shell_deltas must be positive")


@dataclass(frozen=True)
class ShellResult:
    delta: float
    value: float
    argmax: tuple


@dataclass(frozen=True)
class BlochEstimate:
    value: float
    argmax: tuple
    shells: tuple
    bound: str = "lower"

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax": list(self.argmax),
            "bound": self.bound,
            "shells": [{"delta": s.delta, "value": s.value, "argmax": list(s.argmax)} for s in self.shells],
        }


@dataclass(frozen=True)
class LipschitzEstimate:
    value: float
    argmax_pair: tuple
    skipped_pairs: int
    bound: str = "lower"

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "argmax_pair": [list(p) for p in self.argmax_pair],
            "separation": float(np.linalg.norm(np.subtract(*self.argmax_pair))),
            "skipped_pairs": self.skipped_pairs,
            "bound": self.bound,
        }


# ---------------------------------------------------------------------------
# local maximisation shared by both suprema


def _polish(objective, x0: np.ndarray, f0: float, steps: np.ndarray, feasible, iters: int):
    """Compass search with per-coordinate step sizes; ``feasible`` projects candidates."""
    x, fx = x0.copy(), f0
    dim = x.size
    eye = np.concatenate([np.eye(dim), -np.eye(dim)])
    floor = 1e-13 * max(1.0, float(np.abs(x).max()))
    for _ in range(iters):
        cand = feasible(x[None, :] + eye * steps[None, :])
        vals = objective(cand)
        j = int(np.argmax(vals))
        if vals[j] > fx:
            x, fx = cand[j], float(vals[j])
        else:
            steps = 0.5 * steps
            if np.all(steps < floor):
                break
    return x, fx


def _refine(objective, x0, f0, scale, feasible, cfg: SupremumConfig, seed: int, dim: int):
    x, fx = x0, f0
    for r in range(cfg.refine_rounds):
        rad = scale * 0.1 ** r
        cloud = _cube_to_domain(_sobol(dim + 1, cfg.cloud_points, seed + 7919 * (r + 1)), UnitBall(), dim, 0.0)
        cand = feasible(x[None, :] + rad * cloud)
        vals = objective(cand)
        j = int(np.argmax(vals))
        if vals[j] > fx:
            x, fx = cand[j], float(vals[j])
    steps = np.full(dim, scale * 0.1 ** cfg.refine_rounds)
    return _polish(objective, x, fx, steps, feasible, cfg.polish_iters)


# ---------------------------------------------------------------------------
# Bloch number


def bloch_integrand(f: MappingUnderTest, w: Weight, cw: Weight, X, dcfg: DerivativeConfig | None = None) -> np.ndarray:
    """cw(f(x)) / w(x) * d*_f(x) for each row of ``X``."""
    X = np.atleast_2d(as_vector(X, f.dim))
    fX = f(X)
    d = upper_derivatives(f, X, dcfg, fX=fX)
    return cw(fX) / w(X) * d


def bloch_number(
    f: MappingUnderTest,
    w: Weight,
    cw: Weight,
    cfg: SupremumConfig | None = None,
    dcfg: DerivativeConfig | None = None,
) -> BlochEstimate:
    """Lower estimate of the Bloch number with a per-shell breakdown.

    Shell ``delta`` is the domain shrunk by ``delta``; shells are swept from
    the innermost outwards and each one starts from the previous argmax, so
    the per-shell values are non-decreasing.
    """
    cfg = cfg or SupremumConfig()
    dom = f.domain

    def objective(X):
        return bloch_integrand(f, w, cw, X, dcfg)

    shells = []
    best_x, best_v = None, -np.inf
    scale = _spacing(dom, f.dim, cfg.interior_samples)
    for k, delta in enumerate(cfg.shell_deltas):
        X = sample_domain(dom, f.dim, cfg.interior_samples, cfg.seed + k, delta)
        if best_x is not None:
            X = np.concatenate([best_x[None, :], X])
        vals = objective(X)
        if not np.all(np.isfinite(vals)):
            raise NonConvergenceError("Bloch integrand is not finite at a sample point")
        j = int(np.argmax(vals))

        def feasible(P, delta=delta):
            return project(dom, P, delta)

        x, v = _refine(objective, X[j], float(vals[j]), scale, feasible, cfg, cfg.seed + 101 * k, f.dim)
        best_x, best_v = x, v
        shells.append(ShellResult(delta, float(v), tuple(float(c) for c in x)))
    return BlochEstimate(float(best_v), tuple(float(c) for c in best_x), tuple(shells))


# ---------------------------------------------------------------------------
# Lipschitz number


def lipschitz_ratio(f: MappingUnderTest, psi: AdmissibleFn, X, Y, fX=None, fY=None) -> np.ndarray:
    """Psi(x, y) * ||f(x) - f(y)|| / ||x - y|| for paired rows."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    fX = f(X) if fX is None else fX
    fY = f(Y) if fY is None else fY
    num = np.linalg.norm(fX - fY, ord=f.codomain_norm.exponent, axis=-1)
    den = np.linalg.norm(X - Y, ord=f.domain_norm.exponent, axis=-1)
    return psi(X, Y, fX, fY) * num / den


MIN_SEPARATION = 1e-12
# refinement never shrinks a pair below this separation (relative to the domain width);
# difference quotients lose accuracy to cancellation beyond it
REFINE_SEPARATION = 1e-7


def _pair_samples(dom, dim: int, n: int, seed: int, margin: float, width: float):
    n_global = n // 2
    n_near = n - n_global
    u = _sobol(2 * (dim + 1), n_global, seed)
    Xg = _cube_to_domain(u[:, : dim + 1], dom, dim, margin)
    Yg = _cube_to_domain(u[:, dim + 1:], dom, dim, margin)
    v = _sobol(dim + 2, n_near, seed + 1)
    Xn = _cube_to_domain(v[:, : dim + 1], dom, dim, margin)
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n_near, dim))
    g /= np.linalg.norm(g, axis=-1, keepdims=True)
    h = width * 10.0 ** (-6.0 + 5.0 * v[:, dim + 1])
    Yn = project(dom, Xn + h[:, None] * g, margin)
    return np.concatenate([Xg, Xn]), np.concatenate([Yg, Yn])


def lipschitz_number(
    f: MappingUnderTest,
    psi: AdmissibleFn,
    cfg: SupremumConfig | None = None,
    margin: float | None = None,
) -> LipschitzEstimate:
    """Lower estimate of the Lipschitz number.

    Half of the pairs are independent, half are near-diagonal perturbations
    (separations log-uniform over five decades). The best pair is refined
    over (x, y - x) jointly. Pairs closer than 1e-12 are skipped and counted.
    """
    cfg = cfg or SupremumConfig()
    dom = f.domain
    margin = min(cfg.shell_deltas) if margin is None else margin
    width = _spacing(dom, f.dim, 1)
    X, Y = _pair_samples(dom, f.dim, cfg.pair_samples, cfg.seed, margin, width)
    sep = np.linalg.norm(X - Y, ord=f.domain_norm.exponent, axis=-1)
    good = sep >= MIN_SEPARATION
    skipped = int((~good).sum())
    X, Y = X[good], Y[good]
    vals = lipschitz_ratio(f, psi, X, Y)
    j = int(np.argmax(vals))
    dim = f.dim
    floor = REFINE_SEPARATION * width

    def split(P):
        return P[:, :dim], P[:, :dim] + P[:, dim:]

    def feasible(P):
        x = project(dom, P[:, :dim], margin)
        y = project(dom, P[:, :dim] + P[:, dim:], margin)
        return np.concatenate([x, y - x], axis=-1)

    def objective(P):
        x, y = split(P)
        out = np.full(P.shape[0], -np.inf)
        ok = np.linalg.norm(y - x, ord=f.domain_norm.exponent, axis=-1) >= floor
        if np.any(ok):
            out[ok] = lipschitz_ratio(f, psi, x[ok], y[ok])
        return out

    P0 = np.concatenate([X[j], Y[j] - X[j]])
    best_v = float(vals[j])
    sep0 = float(np.linalg.norm(Y[j] - X[j]))
    scale = _spacing(dom, dim, cfg.pair_samples // 2)
    x, v = P0, best_v
    for r in range(cfg.refine_rounds):
        cloud = _cube_to_domain(_sobol(2 * dim + 1, cfg.cloud_points, cfg.seed + 7919 * (r + 1)), UnitBall(), 2 * dim, 0.0)
        rad = np.concatenate([np.full(dim, scale), np.full(dim, 0.5 * sep0)]) * 0.1 ** r
        cand = feasible(x[None, :] + rad * cloud)
        cv = objective(cand)
        k = int(np.argmax(cv))
        if cv[k] > v:
            x, v = cand[k], float(cv[k])
    steps = np.concatenate([np.full(dim, scale * 0.1 ** cfg.refine_rounds), np.full(dim, 0.25 * max(np.linalg.norm(x[dim:]), floor))])
    x, v = _polish(objective, x, v, steps, feasible, cfg.polish_iters)
    xa, ya = x[:dim], x[:dim] + x[dim:]
    return LipschitzEstimate(float(v), (tuple(float(c) for c in xa), tuple(float(c) for c in ya)), skipped)


# ---------------------------------------------------------------------------
# admissibility


@dataclass(frozen=True)
class AdmissibilityConfig:
    pairs: int = 1000
    seed: int = 42
    margin: float = 1e-2
    # relative accuracy assumed for numerically computed distances
    distance_rtol: float = 1e-4
    numerical_pairs: int = 50
    use_exact_distances: bool = True
    liminf_points: int = 100
    liminf_radii: tuple = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8)
    witnesses: int = 5
    geodesic: GeodesicConfig = field(default_factory=GeodesicConfig)


@dataclass
class ConditionResult:
    name: str
    passed: bool
    checked: int
    worst: float
    witnesses: list
    one_sided: bool = False
    note: str = ""


@dataclass
class AdmissibilityReport:
    psi: str
    conditions: dict
    passed: bool

    def to_dict(self) -> dict:
        return {
            "psi": self.psi,
            "passed": self.passed,
            "conditions": {k: asdict(v) for k, v in self.conditions.items()},
        }


def _witnesses(score, X, Y, k):
    order = np.argsort(score, kind="stable")[:k]
    return [
        {"x": X[i].tolist(), "y": Y[i].tolist(), "value": float(score[i])}
        for i in order
        if score[i] < 0
    ]


def _distances(weight: Weight, A, B, cfg: AdmissibilityConfig):
    """Distances for paired rows, plus the relative tolerance they carry."""
    if cfg.use_exact_distances and weight.exact_distance is not None:
        return np.asarray(weight.exact_distance(A, B), dtype=float), 0.0
    out = np.array([omega_distance(a, b, weight, cfg.geodesic).value for a, b in zip(A, B)])
    return out, cfg.distance_rtol


def check_admissible(
    psi: AdmissibleFn, f: MappingUnderTest, w: Weight, cw: Weight, cfg: AdmissibilityConfig | None = None
) -> AdmissibilityReport:
    """Sampled check of the four admissibility conditions.

    (1) symmetry and (2) the diagonal identity are tested to round-off.
    (3) is one-sided evidence: Psi(x, x + r u) must not fall below Psi(x, x)
    along shrinking r. With the constant target weight the simplified
    condition Psi * d_w(x, y) <= ||x - y|| is tested, otherwise
    Psi * ||f(x) - f(y)|| * d_w(x, y) <= d_cw(f(x), f(y)) * ||x - y||.
    The allowed relative excess is three times the tolerance of the distance
    computation (zero for closed forms, up to round-off).
    """
    cfg = cfg or AdmissibilityConfig()
    dom = f.domain
    width = _spacing(dom, f.dim, 1)
    X, Y = _pair_samples(dom, f.dim, cfg.pairs, cfg.seed, cfg.margin, width)
    keep = np.linalg.norm(X - Y, axis=-1) >= MIN_SEPARATION
    X, Y = X[keep], Y[keep]
    fX, fY = f(X), f(Y)
    conditions = {}

    a = psi(X, Y, fX, fY)
    b = psi(Y, X, fY, fX)
    score = 1e-12 * np.maximum(1.0, np.abs(a)) - np.abs(a - b)
    conditions["symmetry"] = ConditionResult("symmetry", bool(np.all(score >= 0)), len(X), float(np.max(np.abs(a - b))), _witnesses(score, X, Y, cfg.witnesses))

    diag = psi(X, X, fX, fX)
    target = cw(fX) / w(X)
    score = 1e-12 * np.maximum(1.0, np.abs(target)) - np.abs(diag - target)
    conditions["diagonal"] = ConditionResult("diagonal", bool(np.all(score >= 0)), len(X), float(np.max(np.abs(diag - target))), _witnesses(score, X, X, cfg.witnesses))

    rng = np.random.default_rng(cfg.seed + 3)
    P = X[: cfg.liminf_points]
    U = rng.normal(size=P.shape)
    U /= np.linalg.norm(U, axis=-1, keepdims=True)
    r_min = min(cfg.liminf_radii)
    Pn = P + r_min * U
    fP, fPn = f(P), f(Pn)
    at_diag = psi(P, P, fP, fP)
    near = psi(P, Pn, fP, fPn)
    score = near - at_diag * (1 - 1e-6) + 1e-12
    conditions["liminf"] = ConditionResult(
        "liminf", bool(np.all(score >= 0)), len(P), float(np.min(near - at_diag)), _witnesses(score, P, Pn, cfg.witnesses),
        one_sided=True, note=f"finite evidence along y = x + r u down to r = {r_min:g}",
    )

    n_dist = len(X)
    if not (cfg.use_exact_distances and w.exact_distance is not None):
        n_dist = min(n_dist, cfg.numerical_pairs)
    Xd, Yd, fXd, fYd = X[:n_dist], Y[:n_dist], fX[:n_dist], fY[:n_dist]
    dw, tol_w = _distances(w, Xd, Yd, cfg)
    dxy = np.linalg.norm(Xd - Yd, ord=f.domain_norm.exponent, axis=-1)
    psi_d = psi(Xd, Yd, fXd, fYd)
    if cw.label == "const1":
        budget = 3 * tol_w
        lhs = psi_d * dw
        score = dxy * (1 + budget) + 1e-12 - lhs
        conditions["distance_4prime"] = ConditionResult(
            "distance_4prime", bool(np.all(score >= 0)), n_dist, float(np.min(dxy - lhs)), _witnesses(score, Xd, Yd, cfg.witnesses),
            note=f"relative budget {budget:g}",
        )
    else:
        same = np.all(fXd == fYd, axis=-1)
        dcw = np.zeros(n_dist)
        tol_cw = 0.0
        if np.any(~same):
            vals, tol_cw = _distances(cw, fXd[~same], fYd[~same], cfg)
            dcw[~same] = vals
        budget = 3 * (tol_w + tol_cw)
        dfxy = np.linalg.norm(fXd - fYd, ord=f.codomain_norm.exponent, axis=-1)
        lhs = psi_d * dfxy * dw
        rhs = dcw * dxy
        score = rhs * (1 + budget) + 1e-12 * np.maximum(1.0, rhs) - lhs
        conditions["distance_4"] = ConditionResult(
            "distance_4", bool(np.all(score >= 0)), n_dist, float(np.min(rhs - lhs)), _witnesses(score, Xd, Yd, cfg.witnesses),
            note=f"relative budget {budget:g}",
        )
    passed = all(c.passed for c in conditions.values())
    return AdmissibilityReport(psi.label, conditions, passed)


# ---------------------------------------------------------------------------
# certification


@dataclass
class EqualityCertificate:
    bloch_estimate: float
    lipschitz_estimate: float
    argmax_point: tuple
    argmax_pair: tuple
    relative_gap: float
    tolerance: float
    passed: bool
    config: dict
    shells: list = field(default_factory=list)
    admissibility: dict | str | None = None
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "bloch_estimate": self.bloch_estimate,
            "lipschitz_estimate": self.lipschitz_estimate,
            "argmax_point": list(self.argmax_point) if self.argmax_point else None,
            "argmax_pair": [list(p) for p in self.argmax_pair] if self.argmax_pair else None,
            "relative_gap": self.relative_gap,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "config": self.config,
            "shells": self.shells,
            "admissibility": self.admissibility,
            "failures": self.failures,
        }


def _failure(stage: str, exc: Exception) -> dict:
    kind = "nonconvergence" if isinstance(exc, NonConvergenceError) else "domain"
    return {"stage": stage, "kind": kind, "error": str(exc)}


def relative_gap(a: float, b: float) -> float:
    return abs(a - b) / max(a, b, 1e-300)


def certify_equality(
    f: MappingUnderTest,
    w: Weight,
    cw: Weight,
    psi: AdmissibleFn,
    cfg: SupremumConfig | None = None,
    tolerance: float = 0.02,
    dcfg: DerivativeConfig | None = None,
    admissibility: AdmissibilityReport | None = None,
    waive_admissibility: bool = False,
) -> EqualityCertificate:
    """Estimate both numbers under one seed and compare them.

    ``admissibility`` is a prior :func:`check_admissible` report; without
    one (and without the waiver) a reduced check with 200 pairs runs first.
    A failing admissibility report fails the certificate.
    """
    cfg = cfg or SupremumConfig()
    failures = []
    if waive_admissibility:
        adm = "waived"
        adm_ok = True
    else:
        if admissibility is None:
            try:
                admissibility = check_admissible(psi, f, w, cw, AdmissibilityConfig(pairs=200, seed=cfg.seed, numerical_pairs=10))
            except (DomainError, NonConvergenceError) as exc:
                failures.append(_failure("admissibility", exc))
        adm = admissibility.to_dict() if admissibility is not None else None
        adm_ok = admissibility is not None and admissibility.passed
        if admissibility is not None and not admissibility.passed:
            failures.append({"stage": "admissibility", "kind": "check", "error": "admissibility check failed"})

    config = {
        "interior_samples": cfg.interior_samples,
        "pair_samples": cfg.pair_samples,
        "refine_rounds": cfg.refine_rounds,
        "shell_deltas": list(cfg.shell_deltas),
        "seed": cfg.seed,
        "map": f.label,
        "weight": w.label,
        "coweight": cw.label,
        "psi": psi.label,
    }
    bloch = lip = None
    try:
        bloch = bloch_number(f, w, cw, cfg, dcfg)
    except (DomainError, NonConvergenceError) as exc:
        failures.append(_failure("bloch", exc))
    try:
        lip = lipschitz_number(f, psi, cfg)
    except (DomainError, NonConvergenceError) as exc:
        failures.append(_failure("lipschitz", exc))
    if bloch is None or lip is None:
        return EqualityCertificate(
            bloch.value if bloch else float("nan"), lip.value if lip else float("nan"),
            bloch.argmax if bloch else (), lip.argmax_pair if lip else (),
            float("nan"), tolerance, False, config, admissibility=adm, failures=failures,
        )
    gap = relative_gap(bloch.value, lip.value)
    return EqualityCertificate(
        bloch_estimate=bloch.value,
        lipschitz_estimate=lip.value,
        argmax_point=bloch.argmax,
        argmax_pair=lip.argmax_pair,
        relative_gap=gap,
        tolerance=tolerance,
        passed=bool(gap <= tolerance and adm_ok),
        config=config,
        shells=bloch.to_dict()["shells"],
        admissibility=adm,
        failures=failures,
    )
