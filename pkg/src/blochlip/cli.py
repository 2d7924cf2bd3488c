"""Batch command-line front end.

Every subcommand writes one JSON report (schema version 1) to stdout, or to
``--out``, and a short human summary to stderr. Exit codes: 0 success, 1 a
check ran and failed, 2 usage error, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from .corpus import corpus_get, corpus_list
from .derivatives import DerivativeConfig
from .errors import DomainError, NonConvergenceError, PoleError
from .omega_distance import GeodesicConfig, lim_ratio_check, omega_distance, omega_distance_grid_oracle
from .operator_monotone import check_sqrt_mean_inequality, is_derivative_increasing, parse_om_spec
from .paths import write_polyline_csv
from .seminorms import (
    AdmissibilityConfig,
    SupremumConfig,
    bloch_number,
    certify_equality,
    check_admissible,
    lipschitz_number,
    parse_psi,
)
from .weights import parse_weight

SCHEMA_VERSION = "1"
SLACK_FLOOR = -1e-12

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Collector(logging.Handler):
    """Gathers library warnings into the report."""

    def __init__(self):
        super().__init__(logging.WARNING)
        self.messages: list[str] = []

    def emit(self, record):
        self.messages.append(record.getMessage())


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _point(text: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"cannot parse point {text!r}; expected comma-separated numbers") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def _entry_and_weights(args):
    try:
        entry = corpus_get(args.map)
    except KeyError as exc:
        raise UsageError(exc.args[0]) from None
    w = parse_weight(args.weight or entry.weight)
    cw = parse_weight(args.coweight or entry.coweight)
    return entry, w, cw


def _sup_cfg(args) -> SupremumConfig:
    kw = {"seed": args.seed}
    for name in ("interior_samples", "pair_samples", "refine_rounds"):
        value = getattr(args, name, None)
        if value is not None:
            kw[name] = value
    if getattr(args, "shells", None):
        kw["shell_deltas"] = tuple(_floats(args.shells))
    return SupremumConfig(**kw)


# ---------------------------------------------------------------------------
# subcommands; each returns (inputs, results, exit code, summary line)


def cmd_distance(args):
    w = parse_weight(args.weight)
    x, y = _point(args.from_), _point(args.to)
    cfg = GeodesicConfig(control_points=args.control_points)
    res = omega_distance(x, y, w, cfg)
    results = {"distance": res.to_dict()}
    if w.exact_distance is not None:
        exact = float(w.exact_distance(x, y))
        results["closed_form"] = {"value": exact, "relative_difference": abs(res.value - exact) / exact}
    if args.oracle:
        oracle = omega_distance_grid_oracle(x, y, w, args.resolution, args.stencil)
        results["oracle"] = {
            "value": oracle,
            "resolution": args.resolution,
            "stencil": args.stencil,
            "relative_difference": abs(res.value - oracle) / oracle,
        }
    if args.export_path:
        write_polyline_csv(res.path, args.export_path)
        results["exported_path"] = str(args.export_path)
    inputs = {"weight": args.weight, "from": x, "to": y, "control_points": args.control_points}
    return inputs, results, EXIT_OK, f"d_w = {res.value:.9g} ({'converged' if res.converged else 'not converged'})"


def cmd_bloch(args):
    entry, w, cw = _entry_and_weights(args)
    cfg = _sup_cfg(args)
    est = bloch_number(entry.mapping, w, cw, cfg, DerivativeConfig(seed=args.seed))
    results = {"estimate": est.to_dict(), "known_bloch": entry.known_bloch, "attained": entry.attained}
    inputs = {"map": args.map, "weight": w.label, "coweight": cw.label, "config": _cfg_echo(cfg)}
    return inputs, results, EXIT_OK, f"Bloch estimate {est.value:.9g} (known {entry.known_bloch})"


def cmd_lipschitz(args):
    entry, w, cw = _entry_and_weights(args)
    psi = parse_psi(args.psi or entry.psi, w, cw)
    cfg = _sup_cfg(args)
    est = lipschitz_number(entry.mapping, psi, cfg)
    results = {"estimate": est.to_dict(), "known_bloch": entry.known_bloch}
    inputs = {"map": args.map, "psi": psi.label, "weight": w.label, "coweight": cw.label, "config": _cfg_echo(cfg)}
    return inputs, results, EXIT_OK, f"Lipschitz estimate {est.value:.9g}"


def cmd_certify(args):
    entry, w, cw = _entry_and_weights(args)
    psi = parse_psi(args.psi or entry.psi, w, cw)
    cfg = _sup_cfg(args)
    cert = certify_equality(
        entry.mapping, w, cw, psi, cfg, args.tol, DerivativeConfig(seed=args.seed),
        waive_admissibility=args.waive_admissibility,
    )
    results = {"certificate": cert.to_dict(), "known_bloch": entry.known_bloch}
    inputs = {"map": args.map, "weight": w.label, "coweight": cw.label, "psi": psi.label, "tol": args.tol}
    if any(f.get("kind") == "nonconvergence" for f in cert.failures):
        code = EXIT_NUMERICAL
    else:
        code = EXIT_OK if cert.passed else EXIT_FAILED
    summary = (
        f"B = {cert.bloch_estimate:.9g}, L = {cert.lipschitz_estimate:.9g}, "
        f"gap {cert.relative_gap:.3g} (tol {args.tol}): {'PASS' if cert.passed else 'FAIL'}"
    )
    return inputs, results, code, summary


def cmd_om_check(args):
    phi = parse_om_spec(args.om)
    rng = np.random.default_rng(args.seed)
    st = np.sort(rng.uniform(-1.0, 1.0, size=(args.pairs, 2)), axis=1)
    st = st[st[:, 0] < st[:, 1]]
    slack = np.atleast_1d(check_sqrt_mean_inequality(phi, st[:, 0], st[:, 1]))
    bad = np.nonzero(slack < SLACK_FLOOR)[0]
    results = {
        "pairs": int(len(st)),
        "slack": {
            "min": float(slack.min()),
            "max": float(slack.max()),
            "mean": float(slack.mean()),
            "quantiles": {str(q): float(np.quantile(slack, q)) for q in (0.01, 0.5, 0.99)},
        },
        "floor": SLACK_FLOOR,
        "violations": int(bad.size),
        "witnesses": [{"s": float(st[i, 0]), "t": float(st[i, 1]), "slack": float(slack[i])} for i in bad[:5]],
    }
    ok = bad.size == 0
    if args.monotone_hi is not None:
        rep = is_derivative_increasing(phi, args.monotone_hi)
        results["derivative_increasing"] = {
            "hi": args.monotone_hi,
            "increasing": rep.increasing,
            "witness": rep.witness,
            "atoms_nonnegative": rep.atoms_nonnegative,
        }
        ok = ok and rep.increasing
    inputs = {"om": str(phi), "pairs": args.pairs, "monotone_hi": args.monotone_hi}
    return inputs, results, EXIT_OK if ok else EXIT_FAILED, f"min slack {slack.min():.3g}, {bad.size} violations"


def cmd_admissible_check(args):
    entry, w, cw = _entry_and_weights(args)
    psi = parse_psi(args.psi or entry.psi, w, cw)
    cfg = AdmissibilityConfig(
        pairs=args.pairs,
        seed=args.seed,
        numerical_pairs=args.numerical_pairs,
        use_exact_distances=not args.numerical_distances,
    )
    rep = check_admissible(psi, entry.mapping, w, cw, cfg)
    inputs = {
        "map": args.map, "psi": psi.label, "weight": w.label, "coweight": cw.label,
        "pairs": args.pairs, "numerical_distances": args.numerical_distances,
    }
    failed = [k for k, v in rep.conditions.items() if not v.passed]
    summary = "all conditions pass" if rep.passed else f"failed: {', '.join(failed)}"
    return inputs, {"report": rep.to_dict()}, EXIT_OK if rep.passed else EXIT_FAILED, summary


def cmd_lim_check(args):
    w = parse_weight(args.weight)
    x = _point(args.at)
    table = lim_ratio_check(x, w, _floats(args.radii), GeodesicConfig(), args.directions)
    inputs = {"weight": args.weight, "at": x, "radii": _floats(args.radii), "directions": args.directions}
    last = table.rows[-1]
    summary = f"w(x) = {table.weight_at_point:.9g}; deviation at r={last.radius:g}: {last.max_deviation:.3g}"
    return inputs, {"table": table.to_dict()}, EXIT_OK if table.shrinking else EXIT_FAILED, summary


def cmd_corpus(args):
    entries = [corpus_get(label).to_dict() for label in corpus_list()]
    return {"action": args.action}, {"entries": entries}, EXIT_OK, f"{len(entries)} corpus entries"


def _cfg_echo(cfg: SupremumConfig) -> dict:
    return {
        "interior_samples": cfg.interior_samples,
        "pair_samples": cfg.pair_samples,
        "refine_rounds": cfg.refine_rounds,
        "shell_deltas": list(cfg.shell_deltas),
    }


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="seed for every randomised step (default 42)")
    common.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")
    common.add_argument("--timings", action="store_true", help="include wall-clock timings (breaks byte-identical reruns)")

    parser = argparse.ArgumentParser(prog="blochlip", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("distance", parents=[common], help="omega-distance between two points")
    p.add_argument("--weight", required=True)
    p.add_argument("--from", dest="from_", required=True, metavar="X")
    p.add_argument("--to", required=True, metavar="Y")
    p.add_argument("--control-points", type=int, default=33)
    p.add_argument("--oracle", action="store_true", help="also run the planar grid oracle")
    p.add_argument("--resolution", type=int, default=400)
    p.add_argument("--stencil", type=int, default=8, choices=(8, 16, 32))
    p.add_argument("--export-path", type=Path)
    p.set_defaults(func=cmd_distance)

    def mapping_args(p, psi=False):
        p.add_argument("--map", required=True)
        p.add_argument("--weight", help="defaults to the corpus entry's weight")
        p.add_argument("--coweight", help="defaults to the corpus entry's coweight")
        if psi:
            p.add_argument("--psi", help="defaults to the corpus entry's psi")

    def sup_args(p):
        p.add_argument("--interior-samples", type=int)
        p.add_argument("--pair-samples", type=int)
        p.add_argument("--refine-rounds", type=int)
        p.add_argument("--shells", help="comma-separated shell deltas")

    p = sub.add_parser("bloch", parents=[common], help="Bloch number estimate")
    mapping_args(p)
    sup_args(p)
    p.set_defaults(func=cmd_bloch)

    p = sub.add_parser("lipschitz", parents=[common], help="Lipschitz number estimate")
    mapping_args(p, psi=True)
    sup_args(p)
    p.set_defaults(func=cmd_lipschitz)

    p = sub.add_parser("certify", parents=[common], help="compare Bloch and Lipschitz numbers")
    mapping_args(p, psi=True)
    sup_args(p)
    p.add_argument("--tol", type=float, default=0.02)
    p.add_argument("--waive-admissibility", action="store_true")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("om-check", parents=[common], help="square-root mean inequality for an operator monotone function")
    p.add_argument("--om", required=True)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--monotone-hi", type=float)
    p.set_defaults(func=cmd_om_check)

    p = sub.add_parser("admissible-check", parents=[common], help="sampled admissibility conditions")
    mapping_args(p, psi=True)
    p.add_argument("--pairs", type=int, default=1000)
    p.add_argument("--numerical-pairs", type=int, default=50)
    p.add_argument("--numerical-distances", action="store_true", help="ignore closed-form distances")
    p.set_defaults(func=cmd_admissible_check)

    p = sub.add_parser("lim-check", parents=[common], help="d_w(x, x + r u) / r against w(x)")
    p.add_argument("--weight", required=True)
    p.add_argument("--at", required=True)
    p.add_argument("--radii", default="1e-1,1e-2,1e-3")
    p.add_argument("--directions", type=int, default=16)
    p.set_defaults(func=cmd_lim_check)

    p = sub.add_parser("corpus", parents=[common], help="built-in mappings")
    p.add_argument("action", choices=("list",))
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    collector = _Collector()
    lib_log = logging.getLogger("blochlip")
    lib_log.addHandler(collector)
    start = time.perf_counter()
    try:
        inputs, results, code, summary = args.func(args)
    except (UsageError, ValueError, KeyError, DomainError, PoleError) as exc:
        print(f"blochlip {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"blochlip {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    finally:
        lib_log.removeHandler(collector)
    elapsed_ms = (time.perf_counter() - start) * 1e3

    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.command,
        "seed": args.seed,
        "inputs": inputs,
        "results": results,
        "timings": {"total_ms": elapsed_ms} if args.timings else None,
        "warnings": collector.messages,
    }
    text = json.dumps(report, sort_keys=True, indent=2, default=_jsonable) + "\n"
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    print(summary, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
