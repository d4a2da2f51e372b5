"""Command line entry point: ``thetavfa {solve,bench,generate,verify,replay}``.

Exit codes: 0 success, 2 unreadable or invalid input, 3 solver failure,
4 verification failure.  Every ``RunConfig`` field can be set through a
``THETAVFA_<FIELD>`` environment variable; command-line flags win.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .bench import (
    GuardrailError,
    RunConfig,
    SolverFailure,
    canonical_family,
    exact_alpha,
    generate_instance,
    parse_generator_spec,
    rows_to_csv,
    run_bench,
    solve_instance,
    write_outputs,
)
from .dimacs import BUNDLED, DimacsError, emit_dimacs, load_bundled, read_dimacs
from .graph import GraphError, WeightedGraph, induced_subgraph
from .rounding import RoundingTrace, check_weight_equality_condition, round_greedy, round_lookahead_counipolar
from .sdp import SdpNumericalError, ThetaCertificate, verify_certificate
from .vfa import EXACT_RANK_TOL, VfaContext, check_vfa_axioms

EXIT_OK, EXIT_PARSE, EXIT_SOLVER, EXIT_VERIFY = 0, 2, 3, 4

log = logging.getLogger("thetavfa")


class InputError(Exception):
    pass


def _load_graph(source: str, complement: bool) -> WeightedGraph:
    """A DIMACS path, a bundled instance name, or a ``.json`` graph."""
    path = Path(source)
    if path.exists():
        if path.suffix == ".json":
            g = WeightedGraph.from_json(path.read_text())
            return g.complement() if complement else g
        return read_dimacs(path, complement=complement)
    if source in BUNDLED:
        return load_bundled(source, complement=complement)
    raise InputError(f"no such file or bundled instance: {source}")


def _config(args) -> RunConfig:
    overrides = {
        "eps_sdp": getattr(args, "eps_sdp", None),
        "eps_sdp_lookahead": getattr(args, "eps_sdp_lookahead", None),
        "eps_vfa": getattr(args, "eps_vfa", None),
        "ridge": getattr(args, "ridge", None),
        "eps_supp": getattr(args, "eps_supp", None),
        "eps_gap": getattr(args, "eps_gap", None),
        "seed": getattr(args, "seed", None),
        "method": getattr(args, "method", None),
        "oracle": getattr(args, "oracle", None),
        "backend": getattr(args, "backend", None),
        "by_runs": getattr(args, "by_runs", None),
        "threads": getattr(args, "threads", None),
        "allow_large": True if getattr(args, "allow_large", False) else None,
        "csv_path": getattr(args, "csv", None),
        "jsonl_path": getattr(args, "jsonl", None),
    }
    return RunConfig.from_env(**overrides)


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--method", choices=["lookahead", "greedy", "by", "all"])
    p.add_argument("--eps-sdp", type=float, help="theta gap target for greedy/baseline (default 1e-5)")
    p.add_argument("--eps-sdp-lookahead", type=float, help="theta gap target for look-ahead (default 1e-8)")
    p.add_argument("--eps-vfa", type=float)
    p.add_argument("--ridge", type=float)
    p.add_argument("--eps-supp", type=float)
    p.add_argument("--eps-gap", type=float)
    p.add_argument("--backend", choices=["cg", "pinv"])
    p.add_argument("--by-runs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--oracle", choices=["auto", "bruteforce", "none"])
    p.add_argument("--allow-large", action="store_true")


def cmd_solve(args) -> int:
    config = _config(args)
    alpha = None
    if args.generate:
        family, params = parse_generator_spec(args.generate)
        n, seed = params.pop("n"), params.pop("seed", config.seed)
        inst = generate_instance(family, n, seed, **params)
        g, name = inst.graph, inst.name
        if config.oracle != "none":
            alpha, _ = exact_alpha(inst, config.oracle)
    else:
        g = _load_graph(args.dimacs, args.complement)
        name = Path(args.dimacs).stem
    res = solve_instance(g, config, name, alpha)
    rec = res.record
    for method, s in res.sets.items():
        line = f"{method}: weight {s.weight:g}  theta {rec.theta:.6f}  gap to theta {rec.theta - s.weight:.6f}"
        if alpha is not None:
            line += f"  alpha {alpha:g}"
        print(line)
        print(f"  vertices {' '.join(str(v) for v in s.vertices)}")
    print(rec.to_json())
    over = [m for m, s in res.sets.items() if s.weight > rec.theta + max(config.eps_sdp, 1e-6) * (1 + rec.theta)
            or (alpha is not None and s.weight > alpha + 1e-9)]
    if args.certificate_out:
        Path(args.certificate_out).write_text(json.dumps([
            {"vertices": list(mp.to_parent), "graph": sub.to_dict(), "certificate": cert.to_dict()}
            for sub, mp, cert in res.certificates
        ]))
    if args.trace_out:
        bundle = []
        for method, k, trace in res.traces:
            sub, mp, cert = res.certificates[k]
            bundle.append({"method": method, "vertices": list(mp.to_parent), "graph": sub.to_dict(),
                           "certificate": cert.to_dict(), "trace": trace.to_dict()})
        Path(args.trace_out).write_text(json.dumps(bundle))
    if over:
        print(f"weight exceeds theta or alpha for {', '.join(over)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_bench(args) -> int:
    config = _config(args)
    families = [canonical_family(f) for f in args.families.split(",")]
    sizes = [int(s) for s in args.sizes.split(",")]
    rows, records = run_bench(families, sizes, args.count, config)
    write_outputs(rows, records, config.csv_path, config.jsonl_path)
    sys.stdout.write(rows_to_csv(rows))
    bad = [r for r in records if r.alpha is not None and any(w > r.alpha + 1e-6 for w in r.weights.values())]
    return EXIT_VERIFY if bad else EXIT_OK


def cmd_generate(args) -> int:
    inst = generate_instance(args.family, args.n, args.seed)
    text = emit_dimacs(inst.graph, comment=f"{inst.name}")
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.certificate_out and inst.certificate is not None:
        c = inst.certificate
        Path(args.certificate_out).write_text(json.dumps({
            "kind": c.kind, "center": sorted(c.center), "clusters": [sorted(x) for x in c.clusters]}))
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load_graph(args.graph, args.complement)
    try:
        data = json.loads(Path(args.certificate).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read certificate {args.certificate}: {exc}") from None
    entries = data if isinstance(data, list) else [{"certificate": data}]
    failed = False
    for k, entry in enumerate(entries):
        cert = ThetaCertificate.from_dict(entry["certificate"])
        sub = g
        verts = entry.get("vertices")
        if verts is not None and any(not 0 <= v < g.n for v in verts):
            print(f"component {k}: dimension mismatch: certificate refers to vertex {max(verts)}, "
                  f"graph has {g.n} vertices")
            failed = True
            continue
        if verts is not None and len(verts) != g.n:
            sub, _ = induced_subgraph(g, verts)
        if cert.n != sub.n:
            print(f"component {k}: dimension mismatch: certificate has {cert.n} vertices, graph has {sub.n}")
            failed = True
            continue
        report = verify_certificate(sub, cert, args.tol)
        for name, (value, threshold, ok) in report.checks.items():
            print(f"component {k}: {name:16s} {value:.3e} <= {threshold:.1e}  {'ok' if ok else 'FAIL'}")
        failed |= not report.passed
        if args.axioms:
            ax = check_vfa_axioms(sub, VfaContext.from_certificate(cert, backend="pinv", rank_tol=EXACT_RANK_TOL).value,
                                 seed=0)
            for name, value in ax.to_dict().items():
                if name not in ("tol", "passed"):
                    print(f"component {k}: vfa {name:10s} {value:.3e}  {'ok' if value <= ax.tol else 'FAIL'}")
            failed |= not ax.passed
    return EXIT_VERIFY if failed else EXIT_OK


def cmd_replay(args) -> int:
    try:
        bundle = json.loads(Path(args.bundle).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read trace bundle {args.bundle}: {exc}") from None
    failed = False
    for k, entry in enumerate(bundle):
        g = WeightedGraph.from_dict(entry["graph"])
        cert = ThetaCertificate.from_dict(entry["certificate"])
        old = RoundingTrace.from_dict(entry["trace"], g)
        p = old.params
        ctx = VfaContext.from_certificate(cert, backend=p.get("backend", "cg"), ridge=p.get("ridge", 1e-4),
                                          eps_vfa=p.get("eps_vfa", 1e-6))
        if old.method == "greedy":
            _, new = round_greedy(g, ctx, tie_tol=p.get("tie_tol", 1e-9))
        else:
            _, new = round_lookahead_counipolar(g, cert, ctx, return_trace=True, snapshots=True,
                                                eps_supp=p.get("eps_supp"), eps_gap=p.get("eps_gap", 1e-4))
        same = [e.to_dict() for e in new.events] == [e.to_dict() for e in old.events]
        print(f"component {k}: {old.method} replay {'identical' if same else 'DIFFERS'}; "
              f"weight {new.stable_set.weight:g} (recorded {old.stable_set.weight:g})")
        failed |= not same
        if old.method != "greedy" and new.snapshots is not None:
            rep = check_weight_equality_condition(new, VfaContext.from_certificate(cert, backend="pinv"),
                                                  p.get("eps_gap", 1e-4))
            worst = max((abs(r["difference"]) for r in rep.rows), default=0.0)
            print(f"component {k}: weight equality worst {worst:.3e}; violations {list(rep.violations)}")
    return EXIT_VERIFY if failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thetavfa", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one instance")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--dimacs", help="DIMACS file, .json graph, or one of " + ", ".join(BUNDLED))
    src.add_argument("--generate", help="generator spec such as chordal:n=50,seed=7")
    p.add_argument("--complement", action="store_true", help="complement the graph after reading")
    p.add_argument("--certificate-out")
    p.add_argument("--trace-out", help="write a replayable trace bundle")
    _add_config_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="optimal%% table over generated families")
    p.add_argument("--families", default="chordal,co-chordal,generalized-split")
    p.add_argument("--sizes", default="20,50")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--threads", type=int)
    p.add_argument("--csv")
    p.add_argument("--jsonl")
    _add_config_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("generate", help="write a generated instance as DIMACS")
    p.add_argument("family")
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--certificate-out", help="generalized-split structure as JSON")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="re-check a theta certificate against a graph")
    p.add_argument("certificate")
    p.add_argument("graph")
    p.add_argument("--complement", action="store_true")
    p.add_argument("--tol", type=float, default=1e-5)
    p.add_argument("--axioms", action="store_true", help="also spot-check the VFA axioms")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("replay", help="re-run the rounding recorded in a trace bundle")
    p.add_argument("bundle")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (DimacsError, InputError, GuardrailError, GraphError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SolverFailure, SdpNumericalError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
