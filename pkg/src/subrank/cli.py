"""Command-line front end.

Subcommands: verify (the rank-inequality scan over even k), check (one
(k, r) cell), subrank (exact induced matchings), cw3 (the k = 3 entropy
bound) and suites (identity and inequality scans).

Exit codes: 0 everything verified, 1 a counterexample was found,
2 something stayed undecided or the input was rejected.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .bounds import (
    Policy,
    RankCertificate,
    certificate_bound,
    certify_main_bound,
    scan_conjecture,
    verify_rank_inequality,
)
from .combinatorics import binomial
from .cw import conjectured_value, cw3_lower_bound, parse_alpha
from .hypergraph import kronecker_power, parse_edges, recognize_type_graph, subrank
from .intervals import MAX_PRECISION, default_precision
from .suites import SUITES, exit_code, row, run_suite, summarize

EXIT_OK, EXIT_COUNTEREXAMPLE, EXIT_UNDECIDED = 0, 1, 2

CSV_FIELDS = ("suite", "params", "lhs", "rhs", "verdict", "seed", "method", "decision",
              "code_version", "elapsed_ms")


def code_version() -> str:
    """Hash of the package sources, stamped on every report row."""
    h = hashlib.sha256()
    root = resources.files("subrank")
    for name in sorted(p.name for p in root.iterdir() if p.name.endswith(".py")):
        h.update(name.encode())
        h.update(root.joinpath(name).read_bytes())
    return h.hexdigest()[:12]


def write_report(out: str | None, config: dict, rows: list[dict], summary: dict) -> None:
    if not out:
        return
    d = Path(out)
    d.mkdir(parents=True, exist_ok=True)
    version = code_version()
    for r in rows:
        r.setdefault("code_version", version)
    with (d / "report.json").open("w") as fh:
        json.dump({"config": config, "rows": rows, "summary": summary}, fh, indent=1, sort_keys=True)
        fh.write("\n")
    with (d / "report.csv").open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_FIELDS, extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        w.writerows(rows)


def _progress(quiet: bool):
    if quiet:
        return None

    def report(k, certs):
        bad = sum(not c.verified for c in certs)
        print(f"k={k}: {len(certs)} cells, {bad} unverified", file=sys.stderr)

    return report


def _policy(args) -> Policy:
    return Policy(precision=args.precision or default_precision(), exact_fallback=args.exact_fallback)


def _cert_row(c: RankCertificate, timing: bool, seed: int) -> dict:
    # lhs is the certified bound U on the pair count, rhs is B = C(k-1, k/2);
    # the cell asserts U^(k-2) <= B^(r+k-2)
    U = certificate_bound(c)
    r = row("verify", {"k": c.k, "r": c.r, **({"s": c.s} if c.s is not None else {})},
            "" if U is None else U, binomial(c.k - 1, c.k // 2),
            "fails" if c.counterexample else ("holds" if c.verified else "undecided"), seed)
    r["method"] = c.method or ""
    r["decision"] = c.decision or ""
    if timing:
        r["elapsed_ms"] = f"{c.elapsed_ms:.3f}"
    return r


def cmd_verify(args) -> int:
    if args.k_max < 4 or args.k_max % 2:
        print(f"error: --k-max must be even and >= 4, got {args.k_max}", file=sys.stderr)
        return EXIT_UNDECIDED
    if args.jobs < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_UNDECIDED
    policy = _policy(args)
    report = scan_conjecture(args.k_max, jobs=args.jobs, cache=args.cache, policy=policy,
                             k_min=args.k_min, progress=_progress(args.quiet))
    by_k: dict[int, list[RankCertificate]] = {}
    for c in report.certificates:
        by_k.setdefault(c.k, []).append(c)
    rows = []
    for k in sorted(by_k):
        main = certify_main_bound(k, policy, by_k[k])
        methods: dict[str, int] = {}
        for c in by_k[k]:
            methods[c.method or "none"] = methods.get(c.method or "none", 0) + 1
        decisions = sorted({c.decision or "none" for c in by_k[k]})
        r = row("verify-k", {"k": k, "cells": len(by_k[k])},
                json.dumps(dict(sorted(methods.items())), separators=(",", ":")),
                "log2 Q~ >= 1 for all r in [0, k-2]",
                "fails" if any(c.counterexample for c in by_k[k]) else main.certified, args.seed)
        r["method"] = "+".join(sorted(methods))
        r["decision"] = "+".join(decisions)
        if args.timing:
            r["elapsed_ms"] = f"{sum(c.elapsed_ms for c in by_k[k]):.3f}"
        rows.append(r)
        if args.detail:
            rows.extend(_cert_row(c, args.timing, args.seed) for c in by_k[k])
    summary = report.summary()
    if args.timing:
        summary["elapsed_s"] = round(report.elapsed_s, 3)
    config = {"command": "verify", "k_min": args.k_min, "k_max": args.k_max, "jobs": args.jobs,
              "precision": policy.precision, "max_precision": policy.max_precision,
              "exact_fallback": policy.exact_fallback, "seed": args.seed, "version": __version__}
    write_report(args.out, config, rows, summary)
    print(json.dumps(summary, sort_keys=True))
    return report.exit_code


def cmd_check(args) -> int:
    policy = _policy(args)
    try:
        cert = verify_rank_inequality(args.k, args.r, policy)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    print(json.dumps(cert.to_json(timing=args.timing), sort_keys=True))
    if cert.counterexample:
        return EXIT_COUNTEREXAMPLE
    return EXIT_OK if cert.verified else EXIT_UNDECIDED


def _read(path: str) -> str:
    return sys.stdin.read() if path == "-" else Path(path).read_text()


def cmd_subrank(args) -> int:
    try:
        phi = parse_edges(_read(args.edges))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    if args.power > 1:
        phi = kronecker_power(phi, args.power)
    res = subrank(phi, args.budget)
    print(f"Q = {res.value}" + ("" if res.exact else " (lower bound: search budget exhausted)"))
    print(f"edges = {len(phi)}, nodes = {res.nodes}")
    for e in res.witness:
        print(" ".join(map(str, e)))
    return EXIT_OK if res.exact else EXIT_UNDECIDED


def cmd_cw3(args) -> int:
    try:
        phi = parse_edges(_read(args.edges))
        alpha = parse_alpha(_read(args.alpha))
        res = cw3_lower_bound(phi, alpha)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    print(f"bound = {res.value.value:.6f} bits (certified >= {float(res.value.lower):.9f})")
    print(f"rate = {2 ** res.value.value:.6f}")
    print("P = " + json.dumps([str(p) for p in res.distribution]))
    lam = recognize_type_graph(phi)
    if lam is not None:
        print(f"conjectured = {conjectured_value(lam).value:.6f} bits for type {list(lam.parts)}")
    return EXIT_OK


def cmd_suites(args) -> int:
    params = {"seed": args.seed}
    for name in ("k_max", "n_max", "n_min", "samples", "robbins_max"):
        v = getattr(args, name)
        if v is not None:
            params[name] = v
    rows = run_suite(args.suite, **params)
    summary = summarize(rows)
    config = {"command": "suites", "suite": args.suite, **params, "version": __version__}
    write_report(args.out, config, rows, summary)
    for r in rows:
        if r["verdict"] in ("fails", "undecided"):
            print(f"{r['verdict']}: {r['suite']} {r['params']} lhs={r['lhs']} rhs={r['rhs']}",
                  file=sys.stderr)
    print(json.dumps(summary, sort_keys=True))
    return exit_code(rows)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="subrank", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def precision_flags(q):
        q.add_argument("--precision", type=int, default=None,
                       help="starting interval precision in bits (default: $SUBRANK_PRECISION_BITS or 192)")
        q.add_argument("--exact-fallback", action=argparse.BooleanOptionalAction, default=True,
                       help=f"fall back to exact big-integer powers beyond {MAX_PRECISION} bits")
        q.add_argument("--timing", action="store_true", help="include wall-clock times in the output")

    v = sub.add_parser("verify", help="certify the rank inequality for every even k in a range")
    v.add_argument("--k-min", type=int, default=4)
    v.add_argument("--k-max", type=int, required=True)
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--cache", default=None, help="JSON-lines certificate cache for resuming")
    v.add_argument("--out", default=None, help="directory for report.json and report.csv")
    v.add_argument("--detail", action="store_true", help="one report row per (k, r) cell")
    v.add_argument("--seed", type=int, default=0, help="recorded for provenance; the scan is deterministic")
    v.add_argument("--quiet", action="store_true")
    precision_flags(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("check", help="certify a single (k, r) cell")
    c.add_argument("--k", type=int, required=True)
    c.add_argument("--r", type=int, required=True)
    precision_flags(c)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("subrank", help="exact subrank of a k-graph (or a Kronecker power)")
    s.add_argument("--edges", required=True, help="edge-list file (text or JSON); '-' reads stdin")
    s.add_argument("--power", type=int, default=1)
    s.add_argument("--budget", type=int, default=10**8, help="branch-and-bound node limit")
    s.set_defaults(func=cmd_subrank)

    w = sub.add_parser("cw3", help="entropy lower bound for a tight 3-graph")
    w.add_argument("--edges", required=True)
    w.add_argument("--alpha", required=True, help="alpha-map file with lines 'i: v->a, ...'")
    w.set_defaults(func=cmd_cw3)

    t = sub.add_parser("suites", help="run an identity or inequality suite")
    t.add_argument("--suite", required=True, choices=SUITES)
    t.add_argument("--k-max", type=int, default=None)
    t.add_argument("--n-max", type=int, default=None)
    t.add_argument("--n-min", type=int, default=None)
    t.add_argument("--samples", type=int, default=None)
    t.add_argument("--robbins-max", type=int, default=None)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_suites)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "power", 1) < 1:
        print("error: --power must be >= 1", file=sys.stderr)
        return EXIT_UNDECIDED
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
