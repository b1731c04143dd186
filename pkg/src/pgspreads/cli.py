"""Command line surface.

Subcommands: construct (size ladder), verify (re-check a certificate),
search (drive toward a target size), spectrum (sweep all sizes), bounds
(reference table). Exit codes: 0 verified maximal, 1 search failure,
2 valid but extendable, 3 invalid certificate, 4 usage error.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import builder, certificate, report, searcher
from .projgeom import context_make
from .searcher import SUPPORTED_Q

EXIT_OK = 0
EXIT_SEARCH_FAILED = 1
EXIT_EXTENDABLE = 2
EXIT_INVALID = 3
EXIT_USAGE = 4


class _UsageExit(Exception):
    def __init__(self, message: str):
        super().__init__(message)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageExit(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="pgspreads", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("construct", help="build a ladder certificate of size q^3+q^2+kq+1")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("verify", help="re-verify a certificate file")
    p.add_argument("path", type=Path)

    p = sub.add_parser("search", help="search for a maximal spread of an exact size")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--target", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", choices=sorted(searcher.BUDGETS), default="ci")
    p.add_argument("--steps", type=int, default=None, help="override per-run step budget")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("spectrum", help="sweep all target sizes and write reports")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--budget", choices=sorted(searcher.BUDGETS), default="ci")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path, required=True)

    p = sub.add_parser("bounds", help="print the reference size window for q")
    p.add_argument("--q", type=int, default=None, help="omit for all supported q")
    p.add_argument("--out", type=Path, default=None, help="directory for csv and figure")
    return parser


def _check_q(q: int) -> None:
    if q not in SUPPORTED_Q:
        raise _UsageExit(f"q={q} unsupported; choose from {SUPPORTED_Q}")


def cmd_construct(args) -> int:
    _check_q(args.q)
    n_max = builder.max_ladder_steps(args.q)
    if not 0 <= args.k <= n_max:
        raise _UsageExit(f"k={args.k} out of range: q={args.q} supports 0 <= k <= {n_max}")
    ctx = context_make(args.q, 5)
    cert = builder.build_ladder(ctx, args.k)
    rep = certificate.verify_certificate(certificate.Certificate.parse(cert.text()), ctx)
    assert rep.valid and rep.maximal
    if args.out is not None:
        certificate.save(cert, args.out)
        print(f"size {cert.size} (q={args.q}, k={args.k}): {rep.verdict()}")
        print(f"certificate written to {args.out}")
    else:
        sys.stdout.write(cert.text())
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        cert = certificate.load(args.path)
    except (OSError, certificate.CertificateError) as exc:
        print(f"invalid: {exc}")
        return EXIT_INVALID
    rep = certificate.verify_certificate(cert)
    print(rep.verdict())
    if not rep.valid:
        return EXIT_INVALID
    return EXIT_OK if rep.maximal else EXIT_EXTENDABLE


def cmd_search(args) -> int:
    _check_q(args.q)
    q = args.q
    low = searcher.min_mps_size(q)
    full = searcher.spread_size(q, 5)
    if not low <= args.target <= full:
        raise _UsageExit(f"target must lie in [{low}, {full}] for q={q}")
    if searcher.excluded_by_bounds(q, args.target):
        delta = full - args.target
        raise _UsageExit(
            f"target {args.target} refused: deficiency {delta} < "
            f"minimum deficiency {searcher.delta_min(q)} for q={q}"
        )
    ctx = context_make(q, 5)
    params = searcher.BUDGETS[args.budget]
    cfg = searcher.SearchConfig(
        rng_seed=args.seed,
        restarts=params["restarts"],
        max_steps=args.steps or params["max_steps"],
        target_size=args.target,
    )
    rng = random.Random(args.seed ^ 0x5EED)
    start = searcher.search_start(ctx, args.target, rng)
    outcome = searcher.local_search_resize(start, args.target, cfg)
    if not outcome.reached:
        print(
            f"budget exhausted after {outcome.steps_used} steps: "
            f"best size found {outcome.best_size} (target {args.target})"
        )
        return EXIT_SEARCH_FAILED
    cert = outcome.certificate
    if args.out is not None:
        certificate.save(cert, args.out)
        print(f"reached target {args.target} in {outcome.steps_used} steps")
        print(f"certificate written to {args.out}")
    else:
        sys.stdout.write(cert.text())
    return EXIT_OK


def cmd_spectrum(args) -> int:
    _check_q(args.q)
    rep = searcher.spectrum_scan(
        args.q, budget=args.budget, rng_seed=args.seed, jobs=args.jobs
    )
    report.write_spectrum_outputs(rep, args.out)
    print(report.spectrum_table(rep))
    print(f"reports written to {args.out}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    qs = [args.q] if args.q is not None else list(SUPPORTED_Q)
    for q in qs:
        _check_q(q)
    rows = [searcher.bounds_row(q) for q in qs]
    for row in rows:
        print(f"q={row.q}: {report.bounds_table_line(row)}")
        print(
            f"  density lower bound 45*q^3*log q: {row.density_low_ln:.1f} (ln), "
            f"{row.density_low_log2:.1f} (log2)"
        )
        print(
            f"  modified lower bound 2*q^3*log q: {row.modified_low_ln:.1f} (ln), "
            f"{row.modified_low_log2:.1f} (log2)"
        )
    if args.out is not None:
        report.write_bounds_outputs(rows, args.out)
        print(f"reports written to {args.out}")
    return EXIT_OK


_COMMANDS = {
    "construct": cmd_construct,
    "verify": cmd_verify,
    "search": cmd_search,
    "spectrum": cmd_spectrum,
    "bounds": cmd_bounds,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except _UsageExit as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
