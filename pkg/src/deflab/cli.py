"""Command-line front end: reproducible experiments, machine output on stdout.

Machine-readable JSON (or CSV where tabular) goes to stdout; human
summaries go to stderr. All randomness enters through --seed, so identical
invocations are byte-identical on stdout at any thread count.

Exit codes: 0 success, 1 a verification report found violations,
2 usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import NoReturn, Optional

from . import combinatorics as comb
from . import diagrams as dg
from . import estimation as est
from .core import (
    PairType,
    SubsetQuery,
    TableFormatError,
    deficient_subsets,
    pair_type_of_signature,
    parse_table,
    serialize_table,
)

USAGE_ERROR = 2
VERIFY_ERROR = 1


def _emit(obj: dict) -> None:
    sys.stdout.write(json.dumps(obj) + "\n")


def _note(msg: str) -> None:
    sys.stderr.write(msg + "\n")


def _fail(msg: str, code: int = USAGE_ERROR) -> NoReturn:
    sys.stderr.write(f"error: {msg}\n")
    sys.exit(code)


def _resolve_threads(args: argparse.Namespace) -> Optional[int]:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("DEFLAB_THREADS")
    if env:
        try:
            return int(env)
        except ValueError:
            _fail(f"DEFLAB_THREADS must be an integer, got {env!r}")
    return None


def _parse_type(text: str) -> PairType:
    try:
        return PairType[text.upper()]
    except KeyError:
        _fail(f"unknown type {text!r}, expected T0..T7")


def _check_format(args: argparse.Namespace, csv_ok: bool) -> None:
    if args.format == "csv" and not csv_ok:
        _fail(f"--format csv is not supported for '{args.command}'")


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=0, help="RNG seed (u64, default 0)")
    sub.add_argument("--samples", type=int, help="Monte Carlo sample count")
    sub.add_argument(
        "--format", choices=("json", "csv"), default="json", help="output format"
    )
    sub.add_argument(
        "--threads", type=int, default=None,
        help="worker threads (default all cores; DEFLAB_THREADS overrides)",
    )
    sub.add_argument(
        "--include-t0", action="store_true", help="also report type-T0 pairs"
    )
    sub.add_argument(
        "--force", action="store_true", help="unlock the n=4 exhaustive census"
    )


def _theory_record(quantity: str, exact, real: float, conjectural: bool = False) -> dict:
    if isinstance(exact, Fraction):
        exact = str(exact)
    elif isinstance(exact, int):
        exact = str(exact)
    return {"quantity": quantity, "exact": exact, "real": real, "conjectural": conjectural}


def _rate_and_probability(name: str, rate: Fraction, conjectural: bool) -> list[dict]:
    return [
        _theory_record(f"{name}_rate", rate, float(rate), conjectural),
        _theory_record(
            f"{name}_probability",
            f"1-exp(-{rate})",
            comb.limit_probability(rate),
            conjectural,
        ),
    ]


def cmd_theory(args: argparse.Namespace) -> int:
    _check_format(args, csv_ok=False)
    kind = args.kind
    records: list[dict]
    if kind == "pair2":
        records = _rate_and_probability("pair_deficiency", Fraction(7, 2), False)
    elif kind == "per-type":
        records = _rate_and_probability("per_type_deficiency", Fraction(1, 2), False)
    elif kind == "dary":
        if args.d is None:
            _fail("theory dary needs --d")
        records = _rate_and_probability(
            f"dary_deficiency_d{args.d}", comb.rate_dary(args.d), False
        )
    elif kind == "exceedance":
        if args.s is None:
            _fail("theory exceedance needs --s")
        s = args.s
        rate = comb.rate_exceedance(s)
        records = _rate_and_probability(
            f"exceedance_s{s}", rate, comb.rate_is_conjectural(2, s, s * s - 2 * s)
        )
    elif kind == "partial-sum":
        if args.K is None:
            _fail("theory partial-sum needs --K")
        s = args.s if args.s is not None else 2
        total = comb.partial_ie_sum_exact(comb.rate_exceedance(s), args.K)
        records = [
            _theory_record(
                f"partial_ie_sum_K{args.K}_s{s}", total, comb.float_or_inf(total),
                comb.rate_is_conjectural(2, s, s * s - 2 * s),
            )
        ]
    elif kind == "expected-count":
        if args.n is None:
            _fail("theory expected-count needs --n")
        d = args.d if args.d is not None else 2
        s = args.s if args.s is not None else 2
        lam = comb.expected_count(args.n, d, s, args.eps)
        records = [
            _theory_record(
                f"expected_count_n{args.n}_d{d}_s{s}_eps{args.eps}", lam, float(lam)
            )
        ]
    elif kind == "class-counts":
        if args.k is None:
            _fail("theory class-counts needs --k")
        k = args.k
        records = [
            _theory_record(f"perfect_matchings_k{k}", comb.perfect_matching_count(k),
                           float(comb.perfect_matching_count(k))),
            _theory_record(f"disjoint_pair_classes_k{k}", comb.disjoint_pair_class_count(k),
                           float(comb.disjoint_pair_class_count(k))),
            _theory_record(f"nondisjoint_class_bound_k{k}", comb.nondisjoint_class_bound(k),
                           float(comb.nondisjoint_class_bound(k))),
            _theory_record(f"disjoint_triple_classes_k{k}", comb.disjoint_triple_class_count(k),
                           float(comb.disjoint_triple_class_count(k)), True),
        ]
    else:  # pragma: no cover - argparse restricts choices
        _fail(f"unknown theory kind {kind!r}")
    for rec in records:
        _emit(rec)
    return 0


def cmd_classify(args: argparse.Namespace) -> int:
    _check_format(args, csv_ok=False)
    try:
        with open(args.table, encoding="utf-8") as fh:
            table = parse_table(fh.read())
    except OSError as exc:
        _fail(f"cannot read {args.table}: {exc}")
    except TableFormatError as exc:
        _fail(f"{args.table}: {exc}")
    query = SubsetQuery(subset_size=args.s, max_exceedance=args.eps)
    try:
        listing = []
        found = deficient_subsets(table, query)
        for xs, sig in found:
            entry: dict = {"subset": list(xs), "signature": list(sig.codes)}
            if args.s == 2 and table.arity == 2:
                t = pair_type_of_signature(sig)
                entry["type"] = t.name if t is not None else None
                if t == PairType.T0 and not args.include_t0:
                    continue
            listing.append(entry)
        diagram = None
        if table.arity == 2:
            config = dg.config_of_table(table)
            if config.edges:
                diagram = dg.diagram_of(config).to_json_dict()
        _emit(
            {
                "file": args.table,
                "n": table.order,
                "d": table.arity,
                "s": args.s,
                "eps": args.eps,
                "subsets": listing,
                "diagram": diagram,
            }
        )
    except ValueError as exc:
        _fail(str(exc))
    _note(f"{len(listing)} qualifying subset(s) of size {args.s} at eps<={args.eps}")
    return 0


def _mc_query(args: argparse.Namespace) -> SubsetQuery:
    tf = _parse_type(args.type) if args.type else None
    return SubsetQuery(subset_size=args.s, max_exceedance=args.eps, type_filter=tf)


_CSV_FLOAT = repr


def cmd_mc(args: argparse.Namespace) -> int:
    if args.samples is None:
        _fail("mc needs --samples")
    try:
        rec = est.mc_probability(
            args.n, _mc_query(args), args.samples, args.seed,
            d=args.d, threads=_resolve_threads(args),
        )
    except ValueError as exc:
        _fail(str(exc))
    if args.format == "csv":
        sys.stdout.write("n,d,s,eps,samples,seed,hits,p_hat,stderr,ci_lo,ci_hi\n")
        lo, hi = rec.ci95
        sys.stdout.write(
            f"{rec.n},{rec.d},{rec.s},{rec.eps},{rec.samples},{rec.seed},"
            f"{rec.hits},{_CSV_FLOAT(rec.p_hat)},{_CSV_FLOAT(rec.stderr)},"
            f"{_CSV_FLOAT(lo)},{_CSV_FLOAT(hi)}\n"
        )
    else:
        _emit(rec.to_json_dict())
    _note(f"p_hat={rec.p_hat:.6f} stderr={rec.stderr:.6f} ({rec.hits}/{rec.samples})")
    return 0


def cmd_exact(args: argparse.Namespace) -> int:
    _check_format(args, csv_ok=False)
    tf = _parse_type(args.type) if args.type else None
    query = SubsetQuery(subset_size=args.s, max_exceedance=args.eps, type_filter=tf)
    try:
        res = est.exact_probability(
            args.n, query, d=args.d, force=args.force, threads=_resolve_threads(args)
        )
    except ValueError as exc:
        _fail(str(exc))
    _emit(res.to_json_dict())
    _note(
        f"exhausted {res.tables} tables: p={res.probability} "
        f"mean_count={res.mean_count}"
    )
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.samples is None:
        _fail("sweep needs --samples")
    try:
        n_list = [int(x) for x in args.n_list.split(",") if x]
    except ValueError:
        _fail(f"--n-list must be comma-separated integers, got {args.n_list!r}")
    if not n_list:
        _fail("--n-list is empty")
    query = SubsetQuery(subset_size=args.s, max_exceedance=args.eps)
    try:
        rows = est.sweep(
            n_list, query, args.samples, args.seed,
            d=args.d, threads=_resolve_threads(args),
        )
    except ValueError as exc:
        _fail(str(exc))
    if args.format == "csv":
        sys.stdout.write("n,p_hat,stderr,lambda_n,poisson_approx,limit\n")
        for row in rows:
            r = row.record
            sys.stdout.write(
                f"{r.n},{_CSV_FLOAT(r.p_hat)},{_CSV_FLOAT(r.stderr)},"
                f"{_CSV_FLOAT(float(row.lambda_n))},{_CSV_FLOAT(row.poisson_approx)},"
                f"{_CSV_FLOAT(row.limit)}\n"
            )
    else:
        for row in rows:
            _emit(row.to_json_dict())
    _note(f"swept n in {n_list} at {args.samples} samples each")
    return 0


def cmd_diagrams(args: argparse.Namespace) -> int:
    _check_format(args, csv_ok=False)
    try:
        if args.list:
            listed = dg.enumerate_diagrams(args.k, realizable_only=args.realizable_only)
            for d in listed:
                _emit(d.to_json_dict())
            _note(f"{len(listed)} diagrams with k={args.k}")
        else:
            count = dg.count_diagrams(args.k, realizable_only=args.realizable_only)
            _emit(
                {"k": args.k, "count": count, "realizable_only": args.realizable_only}
            )
            _note(f"{count} diagrams with k={args.k}")
    except ValueError as exc:
        _fail(str(exc))
    return 0


def cmd_verify_lemma3(args: argparse.Namespace) -> int:
    _check_format(args, csv_ok=False)
    try:
        report = dg.verify_lemma3(args.k_max)
    except ValueError as exc:
        _fail(str(exc))
    _emit(report.to_json_dict())
    _note(f"checked {report.checked}, violations {len(report.violations)}")
    return 0 if report.ok() else VERIFY_ERROR


def cmd_witness(args: argparse.Namespace) -> int:
    _check_format(args, csv_ok=False)
    try:
        data = json.loads(args.diagram)
        diagram = dg.Diagram.from_json_dict(data)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        _fail(f"bad diagram JSON: {exc}")
    try:
        table = dg.witness_groupoid(diagram)
    except ValueError as exc:
        _fail(str(exc))
    sys.stdout.write(serialize_table(table))
    _note(f"order-{table.order} witness groupoid")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deflab",
        description="Deficient sets in random groupoids: theory, diagrams, estimation.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("classify", help="list deficient subsets of a table file")
    p.add_argument("table", help="path to a table file")
    p.add_argument("--s", type=int, default=2, help="subset size (default 2)")
    p.add_argument("--eps", type=int, default=0, help="max exceedance (default 0)")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = subs.add_parser("theory", help="closed-form rates, probabilities and counts")
    p.add_argument(
        "kind",
        choices=(
            "pair2", "per-type", "dary", "exceedance",
            "partial-sum", "expected-count", "class-counts",
        ),
    )
    p.add_argument("--d", type=int, help="operation arity")
    p.add_argument("--s", type=int, help="subset size")
    p.add_argument("--K", type=int, help="partial-sum truncation")
    p.add_argument("--n", type=int, help="groupoid order")
    p.add_argument("--eps", type=int, default=0, help="max exceedance")
    p.add_argument("--k", type=int, help="configuration size for class-counts")
    _add_common(p)
    p.set_defaults(func=cmd_theory)

    p = subs.add_parser("exact", help="exhaustive census over all tables of order n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--eps", type=int, default=0)
    p.add_argument("--type", help="restrict to one type T0..T7")
    _add_common(p)
    p.set_defaults(func=cmd_exact)

    p = subs.add_parser("mc", help="Monte Carlo estimate of a deficiency event")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--eps", type=int, default=0)
    p.add_argument("--type", help="restrict to one type T0..T7")
    _add_common(p)
    p.set_defaults(func=cmd_mc)

    p = subs.add_parser("sweep", help="mc over a list of orders with theory columns")
    p.add_argument("--n-list", required=True, help="comma-separated orders")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--s", type=int, default=2)
    p.add_argument("--eps", type=int, default=0)
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    p = subs.add_parser("diagrams", help="enumerate or count labeled diagrams")
    p.add_argument("--k", type=int, required=True, help="edge count (1..4)")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--count", action="store_true", help="count only (default)")
    mode.add_argument("--list", action="store_true", help="emit one JSON per diagram")
    p.add_argument("--realizable-only", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_diagrams)

    p = subs.add_parser("verify-lemma3", help="check the diagram invariants")
    p.add_argument("--k-max", type=int, required=True, help="largest edge count (1..3)")
    _add_common(p)
    p.set_defaults(func=cmd_verify_lemma3)

    p = subs.add_parser("witness", help="construct a groupoid realizing a diagram")
    p.add_argument("--diagram", required=True, help='diagram JSON, e.g. {"v":2,"edges":[[1,2,"T7"]]}')
    _add_common(p)
    p.set_defaults(func=cmd_witness)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.seed is not None and not 0 <= args.seed <= est.MAX_U64:
        _fail(f"--seed must fit in 64 bits, got {args.seed}")
    if args.samples is not None and args.samples < 1:
        _fail(f"--samples must be >= 1, got {args.samples}")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
