"""Command-line interface: sweep classification with CSV/JSON artifacts,
single-predicate property checks, and the random-predicate experiment.

Exit codes: 0 on success, 2 when any result is inconclusive under the
given budgets, 1 on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from .engine import (
    DEFAULT_NODE_BUDGET,
    BudgetExceeded,
    PolymorphismQuery,
    alt_threshold_table,
    exists_polymorphism,
    block_symmetric_exists,
    find_obstructions,
    id_neg_maj_table,
    id_neg_parity_table,
    maj_table,
    parity_table,
)
from .families import (
    DEFAULT_ELL_BUDGET,
    five_family_screen,
    test_at,
    test_id_maj,
    test_id_par,
    test_maj,
    test_par,
)
from .hardness import (
    ada_free,
    and_bound,
    and_in_pol0,
    inverted_matching_bound,
    matching_bound,
    schedule_for,
    unate_minion,
    uncada_free,
    undada_free,
    xnor_bound,
    xnor_in_pol0,
)
from .classify import (
    MODES,
    STATUS_CODES,
    Budgets,
    ClassificationRecord,
    classify_all,
    load_records,
    minimal_maximal,
    random_experiment,
    save_records,
    summarize,
)
from .predicates import Predicate, parse_predicate

UNKNOWN_CODES = {"U"}


def _budgets_from_args(args) -> Budgets:
    schedule = None
    if args.t_max is not None:
        schedule = {name: args.t_max for name in schedule_for(3)}
    return Budgets(
        node_budget=args.node_budget,
        ell_budget=args.ell_budget,
        schedule=schedule,
        run_block_symmetric=not args.no_block_symmetric,
    )


def _records_path(out_dir: str, mode: str, k: int) -> str:
    return os.path.join(out_dir, f"records_{mode}_k{k}.csv")


def _write_summary(out_dir: str, mode: str, k: int, summary: dict) -> None:
    with open(os.path.join(out_dir, f"summary_{mode}_k{k}.json"), "w") as fh:
        json.dump({"arity": k, "mode": mode, **summary}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_weights(out_dir: str, mode: str, k: int, records) -> None:
    """Per-size status histogram: |A| vs. count of each status code."""
    codes = sorted(set(STATUS_CODES.values()))
    hist = {size: {c: 0 for c in codes} for size in range(1, (1 << k) + 1)}
    for A, rec in records.items():
        hist[A.size][STATUS_CODES[rec.status]] += 1
    path = os.path.join(out_dir, f"weights_{mode}_k{k}.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["size"] + codes)
        for size in sorted(hist):
            row = hist[size]
            if any(row.values()):
                writer.writerow([size] + [row[c] for c in codes])


def _write_extremal(out_dir: str, mode: str, k: int, records) -> None:
    minimal, maximal, dep = minimal_maximal(records)
    path = os.path.join(out_dir, f"extremal_{mode}_k{k}.csv")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "predicate", "marks", "dep_exclusive", "dep_total"])
        for kind, preds in (("maximal", maximal), ("minimal", minimal)):
            for A in preds:
                rec = records[A]
                if rec.families:
                    marks = ",".join(sorted(w.family for w in rec.families))
                elif rec.certificate is not None:
                    marks = rec.certificate.theorem
                else:
                    marks = ""
                exclusive, total = dep[A]
                writer.writerow(
                    [kind, ",".join(A.strings()), marks, exclusive, total]
                )


def cmd_classify(args) -> int:
    k = args.arity
    mode = args.mode
    out_dir = args.output_dir
    os.makedirs(out_dir, exist_ok=True)
    budgets = _budgets_from_args(args)

    cache_dir = os.environ.get("PROMSAT_CACHE_DIR")
    records = None
    if cache_dir:
        cached = _records_path(cache_dir, mode, k)
        if os.path.exists(cached):
            rows = load_records(cached)
            records = {
                A: ClassificationRecord(
                    A, row["mode"], row["status"], provenance=row["provenance"]
                )
                for A, row in rows.items()
            }
    if records is None:
        records, _ = classify_all(k, mode, budgets, jobs=args.jobs)
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)
            save_records(_records_path(cache_dir, mode, k), records)

    summary = summarize(records)
    save_records(_records_path(out_dir, mode, k), records)
    _write_summary(out_dir, mode, k, summary)
    _write_weights(out_dir, mode, k, records)
    _write_extremal(out_dir, mode, k, records)
    print(json.dumps({"arity": k, "mode": mode, **summary}, sort_keys=True))
    if summary["unknown"]:
        print(f"inconclusive: {summary['unknown']} predicates", file=sys.stderr)
        return 2
    return 0


_FAMILY_TABLES = {
    "maj": maj_table,
    "par": parity_table,
    "at": alt_threshold_table,
    "idmaj": id_neg_maj_table,
    "idpar": id_neg_parity_table,
}


def _family_obstruction(A: Predicate, test: str) -> list[str] | None:
    """A small concrete obstruction matrix for an absent family, if cheap."""
    for ell in (3, 5):
        table = _FAMILY_TABLES[test](ell)
        found = find_obstructions(A, table, limit=1)
        if found:
            return list(found[0].row_strings())
    return None


def _check_family(A: Predicate, test: str) -> dict:
    runner = {
        "maj": test_maj,
        "par": test_par,
        "at": test_at,
        "idmaj": test_id_maj,
        "idpar": test_id_par,
    }[test]
    result = runner(A)
    out: dict = {}
    if test in ("idmaj", "idpar"):
        from .families import FamilyWitness

        if isinstance(result, FamilyWitness):
            out["verdict"] = "present"
            out["certificate"] = {
                "subsets": [sorted(s) for s in result.certificate]
            }
        else:
            out["verdict"] = "absent"
            out["counterexample"] = {"subset": sorted(result)}
        return out
    if result is None:
        out["verdict"] = "absent"
        rows = _family_obstruction(A, test)
        if rows is not None:
            out["counterexample"] = {"obstruction_rows": rows}
        return out
    out["verdict"] = "present"
    if test == "maj":
        out["certificate"] = {"c": list(result)}
    elif test == "par":
        out["certificate"] = {"beta": sorted(result)}
    else:
        c, value = result
        out["certificate"] = {"c": list(c), "value": value}
    return out


def cmd_check(args) -> int:
    A = parse_predicate(args.predicate)
    test = args.test
    budget = args.node_budget
    k = A.arity
    schedule = schedule_for(k)
    t_max = args.t if args.t is not None else None
    out: dict = {"predicate": ",".join(A.strings()), "test": test}
    try:
        if test in _FAMILY_TABLES:
            out.update(_check_family(A, test))
        elif test == "blocksym":
            ell = args.ell if args.ell is not None else 1
            witness = block_symmetric_exists(A, ell, node_budget=budget)
            out["ell"] = ell
            if witness is None:
                out["verdict"] = "absent"
            else:
                out["verdict"] = "present"
                out["certificate"] = {"values": list(witness.values)}
        elif test == "unate":
            out["verdict"] = unate_minion(A, budget)
        elif test == "matching":
            t = matching_bound(A, t_max or schedule["matching"], budget)
            out["verdict"] = "bounded" if t is not None else "unbounded"
            out["bound"] = t
        elif test == "invmatching":
            t = inverted_matching_bound(A, t_max or schedule["inv_matching"], budget)
            out["verdict"] = "bounded" if t is not None else "unbounded"
            out["bound"] = t
        elif test == "and0":
            present = and_in_pol0(A)
            out["verdict"] = "present" if present else "absent"
            if not present:
                out["bound"] = and_bound(A, k)
        elif test == "xnor0":
            present = xnor_in_pol0(A)
            out["verdict"] = "present" if present else "absent"
            if not present:
                out["bound"] = xnor_bound(A, k)
        elif test == "ada":
            t = ada_free(A, t_max or schedule["ada"], budget)
            out["verdict"] = "free" if t is not None else "not-free"
            out["bound"] = t
        elif test == "uncada":
            t = uncada_free(A, t_max or schedule["uncada"], budget)
            out["verdict"] = "free" if t is not None else "not-free"
            out["bound"] = t
        elif test == "undada":
            t = undada_free(A, t_max or schedule["undada"], budget)
            out["verdict"] = "free" if t is not None else "not-free"
            out["bound"] = t
        elif test == "polyquery":
            pins = []
            for item in args.pin or []:
                point, _, value = item.partition("=")
                pins.append((int(point, 0), int(value)))
            q = PolymorphismQuery(
                A,
                args.ell if args.ell is not None else 3,
                pins=tuple(pins),
            )
            witness = exists_polymorphism(q, budget)
            if witness is None:
                out["verdict"] = "absent"
            else:
                out["verdict"] = "present"
                out["certificate"] = {"table_hex": f"0x{witness.bits:x}"}
        else:
            print(f"unknown test {test!r}", file=sys.stderr)
            return 1
    except BudgetExceeded:
        out["verdict"] = "inconclusive"
        print(json.dumps(out, sort_keys=True))
        return 2
    print(json.dumps(out, sort_keys=True))
    return 0


def cmd_random(args) -> int:
    stats = random_experiment(args.k, args.p, args.n, args.seed, args.arity)
    print(json.dumps(stats, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="promsat",
        description="Classify Boolean promise-SAT predicates.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cls = sub.add_parser("classify", help="sweep all canonical predicates")
    p_cls.add_argument("--arity", type=int, required=True)
    p_cls.add_argument("--mode", choices=MODES, default="fipcsp")
    p_cls.add_argument("--output-dir", default=".")
    p_cls.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p_cls.add_argument("--ell-budget", type=int, default=DEFAULT_ELL_BUDGET)
    p_cls.add_argument("--t-max", type=int, default=None,
                       help="override every hardness parameter bound")
    p_cls.add_argument("--jobs", type=int, default=1,
                       help="worker processes for the sweep")
    p_cls.add_argument("--no-block-symmetric", action="store_true",
                       help="skip block-symmetric refutation for unknowns")
    p_cls.set_defaults(func=cmd_classify)

    p_chk = sub.add_parser("check", help="run one test on one predicate")
    p_chk.add_argument("--predicate", required=True,
                       help='comma-separated strings ("001,010") or "k:0xMASK"')
    p_chk.add_argument(
        "--test",
        required=True,
        choices=sorted(
            list(_FAMILY_TABLES)
            + ["blocksym", "unate", "matching", "invmatching", "and0",
               "xnor0", "ada", "uncada", "undada", "polyquery"]
        ),
    )
    p_chk.add_argument("--t", type=int, default=None, help="parameter bound")
    p_chk.add_argument("--ell", type=int, default=None,
                       help="block size (blocksym) or arity (polyquery)")
    p_chk.add_argument("--pin", action="append", default=None,
                       metavar="POINT=VALUE", help="polyquery pin, repeatable")
    p_chk.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    p_chk.set_defaults(func=cmd_check)

    p_rnd = sub.add_parser("random", help="random predicate experiment")
    p_rnd.add_argument("--k", type=int, required=True)
    p_rnd.add_argument("--p", type=float, required=True)
    p_rnd.add_argument("--n", type=int, required=True)
    p_rnd.add_argument("--seed", type=int, default=0)
    p_rnd.add_argument("--arity", type=int, default=6)
    p_rnd.set_defaults(func=cmd_random)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
