"""End-to-end acceptance gate.

One test per numbered criterion (two where a criterion has an expensive
opt-in half, marked `slow`).  Each test prints a single pass/fail line
through pytest's verbose output.  Two sub-checks compare against
transcribed reference tables that disagree with this engine on a single
predicate; see notes/decisions.md at the repository root for the
exhaustive-search evidence behind the discrepancy.
"""

import csv
import json
import pathlib

import pytest

from promsat.classify import (
    Budgets,
    classify_promise_sat,
    hardness_audit,
    minimal_maximal,
    random_experiment,
    summarize,
)
from promsat.engine import (
    alt_threshold_table,
    block_symmetric_exists,
    brute_force_exists,
    exists_polymorphism,
    id_neg_maj_table,
    id_neg_parity_table,
    maj_table,
    obstruction_from_rows,
    parity_table,
    PolymorphismQuery,
)
from promsat.families import five_family_screen
from promsat.families import test_at as at_check
from promsat.families import test_maj as maj_check
from promsat.hardness import (
    THEOREMS,
    _ada_query,
    ada_free,
    and_in_pol0,
    schedule_for,
    small_fixing_assignments,
    unate_minion,
    uncada_free,
    undada_free,
)
from promsat.predicates import (
    Predicate,
    SymmetryGroup,
    canonical_form,
    complement_shift,
    enumerate_canonical,
    parse_predicate,
)

GOLDEN = pathlib.Path(__file__).parent / "golden"
FAMILY_ORDER = ("Maj", "Par", "AT", "IdMaj", "IdPar")


def _counts(summary, mode):
    if mode == "usefulness":
        return (summary["total"], summary["useful"], summary["useless"], summary["unknown"])
    return (summary["total"], summary["tractable"], summary["hard"], summary["unknown"])


# --- criterion 1: exact fiPCSP counts --------------------------------------


def test_criterion_01_fipcsp_counts(sweep3, sweep4):
    from promsat.classify import sweep_promise_sat

    assert _counts(summarize(sweep_promise_sat(2)), "fipcsp") == (5, 5, 0, 0)
    assert _counts(summarize(sweep3), "fipcsp") == (39, 33, 6, 0)
    assert _counts(summarize(sweep4), "fipcsp") == (1991, 956, 1035, 0)


# --- criterion 2: exact fPCSP counts ----------------------------------------


def test_criterion_02_fpcsp_counts(fpcsp3, fpcsp4):
    assert _counts(summarize(fpcsp3), "fpcsp") == (32, 28, 4, 0)
    assert _counts(summarize(fpcsp4), "fpcsp") == (1549, 848, 701, 0)


# --- criterion 3: exact usefulness counts -----------------------------------


def test_criterion_03_usefulness_counts(useful3, useful4):
    from promsat.classify import classify_all

    _, u2 = classify_all(2, "usefulness")
    assert _counts(u2, "usefulness") == (4, 4, 0, 0)
    assert _counts(summarize(useful3), "usefulness") == (20, 16, 4, 0)
    assert _counts(summarize(useful4), "usefulness") == (400, 230, 170, 0)


# --- criterion 4: family and hardness audits at k=4 -------------------------


def test_criterion_04_family_audit_k4(sweep4):
    per_pred = {
        A: tuple(sorted(w.family for w in rec.families))
        for A, rec in sweep4.items()
        if rec.status == "Tractable"
    }
    stats = {}
    for fam in FAMILY_ORDER:
        total = sum(1 for fams in per_pred.values() if fam in fams)
        exclusive = sum(1 for fams in per_pred.values() if fams == (fam,))
        stats[fam] = (exclusive, total)
    assert stats == {
        "Maj": (720, 915),
        "Par": (31, 219),
        "AT": (0, 172),
        "IdMaj": (1, 163),
        "IdPar": (0, 162),
    }


def test_criterion_04_hardness_audit_k4():
    flags = hardness_audit(4, Budgets(schedule=schedule_for(4, slack=0)))
    stats = {}
    for name in THEOREMS:
        total = sum(1 for marked in flags.values() if name in marked)
        exclusive = sum(1 for marked in flags.values() if marked == {name})
        stats[name] = (exclusive, total)
    target = {
        "MatchADA": (2, 1029),
        "InvMatchADA": (0, 1031),
        "UnateXnorADA": (0, 1030),
        "Split": (1, 1032),
    }
    assert stats == target, (
        "engine audit differs from the transcribed reference on the predicate "
        "{0001,0010,0100,1000,1111}: exhaustive search (see "
        "test_hardness.py and notes/decisions.md) proves the deep inverted "
        "matching theorem also applies there, so MatchADA-exclusive is 1 "
        f"(reference: 2) and InvMatchADA-total is 1032 (reference: 1031); got {stats}"
    )


# --- criterion 5: extremal lists --------------------------------------------

DISPUTED_MASK = parse_predicate("0001,0010,0100,1000,1111").mask


def _extremal_rows(records, mode):
    minimal, maximal, dep = minimal_maximal(records)
    k = next(iter(records)).arity
    schedule = schedule_for(k, slack=0)
    rows = []
    for kind, preds in (("maximal", maximal), ("minimal", minimal)):
        for A in preds:
            rec = records[A]
            if kind == "maximal" and rec.families:
                present = {w.family for w in rec.families}
                marks = "+".join(f for f in FAMILY_ORDER if f in present)
            elif kind == "minimal" and mode != "usefulness":
                audit = small_fixing_assignments(A, schedule, audit=True)
                marks = "+".join(n for n in THEOREMS if audit[n] is not None)
            else:
                marks = ""
            exclusive, total = dep[A]
            rows.append([kind, ",".join(A.strings()), marks, str(exclusive), str(total)])
    return rows


def _golden_rows(name):
    with open(GOLDEN / name, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)  # header
        return [row for row in reader]


def test_criterion_05_extremal_lists(sweep3, sweep4, useful3, useful4):
    for records, mode, name in (
        (sweep3, "fipcsp", "extremal_fipcsp_k3.csv"),
        (sweep4, "fipcsp", "extremal_fipcsp_k4.csv"),
        (useful3, "usefulness", "extremal_usefulness_k3.csv"),
        (useful4, "usefulness", "extremal_usefulness_k4.csv"),
    ):
        got = _extremal_rows(records, mode)
        want = _golden_rows(name)
        # the disputed predicate's marks cell is compared separately below
        for row in got + want:
            if parse_predicate(row[1]).mask == DISPUTED_MASK and row[0] == "minimal":
                row[2] = "(disputed)"
        assert got == want, name


def test_criterion_05_minimal_hard_marks_disputed_cell(sweep4):
    got = _extremal_rows(sweep4, "fipcsp")
    want = _golden_rows("extremal_fipcsp_k4.csv")
    assert got == want, (
        "single-cell mismatch on minimal-hard predicate "
        "{0001,0010,0100,1000,1111}: the transcribed reference marks MatchADA "
        "only, but exhaustive search (test_hardness.py, notes/decisions.md) "
        "shows InvMatchADA applies as well"
    )


# --- criterion 6: single-family predicates and printed obstructions ---------

_TABLE_BUILDERS = {
    "Maj": maj_table,
    "Par": parity_table,
    "AT": alt_threshold_table,
    "IdMaj": id_neg_maj_table,
    "IdPar": id_neg_parity_table,
}


def test_criterion_06_single_family_witnesses_and_obstructions():
    entries = json.loads((GOLDEN / "family_obstructions.json").read_text())
    assert len(entries) == 5
    seen_obstructions = 0
    for entry in entries:
        A = parse_predicate(",".join(entry["predicate"]))
        screened = {w.family for w in five_family_screen(A)}
        assert screened == {entry["family_present"]}, entry["family_present"]
        for item in entry["obstructions"]:
            table = _TABLE_BUILDERS[item["family"]](item["arity"])
            rows = [int(r, 2) for r in item["rows"]]
            obs = obstruction_from_rows(A, rows, item["arity"])
            assert obs.valid_for(A, table), (entry["family_present"], item)
            seen_obstructions += 1
    assert seen_obstructions == 20


# --- criterion 7: block-symmetric maxima ------------------------------------


def _blocksym_maximum(k, records):
    best = 0
    for A, rec in records.items():
        if rec.status == "Tractable":
            continue
        ell = 1
        while block_symmetric_exists(A, ell) is not None:
            ell += 1
        if ell > 1:
            best = max(best, ell - 1)
    return best


def test_criterion_07_block_symmetric_maxima(sweep3, sweep4):
    assert _blocksym_maximum(3, sweep3) == 1
    assert _blocksym_maximum(4, sweep4) == 3


@pytest.mark.slow
def test_criterion_07_block_symmetric_depth_seven_witness_k5():
    A = parse_predicate("00111,01011,01100,10001,10010,10100")
    assert block_symmetric_exists(A, 7) is not None


# --- criterion 8: k=5 spot checks -------------------------------------------


def test_criterion_08_maximal_tractable_screens_k5():
    with open(GOLDEN / "k5_maximal_tractable.csv", newline="") as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    assert len(rows) == 32
    for row in rows:
        A = parse_predicate(row["predicate"])
        screened = {w.family for w in five_family_screen(A)}
        assert screened == set(row["families"].split("+")), row["predicate"]


@pytest.mark.slow
def test_criterion_08_minimal_unknown_k5():
    with open(GOLDEN / "k5_minimal_unknown.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 25
    schedule = schedule_for(5, slack=0)
    for row in rows:
        A = parse_predicate(row["predicate"])
        rec = classify_promise_sat(A, Budgets(run_block_symmetric=False))
        assert rec.status == "Unknown", row["predicate"]
        flags = (
            int(unate_minion(A)),
            int(ada_free(A, schedule["ada"]) is not None),
            int(uncada_free(A, schedule["uncada"]) is not None),
            int(undada_free(A, schedule["undada"]) is not None),
        )
        want = tuple(
            int(row[c]) for c in ("unate", "ada_free", "uncada_free", "undada_free")
        )
        assert flags == want, row["predicate"]


# --- criterion 9: search engine vs. exhaustive oracle ------------------------


def _hardness_style_queries(A):
    k = A.arity
    # matching-number queries
    for t in (1, 2):
        arity = t + 2
        pins = tuple((1 << (arity - i), 1) for i in range(1, t + 2))
        yield PolymorphismQuery(A, arity, pins=pins)
    # inverted-matching query at t=1
    arity = 4
    pins = ((1, 1),) + tuple(((1 << (arity - i)) | 1, 0) for i in (1, 2))
    yield PolymorphismQuery(A, arity, pins=pins)
    # smallest alternating-double-AND membership query
    yield _ada_query(A, 1, 1)
    # signed variants
    yield PolymorphismQuery(A, 3, signs=("pos", "pos", "neg"))
    yield PolymorphismQuery(A, 4, signs=("pos",) * 2 + ("neg",) * 2, pins=((1, 1),))


def test_criterion_09_oracle_equivalence():
    mismatches = []
    for k in (2, 3):
        for A in enumerate_canonical(k, SymmetryGroup.PERM):
            for q in _hardness_style_queries(A):
                fast = exists_polymorphism(q) is not None
                slow = brute_force_exists(q) is not None
                if fast != slow:
                    mismatches.append((str(A), q))
    assert not mismatches


# --- criterion 10: structural invariants -------------------------------------


def _one_removed(A):
    for x in A.elements():
        if A.mask != 1 << x:
            yield canonical_form(Predicate(A.arity, A.mask & ~(1 << x)), SymmetryGroup.PERM)


def test_criterion_10_invariants(sweep3, sweep4):
    for records in (sweep3, sweep4):
        # subsets of tractable predicates are never NP-hard
        for A, rec in records.items():
            if rec.status != "Tractable":
                continue
            for child in _one_removed(A):
                assert records[child].status != "NPHard", (str(A), str(child))
        # every stored family witness re-verifies
        for A, rec in records.items():
            for w in rec.families:
                assert w.verify(A), (str(A), w.family)
    for k in (2, 3, 4):
        for A in enumerate_canonical(k, SymmetryGroup.PERM):
            # no AND-like function in the zero-fixing minion implies the
            # minion is ADA-free at some level
            if not and_in_pol0(A):
                assert ada_free(A, max(k - 1, 2)) is not None, str(A)
            # the alternating-threshold family is subsumed by weighted
            # majority on the predicate or its complement shift
            if at_check(A) is not None:
                assert (
                    maj_check(A) is not None
                    or maj_check(complement_shift(A)) is not None
                ), str(A)


# --- criterion 11: random-predicate harness ----------------------------------


def test_criterion_11_random_harness():
    seed, n = 11, 3
    runs = {p: random_experiment(6, p, n, seed) for p in (0.3, 0.6, 1.0)}
    # determinism per seed
    assert runs[0.3] == random_experiment(6, 0.3, n, seed)
    # coupled sampling is nested and admission is per-sample monotone
    for lo, hi in ((0.3, 0.6), (0.6, 1.0)):
        for a, b in zip(runs[lo]["samples"], runs[hi]["samples"]):
            mask_lo = int(a["mask"].split(":")[1], 16)
            mask_hi = int(b["mask"].split(":")[1], 16)
            assert mask_lo & ~mask_hi == 0
            assert a["non_dictator"] or not b["non_dictator"]
    assert runs[1.0]["non_dictator_fraction"] == 0.0
    assert runs[1.0]["screen_fraction"] == 0.0
