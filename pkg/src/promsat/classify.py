"""Verdict orchestration: per-predicate classification, exhaustive sweeps
with monotone propagation, liftings to the non-idempotent and usefulness
settings, extremal predicate extraction, and the random-predicate harness.

Complexity is monotone: enlarging the promise predicate can only make
fiPCSP(A, OR) harder, so NP-hardness propagates to supersets and
tractability to subsets (both up to coordinate permutation).  Sweeps
exploit this by testing hardness only on predicates with no already-hard
subset.
"""

from __future__ import annotations

import csv
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .engine import (
    DEFAULT_NODE_BUDGET,
    BudgetExceeded,
    PolymorphismQuery,
    dictator_table,
    exists_polymorphism,
)
from .families import (
    BlpAipVerdict,
    DEFAULT_ELL_BUDGET,
    FamilyWitness,
    blp_aip_status,
    five_family_screen,
)
from .hardness import (
    THEOREMS,
    HardnessCertificate,
    schedule_for,
    small_fixing_assignments,
)
from .predicates import (
    Predicate,
    SymmetryGroup,
    canonical_form,
    enumerate_canonical,
    orbit,
    xor_shift,
)
from .solvers import (
    EQ,
    GE,
    Gf2AffineSystem,
    RationalLinearSystem,
    gf2_affine_solve,
    gf2_kernel_basis,
    integer_scaled,
    lp_feasible,
)

MODES = ("fipcsp", "fpcsp", "usefulness")
MODE_GROUPS = {
    "fipcsp": SymmetryGroup.PERM,
    "fpcsp": SymmetryGroup.PERM_COMPLEMENT,
    "usefulness": SymmetryGroup.PERM_SHIFT,
}

TRACTABLE = "Tractable"
NP_HARD = "NPHard"
USEFUL = "Useful"
USELESS = "Useless"
UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Budgets:
    node_budget: int = DEFAULT_NODE_BUDGET
    ell_budget: int = DEFAULT_ELL_BUDGET
    schedule: dict | None = None  # per-condition t_max overrides
    run_block_symmetric: bool = True

    def schedule_for(self, k: int) -> dict:
        return self.schedule if self.schedule is not None else schedule_for(k)


@dataclass(frozen=True)
class ClassificationRecord:
    predicate: Predicate
    mode: str
    status: str
    families: frozenset = frozenset()
    certificate: HardnessCertificate | None = None
    useful_shift: int | None = None
    blp_verdict: BlpAipVerdict | None = None
    provenance: str = "direct"

    def certificate_json(self) -> str:
        payload: dict = {}
        if self.families:
            payload["families"] = sorted(
                (w.family, _cert_jsonable(w.certificate)) for w in self.families
            )
        if self.certificate is not None:
            payload["hardness"] = self.certificate.to_json_dict()
        if self.useful_shift is not None:
            payload["shift"] = self.useful_shift
        if self.blp_verdict is not None:
            payload["blp"] = {
                "status": self.blp_verdict.status,
                "ell": self.blp_verdict.ell,
            }
        return json.dumps(payload, sort_keys=True)


def _cert_jsonable(cert):
    if isinstance(cert, (frozenset, set)):
        return sorted(cert)
    if isinstance(cert, tuple):
        return [_cert_jsonable(c) for c in cert]
    return cert


def classify_promise_sat(
    A: Predicate, budgets: Budgets = Budgets()
) -> ClassificationRecord:
    """Tractable via the family screen, NP-hard via a fixing-assignment
    certificate, otherwise Unknown with the block-symmetric verdict."""
    families = five_family_screen(A)
    if families:
        return ClassificationRecord(A, "fipcsp", TRACTABLE, frozenset(families))
    cert = small_fixing_assignments(
        A, budgets.schedule_for(A.arity), budgets.node_budget
    )
    if cert is not None:
        return ClassificationRecord(A, "fipcsp", NP_HARD, certificate=cert)
    verdict = None
    if budgets.run_block_symmetric:
        try:
            verdict = blp_aip_status(A, budgets.ell_budget, budgets.node_budget)
        except BudgetExceeded:
            verdict = None
    return ClassificationRecord(A, "fipcsp", UNKNOWN, blp_verdict=verdict)


def _one_removed_canonicals(A: Predicate) -> list[Predicate]:
    if A.size == 1:
        return []
    out = []
    for x in A.elements():
        child = Predicate(A.arity, A.mask & ~(1 << x))
        out.append(canonical_form(child, SymmetryGroup.PERM))
    return out


def _screen_one(A: Predicate):
    return A, five_family_screen(A)


def _fixing_one(task):
    A, schedule, node_budget = task
    return A, small_fixing_assignments(A, schedule, node_budget)


def sweep_promise_sat(
    k: int, budgets: Budgets = Budgets(), jobs: int = 1
) -> dict[Predicate, ClassificationRecord]:
    """Classify every canonical k-ary predicate (permutation classes).

    Hardness engine queries run only on predicates with no already-hard
    subset; their supersets inherit NP-hardness with propagation
    provenance.  With jobs > 1 the screen and each same-size layer of
    hardness queries run in a process pool; results are identical to the
    serial order because layers only depend on smaller predicates.
    """
    records: dict[Predicate, ClassificationRecord] = {}
    hard: set[Predicate] = set()
    pending: list[Predicate] = []
    canon = list(enumerate_canonical(k, SymmetryGroup.PERM))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            screened = list(pool.map(_screen_one, canon, chunksize=64))
    else:
        screened = [_screen_one(A) for A in canon]
    for A, families in screened:
        if families:
            records[A] = ClassificationRecord(
                A, "fipcsp", TRACTABLE, frozenset(families)
            )
        else:
            pending.append(A)
    schedule = budgets.schedule_for(k)
    pending.sort(key=lambda p: (p.size, p.mask))
    layers: dict[int, list[Predicate]] = {}
    for A in pending:
        layers.setdefault(A.size, []).append(A)
    for size in sorted(layers):
        fresh = []
        for A in layers[size]:
            hard_children = [c for c in _one_removed_canonicals(A) if c in hard]
            if hard_children:
                hard.add(A)
                records[A] = ClassificationRecord(
                    A,
                    "fipcsp",
                    NP_HARD,
                    provenance=f"propagated-from:{hard_children[0]}",
                )
            else:
                fresh.append(A)
        tasks = [(A, schedule, budgets.node_budget) for A in fresh]
        if jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(_fixing_one, tasks))
        else:
            results = [_fixing_one(t) for t in tasks]
        for A, cert in results:
            if cert is not None:
                hard.add(A)
                records[A] = ClassificationRecord(
                    A, "fipcsp", NP_HARD, certificate=cert
                )
                continue
            verdict = None
            if budgets.run_block_symmetric:
                try:
                    verdict = blp_aip_status(
                        A, budgets.ell_budget, budgets.node_budget
                    )
                except BudgetExceeded:
                    verdict = None
            records[A] = ClassificationRecord(
                A, "fipcsp", UNKNOWN, blp_verdict=verdict
            )
    return records


def hardness_audit(
    k: int, budgets: Budgets = Budgets()
) -> dict[Predicate, frozenset]:
    """Per-theorem applicability for every non-screened canonical predicate.

    Each condition is monotone under adding accepted strings, so a
    theorem that applies to a one-string-removed subset also applies to
    the predicate; direct engine work happens only where inheritance
    leaves theorems undecided.
    """
    flags: dict[Predicate, frozenset] = {}
    schedule = budgets.schedule_for(k)
    pending = [
        A
        for A in enumerate_canonical(k, SymmetryGroup.PERM)
        if not five_family_screen(A)
    ]
    for A in sorted(pending, key=lambda p: (p.size, p.mask)):
        inherited: set[str] = set()
        for child in _one_removed_canonicals(A):
            inherited |= flags.get(child, frozenset())
        if len(inherited) < len(THEOREMS):
            audit = small_fixing_assignments(
                A, schedule, budgets.node_budget, audit=True
            )
            inherited |= {name for name, cert in audit.items() if cert is not None}
        flags[A] = frozenset(inherited)
    return flags


def summarize(records) -> dict[str, int]:
    counts = {"total": 0, "tractable": 0, "hard": 0, "unknown": 0, "useful": 0, "useless": 0}
    for key, rec in records.items():
        if not isinstance(rec, ClassificationRecord):
            continue
        counts["total"] += 1
        if rec.status == TRACTABLE:
            counts["tractable"] += 1
        elif rec.status == NP_HARD:
            counts["hard"] += 1
        elif rec.status == USEFUL:
            counts["useful"] += 1
        elif rec.status == USELESS:
            counts["useless"] += 1
        else:
            counts["unknown"] += 1
    return counts


class PromiseSatOracle:
    """Caches fiPCSP verdicts by permutation-canonical mask."""

    def __init__(self, budgets: Budgets = Budgets()):
        self.budgets = budgets
        self._cache: dict[Predicate, ClassificationRecord] = {}

    def record(self, A: Predicate) -> ClassificationRecord:
        key = canonical_form(A, SymmetryGroup.PERM)
        if key not in self._cache:
            self._cache[key] = classify_promise_sat(key, self.budgets)
        return self._cache[key]

    def preload(self, records) -> None:
        for key, rec in records.items():
            if isinstance(rec, ClassificationRecord):
                self._cache[key] = rec

    def status(self, A: Predicate) -> str:
        return self.record(A).status


def classify_fpcsp(
    A: Predicate,
    budgets: Budgets = Budgets(),
    oracle: PromiseSatOracle | None = None,
) -> ClassificationRecord:
    """Without idempotence, A and its complement shift solve together:
    tractable iff either fiPCSP(A) or fiPCSP(A xor 1^k) is tractable."""
    if oracle is None:
        oracle = PromiseSatOracle(budgets)
    k = A.arity
    full = (1 << k) - 1
    base = oracle.record(A)
    if A.accepts(full):
        return ClassificationRecord(
            A, "fpcsp", base.status, base.families, base.certificate,
            blp_verdict=base.blp_verdict,
        )
    other = oracle.record(xor_shift(A, full))
    statuses = {base.status, other.status}
    if TRACTABLE in statuses:
        fams = base.families if base.status == TRACTABLE else other.families
        return ClassificationRecord(A, "fpcsp", TRACTABLE, fams)
    if statuses == {NP_HARD}:
        return ClassificationRecord(A, "fpcsp", NP_HARD, certificate=base.certificate)
    return ClassificationRecord(A, "fpcsp", UNKNOWN, blp_verdict=base.blp_verdict)


def usefulness_screen(A: Predicate):
    """The weighted-majority / constant-parity usefulness test.

    Returns (kind, certificate, shift) — kind "maj" with an integer alpha
    or "par" with a subset beta — or None.  The shift b (not in A) sends
    A to a predicate passing the plain Maj or Par test.
    """
    k = A.arity
    rows = [[Fraction(2 * ((a >> (k - 1 - i)) & 1) - 1) for i in range(k)] for a in A.elements()]
    for pivot in range(k):
        for sign in (1, -1):
            system = RationalLinearSystem(k)
            for row in rows:
                system.add(row, GE, Fraction(0))
            unit = [Fraction(0)] * k
            unit[pivot] = Fraction(sign)
            system.add(unit, GE, Fraction(1))
            point = lp_feasible(system)
            if point is not None:
                alpha = integer_scaled(point)
                b = 0
                for i, a_i in enumerate(alpha):
                    if a_i < 0:
                        b |= 1 << (k - 1 - i)
                return "maj", tuple(alpha), b
    system = Gf2AffineSystem(k)
    for a in A.elements():
        system.add(a, 1)
    beta = gf2_affine_solve(system)
    if beta is not None:
        return "par", beta, 0
    kernel = [v for v in gf2_kernel_basis([a for a in A.elements()], k) if v]
    if kernel:
        beta = kernel[0]
        low = beta & -beta  # flip one coordinate of beta to make parity odd
        return "par", beta, low
    return None


def classify_usefulness(
    A: Predicate,
    budgets: Budgets = Budgets(),
    oracle: PromiseSatOracle | None = None,
    audit: bool = False,
) -> ClassificationRecord:
    """Useful via the screen (some shift admits Maj or Par); useless when
    every shift's Promise-SAT problem is NP-hard; Unknown otherwise."""
    if oracle is None:
        oracle = PromiseSatOracle(budgets)
    k = A.arity
    screen = usefulness_screen(A)
    if screen is not None:
        kind, cert, b = screen
        fam = FamilyWitness(
            "Maj" if kind == "maj" else "Par",
            cert if kind == "maj" else (frozenset(
                i for i in range(1, k + 1) if (cert >> (k - i)) & 1
            ),),
        )
        return ClassificationRecord(
            A, "usefulness", USEFUL, frozenset([fam]), useful_shift=b
        )
    statuses = []
    for b in range(1 << k):
        if A.accepts(b):
            continue
        status = oracle.status(xor_shift(A, b))
        if status == TRACTABLE:  # pragma: no cover - excluded by the screen
            return ClassificationRecord(
                A, "usefulness", USEFUL, useful_shift=b, provenance="direct-shift"
            )
        statuses.append(status)
        if status != NP_HARD and not audit:
            return ClassificationRecord(A, "usefulness", UNKNOWN)
    if all(s == NP_HARD for s in statuses):
        return ClassificationRecord(A, "usefulness", USELESS)
    return ClassificationRecord(A, "usefulness", UNKNOWN)


def classify_all(
    k: int, mode: str = "fipcsp", budgets: Budgets = Budgets(), jobs: int = 1
):
    """Records and summary counts for every canonical predicate of one mode."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    base = sweep_promise_sat(k, budgets, jobs)
    if mode == "fipcsp":
        return base, summarize(base)
    oracle = PromiseSatOracle(budgets)
    oracle.preload(base)
    records: dict[Predicate, ClassificationRecord] = {}
    group = MODE_GROUPS[mode]
    for A in enumerate_canonical(k, group):
        if mode == "fpcsp":
            records[A] = classify_fpcsp(A, budgets, oracle)
        else:
            records[A] = classify_usefulness(A, budgets, oracle)
    return records, summarize(records)


def _orbit_subset(P: Predicate, Q: Predicate, group: SymmetryGroup) -> bool:
    """Whether some image of P under the group is a subset of Q."""
    return any(m & ~Q.mask == 0 for m in orbit(P, group))


def minimal_maximal(records):
    """Inclusion-extremal predicates of a completed sweep.

    For fiPCSP/fPCSP records this is (minimal hard, maximal tractable);
    for usefulness records it is (minimal useless, maximal useful).  dep
    maps each extremal predicate to its (exclusive, total) dependency
    counts: how many predicates of the same status it dominates, and how
    many of those no other extremal predicate dominates.
    """
    recs = {A: r for A, r in records.items() if isinstance(r, ClassificationRecord)}
    mode = next(iter(recs.values())).mode
    group = MODE_GROUPS[mode]
    good_status = USEFUL if mode == "usefulness" else TRACTABLE
    bad_status = USELESS if mode == "usefulness" else NP_HARD
    good = [A for A, r in recs.items() if r.status == good_status]
    bad = [A for A, r in recs.items() if r.status == bad_status]

    maximal = []
    for A in good:
        k = A.arity
        full = (1 << (1 << k)) - 1
        start = 0 if mode == "usefulness" else 1
        grows = []
        for x in range(start, 1 << k):
            if not A.accepts(x) and A.mask | (1 << x) != full:
                grown = canonical_form(Predicate(k, A.mask | (1 << x)), group)
                grows.append(grown)
        if all(recs[g].status != good_status for g in grows):
            maximal.append(A)
    minimal = []
    for A in bad:
        children = [
            canonical_form(Predicate(A.arity, A.mask & ~(1 << x)), group)
            for x in A.elements()
            if A.mask != 1 << x
        ]
        if all(recs[c].status != bad_status for c in children):
            minimal.append(A)

    dep: dict[Predicate, tuple[int, int]] = {}
    for extremals, pool, contains in (
        (maximal, good, lambda P, Q: _orbit_subset(P, Q, group)),
        (minimal, bad, lambda P, Q: _orbit_subset(Q, P, group)),
    ):
        totals = {E: 0 for E in extremals}
        exclusives = {E: 0 for E in extremals}
        for P in pool:
            owners = [E for E in extremals if contains(P, E)]
            for E in owners:
                totals[E] += 1
            if len(owners) == 1:
                exclusives[owners[0]] += 1
        for E in extremals:
            dep[E] = (exclusives[E], totals[E])
    minimal.sort(key=lambda A: (A.size, A.mask))
    maximal.sort(key=lambda A: (A.size, A.mask))
    return minimal, maximal, dep


def non_dictator_exists(
    A: Predicate, arity: int = 6, node_budget: int = DEFAULT_NODE_BUDGET
) -> bool:
    """Whether a folded non-dictator polymorphism of the given arity exists."""
    dictators = tuple(dictator_table(arity, i) for i in range(1, arity + 1))
    q = PolymorphismQuery(
        A, arity, folded=True, idempotent=False, excluded=dictators
    )
    return exists_polymorphism(q, node_budget) is not None


def random_experiment(k: int, p: float, n: int, seed: int, arity: int = 6):
    """Sample n predicates and measure two fractions: admitting a folded
    non-dictator polymorphism of the given arity, and passing the family
    screen.  Strings are kept when their per-string uniform draw is below
    p, so runs with the same seed are nested across densities.
    """
    if not 2 <= k <= 6:
        raise ValueError("k must be between 2 and 6")
    rng = random.Random(seed)
    samples = []
    while len(samples) < n:
        draws = {x: rng.random() for x in range(1, 1 << k)}
        mask = sum(1 << x for x, u in draws.items() if u < p)
        if mask == 0:
            continue
        samples.append(Predicate(k, mask))
    results = []
    for A in samples:
        results.append(
            {
                "predicate": str(A),
                "mask": f"{A.arity}:0x{A.mask:x}",
                "non_dictator": non_dictator_exists(A, arity),
                "screen": bool(five_family_screen(A)) if not A.accepts(0) else False,
            }
        )
    n_eff = len(results)
    return {
        "k": k,
        "p": p,
        "n": n_eff,
        "seed": seed,
        "arity": arity,
        "non_dictator_fraction": (
            sum(r["non_dictator"] for r in results) / n_eff if n_eff else 0.0
        ),
        "screen_fraction": (
            sum(r["screen"] for r in results) / n_eff if n_eff else 0.0
        ),
        "samples": results,
    }


STATUS_CODES = {
    TRACTABLE: "T",
    NP_HARD: "H",
    USEFUL: "F",
    USELESS: "L",
    UNKNOWN: "U",
}
STATUS_FROM_CODE = {v: k for k, v in STATUS_CODES.items()}


def save_records(path, records) -> None:
    """Write a sweep to CSV, sorted by mask, for caching and reloading."""
    rows = []
    for A, rec in records.items():
        if not isinstance(rec, ClassificationRecord):
            continue
        rows.append(
            (
                f"0x{A.mask:x}",
                A.arity,
                rec.mode,
                STATUS_CODES[rec.status],
                rec.certificate_json(),
                rec.provenance,
            )
        )
    rows.sort(key=lambda r: (r[1], int(r[0], 16)))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mask", "arity", "mode", "status", "certificate", "provenance"])
        writer.writerows(rows)


def load_records(path) -> dict[Predicate, dict]:
    """Reload a records CSV into {predicate: row dict}."""
    out = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            A = Predicate(int(row["arity"]), int(row["mask"], 16))
            out[A] = {
                "status": STATUS_FROM_CODE[row["status"]],
                "mode": row["mode"],
                "certificate": row["certificate"],
                "provenance": row["provenance"],
            }
    return out


__all__ = [
    "Budgets",
    "ClassificationRecord",
    "MODES",
    "classify_promise_sat",
    "classify_fpcsp",
    "classify_usefulness",
    "classify_all",
    "sweep_promise_sat",
    "summarize",
    "usefulness_screen",
    "minimal_maximal",
    "non_dictator_exists",
    "random_experiment",
    "PromiseSatOracle",
    "save_records",
    "load_records",
    "STATUS_CODES",
]
