"""Fixing-assignment hardness conditions for fiPCSP(A, OR).

Each condition is a statement about the polymorphism minion M of
fiPCSP(A, OR) — or about M^0, the functions obtained by fixing some
polymorphism variables to 0 — and is decided by a bounded-arity engine
query or by a closed-form cover construction.  Four theorem combinators
turn the conditions into NP-hardness certificates via small fixing
assignments:

- MatchADA: M^0 t1-ADA-free and matching number <= t2 gives a fixing
  set of size (t1-1)*t2.
- InvMatchADA: t1-ADA-free and inverted matching number <= t2 gives a
  fixing assignment of size t1-1 + t2^2.
- UnateXnorADA: unate, t1-ADA-free, and xNOR_t2 outside M^0 gives a
  (t1+t2-3)-fixing assignment.
- Split: unate and, at a common t, ADA-free, UnCADA-free and with no
  t-UnDADA gives a (t-1,1)-fixing assignment (size t).

Membership in M^0 with prescribed values is expressed as a polymorphism
query of one higher arity whose leading variable takes value 0 at every
prescribed point.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .engine import (
    DEFAULT_NODE_BUDGET,
    BudgetExceeded,
    FunctionTable,
    PolymorphismQuery,
    exists_polymorphism,
    table_from_predicate_fn,
    verify_polymorphism,
)
from .predicates import Predicate

THEOREMS = ("MatchADA", "InvMatchADA", "UnateXnorADA", "Split")

# Smallest sufficient t values per arity, found by sweeping; one slack
# step is added on top when searching.
PARAMETER_SCHEDULE = {
    3: {"matching": 1, "inv_matching": 2, "ada": 2, "uncada": 2, "undada": 3},
    4: {"matching": 3, "inv_matching": 2, "ada": 3, "uncada": 3, "undada": 4},
    5: {"matching": 3, "inv_matching": 3, "ada": 5, "uncada": 4, "undada": 4},
}
DEFAULT_SLACK = 1


def schedule_for(k: int, slack: int = DEFAULT_SLACK) -> dict[str, int]:
    base = PARAMETER_SCHEDULE.get(max(k, 3), PARAMETER_SCHEDULE[5])
    return {name: t + slack for name, t in base.items()}


@dataclass(frozen=True)
class HardnessCertificate:
    theorem: str
    parameters: tuple[int, ...]
    size_bound: int

    def to_json_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "parameters": list(self.parameters),
            "size_bound": self.size_bound,
        }


def unate_minion(A: Predicate, node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """True iff every polymorphism is unate (monotone per variable).

    Non-unateness collapses to a single arity-5 query with two pairs of
    crossing pinned values.
    """
    q = PolymorphismQuery(
        A,
        5,
        pins=((0b00011, 0), (0b00101, 1), (0b10011, 1), (0b10101, 0)),
    )
    return exists_polymorphism(q, node_budget) is None


def matching_bound(
    A: Predicate, t_max: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> int | None:
    """Smallest t <= t_max bounding the matching number of all polymorphisms.

    Matching number > t is equivalent to a (t+2)-ary polymorphism with
    f(e_i) = 1 for i = 1..t+1.
    """
    for t in range(1, t_max + 1):
        arity = t + 2
        pins = tuple((1 << (arity - i), 1) for i in range(1, t + 2))
        q = PolymorphismQuery(A, arity, pins=pins)
        if exists_polymorphism(q, node_budget) is None:
            return t
    return None


def inverted_matching_bound(
    A: Predicate, t_max: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> int | None:
    """Smallest t <= t_max bounding the inverted matching number.

    Inverted matching number > t is equivalent to a (t+3)-ary
    polymorphism with f(e_{t+3}) = 1 and f(e_i + e_{t+3}) = 0, i <= t+1.
    """
    for t in range(1, t_max + 1):
        arity = t + 3
        pins = [(1, 1)]
        pins += [((1 << (arity - i)) | 1, 0) for i in range(1, t + 2)]
        q = PolymorphismQuery(A, arity, pins=tuple(pins))
        if exists_polymorphism(q, node_budget) is None:
            return t
    return None


def and_in_pol0(A: Predicate) -> bool:
    """Whether AND_{k-1} lies in M^0, via the obstruction cover test.

    An obstruction fixes a first column a; the remaining columns must be
    zero wherever a is one, and their zero positions must jointly cover
    every row where a is zero.
    """
    k = A.arity
    full = (1 << k) - 1
    for a in A.elements():
        if a == full:
            continue
        cover = 0
        for b in A.elements():
            if b & a == 0:
                cover |= full ^ b
        if (full ^ a) & ~cover == 0:
            return False
    return True


def xnor_in_pol0(A: Predicate) -> bool:
    """Whether xNOR_k = x1 AND NOR(x2..xk) lies in M^0, via cover test.

    An obstruction fixes two disjoint first columns c1, c2; remaining
    columns must be all-one on the rows where c1 is one, and their one
    positions must jointly cover the rows where c2 is one.
    """
    for c1 in A.elements():
        for c2 in A.elements():
            if c1 & c2:
                continue
            cover = 0
            for b in A.elements():
                if b & c1 == c1:
                    cover |= b
            if c2 & ~cover == 0:
                return False
    return True


def _xnor_table(t: int) -> FunctionTable:
    top = 1 << (t - 1)
    return table_from_predicate_fn(t, lambda p: p == top)


def _and_table(t: int) -> FunctionTable:
    full = (1 << t) - 1
    return table_from_predicate_fn(t, lambda p: p == full)


def _pol0_determined_query(A: Predicate, inner: FunctionTable) -> bool:
    """Whether some polymorphism f satisfies f(0, x) = inner(x) for all x.

    Foldedness forces the other half, so membership reduces to verifying
    the fully determined table of arity inner.arity + 1.
    """
    t = inner.arity
    size = 1 << t
    bits = inner.bits  # f(0x) half occupies the low 2^t points
    for x in range(size):
        if not inner.value((size - 1) ^ x):
            bits |= 1 << (size + x)  # f(1x) = not inner(not x)
    table = FunctionTable(t + 1, bits)
    return verify_polymorphism(A, table) is None


def and_bound(A: Predicate, t_max: int) -> int | None:
    """Smallest t <= t_max with AND_t outside M^0."""
    for t in range(1, t_max + 1):
        if not _pol0_determined_query(A, _and_table(t)):
            return t
    return None


def xnor_bound(A: Predicate, t_max: int) -> int | None:
    """Smallest t <= t_max with xNOR_t outside M^0 (t >= 2; xNOR_1 is a
    dictator and always present)."""
    for t in range(2, t_max + 1):
        if not _pol0_determined_query(A, _xnor_table(t)):
            return t
    return None


def _ada_query(A: Predicate, c: int, d: int) -> PolymorphismQuery:
    """(c,d)-ADA membership in M^0 as a (c+2d+1)-ary polymorphism query."""
    m = c + 2 * d
    a1 = ((1 << (c + d)) - 1) << d  # 1^d 1^c 0^d
    a2 = (1 << (c + d)) - 1  # 0^d 1^c 1^d
    xmask = ((1 << d) - 1) << (c + d)
    ymask = ((1 << c) - 1) << d
    zmask = (1 << d) - 1
    pins = []
    for p in range(1 << m):
        if p == a1 or p == a2:
            pins.append((p, 1))
            continue
        blocks = sum(
            1
            for mask in (xmask, ymask, zmask)
            if p & mask == mask
        )
        if p.bit_count() < c + d or blocks < 2:
            pins.append((p, 0))
    return PolymorphismQuery(A, m + 1, pins=tuple(pins))


def ada_free(
    A: Predicate, t_max: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> int | None:
    """Smallest t <= t_max such that M^0 is t-ADA-free (no (t-d,d)-ADA
    for any 1 <= d <= t-1)."""
    absent: dict[tuple[int, int], bool] = {}

    def query_absent(c: int, d: int) -> bool:
        key = (c, d)
        if key not in absent:
            absent[key] = exists_polymorphism(_ada_query(A, c, d), node_budget) is None
        return absent[key]

    for t in range(2, t_max + 1):
        if all(query_absent(t - d, d) for d in range(1, t)):
            return t
    return None


def _uncada_query(A: Predicate, c: int, d: int) -> PolymorphismQuery:
    """(c,d)-UnCADA existence as a (c+2d+4)-ary signed polymorphism query."""
    m = c + 2 * d + 4
    signs = ("pos",) * (c + 2 * d + 1) + ("neg",) * 3
    a1 = ((((1 << (c + d)) - 1) << d) << 4) | 0b0011  # 1^d 1^c 0^d 0, 011
    a2 = (((1 << (c + d)) - 1) << 4) | 0b0101  # 0^d 1^c 1^d 0, 101
    pins = [(a1, 1), (a2, 1)]
    for x in range(1 << (c + 2 * d)):
        if x.bit_count() > c + d - 1:
            continue
        for y in (0b01, 0b10, 0b11):
            pins.append(((x << 4) | (y << 1) | 1, 0))
    return PolymorphismQuery(A, m, signs=signs, pins=tuple(pins))


def uncada_free(
    A: Predicate, t_max: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> int | None:
    """Smallest t <= t_max such that no (t-d,d)-UnCADA exists, 1 <= d <= t-1."""
    absent: dict[tuple[int, int], bool] = {}

    def query_absent(c: int, d: int) -> bool:
        key = (c, d)
        if key not in absent:
            absent[key] = (
                exists_polymorphism(_uncada_query(A, c, d), node_budget) is None
            )
        return absent[key]

    for t in range(2, t_max + 1):
        if all(query_absent(t - d, d) for d in range(1, t)):
            return t
    return None


def _undada_query(A: Predicate, t: int) -> PolymorphismQuery:
    """t-UnDADA existence as a (t+4)-ary signed polymorphism query."""
    signs = ("pos",) * t + ("neg",) * 4
    a1 = ((((1 << (t - 1)) - 1) << 1) << 4) | 0b0011  # 1^{t-1} 0, 0011
    a2 = (((1 << (t - 1)) - 1) << 4) | 0b1001  # 0 1^{t-1}, 1001
    pins = [(a1, 1), (a2, 1)]
    full_x = (1 << t) - 1
    for x in range(1 << t):
        if x == full_x:
            continue
        for y in (0b011, 0b101, 0b110, 0b111):
            pins.append(((x << 4) | (y << 1) | 1, 0))
    return PolymorphismQuery(A, t + 4, signs=signs, pins=tuple(pins))


def undada_free(
    A: Predicate, t_max: int, node_budget: int = DEFAULT_NODE_BUDGET
) -> int | None:
    """Smallest t in [3, t_max] with no t-UnDADA polymorphism."""
    for t in range(3, t_max + 1):
        if exists_polymorphism(_undada_query(A, t), node_budget) is None:
            return t
    return None


INCONCLUSIVE = "inconclusive"


class _Checks:
    """Lazily evaluated, cached constituent checks for one predicate."""

    def __init__(self, A: Predicate, schedule: dict[str, int], node_budget: int):
        self.A = A
        self.schedule = schedule
        self.node_budget = node_budget
        self._cache: dict[str, object] = {}

    def get(self, name: str):
        if name not in self._cache:
            fns = {
                "unate": lambda: unate_minion(self.A, self.node_budget),
                "ada": lambda: ada_free(self.A, self.schedule["ada"], self.node_budget),
                "matching": lambda: matching_bound(
                    self.A, self.schedule["matching"], self.node_budget
                ),
                "inv_matching": lambda: inverted_matching_bound(
                    self.A, self.schedule["inv_matching"], self.node_budget
                ),
                "xnor": lambda: xnor_bound(self.A, self.A.arity),
                "uncada": lambda: uncada_free(
                    self.A, self.schedule["uncada"], self.node_budget
                ),
                "undada": lambda: undada_free(
                    self.A, self.schedule["undada"], self.node_budget
                ),
            }
            try:
                self._cache[name] = fns[name]()
            except BudgetExceeded:
                self._cache[name] = INCONCLUSIVE
        return self._cache[name]


def _try_theorem(theorem: str, checks: _Checks) -> HardnessCertificate | None:
    def ok(value) -> bool:
        return value is not None and value is not INCONCLUSIVE and value is not False

    if theorem == "MatchADA":
        t1, t2 = checks.get("ada"), checks.get("matching")
        if ok(t1) and ok(t2):
            return HardnessCertificate("MatchADA", (t1, t2), (t1 - 1) * t2)
    elif theorem == "InvMatchADA":
        t1, t2 = checks.get("ada"), checks.get("inv_matching")
        if ok(t1) and ok(t2):
            return HardnessCertificate("InvMatchADA", (t1, t2), t1 - 1 + t2 * t2)
    elif theorem == "UnateXnorADA":
        if checks.get("unate") is True:
            t1, t2 = checks.get("ada"), checks.get("xnor")
            if ok(t1) and ok(t2):
                return HardnessCertificate("UnateXnorADA", (t1, t2), t1 + t2 - 3)
    elif theorem == "Split":
        if checks.get("unate") is True:
            parts = (checks.get("ada"), checks.get("uncada"), checks.get("undada"))
            if all(ok(p) for p in parts):
                # Each freeness condition is monotone in t, so the three
                # smallest values combine at their maximum.
                t = max(parts)
                return HardnessCertificate("Split", (t,), t)
    return None


def small_fixing_assignments(
    A: Predicate,
    schedule: dict[str, int] | None = None,
    node_budget: int = DEFAULT_NODE_BUDGET,
    audit: bool = False,
):
    """First hardness certificate whose constituent checks all succeed.

    With audit=True, returns a dict mapping every theorem name to its
    certificate or None, evaluating all four unconditionally.
    """
    if schedule is None:
        schedule = schedule_for(A.arity)
    checks = _Checks(A, schedule, node_budget)
    if audit:
        return {name: _try_theorem(name, checks) for name in THEOREMS}
    for name in THEOREMS:
        cert = _try_theorem(name, checks)
        if cert is not None:
            return cert
    return None


__all__ = [
    "HardnessCertificate",
    "THEOREMS",
    "PARAMETER_SCHEDULE",
    "schedule_for",
    "unate_minion",
    "matching_bound",
    "inverted_matching_bound",
    "and_in_pol0",
    "xnor_in_pol0",
    "and_bound",
    "xnor_bound",
    "ada_free",
    "uncada_free",
    "undada_free",
    "small_fixing_assignments",
]
