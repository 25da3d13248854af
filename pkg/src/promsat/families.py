"""Block-symmetric polymorphism family tests for fiPCSP(A, OR).

Tractability via the BLP+AIP algorithm is witnessed by an infinite
family of block-symmetric polymorphisms.  Five families suffice:
majority (Maj), odd parity (Par), alternating threshold (AT),
idempotized negated majority (IdMaj) and idempotized negated parity
(IdPar).  Each membership test is exact — a rational LP or a GF(2)
linear solve — and produces a small certificate that re-verifies by
direct arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .engine import block_symmetric_exists, BudgetExceeded, DEFAULT_NODE_BUDGET
from .predicates import Predicate, forced_one_bits, project_zero, xor_shift
from .solvers import (
    EQ,
    GE,
    Gf2AffineSystem,
    RationalLinearSystem,
    gf2_affine_solve,
    integer_scaled,
    lp_feasible,
)

CORE_FAMILIES = ("Maj", "Par", "AT", "IdMaj", "IdPar")
INVERTED_FAMILIES = ("InvMaj", "InvPar")


@dataclass(frozen=True)
class FamilyWitness:
    family: str
    certificate: tuple

    def verify(self, A: Predicate) -> bool:
        """Re-check the certificate against every accepted string."""
        k = A.arity
        rows = [_coords(a, k) for a in A.elements()]
        if self.family in ("Maj", "InvMaj"):
            c = self.certificate
            base = A if self.family == "Maj" else xor_shift(A, (1 << k) - 1)
            rows = [_coords(a, k) for a in base.elements()]
            total = sum(c)
            return (
                len(c) == k
                and all(x >= 0 for x in c)
                and total > 0
                and all(2 * sum(ci * ai for ci, ai in zip(c, row)) >= total for row in rows)
            )
        if self.family in ("Par", "InvPar"):
            (beta,) = self.certificate
            base = A if self.family == "Par" else xor_shift(A, (1 << k) - 1)
            rows = [_coords(a, k) for a in base.elements()]
            return bool(beta) and all(sum(row[i - 1] for i in beta) % 2 == 1 for row in rows)
        if self.family == "AT":
            c, v = self.certificate
            return (
                all(x >= 0 for x in c)
                and any(x > 0 for x in c)
                and all(sum(ci * ai for ci, ai in zip(c, row)) == v for row in rows)
            )
        if self.family in ("IdMaj", "IdPar"):
            inner = test_id_maj if self.family == "IdMaj" else test_id_par
            result = inner(A)
            return isinstance(result, FamilyWitness) and result.certificate == self.certificate
        return False


def _coords(a: int, k: int) -> tuple[int, ...]:
    return tuple((a >> (k - 1 - i)) & 1 for i in range(k))


def test_maj(A: Predicate) -> tuple[int, ...] | None:
    """Nonnegative integer c with c.a >= (sum c)/2 > 0 for all a in A."""
    k = A.arity
    if A.accepts(0):
        return None
    system = RationalLinearSystem(k, nonneg=set(range(k)))
    system.add([Fraction(1)] * k, EQ, Fraction(1))
    for a in A.elements():
        system.add([Fraction(b) for b in _coords(a, k)], GE, Fraction(1, 2))
    point = lp_feasible(system)
    if point is None:
        return None
    return tuple(integer_scaled(point))


def test_par(A: Predicate) -> frozenset[int] | None:
    """Nonempty subset beta of positions with odd overlap with every a in A."""
    k = A.arity
    if A.accepts(0):
        return None
    system = Gf2AffineSystem(k)
    for a in A.elements():
        system.add(a, 1)
    beta = gf2_affine_solve(system)
    if beta is None:
        return None
    return frozenset(i for i in range(1, k + 1) if (beta >> (k - i)) & 1)


def test_at(A: Predicate) -> tuple[tuple[int, ...], int] | None:
    """Nonnegative integer c with c.a equal to a common positive value.

    A zero common value never yields alternating-threshold polymorphisms
    (it only says some coordinates are always 0), so by scale invariance
    the test is feasibility of c >= 0 with c.a = 1 for every a in A.
    """
    k = A.arity
    elems = A.elements()
    system = RationalLinearSystem(k, nonneg=set(range(k)))
    for a in elems:
        system.add([Fraction(b) for b in _coords(a, k)], EQ, Fraction(1))
    point = lp_feasible(system)
    if point is None:
        return None
    c = tuple(integer_scaled(point))
    value = sum(ci * bi for ci, bi in zip(c, _coords(elems[0], k)))
    return c, value


def _admissible_zero_projections(A: Predicate):
    """(S, projected predicate) for subsets S with a usable zero-projection.

    A subset is usable when some accepted string is zero outside S and the
    projection has no coordinate forced to 1.
    """
    k = A.arity
    for size in range(1, k + 1):
        for S in combinations(range(1, k + 1), size):
            proj = project_zero(A, set(S))
            if proj is None:
                continue
            if forced_one_bits(proj):
                continue
            yield S, proj


def test_id_maj(A: Predicate) -> FamilyWitness | tuple[int, ...]:
    """Witness if every usable zero-projection passes the inverted Maj test.

    Returns the failing subset S otherwise.
    """
    passed = []
    for S, proj in _admissible_zero_projections(A):
        shifted = xor_shift(proj, (1 << proj.arity) - 1)
        if test_maj(shifted) is None:
            return S
        passed.append(S)
    return FamilyWitness("IdMaj", tuple(passed))


def test_id_par(A: Predicate) -> FamilyWitness | tuple[int, ...]:
    """As test_id_maj, with the inverted parity test per projection."""
    passed = []
    for S, proj in _admissible_zero_projections(A):
        shifted = xor_shift(proj, (1 << proj.arity) - 1)
        if test_par(shifted) is None:
            return S
        passed.append(S)
    return FamilyWitness("IdPar", tuple(passed))


def five_family_screen(
    A: Predicate, include_inverted: bool = False
) -> set[FamilyWitness]:
    """The exact subset of the five families admitted by A.

    With include_inverted, InvMaj/InvPar witnesses (the plain tests on the
    complement shift of A) are added; those two do not by themselves imply
    tractability of fiPCSP(A, OR).
    """
    out: set[FamilyWitness] = set()
    c = test_maj(A)
    if c is not None:
        out.add(FamilyWitness("Maj", c))
    beta = test_par(A)
    if beta is not None:
        out.add(FamilyWitness("Par", (beta,)))
    at = test_at(A)
    if at is not None:
        out.add(FamilyWitness("AT", at))
    idm = test_id_maj(A)
    if isinstance(idm, FamilyWitness):
        out.add(idm)
    idp = test_id_par(A)
    if isinstance(idp, FamilyWitness):
        out.add(idp)
    if include_inverted:
        full = (1 << A.arity) - 1
        shifted = xor_shift(A, full)
        inv_c = test_maj(shifted)
        if inv_c is not None:
            out.add(FamilyWitness("InvMaj", inv_c))
        inv_beta = test_par(shifted)
        if inv_beta is not None:
            out.add(FamilyWitness("InvPar", (inv_beta,)))
    return out


DEFAULT_ELL_BUDGET = 9


@dataclass(frozen=True)
class BlpAipVerdict:
    status: str  # "solvable" | "refuted" | "exhausted"
    families: frozenset[FamilyWitness] = frozenset()
    ell: int | None = None  # refutation level or exhausted budget

    @classmethod
    def solvable(cls, families) -> "BlpAipVerdict":
        return cls("solvable", frozenset(families))

    @classmethod
    def refuted_at(cls, ell: int) -> "BlpAipVerdict":
        return cls("refuted", ell=ell)

    @classmethod
    def exhausted(cls, ell_budget: int) -> "BlpAipVerdict":
        return cls("exhausted", ell=ell_budget)


def blp_aip_status(
    A: Predicate,
    ell_budget: int = DEFAULT_ELL_BUDGET,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> BlpAipVerdict:
    """Solvable via a family witness, refuted at the smallest failing level,
    or exhausted after ell_budget block-symmetric searches."""
    screen = five_family_screen(A)
    if screen:
        return BlpAipVerdict.solvable(screen)
    for ell in range(1, ell_budget + 1):
        if block_symmetric_exists(A, ell, node_budget=node_budget) is None:
            return BlpAipVerdict.refuted_at(ell)
    return BlpAipVerdict.exhausted(ell_budget)


__all__ = [
    "FamilyWitness",
    "BlpAipVerdict",
    "CORE_FAMILIES",
    "INVERTED_FAMILIES",
    "test_maj",
    "test_par",
    "test_at",
    "test_id_maj",
    "test_id_par",
    "five_family_screen",
    "blp_aip_status",
    "DEFAULT_ELL_BUDGET",
]
