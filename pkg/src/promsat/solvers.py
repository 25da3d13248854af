"""Exact feasibility kernels: rational LP and GF(2) affine systems.

Everything here is exact.  The LP side is a phase-1 simplex over
fractions.Fraction with Bland's anti-cycling rule; the systems are tiny
(a handful of variables, at most a few dozen rows), so no effort is
spent on performance.  Returned witnesses are re-substituted into every
row before being surfaced.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

GE = ">="
EQ = "=="


@dataclass
class RationalLinearSystem:
    """Rows of (coefficients, relation, rhs) over n variables.

    Variables listed in `nonneg` are constrained >= 0; the rest are free.
    """

    n: int
    rows: list[tuple[list[Fraction], str, Fraction]] = field(default_factory=list)
    nonneg: set[int] = field(default_factory=set)

    def add(self, coeffs, relation: str, rhs) -> None:
        if len(coeffs) != self.n:
            raise ValueError("coefficient length mismatch")
        if relation not in (GE, EQ):
            raise ValueError(f"unknown relation {relation!r}")
        self.rows.append(([Fraction(c) for c in coeffs], relation, Fraction(rhs)))

    def satisfied_by(self, point: list[Fraction]) -> bool:
        if len(point) != self.n:
            return False
        for j in self.nonneg:
            if point[j] < 0:
                return False
        for coeffs, relation, rhs in self.rows:
            lhs = sum(c * x for c, x in zip(coeffs, point))
            if relation == EQ and lhs != rhs:
                return False
            if relation == GE and lhs < rhs:
                return False
        return True


@dataclass
class Gf2AffineSystem:
    """Rows are k-bit integers; rhs holds one bit per row."""

    width: int
    rows: list[int] = field(default_factory=list)
    rhs: list[int] = field(default_factory=list)

    def add(self, row: int, b: int) -> None:
        self.rows.append(row)
        self.rhs.append(b & 1)


def lp_feasible(system: RationalLinearSystem) -> list[Fraction] | None:
    """An exact rational feasible point, or None if the system is infeasible."""
    point = _phase_one_simplex(system)
    if point is None:
        return None
    if not system.satisfied_by(point):  # pragma: no cover - internal fault
        raise AssertionError("simplex returned a point failing re-substitution")
    return point


def _phase_one_simplex(system: RationalLinearSystem) -> list[Fraction] | None:
    # Column layout: for each original variable one column (nonneg) or a
    # split pair u - v (free); then one surplus column per >= row; then one
    # artificial column per row.  Minimize the sum of artificials.
    cols: list[tuple[int, int]] = []  # (variable index, sign)
    for j in range(system.n):
        cols.append((j, 1))
        if j not in system.nonneg:
            cols.append((j, -1))
    n_struct = len(cols)
    n_surplus = sum(1 for _, rel, _ in system.rows if rel == GE)
    m = len(system.rows)
    width = n_struct + n_surplus + m

    tableau: list[list[Fraction]] = []
    surplus_seen = 0
    for i, (coeffs, relation, rhs) in enumerate(system.rows):
        row = [Fraction(0)] * (width + 1)
        for c_idx, (j, sign) in enumerate(cols):
            row[c_idx] = sign * coeffs[j]
        if relation == GE:
            row[n_struct + surplus_seen] = Fraction(-1)
            surplus_seen += 1
        row[width] = rhs
        if row[width] < 0:
            row = [-v for v in row]
        row[n_struct + n_surplus + i] = Fraction(1)
        tableau.append(row)

    basis = [n_struct + n_surplus + i for i in range(m)]
    # Objective row: minimize sum of artificials; reduced costs start as
    # -(sum of constraint rows) on non-artificial columns.
    obj = [Fraction(0)] * (width + 1)
    for row in tableau:
        for c in range(width + 1):
            obj[c] -= row[c]
    for i in range(m):
        obj[n_struct + n_surplus + i] = Fraction(0)

    while True:
        enter = next(
            (c for c in range(width) if obj[c] < 0),  # Bland: lowest index
            None,
        )
        if enter is None:
            break
        ratios = [
            (tableau[r][width] / tableau[r][enter], basis[r], r)
            for r in range(m)
            if tableau[r][enter] > 0
        ]
        if not ratios:  # phase-1 objective is bounded; defensive only
            return None
        _, _, leave = min(ratios)
        _pivot(tableau, obj, basis, leave, enter, width)

    if -obj[width] != 0:
        return None
    values = [Fraction(0)] * system.n
    for r, b in enumerate(basis):
        if b < n_struct:
            j, sign = cols[b]
            values[j] += sign * tableau[r][width]
    return values


def _pivot(tableau, obj, basis, leave: int, enter: int, width: int) -> None:
    pivot = tableau[leave][enter]
    tableau[leave] = [v / pivot for v in tableau[leave]]
    for r in range(len(tableau)):
        if r != leave and tableau[r][enter] != 0:
            factor = tableau[r][enter]
            tableau[r] = [v - factor * p for v, p in zip(tableau[r], tableau[leave])]
    if obj[enter] != 0:
        factor = obj[enter]
        for c in range(width + 1):
            obj[c] -= factor * tableau[leave][c]
    basis[leave] = enter


def integer_scaled(point: list[Fraction]) -> list[int]:
    """Clear denominators and divide by the gcd, giving an integer witness."""
    denom = 1
    for x in point:
        denom = denom * x.denominator // gcd(denom, x.denominator)
    ints = [int(x * denom) for x in point]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g > 1:
        ints = [v // g for v in ints]
    return ints


def gf2_affine_solve(system: Gf2AffineSystem) -> int | None:
    """A bitvector beta with (row . beta) = rhs over GF(2) for every row."""
    k = system.width
    # Augmented rows: low k bits are coefficients, bit k is the rhs.
    work = [row | (b << k) for row, b in zip(system.rows, system.rhs)]
    pivots: list[tuple[int, int]] = []  # (column, row value)
    for col in range(k):
        pivot_row = next((idx for idx, row in enumerate(work) if (row >> col) & 1), None)
        if pivot_row is None:
            continue
        pivot = work.pop(pivot_row)
        work = [r ^ pivot if (r >> col) & 1 else r for r in work]
        pivots = [(c, p ^ pivot if (p >> col) & 1 else p) for c, p in pivots]
        pivots.append((col, pivot))
    for row in work:
        if row:  # 0 = 1 row left over
            return None
    beta = 0
    for col, row in pivots:
        if (row >> k) & 1:
            beta |= 1 << col
    # Verify.
    for row, b in zip(system.rows, system.rhs):
        if (row & beta).bit_count() & 1 != b:  # pragma: no cover - internal fault
            raise AssertionError("GF(2) solution failed re-substitution")
    return beta


def gf2_kernel_basis(rows: list[int], width: int) -> list[int]:
    """A basis of { beta : (row . beta) = 0 for all rows } over GF(2)."""
    work = list(rows)
    pivot_cols: list[int] = []
    reduced: list[int] = []
    for col in range(width):
        pivot = None
        for idx, row in enumerate(work):
            if (row >> col) & 1:
                pivot = idx
                break
        if pivot is None:
            continue
        p = work.pop(pivot)
        work = [r ^ p if (r >> col) & 1 else r for r in work]
        reduced = [r ^ p if (r >> col) & 1 else r for r in reduced]
        reduced.append(p)
        pivot_cols.append(col)
    basis = []
    for col in range(width):
        if col in pivot_cols:
            continue
        beta = 1 << col
        for pc, row in zip(pivot_cols, reduced):
            if (row >> col) & 1:
                beta |= 1 << pc
        basis.append(beta)
    return basis


__all__ = [
    "GE",
    "EQ",
    "RationalLinearSystem",
    "Gf2AffineSystem",
    "lp_feasible",
    "gf2_affine_solve",
    "gf2_kernel_basis",
    "integer_scaled",
]
