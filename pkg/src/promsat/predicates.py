"""Boolean predicates over {0,1}^k and their symmetry groups.

A predicate is a nonempty proper subset A of {0,1}^k.  A string
x = x_1 x_2 ... x_k is identified with the integer b(x) that reads the
string in base 2 with x_1 most significant, and the whole predicate is
stored as a 2^k-bit mask whose bit b(x) is set iff x is accepted.  The
integer value of the mask doubles as the predicate identifier
r(A) = sum over x in A of 2^(b(x)); canonical representatives minimize
this identifier over the orbit of the applicable symmetry group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Iterator


class SymmetryGroup(Enum):
    """The three symmetry groups acting on predicates.

    PERM: coordinate permutations only.
    PERM_COMPLEMENT: permutations plus A -> A xor 1^k when 1^k is not in A.
    PERM_SHIFT: permutations plus A -> A xor b for every b not in A.
    """

    PERM = "perm"
    PERM_COMPLEMENT = "perm_complement"
    PERM_SHIFT = "perm_shift"


@dataclass(frozen=True, order=True)
class Predicate:
    arity: int
    mask: int

    def __post_init__(self) -> None:
        if not 1 <= self.arity <= 8:
            raise ValueError(f"arity {self.arity} out of range [1..8]")
        full = (1 << (1 << self.arity)) - 1
        if self.mask <= 0 or self.mask >= full:
            raise ValueError("predicate must be nonempty and proper")

    @property
    def size(self) -> int:
        return self.mask.bit_count()

    def elements(self) -> list[int]:
        """Accepted strings as integers b(x), ascending."""
        return [x for x in range(1 << self.arity) if (self.mask >> x) & 1]

    def strings(self) -> list[str]:
        return [format(x, f"0{self.arity}b") for x in self.elements()]

    def accepts(self, x: int) -> bool:
        return bool((self.mask >> x) & 1)

    def excludes_zero(self) -> bool:
        """True iff 0^k is rejected (the Promise-SAT universe A subset of OR)."""
        return not self.accepts(0)

    def __str__(self) -> str:
        return ",".join(self.strings())


def predicate_from_elements(arity: int, elements) -> Predicate:
    mask = 0
    for x in elements:
        mask |= 1 << x
    return Predicate(arity, mask)


def parse_predicate(text: str) -> Predicate:
    """Parse "001,011" or "k:0x<hex>" into a Predicate."""
    text = text.strip()
    if ":" in text:
        arity_part, _, mask_part = text.partition(":")
        arity = int(arity_part)
        if not 1 <= arity <= 8:
            raise ValueError(f"arity {arity} out of range [1..8]")
        mask = int(mask_part, 16) if mask_part.lower().startswith("0x") else int(mask_part, 16)
        if mask.bit_length() > (1 << arity):
            raise ValueError("hex mask does not fit 2^k bits")
        return Predicate(arity, mask)
    tokens = [tok.strip() for tok in text.split(",")]
    if not tokens or any(not tok for tok in tokens):
        raise ValueError("empty token in predicate")
    arity = len(tokens[0])
    mask = 0
    for tok in tokens:
        if len(tok) != arity:
            raise ValueError(f"mixed string lengths: {tok!r} vs length {arity}")
        if set(tok) - {"0", "1"}:
            raise ValueError(f"malformed bitstring {tok!r}")
        mask |= 1 << int(tok, 2)
    return Predicate(arity, mask)


def format_predicate(A: Predicate) -> str:
    """The "k:0x<hex>" form used in CSV output."""
    return f"{A.arity}:0x{A.mask:x}"


def xor_shift(A: Predicate, p) -> Predicate:
    """The shifted predicate A xor p = { a xor p : a in A }."""
    if isinstance(p, str):
        if len(p) != A.arity:
            raise ValueError("shift length mismatch")
        p = int(p, 2)
    if not 0 <= p < (1 << A.arity):
        raise ValueError("shift out of range")
    mask = 0
    for x in A.elements():
        mask |= 1 << (x ^ p)
    return Predicate(A.arity, mask)


def complement_shift(A: Predicate) -> Predicate:
    """A xor 1^k."""
    return xor_shift(A, (1 << A.arity) - 1)


def _coord_bit(x: int, i: int, k: int) -> int:
    """Coordinate x_i (1-based, x_1 most significant) of the k-bit string x."""
    return (x >> (k - i)) & 1


def project_zero(A: Predicate, S) -> Predicate | None:
    """A_S^0: strings vanishing outside S, projected onto S (arity |S|).

    S contains 1-based coordinate positions.  Returns None when no
    accepted string is zero outside S (the empty projection).
    """
    k = A.arity
    positions = sorted(set(S))
    if any(not 1 <= i <= k for i in positions):
        raise ValueError("projection positions out of range")
    outside = [i for i in range(1, k + 1) if i not in positions]
    mask = 0
    for x in A.elements():
        if any(_coord_bit(x, i, k) for i in outside):
            continue
        y = 0
        for i in positions:
            y = (y << 1) | _coord_bit(x, i, k)
        mask |= 1 << y
    if mask == 0:
        return None
    if not positions:
        return None  # only 0^k survives, and the empty-arity predicate is degenerate
    return Predicate(len(positions), mask)


def forced_one_bits(A: Predicate) -> set[int]:
    """1-based coordinates equal to 1 in every accepted string."""
    k = A.arity
    common = (1 << k) - 1
    for x in A.elements():
        common &= x
    return {i for i in range(1, k + 1) if _coord_bit(common, i, k)}


@lru_cache(maxsize=None)
def _perm_tables(k: int) -> tuple[tuple[int, ...], ...]:
    """For each permutation pi of [k], the map x -> pi(x) on string codes."""
    tables = []
    for perm in itertools.permutations(range(k)):
        table = []
        for x in range(1 << k):
            y = 0
            for target_pos in range(k):
                src_pos = perm[target_pos]
                bit = (x >> (k - 1 - src_pos)) & 1
                y |= bit << (k - 1 - target_pos)
            table.append(y)
        tables.append(tuple(table))
    return tuple(tables)


@lru_cache(maxsize=None)
def _transposition_tables(k: int) -> tuple[tuple[int, ...], ...]:
    """Position maps for the adjacent coordinate transpositions (i, i+1)."""
    tables = []
    for i in range(k - 1):
        hi = k - 1 - i
        lo = k - 2 - i
        table = []
        for x in range(1 << k):
            b_hi = (x >> hi) & 1
            b_lo = (x >> lo) & 1
            y = x & ~(1 << hi) & ~(1 << lo)
            y |= b_hi << lo
            y |= b_lo << hi
            table.append(y)
        tables.append(tuple(table))
    return tuple(tables)


def _apply_table(mask: int, table: tuple[int, ...]) -> int:
    out = 0
    m = mask
    while m:
        low = m & -m
        out |= 1 << table[low.bit_length() - 1]
        m ^= low
    return out


def _shift_mask(mask: int, b: int, k: int) -> int:
    out = 0
    m = mask
    while m:
        low = m & -m
        out |= 1 << ((low.bit_length() - 1) ^ b)
        m ^= low
    return out


def _orbit_masks(mask: int, k: int, group: SymmetryGroup) -> set[int]:
    full = (1 << k) - 1
    if group is SymmetryGroup.PERM:
        bases = [mask]
    elif group is SymmetryGroup.PERM_COMPLEMENT:
        bases = [mask]
        if not (mask >> full) & 1:
            bases.append(_shift_mask(mask, full, k))
    elif group is SymmetryGroup.PERM_SHIFT:
        # "A equivalent to A xor b for b not in A" is not symmetric on its own
        # (shifting back needs 0^k not in A), so take the closure under the
        # generators: coordinate transpositions and single shifts.
        transpositions = _transposition_tables(k)
        seen = {mask}
        frontier = [mask]
        while frontier:
            m = frontier.pop()
            images = [_apply_table(m, t) for t in transpositions]
            # Forward edge when b not in A; reverse edge (undoing a shift that
            # produced m) is legal whenever 0^k not in m.
            images += [
                _shift_mask(m, b, k)
                for b in range(1, 1 << k)
                if not (m >> b) & 1 or not m & 1
            ]
            for img in images:
                if img not in seen:
                    seen.add(img)
                    frontier.append(img)
        return seen
    else:  # pragma: no cover
        raise ValueError(group)
    orbit = set()
    for base in bases:
        for table in _perm_tables(k):
            orbit.add(_apply_table(base, table))
    return orbit


def orbit(A: Predicate, group: SymmetryGroup) -> set[int]:
    """All masks in the orbit of A under the group."""
    _check_universe(A, group)
    return _orbit_masks(A.mask, A.arity, group)


def _check_universe(A: Predicate, group: SymmetryGroup) -> None:
    if group in (SymmetryGroup.PERM, SymmetryGroup.PERM_COMPLEMENT) and A.accepts(0):
        raise ValueError(f"{group.value} acts on predicates with 0^k rejected")


def canonical_form(A: Predicate, group: SymmetryGroup) -> Predicate:
    """The orbit member with the minimum predicate identifier."""
    return Predicate(A.arity, min(orbit(A, group)))


def enumerate_canonical(k: int, group: SymmetryGroup) -> Iterator[Predicate]:
    """Canonical representatives in increasing identifier order.

    Universe: nonempty proper subsets of {0,1}^k, with 0^k excluded for
    PERM and PERM_COMPLEMENT (the Promise-SAT universe) and allowed for
    PERM_SHIFT (the usefulness universe).
    """
    n_masks = 1 << (1 << k)
    visited = bytearray(n_masks)
    zero_allowed = group is SymmetryGroup.PERM_SHIFT
    for mask in range(1, n_masks - 1):
        if visited[mask]:
            continue
        if not zero_allowed and (mask & 1):
            continue
        for m in _orbit_masks(mask, k, group):
            visited[m] = 1
        yield Predicate(k, mask)


__all__ = [
    "Predicate",
    "SymmetryGroup",
    "parse_predicate",
    "format_predicate",
    "predicate_from_elements",
    "xor_shift",
    "complement_shift",
    "project_zero",
    "forced_one_bits",
    "orbit",
    "canonical_form",
    "enumerate_canonical",
]
