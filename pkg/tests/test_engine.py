import itertools

import pytest
from hypothesis import given, settings, strategies as st

from promsat.engine import (
    FunctionTable,
    Obstruction,
    PolymorphismQuery,
    block_symmetric_exists,
    brute_force_exists,
    dictator_table,
    exists_polymorphism,
    find_obstructions,
    maj_table,
    obstruction_from_rows,
    parity_table,
    verify_polymorphism,
)
from promsat.predicates import Predicate, parse_predicate


def pred(*strings: str) -> Predicate:
    return parse_predicate(",".join(strings))


NAE3 = pred("001", "010", "011", "100", "101", "110")
ONE_IN_THREE = pred("001", "010", "100")
HORN3 = pred("001", "010", "011", "100")


def test_folded_half_round_trip():
    for bits in range(256):
        t = FunctionTable(3, bits)
        if not t.is_folded():
            continue
        assert FunctionTable.from_folded_half(3, t.folded_half()) == t


@given(st.integers(min_value=0, max_value=255))
def test_from_folded_half_is_always_folded(half):
    t = FunctionTable.from_folded_half(4, half)
    assert t.is_folded()


def test_dictators_are_polymorphisms_of_everything():
    for A in (NAE3, ONE_IN_THREE, HORN3, pred("01", "10", "11")):
        for i in (1, 2, 3):
            assert verify_polymorphism(A, dictator_table(3, i)) is None


def test_majority_is_polymorphism_of_two_sat_but_not_one_in_three():
    two_sat = pred("01", "10", "11")
    assert verify_polymorphism(two_sat, maj_table(3)) is None
    obs = verify_polymorphism(ONE_IN_THREE, maj_table(3))
    assert obs is not None
    assert obs.valid_for(ONE_IN_THREE, maj_table(3))


def test_parity_is_polymorphism_of_one_in_three():
    assert verify_polymorphism(ONE_IN_THREE, parity_table(3)) is None
    assert verify_polymorphism(ONE_IN_THREE, parity_table(5)) is None


def test_obstruction_row_column_round_trip():
    obs = Obstruction(3, (0b001, 0b010, 0b100, 0b001))
    rows = obs.rows()
    assert obstruction_from_rows(ONE_IN_THREE, rows, obs.width) == obs


def test_find_obstructions_results_are_valid():
    table = maj_table(3)
    for A in (ONE_IN_THREE, HORN3):
        for obs in find_obstructions(A, table, limit=16):
            assert obs.valid_for(A, table)


def test_obstruction_invalid_for_wrong_function():
    obs = verify_polymorphism(ONE_IN_THREE, maj_table(3))
    assert not obs.valid_for(ONE_IN_THREE, parity_table(3))


def test_exists_polymorphism_respects_pins_and_query():
    q = PolymorphismQuery(HORN3, arity=3, pins=((0b011, 0),))
    table = exists_polymorphism(q)
    assert table is not None
    assert table.value(0b011) == 0
    assert table.is_folded() and table.is_idempotent()
    assert verify_polymorphism(HORN3, table) is None


def test_exists_polymorphism_detects_contradictory_pins():
    # Folding forces f(000)=0 and f(111)=1; pinning f(111)=0 is impossible.
    q = PolymorphismQuery(HORN3, arity=3, pins=((0b111, 0),))
    assert exists_polymorphism(q) is None


def test_block_symmetric_on_horn_three():
    assert block_symmetric_exists(HORN3, 1) is not None
    assert block_symmetric_exists(HORN3, 2) is None


def test_block_symmetric_on_two_sat_all_depths():
    two_sat = pred("01", "10", "11")
    for ell in (1, 2, 3, 4):
        assert block_symmetric_exists(two_sat, ell) is not None


def _random_queries(A: Predicate, rng_seed: int):
    import random

    rng = random.Random(rng_seed)
    for arity in (2, 3):
        for _ in range(4):
            n_pins = rng.randrange(0, 3)
            pins = []
            seen = set()
            for _ in range(n_pins):
                p = rng.randrange(1, (1 << arity) - 1)
                if p in seen or ((1 << arity) - 1 - p) in seen:
                    continue
                seen.add(p)
                pins.append((p, rng.randrange(2)))
            signs = None
            if rng.random() < 0.5:
                signs = tuple(rng.choice(["pos", "neg", "free"]) for _ in range(arity))
            yield PolymorphismQuery(A, arity=arity, pins=tuple(pins), signs=signs)


def test_search_agrees_with_brute_force_on_random_queries():
    for seed, A in enumerate((ONE_IN_THREE, HORN3, NAE3, pred("01", "10"))):
        for q in _random_queries(A, seed):
            fast = exists_polymorphism(q)
            slow = brute_force_exists(q)
            assert (fast is None) == (slow is None), q
            if fast is not None:
                assert verify_polymorphism(A, fast) is None
