import pytest

from promsat.classify import (
    Budgets,
    PromiseSatOracle,
    classify_fpcsp,
    classify_usefulness,
    sweep_promise_sat,
)
from promsat.predicates import SymmetryGroup, enumerate_canonical


@pytest.fixture(scope="session")
def sweep3():
    return sweep_promise_sat(3, Budgets())


@pytest.fixture(scope="session")
def sweep4():
    return sweep_promise_sat(4, Budgets())


def _derived(mode, k, base):
    oracle = PromiseSatOracle()
    oracle.preload(base)
    group = (
        SymmetryGroup.PERM_COMPLEMENT if mode == "fpcsp" else SymmetryGroup.PERM_SHIFT
    )
    classify = classify_fpcsp if mode == "fpcsp" else classify_usefulness
    return {
        A: classify(A, oracle=oracle) for A in enumerate_canonical(k, group)
    }


@pytest.fixture(scope="session")
def fpcsp3(sweep3):
    return _derived("fpcsp", 3, sweep3)


@pytest.fixture(scope="session")
def fpcsp4(sweep4):
    return _derived("fpcsp", 4, sweep4)


@pytest.fixture(scope="session")
def useful3(sweep3):
    return _derived("usefulness", 3, sweep3)


@pytest.fixture(scope="session")
def useful4(sweep4):
    return _derived("usefulness", 4, sweep4)
