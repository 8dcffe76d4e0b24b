from functools import lru_cache

import pytest

from cameron_liebler.gf import GF
from cameron_liebler.geometry import PG3
from cameron_liebler.pencil import Pencil
from cameron_liebler.group_action import GroupAction
from cameron_liebler import lineclass as lc


@lru_cache(maxsize=None)
def geometry(q: int) -> PG3:
    return PG3(GF.of_order(q))


@lru_cache(maxsize=None)
def pencil(q: int) -> Pencil:
    return Pencil(geometry(q))


@lru_cache(maxsize=None)
def group(q: int) -> GroupAction:
    return GroupAction(geometry(q))


@lru_cache(maxsize=None)
def derived(q: int) -> lc.LineClass:
    return lc.build_derived(pencil(q))


@lru_cache(maxsize=None)
def bruen_drudge(q: int) -> lc.LineClass:
    return lc.build_bruen_drudge(pencil(q))


@pytest.fixture(scope="session")
def g5():
    return geometry(5)


@pytest.fixture(scope="session")
def p5():
    return pencil(5)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
