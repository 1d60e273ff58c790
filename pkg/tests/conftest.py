import pytest
from hypothesis import strategies as st

from congsum.field import make_field_ctx

SMALL_PRIMES = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101]

primes = st.sampled_from(SMALL_PRIMES)


@pytest.fixture
def ctx7():
    return make_field_ctx(7)


@pytest.fixture
def ctx5():
    return make_field_ctx(5)


ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[crit]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {crit}: {detail}")
