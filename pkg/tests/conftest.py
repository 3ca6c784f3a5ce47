import pytest

from tgmat import parse_facts, parse_program

P1_TEXT = """\
r(X, Y) -> R(X, Y)
R(X, Y) -> T(Y, X, Y)
T(Y, X, Y) -> R(X, Y)
r(X, Y) -> T(Y, X, Z)
"""

P1_DATALOG_TEXT = """\
r(X, Y) -> R(X, Y)
R(X, Y) -> T(Y, X, Y)
T(Y, X, Y) -> R(X, Y)
"""

P3_TEXT = """\
a(X) -> A(X)
r(X, Y) -> R(X, Y)
R(X, Y), A(Y) -> A(X)
R(X, Y), R(Y, Z) -> A(X)
"""

REWRITE_PAIR_TEXT = """\
r(X1, Y1, Z1) -> T(X1, X1, Y1)
T(X2, Y2, Z2) -> R(Y2, Z2)
"""


@pytest.fixture
def p1():
    return parse_program(P1_TEXT)


@pytest.fixture
def p1_datalog():
    return parse_program(P1_DATALOG_TEXT)


@pytest.fixture
def p3():
    return parse_program(P3_TEXT)


@pytest.fixture
def rewrite_pair():
    return parse_program(REWRITE_PAIR_TEXT)


@pytest.fixture
def b1(p1):
    return parse_facts("r\tc1\tc2", p1)
