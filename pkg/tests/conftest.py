"""Shared fixtures: the example programs used across the test modules."""

import pytest

from prefasp.models import Interpretation
from prefasp.parser import parse_prioritized, parse_program

BIRD_PENGUIN = """
r1: peng.
r2: bird.
r3: -flies :- not flies, peng.
r4: flies :- not -flies, bird.
r1 < r2.
r2 < r3.
r3 < r4.
"""

DISJUNCTION = """
a v b.
b v c.
d v -d :- a, c.
"""

WEAK_CONSTRAINTS = DISJUNCTION + """
:~ a, c. [2:1]
:~ -d. [1:1]
:~ b. [3:1]
"""

NO_PREFERRED = """
r1: c :- not b.
r2: b :- not a.
r1 < r2.
"""

VIOLATION_RULES = """
r1: a :- not c.
r2: c :- not b.
r3: -d :- not b.
r4: b :- not -b, a.
"""

VIOLATION_DEGREE = VIOLATION_RULES + """
r1 < r2.
r2 < r3.
r3 < r4.
"""

PARTIAL_ORDER = VIOLATION_RULES + """
r1 < r3.
r2 < r4.
r4 < r3.
"""


@pytest.fixture
def bird_penguin():
    return parse_prioritized(BIRD_PENGUIN)


@pytest.fixture
def disjunction():
    return parse_program(DISJUNCTION)


@pytest.fixture
def weak_program():
    return parse_program(WEAK_CONSTRAINTS)


@pytest.fixture
def no_preferred():
    return parse_prioritized(NO_PREFERRED)


@pytest.fixture
def violation_degree():
    return parse_prioritized(VIOLATION_DEGREE)


@pytest.fixture
def partial_order():
    return parse_prioritized(PARTIAL_ORDER)


@pytest.fixture
def a1():
    return Interpretation.of(["peng", "bird", "-flies"])


@pytest.fixture
def a2():
    return Interpretation.of(["peng", "bird", "flies"])


@pytest.fixture
def source_file(tmp_path):
    """Write program text to a file and return its path."""

    def write(text, name="program.lp"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path

    return write


@pytest.fixture
def texts():
    return {
        "bird-penguin": BIRD_PENGUIN,
        "disjunction": DISJUNCTION,
        "weak-constraints": WEAK_CONSTRAINTS,
        "no-preferred": NO_PREFERRED,
        "violation-degree": VIOLATION_DEGREE,
        "partial-order": PARTIAL_ORDER,
    }
