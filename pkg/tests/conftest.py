from functools import lru_cache

import pytest

from nuchi.constructions import build_chi, build_nu, realize_group
from nuchi.corpus import lookup
from nuchi.presentation import parse_presentation
from nuchi.enumeration import enumerate_group

S3 = "gens: a b\nrel: a^3\nrel: b^2\nrel: (a b)^2"
D4 = "gens: a b\nrel: a^4\nrel: b^2\nrel: (a b)^2"
Q8 = "gens: a b\nrel: a^4\nrel: a^2 b^-2\nrel: b^-1 a b a"
M27 = "gens: a b\nrel: a^9\nrel: b^3\nrel: b^-1 a b a^-4"


@lru_cache(maxsize=None)
def group(text: str):
    return enumerate_group(parse_presentation(text))


@lru_cache(maxsize=None)
def realized(name: str):
    return realize_group(lookup(name).input)


@lru_cache(maxsize=None)
def nu_of(name: str):
    return build_nu(lookup(name).input, realized=realized(name))


@lru_cache(maxsize=None)
def chi_of(name: str):
    return build_chi(lookup(name).input, realized=realized(name))


@pytest.fixture
def G_of():
    return lambda name: realized(name)[0]


# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
