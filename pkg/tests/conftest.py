"""Shared fixtures and brute-force oracles.

The oracles below never touch the library's closure machinery: they work
from the raw base table with plain loops over integers.
"""

import random
from itertools import combinations

import pytest

from fractoconvex.convexity import GroundSpace, make_convexity
from fractoconvex.generators import interval_base


def subsets_upto(ids, k):
    for r in range(k + 1):
        for combo in combinations(ids, r):
            yield sum(1 << x for x in combo)


def ids_of(mask):
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


def brute_family(size, arity, base):
    """Every ``A`` with ``base[B] <= A`` for all ``B <= A`` of size at most ``arity``."""
    out = []
    for A in range(1 << size):
        if all((base.get(B, B) & ~A) == 0 for B in subsets_upto(ids_of(A), arity)):
            out.append(A)
    return out


def brute_hull(family, A):
    """Intersection of all members containing ``A``."""
    h = -1
    for C in family:
        if A & ~C == 0:
            h &= C
    return h


def brute_semiconvex(hulls, A, arity, need):
    """Direct reading of the one-of/all-of conditions over small subsets:
    at least ``need`` of the hull maps keep every small ``B <= A`` inside ``A``."""
    for B in subsets_upto(ids_of(A), arity):
        if sum(1 for h in hulls if h[B] & ~A == 0) < need:
            return False
    return True


@pytest.fixture
def interval10():
    space = GroundSpace(10, 2)
    return make_convexity(space, interval_base(space), "I")


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
