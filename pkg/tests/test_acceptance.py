"""Acceptance criteria, one test each.

Every test records a ``criterion N: PASS|FAIL`` line; the lines are printed
as they happen (visible with ``-s``) and repeated in the terminal summary.
"""

import random
import time
from contextlib import contextmanager
from functools import lru_cache

import numpy as np
import pytest

from fractoconvex.bits import mask_of
from fractoconvex.convexity import GroundSpace, check_axioms
from fractoconvex.errors import ArityError, DuplicateId, ExprSyntaxError
from fractoconvex.expr import parse_expr, to_text
from fractoconvex.fracto import frac, member_array
from fractoconvex.generators import random_convexity, random_expr
from fractoconvex.propcheck import run_suite, run_trials, trial_prop4
from fractoconvex.sphere import (
    EXAMPLE_CENTERS,
    build_example1,
    build_example3,
    build_sphere,
    example_halfspace,
    separate,
)

from conftest import brute_family, brute_hull, brute_semiconvex

RESULTS: list[str] = []


@contextmanager
def criterion(num, title, limit=None):
    t0 = time.perf_counter()
    status = "FAIL"
    try:
        yield
        status = "PASS"
    finally:
        dt = time.perf_counter() - t0
        budget = f" / {limit:g} s" if limit else ""
        line = f"criterion {num}: {status} ({dt:.1f} s{budget}) {title}"
        RESULTS.append(line)
        print("\n" + line)


# cached runs shared with the axiom criterion

@lru_cache(maxsize=None)
def suite(prop):
    return run_suite(prop, seed=0)


@lru_cache(maxsize=None)
def prop4_by_size():
    return {size: run_trials("prop4", trial_prop4, 50 + 3, 0, 1, (size,)) for size in range(6, 15)}


@lru_cache(maxsize=None)
def sphere80():
    return build_sphere(80, EXAMPLE_CENTERS)


@lru_cache(maxsize=None)
def sphere40():
    return build_sphere(40, EXAMPLE_CENTERS)


@lru_cache(maxsize=None)
def example1():
    return build_example1(sphere80(), 0, 1, samples=500, seed=0)


@lru_cache(maxsize=None)
def example3():
    return build_example3(sphere40(), 0, 1, example_halfspace())


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_c1_prop1():
    with criterion(1, "k/{G1..Gk} = 1/{meet Gi} = meet of 1/{Gi}, 200 spaces", 60):
        rep, dt = timed(lambda: suite("1"))
        assert rep.counts["trials"] == 200
        assert rep.ok and rep.counts["failures"] == 0, rep.witnesses[:3]
        assert dt < 60


def test_c2_properties():
    with criterion(2, "join commutative/associative, k<l absorption, normalize per-B, 200 instances", 30):
        rep, dt = timed(lambda: suite("iii"))
        assert rep.counts["trials"] == 200
        assert rep.ok and rep.counts["failures"] == 0, rep.witnesses[:3]
        assert dt < 30


def test_c3_distributive_absorption():
    with criterion(3, "distributive and absorption laws, 500 triples each", 120):
        t0 = time.perf_counter()
        dist, absorb = suite("2"), suite("abs")
        dt = time.perf_counter() - t0
        for rep in (dist, absorb):
            assert rep.counts["trials"] >= 500
            assert rep.ok and rep.counts["failures"] == 0, rep.witnesses[:3]
        assert dt < 120


def test_c4_lemma1_prop3():
    with criterion(4, "three-point sets and ternary members on pairs passing the conical scan, N <= 7", 120):
        rep, dt = timed(lambda: suite("3"))
        assert rep.counts["passing_pairs"] >= 50, rep.counts
        assert rep.ok and rep.counts["failures"] == 0, rep.witnesses[:3]
        assert dt < 120


def test_c5_prop4():
    with criterion(5, "F4 members equal hull1 & hull2, N = 6..14, 53 permutations each", 60):
        t0 = time.perf_counter()
        reps = prop4_by_size()
        total = time.perf_counter() - t0
        for size, rep in reps.items():
            assert rep.counts["trials"] == 53
            assert rep.ok and rep.counts["failures"] == 0, (size, rep.witnesses[:3])
            assert (rep.timing_ms or 0) / 1000 < 60, size
        assert total < 60 * len(reps)


def test_c6_sphere_example1():
    with criterion(6, "80-point sphere, 500 regular 2-semiconvex sets in the independence domain", 120):
        rep, dt = timed(example1)
        assert rep.counts["regular_samples"] == 500
        assert rep.counts["violations"] == 0 and rep.ok, rep.witnesses[:3]
        # independent re-check of a witness with plain inequalities
        model = sphere80()
        low = mask_of(np.flatnonzero(model.points[:, 2] < -0.5))
        ok, H = separate(model.centers[:2], model.points_of(low))
        assert ok
        assert all(float(H.normal @ c) > H.offset for c in model.centers[:2])
        assert all(float(H.normal @ p) <= H.offset for p in model.points_of(low))
        assert dt < 120


def test_c7_sphere_example3():
    with criterion(7, "40-point sphere, pair-hull equality on <= 4-point sets, conical scan and ternary members", 300):
        rep, dt = timed(example3)
        assert rep.counts["pair_hull_mismatches"] == 0
        assert rep.details["conical"]
        assert rep.counts["prop3_failures"] == 0 and rep.ok, rep.witnesses[:3]
        assert dt < 300


def test_c8_axioms():
    with criterion(8, "every convexity built in criteria 1-7 passes the axiom check"):
        convs = []
        for prop in ("1", "iii", "2", "abs", "3"):
            convs += suite(prop).objects["convexities"]
        for rep in prop4_by_size().values():
            convs += rep.objects["convexities"]
        convs += sphere80().convexities + sphere40().convexities
        convs += example3().objects["convexities"]
        assert len(convs) > 1000
        seen = set()
        bad = []
        rng = random.Random(0)
        for c in convs:
            if id(c) in seen:
                continue
            seen.add(id(c))
            if c.space.enumerable():
                ok = check_axioms(c).ok
            else:
                n = c.space.size
                samples = [mask_of(rng.sample(range(n), rng.randint(0, 6))) for _ in range(200)]
                ok = check_axioms(c, samples=samples).ok
            if not ok:
                bad.append(c.id)
        assert not bad, bad[:5]


def test_c9_parser():
    with criterion(9, "10^4 fuzzed round-trips and the three error classes"):
        rng = random.Random(9)
        ids = ["G1", "G2", "G3", "G4", "H", "K_2"]
        mismatches = 0
        for _ in range(10_000):
            node = random_expr(rng, ids, depth=rng.randint(1, 5))
            if parse_expr(to_text(node, unicode=rng.random() < 0.3)) != node:
                mismatches += 1
        assert mismatches == 0
        with pytest.raises(ExprSyntaxError):
            parse_expr("1/{G1} v v 1/{G2}")
        with pytest.raises(ArityError):
            parse_expr("3/{G1,G2}")
        with pytest.raises(DuplicateId):
            parse_expr("1/{G1,G1}")


def test_c10_reduction():
    with criterion(10, "1/{G1,G2} and 2/{G1,G2} against the one-of/all-of oracles, 100 spaces"):
        rng = random.Random(10)
        checked = 0
        for _ in range(100):
            space = GroundSpace(rng.randint(3, 8), rng.choice([1, 2, 3]))
            G1, G2 = random_convexity(space, rng, "G1"), random_convexity(space, rng, "G2")
            hulls = []
            for G in (G1, G2):
                fam = brute_family(space.size, space.arity, G.base)
                hulls.append([brute_hull(fam, B) for B in range(1 << space.size)])
            semi = member_array(frac(1, [G1, G2], check_distinct=False))
            bi = member_array(frac(2, [G1, G2], check_distinct=False))
            for A in range(1 << space.size):
                assert semi[A] == brute_semiconvex(hulls, A, space.arity, 1)
                assert bi[A] == brute_semiconvex(hulls, A, space.arity, 2)
                checked += 1
        assert checked > 5000
