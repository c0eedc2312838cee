import random
from itertools import combinations, product

import pytest

from fractoconvex.bits import elems, mask_of
from fractoconvex.convexity import GroundSpace, lift_arity, make_convexity
from fractoconvex.errors import ArityMismatch, PreconditionNotChecked, SpaceMismatch
from fractoconvex.fracto import frac, member
from fractoconvex.generators import interval_base, random_convexity
from fractoconvex.independence import (
    condition_3_1,
    condition_3_1_array,
    describe_witness,
    independence_domain,
    is_conically_independent,
    pair_hull,
    verify_lemma1,
    verify_prop3,
)
from fractoconvex.zline import build_zline

from conftest import brute_family, brute_hull


def interval(space, order=None, id="I"):
    return make_convexity(space, interval_base(space, order), id)


def ternary_pair(seed, size):
    rng = random.Random(seed)
    space = GroundSpace(size, 3)
    return random_convexity(space, rng, "G1"), random_convexity(space, rng, "G2")


def brute_hulls(G):
    fam = brute_family(G.space.size, G.space.arity, G.base)
    return [brute_hull(fam, A) for A in range(1 << G.space.size)]


def tuple_oracle(G1, G2, min_prefix):
    """Literal quantifier over point tuples x_1..x_n, n >= 4, repeats allowed.

    Only tuples whose first n-1 entries hold at least ``min_prefix`` distinct
    points are considered.  Tuples up to length N+1 reach every prefix set.
    """
    n = G1.space.size
    h1, h2 = brute_hulls(G1), brute_hulls(G2)
    ph = [a & b for a, b in zip(h1, h2)]
    seen = set()
    for length in range(4, n + 2):
        for tup in product(range(n), repeat=length):
            P, xn = mask_of(tup[:-1]), tup[-1]
            if (P, xn) in seen or bin(P).count("1") < min_prefix:
                continue
            seen.add((P, xn))
            ys = elems(ph[P])
            for x in elems(ph[P | 1 << xn]):
                ok1 = any(h1[1 << y | 1 << xn] >> x & 1 for y in ys)
                ok2 = any(h2[1 << y | 1 << xn] >> x & 1 for y in ys)
                if not (ok1 and ok2):
                    return False
    return True


class TestPairHull:
    def test_same_convexity_is_hull(self, interval10):
        for A in (mask_of([1, 4]), mask_of([0, 9]), 0):
            assert pair_hull([interval10, interval10], A) == interval10.hull(A)

    def test_interval_and_reversal(self, interval10):
        rev = interval(interval10.space, list(range(9, -1, -1)), "R")
        assert elems(pair_hull([interval10, rev], mask_of([2, 5]))) == [2, 3, 4, 5]

    def test_space_mismatch(self, interval10):
        with pytest.raises(SpaceMismatch):
            pair_hull([interval10, interval(GroundSpace(4, 2))], 1)


class TestDomain:
    def test_single_convexity(self, interval10):
        rep = independence_domain([interval10])
        assert rep.independent and rep.domain == interval10.family()

    def test_zline_independent(self):
        m = build_zline(8, [0, 2, 4, 6, 1, 3, 5, 7])
        rep = independence_domain([m.G1, m.G2])
        assert rep.independent and not rep.violations

    def test_dependent_pair_found(self):
        found = 0
        for seed in range(60):
            rng = random.Random(seed)
            space = GroundSpace(6, 2)
            G1, G2 = random_convexity(space, rng, "G1"), random_convexity(space, rng, "G2")
            rep = independence_domain([G1, G2])
            for A, ph in rep.violations:
                assert member(frac(1, [G1, G2], check_distinct=False), A)
                assert ph == G1.hull(A) & G2.hull(A) != A
                found += 1
            assert rep.independent == (not rep.violations)
        assert found


class TestCondition31:
    @pytest.mark.parametrize("seed", range(4))
    def test_against_triple_loop(self, seed):
        G1, G2 = ternary_pair(seed, 7)
        h1, h2 = brute_hulls(G1), brute_hulls(G2)
        arr = condition_3_1_array(G1, G2)
        for A in range(1 << 7):
            pts = elems(A)
            want = all(
                (h1[mask_of(c)] & h2[mask_of(c)]) & ~A == 0
                for r in (1, 2, 3)
                for c in combinations(pts, r)
            )
            assert arr[A] == want == condition_3_1(G1, G2, A)

    def test_convex_sets_satisfy_it(self):
        G1, G2 = ternary_pair(9, 6)
        for A in G1.family():
            assert condition_3_1(G1, G2, A)

    def test_semiconvex_members_satisfy_it(self):
        G1, G2 = ternary_pair(11, 6)
        F = frac(1, [G1, G2])
        for A in range(64):
            if member(F, A):
                assert condition_3_1(G1, G2, A)


class TestConical:
    def test_three_points_vacuous(self):
        G1, G2 = ternary_pair(0, 3)
        res = is_conically_independent(G1, G2)
        assert res.independent and res.scanned == 3

    def test_same_interval(self):
        space = GroundSpace(8, 3)
        I = interval(space)
        ok, w = is_conically_independent(I, I)
        assert ok and w is None

    @pytest.mark.parametrize("min_prefix", [3, 2])
    def test_tuple_oracle(self, min_prefix):
        verdicts = []
        for seed in range(24):
            G1, G2 = ternary_pair(seed, 4 + seed % 2)
            got = is_conically_independent(G1, G2, min_prefix=min_prefix).independent
            assert got == tuple_oracle(G1, G2, min_prefix)
            verdicts.append(got)
        assert any(verdicts) and not all(verdicts)

    def test_prefix_one_is_prefix_two(self):
        for seed in range(20):
            G1, G2 = ternary_pair(seed, 5)
            a = is_conically_independent(G1, G2, min_prefix=1).independent
            assert a == is_conically_independent(G1, G2, min_prefix=2).independent

    def test_literal_reading_is_stronger(self):
        for seed in range(40):
            G1, G2 = ternary_pair(seed, 6)
            if is_conically_independent(G1, G2, min_prefix=2).independent:
                assert is_conically_independent(G1, G2).independent
        with pytest.raises(ValueError):
            is_conically_independent(G1, G2, min_prefix=0)

    def test_witness_is_genuine(self):
        for seed in range(40):
            G1, G2 = ternary_pair(seed, 6)
            res = is_conically_independent(G1, G2)
            if res.independent:
                continue
            w = res.witness
            *pre, xk = w.point_list
            P = mask_of(pre)
            assert bin(P).count("1") >= 3
            assert (G1.hull(P | 1 << xk) & G2.hull(P | 1 << xk)) >> w.target & 1
            ys = elems(pair_hull([G1, G2], P))
            for name, G in (("y1", G1), ("y2", G2)):
                reach = any(G.hull(1 << y | 1 << xk) >> w.target & 1 for y in ys)
                assert reach == (name not in w.missing)
            assert f"x={w.target}" in describe_witness(w)
            return
        pytest.fail("no failing pair among 40 seeds")


class TestConsequences:
    def test_identical_pair(self):
        I = interval(GroundSpace(7, 3))
        scan = is_conically_independent(I, I)
        assert verify_lemma1(I, I, scan).ok
        assert verify_prop3(I, I, scan).ok

    def test_preconditions(self):
        for seed in range(40):
            G1, G2 = ternary_pair(seed, 6)
            scan = is_conically_independent(G1, G2)
            if not scan.independent:
                break
        with pytest.raises(PreconditionNotChecked):
            verify_lemma1(G1, G2, None)
        with pytest.raises(PreconditionNotChecked):
            verify_prop3(G1, G2, scan)
        other = is_conically_independent(G2, G1)
        with pytest.raises(PreconditionNotChecked):
            verify_lemma1(G1, G2, other)

    def test_arity_mismatch(self, interval10):
        scan = is_conically_independent(interval10, interval10)
        with pytest.raises(ArityMismatch):
            verify_prop3(interval10, interval10, scan)
        assert verify_lemma1(interval10, interval10, scan).ok

    def test_random_passing_pairs(self):
        passed = 0
        for seed in range(60):
            G1, G2 = ternary_pair(seed, 6)
            scan = is_conically_independent(G1, G2)
            if scan.independent:
                passed += 1
                assert verify_lemma1(G1, G2, scan).counts["failures"] == 0
                rep = verify_prop3(G1, G2, scan)
                assert rep.ok and rep.counts["failures"] == 0
        assert passed >= 5

    def test_lift_keeps_scan(self, interval10):
        L = lift_arity(interval10, 3)
        assert is_conically_independent(L, L).independent
