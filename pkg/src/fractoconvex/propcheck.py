"""Randomised property suites shared by the command line and the test suite.

Every trial draws from its own ``random.Random`` seeded by ``(seed, index)``,
so a suite gives the same report whether it runs in one process or many.
Suites keep the convexities they build in ``report.objects["convexities"]``
when run in-process, so callers can audit them afterwards.
"""

from __future__ import annotations

import random
from concurrent.futures import ProcessPoolExecutor
from functools import reduce
from typing import Any, Callable

from .bits import elems
from .convexity import Convexity, GroundSpace, enumerate_convex, intersect_convexities
from .fracto import (
    Fractoconvexity,
    enumerate_members,
    family_equal,
    frac,
    join,
    meet,
    member_array,
    normalize,
    per_b_equivalent,
    simplify_prop1,
)
from .generators import random_convexities, random_convexity, random_fracto, random_perm
from .independence import independence_domain, is_conically_independent, verify_lemma1, verify_prop3
from .report import Report
from .zline import build_zline, check_prop4, identity_perm, interleaved_perm, reversal_perm

SUITES = ("1", "2", "3", "4", "abs", "iii", "lattice")

DEFAULT_TRIALS = {"1": 200, "2": 500, "3": 300, "4": 50, "abs": 500, "iii": 200, "lattice": 500}


def trial_rng(seed: int, index: int) -> random.Random:
    return random.Random(f"{seed}:{index}")


def random_space(rng: random.Random, sizes: tuple[int, int] = (4, 8), arities: tuple[int, ...] = (2, 3)) -> GroundSpace:
    return GroundSpace(rng.randint(*sizes), rng.choice(arities))


def _first_diff(F1: Fractoconvexity, F2: Fractoconvexity) -> list[int] | None:
    a, b = member_array(F1), member_array(F2)
    for A, (x, y) in enumerate(zip(a, b)):
        if x != y:
            return elems(A)
    return None


class _Trial:
    """Outcome of one trial: failed checks plus counters."""

    def __init__(self, index: int):
        self.index = index
        self.failures: list[dict[str, Any]] = []
        self.counts: dict[str, int] = {}
        self.convs: list[Convexity] = []
        self.notes: list[dict[str, Any]] = []

    def check(self, name: str, ok: bool, **extra: Any) -> None:
        self.counts["checks"] = self.counts.get("checks", 0) + 1
        if not ok:
            self.failures.append({"trial": self.index, "check": name, **extra})

    def bump(self, key: str, by: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + by


def _ext(t: _Trial, name: str, F1: Fractoconvexity, F2: Fractoconvexity) -> None:
    ok = family_equal(F1, F2)
    t.check(name, ok, **({} if ok else {"A": _first_diff(F1, F2), "lhs": str(F1), "rhs": str(F2)}))


def _pool(rng: random.Random, k: int = 3) -> tuple[GroundSpace, list[Convexity]]:
    space = random_space(rng)
    return space, random_convexities(space, k, rng)


# --- trials ---------------------------------------------------------------

def trial_prop1(seed: int, i: int) -> _Trial:
    """``k/{G1..Gk}``, ``1/{G1 & .. & Gk}``, the meet of the ``1/{Gi}`` and the
    intersection of the convex families all coincide."""
    rng = trial_rng(seed, i)
    t = _Trial(i)
    space = random_space(rng)
    k = rng.choice([2, 3])
    convs = random_convexities(space, k, rng)
    inter = intersect_convexities(convs)
    Fk = frac(k, convs)
    t.convs = convs + [inter]
    _ext(t, "multi=1/{intersection}", Fk, frac(1, [inter]))
    _ext(t, "multi=meet of singles", Fk, reduce(meet, [frac(1, [c]) for c in convs]))
    fam = reduce(lambda a, b: a & b, [enumerate_convex(c) for c in convs])
    t.check("multi=intersection of families", enumerate_members(Fk) == fam)
    t.check("simplify_prop1 extensional", family_equal(simplify_prop1(Fk), Fk))
    return t


def trial_iii(seed: int, i: int) -> _Trial:
    """Properties (i)-(iii): join laws at both equality levels, k<l absorption,
    per-B equivalence of the normal form and the meet against its oracle."""
    rng = trial_rng(seed, i)
    t = _Trial(i)
    _, convs = _pool(rng)
    t.convs = convs
    F1, F2, F3 = (random_fracto(convs, rng) for _ in range(3))
    t.check("join commutative (family)", family_equal(join(F1, F2), join(F2, F1)))
    t.check("join commutative (per-B)", per_b_equivalent(join(F1, F2), join(F2, F1)))
    lhs, rhs = join(join(F1, F2), F3), join(F1, join(F2, F3))
    t.check("join associative (family)", family_equal(lhs, rhs))
    t.check("join associative (per-B)", per_b_equivalent(lhs, rhs))
    t.check("join idempotent (per-B)", per_b_equivalent(join(F1, F1), F1))
    l = rng.randint(2, len(convs))
    k = rng.randint(1, l - 1)
    order = rng.sample(convs, l)
    small, big = frac(k, order[:k]), frac(l, order[:l])
    _ext(t, f"absorption k={k} < l={l}", join(small, big), small)
    t.check("normalize per-B", per_b_equivalent(normalize(F1), F1))
    t.check("meet = conjunction", bool((member_array(meet(F1, F2)) == (member_array(F1) & member_array(F2))).all()))
    return t


def _triple(seed: int, i: int) -> tuple[_Trial, Fractoconvexity, Fractoconvexity, Fractoconvexity]:
    rng = trial_rng(seed, i)
    t = _Trial(i)
    _, convs = _pool(rng, rng.choice([2, 3, 4]))
    t.convs = convs
    return (t, *(random_fracto(convs, rng) for _ in range(3)))


def trial_prop2(seed: int, i: int) -> _Trial:
    t, F1, F2, F3 = _triple(seed, i)
    _ext(t, "(F1 v F2) ^ F3 = (F1 ^ F3) v (F2 ^ F3)", meet(join(F1, F2), F3), join(meet(F1, F3), meet(F2, F3)))
    _ext(t, "(F1 ^ F2) v F3 = (F1 v F3) ^ (F2 v F3)", join(meet(F1, F2), F3), meet(join(F1, F3), join(F2, F3)))
    return t


def trial_abs(seed: int, i: int) -> _Trial:
    t, F1, F2, _ = _triple(seed, i)
    _ext(t, "(F1 v F2) ^ F1 = F1", meet(join(F1, F2), F1), F1)
    _ext(t, "(F1 ^ F2) v F1 = F1", join(meet(F1, F2), F1), F1)
    return t


def trial_lattice(seed: int, i: int) -> _Trial:
    """All lattice laws on one triple, plus a probe of whether join respects
    extensional equality of its operands (reported, never asserted)."""
    t, F1, F2, F3 = _triple(seed, i)
    for law, (a, b) in {
        "join commutative": (join(F1, F2), join(F2, F1)),
        "meet commutative": (meet(F1, F2), meet(F2, F1)),
        "join associative": (join(join(F1, F2), F3), join(F1, join(F2, F3))),
        "meet associative": (meet(meet(F1, F2), F3), meet(F1, meet(F2, F3))),
        "join idempotent": (join(F1, F1), F1),
        "meet idempotent": (meet(F1, F1), F1),
        "absorption join-meet": (meet(join(F1, F2), F1), F1),
        "absorption meet-join": (join(meet(F1, F2), F1), F1),
        "distributive meet over join": (meet(join(F1, F2), F3), join(meet(F1, F3), meet(F2, F3))),
        "distributive join over meet": (join(meet(F1, F2), F3), meet(join(F1, F3), join(F2, F3))),
    }.items():
        _ext(t, law, a, b)
    # F1s has the same family as F1 but stricter per-B conditions
    F1s = simplify_prop1(F1)
    t.bump("join_probes")
    if not family_equal(join(F1, F2), join(F1s, F2)):
        t.bump("join_not_extensional")
        t.notes.append({"trial": i, "F1": str(F1), "F2": str(F2), "A": _first_diff(join(F1, F2), join(F1s, F2))})
    return t


def trial_prop3(seed: int, i: int) -> _Trial:
    """A random ternary pair; when it passes the conical scan, three-point
    closed sets and semiconvex members must both equal their pair-hulls."""
    rng = trial_rng(seed, i)
    t = _Trial(i)
    space = GroundSpace(rng.randint(5, 7), 3)
    G1 = random_convexity(space, rng, "G1")
    G2 = random_convexity(space, rng, "G2")
    t.convs = [G1, G2]
    scan = is_conically_independent(G1, G2)
    if not scan.independent:
        t.bump("scan_failed")
        if not independence_domain([G1, G2]).independent:
            t.bump("scan_failed_dependent")
        return t
    t.bump("passing_pairs")
    lem = verify_lemma1(G1, G2, scan)
    p3 = verify_prop3(G1, G2, scan)
    t.bump("sets_3_1", lem.counts["sets_3_1"])
    t.bump("prop3_members", p3.counts["members"])
    t.check("three-point sets", lem.ok, witnesses=lem.witnesses[:3])
    t.check("ternary members", p3.ok, witnesses=p3.witnesses[:3])
    return t


def trial_prop4(seed: int, i: int, size: int) -> _Trial:
    t = _Trial(i)
    fixed = [identity_perm(size), reversal_perm(size), interleaved_perm(size)]
    perm = fixed[i] if i < len(fixed) else random_perm(size, trial_rng(seed, i))
    model = build_zline(size, perm)
    t.convs = [model.G1, model.G2]
    rep = check_prop4(model)
    t.bump("members", rep.counts["members"])
    t.bump("in_neither", rep.counts["in_neither"])
    t.check(f"prop4 N={size}", rep.ok, perm=perm, witnesses=rep.witnesses[:3])
    return t


# --- runner ---------------------------------------------------------------

def _call(args: tuple) -> _Trial:
    fn, seed, i, extra = args
    t = fn(seed, i, *extra)
    t.convs = []
    return t


def run_trials(
    name: str, fn: Callable[..., _Trial], trials: int, seed: int, jobs: int = 1, extra: tuple = ()
) -> Report:
    rep = Report(name, seed=seed)
    with rep.timed():
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                results = list(ex.map(_call, [(fn, seed, i, extra) for i in range(trials)], chunksize=8))
        else:
            results = [fn(seed, i, *extra) for i in range(trials)]
    rep.counts["trials"] = trials
    convs: list[Convexity] = []
    notes: list[dict[str, Any]] = []
    failures = 0
    for t in results:
        for key, val in t.counts.items():
            rep.bump(key, val)
        for f in t.failures:
            failures += 1
            rep.fail(f)
        convs.extend(t.convs)
        notes.extend(t.notes)
    rep.counts["failures"] = failures
    if notes:
        rep.details["examples"] = notes[:3]
    rep.objects["convexities"] = convs
    return rep


def run_suite(prop: str, trials: int | None = None, seed: int = 0, jobs: int = 1) -> Report:
    if prop not in SUITES:
        raise ValueError(f"unknown suite {prop!r}; choose from {', '.join(SUITES)}")
    n = DEFAULT_TRIALS[prop] if trials is None else trials
    if prop == "3":
        rep = run_trials("prop3", trial_prop3, n, seed, jobs)
        rep.counts.setdefault("passing_pairs", 0)
        rep.counts.setdefault("scan_failed_dependent", 0)
        return rep
    if prop == "4":
        # n random permutations per window size, after the three fixed ones
        rep = Report("prop4", seed=seed)
        convs: list[Convexity] = []
        timing = 0.0
        for size in range(6, 15):
            sub = run_trials("prop4", trial_prop4, n + 3, seed, jobs, (size,))
            timing += sub.timing_ms or 0.0
            rep.counts[f"members_N{size}"] = sub.counts["members"]
            for key in ("trials", "checks", "failures", "in_neither"):
                rep.bump(key, sub.counts.get(key, 0))
            for w in sub.witnesses:
                rep.fail(w)
            convs.extend(sub.objects["convexities"])
        rep.timing_ms = timing
        rep.objects["convexities"] = convs
        return rep
    fn = {"1": trial_prop1, "2": trial_prop2, "abs": trial_abs, "iii": trial_iii, "lattice": trial_lattice}[prop]
    name = {"1": "prop1", "2": "prop2", "abs": "absorption", "iii": "properties_i_iii", "lattice": "lattice"}[prop]
    rep = run_trials(name, fn, n, seed, jobs)
    if prop == "lattice":
        rep.counts.setdefault("join_not_extensional", 0)
    return rep
