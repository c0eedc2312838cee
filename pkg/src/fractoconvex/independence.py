"""Independence of convexities, independence domains and the conical exchange scan.

Convexities are independent when every set in their semiconvex family
``1/{G_λ}`` equals the intersection of its hulls.  The conical scan decides
the two-convexity exchange property that makes this automatic for 3-ary
convexities; :func:`verify_lemma1` and :func:`verify_prop3` check the
consequences exhaustively on small spaces.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from .bits import ElemSet, elems, fmt, is_subset, mask_of
from .convexity import Convexity, SetFamily, _shared_space
from .errors import ArityMismatch, PreconditionNotChecked, SpaceMismatch
from .fracto import frac, member_array
from .report import Report


def _unique(convs: Sequence[Convexity]) -> list[Convexity]:
    out: list[Convexity] = []
    for c in convs:
        if not any(c is d for d in out):
            out.append(c)
    return out


def pair_hull(convs: Sequence[Convexity], A: ElemSet) -> ElemSet:
    """Intersection of the hulls of ``A`` under every convexity in ``convs``."""
    space = _shared_space(convs)
    space.check(A)
    out = space.full
    for c in convs:
        out &= c.hull(A)
    return out


def pair_hull_table(convs: Sequence[Convexity], cap: int | None = None) -> np.ndarray:
    _shared_space(convs)
    out = convs[0].table(cap).copy()
    for c in convs[1:]:
        out &= c.table(cap)
    return out


@dataclass
class IndependenceReport:
    independent: bool
    domain: SetFamily
    violations: list[tuple[ElemSet, ElemSet]]


def independence_domain(convs: Sequence[Convexity], cap: int | None = None) -> IndependenceReport:
    """Members of ``1/{convs}`` that equal the intersection of their hulls."""
    convs = _unique(convs)
    space = _shared_space(convs)
    masks = space.all_masks
    members = member_array(frac(1, convs, check_distinct=False), cap)
    ph = pair_hull_table(convs, cap)
    fixed = ph == masks
    bad = np.flatnonzero(members & ~fixed)
    return IndependenceReport(
        independent=len(bad) == 0,
        domain=SetFamily.from_bool(members & fixed),
        violations=[(int(A), int(ph[A])) for A in bad],
    )


def _check_pair(G1: Convexity, G2: Convexity) -> None:
    if G1.space != G2.space:
        raise SpaceMismatch(f"{G1.id!r} and {G2.id!r} live on different spaces")


def condition_3_1(G1: Convexity, G2: Convexity, A: ElemSet) -> bool:
    """Whether every set of at most three points of ``A`` has its pair-hull inside ``A``."""
    _check_pair(G1, G2)
    G1.space.check(A)
    pts = elems(A)
    for r in (1, 2, 3):
        for combo in combinations(pts, r):
            S = mask_of(combo)
            if not is_subset(G1.hull(S) & G2.hull(S), A):
                return False
    return True


def condition_3_1_array(G1: Convexity, G2: Convexity, cap: int | None = None) -> np.ndarray:
    _check_pair(G1, G2)
    space = G1.space
    masks = space.all_masks
    ph = pair_hull_table([G1, G2], cap)
    ok = np.ones(masks.shape, dtype=bool)
    for r in (1, 2, 3):
        for combo in combinations(range(space.size), r):
            S = mask_of(combo)
            h = int(ph[S])
            ok &= ((masks & S) != S) | ((masks & h) == h)
    return ok


@dataclass
class ConicalWitness:
    point_list: list[int]
    target: int
    verdict: bool
    missing: tuple[str, ...] = ()


@dataclass
class ConicalResult:
    independent: bool
    witness: ConicalWitness | None
    scanned: int
    pair: tuple[Convexity, Convexity]

    def __iter__(self):
        # unpacks as (flag, witness)
        return iter((self.independent, self.witness))


def is_conically_independent(
    G1: Convexity, G2: Convexity, cap: int | None = None, min_prefix: int = 3
) -> ConicalResult:
    """Exhaustive scan of the conical exchange property.

    A point tuple ``x_1..x_k`` enters only through the set ``P`` of its first
    ``k-1`` entries and the last point ``x_k``: repeated entries leave every
    hull unchanged, so a tuple is covered by its distinct sets.  ``P`` ranges
    over all sets with ``|P| >= min_prefix`` and ``x_k`` over all points, in
    or out of ``P``.  Padding a tuple with repeats reaches ``|P| = 2``;
    pass ``min_prefix=2`` for that stronger reading (``|P| = 1`` always holds).  For fixed ``(P, x_k)`` the two witnesses
    ``y_1`` and ``y_2`` are chosen independently, so the condition is
    ``pair_hull(P + x_k) <= R_1 & R_2`` with
    ``R_i = U{hull_i{y, x_k} : y in pair_hull(P)}``.

    The first failure in order of increasing ``|P|``, then ``P``, then
    ``x_k`` is reported.
    """
    _check_pair(G1, G2)
    space = G1.space
    n = space.size
    masks = space.all_masks
    t1, t2 = G1.table(cap), G2.table(cap)
    H = t1 & t2
    sizes = np.zeros(masks.shape, dtype=np.int64)
    for y in range(n):
        sizes += (masks >> y) & 1
    if min_prefix < 1:
        raise ValueError("min_prefix must be at least 1")
    big = sizes >= min_prefix
    scanned = int(big.sum()) * n

    failures: list[tuple[int, list[int], int, int]] = []
    for xk in range(n):
        bit = 1 << xk
        target = H[masks | bit]
        R1 = np.zeros_like(masks)
        R2 = np.zeros_like(masks)
        for y in range(n):
            has = ((H >> y) & 1).astype(bool)
            pair = (1 << y) | bit
            R1[has] |= t1[pair]
            R2[has] |= t2[pair]
        bad = np.flatnonzero(big & ((target & ~(R1 & R2)) != 0))
        if len(bad):
            P = min(bad.tolist(), key=lambda m: (bin(m).count("1"), elems(m)))
            failures.append((bin(P).count("1"), elems(P), xk, P, int(target[P]), int(R1[P]), int(R2[P])))
    if not failures:
        return ConicalResult(True, None, scanned, (G1, G2))
    _, pts, xk, P, tgt, r1, r2 = min(failures)
    x = min(elems(tgt & ~(r1 & r2)))
    missing = tuple(name for name, r in (("y1", r1), ("y2", r2)) if not (r >> x) & 1)
    return ConicalResult(False, ConicalWitness(pts + [xk], x, False, missing), scanned, (G1, G2))


def _require_scan(G1: Convexity, G2: Convexity, scan: ConicalResult | None) -> None:
    if scan is None or scan.pair[0] is not G1 or scan.pair[1] is not G2:
        raise PreconditionNotChecked(f"run is_conically_independent({G1.id}, {G2.id}) first")
    if not scan.independent:
        raise PreconditionNotChecked(f"{G1.id} and {G2.id} failed the conical scan")


def verify_lemma1(G1: Convexity, G2: Convexity, scan: ConicalResult | None, cap: int | None = None) -> Report:
    """Every set satisfying the three-point condition equals its pair-hull."""
    _require_scan(G1, G2, scan)
    rep = Report("lemma1")
    masks = G1.space.all_masks
    cond = condition_3_1_array(G1, G2, cap)
    ph = pair_hull_table([G1, G2], cap)
    rep.counts["sets_3_1"] = int(cond.sum())
    for A in np.flatnonzero(cond & (ph != masks)):
        rep.fail({"A": elems(int(A)), "pair_hull": elems(int(ph[A]))})
    rep.counts["failures"] = int((cond & (ph != masks)).sum())
    return rep


def verify_prop3(G1: Convexity, G2: Convexity, scan: ConicalResult | None, cap: int | None = None) -> Report:
    """Every member of the ternary family ``1/{G1, G2}`` equals its pair-hull."""
    if G1.space.arity != 3 or G2.space.arity != 3:
        raise ArityMismatch(f"ternary convexities required, got arity {G1.space.arity}")
    _require_scan(G1, G2, scan)
    rep = Report("prop3")
    res = independence_domain([G1, G2], cap)
    rep.counts["members"] = len(res.domain) + len(res.violations)
    rep.counts["failures"] = len(res.violations)
    for A, ph in res.violations:
        rep.fail({"A": elems(A), "pair_hull": elems(ph)})
    return rep


def describe_witness(w: ConicalWitness) -> str:
    return f"x={w.target} in pair_hull{fmt(mask_of(w.point_list))} without {', '.join(w.missing)} (tuple {w.point_list})"
