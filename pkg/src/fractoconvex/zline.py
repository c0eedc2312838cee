"""Interval convexity on an integer window and its image under a permutation.

``G1`` is the usual interval convexity on ``0..N-1``.  ``G2`` transports it
along a bijection ``f`` of the window (``perm[i] = f(i)``): a set is
``G2``-convex when its preimage is an interval.  Every member of the
semiconvex family ``1/{G1, G2}`` is expected to equal ``hull1(A) & hull2(A)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bits import ElemSet, elems, mask_of
from .convexity import Convexity, GroundSpace, SetFamily, make_convexity
from .errors import NotAPermutation, WindowTooSmall
from .fracto import Fractoconvexity, enumerate_members, frac, member_array
from .generators import interval_base
from .report import Report

ZLINE_CAP = 16


@dataclass(frozen=True)
class ZLineModel:
    window_size: int
    perm: tuple[int, ...]
    G1: Convexity
    G2: Convexity
    F4: Fractoconvexity

    @property
    def space(self) -> GroundSpace:
        return self.G1.space

    @property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * self.window_size
        for i, x in enumerate(self.perm):
            inv[x] = i
        return tuple(inv)


def check_perm(perm: Sequence[int], n: int) -> tuple[int, ...]:
    perm = tuple(int(x) for x in perm)
    if sorted(perm) != list(range(n)):
        raise NotAPermutation(f"{list(perm)} is not a permutation of 0..{n - 1}")
    return perm


def build_zline(window_size: int, perm: Sequence[int] | None = None) -> ZLineModel:
    if window_size < 2:
        raise WindowTooSmall(f"window size must be at least 2, got {window_size}")
    perm = tuple(range(window_size)) if perm is None else check_perm(perm, window_size)
    space = GroundSpace(window_size, 2)
    G1 = make_convexity(space, interval_base(space), "G1")
    G2 = make_convexity(space, interval_base(space, perm), "G2")
    # G1 and G2 coincide for identity and reversal, so no distinctness check
    F4 = frac(1, [G1, G2], check_distinct=False)
    return ZLineModel(window_size, perm, G1, G2, F4)


def identity_perm(n: int) -> list[int]:
    return list(range(n))


def reversal_perm(n: int) -> list[int]:
    return list(range(n - 1, -1, -1))


def interleaved_perm(n: int) -> list[int]:
    """Evens ascending then odds ascending: two monotone runs woven together."""
    return list(range(0, n, 2)) + list(range(1, n, 2))


def formula_hull1(A: ElemSet) -> ElemSet:
    """``{a1..b1}`` with ``a1 = min A`` and ``b1 = max A``."""
    if not A:
        return 0
    xs = elems(A)
    a1, b1 = xs[0], xs[-1]
    return mask_of(range(a1, b1 + 1))


def formula_hull2(model: ZLineModel, A: ElemSet) -> ElemSet:
    """``f({a2..b2})`` with ``a2 = min f^-1(A)`` and ``b2 = max f^-1(A)``."""
    if not A:
        return 0
    inv = model.inverse
    pre = [inv[x] for x in elems(A)]
    a2, b2 = min(pre), max(pre)
    return mask_of(model.perm[i] for i in range(a2, b2 + 1))


def f4_members(model: ZLineModel, cap: int = ZLINE_CAP) -> SetFamily:
    return enumerate_members(model.F4, cap)


def check_prop4(model: ZLineModel, cap: int = ZLINE_CAP) -> Report:
    """Exhaustive check that every member of ``F4`` equals ``hull1 & hull2``.

    Members convex in neither ``G1`` nor ``G2`` are counted and the first
    few kept as examples, since they are the only ones where the claim says
    something beyond convexity.
    """
    rep = Report("prop4", details={"window_size": model.window_size, "perm": list(model.perm)})
    with rep.timed():
        ok = member_array(model.F4, cap)
        t1, t2 = model.G1.table(cap), model.G2.table(cap)
        masks = model.space.all_masks
        bad = ok & ((t1 & t2) != masks)
        neither = ok & (t1 != masks) & (t2 != masks)
        rep.counts["subsets"] = int(masks.size)
        rep.counts["members"] = int(ok.sum())
        rep.counts["in_neither"] = int(neither.sum())
        rep.counts["violations"] = int(bad.sum())
        rep.details["neither_examples"] = [elems(int(A)) for A in np.flatnonzero(neither)[:5]]
        for A in np.flatnonzero(bad)[:10]:
            A = int(A)
            rep.fail({"A": elems(A), "pair_hull": elems(int(t1[A] & t2[A]))})
    return rep

