"""Bit-mask helpers. An element set over ``0..N-1`` is a plain ``int``."""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Iterator

ElemSet = int


def mask_of(ids: Iterable[int]) -> ElemSet:
    m = 0
    for i in ids:
        m |= 1 << int(i)
    return m


def elems(mask: ElemSet) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def popcount(mask: ElemSet) -> int:
    return bin(mask).count("1")


def is_subset(a: ElemSet, b: ElemSet) -> bool:
    return a & ~b == 0


def small_subsets(ids: list[int], k: int) -> Iterator[ElemSet]:
    """All subsets of ``ids`` with at most ``k`` elements, the empty set first."""
    for r in range(min(k, len(ids)) + 1):
        for combo in combinations(ids, r):
            yield mask_of(combo)


def submasks(mask: ElemSet) -> Iterator[ElemSet]:
    """Every subset of ``mask`` (including 0 and ``mask`` itself)."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def canonical_key(mask: ElemSet) -> tuple[int, list[int]]:
    return (popcount(mask), elems(mask))


def fmt(mask: ElemSet) -> str:
    return "{" + ",".join(map(str, elems(mask))) + "}"
