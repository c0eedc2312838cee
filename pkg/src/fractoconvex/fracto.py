"""Fractoconvexities: threshold blocks over convexities, joined per small subset.

A block ``(M, m)`` *serves* a small set ``B <= A`` when at least ``m`` of the
convexities in ``M`` keep ``hull(B)`` inside ``A``.  ``A`` belongs to a
fractoconvexity when every ``B <= A`` with ``|B| <= n`` is served by some
block.  Join concatenates blocks; meet is built structurally from the
full-block normal form, so both stay exact at the level of individual
``B`` and not merely as families.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .bits import ElemSet, elems, is_subset, small_subsets
from .convexity import Convexity, GroundSpace, SetFamily, intersect_convexities
from .errors import ArityError, DuplicateId, EmptyList, SpaceMismatch


def _sorted_members(convs: Iterable[Convexity]) -> tuple[Convexity, ...]:
    seen: dict[str, Convexity] = {}
    for c in convs:
        prev = seen.get(c.id)
        if prev is not None and prev is not c:
            raise DuplicateId(f"two different convexities share the id {c.id!r}")
        seen[c.id] = c
    return tuple(seen[k] for k in sorted(seen))


@dataclass(frozen=True)
class Block:
    members: tuple[Convexity, ...]
    threshold: int

    def __post_init__(self):
        members = self.members
        ids = [c.id for c in members]
        if len(set(ids)) != len(ids):
            raise DuplicateId(f"repeated convexity id in block {ids}")
        if not members:
            raise EmptyList("a block needs at least one convexity")
        if not 1 <= self.threshold <= len(members):
            raise ArityError(f"threshold {self.threshold} outside 1..{len(members)}")
        space = members[0].space
        if any(c.space != space for c in members):
            raise SpaceMismatch("block mixes convexities from different spaces")
        object.__setattr__(self, "members", tuple(sorted(members, key=lambda c: c.id)))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.members)

    @property
    def space(self) -> GroundSpace:
        return self.members[0].space

    @property
    def full(self) -> bool:
        return self.threshold == len(self.members)

    def __str__(self):
        return f"{self.threshold}/{{{','.join(self.ids)}}}"


@dataclass(frozen=True)
class Fractoconvexity:
    """A join of blocks.  ``extensional_only`` marks results that match the
    intended family but not its per-``B`` serving conditions."""

    blocks: tuple[Block, ...]
    extensional_only: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not self.blocks:
            raise EmptyList("a fractoconvexity needs at least one block")
        space = self.blocks[0].space
        if any(b.space != space for b in self.blocks):
            raise SpaceMismatch("blocks live on different ground spaces")
        object.__setattr__(self, "blocks", tuple(self.blocks))

    @property
    def space(self) -> GroundSpace:
        return self.blocks[0].space

    @property
    def convexities(self) -> tuple[Convexity, ...]:
        return _sorted_members(c for b in self.blocks for c in b.members)

    def __str__(self):
        return " v ".join(str(b) for b in self.blocks)

    def __contains__(self, A: ElemSet) -> bool:
        return member(self, A)


def frac(threshold: int, convs: Sequence[Convexity], check_distinct: bool = True) -> Fractoconvexity:
    """The fractoconvexity ``threshold/{convs}``.

    With ``check_distinct`` the convexities are also required to generate
    pairwise different families whenever the space is small enough to
    enumerate; otherwise only the ids are compared.
    """
    block = Block(tuple(convs), threshold)
    if check_distinct and block.space.enumerable():
        seen: dict[SetFamily, str] = {}
        for c in block.members:
            fam = c.family()
            if fam in seen:
                raise DuplicateId(f"{c.id!r} and {seen[fam]!r} denote the same convexity")
            seen[fam] = c.id
    return Fractoconvexity((block,))


def multi(convs: Sequence[Convexity], check_distinct: bool = True) -> Fractoconvexity:
    """The multiconvexity over ``convs`` (all of them must keep each hull inside)."""
    return frac(len(convs), convs, check_distinct)


# --- membership -----------------------------------------------------------

def served(F: Fractoconvexity, B: ElemSet, A: ElemSet) -> bool:
    """Whether some block of ``F`` keeps enough hulls of ``B`` inside ``A``."""
    for blk in F.blocks:
        need = blk.threshold
        for c in blk.members:
            if is_subset(c.closure[B], A):
                need -= 1
                if need == 0:
                    return True
    return False


def member(F: Fractoconvexity, A: ElemSet) -> bool:
    space = F.space
    space.check(A)
    return all(served(F, B, A) for B in small_subsets(elems(A), space.arity))


def is_multiconvex(convs: Sequence[Convexity], A: ElemSet) -> bool:
    """Every small ``B <= A`` has the union of all its hulls inside ``A``."""
    if not convs:
        raise EmptyList("at least one convexity is required")
    space = convs[0].space
    if any(c.space != space for c in convs):
        raise SpaceMismatch("convexities live on different ground spaces")
    space.check(A)
    for B in small_subsets(elems(A), space.arity):
        for c in convs:
            if not is_subset(c.closure[B], A):
                return False
    return True


class _Inside:
    """Memo of ``hull_c(B) <= A`` over all ``A``, for one sweep."""

    def __init__(self, masks: np.ndarray):
        self.masks = masks
        self.memo: dict[tuple[int, ElemSet], np.ndarray] = {}

    def __call__(self, c: Convexity, B: ElemSet) -> np.ndarray:
        key = (id(c), B)
        arr = self.memo.get(key)
        if arr is None:
            h = c.closure[B]
            arr = (self.masks & h) == h
            self.memo[key] = arr
        return arr


def _served_array(F: Fractoconvexity, B: ElemSet, inside: _Inside) -> np.ndarray:
    out = np.zeros(inside.masks.shape, dtype=bool)
    for blk in F.blocks:
        if blk.full:
            ok = np.ones(inside.masks.shape, dtype=bool)
            for c in blk.members:
                ok &= inside(c, B)
        else:
            count = np.zeros(inside.masks.shape, dtype=np.int16)
            for c in blk.members:
                count += inside(c, B)
            ok = count >= blk.threshold
        out |= ok
    return out


def served_array(F: Fractoconvexity, B: ElemSet, cap: int | None = None) -> np.ndarray:
    """``out[A]`` is ``served(F, B, A)`` for every subset ``A`` of the space."""
    F.space.require_enumerable(cap)
    return _served_array(F, B, _Inside(F.space.all_masks))


def member_array(F: Fractoconvexity, cap: int | None = None) -> np.ndarray:
    """``out[A]`` is ``member(F, A)`` for every subset ``A`` of the space."""
    space = F.space
    space.require_enumerable(cap)
    masks = space.all_masks
    inside = _Inside(masks)
    ok = np.ones(masks.shape, dtype=bool)
    for B in space.small_sets:
        contains_b = (masks & B) == B
        ok &= ~contains_b | _served_array(F, B, inside)
    return ok


def enumerate_members(F: Fractoconvexity, cap: int | None = None) -> SetFamily:
    return SetFamily.from_bool(member_array(F, cap))


def _same_space(F1: Fractoconvexity, F2: Fractoconvexity) -> None:
    if F1.space != F2.space:
        raise SpaceMismatch(f"{F1.space} vs {F2.space}")


def family_equal(F1: Fractoconvexity, F2: Fractoconvexity, cap: int | None = None) -> bool:
    _same_space(F1, F2)
    return bool(np.array_equal(member_array(F1, cap), member_array(F2, cap)))


def per_b_equivalent(F1: Fractoconvexity, F2: Fractoconvexity, cap: int | None = None) -> bool:
    """Representation-level equality: for every ``A`` and small ``B <= A``,
    ``B`` is served by ``F1`` exactly when it is served by ``F2``."""
    _same_space(F1, F2)
    space = F1.space
    space.require_enumerable(cap)
    masks = space.all_masks
    inside = _Inside(masks)
    for B in space.small_sets:
        contains_b = (masks & B) == B
        diff = _served_array(F1, B, inside) != _served_array(F2, B, inside)
        if np.any(diff & contains_b):
            return False
    return True


# --- algebra --------------------------------------------------------------

def join(F1: Fractoconvexity, F2: Fractoconvexity) -> Fractoconvexity:
    _same_space(F1, F2)
    blocks = list(dict.fromkeys(F1.blocks + F2.blocks))
    _sorted_members(c for b in blocks for c in b.members)
    return Fractoconvexity(tuple(blocks), F1.extensional_only or F2.extensional_only)


def _minimal(sets: Iterable[frozenset]) -> list[frozenset]:
    """Drop every set that strictly contains another one; dedupe."""
    uniq = sorted(set(sets), key=lambda s: (len(s), sorted(c.id for c in s)))
    kept: list[frozenset] = []
    for s in uniq:
        if not any(k <= s for k in kept):
            kept.append(s)
    return kept


def _full_sets(F: Fractoconvexity) -> list[frozenset]:
    out = []
    for blk in F.blocks:
        for omega in combinations(blk.members, blk.threshold):
            out.append(frozenset(omega))
    return _minimal(out)


def _from_full_sets(sets: Sequence[frozenset], extensional_only: bool) -> Fractoconvexity:
    blocks = tuple(Block(tuple(s), len(s)) for s in sets)
    return Fractoconvexity(blocks, extensional_only)


def normalize(F: Fractoconvexity) -> Fractoconvexity:
    """Rewrite ``F`` as a join of full blocks, dropping blocks absorbed by smaller ones."""
    return _from_full_sets(_full_sets(F), F.extensional_only)


def meet(F1: Fractoconvexity, F2: Fractoconvexity) -> Fractoconvexity:
    """Set intersection of the two families, as a full-block join.

    A conjunction of two full blocks is the full block over the union of
    their convexities, so the per-``B`` serving condition distributes exactly.
    """
    _same_space(F1, F2)
    _sorted_members(F1.convexities + F2.convexities)
    unions = [a | b for a in _full_sets(F1) for b in _full_sets(F2)]
    return _from_full_sets(_minimal(unions), F1.extensional_only or F2.extensional_only)


_INTERSECTIONS: dict[tuple[int, ...], tuple[tuple[Convexity, ...], Convexity]] = {}


def _shared_intersection(members: Sequence[Convexity]) -> Convexity:
    # one object per member tuple, so joins of simplified results agree on ids;
    # the stored tuple keeps the inputs alive and their id() keys unique
    key = tuple(id(c) for c in members)
    hit = _INTERSECTIONS.get(key)
    if hit is None:
        hit = (tuple(members), intersect_convexities(members))
        _INTERSECTIONS[key] = hit
    return hit[1]


def simplify_prop1(F: Fractoconvexity) -> Fractoconvexity:
    """Replace each full block by the single intersection convexity of its members.

    For a single block the family is unchanged.  The intersection hull of a
    small set can be larger than the union of the member hulls, so each
    block becomes harder to serve; inside a join this can drop members, and
    the result is only guaranteed to be a subfamily of ``F``.  Hence the
    ``extensional_only=True`` flag.
    """
    blocks = []
    for s in _full_sets(F):
        members = sorted(s, key=lambda c: c.id)
        if len(members) == 1:
            blocks.append(Block((members[0],), 1))
        else:
            blocks.append(Block((_shared_intersection(members),), 1))
    return Fractoconvexity(tuple(dict.fromkeys(blocks)), extensional_only=True)
