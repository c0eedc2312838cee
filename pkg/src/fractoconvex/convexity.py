"""Finite ground spaces, n-ary convexities and their hull operators.

A convexity is given by a *base* table: for every subset ``B`` with
``|B| <= n`` a superset ``h(B)``.  The table need not be closed; the
convexity it generates is the family of sets ``A`` with ``h(B) <= A`` for
every small ``B <= A``, and the hull of ``A`` is the least such superset.

Small spaces (``size`` at most the enumeration cap) also get a numpy table
holding the hull of every one of the ``2**size`` subsets, which is what the
exhaustive checks run on.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Callable, Iterable, Iterator, Mapping, Sequence

import numpy as np

from .bits import ElemSet, canonical_key, elems, fmt, is_subset, mask_of, popcount, small_subsets
from .errors import (
    EmptyList,
    ExtensivityViolation,
    MissingEntry,
    OutOfRange,
    SpaceMismatch,
    SpaceTooLarge,
)

DEFAULT_CAP = 20

BaseHull = Mapping[ElemSet, ElemSet]


def default_cap() -> int:
    """Enumeration cap, overridable through ``FRACTO_CAP``."""
    env = os.environ.get("FRACTO_CAP")
    return int(env) if env else DEFAULT_CAP


def _resolve_cap(cap: int | None) -> int:
    return default_cap() if cap is None else cap


@dataclass(frozen=True)
class GroundSpace:
    """Elements ``0..size-1`` together with the arity ``n`` of the convexities on it."""

    size: int
    arity: int

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"ground space needs at least one element, got {self.size}")
        if not 1 <= self.arity <= self.size:
            raise ValueError(f"arity must lie in 1..{self.size}, got {self.arity}")

    @property
    def full(self) -> ElemSet:
        return (1 << self.size) - 1

    def check(self, A: ElemSet) -> ElemSet:
        if A < 0 or A >> self.size:
            raise OutOfRange(f"{fmt(A) if A >= 0 else A} is not a subset of 0..{self.size - 1}")
        return A

    @cached_property
    def small_sets(self) -> tuple[ElemSet, ...]:
        """All subsets of size at most ``arity``, smallest first."""
        return tuple(small_subsets(list(range(self.size)), self.arity))

    def enumerable(self, cap: int | None = None) -> bool:
        return self.size <= _resolve_cap(cap)

    def require_enumerable(self, cap: int | None = None) -> None:
        cap = _resolve_cap(cap)
        if self.size > cap:
            raise SpaceTooLarge(f"2^{self.size} subsets exceed the enumeration cap 2^{cap}")

    @cached_property
    def all_masks(self) -> np.ndarray:
        return np.arange(1 << self.size, dtype=np.int64)


def tabulate(space: GroundSpace, segment: Callable[[list[int]], Iterable[int]]) -> dict[ElemSet, ElemSet]:
    """Build a base table by calling ``segment(ids)`` on every subset of size 2..n."""
    table = {}
    for B in space.small_sets:
        ids = elems(B)
        if len(ids) >= 2:
            table[B] = mask_of(segment(ids)) | B
    return table


def _close(A: ElemSet, gen: Mapping[ElemSet, ElemSet], n: int) -> ElemSet:
    """Least superset of ``A`` closed under ``gen`` on its subsets of size <= n.

    Worklist form: a subset is expanded when its last element (in processing
    order) is popped, so each small subset of the result is visited once.
    """
    cur = A
    queue = elems(A)
    done: list[int] = []
    while queue:
        x = queue.pop()
        bx = 1 << x
        grown = 0
        for r in range(min(n - 1, len(done)) + 1):
            for rest in combinations(done, r):
                B = bx | mask_of(rest)
                grown |= gen.get(B, B)
        done.append(x)
        new = grown & ~cur
        if new:
            cur |= new
            queue.extend(elems(new))
    return cur


class Convexity:
    """An n-ary convexity on a finite ground space.

    ``closure`` maps every subset ``B`` with ``|B| <= n`` to its hull.  Build
    instances with :func:`make_convexity`; the constructor trusts its input.
    """

    def __init__(self, space: GroundSpace, base: BaseHull, closure: Mapping[ElemSet, ElemSet], id: str):
        self.space = space
        self.base = dict(base)
        self.closure = dict(closure)
        self.id = id
        self._table: np.ndarray | None = None

    def __repr__(self):
        return f"Convexity({self.id!r}, size={self.space.size}, arity={self.space.arity})"

    def hull(self, A: ElemSet) -> ElemSet:
        self.space.check(A)
        if self._table is not None:
            return int(self._table[A])
        if A in self.closure:
            return self.closure[A]
        return _close(A, self.closure, self.space.arity)

    def is_convex(self, A: ElemSet) -> bool:
        self.space.check(A)
        for B in small_subsets(elems(A), self.space.arity):
            if not is_subset(self.closure.get(B, B), A):
                return False
        return True

    def table(self, cap: int | None = None) -> np.ndarray:
        """Hull of every subset, indexed by bit mask."""
        if self._table is None:
            self.space.require_enumerable(cap)
            masks = self.space.all_masks
            step = masks.copy()
            for B, h in self.closure.items():
                step[(masks & B) == B] |= h
            cur = step
            while True:
                nxt = step[cur]
                if np.array_equal(nxt, cur):
                    break
                cur = nxt
            cur = cur.copy()
            # small sets report their memoised hull verbatim
            for B, h in self.closure.items():
                cur[B] = h
            self._table = cur
        return self._table

    def convex_mask(self, cap: int | None = None) -> np.ndarray:
        """Boolean array: ``out[A]`` is true iff ``A`` is convex."""
        return self.table(cap) == self.space.all_masks

    def family(self, cap: int | None = None) -> "SetFamily":
        return SetFamily.from_bool(self.convex_mask(cap))


class SetFamily:
    """An extensional family of element sets in canonical order (size, then ids)."""

    __slots__ = ("_members", "_set")

    def __init__(self, members: Iterable[ElemSet] = ()):
        s = frozenset(int(m) for m in members)
        self._set = s
        self._members = tuple(sorted(s, key=canonical_key))

    @classmethod
    def from_bool(cls, flags: np.ndarray) -> "SetFamily":
        return cls(np.flatnonzero(flags).tolist())

    def __iter__(self) -> Iterator[ElemSet]:
        return iter(self._members)

    def __len__(self):
        return len(self._members)

    def __contains__(self, A):
        return A in self._set

    def __eq__(self, other):
        if isinstance(other, SetFamily):
            return self._set == other._set
        return NotImplemented

    def __hash__(self):
        return hash(self._set)

    def __and__(self, other: "SetFamily") -> "SetFamily":
        return SetFamily(self._set & other._set)

    def __or__(self, other: "SetFamily") -> "SetFamily":
        return SetFamily(self._set | other._set)

    def __sub__(self, other: "SetFamily") -> "SetFamily":
        return SetFamily(self._set - other._set)

    def __le__(self, other: "SetFamily") -> bool:
        return self._set <= other._set

    def __ge__(self, other: "SetFamily") -> bool:
        return self._set >= other._set

    def __repr__(self):
        inner = ", ".join(fmt(m) for m in self._members[:8])
        more = ", ..." if len(self) > 8 else ""
        return f"SetFamily([{inner}{more}], n={len(self)})"

    def to_lists(self) -> list[list[int]]:
        return [elems(m) for m in self._members]


@dataclass
class AxiomReport:
    extensive: bool = True
    monotone: bool = True
    idempotent: bool = True
    n_ary: bool = True
    exhaustive: bool = True
    witnesses: list[tuple[str, tuple[ElemSet, ...]]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.extensive and self.monotone and self.idempotent and self.n_ary

    def fail(self, prop: str, *sets: int) -> None:
        setattr(self, prop, False)
        self.witnesses.append((prop, tuple(int(s) for s in sets)))


def make_convexity(space: GroundSpace, base: BaseHull, id: str) -> Convexity:
    """Validate a base table and close it into a convexity.

    Missing ``∅`` and singleton entries default to themselves; every subset of
    size 2..n must be present.
    """
    table: dict[ElemSet, ElemSet] = {}
    for B, h in base.items():
        space.check(B)
        space.check(h)
        if popcount(B) > space.arity:
            raise ValueError(f"base entry {fmt(B)} is larger than the arity {space.arity}")
        table[B] = h
    if table.get(0, 0) != 0:
        raise ExtensivityViolation(f"hull of the empty set must be empty, got {fmt(table[0])}")
    for B in space.small_sets:
        if B not in table:
            if popcount(B) >= 2:
                raise MissingEntry(f"convexity {id!r}: no base entry for {fmt(B)}")
            table[B] = B
        elif not is_subset(B, table[B]):
            raise ExtensivityViolation(f"convexity {id!r}: {fmt(B)} is not contained in h(B) = {fmt(table[B])}")
    closure = {B: _close(B, table, space.arity) for B in space.small_sets}
    return Convexity(space, table, closure, id)


def hull(conv: Convexity, A: ElemSet) -> ElemSet:
    return conv.hull(A)


def is_convex(conv: Convexity, A: ElemSet) -> bool:
    return conv.is_convex(A)


def enumerate_convex(conv: Convexity, cap: int | None = None) -> SetFamily:
    return conv.family(cap)


def _shared_space(convs: Sequence[Convexity]) -> GroundSpace:
    if not convs:
        raise EmptyList("at least one convexity is required")
    space = convs[0].space
    for c in convs[1:]:
        if c.space != space:
            raise SpaceMismatch(f"{c.id!r} lives on {c.space}, expected {space}")
    return space


def intersect_convexities(convs: Sequence[Convexity], id: str | None = None) -> Convexity:
    """The convexity whose members are convex in every input convexity."""
    space = _shared_space(convs)
    if id is None:
        id = "&".join(c.id for c in convs)
    gen = {B: 0 for B in space.small_sets}
    for c in convs:
        for B in space.small_sets:
            gen[B] |= c.closure[B]
    closure = {B: _close(B, gen, space.arity) for B in space.small_sets}
    return Convexity(space, gen, closure, id)


def lift_arity(conv: Convexity, arity: int, id: str | None = None) -> Convexity:
    """Same family, viewed on a space of higher arity (an n-ary convexity is m-ary for m >= n)."""
    if arity < conv.space.arity:
        raise ValueError("lifting can only raise the arity")
    space = GroundSpace(conv.space.size, arity)
    base = {B: conv.hull(B) for B in space.small_sets}
    return make_convexity(space, base, id or conv.id)


def check_axioms(
    conv: Convexity,
    cap: int | None = None,
    samples: Sequence[ElemSet] | None = None,
    max_witnesses: int = 5,
) -> AxiomReport:
    """Check extensivity, monotonicity, idempotence of the hull and n-arity of the family.

    Exhaustive when the space is enumerable.  Larger spaces need ``samples``;
    each sample ``A`` is then checked together with ``A`` plus one element.
    """
    space = conv.space
    if space.enumerable(cap):
        return _check_axioms_exhaustive(conv, cap, max_witnesses)
    if samples is None:
        space.require_enumerable(cap)
    rep = AxiomReport(exhaustive=False)
    for A in samples:
        h = conv.hull(A)
        if not is_subset(A, h):
            rep.fail("extensive", A, h)
        if conv.hull(h) != h:
            rep.fail("idempotent", A, h)
        if conv.is_convex(A) != (h == A):
            rep.fail("n_ary", A)
        for x in range(space.size):
            bigger = A | (1 << x)
            if bigger != A and not is_subset(h, conv.hull(bigger)):
                rep.fail("monotone", A, bigger)
                break
    return rep


def _check_axioms_exhaustive(conv: Convexity, cap: int | None, max_witnesses: int) -> AxiomReport:
    rep = AxiomReport()
    space = conv.space
    masks = space.all_masks
    t = conv.table(cap)

    for A in np.flatnonzero((masks & ~t) != 0)[:max_witnesses]:
        rep.fail("extensive", A, t[A])
    for A in np.flatnonzero(t[t] != t)[:max_witnesses]:
        rep.fail("idempotent", A, t[A])
    # monotone on covering pairs A < A+x suffices by transitivity
    for x in range(space.size):
        up = masks | (1 << x)
        for A in np.flatnonzero((t & ~t[up]) != 0)[:max_witnesses]:
            rep.fail("monotone", A, int(A) | (1 << x))
    small_ok = np.ones(masks.shape, dtype=bool)
    for B, h in conv.closure.items():
        small_ok &= ((masks & B) != B) | ((masks & h) == h)
    for A in np.flatnonzero(small_ok != (t == masks))[:max_witnesses]:
        rep.fail("n_ary", A)
    return rep
