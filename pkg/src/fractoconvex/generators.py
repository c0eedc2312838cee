"""Seeded random convexities, fractoconvexities and expressions for sweeps."""

from __future__ import annotations

import random
from typing import Sequence

from .bits import ElemSet, elems, mask_of
from .convexity import Convexity, GroundSpace, make_convexity
from .expr import Expr, Frac, Join, Meet
from .fracto import Block, Fractoconvexity


def interval_base(space: GroundSpace, order: Sequence[int] | None = None) -> dict[ElemSet, ElemSet]:
    """Intervals of a linear order (identity order by default): ``h(B)`` is everything between ``min B`` and ``max B``."""
    order = list(range(space.size)) if order is None else list(order)
    pos = {x: i for i, x in enumerate(order)}
    table = {}
    for B in space.small_sets:
        ids = elems(B)
        if len(ids) >= 2:
            lo = min(pos[x] for x in ids)
            hi = max(pos[x] for x in ids)
            table[B] = mask_of(order[lo : hi + 1])
    return table


def random_base(space: GroundSpace, rng: random.Random, p: float = 0.25) -> dict[ElemSet, ElemSet]:
    table = {}
    for B in space.small_sets:
        if bin(B).count("1") >= 2:
            extra = mask_of(x for x in range(space.size) if rng.random() < p)
            table[B] = B | extra
    return table


def random_convexity(space: GroundSpace, rng: random.Random, id: str, p: float | None = None) -> Convexity:
    if p is None:
        p = rng.choice([0.05, 0.1, 0.2, 0.3])
    return make_convexity(space, random_base(space, rng, p), id)


def random_convexities(
    space: GroundSpace, k: int, rng: random.Random, prefix: str = "G", tries: int = 100
) -> list[Convexity]:
    """``k`` random convexities with pairwise different families."""
    out: list[Convexity] = []
    fams = set()
    for _ in range(tries * k):
        if len(out) == k:
            break
        c = random_convexity(space, rng, f"{prefix}{len(out) + 1}")
        fam = c.family()
        if fam not in fams:
            fams.add(fam)
            out.append(c)
    if len(out) < k:
        raise RuntimeError(f"could not draw {k} distinct convexities on {space}")
    return out


def random_block(convs: Sequence[Convexity], rng: random.Random) -> Block:
    size = rng.randint(1, len(convs))
    members = rng.sample(list(convs), size)
    return Block(tuple(members), rng.randint(1, size))


def random_fracto(convs: Sequence[Convexity], rng: random.Random, max_blocks: int = 3) -> Fractoconvexity:
    return Fractoconvexity(tuple(random_block(convs, rng) for _ in range(rng.randint(1, max_blocks))))


def random_expr(rng: random.Random, ids: Sequence[str], depth: int = 4) -> Expr:
    if depth == 0 or rng.random() < 0.35:
        k = rng.randint(1, min(4, len(ids)))
        chosen = tuple(rng.sample(list(ids), k))
        return Frac(rng.randint(1, k), chosen)
    op = Join if rng.random() < 0.5 else Meet
    return op(random_expr(rng, ids, depth - 1), random_expr(rng, ids, depth - 1))


def random_perm(n: int, rng: random.Random) -> list[int]:
    perm = list(range(n))
    rng.shuffle(perm)
    return perm
