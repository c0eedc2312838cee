"""Cone convexities on a discretised 2-sphere.

Every interior point ``c`` of the unit ball induces a binary convexity on the
sphere: the segment between ``x1`` and ``x2`` is the arc cut out by the
planar cone with vertex ``c`` over the chord ``[x1, x2]``, or just
``{x1, x2}`` when ``c`` lies on the line through them.  On a finite sample
of the sphere a point belongs to the arc when the forward ray from ``c``
through it passes within ``tol`` of the chord.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import cKDTree

from .bits import ElemSet, elems, is_subset, mask_of, popcount
from .convexity import (
    Convexity,
    GroundSpace,
    check_axioms,
    intersect_convexities,
    lift_arity,
    make_convexity,
)
from .errors import EmptySubspace, NumericalFailure, OutOfRange, UnknownCenter
from .fracto import frac, member
from .independence import independence_domain, is_conically_independent, pair_hull, verify_prop3
from .report import Report

# fraction of the median nearest-neighbour chord used when no tol is given
DEFAULT_TOL_FACTOR = 0.5
REGULAR_MARGIN = 1e-9

# geometry used by the bundled example runs: centers on a horizontal chord
# above the equator, restricted examples cut at z = -0.2
EXAMPLE_CENTERS = ((-0.4, 0.0, 0.3), (0.4, 0.0, 0.3))
EXAMPLE_CUT = -0.2


def fibonacci_sphere(n: int) -> np.ndarray:
    i = np.arange(n) + 0.5
    z = 1.0 - 2.0 * i / n
    r = np.sqrt(1.0 - z * z)
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=1)


def median_nn_chord(points: np.ndarray) -> float:
    dist, _ = cKDTree(points).query(points, 2)
    return float(np.median(dist[:, 1]))


def ray_segment_distance(P: np.ndarray, c: np.ndarray, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """Distance from each forward ray ``c + s (p - c)``, ``s >= 0``, to the segment ``[x1, x2]``.

    Minimises a convex quadratic over ``s >= 0, 0 <= t <= 1``: the interior
    stationary point when feasible, otherwise the best of the three edges.
    """
    d = P - c
    e = x2 - x1
    w = c - x1
    a = np.einsum("ij,ij->i", d, d)
    b = d @ e
    ee = e @ e
    p = d @ w
    q = w @ e
    det = a * ee - b * b
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (b * q - ee * p) / det
        t = (a * q - b * p) / det
    inner = (det > 1e-12 * a * ee) & (s >= 0) & (t >= 0) & (t <= 1)
    best = np.full(len(P), np.inf)
    if inner.any():
        v = w + s[inner, None] * d[inner] - t[inner, None] * e
        best[inner] = np.linalg.norm(v, axis=1)
    # edge s = 0: the apex against the chord
    t0 = np.clip(q / ee, 0.0, 1.0)
    best = np.minimum(best, np.linalg.norm(w - t0 * e))
    # edges t = 0, t = 1: chord endpoints against the ray
    for xe in (x1, x2):
        we = c - xe
        se = np.maximum(0.0, -(d @ we) / a)
        best = np.minimum(best, np.linalg.norm(we + se[:, None] * d, axis=1))
    return best


def line_distance(c: np.ndarray, x1: np.ndarray, x2: np.ndarray) -> float:
    e = x2 - x1
    return float(np.linalg.norm(np.cross(c - x1, e)) / np.linalg.norm(e))


def cone_segment(points: np.ndarray, c: np.ndarray, i: int, j: int, tol: float) -> ElemSet:
    if i == j:
        return 1 << i
    x1, x2 = points[i], points[j]
    ends = (1 << i) | (1 << j)
    if line_distance(c, x1, x2) <= tol:
        return ends
    near = np.flatnonzero(ray_segment_distance(points, c, x1, x2) <= tol)
    return mask_of(near) | ends


@dataclass(frozen=True)
class Halfspace:
    """The open halfspace ``{x : normal . x > offset}``."""

    normal: np.ndarray
    offset: float

    @classmethod
    def normalized(cls, normal, offset: float) -> "Halfspace":
        w = np.asarray(normal, dtype=float)
        norm = np.linalg.norm(w)
        return cls(w / norm, float(offset) / norm)

    def contains(self, x: np.ndarray) -> bool:
        return bool(self.normal @ x > self.offset)

    def excludes(self, x: np.ndarray) -> bool:
        return bool(self.normal @ x <= self.offset)


@dataclass
class SphereModel:
    points: np.ndarray
    centers: np.ndarray
    tol: float
    convexities: list[Convexity] = field(repr=False)
    ids: list[str] = field(default_factory=list)

    @property
    def space(self) -> GroundSpace:
        return self.convexities[0].space

    def center_index(self, c) -> int:
        if isinstance(c, (int, np.integer)):
            if not 0 <= c < len(self.centers):
                raise UnknownCenter(f"no center with index {c}")
            return int(c)
        if isinstance(c, str):
            if c not in self.ids:
                raise UnknownCenter(f"no center named {c!r}")
            return self.ids.index(c)
        c = np.asarray(c, dtype=float)
        for k, cc in enumerate(self.centers):
            if np.allclose(cc, c, atol=1e-12):
                return k
        raise UnknownCenter(f"{c.tolist()} is not a registered center")

    def convexity(self, c) -> Convexity:
        return self.convexities[self.center_index(c)]

    def points_of(self, A: ElemSet) -> np.ndarray:
        return self.points[elems(A)]


def robinson_convexity(points: np.ndarray, center: np.ndarray, tol: float, id: str) -> Convexity:
    """Binary cone convexity of ``center`` on the sampled sphere."""
    n = len(points)
    space = GroundSpace(n, min(2, n))
    base = {}
    for i in range(n):
        for j in range(i + 1, n):
            base[(1 << i) | (1 << j)] = cone_segment(points, center, i, j, tol)
    return make_convexity(space, base, id)


def build_sphere(
    points: np.ndarray | int,
    centers: Sequence[Sequence[float]],
    tol: float | None = None,
    ids: Sequence[str] | None = None,
) -> SphereModel:
    if isinstance(points, (int, np.integer)):
        points = fibonacci_sphere(int(points))
    points = np.asarray(points, dtype=float)
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if not np.allclose(np.linalg.norm(points, axis=1), 1.0, atol=1e-9):
        raise ValueError("sphere points must have unit norm")
    if np.any(np.linalg.norm(centers, axis=1) >= 1.0):
        raise ValueError("centers must lie strictly inside the unit ball")
    if tol is None:
        tol = DEFAULT_TOL_FACTOR * median_nn_chord(points) if len(points) > 1 else 0.0
    ids = list(ids) if ids is not None else [f"G{k}" for k in range(len(centers))]
    convs = [robinson_convexity(points, c, tol, cid) for c, cid in zip(centers, ids)]
    return SphereModel(points, centers, float(tol), convs, ids)


def segment_c(model: SphereModel, c, x1: int, x2: int) -> ElemSet:
    k = model.center_index(c)
    n = len(model.points)
    for x in (x1, x2):
        if not 0 <= x < n:
            raise OutOfRange(f"point id {x} outside 0..{n - 1}")
    return cone_segment(model.points, model.centers[k], x1, x2, model.tol)


def is_regular(model: SphereModel, A: ElemSet, c0, c1) -> tuple[bool, Halfspace | None]:
    """Whether an open halfspace holds both centers and misses every point of ``A``.

    Maximises the margin ``delta`` of ``w.c_i - b >= delta`` subject to
    ``w.p <= b`` on ``A`` with ``w`` in the unit box.  The witness is
    re-verified with plain arithmetic before it is returned.
    """
    cs = model.centers[[model.center_index(c0), model.center_index(c1)]]
    return separate(cs, model.points_of(A))


def separate(cs: np.ndarray, pts: np.ndarray) -> tuple[bool, Halfspace | None]:
    # variables: w (3), b, delta ; minimise -delta
    rows = [np.r_[-c, 1.0, 1.0] for c in cs] + [np.r_[p, -1.0, 0.0] for p in pts]
    res = linprog(
        c=[0, 0, 0, 0, -1.0],
        A_ub=np.array(rows),
        b_ub=np.zeros(len(rows)),
        bounds=[(-1, 1)] * 3 + [(-3, 3), (0, 1)],
        method="highs",
    )
    if res.status != 0:
        raise NumericalFailure(f"linear feasibility routine failed: {res.message}")
    delta = -res.fun
    if delta <= REGULAR_MARGIN * 1e-3:
        return False, None
    if delta <= REGULAR_MARGIN:
        raise NumericalFailure(f"separation margin {delta:.3g} too small to decide")
    norm = np.linalg.norm(res.x[:3])
    w = res.x[:3] / norm
    b = res.x[3] / norm
    if len(pts):
        # snap onto the farthest point so the closed side holds exactly
        b = max(b, max(float(w @ p) for p in pts))
    H = Halfspace(w, b)
    if not all(H.contains(c) for c in cs) or not all(H.excludes(p) for p in pts):
        raise NumericalFailure("separating halfspace failed re-verification")
    return True, H


# --- sampling semiconvex sets ------------------------------------------------

def semiconvex_closure(convs: Sequence[Convexity], A: ElemSet, rng: random.Random) -> ElemSet:
    """Grow ``A`` into a member of ``1/{convs}``: while some pair is served by
    no convexity, add its hull under a randomly chosen one."""
    while True:
        pts = elems(A)
        bad = None
        for B in [1 << x for x in pts] + [(1 << x) | (1 << y) for k, x in enumerate(pts) for y in pts[k + 1 :]]:
            if not any(is_subset(c.closure[B], A) for c in convs):
                bad = B
                break
        if bad is None:
            return A
        A |= rng.choice(convs).closure[bad]


def random_halfspace_side(model: SphereModel, cs: np.ndarray, rng: random.Random) -> ElemSet:
    """Points beyond a random plane that keeps ``cs`` strictly on its other side."""
    while True:
        v = np.array([rng.gauss(0, 1) for _ in range(3)])
        v /= np.linalg.norm(v)
        lo = float(np.max(cs @ v))
        b = lo + rng.random() * (1.0 - lo)
        side = np.flatnonzero(model.points @ v >= b)
        if len(side):
            return mask_of(side)


def sample_semiconvex(
    model: SphereModel, convs: Sequence[Convexity], rng: random.Random, cs: np.ndarray
) -> ElemSet:
    """Seeded draw of a member of ``1/{convs}`` beyond a random plane.

    A quarter of the draws are hulls of a <=4-point seed under one convexity;
    the rest start from a union of hulls under different convexities, which
    mostly yields sets convex in none of them.
    """
    region = elems(random_halfspace_side(model, cs, rng))
    if rng.random() < 0.25:
        seed = mask_of(rng.sample(region, min(len(region), rng.randint(1, 4))))
        return rng.choice(list(convs)).hull(seed)
    A = 0
    for c in convs:
        A |= c.hull(mask_of(rng.sample(region, min(len(region), rng.randint(1, 3)))))
    return semiconvex_closure(convs, A, rng)


def build_example1(model: SphereModel, c0=0, c1=1, samples: int = 500, seed: int = 0, max_draws: int = 20000) -> Report:
    """Sampled regular 2-semiconvex sets for two cone convexities must equal
    the intersection of their two hulls."""
    rng = random.Random(seed)
    g0, g1 = model.convexity(c0), model.convexity(c1)
    cs = model.centers[[model.center_index(c0), model.center_index(c1)]]
    F1 = frac(1, [g0, g1], check_distinct=False)
    rep = Report("example1", seed=seed)
    seen: set[ElemSet] = set()
    draws = 0
    with rep.timed():
        while len(seen) < samples and draws < max_draws:
            draws += 1
            A = sample_semiconvex(model, [g0, g1], rng, cs)
            if A in seen:
                continue
            if not member(F1, A):
                rep.fail({"not_semiconvex": elems(A)})
                continue
            ok, H = separate(cs, model.points_of(A))
            if not ok:
                rep.bump("non_regular")
                if pair_hull([g0, g1], A) != A:
                    rep.bump("non_regular_outside_idc")
                continue
            seen.add(A)
            rep.bump("witnesses_verified")
            if pair_hull([g0, g1], A) != A:
                rep.fail({"A": elems(A), "pair_hull": elems(pair_hull([g0, g1], A))})
                rep.bump("violations")
    rep.counts["draws"] = draws
    rep.counts["regular_samples"] = len(seen)
    rep.counts.setdefault("violations", 0)
    rep.counts["in_neither_convexity"] = sum(1 for A in seen if not g0.is_convex(A) and not g1.is_convex(A))
    rep.counts["mean_size_x100"] = int(100 * np.mean([popcount(A) for A in seen])) if seen else 0
    if len(seen) < samples:
        rep.fail({"too_few_samples": len(seen)})
    return rep


# --- restricted convexities, examples 2 and 3 --------------------------------

def _check_halfspace(H: Halfspace, c0: np.ndarray, c1: np.ndarray) -> None:
    if not (H.contains(c0) and H.contains(c1)):
        raise ValueError("the halfspace must contain both centers")
    if abs(H.normal @ (c1 - c0)) > 1e-9:
        raise ValueError("the halfspace must be parallel to the segment [c0, c1]")


def restrict(model: SphereModel, H: Halfspace, centers: Sequence[np.ndarray], ids: Sequence[str]) -> SphereModel:
    """Cone convexities of ``centers`` on the subspace of points outside ``H``.

    The tolerance of the parent model is kept, so the restricted segments
    are the parent segments cut down to the subspace.
    """
    keep = [i for i, p in enumerate(model.points) if H.excludes(p)]
    if not keep:
        raise EmptySubspace("the halfspace contains every sample point")
    sub = model.points[keep]
    convs = [robinson_convexity(sub, np.asarray(c, dtype=float), model.tol, cid) for c, cid in zip(centers, ids)]
    return SphereModel(sub, np.asarray(centers, dtype=float), model.tol, convs, list(ids))


def example_halfspace(cut: float = EXAMPLE_CUT) -> Halfspace:
    """``{z > cut}``: parallel to any horizontal segment of centers above it."""
    return Halfspace(np.array([0.0, 0.0, 1.0]), float(cut))


def lambda_center(c0: np.ndarray, c1: np.ndarray, lam: float) -> np.ndarray:
    return lam * c0 + (1.0 - lam) * c1


def build_example2(
    model: SphereModel, c0, c1, H: Halfspace, k: int = 3, lambdas: Sequence[float] | None = None, seed: int = 0,
    samples: int = 500,
) -> Report:
    """Independence of restricted cone convexities along the segment of centers."""
    p0 = model.centers[model.center_index(c0)]
    p1 = model.centers[model.center_index(c1)]
    _check_halfspace(H, p0, p1)
    rng = random.Random(seed)
    if lambdas is None:
        lambdas = [0.0] if k == 1 else sorted(rng.random() for _ in range(k))
    lambdas = list(lambdas)
    ids = [f"L{i}" for i in range(len(lambdas))]
    sub = restrict(model, H, [lambda_center(p0, p1, lam) for lam in lambdas], ids)
    rep = Report("example2", seed=seed, details={"lambdas": [round(x, 6) for x in lambdas]})
    rep.counts["subspace_points"] = len(sub.points)
    with rep.timed():
        convs = list(sub.convexities)
        if sub.space.enumerable():
            res = independence_domain(convs)
            rep.details["mode"] = "exhaustive"
            rep.counts["members"] = len(res.domain) + len(res.violations)
            for A, ph in res.violations[:10]:
                rep.fail({"A": elems(A), "pair_hull": elems(ph)})
            rep.counts["violations"] = len(res.violations)
        else:
            rep.details["mode"] = "sampled"
            cs = np.asarray(sub.centers)
            seen: set[ElemSet] = set()
            for _ in range(samples * 4):
                if len(seen) >= samples:
                    break
                A = sample_semiconvex(sub, convs, rng, cs)
                seen.add(A)
            bad = [A for A in seen if pair_hull(convs, A) != A]
            rep.counts["members"] = len(seen)
            rep.counts["violations"] = len(bad)
            for A in bad[:10]:
                rep.fail({"A": elems(A), "pair_hull": elems(pair_hull(convs, A))})
    rep.objects["convexities"] = list(sub.convexities)
    return rep


def _half_lambdas(k: int) -> tuple[list[float], list[float]]:
    if k == 1:
        return [0.5], [0.5]
    lo = [0.5 * i / (k - 1) for i in range(k)]
    return lo, [0.5 + x for x in lo]


def build_example3(
    model: SphereModel, c0, c1, H: Halfspace, k_per_half: int = 2, seed: int = 0, max_subset: int = 4,
    tuples: int = 2000,
) -> Report:
    """Multiconvexities over the two halves of the center segment.

    Checks, on the subspace outside ``H``: the hull-step property of the
    midpoint convexity on sampled point tuples, equality of the pair-hull of
    the two multiconvexities with the midpoint hull on every set of at most
    ``max_subset`` points, and the conical scan plus independence for the
    3-ary lift of the pair.
    """
    p0 = model.centers[model.center_index(c0)]
    p1 = model.centers[model.center_index(c1)]
    _check_halfspace(H, p0, p1)
    lo, hi = _half_lambdas(k_per_half)
    lambdas = sorted(set(lo + hi))
    ids = [f"L{i}" for i in range(len(lambdas))]
    sub = restrict(model, H, [lambda_center(p0, p1, lam) for lam in lambdas], ids)
    by_lam = dict(zip(lambdas, sub.convexities))
    mid = by_lam[0.5]
    G1 = intersect_convexities([by_lam[x] for x in lo], id="M1") if len(lo) > 1 else by_lam[lo[0]]
    G2 = intersect_convexities([by_lam[x] for x in hi], id="M2") if len(hi) > 1 else by_lam[hi[0]]

    rep = Report("example3", seed=seed, details={"lambdas_low": lo, "lambdas_high": hi})
    n = len(sub.points)
    rep.counts["subspace_points"] = n
    rng = random.Random(seed)
    with rep.timed():
        # hull-step property of the midpoint convexity
        step_fail = 0
        step_bad: list[list[int]] = []
        for _ in range(tuples):
            k = rng.randint(2, min(6, n)) if n >= 2 else 1
            xs = [rng.randrange(n) for _ in range(k)]
            head = mid.hull(mask_of(xs[:-1]))
            xn = xs[-1]
            reach = 0
            for y in elems(head):
                reach |= mid.hull((1 << y) | (1 << xn))
            if not is_subset(mid.hull(mask_of(xs)), reach):
                step_fail += 1
                if len(step_bad) < 5:
                    step_bad.append(xs)
        # reported only: the discretised hull need not satisfy the hull-step property exactly
        rep.counts["hull_step_tuples"] = tuples
        rep.counts["hull_step_failures"] = step_fail
        rep.details["hull_step_examples"] = step_bad

        # pair-hull of the multiconvexities against the midpoint hull
        eq_fail = 0
        checked = 0
        for r in range(1, min(max_subset, n) + 1):
            for combo in combinations(range(n), r):
                S = mask_of(combo)
                checked += 1
                if G1.hull(S) & G2.hull(S) != mid.hull(S):
                    eq_fail += 1
                    rep.fail({"S": list(combo), "pair_hull": elems(G1.hull(S) & G2.hull(S)), "mid_hull": elems(mid.hull(S))})
        rep.counts["pair_hull_sets"] = checked
        rep.counts["pair_hull_mismatches"] = eq_fail

        # 3-ary lift, conical scan, independence
        L1, L2 = lift_arity(G1, 3, "M1"), lift_arity(G2, 3, "M2")
        scan = is_conically_independent(L1, L2)
        rep.counts["conical_scanned"] = scan.scanned
        rep.details["conical"] = scan.independent
        if not scan.independent:
            w = scan.witness
            rep.fail({"conical": w.point_list, "target": w.target, "missing": list(w.missing)})
            # the conclusion can still be checked directly
            rep.details["lifted_independent"] = independence_domain([L1, L2]).independent
        else:
            p3 = verify_prop3(L1, L2, scan)
            rep.counts["prop3_members"] = p3.counts["members"]
            rep.counts["prop3_failures"] = p3.counts["failures"]
            if not p3.ok:
                rep.fail({"prop3": p3.witnesses[:3]})
    rep.objects["convexities"] = list(sub.convexities) + [G1, G2, L1, L2]
    return rep


def sphere_axioms(model: SphereModel, samples: int = 200, seed: int = 0) -> list[tuple[str, bool]]:
    """Axiom check for every convexity of the model: exhaustive when the
    space is enumerable, otherwise on seeded random subsets."""
    rng = random.Random(seed)
    n = len(model.points)
    sets = [mask_of(rng.sample(range(n), rng.randint(0, min(n, 6)))) for _ in range(samples)]
    return [(c.id, check_axioms(c, samples=sets).ok) for c in model.convexities]
