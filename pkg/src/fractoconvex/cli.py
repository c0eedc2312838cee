"""``fracto`` command line.

Every command prints a JSON report (``status`` is ``pass``, ``fail`` or
``info``) except ``gen``, which prints a space file.  Exit status is 0 for
pass/info, 1 for fail and 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
from typing import Sequence

import numpy as np

from .bits import ElemSet, elems, mask_of
from .convexity import Convexity, GroundSpace, check_axioms, enumerate_convex
from .errors import FractoError, UnknownConvexityId
from .expr import Expr, Frac, Join, evaluate, parse_expr, to_text
from .fracto import Fractoconvexity, enumerate_members, family_equal, member, member_array, normalize, per_b_equivalent
from .independence import (
    describe_witness,
    independence_domain,
    is_conically_independent,
    pair_hull,
    verify_lemma1,
    verify_prop3,
)
from .propcheck import SUITES, run_suite
from .report import Report
from .spacefile import dump_space, load_space, to_json
from .sphere import fibonacci_sphere, median_nn_chord, DEFAULT_TOL_FACTOR
from .zline import check_perm, identity_perm, interleaved_perm, reversal_perm
from .generators import random_perm

AXIOM_SAMPLES = 200


class UsageError(Exception):
    pass


# --- argument helpers -----------------------------------------------------

def parse_set(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--set expects comma-separated integer ids, got {text!r}") from None


def parse_centers(text: str) -> list[list[float]]:
    out = []
    for chunk in text.split(";"):
        try:
            xyz = [float(x) for x in chunk.split(",")]
        except ValueError:
            raise UsageError(f"bad center {chunk!r}") from None
        if len(xyz) != 3:
            raise UsageError(f"a center needs three coordinates, got {chunk!r}")
        out.append(xyz)
    return out


def _need(args: argparse.Namespace, *names: str) -> None:
    for name in names:
        if getattr(args, name.replace("-", "_")) is None:
            raise UsageError(f"{args.command} needs --{name}")


def _space(args: argparse.Namespace) -> tuple[GroundSpace, dict[str, Convexity]]:
    _need(args, "space")
    return load_space(args.space)


def _set(args: argparse.Namespace, space: GroundSpace) -> ElemSet:
    _need(args, "set")
    return space.check(mask_of(parse_set(args.set)))


def _selected(args: argparse.Namespace, convs: dict[str, Convexity]) -> list[Convexity]:
    if args.ids is None:
        return list(convs.values())
    out = []
    for cid in args.ids.split(","):
        cid = cid.strip()
        if cid not in convs:
            raise UnknownConvexityId(f"unknown convexity id {cid!r}")
        out.append(convs[cid])
    return out


def _fracto(args: argparse.Namespace, text: str | None, convs: dict[str, Convexity], flag: str = "expr") -> Fractoconvexity:
    if text is None:
        raise UsageError(f"{args.command} needs --{flag}")
    return evaluate(parse_expr(text), convs)


def fracto_expr(F: Fractoconvexity) -> Expr:
    node: Expr | None = None
    for blk in F.blocks:
        leaf = Frac(blk.threshold, blk.ids)
        node = leaf if node is None else Join(node, leaf)
    return node


# --- commands -------------------------------------------------------------

def cmd_validate(args) -> Report:
    space, convs = _space(args)
    rep = Report("validate", seed=args.seed)
    rep.counts["convexities"] = len(convs)
    rng = random.Random(args.seed)
    samples = None
    if not space.enumerable(args.cap):
        samples = [mask_of(rng.sample(range(space.size), rng.randint(0, min(space.size, 6)))) for _ in range(AXIOM_SAMPLES)]
        rep.details["mode"] = f"sampled ({AXIOM_SAMPLES} sets)"
    else:
        rep.details["mode"] = "exhaustive"
    for cid, c in convs.items():
        ax = check_axioms(c, args.cap, samples)
        rep.bump("checked")
        if not ax.ok:
            rep.fail({"id": cid, "witnesses": [[p, [elems(s) for s in sets]] for p, sets in ax.witnesses]})
    return rep


def cmd_hull(args) -> Report:
    space, convs = _space(args)
    A = _set(args, space)
    chosen = _selected(args, convs)
    rep = Report("hull", status="info", seed=args.seed)
    rep.details["set"] = elems(A)
    rep.details["hulls"] = {c.id: elems(c.hull(A)) for c in chosen}
    if len(chosen) > 1:
        rep.details["pair_hull"] = elems(pair_hull(chosen, A))
    return rep


def cmd_member(args) -> Report:
    space, convs = _space(args)
    F = _fracto(args, args.expr, convs)
    A = _set(args, space)
    rep = Report("member", status="info", seed=args.seed)
    rep.details = {"expr": to_text(parse_expr(args.expr), args.unicode), "set": elems(A), "member": member(F, A)}
    return rep


def cmd_enumerate(args) -> Report:
    space, convs = _space(args)
    rep = Report("enumerate", status="info", seed=args.seed)
    if args.expr is not None:
        fam = enumerate_members(_fracto(args, args.expr, convs), args.cap)
        rep.details["expr"] = to_text(parse_expr(args.expr), args.unicode)
    else:
        chosen = _selected(args, convs)
        if len(chosen) != 1:
            raise UsageError("enumerate needs --expr or a single --ids convexity")
        fam = enumerate_convex(chosen[0], args.cap)
        rep.details["id"] = chosen[0].id
    rep.counts["members"] = len(fam)
    rep.details["members"] = fam.to_lists()
    return rep


def cmd_eq(args) -> Report:
    space, convs = _space(args)
    F1 = _fracto(args, args.e1, convs, "e1")
    F2 = _fracto(args, args.e2, convs, "e2")
    rep = Report("eq", seed=args.seed)
    same = family_equal(F1, F2, args.cap)
    rep.details["family_equal"] = same
    rep.details["per_b_equivalent"] = per_b_equivalent(F1, F2, args.cap)
    if not same:
        diff = np.flatnonzero(member_array(F1, args.cap) != member_array(F2, args.cap))
        A = int(diff[0])
        rep.fail({"A": elems(A), "e1": member(F1, A), "e2": member(F2, A)})
    return rep


def cmd_normalize(args) -> Report:
    space, convs = _space(args)
    F = _fracto(args, args.expr, convs)
    N = normalize(F)
    rep = Report("normalize", status="info", seed=args.seed)
    rep.counts["blocks"] = len(N.blocks)
    rep.details["expr"] = to_text(parse_expr(args.expr), args.unicode)
    rep.details["normal_form"] = to_text(fracto_expr(N), args.unicode)
    return rep


def cmd_independence(args) -> Report:
    space, convs = _space(args)
    chosen = _selected(args, convs)
    res = independence_domain(chosen, args.cap)
    rep = Report("independence", seed=args.seed)
    rep.details["ids"] = [c.id for c in chosen]
    rep.counts["members"] = len(res.domain) + len(res.violations)
    rep.counts["domain"] = len(res.domain)
    rep.counts["violations"] = len(res.violations)
    for A, ph in res.violations:
        rep.fail({"A": elems(A), "pair_hull": elems(ph)})
    return rep


def cmd_conical(args) -> Report:
    space, convs = _space(args)
    chosen = _selected(args, convs)
    if len(chosen) != 2:
        raise UsageError(f"conical needs exactly two convexities, got {len(chosen)} (use --ids)")
    G1, G2 = chosen
    scan = is_conically_independent(G1, G2, args.cap, args.min_prefix)
    rep = Report("conical", seed=args.seed)
    rep.details["ids"] = [G1.id, G2.id]
    rep.details["min_prefix"] = args.min_prefix
    rep.counts["scanned"] = scan.scanned
    if not scan.independent:
        w = scan.witness
        rep.fail({"point_list": w.point_list, "target": w.target, "missing": list(w.missing), "text": describe_witness(w)})
        return rep
    lem = verify_lemma1(G1, G2, scan, args.cap)
    rep.counts["lemma1_sets"] = lem.counts["sets_3_1"]
    rep.counts["lemma1_failures"] = lem.counts["failures"]
    for w in lem.witnesses:
        rep.fail({"lemma1": w})
    if space.arity == 3:
        p3 = verify_prop3(G1, G2, scan, args.cap)
        rep.counts["prop3_members"] = p3.counts["members"]
        rep.counts["prop3_failures"] = p3.counts["failures"]
        for w in p3.witnesses:
            rep.fail({"prop3": w})
    return rep


def cmd_prop_check(args) -> Report:
    _need(args, "prop")
    seed = 0 if args.seed is None else args.seed
    return run_suite(args.prop, args.trials, seed, max(1, args.jobs))


def gen_zline(args) -> dict:
    _need(args, "size")
    n = args.size
    if n < 2:
        raise UsageError("--size must be at least 2")
    spec = args.perm or "identity"
    named = {"identity": identity_perm, "reversal": reversal_perm, "interleaved": interleaved_perm}
    if spec == "random":
        perm = random_perm(n, random.Random(0 if args.seed is None else args.seed))
    elif spec in named:
        perm = named[spec](n)
    else:
        perm = list(check_perm(parse_set(spec), n))
    return dump_space(
        GroundSpace(n, 2),
        [{"id": "G1", "kind": "interval"}, {"id": "G2", "kind": "permuted_interval", "perm": perm}],
    )


def gen_sphere(args) -> dict:
    _need(args, "points", "centers")
    pts = fibonacci_sphere(args.points)
    if args.seed is not None:
        # a seeded rotation keeps the sampling quasi-uniform
        from scipy.spatial.transform import Rotation

        pts = Rotation.random(random_state=args.seed).apply(pts)
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    centers = parse_centers(args.centers)
    for c in centers:
        if not np.linalg.norm(c) < 1.0:
            raise UsageError(f"center {c} must lie inside the unit ball")
    tol = args.tol if args.tol is not None else DEFAULT_TOL_FACTOR * median_nn_chord(pts)
    points = [[float(x) for x in p] for p in pts]
    entries = [
        {"id": f"G{k}", "kind": "robinson", "points": points, "center": c, "tol": float(tol)}
        for k, c in enumerate(centers)
    ]
    return dump_space(GroundSpace(len(points), 2), entries)


COMMANDS = {
    "validate": cmd_validate,
    "hull": cmd_hull,
    "member": cmd_member,
    "enumerate": cmd_enumerate,
    "eq": cmd_eq,
    "normalize": cmd_normalize,
    "independence": cmd_independence,
    "conical": cmd_conical,
    "prop-check": cmd_prop_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", metavar="FILE", help="space file (JSON)")
    common.add_argument("--expr", metavar="STR", help="fracto-expression, e.g. '1/{G1,G2} ^ 2/{G1,G3}'")
    common.add_argument("--set", metavar="IDS", help="comma-separated element ids")
    common.add_argument("--ids", metavar="IDS", help="comma-separated convexity ids (default: all)")
    common.add_argument("--seed", type=int, help="seed for randomised work")
    common.add_argument("--cap", type=int, help="enumeration cap (default $FRACTO_CAP or 20)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    common.add_argument("--quiet", action="store_true", help="print only the status")
    common.add_argument("--unicode", action="store_true", help="print expressions with mathematical glyphs")

    p = argparse.ArgumentParser(prog="fracto", description="Finite convexities and fractoconvexities.")
    sub = p.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "validate": "load a space file and check the hull axioms",
        "hull": "hulls of --set under each convexity",
        "member": "is --set a member of --expr",
        "enumerate": "all members of --expr (or convex sets of one --ids convexity)",
        "eq": "compare the families of --e1 and --e2",
        "normalize": "full-block normal form of --expr",
        "independence": "independence domain of the convexities",
        "conical": "conical independence scan of two convexities",
        "prop-check": "run a randomised property suite",
    }
    for name, text in helps.items():
        sp = sub.add_parser(name, parents=[common], help=text)
        if name == "eq":
            sp.add_argument("--e1", metavar="STR")
            sp.add_argument("--e2", metavar="STR")
        if name == "conical":
            sp.add_argument("--min-prefix", type=int, default=3, help="smallest prefix set scanned (2 allows repeated points)")
        if name == "prop-check":
            sp.add_argument("--prop", choices=SUITES)
            sp.add_argument("--trials", type=int)
    g = sub.add_parser("gen", help="generate a space file")
    gsub = g.add_subparsers(dest="model", required=True, metavar="model")
    z = gsub.add_parser("zline", parents=[common], help="window with interval and permuted interval convexities")
    z.add_argument("--size", type=int)
    z.add_argument("--perm", metavar="LIST|random|reversal|identity|interleaved")
    s = gsub.add_parser("sphere", parents=[common], help="Fibonacci sphere with cone convexities")
    s.add_argument("--points", type=int)
    s.add_argument("--centers", metavar="X,Y,Z;X,Y,Z")
    s.add_argument("--tol", type=float)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cap is not None:
        os.environ["FRACTO_CAP"] = str(args.cap)
    try:
        if args.command == "gen":
            doc = (gen_zline if args.model == "zline" else gen_sphere)(args)
            sys.stdout.write(to_json(doc))
            return 0
        rep = COMMANDS[args.command](args)
    except (FractoError, UsageError, ValueError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    if args.quiet:
        print(rep.status)
    else:
        sys.stdout.write(to_json(rep.to_dict()))
    return 1 if rep.status == "fail" else 0


if __name__ == "__main__":
    sys.exit(main())
