"""Finite n-ary convexities, fractoconvexities and their independence."""

from .bits import ElemSet, elems, mask_of
from .convexity import (
    Convexity,
    GroundSpace,
    SetFamily,
    check_axioms,
    enumerate_convex,
    hull,
    intersect_convexities,
    is_convex,
    lift_arity,
    make_convexity,
)
from .errors import *  # noqa: F401,F403
from .expr import evaluate, parse_expr, to_text
from .fracto import (
    Block,
    Fractoconvexity,
    enumerate_members,
    family_equal,
    frac,
    is_multiconvex,
    join,
    meet,
    member,
    multi,
    normalize,
    per_b_equivalent,
    simplify_prop1,
)
from .independence import (
    condition_3_1,
    independence_domain,
    is_conically_independent,
    pair_hull,
    verify_lemma1,
    verify_prop3,
)
from .report import Report
from .spacefile import load_space

__version__ = "0.1.0"
