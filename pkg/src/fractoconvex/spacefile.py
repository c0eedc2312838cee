"""Space files: JSON descriptions of a ground space and its convexities.

::

    {"n": 2, "size": 4, "convexities": [
        {"id": "G1", "kind": "interval"},
        {"id": "G2", "kind": "permuted_interval", "perm": [0, 2, 1, 3]},
        {"id": "G3", "kind": "explicit", "hull": {"0,3": [0, 1, 3], ...}},
        {"id": "G4", "kind": "robinson", "points": [[x, y, z], ...],
         "center": [x, y, z], "tol": 0.1}]}

Keys of an explicit hull table are comma-joined ascending ids (``""`` for
the empty set).  Empty and one-point keys may be omitted.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .bits import ElemSet, elems, mask_of, popcount
from .convexity import Convexity, GroundSpace, lift_arity, make_convexity
from .errors import SpaceFileError
from .generators import interval_base
from .sphere import robinson_convexity
from .zline import check_perm

KINDS = ("explicit", "interval", "permuted_interval", "robinson")


def _key_mask(key: str, space: GroundSpace) -> ElemSet:
    key = key.strip()
    if not key:
        return 0
    try:
        ids = [int(x) for x in key.split(",")]
    except ValueError:
        raise SpaceFileError(f"bad subset key {key!r}") from None
    if ids != sorted(set(ids)):
        raise SpaceFileError(f"subset key {key!r} must list distinct ids in ascending order")
    return space.check(mask_of(ids))


def _ids(value: Any, what: str) -> list[int]:
    if not isinstance(value, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in value):
        raise SpaceFileError(f"{what} must be a list of integer ids")
    return value


def _build(entry: Mapping[str, Any], space: GroundSpace) -> Convexity:
    cid = entry.get("id")
    if not isinstance(cid, str) or not cid:
        raise SpaceFileError("every convexity needs a string id")
    kind = entry.get("kind")
    if kind == "explicit":
        hull = entry.get("hull")
        if not isinstance(hull, dict):
            raise SpaceFileError(f"{cid}: explicit convexities need a 'hull' object")
        base = {}
        for key, val in hull.items():
            B = _key_mask(key, space)
            if popcount(B) > space.arity:
                raise SpaceFileError(f"{cid}: key {key!r} has more than n={space.arity} ids")
            base[B] = space.check(mask_of(_ids(val, f"{cid}: hull[{key!r}]")))
        return make_convexity(space, base, cid)
    if kind == "interval":
        return make_convexity(space, interval_base(space), cid)
    if kind == "permuted_interval":
        perm = check_perm(_ids(entry.get("perm"), f"{cid}: perm"), space.size)
        return make_convexity(space, interval_base(space, perm), cid)
    if kind == "robinson":
        try:
            pts = np.asarray(entry["points"], dtype=float)
            center = np.asarray(entry["center"], dtype=float)
            tol = float(entry["tol"])
        except (KeyError, TypeError, ValueError) as e:
            raise SpaceFileError(f"{cid}: robinson convexities need points, center and tol ({e})") from None
        if pts.ndim != 2 or pts.shape[1] != 3 or center.shape != (3,):
            raise SpaceFileError(f"{cid}: points must be 3-vectors and center one 3-vector")
        if len(pts) != space.size:
            raise SpaceFileError(f"{cid}: {len(pts)} points but size is {space.size}")
        if not np.linalg.norm(center) < 1.0:
            raise SpaceFileError(f"{cid}: the center must lie inside the unit ball")
        if tol < 0:
            raise SpaceFileError(f"{cid}: tol must be nonnegative")
        if space.arity < 2:
            raise SpaceFileError(f"{cid}: robinson convexities are binary, n must be at least 2")
        conv = robinson_convexity(pts, center, tol, cid)
        return conv if space.arity == 2 else lift_arity(conv, space.arity, cid)
    raise SpaceFileError(f"{cid}: unknown kind {kind!r} (expected one of {', '.join(KINDS)})")


def load_space(source: str | Path | Mapping[str, Any]) -> tuple[GroundSpace, dict[str, Convexity]]:
    """Parse a space file (path or already decoded object) into its convexities, keyed by id."""
    if isinstance(source, Mapping):
        doc = source
    else:
        try:
            doc = json.loads(Path(source).read_text(encoding="utf-8"))
        except OSError as e:
            raise SpaceFileError(f"cannot read {source}: {e.strerror}") from None
        except json.JSONDecodeError as e:
            raise SpaceFileError(f"{source}: invalid JSON at line {e.lineno}: {e.msg}") from None
    if not isinstance(doc, Mapping):
        raise SpaceFileError("a space file must be a JSON object")
    n, size = doc.get("n"), doc.get("size")
    if not isinstance(n, int) or not isinstance(size, int):
        raise SpaceFileError("'n' and 'size' must be integers")
    try:
        space = GroundSpace(size, n)
    except ValueError as e:
        raise SpaceFileError(str(e)) from None
    entries = doc.get("convexities")
    if not isinstance(entries, list) or not entries:
        raise SpaceFileError("'convexities' must be a nonempty list")
    convs: dict[str, Convexity] = {}
    for entry in entries:
        if not isinstance(entry, Mapping):
            raise SpaceFileError("every convexity entry must be an object")
        conv = _build(entry, space)
        if conv.id in convs:
            raise SpaceFileError(f"duplicate convexity id {conv.id!r}")
        convs[conv.id] = conv
    return space, convs


def _key(B: ElemSet) -> str:
    return ",".join(str(x) for x in elems(B))


def dump_explicit(conv: Convexity) -> dict[str, Any]:
    """Explicit entry listing the closed hull of every set with at most ``n`` points."""
    hull = {_key(B): elems(conv.hull(B)) for B in conv.space.small_sets if popcount(B) >= 2}
    return {"id": conv.id, "kind": "explicit", "hull": hull}


def dump_space(space: GroundSpace, entries: list[dict[str, Any]]) -> dict[str, Any]:
    return {"n": space.arity, "size": space.size, "convexities": entries}


def _flat(x: Any) -> bool:
    return isinstance(x, list) and all(not isinstance(v, (list, dict)) for v in x)


def _emit(x: Any, depth: int) -> str:
    pad = "  " * (depth + 1)
    if isinstance(x, dict) and x:
        items = [f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_emit(v, depth + 1)}" for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + "  " * depth + "}"
    if isinstance(x, list) and x and not _flat(x):
        return "[\n" + ",\n".join(pad + _emit(v, depth + 1) for v in x) + "\n" + "  " * depth + "]"
    return json.dumps(x, ensure_ascii=False, separators=(", ", ": "))


def to_json(doc: Any) -> str:
    """Indented JSON with lists of scalars kept on one line."""
    return _emit(doc, 0) + "\n"


