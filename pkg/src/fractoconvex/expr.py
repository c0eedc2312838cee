"""Fracto-expression syntax.

Grammar (whitespace insignificant)::

    expr := meet ( "v" meet )*
    meet := atom ( "^" atom )*
    atom := frac | "(" expr ")"
    frac := INT "/" "{" ID ("," ID)* "}"

``v`` is join and ``^`` is intersection; both are left associative and ``^``
binds tighter.  The glyphs ``∨`` and ``∩`` (or ``∧``) are accepted as well.
Error offsets are byte offsets into the UTF-8 encoded input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping, Union

from .convexity import Convexity
from .errors import ArityError, DuplicateId, ExprSyntaxError, UnknownConvexityId
from .fracto import Fractoconvexity, frac, join, meet


@dataclass(frozen=True)
class Frac:
    threshold: int
    ids: tuple[str, ...]


@dataclass(frozen=True)
class Join:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Meet:
    left: "Expr"
    right: "Expr"


Expr = Union[Frac, Join, Meet]

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<id>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[/{},()^∨∩∧]))"
)
_GLYPHS = {"∨": "v", "∩": "^", "∧": "^"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        while True:
            m = _TOKEN.match(text, pos)
            if m is None:
                rest = text[pos:]
                if rest.strip() == "":
                    break
                start = pos + len(rest) - len(rest.lstrip())
                raise ExprSyntaxError(self._byte(start), "a token", text[start])
            kind = m.lastgroup
            val = m.group(kind)
            if kind == "punct":
                val = _GLYPHS.get(val, val)
            self.toks.append((kind, val, m.start(kind)))
            pos = m.end()
        self.toks.append(("eof", "", len(text)))
        self.i = 0

    def _byte(self, charpos: int) -> int:
        return len(self.text[:charpos].encode("utf-8"))

    def peek(self) -> tuple[str, str, int]:
        return self.toks[self.i]

    def fail(self, expected: str):
        kind, val, pos = self.peek()
        raise ExprSyntaxError(self._byte(pos), expected, val if kind != "eof" else "end of input")

    def take(self, kind: str, val: str | None = None, expected: str | None = None) -> tuple[str, str, int]:
        tok = self.peek()
        if tok[0] != kind or (val is not None and tok[1] != val):
            self.fail(expected or (repr(val) if val else kind))
        self.i += 1
        return tok

    def at_op(self, op: str) -> bool:
        kind, val, _ = self.peek()
        if op == "v":
            return kind == "id" and val == "v" or kind == "punct" and val == "v"
        return kind == "punct" and val == op

    def expr(self) -> Expr:
        node = self.meet()
        while self.at_op("v"):
            self.i += 1
            node = Join(node, self.meet())
        return node

    def meet(self) -> Expr:
        node = self.atom()
        while self.at_op("^"):
            self.i += 1
            node = Meet(node, self.atom())
        return node

    def atom(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "punct" and val == "(":
            self.i += 1
            node = self.expr()
            self.take("punct", ")", "')'")
            return node
        if kind == "int":
            return self.frac()
        self.fail("a fraction or '('")

    def frac(self) -> Frac:
        _, num, start = self.take("int")
        self.take("punct", "/", "'/'")
        self.take("punct", "{", "'{'")
        ids = [self.take("id", expected="a convexity id")[1]]
        while self.peek()[:2] == ("punct", ","):
            self.i += 1
            ids.append(self.take("id", expected="a convexity id")[1])
        self.take("punct", "}", "',' or '}'")
        m = int(num)
        if len(set(ids)) != len(ids):
            dup = next(x for x in ids if ids.count(x) > 1)
            raise DuplicateId(f"at byte {self._byte(start)}: id {dup!r} repeated in {num}/{{...}}")
        if not 1 <= m <= len(ids):
            raise ArityError(f"at byte {self._byte(start)}: threshold {m} must lie in 1..{len(ids)}")
        return Frac(m, tuple(ids))


def parse_expr(text: str) -> Expr:
    p = _Parser(text)
    node = p.expr()
    if p.peek()[0] != "eof":
        p.fail("'v', '^' or end of input")
    return node


def to_text(node: Expr, unicode: bool = False) -> str:
    """Print with the fewest parentheses that reparse to the same tree."""
    jop, mop = (" ∨ ", " ∩ ") if unicode else (" v ", " ^ ")

    def go(n: Expr) -> str:
        if isinstance(n, Frac):
            return f"{n.threshold}/{{{','.join(n.ids)}}}"
        if isinstance(n, Join):
            right = go(n.right)
            if isinstance(n.right, Join):
                right = f"({right})"
            return go(n.left) + jop + right
        left, right = go(n.left), go(n.right)
        if isinstance(n.left, Join):
            left = f"({left})"
        if not isinstance(n.right, Frac):
            right = f"({right})"
        return left + mop + right

    return go(node)


def evaluate(node: Expr, registry: Mapping[str, Convexity], check_distinct: bool = True) -> Fractoconvexity:
    if isinstance(node, Frac):
        try:
            convs = [registry[i] for i in node.ids]
        except KeyError as e:
            raise UnknownConvexityId(f"unknown convexity id {e.args[0]!r}") from None
        return frac(node.threshold, convs, check_distinct)
    left = evaluate(node.left, registry, check_distinct)
    right = evaluate(node.right, registry, check_distinct)
    return join(left, right) if isinstance(node, Join) else meet(left, right)
