"""Modal formula AST, concrete syntax, JSON trees and uniform substitution.

Concrete grammar (loosest to tightest)::

    iff     := imp ('<->' imp)*          left associative
    imp     := disj ('->' imp)?          right associative
    disj    := conj ('|' conj)*          left associative
    conj    := unary ('&' unary)*        left associative
    unary   := ('!' | '[]' | '<>') unary | atom | 'true' | 'false' | '(' iff ')'

Atom names match ``[A-Za-z_][A-Za-z0-9_:.]*`` so that control observations
such as ``b:0`` or ``r:1.4`` are ordinary atoms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Mapping

__all__ = [
    "Formula", "Atom", "Top", "Bot", "Not", "And", "Or", "Implies", "Iff",
    "Box", "Diamond", "ParseError", "parse", "render", "substitute",
    "compose", "modal_depth", "atoms", "size", "subformulas", "to_json",
    "from_json", "conj", "disj", "TOP", "BOT",
]

ATOM_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_:.]*\Z")
KEYWORDS = {"true", "false"}


class Formula:
    """Base class of all formula nodes.  Nodes are immutable and hashable."""

    __slots__ = ()

    def __str__(self):
        return render(self)

    # operator sugar, handy in tests and interactive use
    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)

    def __invert__(self):
        return Not(self)

    def __rshift__(self, other):
        return Implies(self, other)


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if not ATOM_RE.match(self.name) or self.name in KEYWORDS:
            raise ValueError(f"invalid atom name {self.name!r}")


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Box(Formula):
    arg: Formula


@dataclass(frozen=True)
class Diamond(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


UNARY = (Not, Box, Diamond)
BINARY = (And, Or, Implies, Iff)
TOP = Top()
BOT = Bot()


def _cached_hash(self):
    # formulas are used as memo keys all over; the generated dataclass hash
    # re-walks the whole tree on every call
    try:
        return object.__getattribute__(self, "_h")
    except AttributeError:
        h = hash((type(self).__name__,) + tuple(getattr(self, f) for f in self.__dataclass_fields__))
        object.__setattr__(self, "_h", h)
        return h


for _cls in (Atom, Top, Bot) + UNARY + BINARY:
    _cls.__hash__ = _cached_hash


def conj(parts) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``Top``."""
    out = None
    for p in parts:
        out = p if out is None else And(out, p)
    return TOP if out is None else out


def disj(parts) -> Formula:
    """Left-nested disjunction; the empty disjunction is ``Bot``."""
    out = None
    for p in parts:
        out = p if out is None else Or(out, p)
    return BOT if out is None else out


# ---------------------------------------------------------------------------
# parsing

class ParseError(ValueError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


_TOKEN_RE = re.compile(r"\s*(?:(<->|->|\[\]|<>|[!&|()])|([A-Za-z_][A-Za-z0-9_:.]*))")


def _tokenize(text):
    pos = 0
    tokens = []
    while True:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        start = m.start(1) if m.group(1) else m.start(2)
        tokens.append((m.group(1) or m.group(2), start))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i][0]

    def take(self, expected=None):
        tok, pos = self.tokens[self.i]
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", pos)
        self.i += 1
        return tok

    def iff(self):
        left = self.imp()
        while self.peek() == "<->":
            self.take()
            left = Iff(left, self.imp())
        return left

    def imp(self):
        left = self.disj()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.imp())
        return left

    def disj(self):
        left = self.conj()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self):
        tok, pos = self.tokens[self.i]
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "[]":
            self.take()
            return Box(self.unary())
        if tok == "<>":
            self.take()
            return Diamond(self.unary())
        if tok == "(":
            self.take()
            inner = self.iff()
            self.take(")")
            return inner
        if tok == "true":
            self.take()
            return TOP
        if tok == "false":
            self.take()
            return BOT
        if ATOM_RE.match(tok):
            self.take()
            return Atom(tok)
        raise ParseError(f"unexpected token {tok!r}", pos)


def parse(text: str) -> Formula:
    """Parse ``text`` into a formula; raises :class:`ParseError` with position."""
    p = _Parser(text)
    f = p.iff()
    p.take("<end>")
    return f


# ---------------------------------------------------------------------------
# rendering

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYM = {Iff: "<->", Implies: "->", Or: "|", And: "&", Not: "!", Box: "[]", Diamond: "<>"}


def _prec(f):
    return _PREC.get(type(f), 5)


def render(f: Formula) -> str:
    """Render with the minimal parentheses the grammar needs."""
    t = type(f)
    if t is Atom:
        return f.name
    if t is Top:
        return "true"
    if t is Bot:
        return "false"
    if t in UNARY:
        a = f.arg
        bare = isinstance(a, (Atom, Top, Bot)) or (t is not Not and isinstance(a, UNARY))
        inner = render(a)
        return _SYM[t] + (inner if bare else f"({inner})")
    p = _PREC[t]
    lp, rp = _prec(f.left), _prec(f.right)
    if t is Implies:
        # right associative
        left_bare, right_bare = lp > p, rp >= p
    else:
        left_bare, right_bare = lp >= p, rp > p
    left = render(f.left) if left_bare else f"({render(f.left)})"
    right = render(f.right) if right_bare else f"({render(f.right)})"
    return f"{left} {_SYM[t]} {right}"


# ---------------------------------------------------------------------------
# structural operations

def substitute(f: Formula, s: Mapping[str, Formula]) -> Formula:
    """Simultaneous uniform substitution; atoms not in ``s`` stay put."""
    memo = {}

    def go(g):
        if g in memo:
            return memo[g]
        t = type(g)
        if t is Atom:
            out = s.get(g.name, g)
        elif t in (Top, Bot):
            out = g
        elif t in UNARY:
            out = t(go(g.arg))
        else:
            out = t(go(g.left), go(g.right))
        memo[g] = out
        return out

    return go(f)


def compose(first: Mapping[str, Formula], then: Mapping[str, Formula]) -> dict:
    """The substitution "apply ``first``, then ``then``"."""
    out = {k: substitute(v, then) for k, v in first.items()}
    for k, v in then.items():
        out.setdefault(k, v)
    return out


def modal_depth(f: Formula) -> int:
    t = type(f)
    if t in (Atom, Top, Bot):
        return 0
    if t is Not:
        return modal_depth(f.arg)
    if t in (Box, Diamond):
        return 1 + modal_depth(f.arg)
    return max(modal_depth(f.left), modal_depth(f.right))


def atoms(f: Formula) -> set:
    """Names of the atoms occurring in ``f``."""
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if type(g) is Atom:
            out.add(g.name)
        elif type(g) in UNARY:
            stack.append(g.arg)
        elif type(g) in BINARY:
            stack.extend((g.left, g.right))
    return out


def size(f: Formula) -> int:
    if type(f) in UNARY:
        return 1 + size(f.arg)
    if type(f) in BINARY:
        return 1 + size(f.left) + size(f.right)
    return 1


def subformulas(f: Formula):
    """Yield every subformula, children before parents."""
    if type(f) in UNARY:
        yield from subformulas(f.arg)
    elif type(f) in BINARY:
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    yield f


# ---------------------------------------------------------------------------
# JSON trees: {"op": ..., "args": [...]}

_OPS = {
    Top: "top", Bot: "bot", Not: "not", Box: "box", Diamond: "diamond",
    And: "and", Or: "or", Implies: "implies", Iff: "iff",
}
_BY_OP = {v: k for k, v in _OPS.items()}


def to_json(f: Formula) -> dict:
    t = type(f)
    if t is Atom:
        return {"op": "atom", "args": [f.name]}
    if t in (Top, Bot):
        return {"op": _OPS[t], "args": []}
    if t in UNARY:
        return {"op": _OPS[t], "args": [to_json(f.arg)]}
    return {"op": _OPS[t], "args": [to_json(f.left), to_json(f.right)]}


def from_json(obj) -> Formula:
    op, args = obj["op"], obj.get("args", [])
    if op == "atom":
        return Atom(args[0])
    cls = _BY_OP.get(op)
    if cls is None:
        raise ValueError(f"unknown formula op {op!r}")
    if cls in (Top, Bot):
        return cls()
    if cls in UNARY:
        return cls(from_json(args[0]))
    return cls(from_json(args[0]), from_json(args[1]))
