"""Finite combinatorics of two forcing posets.

* The almost-disjoint coding poset: conditions ``<s, t>`` with ``s`` a finite
  set of naturals and ``t`` a finite set of set-handles; ``<s', t'>``
  extends ``<s, t>`` when both components grow and ``s' & A == s & A`` for
  every ``A`` in ``t``.
* The poset of basic opens and reals: a condition is a finite set of basic
  opens ``U_s`` plus a finite set of reals; an extension may add anything
  as long as no new open contains an old real.

Reals are computable prefix oracles (:class:`RealHandle`), never true
generics; every relation used here is decidable from finite prefixes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

__all__ = [
    "SeqEnumeration", "SEQ", "index_of", "seq_of", "RealHandle", "ADCode",
    "ad_code", "common_prefix_length", "InsufficientPrefix", "PYCondition",
    "py_extends", "py_merge", "PICondition", "pi_extends", "pi_merge_class",
    "avoid_basic_open", "DenseSpec", "dense_DsN", "dense_Dalpha",
    "dense_py_size", "dense_py_add", "dense_py_meet", "rasiowa_sikorski",
    "ChainAuditError", "CertificateError", "CodingCertificate",
    "coding_certificate", "coding_chain",
]

DEFAULT_HORIZON = 256


# ---------------------------------------------------------------------------
# enumeration of finite sequences

def _compositions(r: int) -> int:
    """Number of sequences of weight exactly ``r`` (entry v weighs v + 1)."""
    return 1 if r == 0 else 1 << (r - 1)


class SeqEnumeration:
    """Bijection between naturals and finite sequences over the naturals.

    Sequences are ordered by weight ``sum(s) + len(s)``, then
    lexicographically.  Weight ``W >= 1`` occupies indices
    ``[2**(W-1), 2**W)``; the empty sequence is index 0.
    """

    def index_of(self, s) -> int:
        s = tuple(s)
        if any(v < 0 for v in s):
            raise ValueError("sequence entries must be natural numbers")
        W = sum(s) + len(s)
        if W == 0:
            return 0
        rank, rem = 0, W
        for v in s:
            for smaller in range(v):
                rank += _compositions(rem - smaller - 1)
            rem -= v + 1
        return (1 << (W - 1)) + rank

    def seq_of(self, i: int) -> tuple:
        if i < 0:
            raise ValueError("index must be a natural number")
        if i == 0:
            return ()
        W = i.bit_length()
        r = i - (1 << (W - 1))
        out, rem = [], W
        while rem:
            v = 0
            while r >= _compositions(rem - v - 1):
                r -= _compositions(rem - v - 1)
                v += 1
            out.append(v)
            rem -= v + 1
        return tuple(out)

    def table(self, count: int) -> list:
        return [(i, self.seq_of(i)) for i in range(count)]


SEQ = SeqEnumeration()
index_of = SEQ.index_of
seq_of = lru_cache(maxsize=65536)(SEQ.seq_of)


# ---------------------------------------------------------------------------
# reals

class InsufficientPrefix(LookupError):
    """A decision needed more of a real than its oracle provides."""

    def __init__(self, real, needed):
        super().__init__(f"real {real} needs a prefix of length {needed}")
        self.real, self.needed = real, needed


@dataclass(frozen=True)
class RealHandle:
    """An infinite sequence over the naturals, given by ``fn(i)``.

    ``known`` caps how many values may be queried (``None``: unlimited).
    Handles compare by ``name``.
    """

    name: str
    fn: Callable = field(compare=False, hash=False, repr=False)
    known: int | None = field(default=None, compare=False)

    def at(self, i: int) -> int:
        if self.known is not None and i >= self.known:
            raise InsufficientPrefix(self, i + 1)
        return self.fn(i)

    def prefix(self, k: int) -> tuple:
        return tuple(self.at(i) for i in range(k))

    def passes_through(self, s) -> bool:
        """Whether the real lies in the basic open ``U_s``."""
        return self.prefix(len(s)) == tuple(s)

    def __str__(self):
        return self.name

    @classmethod
    def eventually_periodic(cls, head, cycle, name=None) -> "RealHandle":
        head, cycle = tuple(head), tuple(cycle)
        if not cycle:
            raise ValueError("cycle must be nonempty")

        def fn(i):
            return head[i] if i < len(head) else cycle[(i - len(head)) % len(cycle)]

        return cls(name or f"ep({','.join(map(str, head))};{','.join(map(str, cycle))})", fn)

    @classmethod
    def constant(cls, v: int, name=None) -> "RealHandle":
        return cls.eventually_periodic((), (v,), name or f"const({v})")

    @classmethod
    def finite(cls, values, name) -> "RealHandle":
        """A real of which only ``values`` is known."""
        values = tuple(values)
        return cls(name, values.__getitem__, len(values))


def common_prefix_length(reals, horizon: int = DEFAULT_HORIZON) -> int:
    """Length of the longest common initial segment of two or more reals."""
    reals = list(reals)
    for i in range(horizon):
        if len({r.at(i) for r in reals}) > 1:
            return i
    raise InsufficientPrefix(reals[0], horizon + 1)


@dataclass(frozen=True)
class ADCode:
    """The almost-disjoint code of a real: indices of its initial segments."""

    real: RealHandle

    def __contains__(self, i) -> bool:
        return self.real.passes_through(seq_of(i))

    def element(self, k: int) -> int:
        """The k-th element in increasing order (the index of ``real[:k]``)."""
        return index_of(self.real.prefix(k))

    def __str__(self):
        return f"S({self.real})"


def ad_code(f: RealHandle, count: int) -> list:
    """First ``count`` elements of the code of ``f``, ascending.

    Longer prefixes weigh more, so they get larger indices.
    """
    return [index_of(f.prefix(k)) for k in range(count)]


# ---------------------------------------------------------------------------
# almost-disjoint coding poset

@dataclass(frozen=True)
class PYCondition:
    s: frozenset
    t: frozenset

    def __post_init__(self):
        object.__setattr__(self, "s", frozenset(self.s))
        object.__setattr__(self, "t", frozenset(self.t))

    def to_json(self):
        return {"s": sorted(self.s), "t": sorted(str(A) for A in self.t)}


def py_extends(c2: PYCondition, c1: PYCondition) -> bool:
    """``c2 <= c1``: ``c2`` extends ``c1``."""
    if not (c1.s <= c2.s and c1.t <= c2.t):
        return False
    new = c2.s - c1.s
    return not any(x in A for A in c1.t for x in new)


def py_merge(conditions) -> PYCondition:
    """Common extension of conditions that share their first component."""
    conditions = list(conditions)
    if not conditions:
        raise ValueError("nothing to merge")
    s = conditions[0].s
    if any(c.s != s for c in conditions):
        raise ValueError("conditions do not share their first component")
    t = frozenset().union(*(c.t for c in conditions))
    return PYCondition(s, t)


# ---------------------------------------------------------------------------
# basic opens and reals

@dataclass(frozen=True)
class PICondition:
    opens: frozenset     # of tuples, each naming U_s
    reals: frozenset     # of RealHandle

    def __post_init__(self):
        object.__setattr__(self, "opens", frozenset(tuple(s) for s in self.opens))
        object.__setattr__(self, "reals", frozenset(self.reals))

    def to_json(self):
        return {"opens": sorted(list(s) for s in self.opens),
                "reals": sorted(r.name for r in self.reals)}


def pi_extends(q: PICondition, p: PICondition, prefixes=None) -> bool:
    """``q <= p``.  ``prefixes`` optionally caps, per real, how many values
    may be read; a decision needing more raises :class:`InsufficientPrefix`."""
    if not (p.opens <= q.opens and p.reals <= q.reals):
        return False
    for s in q.opens - p.opens:
        for a in p.reals:
            if prefixes is not None and prefixes.get(a, 0) < len(s):
                raise InsufficientPrefix(a, len(s))
            if a.passes_through(s):
                return False
    return True


def pi_merge_class(conditions) -> PICondition:
    """Union of conditions with identical opens, which extends each of them."""
    conditions = list(conditions)
    if not conditions:
        raise ValueError("nothing to merge")
    opens = conditions[0].opens
    if any(c.opens != opens for c in conditions):
        raise ValueError("conditions do not share their opens")
    return PICondition(opens, frozenset().union(*(c.reals for c in conditions)))


def avoid_basic_open(reals, horizon: int = DEFAULT_HORIZON) -> tuple:
    """A sequence ``s`` with no given real in ``U_s``.

    ``s`` is the longest common initial segment ``t`` of the reals followed
    by the least value none of them takes next.  A single real has ``t``
    empty.
    """
    reals = list(reals)
    if not reals:
        raise ValueError("need at least one real")
    n = 0 if len(reals) == 1 else common_prefix_length(reals, horizon)
    t = reals[0].prefix(n)
    taken = {r.at(n) for r in reals}
    j = next(v for v in range(len(taken) + 1) if v not in taken)
    return t + (j,)


# ---------------------------------------------------------------------------
# dense sets and generic filter approximations

@dataclass(frozen=True)
class DenseSpec:
    name: str
    hits: Callable = field(compare=False)
    extend: Callable = field(compare=False)


def _is_prefix(s, t) -> bool:
    return len(s) <= len(t) and tuple(t[:len(s)]) == tuple(s)


def dense_DsN(s, N: int, horizon: int = DEFAULT_HORIZON) -> DenseSpec:
    """Conditions holding some ``U_t`` with ``t`` extending ``s`` and longer than ``N``.

    To extend, the reals of the condition that pass through ``s`` are
    avoided just past their common segment (the avoidance step), and the
    result is padded with zeros beyond length ``N``.
    """
    s = tuple(s)

    def hits(p):
        return any(_is_prefix(s, t) and len(t) > N for t in p.opens)

    def extend(p):
        if hits(p):
            return p
        through = sorted((a for a in p.reals if a.passes_through(s)), key=lambda a: a.name)
        if not through:
            base = s
        elif len(through) == 1:
            a = through[0]
            base = s + (1 if a.at(len(s)) == 0 else 0,)
        else:
            base = avoid_basic_open(through, horizon)
        base = base + (0,) * max(0, N + 1 - len(base))
        return PICondition(p.opens | {base}, p.reals)

    return DenseSpec(f"D[{','.join(map(str, s))};{N}]", hits, extend)


def dense_Dalpha(a: RealHandle) -> DenseSpec:
    return DenseSpec(f"D[{a.name}]", lambda p: a in p.reals,
                     lambda p: PICondition(p.opens, p.reals | {a}))


def _fresh(c: PYCondition, candidates):
    for x in candidates:
        if x not in c.s and not any(x in A for A in c.t):
            return x
    raise ValueError("no admissible element found")


def dense_py_size(k: int, horizon: int = 1 << 16) -> DenseSpec:
    """Conditions whose ``s`` has at least ``k`` elements."""
    def extend(c):
        while len(c.s) < k:
            c = PYCondition(c.s | {_fresh(c, range(horizon))}, c.t)
        return c
    return DenseSpec(f"size>={k}", lambda c: len(c.s) >= k, extend)


def dense_py_add(A) -> DenseSpec:
    """Conditions already freezing the intersection with ``A``."""
    return DenseSpec(f"add {A}", lambda c: A in c.t, lambda c: PYCondition(c.s, c.t | {A}))


def dense_py_meet(B: ADCode, k: int, horizon: int = DEFAULT_HORIZON) -> DenseSpec:
    """Conditions whose ``s`` meets ``B`` in at least ``k`` elements.

    Dense below conditions not freezing ``B``: codes of distinct reals are
    almost disjoint, so ``B`` has elements outside every member of ``t``.
    """
    def hits(c):
        return sum(1 for x in c.s if x in B) >= k

    def extend(c):
        while not hits(c):
            c = PYCondition(c.s | {_fresh(c, (B.element(i) for i in range(horizon)))}, c.t)
        return c
    return DenseSpec(f"meet {B} x{k}", hits, extend)


class ChainAuditError(RuntimeError):
    pass


def rasiowa_sikorski(extends, start, denses) -> list:
    """Descending chain meeting each dense set in turn, audited step by step."""
    chain = [start]
    for D in denses:
        nxt = D.extend(chain[-1])
        if not extends(nxt, chain[-1]):
            raise ChainAuditError(f"{D.name}: step does not extend its predecessor")
        if not D.hits(nxt):
            raise ChainAuditError(f"{D.name}: step misses the dense set")
        chain.append(nxt)
    return chain


class CertificateError(RuntimeError):
    pass


@dataclass
class CodingCertificate:
    frozen: dict     # handle index -> (stage entering t, frozen intersection)
    growing: dict    # handle index -> witnessed elements of the intersection
    growth_steps: int

    @property
    def passed(self) -> bool:
        return all(len(w) >= self.growth_steps for w in self.growing.values())

    def to_json(self):
        return {
            "passed": self.passed, "growth_steps": self.growth_steps,
            "frozen": {str(i): {"stage": st, "intersection": sorted(x)}
                       for i, (st, x) in sorted(self.frozen.items())},
            "growing": {str(i): {"count": len(w), "witnesses": [str(v) for v in sorted(w)[:5]]}
                        for i, w in sorted(self.growing.items())},
        }


def coding_certificate(chain, handles, A, growth_steps: int) -> CodingCertificate:
    """Read off the coding pattern of the real approximated by ``chain``.

    Handles in ``A`` must enter some ``t``, after which the intersection is
    checked to stay fixed along the rest of the chain.  For the others the
    witnessed intersection with the final ``s`` is reported.
    """
    A = set(A)
    frozen, growing = {}, {}
    for i, h in enumerate(handles):
        if i in A:
            stage = next((k for k, c in enumerate(chain) if h in c.t), None)
            if stage is None:
                raise CertificateError(f"handle {i} never enters t")
            fixed = frozenset(x for x in chain[stage].s if x in h)
            for k in range(stage, len(chain)):
                if frozenset(x for x in chain[k].s if x in h) != fixed:
                    raise CertificateError(f"handle {i} intersection changes at stage {k}")
            frozen[i] = (stage, fixed)
        else:
            if any(h in c.t for c in chain):
                raise CertificateError(f"handle {i} is outside A but was frozen")
            growing[i] = frozenset(x for x in chain[-1].s if x in h)
    return CodingCertificate(frozen, growing, growth_steps)


def coding_chain(handles, A, steps: int, start=None) -> list:
    """A chain of ``steps`` extensions that codes ``A``.

    Handles in ``A`` are frozen first, then the schedule cycles through
    meeting each other handle once more and growing ``s`` by one element.
    """
    A = sorted(set(A))
    others = [i for i in range(len(handles)) if i not in A]
    denses = [dense_py_add(handles[i]) for i in A]
    met = {i: 0 for i in others}
    size = 0
    while len(denses) < steps:
        for i in others:
            met[i] += 1
            denses.append(dense_py_meet(handles[i], met[i]))
        size += len(others) + 1
        denses.append(dense_py_size(size))
    start = start or PYCondition(frozenset(), frozenset())
    return rasiowa_sikorski(py_extends, start, denses[:steps])
