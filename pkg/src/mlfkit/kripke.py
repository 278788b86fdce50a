"""Finite Kripke frames and models.

Relations are stored as one successor bitmask per world (bit ``j`` of
``succ[i]`` set iff world ``i`` sees world ``j``).  Two evaluation engines
live here and share nothing but the frame:

* :func:`extension` / :func:`satisfies` evaluate one model, a bitmask over
  worlds per subformula;
* :func:`first_refutation` / :func:`valid_on_frame` evaluate every valuation
  at once, one bitset over valuations per world and subformula.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import product
from typing import Hashable, Iterable, Mapping, NamedTuple

from .formula import (
    And, Atom, Bot, Box, Diamond, Formula, Iff, Implies, Not, Or, Top, atoms,
)

__all__ = [
    "Frame", "Model", "FrameProperties", "Quotient", "PBAStructure", "NotPBA",
    "extension", "satisfies", "valid_on_frame", "first_refutation",
    "frame_properties", "quotient_clusters", "as_pba", "pba_frame",
    "enumerate_pbas", "frame_to_json", "frame_from_json", "model_to_json",
    "model_from_json", "to_dot", "iter_bits", "mask_of",
]


def iter_bits(mask: int):
    """Indices of the set bits of ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int], n: int | None = None) -> int:
    indices = list(indices)
    if n is None:
        n = max(indices, default=-1) + 1
    buf = bytearray((n + 7) // 8)
    for i in indices:
        buf[i >> 3] |= 1 << (i & 7)
    return int.from_bytes(buf, "little")


class Frame:
    """A finite frame ``<W, R>``.

    >>> fr = Frame(["w", "u"], [("w", "w"), ("w", "u"), ("u", "u")])
    >>> fr.related("w", "u"), fr.related("u", "w")
    (True, False)
    """

    __slots__ = ("worlds", "index", "succ", "_relation", "_succ_lists")

    def __init__(self, worlds: Iterable[Hashable], relation: Iterable[tuple] = ()):
        worlds = tuple(worlds)
        index = {w: i for i, w in enumerate(worlds)}
        if len(index) != len(worlds):
            raise ValueError("world ids must be distinct")
        succ = [0] * len(worlds)
        for a, b in relation:
            if a not in index or b not in index:
                raise ValueError(f"relation pair {(a, b)!r} mentions an unknown world")
            succ[index[a]] |= 1 << index[b]
        self._init(worlds, index, tuple(succ))

    def _init(self, worlds, index, succ):
        self.worlds = worlds
        self.index = index
        self.succ = succ
        self._relation = None
        self._succ_lists = None

    @classmethod
    def from_masks(cls, worlds, masks):
        self = cls.__new__(cls)
        worlds = tuple(worlds)
        index = {w: i for i, w in enumerate(worlds)}
        if len(index) != len(worlds):
            raise ValueError("world ids must be distinct")
        masks = tuple(masks)
        if len(masks) != len(worlds) or any(m >> len(worlds) for m in masks):
            raise ValueError("successor masks do not fit the world list")
        self._init(worlds, index, masks)
        return self

    def __len__(self):
        return len(self.worlds)

    def __eq__(self, other):
        return isinstance(other, Frame) and self.worlds == other.worlds and self.succ == other.succ

    def __hash__(self):
        return hash((self.worlds, self.succ))

    def __repr__(self):
        return f"Frame({len(self.worlds)} worlds, {sum(bin(m).count('1') for m in self.succ)} pairs)"

    @property
    def relation(self) -> frozenset:
        if self._relation is None:
            w = self.worlds
            self._relation = frozenset(
                (w[i], w[j]) for i, m in enumerate(self.succ) for j in iter_bits(m))
        return self._relation

    @property
    def succ_lists(self):
        if self._succ_lists is None:
            self._succ_lists = tuple(tuple(iter_bits(m)) for m in self.succ)
        return self._succ_lists

    def related(self, w, u) -> bool:
        return bool(self.succ[self.index[w]] >> self.index[u] & 1)

    def successors(self, w) -> list:
        return [self.worlds[j] for j in iter_bits(self.succ[self.index[w]])]

    def preds(self) -> tuple:
        out = [0] * len(self.worlds)
        for i, m in enumerate(self.succ):
            bit = 1 << i
            for j in iter_bits(m):
                out[j] |= bit
        return tuple(out)

    def mask(self, worlds: Iterable) -> int:
        return mask_of((self.index[w] for w in worlds), len(self.worlds))

    def worlds_of(self, mask: int) -> list:
        return [self.worlds[j] for j in iter_bits(mask)]

    @property
    def full(self) -> int:
        return (1 << len(self.worlds)) - 1


class Model:
    """A frame plus a valuation; atoms missing from the valuation are false everywhere."""

    __slots__ = ("frame", "masks")

    def __init__(self, frame: Frame, valuation: Mapping[str, Iterable] | None = None):
        self.frame = frame
        self.masks = {}
        for name, ws in (valuation or {}).items():
            ws = list(ws)
            for w in ws:
                if w not in frame.index:
                    raise ValueError(f"valuation of {name!r} mentions unknown world {w!r}")
            self.masks[name] = frame.mask(ws)

    @classmethod
    def from_masks(cls, frame, masks: Mapping[str, int]):
        self = cls.__new__(cls)
        self.frame = frame
        self.masks = dict(masks)
        return self

    @property
    def valuation(self) -> dict:
        return {k: set(self.frame.worlds_of(m)) for k, m in self.masks.items()}

    def __repr__(self):
        return f"Model({self.frame!r}, atoms={sorted(self.masks)})"


# ---------------------------------------------------------------------------
# per-model satisfaction

def _bits_to_mask(flags) -> int:
    buf = bytearray((len(flags) + 7) // 8)
    for i, f in enumerate(flags):
        if f:
            buf[i >> 3] |= 1 << (i & 7)
    return int.from_bytes(buf, "little")


def extension(model: Model, f: Formula, memo: dict | None = None) -> int:
    """Bitmask of the worlds of ``model`` where ``f`` holds."""
    fr = model.frame
    full = fr.full
    succ = fr.succ
    if memo is None:
        memo = {}

    def ev(g):
        hit = memo.get(g)
        if hit is not None:
            return hit
        t = type(g)
        if t is Atom:
            out = model.masks.get(g.name, 0)
        elif t is Top:
            out = full
        elif t is Bot:
            out = 0
        elif t is Not:
            out = full ^ ev(g.arg)
        elif t is And:
            out = ev(g.left) & ev(g.right)
        elif t is Or:
            out = ev(g.left) | ev(g.right)
        elif t is Implies:
            out = (full ^ ev(g.left)) | ev(g.right)
        elif t is Iff:
            out = full ^ (ev(g.left) ^ ev(g.right))
        elif t is Box:
            bad = full ^ ev(g.arg)
            out = _bits_to_mask([not (m & bad) for m in succ])
        elif t is Diamond:
            good = ev(g.arg)
            out = _bits_to_mask([bool(m & good) for m in succ])
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return ev(f)


def satisfies(model: Model, w, f: Formula, memo: dict | None = None) -> bool:
    """``M, w |= f``."""
    try:
        i = model.frame.index[w]
    except KeyError:
        raise KeyError(f"unknown world {w!r}") from None
    return bool(extension(model, f, memo) >> i & 1)


# ---------------------------------------------------------------------------
# frame validity: all valuations at once

LOW_BITS = 20


def _period_pattern(bit: int, width: int) -> int:
    """Bitset over ``r in [0, 2**width)`` of the ``r`` whose bit ``bit`` is set."""
    half = 1 << bit
    period = half << 1
    block = ((1 << half) - 1) << half
    total = 1 << width
    return block * (((1 << total) - 1) // ((1 << period) - 1))


def _eval_columns(frame: Frame, f: Formula, cols: dict, full: int) -> list:
    n = len(frame)
    succ_lists = frame.succ_lists
    memo = {}

    def ev(g):
        hit = memo.get(g)
        if hit is not None:
            return hit
        t = type(g)
        if t is Atom:
            out = cols.get(g.name) or [0] * n
        elif t is Top:
            out = [full] * n
        elif t is Bot:
            out = [0] * n
        elif t is Not:
            out = [full ^ x for x in ev(g.arg)]
        elif t is And:
            out = [a & b for a, b in zip(ev(g.left), ev(g.right))]
        elif t is Or:
            out = [a | b for a, b in zip(ev(g.left), ev(g.right))]
        elif t is Implies:
            out = [(full ^ a) | b for a, b in zip(ev(g.left), ev(g.right))]
        elif t is Iff:
            out = [full ^ (a ^ b) for a, b in zip(ev(g.left), ev(g.right))]
        elif t is Box:
            x = ev(g.arg)
            out = []
            for ss in succ_lists:
                acc = full
                for u in ss:
                    acc &= x[u]
                out.append(acc)
        elif t is Diamond:
            x = ev(g.arg)
            out = []
            for ss in succ_lists:
                acc = 0
                for u in ss:
                    acc |= x[u]
                out.append(acc)
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return ev(f)


def first_refutation(frame: Frame, f: Formula):
    """First ``(Model, world)`` falsifying ``f``, or ``None`` if ``f`` is valid.

    Valuations range over the atoms of ``f`` (sorted by name).  A valuation
    is the tuple of per-atom world masks, compared lexicographically; bit
    ``j`` of a mask is world ``j`` in frame order.  Ties within a valuation
    go to the first world.
    """
    names = sorted(atoms(f))
    n, k = len(frame), len(names)
    total_bits = n * k
    low = min(total_bits, LOW_BITS)
    width = 1 << low
    full = (1 << width) - 1
    patterns = [_period_pattern(b, low) for b in range(low)]
    for chunk in range(1 << (total_bits - low)):
        cols = {}
        for i, name in enumerate(names):
            base = n * (k - 1 - i)
            col = []
            for w in range(n):
                b = base + w
                if b < low:
                    col.append(patterns[b])
                else:
                    col.append(full if chunk >> (b - low) & 1 else 0)
            cols[name] = col
        truth = _eval_columns(frame, f, cols, full)
        fails = [full ^ t for t in truth]
        union = 0
        for x in fails:
            union |= x
        if not union:
            continue
        r = (union & -union).bit_length() - 1
        v = (chunk << low) | r
        world = next(w for w in range(n) if fails[w] >> r & 1)
        wmask = (1 << n) - 1
        masks = {name: (v >> (n * (k - 1 - i))) & wmask for i, name in enumerate(names)}
        return Model.from_masks(frame, masks), frame.worlds[world]
    return None


def valid_on_frame(frame: Frame, f: Formula) -> bool:
    """``f`` holds at every world under every valuation of its atoms."""
    return first_refutation(frame, f) is None


# ---------------------------------------------------------------------------
# frame classes

class FrameProperties(NamedTuple):
    reflexive: bool
    transitive: bool
    directed: bool


def frame_properties(fr: Frame) -> FrameProperties:
    """Reflexivity, transitivity and directedness in the common-predecessor form

    ``w R v and w R u  ->  exists z (v R z and u R z)``.
    """
    succ = fr.succ
    reflexive = all(m >> i & 1 for i, m in enumerate(succ))
    transitive = True
    for m in succ:
        reach = 0
        for j in iter_bits(m):
            reach |= succ[j]
        if reach & ~m:
            transitive = False
            break
    directed = True
    for m in succ:
        ss = list(iter_bits(m))
        for a in range(len(ss)):
            for b in range(a + 1, len(ss)):
                if not succ[ss[a]] & succ[ss[b]]:
                    directed = False
                    break
            if not directed:
                break
        if not directed:
            break
    return FrameProperties(reflexive, transitive, directed)


class FrameError(ValueError):
    pass


@dataclass(frozen=True)
class Quotient:
    """Clusters of mutually accessible worlds and the order they inherit."""

    classes: tuple          # tuple of tuples of worlds, by first appearance
    order: frozenset        # pairs (i, j) of class indices with class i <= class j
    class_of: dict = field(compare=False, hash=False, repr=False)

    def leq(self, i, j) -> bool:
        return (i, j) in self.order


def quotient_clusters(fr: Frame) -> Quotient:
    props = frame_properties(fr)
    if not (props.reflexive and props.transitive):
        raise FrameError("frame is not a preorder (reflexive and transitive)")
    preds = fr.preds()
    cls_idx = [-1] * len(fr)
    classes = []
    for i in range(len(fr)):
        if cls_idx[i] >= 0:
            continue
        members = fr.succ[i] & preds[i]
        for j in iter_bits(members):
            cls_idx[j] = len(classes)
        classes.append(tuple(fr.worlds[j] for j in iter_bits(members)))
    reps = [fr.index[c[0]] for c in classes]
    order = frozenset(
        (a, b) for a, ra in enumerate(reps) for b, rb in enumerate(reps)
        if fr.succ[ra] >> rb & 1)
    class_of = {fr.worlds[i]: cls_idx[i] for i in range(len(fr))}
    return Quotient(tuple(classes), order, class_of)


# ---------------------------------------------------------------------------
# pre-Boolean-algebras

class NotPBA(ValueError):
    """Raised by :func:`as_pba`; ``reason`` says which test failed."""

    def __init__(self, reason):
        super().__init__(reason)
        self.reason = reason


def _subset_label(A) -> str:
    return "{" + ",".join(str(b) for b in sorted(A)) + "}"


def _mask_to_set(mask: int) -> frozenset:
    return frozenset(iter_bits(mask))


@dataclass(frozen=True, eq=True)
class PBAStructure:
    """A frame certified isomorphic, cluster-wise, to ``<P(B), subset>``.

    ``cluster_members`` is keyed by subsets of ``range(base_size)``.
    """

    base_size: int
    cluster_of: dict = field(hash=False)
    cluster_members: dict = field(hash=False)

    @property
    def subsets(self) -> list:
        """All subsets of the base, ordered by their bitmask."""
        return [_mask_to_set(m) for m in range(1 << self.base_size)]

    @property
    def worlds(self) -> list:
        return [w for A in self.subsets for w in self.cluster_members[A]]

    def sizes(self) -> tuple:
        return tuple(len(self.cluster_members[A]) for A in self.subsets)

    def is_uniform(self) -> bool:
        return len(set(self.sizes())) == 1

    def to_frame(self) -> Frame:
        ws = self.worlds
        return Frame(ws, [(w, u) for w in ws for u in ws
                          if self.cluster_of[w] <= self.cluster_of[u]])

    def world(self, A, i):
        """The ``i``-th world of the cluster for subset ``A``."""
        return self.cluster_members[frozenset(A)][i]

    def padded(self, n: int) -> "PBAStructure":
        """Copy with dummy worlds appended so every cluster has ``n`` members."""
        members, of = {}, dict(self.cluster_of)
        for A in self.subsets:
            ws = list(self.cluster_members[A])
            if len(ws) > n:
                raise ValueError(f"cluster {_subset_label(A)} already has {len(ws)} > {n} worlds")
            k = 0
            while len(ws) < n:
                name = f"pad{k}@{_subset_label(A)}"
                k += 1
                if name in of:
                    continue
                ws.append(name)
                of[name] = A
            members[A] = tuple(ws)
        return PBAStructure(self.base_size, of, members)


def as_pba(fr: Frame) -> PBAStructure:
    """Certify ``fr`` as a pBA or raise :class:`NotPBA`.

    The bottom cluster maps to the empty set, the atoms of the quotient (the
    clusters with exactly two predecessors) to singletons, and every other
    cluster to the set of atoms below it; that map is then checked to be an
    order isomorphism.
    """
    try:
        q = quotient_clusters(fr)
    except FrameError as e:
        raise NotPBA(str(e)) from None
    size = len(q.classes)
    m = size.bit_length() - 1
    if size != 1 << m:
        raise NotPBA(f"quotient has {size} clusters, not a power of two")
    leq = q.leq
    npred = [sum(leq(y, x) for y in range(size)) for x in range(size)]
    bottoms = [x for x in range(size) if npred[x] == 1]
    if len(bottoms) != 1 or not all(leq(bottoms[0], x) for x in range(size)):
        raise NotPBA("lattice law failure: no unique bottom cluster")
    bottom = bottoms[0]
    atom_cls = [x for x in range(size) if npred[x] == 2]
    if len(atom_cls) != m:
        raise NotPBA(f"lattice law failure: {len(atom_cls)} atoms for {size} clusters")
    join_of = {}
    for S in range(size):
        members = [atom_cls[i] for i in iter_bits(S)]
        upper = [x for x in range(size) if all(leq(a, x) for a in members)]
        least = [x for x in upper if all(leq(x, y) for y in upper)]
        if len(least) != 1:
            raise NotPBA(f"lattice law failure: atoms {sorted(iter_bits(S))} have no join")
        join_of[S] = least[0]
    if join_of[0] != bottom or len(set(join_of.values())) != size:
        raise NotPBA("no isomorphism: joins of atom sets are not all distinct")
    for S in range(size):
        for T in range(size):
            if ((S & T) == S) != leq(join_of[S], join_of[T]):
                raise NotPBA("no isomorphism: order does not match set inclusion")
    subset_of_cls = {c: _mask_to_set(S) for S, c in join_of.items()}
    cluster_of = {w: subset_of_cls[q.class_of[w]] for w in fr.worlds}
    cluster_members = {subset_of_cls[c]: q.classes[c] for c in range(size)}
    return PBAStructure(m, cluster_of, cluster_members)


def pba_frame(m: int, sizes) -> Frame:
    """Canonical pBA frame: cluster for subset mask ``s`` has ``sizes[s]`` worlds.

    World ``i`` of the cluster for ``A`` is named ``"i@{a,b}"``.
    """
    sizes = tuple(sizes)
    if len(sizes) != 1 << m or min(sizes) < 1:
        raise ValueError("need one positive cluster size per subset")
    worlds, subset = [], {}
    for s, c in enumerate(sizes):
        A = _mask_to_set(s)
        for i in range(c):
            w = f"{i}@{_subset_label(A)}"
            worlds.append(w)
            subset[w] = s
    pairs = [(w, u) for w in worlds for u in worlds if subset[w] & ~subset[u] == 0]
    return Frame(worlds, pairs)


def enumerate_pbas(m: int, cluster_max: int):
    """One frame per cluster-size function ``c: P(range(m)) -> 1..cluster_max``.

    Size functions are listed lexicographically as tuples indexed by subset
    bitmask.  Only base size exactly ``m`` is produced; callers wanting all
    base sizes up to a bound iterate ``m`` themselves.
    """
    for sizes in product(range(1, cluster_max + 1), repeat=1 << m):
        yield pba_frame(m, sizes)


# ---------------------------------------------------------------------------
# interchange

def frame_to_json(fr: Frame, key=str) -> dict:
    return {
        "worlds": [key(w) for w in fr.worlds],
        "relation": [[key(fr.worlds[i]), key(fr.worlds[j])]
                     for i, m in enumerate(fr.succ) for j in iter_bits(m)],
    }


def model_to_json(model: Model, key=str) -> dict:
    out = frame_to_json(model.frame, key)
    out["valuation"] = {
        name: [key(w) for w in model.frame.worlds_of(m)]
        for name, m in sorted(model.masks.items())
    }
    return out


def frame_from_json(obj) -> Frame:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return Frame(obj["worlds"], [tuple(p) for p in obj["relation"]])


def model_from_json(obj) -> Model:
    if isinstance(obj, str):
        obj = json.loads(obj)
    return Model(frame_from_json(obj), obj.get("valuation", {}))


def to_dot(fr: Frame, name: str = "frame", key=str) -> str:
    """Graphviz source; preorders are drawn as cluster boxes with cover edges."""
    lines = [f"digraph {name} {{", "  compound=true;", "  node [shape=circle];"]
    try:
        q = quotient_clusters(fr)
    except FrameError:
        q = None
    if q is None:
        for w in fr.worlds:
            lines.append(f'  "{key(w)}";')
        for a, b in sorted(fr.relation, key=lambda p: (fr.index[p[0]], fr.index[p[1]])):
            lines.append(f'  "{key(a)}" -> "{key(b)}";')
    else:
        for c, members in enumerate(q.classes):
            lines.append(f"  subgraph cluster_{c} {{")
            lines.append("    style=rounded;")
            for w in members:
                lines.append(f'    "{key(w)}";')
            lines.append("  }")
        for a in range(len(q.classes)):
            for b in range(len(q.classes)):
                if a == b or not q.leq(a, b):
                    continue
                if any(q.leq(a, c) and q.leq(c, b) and c not in (a, b) for c in range(len(q.classes))):
                    continue
                lines.append(f'  "{key(q.classes[a][0])}" -> "{key(q.classes[b][0])}" '
                             f"[ltail=cluster_{a}, lhead=cluster_{b}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
