"""Reference implementations that share no code with the library engines.

Frames here are plain (n, set-of-pairs) and formulas are evaluated with
numpy boolean tables over all valuations of a single atom at once.
"""

from itertools import combinations, product

import numpy as np

from mlfkit.formula import And, Atom, Bot, Box, Diamond, Iff, Implies, Not, Or, Top


def naive_holds(worlds, rel, val, w, f):
    """Textbook recursive satisfaction; rel is a set of pairs, val a dict of sets."""
    t = type(f)
    if t is Atom:
        return w in val.get(f.name, ())
    if t is Top:
        return True
    if t is Bot:
        return False
    if t is Not:
        return not naive_holds(worlds, rel, val, w, f.arg)
    if t is And:
        return naive_holds(worlds, rel, val, w, f.left) and naive_holds(worlds, rel, val, w, f.right)
    if t is Or:
        return naive_holds(worlds, rel, val, w, f.left) or naive_holds(worlds, rel, val, w, f.right)
    if t is Implies:
        return (not naive_holds(worlds, rel, val, w, f.left)) or naive_holds(worlds, rel, val, w, f.right)
    if t is Iff:
        return naive_holds(worlds, rel, val, w, f.left) == naive_holds(worlds, rel, val, w, f.right)
    succ = [u for u in worlds if (w, u) in rel]
    if t is Box:
        return all(naive_holds(worlds, rel, val, u, f.arg) for u in succ)
    if t is Diamond:
        return any(naive_holds(worlds, rel, val, u, f.arg) for u in succ)
    raise TypeError(t)


def _posets_with_ends(k):
    """Naturally labelled partial orders on range(k) with 0 least and k-1 greatest."""
    if k == 1:
        yield {(0, 0)}
        return
    middle = range(1, k - 1)
    pairs = list(combinations(middle, 2))
    for bits in range(1 << len(pairs)):
        lt = {pairs[i] for i in range(len(pairs)) if bits >> i & 1}
        if any((a, c) not in lt for (a, b) in lt for (b2, c) in lt if b == b2):
            continue
        leq = {(i, i) for i in range(k)} | lt
        leq |= {(0, i) for i in range(k)} | {(i, k - 1) for i in range(k)}
        yield leq


def rooted_rtd_frames(max_worlds):
    """Every rooted reflexive transitive directed frame up to isomorphism
    (with repetitions), as (n, succ) where succ[w] is a list of worlds.

    A finite rooted directed preorder has a greatest cluster, so its cluster
    quotient is a poset with both ends; any such frame arises from a
    naturally labelled poset and a choice of cluster sizes.
    """
    out = []
    for k in range(1, max_worlds + 1):
        for leq in _posets_with_ends(k):
            for sizes in product(range(1, max_worlds + 1), repeat=k):
                if sum(sizes) > max_worlds:
                    continue
                owner = [c for c in range(k) for _ in range(sizes[c])]
                n = len(owner)
                succ = [[u for u in range(n) if (owner[w], owner[u]) in leq] for w in range(n)]
                out.append((n, succ))
    return out


def truth_table(n, succ, f):
    """Boolean array [valuation, world] for a formula in the single atom p.

    Valuation v puts p at world w iff bit w of v is set.
    """
    vals = np.arange(1 << n)[:, None]
    p = ((vals >> np.arange(n)[None, :]) & 1).astype(bool)

    def go(g):
        t = type(g)
        if t is Atom:
            return p
        if t is Top:
            return np.ones_like(p)
        if t is Bot:
            return np.zeros_like(p)
        if t is Not:
            return ~go(g.arg)
        if t in (And, Or, Implies, Iff):
            a, b = go(g.left), go(g.right)
            return {And: a & b, Or: a | b, Implies: ~a | b, Iff: a == b}[t]
        a = go(g.arg)
        cols = [a[:, s].all(axis=1) if t is Box else a[:, s].any(axis=1) for s in succ]
        return np.stack(cols, axis=1)

    return go(f)


def refutable_small(f, frames):
    """Whether some frame in the list refutes f somewhere (single atom p)."""
    return any(not truth_table(n, succ, f).all() for n, succ in frames)
