"""Seeded, replayable random structures.

The generator is SplitMix64 so that corpora can be reproduced from the seed
in any language (constants listed in ``docs/formats.md``).
"""

from __future__ import annotations

from itertools import product

from .formula import (
    BOT, TOP, And, Atom, Box, Diamond, Iff, Implies, Not, Or,
)

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * MIX1) & MASK64
        z = ((z ^ (z >> 27)) * MIX2) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform-ish integer in ``[0, n)`` (plain modulo reduction)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next() % n

    def choice(self, seq):
        return seq[self.below(len(seq))]


# (weight, kind).  Modal kinds are skipped when the depth budget is spent by
# re-drawing from the non-modal table, so the stream stays aligned.
OP_TABLE = (
    (20, "leaf"), (12, "not"), (14, "and"), (14, "or"), (10, "implies"),
    (4, "iff"), (13, "box"), (13, "diamond"),
)
NONMODAL_TABLE = tuple(e for e in OP_TABLE if e[1] not in ("box", "diamond"))


def _draw(rng, table):
    total = sum(w for w, _ in table)
    r = rng.below(total)
    for w, kind in table:
        if r < w:
            return kind
        r -= w
    raise AssertionError  # pragma: no cover


def random_formula(rng: SplitMix64, atom_names, max_depth: int, height: int = 4,
                   constants: bool = False):
    """Draw one formula with modal depth at most ``max_depth``.

    ``height`` bounds the syntactic height; at height 0 a leaf is forced.
    Leaves are atoms, or ``true``/``false`` with probability 1/8 each when
    ``constants`` is set.
    """
    atom_names = list(atom_names)

    def leaf():
        if constants:
            r = rng.below(8)
            if r == 0:
                return TOP
            if r == 1:
                return BOT
        return Atom(rng.choice(atom_names))

    def go(h, d):
        if h == 0:
            return leaf()
        kind = _draw(rng, OP_TABLE if d > 0 else NONMODAL_TABLE)
        if kind == "leaf":
            return leaf()
        if kind == "not":
            return Not(go(h - 1, d))
        if kind == "box":
            return Box(go(h - 1, d - 1))
        if kind == "diamond":
            return Diamond(go(h - 1, d - 1))
        cls = {"and": And, "or": Or, "implies": Implies, "iff": Iff}[kind]
        return cls(go(h - 1, d), go(h - 1, d))

    return go(height, max_depth)


def formula_corpus(seed: int, count: int, atom_names, max_depth: int, height: int = 4):
    rng = SplitMix64(seed)
    return [random_formula(rng, atom_names, max_depth, height) for _ in range(count)]


def all_formulas(atom_names, max_size: int, max_depth: int, constants: bool = True):
    """Every formula with at most ``max_size`` nodes and bounded modal depth.

    Returned grouped by size, deterministic order.  Used for the exhaustive
    small-formula sweeps.
    """
    leaves = [Atom(a) for a in atom_names] + ([TOP, BOT] if constants else [])
    # by_size[n][d] = formulas of exactly n nodes and modal depth exactly d
    by_size = {1: {0: leaves}}
    for n in range(2, max_size + 1):
        layer = {}
        for d, fs in by_size[n - 1].items():
            layer.setdefault(d, []).extend(Not(f) for f in fs)
            if d + 1 <= max_depth:
                layer.setdefault(d + 1, []).extend(Box(f) for f in fs)
                layer[d + 1].extend(Diamond(f) for f in fs)
        for ln in range(1, n - 1):
            rn = n - 1 - ln
            for (dl, ls), (dr, rs) in product(by_size[ln].items(), by_size[rn].items()):
                d = max(dl, dr)
                bucket = layer.setdefault(d, [])
                for cls in (And, Or, Implies):
                    bucket.extend(cls(a, b) for a in ls for b in rs)
        by_size[n] = layer
    out = []
    for n in range(1, max_size + 1):
        for d in sorted(by_size[n]):
            out.extend(by_size[n][d])
    return out
