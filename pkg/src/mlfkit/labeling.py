"""Labelings of pBA frames by control statements, and their verification.

A labeling assigns a statement to each world of a frame.  It is correct
over a multiverse when (1) every reachable state satisfies exactly one
label, (2) a state satisfying the label of ``w`` can reach a state
satisfying the label of ``u`` exactly when ``w R u``, and (3) the initial
state satisfies the label of the initial world.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import And, Atom, Diamond, Formula, Not, Or, conj, disj, substitute
from .kripke import Frame, Model, PBAStructure, extension, iter_bits, satisfies
from .multiverse import (
    INF, ControlFamily, MState, Regime, as_kripke_model, initial_state, ratchet_atom,
)

__all__ = [
    "Labeling", "VerificationReport", "NSwitchReport", "binary_nswitch",
    "ratchet_nswitch", "check_nswitch", "product_labeling", "hybrid_labeling",
    "verify_labeling", "translate_valuation", "check_translation",
    "translation_commutes", "LabelingError",
]


class LabelingError(ValueError):
    pass


@dataclass
class Labeling:
    frame: Frame
    statements: dict
    initial_world: object
    pba: PBAStructure | None = None

    def __post_init__(self):
        if set(self.statements) != set(self.frame.worlds):
            raise LabelingError("statements must be keyed exactly by the frame's worlds")
        if self.initial_world not in self.frame.index:
            raise LabelingError(f"unknown initial world {self.initial_world!r}")

    def __getitem__(self, w) -> Formula:
        return self.statements[w]


def _lit(name, on):
    return Atom(name) if on else Not(Atom(name))


# ---------------------------------------------------------------------------
# n-switches built from simpler controls

def binary_nswitch(m: int) -> list:
    """``2**m`` statements over switches ``s:0..s:m-1``; bit i of j is ``s:i``."""
    if m < 1:
        raise ValueError("need at least one switch")
    return [conj(_lit(f"s:{i}", j >> i & 1) for i in range(m)) for j in range(1 << m)]


def ratchet_nswitch(n: int, bounds) -> list:
    """n statements over a ratchet: statement j says the value's k is j mod n."""
    alpha_max, k_max = bounds
    if n < 2:
        raise ValueError("an n-switch needs n >= 2")
    if k_max < 2 * n:
        raise ValueError(f"k_max={k_max} leaves no headroom for n={n} (need >= {2 * n})")
    vals = [(a, k) for a in range(alpha_max) for k in range(k_max)]
    exact = []
    for i, v in enumerate(vals):
        r = Atom(ratchet_atom(v))
        exact.append(r if i == len(vals) - 1 else And(r, Not(Atom(ratchet_atom(vals[i + 1])))))
    return [disj(e for e, v in zip(exact, vals) if v[1] % n == j) for j in range(n)]


@dataclass
class NSwitchReport:
    exactly_one: bool
    reachable: bool
    witnesses: list = field(default_factory=list)
    checked_reachability: int = 0

    @property
    def passed(self) -> bool:
        return self.exactly_one and self.reachable

    def to_json(self):
        return {"exactly_one": self.exactly_one, "reachable": self.reachable,
                "checked_reachability": self.checked_reachability,
                "witnesses": [[str(s), what] for s, what in self.witnesses]}


def check_nswitch(statements, fam: ControlFamily, initial=None, interior=None) -> NSwitchReport:
    """Exactly one statement everywhere; every statement reachable from
    every state accepted by ``interior`` (all states by default)."""
    model, _ = as_kripke_model(fam, initial)
    fr, memo = model.frame, {}
    ext = [extension(model, s, memo) for s in statements]
    poss = [extension(model, Diamond(s), memo) for s in statements]
    witnesses, one_ok, reach_ok, checked = [], True, True, 0
    for idx, st in enumerate(fr.worlds):
        hits = [j for j, e in enumerate(ext) if e >> idx & 1]
        if len(hits) != 1:
            one_ok = False
            witnesses.append((st, f"satisfies {hits}"))
        if interior is not None and not interior(st):
            continue
        checked += 1
        missing = [j for j, p in enumerate(poss) if not p >> idx & 1]
        if missing:
            reach_ok = False
            witnesses.append((st, f"cannot reach {missing}"))
    return NSwitchReport(one_ok, reach_ok, witnesses, checked)


# ---------------------------------------------------------------------------
# labelings

def _uniform_size(pba: PBAStructure) -> int:
    if not pba.is_uniform():
        raise LabelingError(f"cluster sizes {pba.sizes()} are not uniform; pad first")
    return pba.sizes()[0]


def _button_config(A, m):
    """Pushed buttons first, then unpushed, each ascending."""
    return [Atom(f"b:{j}") for j in sorted(A)] + \
           [Not(Atom(f"b:{j}")) for j in range(m) if j not in A]


def product_labeling(pba: PBAStructure, fam: ControlFamily) -> Labeling:
    """Label ``w_i^A`` by "exactly the buttons in A are pushed, n-switch at i"."""
    n = _uniform_size(pba)
    if fam.regime is not Regime.INDEPENDENT:
        raise LabelingError("the product labeling needs an independent family")
    if fam.buttons != pba.base_size:
        raise LabelingError(f"family has {fam.buttons} buttons, pBA base has {pba.base_size}")
    if fam.arity != n:
        raise LabelingError(f"n-switch arity {fam.arity} does not match cluster size {n}")
    stmts = {}
    for A in pba.subsets:
        cfg = _button_config(A, pba.base_size)
        for i, w in enumerate(pba.cluster_members[A]):
            stmts[w] = conj(cfg + [Atom(f"sw:{i}")])
    return Labeling(pba.to_frame(), stmts, pba.world(frozenset(), 0), pba)


def theta(j: int, n: int, K: int) -> Formula:
    """``t_sup`` is finite and congruent to j mod n."""
    return disj(Atom(f"Rk:{k}") for k in range(K + 1) if k % n == j)


def hybrid_labeling(pba: PBAStructure, fam: ControlFamily) -> Labeling:
    """Below the top cluster move with the T-button "almost" n-switch; in the
    top cluster fall back to the real n-switch once ``t_sup`` is infinite."""
    n = _uniform_size(pba)
    if fam.regime is not Regime.HYBRID:
        raise LabelingError("the hybrid labeling needs a hybrid family")
    if fam.buttons != pba.base_size:
        raise LabelingError(f"family has {fam.buttons} buttons, pBA base has {pba.base_size}")
    if fam.nswitch != n:
        raise LabelingError(f"n-switch arity {fam.nswitch} does not match cluster size {n}")
    if not fam.t_unbounded:
        raise LabelingError("the hybrid labeling needs the unbounded T value")
    m, K = pba.base_size, fam.t_buttons
    top = frozenset(range(m))
    stmts = {}
    for A in pba.subsets:
        psi = conj(_button_config(A, m))
        for j, w in enumerate(pba.cluster_members[A]):
            body = And(psi, theta(j, n, K))
            if A == top:
                body = Or(body, And(Atom("supinf"), Atom(f"sw:{j}")))
            stmts[w] = body
    return Labeling(pba.to_frame(), stmts, pba.world(frozenset(), 0), pba)


# ---------------------------------------------------------------------------
# verification

@dataclass
class VerificationReport:
    partition_ok: bool
    correspondence_ok: bool
    initial_ok: bool
    witnesses: list = field(default_factory=list)   # (clause, state, detail)
    exempt: list = field(default_factory=list)      # states spared the back direction
    states: int = 0

    @property
    def passed(self) -> bool:
        return self.partition_ok and self.correspondence_ok and self.initial_ok

    def to_json(self):
        return {
            "passed": self.passed, "partition_ok": self.partition_ok,
            "correspondence_ok": self.correspondence_ok, "initial_ok": self.initial_ok,
            "states": self.states, "exempt_states": len(self.exempt),
            "witnesses": [[c, str(s), d] for c, s, d in self.witnesses[:50]],
            "witness_count": len(self.witnesses),
        }


def verify_labeling(lab: Labeling, fam: ControlFamily, initial: MState | None = None,
                    interior=None, multiverse=None) -> VerificationReport:
    """Check the three labeling clauses over every reachable state.

    ``interior`` (a predicate on states) spares states where a truncated
    chain has run out of room from the "w R u implies reachable" direction;
    spared states are listed in ``exempt``.  ``multiverse`` may pass a
    precomputed ``as_kripke_model`` result.
    """
    model, init = multiverse or as_kripke_model(fam, initial)
    fr, memo = model.frame, {}
    worlds = lab.frame.worlds
    ext = [extension(model, lab[w], memo) for w in worlds]
    dia = [extension(model, Diamond(lab[w]), memo) for w in worlds]
    witnesses = []

    covered, twice = 0, 0
    for e in ext:
        twice |= covered & e
        covered |= e
    part_bad = (fr.full & ~covered) | twice
    for idx in iter_bits(part_bad):
        hits = [str(w) for w, e in zip(worlds, ext) if e >> idx & 1]
        witnesses.append(("partition", fr.worlds[idx], f"satisfies {hits}"))

    spared = 0
    if interior is not None:
        spared = fr.mask(s for s in fr.worlds if not interior(s))
    corr_ok = True
    for a, w in enumerate(worlds):
        if not ext[a]:
            continue
        for b, u in enumerate(worlds):
            if lab.frame.related(w, u):
                bad = ext[a] & ~dia[b] & ~spared
                why = f"{w} R {u} but label of {u} unreachable"
            else:
                bad = ext[a] & dia[b]
                why = f"not {w} R {u} but label of {u} reachable"
            if bad:
                corr_ok = False
                witnesses.extend(("correspondence", fr.worlds[i], why) for i in iter_bits(bad))

    init_ok = satisfies(model, init, lab[lab.initial_world], memo)
    if not init_ok:
        witnesses.append(("initial", init, f"label of {lab.initial_world} fails"))
    return VerificationReport(not part_bad, corr_ok, init_ok, witnesses,
                              fr.worlds_of(spared), len(fr.worlds))


def translate_valuation(lab: Labeling, valuation) -> dict:
    """``p`` goes to the disjunction of the labels of the worlds in ``v(p)``."""
    out = {}
    for p, ws in valuation.items():
        ws = set(ws)
        unknown = ws - set(lab.frame.worlds)
        if unknown:
            raise LabelingError(f"valuation of {p} mentions unknown worlds {sorted(map(str, unknown))}")
        out[p] = disj(lab[w] for w in lab.frame.worlds if w in ws)
    return out


def check_translation(lab: Labeling, fam: ControlFamily, initial, model: Model,
                      f: Formula, multiverse=None) -> bool:
    """Truth of ``f`` at the initial world equals truth of its translation
    at the initial state of the multiverse."""
    if model.frame != lab.frame:
        raise LabelingError("model is not over the labeled frame")
    mv, init = multiverse or as_kripke_model(fam, initial)
    sub = translate_valuation(lab, model.valuation)
    left = satisfies(model, lab.initial_world, f)
    return left == satisfies(mv, init, substitute(f, sub))


def translation_commutes(lab: Labeling, fam: ControlFamily, initial=None,
                         multiverse=None) -> bool:
    """Whether the world-set to state-set map commutes with diamond.

    For every set X of worlds, the states satisfying the translation of
    "X is possible" must be exactly the union of label extensions over the
    worlds that see X.  Together with clause 1 this yields the translation
    equivalence for every formula of every depth, so it is an exhaustive
    certificate for the translation check.
    """
    mv, _ = multiverse or as_kripke_model(fam, initial)
    memo = {}
    worlds = lab.frame.worlds
    ext = [extension(mv, lab[w], memo) for w in worlds]
    dia = [extension(mv, Diamond(lab[w]), memo) for w in worlds]
    succ = lab.frame.succ
    for X in range(1 << len(worlds)):
        lhs = 0
        for b in iter_bits(X):
            lhs |= dia[b]
        rhs = 0
        for a in range(len(worlds)):
            if succ[a] & X:
                rhs |= ext[a]
        if lhs != rhs:
            return False
    return True
