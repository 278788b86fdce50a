"""A finite abstract generic multiverse of control statements.

A state records the observable values of a family of control statements:
pushed buttons, switch bits, the value of an n-switch, a ratchet value
``(alpha, k)`` standing for ``omega*alpha + k``, and ``t_sup``, the supremum
of the pushed T-buttons (``INF`` once unboundedly many are pushed).  The
successor relation is the full "some extension reaches" relation, so it is
reflexive and transitive by construction.

Observation atoms::

    b:i      button i pushed             s:i    switch i on
    sw:j     n-switch value is j         r:a.k  ratchet value >= omega*a + k
    T:i      t_sup < i (T_i and every later T still hold)
    Rk:k     t_sup == k                  supinf t_sup is infinite
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from itertools import product

import numpy as np

from .formula import (
    And, Atom, Box, Diamond, Formula, Implies, Not, atoms as formula_atoms, conj, disj,
)
from .kripke import Frame, Model, extension, iter_bits, satisfies

__all__ = [
    "INF", "Regime", "ControlFamily", "MState", "StateSpaceTooLarge",
    "initial_state", "state_space", "allows", "successors", "observe",
    "as_kripke_model", "has_headroom", "check_control_axioms",
    "check_independence", "ControlReport", "IndependenceReport",
    "validate_statement",
]

INF = math.inf
DEFAULT_CAP = 200_000


class Regime(str, Enum):
    INDEPENDENT = "independent"
    HYBRID = "hybrid"


@dataclass(frozen=True)
class ControlFamily:
    """Bounds and regime of a control family.

    ``nswitch`` is the n-switch arity (0 for none).  ``ratchet`` is
    ``(alpha_max, k_max)`` or ``None``.  ``t_buttons`` truncates the T-button
    family at K; ``t_unbounded`` adds the absorbing "infinitely many pushed"
    value.  ``miswire`` lists ``(button, switch)`` pairs whose ``b:`` atom
    reads the switch instead (negative controls only).

    In the ``HYBRID`` regime the n-switch is entangled with the T-buttons:
    moving it while ``t_sup`` is finite also pushes a T-button, and with
    ``sw_decoupled=False`` its value is pinned to ``t_sup mod n`` whenever
    ``t_sup`` is finite.
    """

    buttons: int = 0
    switches: int = 0
    nswitch: int = 0
    ratchet: tuple | None = None
    t_buttons: int = 0
    t_unbounded: bool = False
    regime: Regime = Regime.INDEPENDENT
    sw_decoupled: bool = True
    miswire: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "regime", Regime(self.regime))
        if self.ratchet is not None:
            object.__setattr__(self, "ratchet", tuple(self.ratchet))
        object.__setattr__(self, "miswire", tuple(tuple(p) for p in self.miswire))
        if min(self.buttons, self.switches, self.t_buttons) < 0:
            raise ValueError("counts must be non-negative")
        if self.nswitch == 1 or self.nswitch < 0:
            raise ValueError("n-switch arity must be 0 (absent) or at least 2")
        if self.ratchet is not None and (len(self.ratchet) != 2 or min(self.ratchet) < 1):
            raise ValueError("ratchet bounds must be a pair of positive integers")
        for b, s in self.miswire:
            if not (0 <= b < self.buttons and 0 <= s < self.switches):
                raise ValueError(f"miswire {(b, s)} out of range")
        if self.regime is Regime.HYBRID and not self.t_buttons:
            raise ValueError("the hybrid regime needs T-buttons")

    @property
    def arity(self) -> int:
        """Number of n-switch values; an absent n-switch is constantly 0."""
        return max(self.nswitch, 1)

    @property
    def t_values(self) -> list:
        return list(range(self.t_buttons + 1)) + ([INF] if self.t_unbounded else [])

    @property
    def ratchet_values(self) -> list:
        if self.ratchet is None:
            return [None]
        a, k = self.ratchet
        return [(x, y) for x in range(a) for y in range(k)]

    def atom_names(self) -> list:
        out = [f"b:{i}" for i in range(self.buttons)]
        out += [f"s:{i}" for i in range(self.switches)]
        out += [f"sw:{j}" for j in range(self.arity)]
        if self.ratchet is not None:
            out += [ratchet_atom(v) for v in self.ratchet_values]
        if self.t_buttons:
            out += [f"T:{i}" for i in range(1, self.t_buttons + 1)]
            out += [f"Rk:{k}" for k in range(self.t_buttons + 1)]
            if self.t_unbounded:
                out.append("supinf")
        return out

    def to_json(self) -> dict:
        out = asdict(self)
        out["regime"] = self.regime.value
        out["ratchet"] = list(self.ratchet) if self.ratchet is not None else None
        out["miswire"] = [list(p) for p in self.miswire]
        return out

    @classmethod
    def from_json(cls, obj) -> "ControlFamily":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(**obj)


def ratchet_atom(v) -> str:
    return f"r:{v[0]}.{v[1]}"


@dataclass(frozen=True, order=True)
class MState:
    pushed: frozenset = frozenset()
    switch_bits: tuple = ()
    nswitch_val: int = 0
    ratchet_val: tuple | None = None
    t_sup: float = 0

    def label(self) -> str:
        parts = ["b={" + ",".join(map(str, sorted(self.pushed))) + "}"]
        parts.append("s=" + "".join(str(b) for b in self.switch_bits))
        parts.append(f"sw={self.nswitch_val}")
        if self.ratchet_val is not None:
            parts.append(f"r={self.ratchet_val[0]}.{self.ratchet_val[1]}")
        parts.append("t=" + ("inf" if self.t_sup == INF else str(self.t_sup)))
        return "|".join(parts)

    def __str__(self):
        return self.label()

    def to_json(self) -> dict:
        return {
            "pushed": sorted(self.pushed),
            "switches": list(self.switch_bits),
            "nswitch": self.nswitch_val,
            "ratchet": list(self.ratchet_val) if self.ratchet_val is not None else None,
            "t_sup": "inf" if self.t_sup == INF else self.t_sup,
        }


class StateSpaceTooLarge(RuntimeError):
    pass


def initial_state(fam: ControlFamily) -> MState:
    """Nothing pushed, every switch off, n-switch at 0."""
    return MState(frozenset(), (0,) * fam.switches, 0,
                  (0, 0) if fam.ratchet is not None else None, 0)


def _well_formed(fam, s: MState) -> bool:
    if fam.regime is Regime.HYBRID and not fam.sw_decoupled and s.t_sup != INF:
        return s.nswitch_val == s.t_sup % fam.arity
    return True


def state_space(fam: ControlFamily) -> list:
    """Every state within the family's bounds, in canonical order."""
    out = []
    for pm, sm, j, r, t in product(range(1 << fam.buttons), range(1 << fam.switches),
                                   range(fam.arity), fam.ratchet_values, fam.t_values):
        s = MState(frozenset(iter_bits(pm)),
                   tuple(sm >> i & 1 for i in range(fam.switches)), j, r, t)
        if _well_formed(fam, s):
            out.append(s)
    return out


def allows(fam: ControlFamily, s: MState, s2: MState) -> bool:
    """Whether ``s2`` is reachable from ``s`` by some extension."""
    if not s.pushed <= s2.pushed:
        return False
    if s.ratchet_val is not None and s2.ratchet_val < s.ratchet_val:
        return False
    if s2.t_sup < s.t_sup:
        return False
    if fam.regime is Regime.HYBRID:
        if not _well_formed(fam, s2):
            return False
        if s2.nswitch_val != s.nswitch_val and s.t_sup != INF and s2.t_sup == s.t_sup:
            return False
    return True


def successors(fam: ControlFamily, s: MState) -> set:
    return {s2 for s2 in state_space(fam) if allows(fam, s, s2)}


def observe(fam: ControlFamily, s: MState) -> dict:
    """Truth value of every observation atom at ``s``."""
    wired = dict(fam.miswire)
    out = {}
    for i in range(fam.buttons):
        out[f"b:{i}"] = bool(s.switch_bits[wired[i]]) if i in wired else i in s.pushed
    for i in range(fam.switches):
        out[f"s:{i}"] = bool(s.switch_bits[i])
    for j in range(fam.arity):
        out[f"sw:{j}"] = s.nswitch_val == j
    for v in fam.ratchet_values if fam.ratchet is not None else ():
        out[ratchet_atom(v)] = s.ratchet_val >= v
    if fam.t_buttons:
        for i in range(1, fam.t_buttons + 1):
            out[f"T:{i}"] = s.t_sup < i
        for k in range(fam.t_buttons + 1):
            out[f"Rk:{k}"] = s.t_sup == k
        if fam.t_unbounded:
            out["supinf"] = s.t_sup == INF
    return out


def validate_statement(fam: ControlFamily, f: Formula) -> None:
    """Reject statements mentioning observations the family does not declare."""
    unknown = formula_atoms(f) - set(fam.atom_names())
    if unknown:
        raise ValueError(f"statement uses undeclared controls: {sorted(unknown)}")


def has_headroom(fam: ControlFamily, s: MState, span: int = 1) -> bool:
    """True unless a truncated chain is within ``span`` steps of its bound.

    ``t_sup`` needs ``span`` finite values above it (``INF`` always has
    room); the ratchet needs a further ``alpha`` block.
    """
    if fam.t_buttons and s.t_sup != INF and s.t_sup + span > fam.t_buttons:
        return False
    if fam.ratchet is not None and s.ratchet_val[0] >= fam.ratchet[0] - 1:
        return False
    return True


# ---------------------------------------------------------------------------
# Kripke export

class _Space:
    """Reachable states as parallel component arrays, canonical order."""

    def __init__(self, fam, initial, cap):
        dims = (1 << fam.buttons, 1 << fam.switches, fam.arity,
                len(fam.ratchet_values), len(fam.t_values))
        total = int(np.prod(dims))
        if total > cap:
            raise StateSpaceTooLarge(f"{total} states exceed the cap of {cap}")
        P, S, J, R, T = (a.ravel() for a in np.indices(dims))
        K = fam.t_buttons
        finite = T <= K
        keep = np.ones(total, dtype=bool)
        if fam.regime is Regime.HYBRID and not fam.sw_decoupled:
            keep &= ~finite | (J == T % fam.arity)
        ridx = fam.ratchet_values.index(initial.ratchet_val)
        tidx = fam.t_values.index(initial.t_sup)
        pm = sum(1 << i for i in initial.pushed)
        sm = sum(b << i for i, b in enumerate(initial.switch_bits))
        init_flat = np.ravel_multi_index((pm, sm, initial.nswitch_val, ridx, tidx), dims)
        if not keep[init_flat]:
            raise ValueError(f"initial state {initial} violates the regime")
        self.fam, self.K = fam, K
        self.P, self.S, self.J, self.R, self.T = P[keep], S[keep], J[keep], R[keep], T[keep]
        self.finite = self.T <= K
        i0 = int(np.flatnonzero(np.flatnonzero(keep) == init_flat)[0])
        reach = self.succ_bool(i0)
        self.P, self.S, self.J, self.R, self.T = (a[reach] for a in (self.P, self.S, self.J, self.R, self.T))
        self.finite = self.T <= K
        self.n = len(self.P)
        self.initial_index = int(np.flatnonzero(np.flatnonzero(reach) == i0)[0])

    def succ_bool(self, i):
        P, R, T, J = self.P, self.R, self.T, self.J
        ok = ((P & P[i]) == P[i]) & (R >= R[i]) & (T >= T[i])
        if self.fam.regime is Regime.HYBRID and self.T[i] <= self.K:
            ok &= (J == J[i]) | (T != T[i])
        return ok

    def state(self, i) -> MState:
        fam = self.fam
        return MState(frozenset(iter_bits(int(self.P[i]))),
                      tuple(int(self.S[i]) >> b & 1 for b in range(fam.switches)),
                      int(self.J[i]), fam.ratchet_values[int(self.R[i])],
                      fam.t_values[int(self.T[i])])

    def to_mask(self, flags) -> int:
        return int.from_bytes(np.packbits(flags, bitorder="little").tobytes(), "little")

    def atom_masks(self) -> dict:
        fam = self.fam
        wired = dict(fam.miswire)
        out = {}
        for i in range(fam.buttons):
            src = (self.S >> wired[i]) if i in wired else (self.P >> i)
            out[f"b:{i}"] = self.to_mask((src & 1).astype(bool))
        for i in range(fam.switches):
            out[f"s:{i}"] = self.to_mask(((self.S >> i) & 1).astype(bool))
        for j in range(fam.arity):
            out[f"sw:{j}"] = self.to_mask(self.J == j)
        if fam.ratchet is not None:
            for idx, v in enumerate(fam.ratchet_values):
                out[ratchet_atom(v)] = self.to_mask(self.R >= idx)
        if fam.t_buttons:
            for i in range(1, self.K + 1):
                out[f"T:{i}"] = self.to_mask(self.T < i)
            for k in range(self.K + 1):
                out[f"Rk:{k}"] = self.to_mask(self.T == k)
            if fam.t_unbounded:
                out["supinf"] = self.to_mask(self.T == self.K + 1)
        return out


def as_kripke_model(fam: ControlFamily, initial: MState | None = None,
                    cap: int = DEFAULT_CAP):
    """The reachable part of the multiverse as ``(Model, initial_world)``.

    Worlds are :class:`MState` values in canonical order.
    """
    if initial is None:
        initial = initial_state(fam)
    sp = _Space(fam, initial, cap)
    worlds = [sp.state(i) for i in range(sp.n)]
    masks = [sp.to_mask(sp.succ_bool(i)) for i in range(sp.n)]
    frame = Frame.from_masks(worlds, masks)
    return Model.from_masks(frame, sp.atom_masks()), worlds[sp.initial_index]


# ---------------------------------------------------------------------------
# reports

@dataclass
class Check:
    control: str
    clause: str
    passed: bool
    witnesses: list = field(default_factory=list)

    def to_json(self):
        return {"control": self.control, "clause": self.clause, "passed": self.passed,
                "witnesses": [str(w) for w in self.witnesses]}


@dataclass
class ControlReport:
    checks: list

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self, clause=None) -> list:
        return [c for c in self.checks if not c.passed and (clause is None or c.clause == clause)]

    def get(self, control, clause) -> Check:
        return next(c for c in self.checks if c.control == control and c.clause == clause)

    def to_json(self):
        return {"passed": self.passed, "checks": [c.to_json() for c in self.checks]}


MAX_WITNESSES = 5


def _box_check(model, init, control, clause, body, memo):
    fr = model.frame
    ok = satisfies(model, init, Box(body), memo)
    witnesses = []
    if not ok:
        bad = fr.succ[fr.index[init]] & ~extension(model, body, memo)
        witnesses = [fr.worlds[j] for j in list(iter_bits(bad))[:MAX_WITNESSES]]
    return Check(control, clause, ok, witnesses)


def _t_config_literals(fam):
    """Formulas pinning down ``t_sup`` exactly, one per T value."""
    lits = [Atom(f"Rk:{k}") for k in range(fam.t_buttons + 1)]
    if fam.t_unbounded:
        lits.append(Atom("supinf"))
    return lits


def check_control_axioms(fam: ControlFamily, initial: MState | None = None) -> ControlReport:
    """Evaluate the defining modal properties of every control at ``initial``.

    All checks except ratchet increasability are formulas ``[]phi`` evaluated
    with :func:`satisfies`; increasability is asserted only at states where
    ``has_headroom`` holds.
    """
    model, init = as_kripke_model(fam, initial)
    memo = {}
    checks = []
    for i in range(fam.switches):
        s = Atom(f"s:{i}")
        checks.append(_box_check(model, init, f"s:{i}", "switch",
                                 And(Diamond(s), Diamond(Not(s))), memo))
    buttons = [(f"b:{i}", Atom(f"b:{i}")) for i in range(fam.buttons)]
    buttons += [(f"T:{i}", Not(Atom(f"T:{i}"))) for i in range(1, fam.t_buttons + 1)]
    for name, b in buttons:
        checks.append(_box_check(model, init, name, "button", Diamond(Box(b)), memo))
        checks.append(_box_check(model, init, name, "pure", Implies(b, Box(b)), memo))
    n = fam.arity
    if fam.nswitch:
        sw = [Atom(f"sw:{j}") for j in range(n)]
        exactly = conj([disj(sw)] + [Not(And(sw[a], sw[b]))
                                     for a in range(n) for b in range(a + 1, n)])
        checks.append(_box_check(model, init, "sw", "exactly-one", exactly, memo))
        checks.append(_box_check(model, init, "sw", "reachability",
                                 conj(Diamond(x) for x in sw), memo))
        if fam.buttons or fam.t_buttons:
            b_lits = [[Atom(f"b:{i}"), Not(Atom(f"b:{i}"))] for i in range(fam.buttons)]
            t_lits = [_t_config_literals(fam)] if fam.t_buttons else []
            parts = []
            for combo in product(*b_lits, *t_lits):
                c = conj(combo)
                parts.append(Implies(c, conj(Diamond(And(c, x)) for x in sw)))
            checks.append(_box_check(model, init, "sw", "independent-of-buttons",
                                     conj(parts), memo))
    if fam.ratchet is not None:
        vals = fam.ratchet_values
        ratoms = [Atom(ratchet_atom(v)) for v in vals]
        mono = conj(Implies(ratoms[i + 1], ratoms[i]) for i in range(len(vals) - 1))
        checks.append(_box_check(model, init, "r", "monotone", mono, memo))
        for v, r in zip(vals, ratoms):
            checks.append(_box_check(model, init, ratchet_atom(v), "pure",
                                     Implies(r, Box(r)), memo))
        exact = []
        for i in range(len(vals)):
            e = ratoms[i] if i == len(vals) - 1 else And(ratoms[i], Not(ratoms[i + 1]))
            exact.append(extension(model, Diamond(e), memo))
        fr = model.frame
        bad = []
        for idx, st in enumerate(fr.worlds):
            if st.ratchet_val[0] >= fam.ratchet[0] - 1:
                continue  # no headroom in the last alpha block
            cur = vals.index(st.ratchet_val)
            if any(not (exact[t] >> idx & 1) for t in range(cur + 1, len(vals))):
                bad.append(st)
        checks.append(Check("r", "increasable", not bad, bad[:MAX_WITNESSES]))
    return ControlReport(checks)


@dataclass
class IndependenceReport:
    initial_unpushed: bool
    failures: list            # dicts: state, control, target, culprits
    failing_pairs: list       # sorted (control moved, control disturbed)

    @property
    def passed(self) -> bool:
        return self.initial_unpushed and not self.failures

    def to_json(self):
        return {"passed": self.passed, "initial_unpushed": self.initial_unpushed,
                "failing_pairs": [list(p) for p in self.failing_pairs],
                "failures": self.failures[:50], "failure_count": len(self.failures)}


def _controls(fam, model):
    """(name, observable value per world, value -> targets) for every control."""
    worlds = model.frame.worlds
    out = []
    wired = dict(fam.miswire)
    for i in range(fam.buttons):
        if i in wired:
            obs = [w.switch_bits[wired[i]] for w in worlds]
        else:
            obs = [int(i in w.pushed) for w in worlds]
        out.append((f"b:{i}", obs, lambda x: [1] if x == 0 else []))
    for i in range(fam.switches):
        out.append((f"s:{i}", [w.switch_bits[i] for w in worlds], lambda x: [1 - x]))
    if fam.nswitch:
        n = fam.arity
        out.append(("sw", [w.nswitch_val for w in worlds],
                    lambda x, n=n: [j for j in range(n) if j != x]))
    if fam.ratchet is not None:
        vals = fam.ratchet_values
        out.append(("r", [vals.index(w.ratchet_val) for w in worlds],
                    lambda x, m=len(vals): list(range(x + 1, m))))
    if fam.t_buttons:
        tv = fam.t_values
        out.append(("T", [tv.index(w.t_sup) for w in worlds],
                    lambda x, m=len(tv): list(range(x + 1, m))))
    return out


def check_independence(fam: ControlFamily, initial: MState | None = None) -> IndependenceReport:
    """Every single-control move is realizable without disturbing the others.

    Checked at every reachable state (the "necessarily").  A failure lists
    the controls each of which, if allowed to change as well, would make the
    move realizable.
    """
    model, init = as_kripke_model(fam, initial)
    fr = model.frame
    controls = _controls(fam, model)
    cls = []
    for _, obs, _ in controls:
        by_val = {}
        for idx, v in enumerate(obs):
            by_val[v] = by_val.get(v, 0) | (1 << idx)
        cls.append(by_val)
    full = fr.full
    failures, pairs = [], set()
    nc = len(controls)
    for idx, st in enumerate(fr.worlds):
        succ = fr.succ[idx]
        same = [cls[c][controls[c][1][idx]] for c in range(nc)]
        for x, (name, obs, targets) in enumerate(controls):
            keep = full
            for c in range(nc):
                if c != x:
                    keep &= same[c]
            for y in targets(obs[idx]):
                goal = succ & cls[x].get(y, 0)
                if goal & keep:
                    continue
                culprits = []
                for c in range(nc):
                    if c == x:
                        continue
                    loose = full
                    for d in range(nc):
                        if d not in (x, c):
                            loose &= same[d]
                    if goal & loose:
                        culprits.append(controls[c][0])
                for c in culprits or ["*"]:
                    pairs.add((name, c))
                failures.append({"state": str(st), "control": name, "target": y,
                                 "culprits": culprits})
    init_ok = (not init.pushed and init.t_sup == 0
               and (init.ratchet_val is None or init.ratchet_val == (0, 0)))
    if fam.miswire:
        wired = dict(fam.miswire)
        init_ok = init_ok and all(not init.switch_bits[s] for s in wired.values())
    return IndependenceReport(init_ok, failures, sorted(pairs))
