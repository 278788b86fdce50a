"""S4.2 axiom schemata and refutation search over finite pBAs.

A formula outside S4.2 fails somewhere on a finite pre-Boolean-algebra, so
searching all small pBAs is a sound refutation procedure.  Exhausting the
search without a countermodel only certifies validity up to the bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .formula import Box, Diamond, Formula, Iff, Implies, Not
from .kripke import Model, enumerate_pbas, first_refutation, model_to_json

__all__ = [
    "Schema", "axiom_instance", "Countermodel", "ValidUpToBound", "s42_decide",
    "search_frames", "DEFAULT_BOUNDS",
]

DEFAULT_BOUNDS = (3, 3)


class Schema(str, Enum):
    K = "K"
    Dual = "Dual"
    T = "T"
    Four = "Four"
    Dot2 = "Dot2"


_ARITY = {Schema.K: 2, Schema.Dual: 1, Schema.T: 1, Schema.Four: 1, Schema.Dot2: 1}


def axiom_instance(schema, args) -> Formula:
    schema = Schema(schema)
    args = list(args)
    if len(args) != _ARITY[schema]:
        raise ValueError(f"{schema.value} takes {_ARITY[schema]} argument(s), got {len(args)}")
    if schema is Schema.K:
        phi, psi = args
        return Implies(Box(Implies(phi, psi)), Implies(Box(phi), Box(psi)))
    (phi,) = args
    if schema is Schema.Dual:
        return Iff(Diamond(phi), Not(Box(Not(phi))))
    if schema is Schema.T:
        return Implies(Box(phi), phi)
    if schema is Schema.Four:
        return Implies(Box(phi), Box(Box(phi)))
    return Implies(Diamond(Box(phi)), Box(Diamond(phi)))


@dataclass(frozen=True)
class Countermodel:
    model: Model
    world: object

    def to_json(self) -> dict:
        out = {"result": "countermodel", "world": str(self.world)}
        out["model"] = model_to_json(self.model)
        return out


@dataclass(frozen=True)
class ValidUpToBound:
    m_max: int
    cluster_max: int
    frames_checked: int

    def to_json(self) -> dict:
        return {"result": "valid_up_to_bound", "m_max": self.m_max,
                "cluster_max": self.cluster_max, "frames_checked": self.frames_checked}


def search_frames(m_max: int, cluster_max: int) -> list:
    """All pBA frames within the bounds, ascending by world count.

    Ties keep the enumeration order: base size ascending, then size
    functions lexicographically.
    """
    frames = [fr for m in range(m_max + 1) for fr in enumerate_pbas(m, cluster_max)]
    return sorted(frames, key=len)


def s42_decide(f: Formula, m_max: int = DEFAULT_BOUNDS[0],
               cluster_max: int = DEFAULT_BOUNDS[1]):
    """First pBA countermodel to ``f`` within the bounds, else ``ValidUpToBound``."""
    frames = search_frames(m_max, cluster_max)
    for fr in frames:
        hit = first_refutation(fr, f)
        if hit is not None:
            return Countermodel(*hit)
    return ValidUpToBound(m_max, cluster_max, len(frames))
