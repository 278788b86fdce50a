"""Finite verification toolkit for the modal logic S4.2 and forcing combinatorics."""

from .formula import Formula, parse, render, substitute
from .kripke import Frame, Model, as_pba, enumerate_pbas, satisfies, valid_on_frame
from .theories import Countermodel, ValidUpToBound, axiom_instance, s42_decide

__version__ = "0.1.0"
