"""
Refuting formulas on small pre-Boolean algebras
===============================================

Walk through the bounded decision procedure: axioms survive every small
pBA, non-theorems get a concrete countermodel.
"""

from mlfkit.formula import parse
from mlfkit.kripke import as_pba, enumerate_pbas, frame_properties, to_dot
from mlfkit.theories import Countermodel, s42_decide

# the four-world diamond with singleton clusters is P({0,1})
frames = list(enumerate_pbas(2, 1))
print(len(frames), "frame(s) with base size 2 and singleton clusters")
print(frame_properties(frames[0]))

# .2 holds on every frame in the search space
print(s42_decide(parse("<>[]p -> []<>p"), 2, 2))

# the S5 axiom fails already on a two-world chain
res = s42_decide(parse("<>p -> []<>p"), 1, 1)
assert isinstance(res, Countermodel)
print("refuted at", res.world, "with", res.model.valuation)

# .3 (linearity) is not an S4.2 principle either
res = s42_decide(parse("[]([]p -> q) | []([]q -> p)"), 2, 2)
print("linearity refuted on", len(res.model.frame), "worlds")
print("cluster sizes", as_pba(res.model.frame).sizes())

# graphviz source for the countermodel frame
print(to_dot(res.model.frame, "linearity"))
