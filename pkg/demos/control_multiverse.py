"""
Buttons, switches and a finite multiverse
=========================================

Build multiverses of control statements, check their modal behaviour, and
watch the product labeling line up with a pBA.
"""

import numpy as np

from mlfkit.kripke import as_pba, pba_frame
from mlfkit.labeling import product_labeling, verify_labeling
from mlfkit.multiverse import (
    ControlFamily, as_kripke_model, check_control_axioms, check_independence,
)

fam = ControlFamily(buttons=2, nswitch=3)
model, init = as_kripke_model(fam)
print(len(model.frame), "reachable states from", init)

# adjacency matrix of the exported frame
adj = np.array([[model.frame.related(w, u) for u in model.frame.worlds]
                for w in model.frame.worlds])
print("out-degrees", sorted({int(d) for d in adj.sum(axis=1)}))

# the quotient is P({0,1}) with every cluster of size 3
print(as_pba(model.frame).sizes())

print(check_control_axioms(fam).passed, check_independence(fam).passed)

# a button secretly wired to a switch is caught
bad = ControlFamily(buttons=1, switches=1, miswire=[(0, 0)])
for c in check_control_axioms(bad).failed():
    print(c.control, c.clause, [str(w) for w in c.witnesses])

# label the pBA with "exactly these buttons pushed, n-switch at i"
lab = product_labeling(as_pba(pba_frame(2, [3] * 4)), fam)
for w in lab.frame.worlds[:4]:
    print(w, "->", lab[w])
print(verify_labeling(lab, fam).to_json())
