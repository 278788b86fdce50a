"""
When the n-switch depends on the buttons
========================================

In the hybrid multiverse the n-switch cannot move without pushing a
T-button.  The hybrid labeling moves inside lower clusters by pushing
T-buttons, and only uses the n-switch once unboundedly many are pushed.
"""

from mlfkit.kripke import as_pba, pba_frame
from mlfkit.labeling import hybrid_labeling, verify_labeling
from mlfkit.multiverse import ControlFamily, check_independence, has_headroom

fam = ControlFamily(buttons=1, nswitch=2, t_buttons=8, t_unbounded=True, regime="hybrid")
print(check_independence(fam).failing_pairs)

lab = hybrid_labeling(as_pba(pba_frame(1, [2, 2])), fam)
for w, phi in lab.statements.items():
    print(w, "->", phi)

# with K truncated, states near t_sup = K cannot cycle the T-switch
strict = verify_labeling(lab, fam)
print("strict:", strict.passed, strict.to_json()["witness_count"], "witnesses")
for clause, state, why in strict.witnesses[:3]:
    print("  ", state, why)

spare = verify_labeling(lab, fam, interior=lambda s: has_headroom(fam, s, 1))
print("away from the bound:", spare.passed, len(spare.exempt), "states spared")

# pinning the n-switch to t_sup mod n adds the reverse dependence
pinned = ControlFamily(buttons=1, nswitch=2, t_buttons=8, t_unbounded=True,
                       regime="hybrid", sw_decoupled=False)
print(check_independence(pinned).failing_pairs)
