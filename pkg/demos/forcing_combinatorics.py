"""
Almost-disjoint coding at finite scale
======================================

Codes of reals, the coding poset, and a finite chain that codes the set
A = {0, 2} out of four handles.
"""

from mlfkit.posets import (
    ADCode, PICondition, RealHandle, ad_code, avoid_basic_open, coding_certificate,
    coding_chain, dense_Dalpha, dense_DsN, pi_extends, rasiowa_sikorski, seq_of,
)

print([seq_of(i) for i in range(10)])

f = RealHandle.eventually_periodic([0, 1], [2])
g = RealHandle.eventually_periodic([0, 1, 3], [0])
print(ad_code(f, 6))
print(set(ad_code(f, 10)) & set(ad_code(g, 10)))   # common prefix length 2 -> 3 elements

# a basic open missing both reals
s = avoid_basic_open([f, g])
print(s, f.passes_through(s), g.passes_through(s))

# a generic-filter approximation for the opens-and-reals poset
a = RealHandle.constant(0)
chain = rasiowa_sikorski(pi_extends, PICondition([], []),
                         [dense_Dalpha(a)] + [dense_DsN(t, 3) for t in [(), (0,), (1,)]])
for p in chain:
    print(sorted(p.opens), sorted(r.name for r in p.reals))

handles = [ADCode(RealHandle.eventually_periodic([i], [i % 2, 1])) for i in range(4)]
cert = coding_certificate(coding_chain(handles, {0, 2}, 200), handles, {0, 2}, 20)
print(cert.to_json())
