import pytest
from hypothesis import given, strategies as st

from mlfkit.posets import (
    SEQ, ADCode, CertificateError, ChainAuditError, DenseSpec, InsufficientPrefix,
    PICondition, PYCondition, RealHandle, ad_code, avoid_basic_open,
    coding_certificate, coding_chain, common_prefix_length, dense_Dalpha, dense_DsN,
    dense_py_meet, dense_py_size, index_of, pi_extends, pi_merge_class, py_extends,
    py_merge, rasiowa_sikorski, seq_of,
)

R = RealHandle
zero, one = R.constant(0), R.constant(1)


def test_enumeration_table_head():
    assert [seq_of(i) for i in range(8)] == [
        (), (0,), (0, 0), (1,), (0, 0, 0), (0, 1), (1, 0), (2,)]


def test_enumeration_roundtrip():
    for i in range(10_000):
        assert index_of(seq_of(i)) == i


@given(st.lists(st.integers(0, 6), max_size=8))
def test_enumeration_roundtrip_on_sequences(s):
    assert seq_of(index_of(s)) == tuple(s)


def test_enumeration_rejects_negatives():
    with pytest.raises(ValueError):
        index_of([1, -1])
    with pytest.raises(ValueError):
        SEQ.seq_of(-3)


def test_ad_code_examples():
    assert ad_code(zero, 1) == [index_of(())]
    a, b = set(ad_code(zero, 30)), set(ad_code(one, 30))
    assert a & b == {index_of(())}


reals = st.tuples(st.lists(st.integers(0, 3), max_size=5),
                  st.lists(st.integers(0, 3), min_size=1, max_size=3))


@given(reals, reals)
def test_ad_intersections_have_size_common_prefix_plus_one(x, y):
    f, g = R.eventually_periodic(*x), R.eventually_periodic(*y)
    if f.prefix(40) == g.prefix(40):
        return
    L = common_prefix_length([f, g])
    common = set(ad_code(f, L + 10)) & set(ad_code(g, L + 10))
    assert len(common) == L + 1
    assert len(set(ad_code(f, L)) & set(ad_code(g, L))) == L


def test_ad_code_membership_matches_listing():
    f = R.eventually_periodic([2], [0, 1])
    code = ADCode(f)
    listed = set(ad_code(f, 6))
    bound = max(listed) + 1
    assert {i for i in range(bound) if i in code} == listed
    assert code.element(3) == ad_code(f, 4)[3]


def test_py_extends_examples():
    A = ADCode(R.eventually_periodic([], [0]))
    two = next(i for i in range(2, 50) if i in A)
    three = next(i for i in range(2, 50) if i not in A)
    c1 = PYCondition({1}, {A})
    assert py_extends(c1, c1)
    assert not py_extends(PYCondition({1, two}, {A}), c1)
    assert py_extends(PYCondition({1, three}, {A}), c1)
    assert not py_extends(PYCondition(set(), {A}), c1)


def test_py_merge_examples():
    A, B = frozenset({2, 3}), frozenset({5})
    assert py_merge([PYCondition({1}, {A}), PYCondition({1}, {B})]) == PYCondition({1}, {A, B})
    c = PYCondition({1}, {A})
    assert py_merge([c]) == c
    with pytest.raises(ValueError):
        py_merge([PYCondition({1}, ()), PYCondition({2}, ())])


conds = st.builds(PYCondition, st.frozensets(st.integers(0, 12), max_size=5),
                  st.frozensets(st.frozensets(st.integers(0, 12), max_size=4), max_size=3))


@given(conds, conds, conds)
def test_py_extends_is_a_partial_order(a, b, c):
    assert py_extends(a, a)
    if py_extends(a, b) and py_extends(b, c):
        assert py_extends(a, c)
    if py_extends(a, b) and py_extends(b, a):
        assert a == b


@given(st.frozensets(st.integers(0, 12), max_size=5),
       st.lists(st.frozensets(st.frozensets(st.integers(0, 12), max_size=3), max_size=3),
                min_size=1, max_size=5))
def test_py_merge_extends_inputs(s, ts):
    cs = [PYCondition(s, t) for t in ts]
    top = py_merge(cs)
    assert all(py_extends(top, c) for c in cs)


def test_pi_extends_examples():
    p = PICondition([], [zero])
    assert pi_extends(p, p)
    assert not pi_extends(PICondition([(0,)], [zero]), p)
    assert pi_extends(PICondition([(1,)], [zero]), p)


def test_pi_extends_never_guesses():
    short = R.finite([0, 0], "short")
    p = PICondition([], [short])
    with pytest.raises(InsufficientPrefix):
        pi_extends(PICondition([(0, 0, 0)], [short]), p)
    with pytest.raises(InsufficientPrefix):
        pi_extends(PICondition([(1, 1)], [zero]), PICondition([], [zero]), prefixes={zero: 1})
    assert pi_extends(PICondition([(1, 1)], [zero]), PICondition([], [zero]), prefixes={zero: 2})


def test_pi_merge_class():
    a, b = R.constant(3), R.constant(4)
    p1, p2 = PICondition([(1,)], [a]), PICondition([(1,)], [b])
    u = pi_merge_class([p1, p2])
    assert pi_extends(u, p1) and pi_extends(u, p2)
    assert pi_merge_class([p1]) == p1
    with pytest.raises(ValueError):
        pi_merge_class([p1, PICondition([(2,)], [a])])


def test_avoid_basic_open_examples():
    assert avoid_basic_open([zero, one]) == (2,)
    assert avoid_basic_open([R.constant(5)]) == (0,)
    a, b = R.eventually_periodic([0], [1]), R.eventually_periodic([0], [2])
    assert avoid_basic_open([a, b]) == (0, 0)


def test_avoid_basic_open_reports_unseparated_reals():
    with pytest.raises(InsufficientPrefix):
        avoid_basic_open([R.constant(0), R.constant(0, name="zero again")])
    with pytest.raises(ValueError):
        avoid_basic_open([])


@given(st.lists(reals, min_size=1, max_size=5))
def test_avoided_open_excludes_every_real(specs):
    rs = [R.eventually_periodic(*x) for x in specs]
    if len({r.prefix(30) for r in rs}) < len(rs):
        return
    s = avoid_basic_open(rs)
    assert not any(r.passes_through(s) for r in rs)


def test_dense_sets():
    a = zero
    d = dense_Dalpha(a)
    p = PICondition([(1,)], [one])
    assert d.extend(p) == PICondition([(1,)], [one, a]) and d.hits(d.extend(p))
    D = dense_DsN((0,), 2)
    assert D.hits(PICondition([(0, 5, 5)], []))
    q = D.extend(PICondition([], [a]))
    assert D.hits(q) and pi_extends(q, PICondition([], [a]))
    (t,) = q.opens
    assert t[:1] == (0,) and len(t) > 2 and not a.passes_through(t)


def test_dense_DsN_when_reals_pass_through_s_without_being_below_common_segment():
    # common segment of these reals is (0,); s = (0, 1) is not below it,
    # yet the first real passes through s
    x, y = R.eventually_periodic([0, 1], [0]), R.eventually_periodic([0, 2], [0])
    p = PICondition([], [x, y])
    q = dense_DsN((0, 1), 3).extend(p)
    assert pi_extends(q, p)


def test_rasiowa_sikorski_audits():
    start = PYCondition(set(), set())
    assert rasiowa_sikorski(py_extends, start, []) == [start]
    chain = rasiowa_sikorski(py_extends, start, [dense_py_size(k) for k in range(1, 6)])
    assert len(chain[-1].s) >= 5
    bad = DenseSpec("shrink", lambda c: True, lambda c: PYCondition(set(), c.t))
    with pytest.raises(ChainAuditError):
        rasiowa_sikorski(py_extends, PYCondition({1}, ()), [bad])


def test_pi_chain_avoids_added_real():
    a = R.eventually_periodic([0, 1], [2, 0])
    denses = [dense_Dalpha(a)] + [dense_DsN(s, 3) for s in [(), (0,), (0, 1), (1,), (0, 1, 2)]]
    chain = rasiowa_sikorski(pi_extends, PICondition([], []), denses)
    for t in chain[-1].opens:
        assert not a.passes_through(t)


def test_coding_certificate():
    hs = [ADCode(R.eventually_periodic([i], [i % 2, 1])) for i in range(4)]
    chain = coding_chain(hs, {0, 2}, 120, start=PYCondition({0, 1, 2, 3}, ()))
    cert = coding_certificate(chain, hs, {0, 2}, 10)
    assert cert.passed and set(cert.frozen) == {0, 2} and set(cert.growing) == {1, 3}
    assert 0 in cert.frozen[0][1]  # the empty sequence is coded by every real
    every = coding_certificate(coding_chain(hs, range(4), 10), hs, range(4), 0)
    assert set(every.frozen) == set(range(4))
    nothing = coding_certificate(coding_chain(hs, [], 60), hs, [], 10)
    assert nothing.passed and all(len(w) >= 10 for w in nothing.growing.values())
    with pytest.raises(CertificateError):
        coding_certificate(coding_chain(hs, [], 5), hs, [0], 1)


def test_meeting_a_frozen_handle_is_impossible():
    h = ADCode(zero)
    c = PYCondition(set(), {h})
    with pytest.raises(ValueError):
        dense_py_meet(h, 1, horizon=20).extend(c)
