import pytest

from oracles import naive_holds

from mlfkit.corpus import SplitMix64, random_formula
from mlfkit.formula import BOT, TOP, And, Atom, Not, parse, substitute
from mlfkit.kripke import Model, as_pba, pba_frame, satisfies
from mlfkit.labeling import (
    LabelingError, binary_nswitch, check_nswitch, check_translation, hybrid_labeling,
    product_labeling, ratchet_nswitch, translate_valuation, translation_commutes,
    verify_labeling,
)
from mlfkit.multiverse import (
    INF, ControlFamily, MState, as_kripke_model, has_headroom, observe, state_space,
    successors,
)

b0, b1 = Atom("b:0"), Atom("b:1")


def uniform(m, n):
    return as_pba(pba_frame(m, [n] * (1 << m)))


def hybrid_family(m, n, K=8, decoupled=True):
    return ControlFamily(buttons=m, nswitch=n, t_buttons=K, t_unbounded=True,
                         regime="hybrid", sw_decoupled=decoupled)


def holds(fam, s, f):
    """Truth of a propositional label at a state, reachable or not."""
    obs = observe(fam, s)
    return naive_holds([0], set(), {a: {0} for a, v in obs.items() if v}, 0, f)


# n-switch constructions

def test_binary_nswitch_examples():
    assert binary_nswitch(1) == [Not(Atom("s:0")), Atom("s:0")]
    assert binary_nswitch(2)[2] == And(Not(Atom("s:0")), Atom("s:1"))


@pytest.mark.parametrize("m", [1, 2, 3])
def test_binary_nswitch_is_an_nswitch(m):
    rep = check_nswitch(binary_nswitch(m), ControlFamily(switches=m))
    assert rep.passed and rep.checked_reachability == 1 << m


def test_ratchet_nswitch_examples():
    fam = ControlFamily(ratchet=(2, 8))
    stm = ratchet_nswitch(3, (2, 8))
    model, _ = as_kripke_model(fam)
    s05 = MState(frozenset(), (), 0, (0, 5), 0)
    assert [satisfies(model, s05, x) for x in stm] == [False, False, True]
    s06 = MState(frozenset(), (), 0, (0, 6), 0)
    assert s06 in successors(fam, s05) and satisfies(model, s06, stm[0])
    last = MState(frozenset(), (), 0, (1, 7), 0)
    assert [satisfies(model, last, x) for x in stm] == [False, True, False]


def test_ratchet_nswitch_needs_headroom():
    with pytest.raises(ValueError):
        ratchet_nswitch(3, (2, 5))
    with pytest.raises(ValueError):
        ratchet_nswitch(1, (2, 5))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_ratchet_nswitch_on_interior(n):
    fam = ControlFamily(ratchet=(3, 2 * n))
    rep = check_nswitch(ratchet_nswitch(n, (3, 2 * n)), fam,
                        interior=lambda s: s.ratchet_val[0] < 2)
    assert rep.passed
    assert rep.checked_reachability == 2 * 2 * n
    # the last alpha block really is short of headroom
    strict = check_nswitch(ratchet_nswitch(n, (3, 2 * n)), fam)
    assert strict.exactly_one and not strict.reachable


# product labeling

def test_product_labeling_examples():
    lab = product_labeling(uniform(0, 1), ControlFamily())
    assert list(lab.statements.values()) == [Atom("sw:0")]
    lab = product_labeling(uniform(1, 2), ControlFamily(buttons=1, nswitch=2))
    assert lab["1@{}"] == And(Not(b0), Atom("sw:1"))
    lab = product_labeling(uniform(2, 2), ControlFamily(buttons=2, nswitch=2))
    assert lab["0@{0,1}"] == And(And(b0, b1), Atom("sw:0"))
    assert lab.initial_world == "0@{}"


def test_product_labeling_preconditions():
    with pytest.raises(LabelingError):
        product_labeling(as_pba(pba_frame(1, [1, 2])), ControlFamily(buttons=1, nswitch=2))
    with pytest.raises(LabelingError):
        product_labeling(uniform(1, 2), ControlFamily(buttons=1, nswitch=3))
    with pytest.raises(LabelingError):
        product_labeling(uniform(1, 2), ControlFamily(buttons=2, nswitch=2))


@pytest.mark.parametrize("m", [0, 1, 2])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_product_labeling_verifies(m, n):
    fam = ControlFamily(buttons=m, nswitch=n if n > 1 else 0)
    lab = product_labeling(uniform(m, n), fam)
    rep = verify_labeling(lab, fam)
    assert rep.passed and not rep.witnesses


def test_padded_pba_verifies():
    pba = as_pba(pba_frame(2, [1, 3, 2, 1])).padded(3)
    fam = ControlFamily(buttons=2, nswitch=3)
    assert verify_labeling(product_labeling(pba, fam), fam).passed


def test_button_replaced_by_switch_breaks_clause_two():
    fam = ControlFamily(buttons=1, switches=1, nswitch=2, miswire=[(0, 0)])
    good = ControlFamily(buttons=1, nswitch=2)
    lab = product_labeling(uniform(1, 2), good)
    rep = verify_labeling(lab, fam)
    assert rep.partition_ok and rep.initial_ok
    assert not rep.correspondence_ok
    assert any(c == "correspondence" for c, _, _ in rep.witnesses)


def test_labels_are_pairwise_exclusive_and_persistent():
    fam = ControlFamily(buttons=2, nswitch=2)
    pba = uniform(2, 2)
    lab = product_labeling(pba, fam)
    model, _ = as_kripke_model(fam)
    label_of = {}
    for s in model.frame.worlds:
        hits = [w for w in lab.frame.worlds if satisfies(model, s, lab[w])]
        assert len(hits) == 1
        label_of[s] = hits[0]
    for s in model.frame.worlds:
        for x in model.frame.successors(s):
            assert pba.cluster_of[label_of[s]] <= pba.cluster_of[label_of[x]]


# hybrid labeling

def test_hybrid_label_examples():
    fam = hybrid_family(2, 3, K=5)
    lab = hybrid_labeling(uniform(2, 3), fam)
    s = MState(frozenset({0}), (), 0, None, 3)
    assert holds(fam, s, lab["0@{0}"])
    top = MState(frozenset({0, 1}), (), 2, None, INF)
    assert holds(fam, top, lab["2@{0,1}"])
    zero = MState(frozenset({0, 1}), (), 1, None, 0)
    assert holds(fam, zero, lab["0@{0,1}"])
    assert not holds(fam, zero, Atom("supinf"))


def test_hybrid_preconditions():
    with pytest.raises(LabelingError):
        hybrid_labeling(uniform(1, 2), ControlFamily(buttons=1, nswitch=2))
    fam = ControlFamily(buttons=1, nswitch=2, t_buttons=3, regime="hybrid")
    with pytest.raises(LabelingError):
        hybrid_labeling(uniform(1, 2), fam)


@pytest.mark.parametrize("decoupled", [True, False])
@pytest.mark.parametrize("m,n", [(0, 2), (1, 2), (1, 3), (2, 2)])
def test_hybrid_labeling_verifies_off_the_boundary(m, n, decoupled):
    fam = hybrid_family(m, n, K=6, decoupled=decoupled)
    lab = hybrid_labeling(uniform(m, n), fam)
    rep = verify_labeling(lab, fam, interior=lambda s: has_headroom(fam, s, n - 1))
    assert rep.passed, rep.to_json()


def test_hybrid_strict_failures_are_exactly_boundary_states():
    fam = hybrid_family(1, 3, K=6)
    lab = hybrid_labeling(uniform(1, 3), fam)
    rep = verify_labeling(lab, fam)
    assert rep.partition_ok and rep.initial_ok and not rep.correspondence_ok
    for _, s, _ in rep.witnesses:
        assert not has_headroom(fam, s, 2)
        assert s.t_sup != INF and s.pushed != {0}


def test_infinite_states_only_satisfy_top_labels():
    fam = hybrid_family(2, 2, K=4)
    lab = hybrid_labeling(uniform(2, 2), fam)
    model, _ = as_kripke_model(fam)
    for s in model.frame.worlds:
        if s.t_sup == INF:
            hits = [w for w in lab.frame.worlds if satisfies(model, s, lab[w])]
            assert len(hits) == 1 and hits[0].endswith("@{0,1}")


# translation

def test_translate_valuation_examples():
    fam = ControlFamily(buttons=1, nswitch=2)
    lab = product_labeling(uniform(1, 2), fam)
    assert translate_valuation(lab, {"p": []}) == {"p": BOT}
    assert translate_valuation(lab, {"p": ["0@{}"]}) == {"p": lab["0@{}"]}
    every = translate_valuation(lab, {"p": lab.frame.worlds})["p"]
    model, _ = as_kripke_model(fam)
    assert all(satisfies(model, s, every) for s in model.frame.worlds)
    with pytest.raises(LabelingError):
        translate_valuation(lab, {"p": ["ghost"]})


def test_check_translation_examples():
    fam = ControlFamily(buttons=2, nswitch=2)
    lab = product_labeling(uniform(2, 2), fam)
    assert check_translation(lab, fam, None, Model(lab.frame), TOP)
    dot2 = parse("<>[]p -> []<>p")
    rng = SplitMix64(5)
    for _ in range(20):
        val = {"p": [w for w in lab.frame.worlds if rng.below(2)]}
        assert check_translation(lab, fam, None, Model(lab.frame, val), dot2)


def test_check_translation_random():
    fam = ControlFamily(buttons=1, nswitch=2)
    lab = product_labeling(uniform(1, 2), fam)
    mv = as_kripke_model(fam)
    rng = SplitMix64(11)
    for _ in range(100):
        f = random_formula(rng, ["p", "q"], 3)
        val = {a: [w for w in lab.frame.worlds if rng.below(2)] for a in ("p", "q")}
        assert check_translation(lab, fam, None, Model(lab.frame, val), f, multiverse=mv)


def test_translation_commutes_and_detects_breakage():
    fam = ControlFamily(buttons=1, nswitch=2)
    lab = product_labeling(uniform(1, 2), fam)
    assert translation_commutes(lab, fam)
    broken = ControlFamily(buttons=1, switches=1, nswitch=2, miswire=[(0, 0)])
    assert not translation_commutes(lab, broken)


def test_translation_is_substitution_of_labels():
    fam = ControlFamily(buttons=1, nswitch=2)
    lab = product_labeling(uniform(1, 2), fam)
    sub = translate_valuation(lab, {"p": ["0@{0}", "1@{0}"]})
    f = substitute(parse("[]p"), sub)
    model, init = as_kripke_model(fam)
    assert not satisfies(model, init, f)
    assert satisfies(model, init, substitute(parse("<>[]p"), sub))
    assert state_space(fam) and observe(fam, init)["b:0"] is False
