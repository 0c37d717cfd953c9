from __future__ import annotations

import pytest

from oracles import brute_qopt, brute_spe
from seqmatch.fixtures import M, three_firm
from seqmatch.generators import random_order, random_st_instance, rng
from seqmatch.model import count_consistent_orders, enumerate_consistent_orders, induced_order
from seqmatch.sfda import classify, run_sfda, verify_tractable_equivalence
from seqmatch.spe import spe


def test_classify_three_firm():
    w = classify(three_firm())
    assert w.as_tuple() == (3, 2)
    assert w.tractable


def test_sfda_on_three_firm():
    I = three_firm()
    # worker lists have length <= 2, so sfda equals the equilibrium here
    for pi, want in ((["p1", "p2", "p3"], M("p1q1", "p2q3", "p3q2")), (["p2", "p3", "p1"], M("p1q1", "p2q2", "p3q3"))):
        assert run_sfda(I, induced_order(I, pi)) == want


@pytest.mark.parametrize("s,t", [(2, None), (None, 2), (2, 2)])
def test_equivalence_on_tractable_classes(s, t):
    r = rng(41 + (s or 0) * 3 + (t or 0))
    for _ in range(150):
        I = random_st_instance(r, s, t, max_pairs=12)
        sig = random_order(r, I)
        rep = verify_tractable_equivalence(I, sig)
        assert rep.equal, rep.describe()
        assert rep.spe == brute_spe(I, sig.pairs)


def test_short_firm_lists_always_give_qopt():
    r = rng(44)
    checked = 0
    for _ in range(120):
        I = random_st_instance(r, 2, None, max_pairs=10)
        if count_consistent_orders(I) > 200:
            continue
        target = brute_qopt(I)
        for sig in enumerate_consistent_orders(I):
            assert spe(I, sig) == target
        checked += 1
    assert checked >= 50


def test_equivalence_refuses_wide_lists():
    r = rng(45)
    while True:
        I = random_st_instance(r, 3, 3, max_pairs=12)
        if not classify(I).tractable:
            break
    with pytest.raises(ValueError):
        verify_tractable_equivalence(I, random_order(r, I))
