from __future__ import annotations

import math

import pytest

from oracles import blocking, brute_orders
from seqmatch.fixtures import three_firm
from seqmatch.generators import random_small_instance, rng
from seqmatch.model import (
    InstanceError,
    Matching,
    OfferingOrder,
    OrderError,
    ResourceLimitError,
    blocking_pairs,
    count_consistent_orders,
    enumerate_consistent_orders,
    induced_order,
    is_consistent,
    is_position_based,
    is_stable,
    make_instance,
    validate_instance,
    validate_order,
)


def test_validation_collects_every_problem():
    raw = {
        "firms": ["p1", "p1", "p2"],
        "workers": ["q1"],
        "firm_prefs": {"p1": ["q1", "q1"], "p2": ["q1", "q9"]},
        "worker_prefs": {"q1": ["p1"]},
    }
    with pytest.raises(InstanceError) as ei:
        validate_instance(raw)
    probs = ei.value.problems
    assert len(probs) >= 3
    text = " ".join(probs)
    assert "p1" in text and "q9" in text


def test_asymmetric_mention_rejected():
    with pytest.raises(InstanceError):
        make_instance({"p1": ["q1"]}, {"q1": []})


def test_delete_and_contract():
    I = three_firm()
    d = I.delete(("p2", "q1"))
    assert ("p2", "q1") not in d.pairs and len(d.pairs) == len(I.pairs) - 1
    assert "p2" in d.firms
    c = I.contract(("p2", "q2"))
    assert "p2" not in c.firms and "q2" not in c.workers
    assert all(p != "p2" and q != "q2" for p, q in c.pairs)
    with pytest.raises(ValueError):
        I.delete(("p1", "q3"))


def test_transpose_is_an_involution():
    I = three_firm()
    assert I.transpose().transpose() == I
    assert I.transpose().firm_prefs["q1"] == I.worker_prefs["q1"]


def test_ranks_place_unmatched_last():
    I = three_firm()
    assert I.worker_prefers("q2", "p2", None)
    assert not I.worker_prefers("q2", None, "p3")
    assert I.firm_prefers("p2", "q1", "q3")


def test_order_validation():
    I = three_firm()
    good = induced_order(I, ["p1", "p2", "p3"])
    validate_order(I, good)
    bad = OfferingOrder([("p2", "q1"), ("p2", "q2")] + [e for e in good.pairs if e not in {("p2", "q1"), ("p2", "q2")}])
    assert not is_consistent(I, bad)
    with pytest.raises(OrderError):
        validate_order(I, OfferingOrder(good.pairs[:-1]))
    with pytest.raises(OrderError):
        induced_order(I, ["p1", "p2"])


def test_order_delete_contract_follow_instance():
    I = three_firm()
    sig = induced_order(I, ["p2", "p3", "p1"])
    e = sig.first()
    assert is_consistent(I.delete(e), sig.delete(e))
    assert is_consistent(I.contract(e), sig.contract(e))


def test_position_based_detection():
    I = three_firm()
    pi = ("p3", "p1", "p2")
    ok, got = is_position_based(I, induced_order(I, pi))
    assert ok and got == pi
    mixed = OfferingOrder([("p2", "q2"), ("p3", "q3"), ("p2", "q1"), ("p1", "q1"), ("p2", "q3"), ("p3", "q2")])
    validate_order(I, mixed)
    assert is_position_based(I, mixed) == (False, None)


def test_order_count_matches_multinomial():
    I = three_firm()
    assert count_consistent_orders(I) == math.factorial(6) // (1 * 6 * 2)


def test_enumeration_matches_brute_force():
    r = rng(11)
    for _ in range(40):
        I = random_small_instance(r, max_agents=3, max_pairs=7)
        mine = [o.pairs for o in enumerate_consistent_orders(I)]
        assert len(mine) == len(set(mine)) == count_consistent_orders(I)
        assert set(mine) == set(brute_orders(I))


def test_enumeration_cap():
    I = three_firm()
    with pytest.raises(ResourceLimitError):
        list(enumerate_consistent_orders(I, cap=10))


def test_matching_invariants_and_blocking():
    I = three_firm()
    with pytest.raises(ValueError):
        Matching([("p1", "q1"), ("p2", "q1")])
    mu = Matching([("p1", "q1"), ("p2", "q3"), ("p3", "q2")])
    assert blocking_pairs(I, mu) == blocking(I, mu) != set()
    assert not is_stable(I, mu)
    assert is_stable(I, Matching([("p1", "q1"), ("p2", "q2"), ("p3", "q3")]))
