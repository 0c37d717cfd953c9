from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_orders, brute_spe, stable_set
from seqmatch.fixtures import M, catalog, three_firm
from seqmatch.generators import random_instance, random_order, rng
from seqmatch.model import OfferingOrder, ResourceLimitError, induced_order, make_instance
from seqmatch.spe import (
    Action,
    build_game_tree,
    check_eeckhout,
    count_leaves,
    export_game_tree,
    solve_spe,
    solve_spe_unmemoized,
    spe,
    spem_decide,
)


def test_three_firm_orders():
    I = three_firm()
    assert spe(I, induced_order(I, ["p1", "p2", "p3"])) == M("p1q1", "p2q3", "p3q2")
    assert spe(I, induced_order(I, ["p2", "p3", "p1"])) == M("p1q1", "p2q2", "p3q3")


def test_matches_brute_force_backward_induction():
    r = rng(31)
    for _ in range(300):
        I = random_instance(r, r.randint(1, 5), r.randint(1, 5), density=r.choice([0.5, 0.8, 1.0]), max_pairs=12)
        sig = random_order(r, I)
        assert spe(I, sig) == brute_spe(I, sig.pairs)


def test_every_order_on_small_instances():
    r = rng(32)
    for _ in range(40):
        I = random_instance(r, 3, 3, density=0.7, max_pairs=7)
        for perm in brute_orders(I):
            assert spe(I, OfferingOrder(perm)) == brute_spe(I, perm)


def test_unmemoized_reference_agrees():
    r = rng(33)
    for _ in range(150):
        I = random_instance(r, r.randint(1, 4), r.randint(1, 4), density=0.8, max_pairs=10)
        sig = random_order(r, I)
        a, b = solve_spe(I, sig), solve_spe_unmemoized(I, sig)
        assert a.matching == b.matching and a.first_action == b.first_action


def test_unmemoized_bound():
    I = random_instance(rng(34), 5, 5, density=1.0)
    with pytest.raises(ResourceLimitError):
        solve_spe_unmemoized(I, random_order(rng(1), I), bound=10)


def test_parallel_mode_identical_on_fixtures():
    for fx in catalog().values():
        for key in fx.position_orders:
            sig = fx.order(key)
            a = solve_spe(fx.instance, sig)
            b = solve_spe(fx.instance, sig, workers=4)
            assert (a.matching, a.first_action) == (b.matching, b.first_action)


def test_parallel_mode_identical_on_larger_games():
    r = rng(35)
    for _ in range(10):
        I = random_instance(r, 6, 6, density=0.6, max_pairs=18)
        sig = random_order(r, I)
        a, b = solve_spe(I, sig), solve_spe(I, sig, workers=3)
        assert (a.matching, a.first_action) == (b.matching, b.first_action)


def test_node_budget_is_enforced():
    I = random_instance(rng(36), 6, 6, density=1.0, max_pairs=20)
    with pytest.raises(ResourceLimitError):
        solve_spe(I, random_order(rng(2), I), node_budget=5)


def test_decision_reads_first_offer():
    I = three_firm()
    sig = induced_order(I, ["p2", "p3", "p1"])
    res = solve_spe(I, sig)
    assert spem_decide(I, sig) == (sig.first() in res.matching)
    assert res.first_action is Action.ACCEPT
    with pytest.raises(ValueError):
        spem_decide(make_instance({"p1": []}, {"q1": []}), OfferingOrder([]))


def test_game_tree_shape():
    I = three_firm()
    sig = induced_order(I, ["p1", "p2", "p3"])
    nodes = build_game_tree(I, sig)
    assert count_leaves(nodes) == 17
    leaf = [n for n in nodes if n.offer is None and n.on_path]
    assert len(leaf) == 1 and leaf[0].matching == spe(I, sig)
    dot = export_game_tree(I, sig)
    assert dot.startswith("digraph") and dot.count("shape=box") == 17
    shallow = export_game_tree(I, sig, depth_cap=1)
    assert shallow.count("->") == 2 and shallow.count("label=") == 5


def test_tree_node_cap():
    I = random_instance(rng(37), 5, 5, density=1.0)
    with pytest.raises(ResourceLimitError):
        build_game_tree(I, random_order(rng(3), I), node_cap=50)


def test_eeckhout_condition_gives_unique_outcome():
    r = rng(38)
    hits = 0
    for _ in range(400):
        I = random_instance(r, r.randint(2, 4), r.randint(2, 4), density=0.8, max_pairs=9)
        if not check_eeckhout(I).holds:
            continue
        hits += 1
        S = stable_set(I)
        assert len(S) == 1
        for perm in brute_orders(I) if len(I.pairs) <= 7 else [random_order(r, I).pairs]:
            assert spe(I, OfferingOrder(perm)) == S[0]
    assert hits >= 20


def test_eeckhout_detects_failure():
    # a 2-cycle of preferences has no mutually-top pair
    I = make_instance({"p1": ["q1", "q2"], "p2": ["q2", "q1"]}, {"q1": ["p2", "p1"], "q2": ["p1", "p2"]})
    assert not check_eeckhout(I).holds


@st.composite
def instances_and_orders(draw):
    nf = draw(st.integers(1, 4))
    nw = draw(st.integers(1, 4))
    edges = draw(st.lists(st.tuples(st.integers(0, nf - 1), st.integers(0, nw - 1)), unique=True, max_size=10))
    fp = {f"p{i}": [] for i in range(nf)}
    wp = {f"q{j}": [] for j in range(nw)}
    for i, j in draw(st.permutations(edges)):
        fp[f"p{i}"].append(f"q{j}")
    for i, j in draw(st.permutations(edges)):
        wp[f"q{j}"].append(f"p{i}")
    I = make_instance(fp, wp)
    seed = draw(st.integers(0, 2**31))
    return I, random_order(random.Random(seed), I)


@settings(max_examples=200, deadline=None)
@given(instances_and_orders())
def test_hypothesis_against_brute_force(case):
    I, sig = case
    assert spe(I, sig) == brute_spe(I, sig.pairs)
