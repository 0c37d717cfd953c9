from __future__ import annotations

import itertools

import pytest

from oracles import brute_spe
from seqmatch.model import induced_order
from seqmatch.qsat.gadgets import AND, BRANCHING, NOT, OR, GadgetError, build_gadget, gadget_sizes, gate_value, harness
from seqmatch.spe import spe

ARITY = {OR: 2, AND: 2, NOT: 1, BRANCHING: 1}


def outputs_taken(kind, free, output_order=None):
    I, pi, g = harness(kind, free, output_order)
    sig = induced_order(I, pi)
    mu = spe(I, sig)
    assert mu == brute_spe(I, sig.pairs)
    return [(p, g.output_worker(p)) in mu for p in g.outputs], mu, g


@pytest.mark.parametrize("kind", [OR, AND, NOT, BRANCHING])
def test_truth_table(kind):
    for free in itertools.product([False, True], repeat=ARITY[kind]):
        taken, _, _ = outputs_taken(kind, free)
        want = gate_value(kind, free)
        assert taken == [want] * len(taken), (kind, free, taken)


def test_truth_tables_explicitly():
    table = {
        OR: {(False, False): False, (False, True): True, (True, False): True, (True, True): True},
        AND: {(False, False): False, (False, True): False, (True, False): False, (True, True): True},
        NOT: {(False,): True, (True,): False},
        BRANCHING: {(False,): False, (True,): True},
    }
    for kind, rows in table.items():
        for free, want in rows.items():
            assert gate_value(kind, free) == want


def test_branching_output_order_does_not_matter():
    for free in ((False,), (True,)):
        a, mu_a, _ = outputs_taken(BRANCHING, free, (0, 1))
        b, mu_b, _ = outputs_taken(BRANCHING, free, (1, 0))
        assert a == b and mu_a == mu_b


def test_or_low_keeps_a3_home():
    _, mu, g = outputs_taken(OR, (False, False))
    assert (g.name("Ah3"), g.name("a3")) in mu


def test_and_low_states():
    for free in ((False, False), (False, True), (True, False)):
        _, mu, g = outputs_taken(AND, free)
        assert mu.firm_of(g.name("b1")) in {g.name("Bh1"), g.name("Bh2")}
        assert (g.name("Bh3"), g.name("b2")) in mu


def test_list_widths_and_sizes():
    for kind in (OR, AND, NOT, BRANCHING):
        ins = tuple(f"i{k}" for k in range(ARITY[kind]))
        outs = ("o1", "o2") if kind == BRANCHING else ("o1",)
        g = build_gadget(kind, "7", ins, outs)
        assert (len(g.firms), len(g.workers)) == gadget_sizes(kind)
        assert all(len(v) <= 3 for v in g.firm_lists.values())
        assert all(len(v) <= 3 for v in g.worker_lists.values())
        assert all(p.endswith("_7") for p in g.firms)
    assert gadget_sizes(NOT) == (5, 4)


def test_bad_gadget_requests():
    with pytest.raises(GadgetError):
        build_gadget("XOR", "1", ("a",), ("b",))
    with pytest.raises(GadgetError):
        build_gadget(OR, "1", ("a",), ("b",))
    with pytest.raises(GadgetError):
        harness(NOT, (True, False))
