from __future__ import annotations

from oracles import all_matchings, blocking, brute_popt, brute_qopt, stable_set, worker_weakly_better
from seqmatch.da import (
    alpha_set,
    p_dominates_weakly,
    p_oriented_da,
    q_dominates_weakly,
    q_oriented_da,
    qopt,
    strengthened_blocking_pair,
)
from seqmatch.fixtures import M, three_firm, two_by_two
from seqmatch.generators import random_instance, rng
from seqmatch.model import Matching, matched_agents


def _inst(r):
    return random_instance(r, r.randint(1, 5), r.randint(1, 5), density=r.choice([0.4, 0.7, 1.0]))


def test_worker_optimal_matches_brute_force():
    r = rng(21)
    for _ in range(150):
        I = _inst(r)
        assert qopt(I) == brute_qopt(I)


def test_firm_optimal_matches_brute_force():
    r = rng(22)
    for _ in range(150):
        I = _inst(r)
        assert p_oriented_da(I) == brute_popt(I)


def test_matched_agents_same_in_every_stable_matching():
    r = rng(23)
    for _ in range(150):
        I = _inst(r)
        sets = {matched_agents(m) for m in stable_set(I)}
        assert len(sets) == 1


def test_three_firm_trace_and_earliest_acceptors():
    I = three_firm()
    mu, trace = q_oriented_da(I)
    assert mu == M("p1q1", "p2q2", "p3q3")
    assert len(trace.rounds) == 4
    # p3 settles on q3 in round 2; p2 and p1 only later
    assert trace.acceptance_round == {"p3": 2, "p2": 3, "p1": 4}
    assert alpha_set(I) == {"p3"}


def test_two_by_two_extremes():
    I = two_by_two()
    assert qopt(I) == M("p1q1", "p2q2")
    assert p_oriented_da(I) == M("p1q2", "p2q1")
    assert q_dominates_weakly(I, qopt(I), p_oriented_da(I))
    assert p_dominates_weakly(I, p_oriented_da(I), qopt(I))


def test_alpha_firms_are_matched_and_minimal():
    r = rng(24)
    for _ in range(100):
        I = _inst(r)
        mu, trace = q_oriented_da(I)
        a = alpha_set(I)
        assert a <= {p for p, _ in mu.pairs}
        if mu.pairs:
            assert a
            lo = min(trace.acceptance_round.values())
            assert all(trace.acceptance_round[p] == lo for p in a)


def test_strengthened_blocking_pair_properties():
    r = rng(25)
    seen = 0
    for _ in range(400):
        I = random_instance(r, r.randint(2, 4), r.randint(2, 4), density=0.8)
        mu = qopt(I)
        better = [
            m for m in all_matchings(I)
            if m != mu and worker_weakly_better(I, m, mu)
        ]
        for mp in better:
            e = strengthened_blocking_pair(I, mp)
            assert e is not None
            p, q = e
            seen += 1
            qprime = {
                w for w in I.workers
                if I.worker_rank(w, mp.firm_of(w)) < I.worker_rank(w, mu.firm_of(w))
            }
            assert e in blocking(I, mp)
            assert mp.worker_of(p) in qprime and q not in qprime
            for w in I.firm_prefs[p]:
                if I.firm_prefers(p, mu.worker_of(p), w) and I.firm_prefers(p, w, q):
                    assert not I.worker_prefers(w, p, mu.firm_of(w))
    assert seen > 20


def test_empty_instance():
    I = random_instance(rng(0), 2, 2, density=0.0)
    assert qopt(I) == Matching()
    assert alpha_set(I) == frozenset()
