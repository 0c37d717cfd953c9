"""Worker-proposing and firm-proposing deferred acceptance.

Rounds are synchronous: every free worker with a nonempty list proposes to
its best remaining firm, then every firm keeps its best proposal and
irrevocably rejects the rest. The per-round records are kept in a
:class:`DaTrace` so that the round in which each firm took its final
partner can be read back.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import Matching, MatchingInstance, Pair


@dataclass(frozen=True)
class DaRound:
    proposals: tuple[Pair, ...]
    held: tuple[Pair, ...]
    rejected: tuple[Pair, ...]


@dataclass(frozen=True)
class DaTrace:
    rounds: tuple[DaRound, ...]
    acceptance_round: dict[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rounds": [
                {
                    "proposals": [list(e) for e in r.proposals],
                    "held": [list(e) for e in r.held],
                    "rejected": [list(e) for e in r.rejected],
                }
                for r in self.rounds
            ],
            "acceptance_round": dict(self.acceptance_round),
        }


def q_oriented_da(instance: MatchingInstance, reverse: bool = False) -> tuple[Matching, DaTrace]:
    """Return the worker-optimal stable matching and the proposal trace.

    ``reverse`` walks workers and firms in reverse input order inside each
    round. The output matching does not depend on it; the flag exists so
    tests can confirm that.
    """
    workers = list(instance.workers)
    firms = list(instance.firms)
    if reverse:
        workers.reverse()
        firms.reverse()
    # remaining lists, as indices into each worker's preference list
    nxt = {q: 0 for q in workers}
    removed: set[Pair] = set()
    held: dict[str, str] = {}  # firm -> worker
    held_since: dict[str, int] = {}
    partner: dict[str, Optional[str]] = {q: None for q in workers}
    rounds: list[DaRound] = []

    def next_firm(q: str) -> Optional[str]:
        lst = instance.worker_prefs[q]
        i = nxt[q]
        while i < len(lst) and (lst[i], q) in removed:
            i += 1
        nxt[q] = i
        return lst[i] if i < len(lst) else None

    rnd = 0
    while True:
        proposals: list[Pair] = []
        for q in workers:
            if partner[q] is None:
                p = next_firm(q)
                if p is not None:
                    proposals.append((p, q))
        if not proposals:
            break
        rnd += 1
        offers: dict[str, list[str]] = {}
        for p, q in proposals:
            partner[q] = p
            offers.setdefault(p, []).append(q)
        kept: list[Pair] = []
        rejected: list[Pair] = []
        for p in firms:
            if p not in offers:
                continue
            cands = offers[p] + ([held[p]] if p in held else [])
            best = min(cands, key=lambda q: instance.firm_rank(p, q))
            if held.get(p) != best:
                held_since[p] = rnd
            held[p] = best
            kept.append((p, best))
            for q in cands:
                if q != best:
                    partner[q] = None
                    removed.add((p, q))
                    rejected.append((p, q))
        rounds.append(DaRound(tuple(proposals), tuple(kept), tuple(rejected)))

    mu = Matching((p, q) for p, q in held.items())
    acc = {p: held_since[p] for p in held}
    return mu, DaTrace(tuple(rounds), acc)


def qopt(instance: MatchingInstance) -> Matching:
    return q_oriented_da(instance)[0]


def p_oriented_da(instance: MatchingInstance) -> Matching:
    """Firm-optimal stable matching, via worker-proposing DA on the transpose."""
    mu, _ = q_oriented_da(instance.transpose())
    return Matching((q, p) for p, q in mu.pairs)


popt = p_oriented_da


def alpha_set(instance: MatchingInstance) -> frozenset[str]:
    """Matched firms that took their final partner in the earliest round."""
    _, trace = q_oriented_da(instance)
    if not trace.acceptance_round:
        return frozenset()
    first = min(trace.acceptance_round.values())
    return frozenset(p for p, r in trace.acceptance_round.items() if r == first)


def q_dominates_weakly(instance: MatchingInstance, a: Matching, b: Matching) -> bool:
    """``a`` is weakly better than ``b`` for every worker."""
    return all(instance.worker_rank(q, a.firm_of(q)) <= instance.worker_rank(q, b.firm_of(q)) for q in instance.workers)


def p_dominates_weakly(instance: MatchingInstance, a: Matching, b: Matching) -> bool:
    return all(instance.firm_rank(p, a.worker_of(p)) <= instance.firm_rank(p, b.worker_of(p)) for p in instance.firms)


def strengthened_blocking_pair(instance: MatchingInstance, mu_prime: Matching) -> Optional[Pair]:
    """Blocking pair of ``mu_prime`` with the extra properties used by order design.

    ``mu_prime`` must be strictly better than QOPT for the workers. With
    ``Q'`` the workers strictly better off, the result ``(p, q)`` has
    ``p`` matched into ``Q'`` under ``mu_prime``, ``q`` outside ``Q'``, and ``q``
    is the best worker for ``p`` among those ``p`` ranks between its QOPT
    partner and ``mu_prime(p)`` that also prefer ``p`` to their QOPT partner.
    Firms are tried latest-acceptance first. Returns None when no such
    pair exists (which should never happen).
    """
    mu, trace = q_oriented_da(instance)
    q_better = [
        q for q in instance.workers if instance.worker_rank(q, mu_prime.firm_of(q)) < instance.worker_rank(q, mu.firm_of(q))
    ]
    qset = set(q_better)
    firms = {mu_prime.firm_of(q) for q in q_better}
    ordered = sorted(
        (p for p in firms if p is not None),
        key=lambda p: (-trace.acceptance_round.get(p, 0), instance.firm_index[p]),
    )
    for p in ordered:
        lo = mu.worker_of(p)
        hi = mu_prime.worker_of(p)
        for q in instance.firm_prefs[p]:
            if not instance.firm_prefers(p, q, hi):
                break
            if q in qset or not instance.firm_prefers(p, lo, q):
                continue
            if instance.worker_prefers(q, p, mu.firm_of(q)):
                return (p, q)
    return None
