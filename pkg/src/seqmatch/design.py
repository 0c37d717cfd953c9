"""Offering orders whose equilibrium is the worker-optimal stable matching.

The order has two parts. First come the pairs every firm likes better than
its worker-optimal partner (the set ``F``); workers reject all of them.
The rest follows a position order built by repeatedly contracting a
worker-optimal pair whose firm accepted earliest in deferred acceptance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from .da import alpha_set, qopt
from .model import (
    Matching,
    MatchingInstance,
    OfferingOrder,
    Pair,
    ResourceLimitError,
    induced_order,
    validate_order,
)
from .spe import DEFAULT_NODE_BUDGET, spe


@dataclass(frozen=True)
class DesignPlan:
    f_set: tuple[Pair, ...]
    fixed_sequence: tuple[Pair, ...]
    pi: tuple[str, ...]
    sigma: OfferingOrder
    target: Matching

    def log(self) -> list[str]:
        out = [f"F ({len(self.f_set)} pairs): " + (" ".join(f"({p},{q})" for p, q in self.f_set) or "-")]
        for i, (p, q) in enumerate(self.fixed_sequence, 1):
            out.append(f"step {i}: fix ({p},{q})")
        out.append("pi: " + " ".join(self.pi))
        return out

    def to_dict(self) -> dict:
        return {
            "f_set": [list(e) for e in self.f_set],
            "fixed_sequence": [list(e) for e in self.fixed_sequence],
            "position_order": list(self.pi),
            "pairs": [list(e) for e in self.sigma.pairs],
        }


def f_set(instance: MatchingInstance, mu: Optional[Matching] = None) -> tuple[Pair, ...]:
    """Pairs ranked by their firm above its worker-optimal partner, firm-major."""
    mu = qopt(instance) if mu is None else mu
    out = []
    for p in instance.firms:
        partner = mu.worker_of(p)
        for q in instance.firm_prefs[p]:
            if q == partner:
                break
            out.append((p, q))
    return tuple(out)


def design_order(instance: MatchingInstance) -> DesignPlan:
    mu = qopt(instance)
    F = f_set(instance, mu)
    reduced = instance
    for e in F:
        reduced = reduced.delete(e)

    seq: list[Pair] = []
    cur = reduced
    while True:
        m = qopt(cur)
        if not m.pairs:
            break
        alpha = alpha_set(cur)
        p = min(alpha, key=lambda x: cur.firm_index[x])
        e = (p, m.worker_of(p))
        seq.append(e)
        cur = cur.contract(e)
    assert not cur.pairs, "pairs left after fixing every worker-optimal pair"

    head = [p for p, _ in seq]
    pi = tuple(head + [p for p in instance.firms if p not in set(head)])
    tail = induced_order(reduced, pi)
    sigma = OfferingOrder(list(F) + list(tail.pairs))
    return DesignPlan(F, tuple(seq), pi, sigma, mu)


@dataclass
class DesignReport:
    ok: bool
    plan: DesignPlan
    target: Matching
    achieved: Matching
    checkpoints: dict[str, bool] = field(default_factory=dict)

    def describe(self) -> list[str]:
        lines = self.plan.log()
        lines.append(f"target QOPT: {self.target}")
        lines.append(f"equilibrium: {self.achieved}")
        for k, v in self.checkpoints.items():
            lines.append(f"{k}: {'ok' if v else 'FAILED'}")
        lines.append("PASS" if self.ok else "FAIL")
        return lines


def verify_design(
    instance: MatchingInstance, node_budget: int = DEFAULT_NODE_BUDGET, checkpoints: bool = True
) -> DesignReport:
    """Build the designed order, solve it, and check the intermediate claims.

    Checkpoints: the structural invariants of the plan, the reduced game's
    equilibrium, the reduced instance's worker-optimal matching, and for
    every fixing step that the worker prefers the fixing firm to what it
    would get after refusing.
    """
    plan = design_order(instance)
    validate_order(instance, plan.sigma)
    target = plan.target
    achieved = spe(instance, plan.sigma, node_budget=node_budget, check=False)
    cp: dict[str, bool] = {}
    if checkpoints:
        F = set(plan.f_set)
        pos = plan.sigma.position
        cp["f_disjoint_from_target"] = not (F & target.pairs)
        cp["f_first"] = all(pos[e] < pos[t] for e in F for t in target.pairs) and set(
            plan.sigma.pairs[: len(F)]
        ) == F
        k = len(plan.fixed_sequence)
        cp["pi_prefix_is_matched_firms"] = set(plan.pi[:k]) == {p for p, _ in target.pairs} and list(
            plan.pi[:k]
        ) == [p for p, _ in plan.fixed_sequence]
        cp["pi_is_permutation"] = sorted(plan.pi) == sorted(instance.firms)
        reduced = instance
        for e in plan.f_set:
            reduced = reduced.delete(e)
        red_sigma = plan.sigma.restrict(reduced)
        red_q = qopt(reduced)
        cp["reduced_target_unchanged"] = red_q == target
        cp["reduced_pairs_are_tops"] = all(reduced.top_of_firm(p) == q for p, q in red_q.pairs)
        cp["reduced_equilibrium"] = spe(reduced, red_sigma, node_budget=node_budget, check=False) == red_q
        cur, sig = reduced, red_sigma
        steps = True
        for e in plan.fixed_sequence:
            p, q = e
            if qopt(cur.contract(e)) != qopt(cur).remove(e):
                steps = False
            refused = spe(cur.delete(e), sig.delete(e), node_budget=node_budget, check=False)
            if not cur.worker_prefers(q, p, refused.firm_of(q)):
                steps = False
            cur, sig = cur.contract(e), sig.contract(e)
        cp["fixing_steps"] = steps
    ok = achieved == target and all(cp.values())
    return DesignReport(ok, plan, target, achieved, cp)


@dataclass(frozen=True)
class PositionSearchResult:
    target: Matching
    tried: int
    successes: tuple[tuple[str, ...], ...]


def search_position_based(instance: MatchingInstance, max_orders: int = 5040) -> PositionSearchResult:
    """Experimental: try every position order and report which reach QOPT.

    Nothing here is a correctness claim; it only collects evidence on
    whether some position-based order always suffices.
    """
    import math

    n = len(instance.firms)
    if math.factorial(n) > max_orders:
        raise ResourceLimitError(f"{n}! position orders exceed the cap {max_orders}")
    target = qopt(instance)
    wins = []
    tried = 0
    for pi in itertools.permutations(instance.firms):
        tried += 1
        if spe(instance, induced_order(instance, pi), check=False) == target:
            wins.append(tuple(pi))
    return PositionSearchResult(target, tried, tuple(wins))
