"""Subgame-perfect equilibrium of the sequential matching game.

The solver works on bitmasks over positions in the offering order. A
subgame is identified by the set of pairs still alive; the next offer is
the alive pair with the smallest position. Rejecting drops that one pair,
accepting drops every alive pair touching either agent. Because the
remaining instance and order are both determined by the alive set, the
set is a complete memo key.
"""

from __future__ import annotations

import sys
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from .model import (
    Matching,
    MatchingInstance,
    OfferingOrder,
    Pair,
    ResourceLimitError,
    validate_order,
)

DEFAULT_NODE_BUDGET = 5_000_000
DEFAULT_UNMEMOIZED_BOUND = 16
DEFAULT_TREE_NODE_CAP = 20_000


class Action(str, Enum):
    ACCEPT = "ACCEPT"
    REJECT = "REJECT"


@dataclass(frozen=True)
class SpeStats:
    visited: int
    memo_hits: int


@dataclass(frozen=True)
class SpeResult:
    matching: Matching
    first_action: Optional[Action]
    stats: SpeStats = field(default=SpeStats(0, 0))


class _Game:
    """Bitmask encoding of one (instance, order) game."""

    def __init__(self, instance: MatchingInstance, order: OfferingOrder) -> None:
        self.instance = instance
        self.order = order
        self.n = len(order)
        self.firm_of = [p for p, _ in order.pairs]
        self.worker_of = [q for _, q in order.pairs]
        fmask: dict[str, int] = {}
        wmask: dict[str, int] = {}
        for i, (p, q) in enumerate(order.pairs):
            fmask[p] = fmask.get(p, 0) | (1 << i)
            wmask[q] = wmask.get(q, 0) | (1 << i)
        # per position: mask of pairs that disappear on acceptance
        self.kill = [fmask[p] | wmask[q] for p, q in order.pairs]
        self.wmask_at = [wmask[q] for _, q in order.pairs]
        self.wrank = [instance.worker_rank(q, p) for p, q in order.pairs]
        self.full = (1 << self.n) - 1

    def decode(self, res: int) -> Matching:
        out = []
        i = 0
        while res:
            if res & 1:
                out.append(self.order.pairs[i])
            res >>= 1
            i += 1
        return Matching(out)


class _Solver:
    def __init__(self, game: _Game, budget: int) -> None:
        self.g = game
        self.budget = budget
        self.memo: dict[int, int] = {}
        self.hits = 0
        self.lock = threading.Lock()

    def solve(self, alive: int) -> int:
        if alive == 0:
            return 0
        memo = self.memo
        hit = memo.get(alive)
        if hit is not None:
            self.hits += 1
            return hit
        g = self.g
        low = alive & -alive
        i = low.bit_length() - 1
        rej = self.solve(alive ^ low)
        held = rej & g.wmask_at[i]
        if held and g.wrank[held.bit_length() - 1] < g.wrank[i]:
            res = rej
        else:
            res = self.solve(alive & ~g.kill[i]) | low
        if len(memo) >= self.budget:
            raise ResourceLimitError(f"SPE search exceeded the node budget of {self.budget} subgames")
        memo[alive] = res
        return res

    def frontier(self, alive: int, depth: int, out: set[int]) -> None:
        if alive == 0:
            return
        if depth == 0:
            out.add(alive)
            return
        low = alive & -alive
        i = low.bit_length() - 1
        self.frontier(alive ^ low, depth - 1, out)
        self.frontier(alive & ~self.g.kill[i], depth - 1, out)


def _ensure_recursion(n: int) -> None:
    need = 4 * n + 200
    if sys.getrecursionlimit() < need:
        sys.setrecursionlimit(need)


def solve_spe(
    instance: MatchingInstance,
    order: OfferingOrder,
    node_budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 0,
    check: bool = True,
) -> SpeResult:
    """Compute spe(I, sigma) by memoized backward induction.

    ``workers`` > 1 evaluates subtrees below the first few offers on a thread
    pool sharing one memo table; the answer is the same either way because
    each memo key always maps to the same value.
    """
    if check:
        validate_order(instance, order)
    game = _Game(instance, order)
    solver = _Solver(game, node_budget)
    _ensure_recursion(game.n)
    if workers and workers > 1 and game.n > 4:
        keys: set[int] = set()
        solver.frontier(game.full, min(6, game.n // 2), keys)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # each thread gets its own stack; deep games need a larger one
            list(pool.map(solver.solve, sorted(keys, reverse=True)))
    res = solver.solve(game.full)
    mu = game.decode(res)
    first = None
    if game.n:
        first = Action.ACCEPT if res & 1 else Action.REJECT
    return SpeResult(mu, first, SpeStats(len(solver.memo), solver.hits))


def spe(instance: MatchingInstance, order: OfferingOrder, **kw) -> Matching:
    return solve_spe(instance, order, **kw).matching


def spem_decide(instance: MatchingInstance, order: OfferingOrder, **kw) -> bool:
    """True iff the first offered worker accepts in the equilibrium."""
    if not order.pairs:
        raise ValueError("the decision problem needs at least one acceptable pair")
    return solve_spe(instance, order, **kw).first_action is Action.ACCEPT


def solve_spe_unmemoized(
    instance: MatchingInstance, order: OfferingOrder, bound: int = DEFAULT_UNMEMOIZED_BOUND
) -> SpeResult:
    """Reference solver that walks instance objects directly, without a memo.

    Both branches are evaluated at every node, so the cost is exponential;
    ``bound`` caps |E|.
    """
    if len(instance.pairs) > bound:
        raise ResourceLimitError(f"|E| = {len(instance.pairs)} exceeds the reference solver bound {bound}")
    validate_order(instance, order)
    count = [0]

    def rec(inst: MatchingInstance, sig: OfferingOrder) -> Matching:
        count[0] += 1
        if not sig.pairs:
            return Matching()
        e = sig.first()
        p, q = e
        rej = rec(inst.delete(e), sig.delete(e))
        acc = rec(inst.contract(e), sig.contract(e)).add(e)
        if inst.worker_prefers(q, rej.firm_of(q), p):
            return rej
        return acc

    mu = rec(instance, order)
    first = None
    if order.pairs:
        first = Action.ACCEPT if order.first() in mu else Action.REJECT
    return SpeResult(mu, first, SpeStats(count[0], 0))


# -- game tree -------------------------------------------------------------


@dataclass(frozen=True)
class TreeNode:
    id: int
    offer: Optional[Pair]  # None at a leaf
    matching: Optional[Matching]  # accumulated matching at a leaf
    accept_child: Optional[int]
    reject_child: Optional[int]
    spe_action: Optional[Action]
    on_path: bool


def build_game_tree(
    instance: MatchingInstance, order: OfferingOrder, node_cap: int = DEFAULT_TREE_NODE_CAP
) -> list[TreeNode]:
    """Full game tree, root first. Offers already dead are skipped.

    ``spe_action`` is the equilibrium choice at each decision node and
    ``on_path`` marks nodes reached when everybody plays it.
    """
    validate_order(instance, order)
    game = _Game(instance, order)
    solver = _Solver(game, DEFAULT_NODE_BUDGET)
    _ensure_recursion(game.n)
    nodes: list[Optional[TreeNode]] = []

    def rec(alive: int, acc: int, on_path: bool) -> int:
        if len(nodes) >= node_cap:
            raise ResourceLimitError(f"game tree exceeds the node cap of {node_cap}")
        nid = len(nodes)
        nodes.append(None)
        if alive == 0:
            nodes[nid] = TreeNode(nid, None, game.decode(acc), None, None, None, on_path)
            return nid
        low = alive & -alive
        i = low.bit_length() - 1
        act = Action.ACCEPT if solver.solve(alive) & low else Action.REJECT
        a = rec(alive & ~game.kill[i], acc | low, on_path and act is Action.ACCEPT)
        r = rec(alive ^ low, acc, on_path and act is Action.REJECT)
        nodes[nid] = TreeNode(nid, order.pairs[i], None, a, r, act, on_path)
        return nid

    rec(game.full, 0, True)
    return [n for n in nodes if n is not None]


def export_game_tree(
    instance: MatchingInstance,
    order: OfferingOrder,
    depth_cap: Optional[int] = None,
    node_cap: int = DEFAULT_TREE_NODE_CAP,
) -> str:
    """DOT text for the game tree; equilibrium-path edges are bold."""
    nodes = build_game_tree(instance, order, node_cap)
    depth = {0: 0}
    for n in nodes:  # parents precede children
        if n.offer is not None:
            depth[n.accept_child] = depth[n.reject_child] = depth[n.id] + 1
    lines = ["digraph game {", "  node [shape=circle, fontsize=10];"]
    for n in nodes:
        d = depth[n.id]
        if depth_cap is not None and d > depth_cap:
            continue
        if n.offer is None:
            label = " ".join(f"{p}{q}" for p, q in n.matching.sorted_pairs(instance)) or "-"
            style = ", style=bold" if n.on_path else ""
            lines.append(f'  n{n.id} [shape=box, label="{label}"{style}];')
            continue
        p, q = n.offer
        style = ", style=bold" if n.on_path else ""
        lines.append(f'  n{n.id} [label="{p},{q}"{style}];')
        for lab, child, act in (("A", n.accept_child, Action.ACCEPT), ("R", n.reject_child, Action.REJECT)):
            if depth_cap is not None and d + 1 > depth_cap:
                continue
            attrs = [f'label="{lab}"']
            if n.spe_action is act:
                attrs.append("penwidth=2.5" if n.on_path else "penwidth=1.5")
            lines.append(f"  n{n.id} -> n{child} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def count_leaves(nodes: list[TreeNode]) -> int:
    return sum(1 for n in nodes if n.offer is None)


# -- Eeckhout condition ----------------------------------------------------


@dataclass(frozen=True)
class EeckhoutResult:
    holds: bool
    peel_order: tuple[Pair, ...]
    remaining_firms: tuple[str, ...]
    remaining_workers: tuple[str, ...]


def check_eeckhout(instance: MatchingInstance) -> EeckhoutResult:
    """Look for a reindexing where each p_i ranks q_i above every later q_j.

    Mutually-top pairs are peeled and contracted until none remain. Peeling
    is confluent (disjoint mutually-top pairs stay mutually top after the
    other is contracted), so the condition holds iff no pair survives.
    The peel order is the witnessing reindexing; agents left over have
    empty lists and go last.
    """
    cur = instance
    peeled: list[Pair] = []
    while True:
        found = None
        for p in cur.firms:
            q = cur.top_of_firm(p)
            if q is not None and cur.top_of_worker(q) == p:
                found = (p, q)
                break
        if found is None:
            break
        peeled.append(found)
        cur = cur.contract(found)
    return EeckhoutResult(not cur.pairs, tuple(peeled), cur.firms, cur.workers)
