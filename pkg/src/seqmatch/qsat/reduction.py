"""Compile a quantified 3-CNF formula into a position-based game.

The first offer goes from ``s_1`` to ``x_1``; in the equilibrium ``x_1``
rejects it exactly when the formula is true. Lists never exceed three
entries on either side. See WIRING_NOTES.md next to this file for the
places where the wiring departs from a literal reading of the gate table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

from ..model import MatchingInstance, OfferingOrder, induced_order, make_instance
from ..sfda import classify
from ..spe import DEFAULT_NODE_BUDGET, solve_spe, spe
from .formula import EXISTS, QuantifiedFormula, evaluate_qbf, normalize
from .gadgets import AND, BRANCHING, NOT, OR, GadgetBlueprint, build_gadget


class WiringError(RuntimeError):
    """The assembled game broke a structural rule; this is a bug, not bad input."""


@dataclass
class ReducedGame:
    formula: QuantifiedFormula
    firm_lists: dict[str, list[str]]
    worker_lists: dict[str, list[str]]
    pi: tuple[str, ...]
    gadgets: list[GadgetBlueprint] = field(default_factory=list)
    # slot bookkeeping: (variable, clause, occurrence) -> (yhat firm, y worker)
    slots: dict[tuple[int, int, int], tuple[str, str]] = field(default_factory=dict)

    def instance(self) -> MatchingInstance:
        firms = list(self.pi)
        workers = list(self.worker_lists)
        return make_instance(self.firm_lists, self.worker_lists, firms, workers)

    def order(self) -> OfferingOrder:
        return induced_order(self.instance(), self.pi)

    def gadget_counts(self) -> dict[str, int]:
        out = {OR: 0, AND: 0, NOT: 0, BRANCHING: 0}
        for g in self.gadgets:
            out[g.kind] += 1
        return out


def _slots(f: QuantifiedFormula) -> dict[int, list[tuple[int, int, Optional[int]]]]:
    """Per variable, its copy slots in clause order: (clause, occurrence, literal position or None).

    Every variable gets at least one slot per clause; a variable occurring
    twice or three times in one clause gets one slot per occurrence.
    """
    out: dict[int, list[tuple[int, int, Optional[int]]]] = {i: [] for i in range(1, f.n + 1)}
    for j, clause in enumerate(f.clauses, 1):
        for i in range(1, f.n + 1):
            ks = [k for k, (v, _) in enumerate(clause, 1) if v == i]
            if not ks:
                out[i].append((j, 1, None))
            for a, k in enumerate(ks, 1):
                out[i].append((j, a, k))
    return out


def reduce_qsat(formula: QuantifiedFormula) -> ReducedGame:
    f = normalize(formula) if not formula.is_normalized() else formula
    n, m = f.n, f.m
    fl: dict[str, list[str]] = {}
    wl: dict[str, list[str]] = {}
    gadgets: list[GadgetBlueprint] = []

    def add_gadget(g: GadgetBlueprint) -> GadgetBlueprint:
        for p, lst in g.firm_lists.items():
            fl[p] = list(lst)
        for q, lst in g.worker_lists.items():
            wl[q] = list(lst)
        gadgets.append(g)
        return g

    def first_firm(kind: str, index: str) -> str:
        return {OR: "or_Ah1_", AND: "and_Bh1_", NOT: "not_Gh1_", BRANCHING: "branching_Dh1_"}[kind] + index

    def gw(kind: str, sym: str, index: str) -> str:
        return f"{kind.lower()}_{sym}_{index}"

    s = [f"s_{i}" for i in range(n + 1)]
    t = [f"t_{i}" for i in range(n + 1)]
    r = [f"r_{i}" for i in range(n + 1)]
    x = [f"x_{i}" for i in range(n + 1)]
    xb = [f"xbar_{i}" for i in range(n + 1)]
    z = [f"z_{i}" for i in range(n + 1)]

    # -- copy chains --------------------------------------------------------
    slots = _slots(f)
    slot_names: dict[tuple[int, int, int], tuple[str, str]] = {}
    copy_blocks: list[str] = []
    yhat_block: list[str] = []
    feed: dict[int, Optional[str]] = {}
    for i in range(1, n + 1):
        sl = slots[i]
        names = []
        for j, a, _ in sl:
            suffix = f"{i}_{j}" if a == 1 else f"{i}_{j}_{a}"
            names.append((f"yhat_{suffix}", f"y_{suffix}"))
            slot_names[(i, j, a)] = names[-1]
        K = len(sl)
        if K == 0:
            feed[i] = None
            continue
        if K == 1:
            feed[i] = names[0][0]
            fl[names[0][0]] = [xb[i], names[0][1]]
        else:
            feed[i] = first_firm(BRANCHING, f"{i}_1")
            for k in range(1, K):
                src = xb[i] if k == 1 else gw(BRANCHING, "d2", f"{i}_{k - 1}")
                nxt = first_firm(BRANCHING, f"{i}_{k + 1}") if k < K - 1 else names[K - 1][0]
                g = add_gadget(build_gadget(BRANCHING, f"{i}_{k}", (src,), (names[k - 1][0], nxt)))
                copy_blocks.extend(g.firm_order)
                fl[names[k - 1][0]] = [g.output_worker(names[k - 1][0]), names[k - 1][1]]
            last = gw(BRANCHING, "d2", f"{i}_{K - 1}")
            fl[names[K - 1][0]] = [last, names[K - 1][1]]
        yhat_block.extend(nm[0] for nm in names)

    # -- literals and clauses -----------------------------------------------
    lit_not_block: list[str] = []
    lhat_block: list[str] = []
    or1_block: list[str] = []
    or2_block: list[str] = []
    chat_block: list[str] = []
    # y worker lists: yhat first, then the literal consumer if any
    for i in range(1, n + 1):
        for (j, a, k) in slots[i]:
            yh, y = slot_names[(i, j, a)]
            wl[y] = [yh]
    for j, clause in enumerate(f.clauses, 1):
        seen: dict[int, int] = {}
        for k, (v, pos) in enumerate(clause, 1):
            seen[v] = seen.get(v, 0) + 1
            _, y = slot_names[(v, j, seen[v])]
            lhat, lw = f"lhat_{j}_{k}", f"l_{j}_{k}"
            if pos:
                wl[y].append(lhat)
                fl[lhat] = [y, lw]
            else:
                g = add_gadget(build_gadget(NOT, f"{j}_{k}", (y,), (lhat,)))
                lit_not_block.extend(g.firm_order)
                wl[y].append(g.socket_entries[y])
                fl[lhat] = [g.output_worker(lhat), lw]
            wl[lw] = [lhat]
            lhat_block.append(lhat)
        chat = f"chat_{j}"
        g1 = add_gadget(
            build_gadget(OR, f"{j}_1", (f"l_{j}_1", f"l_{j}_2"), (first_firm(OR, f"{j}_2"),))
        )
        g2 = add_gadget(build_gadget(OR, f"{j}_2", (gw(OR, "a3", f"{j}_1"), f"l_{j}_3"), (chat,)))
        wl[f"l_{j}_1"].append(g1.socket_entries[f"l_{j}_1"])
        wl[f"l_{j}_2"].append(g1.socket_entries[f"l_{j}_2"])
        wl[f"l_{j}_3"].append(g2.socket_entries[f"l_{j}_3"])
        or1_block.extend(g1.firm_order)
        or2_block.extend(g2.firm_order)
        fl[chat] = [g2.output_worker(chat), f"c_{j}"]
        wl[f"c_{j}"] = [chat]
        chat_block.append(chat)

    # -- formula signal -----------------------------------------------------
    and_block: list[str] = []
    spine_block: list[str] = []
    var_not_block: list[str] = []

    def target(i: int) -> str:
        return first_firm(NOT, str(i)) if f.quantifier(i) == EXISTS else r[i]

    consumer = first_firm(BRANCHING, "1") if n >= 2 else target(1)
    if m == 0:
        signal = "w_true"
        wl[signal] = []
    elif m == 1:
        signal = "c_1"
    else:
        for j in range(1, m):
            a_in = "c_1" if j == 1 else gw(AND, "b2", str(j - 1))
            out = first_firm(AND, str(j + 1)) if j < m - 1 else consumer
            g = add_gadget(build_gadget(AND, str(j), (a_in, f"c_{j + 1}"), (out,)))
            and_block.extend(g.firm_order)
            if j == 1:
                wl["c_1"].append(g.socket_entries["c_1"])
            wl[f"c_{j + 1}"].append(g.socket_entries[f"c_{j + 1}"])
        signal = gw(AND, "b2", str(m - 1))
    if m <= 1:
        wl[signal].append(consumer)

    # feeds into each variable's target firm
    into_target: dict[int, str] = {}
    if n == 1:
        into_target[1] = signal
    else:
        for i in range(1, n):
            src = signal if i == 1 else gw(BRANCHING, "d2", str(i - 1))
            nxt = first_firm(BRANCHING, str(i + 1)) if i < n - 1 else target(n)
            g = add_gadget(build_gadget(BRANCHING, str(i), (src,), (target(i), nxt)))
            spine_block.extend(g.firm_order)
            into_target[i] = g.output_worker(target(i))
        into_target[n] = gw(BRANCHING, "d2", str(n - 1))
    for i in range(1, n + 1):
        if f.quantifier(i) == EXISTS:
            g = add_gadget(build_gadget(NOT, str(i), (into_target[i],), (r[i],)))
            var_not_block.extend(g.firm_order)
            fl[r[i]] = [g.output_worker(r[i]), z[i]]
        else:
            fl[r[i]] = [into_target[i], z[i]]

    # -- assignment phase ---------------------------------------------------
    for i in range(1, n + 1):
        fl[s[i]] = [x[i], xb[i]]
        fl[t[i]] = [z[i], x[i]]
        wl[x[i]] = [t[i], s[i]]
        wl[xb[i]] = [s[i]] + ([feed[i]] if feed[i] else [])
        wl[z[i]] = [r[i], t[i]]

    pi = (
        [s[i] for i in range(1, n + 1)]
        + copy_blocks
        + yhat_block
        + lit_not_block
        + lhat_block
        + or1_block
        + or2_block
        + chat_block
        + and_block
        + spine_block
        + var_not_block
        + [r[i] for i in range(1, n + 1)]
        + [t[i] for i in range(1, n + 1)]
    )
    if sorted(pi) != sorted(fl):
        missing = set(fl) - set(pi)
        extra = set(pi) - set(fl)
        raise WiringError(f"position order does not cover the firms (missing {missing}, extra {extra})")
    game = ReducedGame(f, fl, wl, tuple(pi), gadgets, slot_names)
    check_structure(game)
    return game


# -- checks -------------------------------------------------------------------


def check_structure(game: ReducedGame) -> None:
    """Raise :class:`WiringError` unless lists have length <= 3 and gadget orders hold."""
    try:
        inst = game.instance()
    except ValueError as exc:
        raise WiringError(f"assembled lists are inconsistent: {exc}") from exc
    w = classify(inst)
    if w.max_firm_list > 3 or w.max_worker_list > 3:
        raise WiringError(f"list widths {w.as_tuple()} exceed 3")
    pos = {p: i for i, p in enumerate(game.pi)}
    for g in game.gadgets:
        order = [pos[p] for p in g.firm_order]
        if order != sorted(order):
            raise WiringError(f"{g.kind} {g.index}: gadget firms out of order")
        for out in g.outputs:
            if pos[out] < order[-1]:
                raise WiringError(f"{g.kind} {g.index}: output {out} moves before the gadget")
        for q in g.inputs:
            # the gadget's own offer must be the last one its input receives
            own = g.socket_entries[q]
            others = [p for p in game.worker_lists[q] if p != own]
            if any(pos[p] > pos[own] for p in others):
                raise WiringError(f"{g.kind} {g.index}: input {q} is offered to after the gadget")


def expected_counts(f: QuantifiedFormula) -> tuple[int, int]:
    """Firm and worker totals implied by the construction for distinct-variable clauses."""
    n, m = f.n, f.m
    n_minus = sum(1 for c in f.clauses for _, pos in c if not pos)
    n_exists = len(f.exists_set())
    u_or, u_and, u_not = 2 * m, max(m - 1, 0), n_minus + n_exists
    u_br = n * max(m - 1, 0) + (n - 1)
    firms = 3 * n + m + n * m + 3 * m + 3 * u_or + 3 * u_and + 5 * u_not + 5 * u_br
    workers = 3 * n + m + n * m + 3 * m + 3 * u_or + 2 * u_and + 4 * u_not + 5 * u_br
    if m == 0:
        workers += 1  # constant-true signal worker
    return firms, workers


def decide(game: ReducedGame, node_budget: int = DEFAULT_NODE_BUDGET) -> bool:
    """Formula value read off the game: true iff x_1 rejects the first offer."""
    res = solve_spe(game.instance(), game.order(), node_budget=node_budget, check=False)
    return res.first_action.value == "REJECT"


@dataclass
class ReductionReport:
    formula: QuantifiedFormula
    expected: bool
    decided: bool
    assignment_checks: int
    failures: list[str]

    @property
    def ok(self) -> bool:
        return self.expected == self.decided and not self.failures

    def lines(self) -> list[str]:
        out = [
            f"formula: {self.formula}",
            f"brute force: {self.expected}",
            f"game (x_1 rejects s_1): {self.decided}",
            f"per-assignment checks: {self.assignment_checks}",
        ]
        out.extend(f"FAIL {x}" for x in self.failures)
        out.append("PASS" if self.ok else "FAIL")
        return out


def assignment_subgame(game: ReducedGame, assignment: dict[int, bool]):
    """The subgame right after s_1..s_n have offered, for a full assignment."""
    inst = game.instance()
    sig = game.order()
    for i in range(1, game.formula.n + 1):
        sx, xx, xbx = f"s_{i}", f"x_{i}", f"xbar_{i}"
        if assignment[i]:
            inst, sig = inst.contract((sx, xx)), sig.contract((sx, xx))
        else:
            inst, sig = inst.delete((sx, xx)), sig.delete((sx, xx))
            inst, sig = inst.contract((sx, xbx)), sig.contract((sx, xbx))
    return inst, sig


def verify_reduction(
    formula: QuantifiedFormula,
    game: Optional[ReducedGame] = None,
    per_assignment: bool = True,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> ReductionReport:
    """Compare the game's decision with brute force, plus per-assignment checks.

    For every full assignment, the evaluation subgame must put ``(r_i, z_i)``
    in the equilibrium iff the matrix is true (existential ``i``) or false
    (universal ``i``); each copy slot ``y`` must sit with its ``yhat`` iff
    its variable is false; and ``c_j`` must sit with ``chat_j`` iff clause
    ``j`` is false.
    """
    f = normalize(formula) if not formula.is_normalized() else formula
    game = reduce_qsat(f) if game is None else game
    expected = evaluate_qbf(f)
    decided = decide(game, node_budget)
    failures: list[str] = []
    checks = 0
    if per_assignment:
        for bits in itertools.product([False, True], repeat=f.n):
            a = {i + 1: b for i, b in enumerate(bits)}
            inst, sig = assignment_subgame(game, a)
            mu = spe(inst, sig, node_budget=node_budget, check=False)
            val = f.satisfied_by(a)
            checks += 1
            for i in range(1, f.n + 1):
                has = (f"r_{i}", f"z_{i}") in mu
                want = val if f.quantifier(i) == EXISTS else not val
                if has != want:
                    failures.append(f"assignment {a}: (r_{i}, z_{i}) in equilibrium is {has}, expected {want}")
            for (i, j, _), (yh, y) in game.slots.items():
                if ((yh, y) in mu) != (not a[i]):
                    failures.append(f"assignment {a}: copy slot {y} disagrees with variable {i}")
            for j, clause in enumerate(f.clauses, 1):
                sat = any(a[v] == pos for v, pos in clause)
                if ((f"chat_{j}", f"c_{j}") in mu) != (not sat):
                    failures.append(f"assignment {a}: clause {j} signal wrong")
    return ReductionReport(f, expected, decided, checks, failures)
