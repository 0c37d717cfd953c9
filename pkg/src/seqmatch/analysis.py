"""Solution concepts beyond stability, and exhaustive equilibrium sets.

Everything here enumerates matchings or orders, so it is meant for small
instances. Caps are explicit and raise :class:`ResourceLimitError` rather
than truncating.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from typing import Optional

from .da import p_oriented_da, qopt
from .model import (
    DEFAULT_ORDER_CAP,
    Matching,
    MatchingInstance,
    OfferingOrder,
    Pair,
    ResourceLimitError,
    blocking_pairs,
    enumerate_consistent_orders,
    make_instance,
)
from .spe import spe

DEFAULT_MATCHING_CAP = 2_000_000
SIDES = ("P", "Q")


def _check_side(side: str) -> str:
    s = side.upper()[:1]
    if s in ("F", "P"):
        return "P"
    if s in ("W", "Q"):
        return "Q"
    raise ValueError(f"side must be 'P'/'firms' or 'Q'/'workers', got {side!r}")


# -- matching enumeration -------------------------------------------------


def enumerate_matchings(instance: MatchingInstance, cap: int = DEFAULT_MATCHING_CAP) -> list[Matching]:
    """Every matching of the instance, firms assigned in input order."""
    out: list[Matching] = []
    used: set[str] = set()
    cur: list[Pair] = []
    firms = instance.firms

    def rec(i: int) -> None:
        if i == len(firms):
            if len(out) >= cap:
                raise ResourceLimitError(f"more than {cap} matchings")
            out.append(Matching(cur))
            return
        p = firms[i]
        rec(i + 1)
        for q in instance.firm_prefs[p]:
            if q not in used:
                used.add(q)
                cur.append((p, q))
                rec(i + 1)
                cur.pop()
                used.discard(q)

    rec(0)
    return out


def stable_matchings(instance: MatchingInstance, cap: int = DEFAULT_MATCHING_CAP) -> list[Matching]:
    return [m for m in enumerate_matchings(instance, cap) if not blocking_pairs(instance, m)]


# -- domination and the vNM-stable set ---------------------------------------


def dominates(instance: MatchingInstance, mu: Matching, nu: Matching) -> bool:
    """Some pair of ``mu`` blocks ``nu``."""
    for p, q in mu.pairs:
        if instance.firm_prefers(p, q, nu.worker_of(p)) and instance.worker_prefers(q, p, nu.firm_of(q)):
            return True
    return False


def _domination_graph(instance: MatchingInstance, ms: list[Matching]) -> list[set[int]]:
    """``out[i]`` = indices dominated by matching ``i``."""
    out: list[set[int]] = [set() for _ in ms]
    for i, a in enumerate(ms):
        for j, b in enumerate(ms):
            if i != j and dominates(instance, a, b):
                out[i].add(j)
    return out


def kernels(nodes: list[int], out: list[set[int]], limit: Optional[int] = None) -> Iterator[frozenset[int]]:
    """All independent sets ``K`` of ``nodes`` dominating every other node."""
    into: dict[int, set[int]] = {v: set() for v in nodes}
    node_set = set(nodes)
    for v in nodes:
        for w in out[v]:
            if w in node_set:
                into[w].add(v)
    chosen: set[int] = set()
    excluded: set[int] = set()
    found = 0

    def rec(k: int) -> Iterator[frozenset[int]]:
        nonlocal found
        if limit is not None and found >= limit:
            return
        if k == len(nodes):
            if all(into[v] & chosen for v in excluded):
                found += 1
                yield frozenset(chosen)
            return
        v = nodes[k]
        # an excluded node whose every dominator is already excluded is dead
        for w in excluded:
            if not (into[w] - excluded):
                return
        if not (out[v] & chosen) and not (into[v] & chosen):
            chosen.add(v)
            yield from rec(k + 1)
            chosen.discard(v)
        excluded.add(v)
        yield from rec(k + 1)
        excluded.discard(v)

    yield from rec(0)


def vnm_stable_set(instance: MatchingInstance, cap: int = DEFAULT_MATCHING_CAP) -> frozenset[Matching]:
    """The unique vNM-stable set, computed as the kernel of the domination graph.

    Matchings with no remaining dominator must be in the set; everything they
    dominate must be out. Repeating this peels off the acyclic part. If a
    remainder is left (domination cycles), its kernel is found by
    backtracking.
    """
    ms = enumerate_matchings(instance, cap)
    out = _domination_graph(instance, ms)
    remaining = set(range(len(ms)))
    V: set[int] = set()
    while True:
        free = [v for v in remaining if not any(v in out[u] for u in remaining)]
        if not free:
            break
        V.update(free)
        gone = set(free)
        for v in free:
            gone |= out[v]
        remaining -= gone
    if remaining:
        rest = sorted(remaining)
        k = next(kernels(rest, out, limit=1), None)
        if k is None:
            raise RuntimeError("domination graph has no kernel on the cyclic remainder")
        V |= k
    return frozenset(ms[i] for i in V)


def is_vnm_stable_set(instance: MatchingInstance, V: Iterable[Matching], all_matchings: list[Matching]) -> bool:
    """Check internal and external stability directly."""
    V = list(V)
    if not V:
        return False
    for a in V:
        for b in V:
            if a != b and dominates(instance, a, b):
                return False
    vs = set(V)
    for m in all_matchings:
        if m not in vs and not any(dominates(instance, a, m) for a in V):
            return False
    return True


def all_vnm_stable_sets(instance: MatchingInstance, max_matchings: int = 34) -> list[frozenset[Matching]]:
    """Every set meeting both stability properties (tiny instances only)."""
    ms = enumerate_matchings(instance)
    if len(ms) > max_matchings:
        raise ResourceLimitError(f"{len(ms)} matchings exceed the exhaustive bound {max_matchings}")
    out = _domination_graph(instance, ms)
    return [frozenset(ms[i] for i in k) for k in kernels(list(range(len(ms))), out) if k]


# -- essential stability ----------------------------------------------------


@dataclass(frozen=True)
class ReassignmentChain:
    """Alternating claimants and claimed positions, with the matching after each move.

    ``claims[k] = (q_k, p_k)`` and ``matchings[k]`` is ``mu_k``. ``settled``
    is the matching once the last claim is carried out. ``terminated`` says
    why the chain stopped: ``"vacant"`` (``p_l`` is unmatched in ``mu_l``),
    ``"no_claim"`` (``q_k`` blocks with nobody, recorded as ``p_k = None``)
    or ``"cycle"`` (a state repeated).
    """

    claims: tuple[tuple[str, Optional[str]], ...]
    matchings: tuple[Matching, ...]
    settled: Matching
    terminated: str

    @property
    def initiator(self) -> Pair:
        q0, p0 = self.claims[0]
        return (p0, q0)

    @property
    def length(self) -> int:
        return len(self.matchings) - 1


def _blocks(instance: MatchingInstance, mu: Matching, p: str, q: str) -> bool:
    return instance.firm_prefers(p, q, mu.worker_of(p)) and instance.worker_prefers(q, p, mu.firm_of(q))


def _move(mu: Matching, p: str, q: str) -> Matching:
    pairs = {e for e in mu.pairs if e[1] != q and e[0] != p}
    pairs.add((p, q))
    return Matching(pairs)


def reassignment_chain(instance: MatchingInstance, mu: Matching, blocker: Pair, max_steps: int = 10_000) -> ReassignmentChain:
    """Worker-initiated chain for the blocking pair ``blocker = (p0, q0)``.

    Each displaced worker claims its best firm among those it now blocks
    with. The chain ends when a claimed firm is vacant, when the displaced
    worker has no claim, or when a (matching, claimant) state repeats.
    """
    p0, q0 = blocker
    if not _blocks(instance, mu, p0, q0):
        raise ValueError(f"({p0}, {q0}) does not block {mu}")
    claims: list[tuple[str, Optional[str]]] = [(q0, p0)]
    mats = [mu]
    seen = {(mu, q0)}
    cur, q, p = mu, q0, p0
    for _ in range(max_steps):
        displaced = cur.worker_of(p)
        nxt = _move(cur, p, q)
        if displaced is None:
            return ReassignmentChain(tuple(claims), tuple(mats), nxt, "vacant")
        mats.append(nxt)
        cur, q = nxt, displaced
        best = next((c for c in instance.worker_prefs[q] if _blocks(instance, cur, c, q)), None)
        claims.append((q, best))
        if best is None:
            return ReassignmentChain(tuple(claims), tuple(mats), cur, "no_claim")
        if (cur, q) in seen:
            return ReassignmentChain(tuple(claims), tuple(mats), cur, "cycle")
        seen.add((cur, q))
        p = best
    raise ResourceLimitError("reassignment chain exceeded the step cap")


def is_vacuous(chain: ReassignmentChain) -> bool:
    """The initiator does not keep the position it claimed."""
    p0, q0 = chain.initiator
    return chain.settled.firm_of(q0) != p0


def _transpose_matching(mu: Matching) -> Matching:
    return Matching((q, p) for p, q in mu.pairs)


def firm_reassignment_chain(instance: MatchingInstance, mu: Matching, blocker: Pair) -> ReassignmentChain:
    """Firm-initiated chain: the same construction with the sides swapped.

    Claims and matchings are reported in the transposed frame (firm first
    in each claim tuple, matchings as (worker, firm) pairs).
    """
    p0, q0 = blocker
    return reassignment_chain(instance.transpose(), _transpose_matching(mu), (q0, p0))


def is_essentially_stable(instance: MatchingInstance, mu: Matching, side: str = "Q") -> bool:
    side = _check_side(side)
    for p, q in sorted(blocking_pairs(instance, mu)):
        if side == "Q":
            chain = reassignment_chain(instance, mu, (p, q))
        else:
            chain = firm_reassignment_chain(instance, mu, (p, q))
        if not is_vacuous(chain):
            return False
    return True


# -- first choice, Pareto, first-choice maximality ---------------------------


def is_first_choice_stable(instance: MatchingInstance, mu: Matching, side: str = "P") -> bool:
    side = _check_side(side)
    for p, q in blocking_pairs(instance, mu):
        if side == "P" and instance.top_of_firm(p) == q:
            return False
        if side == "Q" and instance.top_of_worker(q) == p:
            return False
    return True


def weakly_better_for(instance: MatchingInstance, a: Matching, b: Matching, side: str) -> bool:
    """Every agent on ``side`` likes ``a`` at least as much as ``b``."""
    if side == "P":
        return all(instance.firm_rank(p, a.worker_of(p)) <= instance.firm_rank(p, b.worker_of(p)) for p in instance.firms)
    return all(instance.worker_rank(q, a.firm_of(q)) <= instance.worker_rank(q, b.firm_of(q)) for q in instance.workers)


def is_pareto_efficient(
    instance: MatchingInstance, mu: Matching, side: str = "P", all_matchings: Optional[list[Matching]] = None
) -> bool:
    side = _check_side(side)
    ms = enumerate_matchings(instance) if all_matchings is None else all_matchings
    return not any(m != mu and weakly_better_for(instance, m, mu, side) for m in ms)


def pareto_set(instance: MatchingInstance, side: str = "P", cap: int = DEFAULT_MATCHING_CAP) -> frozenset[Matching]:
    side = _check_side(side)
    ms = enumerate_matchings(instance, cap)
    return frozenset(m for m in ms if is_pareto_efficient(instance, m, side, ms))


def first_choice_pairs(instance: MatchingInstance, side: str) -> frozenset[Pair]:
    side = _check_side(side)
    if side == "P":
        return frozenset((p, instance.firm_prefs[p][0]) for p in instance.firms if instance.firm_prefs[p])
    return frozenset((instance.worker_prefs[q][0], q) for q in instance.workers if instance.worker_prefs[q])


def first_choice_maximal_set(instance: MatchingInstance, side: str = "P", cap: int = DEFAULT_MATCHING_CAP) -> frozenset[Matching]:
    tops = first_choice_pairs(instance, side)
    ms = enumerate_matchings(instance, cap)
    score = [len(m.pairs & tops) for m in ms]
    best = max(score)
    return frozenset(m for m, s in zip(ms, score) if s == best)


def is_first_choice_maximal(instance: MatchingInstance, mu: Matching, side: str = "P") -> bool:
    return mu in first_choice_maximal_set(instance, side)


# -- equilibrium sets -------------------------------------------------------


def enumerate_spe_set(instance: MatchingInstance, order_cap: int = DEFAULT_ORDER_CAP) -> frozenset[Matching]:
    return frozenset(spe(instance, s, check=False) for s in enumerate_consistent_orders(instance, order_cap))


@dataclass(frozen=True)
class ImpossibilityReport:
    spe_set: frozenset[Matching]
    qopt: Matching
    popt: Matching
    qopt_in_spe: bool
    popt_in_spe: bool
    intersections: dict[str, frozenset[Matching]]

    def lines(self) -> list[str]:
        out = [f"SPE set ({len(self.spe_set)}): " + ", ".join(repr(m) for m in sorted(self.spe_set, key=repr))]
        out.append(f"QOPT {self.qopt} in SPE set: {self.qopt_in_spe}")
        out.append(f"POPT {self.popt} in SPE set: {self.popt_in_spe}")
        for k, v in self.intersections.items():
            out.append(f"SPE set & {k}: " + (", ".join(repr(m) for m in sorted(v, key=repr)) or "empty"))
        return out


def impossibility_report(
    instance: MatchingInstance, order_cap: int = DEFAULT_ORDER_CAP, matching_cap: int = DEFAULT_MATCHING_CAP
) -> ImpossibilityReport:
    S = enumerate_spe_set(instance, order_cap)
    q, p = qopt(instance), p_oriented_da(instance)
    inter = {
        "PE^P": S & pareto_set(instance, "P", matching_cap),
        "PE^Q": S & pareto_set(instance, "Q", matching_cap),
        "FCM^P": S & first_choice_maximal_set(instance, "P", matching_cap),
        "FCM^Q": S & first_choice_maximal_set(instance, "Q", matching_cap),
    }
    return ImpossibilityReport(S, q, p, q in S, p in S, inter)


# -- combined report ---------------------------------------------------------

ALL_CHECKS = ("stable", "vnm", "essential", "first_choice", "pareto", "fcm")


@dataclass(frozen=True)
class AnalysisReport:
    stable: bool
    blocking: frozenset[Pair]
    vnm_member: Optional[bool] = None
    essentially_stable_workers: Optional[bool] = None
    essentially_stable_firms: Optional[bool] = None
    first_choice_stable_firms: Optional[bool] = None
    first_choice_stable_workers: Optional[bool] = None
    pareto_P: Optional[bool] = None
    pareto_Q: Optional[bool] = None
    fcm_P: Optional[bool] = None
    fcm_Q: Optional[bool] = None

    def implications_hold(self) -> bool:
        """A stable matching satisfies every weaker notion that was computed."""
        if not self.stable:
            return True
        weaker = (
            self.vnm_member,
            self.essentially_stable_workers,
            self.essentially_stable_firms,
            self.first_choice_stable_firms,
            self.first_choice_stable_workers,
        )
        return all(v is None or v for v in weaker)

    def to_dict(self) -> dict:
        d = {"stable": self.stable, "blocking": sorted([list(e) for e in self.blocking])}
        for k in (
            "vnm_member",
            "essentially_stable_workers",
            "essentially_stable_firms",
            "first_choice_stable_firms",
            "first_choice_stable_workers",
            "pareto_P",
            "pareto_Q",
            "fcm_P",
            "fcm_Q",
        ):
            v = getattr(self, k)
            if v is not None:
                d[k] = v
        return d


def analyze(
    instance: MatchingInstance, mu: Matching, checks: Iterable[str] = ALL_CHECKS, cap: int = DEFAULT_MATCHING_CAP
) -> AnalysisReport:
    checks = set(checks)
    unknown = checks - set(ALL_CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {', '.join(sorted(unknown))}; choose from {', '.join(ALL_CHECKS)}")
    bp = blocking_pairs(instance, mu)
    kw: dict = {}
    ms: Optional[list[Matching]] = None
    if checks & {"pareto", "fcm", "vnm"}:
        ms = enumerate_matchings(instance, cap)
    if "vnm" in checks:
        kw["vnm_member"] = mu in vnm_stable_set(instance, cap)
    if "essential" in checks:
        kw["essentially_stable_workers"] = is_essentially_stable(instance, mu, "Q")
        kw["essentially_stable_firms"] = is_essentially_stable(instance, mu, "P")
    if "first_choice" in checks:
        kw["first_choice_stable_firms"] = is_first_choice_stable(instance, mu, "P")
        kw["first_choice_stable_workers"] = is_first_choice_stable(instance, mu, "Q")
    if "pareto" in checks:
        kw["pareto_P"] = is_pareto_efficient(instance, mu, "P", ms)
        kw["pareto_Q"] = is_pareto_efficient(instance, mu, "Q", ms)
    if "fcm" in checks:
        kw["fcm_P"] = mu in first_choice_maximal_set(instance, "P", cap)
        kw["fcm_Q"] = mu in first_choice_maximal_set(instance, "Q", cap)
    return AnalysisReport(not bp, bp, **kw)


# -- disjoint union (experimental) ------------------------------------------


def disjoint_union(a: MatchingInstance, b: MatchingInstance, tags: tuple[str, str] = ("a.", "b.")) -> MatchingInstance:
    """Side-by-side copy of two instances with agents renamed by prefix."""
    ta, tb = tags
    fp = {ta + p: [ta + q for q in a.firm_prefs[p]] for p in a.firms}
    fp.update({tb + p: [tb + q for q in b.firm_prefs[p]] for p in b.firms})
    wp = {ta + q: [ta + p for p in a.worker_prefs[q]] for q in a.workers}
    wp.update({tb + q: [tb + p for p in b.worker_prefs[q]] for q in b.workers})
    return make_instance(fp, wp)


def tag_matching(mu: Matching, tag: str) -> Matching:
    return Matching((tag + p, tag + q) for p, q in mu.pairs)


def interleave_orders(
    a: OfferingOrder, b: OfferingOrder, r: random.Random, tags: tuple[str, str] = ("a.", "b.")
) -> OfferingOrder:
    """Random merge of two orders, each kept in its own relative order."""
    ta, tb = tags
    slots = ["a"] * len(a) + ["b"] * len(b)
    r.shuffle(slots)
    ia = ib = 0
    out = []
    for s in slots:
        if s == "a":
            p, q = a[ia]
            out.append((ta + p, ta + q))
            ia += 1
        else:
            p, q = b[ib]
            out.append((tb + p, tb + q))
            ib += 1
    return OfferingOrder(out)
