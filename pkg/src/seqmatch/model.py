"""Value types for matching instances, matchings and offering orders.

Everything here is immutable. Deletion and contraction return new values;
nothing is edited in place.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, Optional, Tuple

Pair = Tuple[str, str]

DEFAULT_ORDER_CAP = 100_000


class InstanceError(ValueError):
    """Raised when an instance description violates the model invariants.

    ``problems`` lists every violation found, not only the first one.
    """

    def __init__(self, problems: list[str]) -> None:
        self.problems = list(problems)
        super().__init__("; ".join(self.problems) if self.problems else "invalid instance")


class OrderError(ValueError):
    """Offering or position order that does not fit the instance."""


class ResourceLimitError(RuntimeError):
    """A configured cap (orders, matchings, memo entries, tree nodes) was exceeded."""


@dataclass(frozen=True, eq=False)
class MatchingInstance:
    firms: tuple[str, ...]
    workers: tuple[str, ...]
    firm_prefs: Mapping[str, tuple[str, ...]]
    worker_prefs: Mapping[str, tuple[str, ...]]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MatchingInstance):
            return NotImplemented
        return (
            self.firms == other.firms
            and self.workers == other.workers
            and dict(self.firm_prefs) == dict(other.firm_prefs)
            and dict(self.worker_prefs) == dict(other.worker_prefs)
        )

    def __hash__(self) -> int:
        return hash((self.firms, self.workers, tuple(self.firm_prefs[p] for p in self.firms)))

    def __repr__(self) -> str:
        return f"MatchingInstance(|P|={len(self.firms)}, |Q|={len(self.workers)}, |E|={len(self.pairs)})"

    # -- derived accessors -------------------------------------------------

    @cached_property
    def pairs(self) -> frozenset[Pair]:
        return frozenset((p, q) for p in self.firms for q in self.firm_prefs[p])

    @cached_property
    def pair_list(self) -> tuple[Pair, ...]:
        """Pairs firm-major in input order, each firm's pairs in preference order."""
        return tuple((p, q) for p in self.firms for q in self.firm_prefs[p])

    @cached_property
    def _firm_rank(self) -> dict[str, dict[str, int]]:
        return {p: {q: i for i, q in enumerate(lst)} for p, lst in self.firm_prefs.items()}

    @cached_property
    def _worker_rank(self) -> dict[str, dict[str, int]]:
        return {q: {p: i for i, p in enumerate(lst)} for q, lst in self.worker_prefs.items()}

    @cached_property
    def firm_index(self) -> dict[str, int]:
        return {p: i for i, p in enumerate(self.firms)}

    @cached_property
    def worker_index(self) -> dict[str, int]:
        return {q: i for i, q in enumerate(self.workers)}

    def firm_rank(self, p: str, q: Optional[str]) -> int:
        """Position of ``q`` in ``p``'s list; being unmatched (``None``) ranks last."""
        if q is None:
            return len(self.firm_prefs[p])
        return self._firm_rank[p][q]

    def worker_rank(self, q: str, p: Optional[str]) -> int:
        if p is None:
            return len(self.worker_prefs[q])
        return self._worker_rank[q][p]

    def firm_prefers(self, p: str, a: Optional[str], b: Optional[str]) -> bool:
        """True iff firm ``p`` strictly prefers worker ``a`` to ``b`` (None = unmatched)."""
        return self.firm_rank(p, a) < self.firm_rank(p, b)

    def worker_prefers(self, q: str, a: Optional[str], b: Optional[str]) -> bool:
        return self.worker_rank(q, a) < self.worker_rank(q, b)

    def gamma_firm(self, p: str) -> tuple[str, ...]:
        return self.firm_prefs[p]

    def gamma_worker(self, q: str) -> tuple[str, ...]:
        return self.worker_prefs[q]

    def delta_firm(self, p: str) -> tuple[Pair, ...]:
        return tuple((p, q) for q in self.firm_prefs[p])

    def delta_worker(self, q: str) -> tuple[Pair, ...]:
        return tuple((p, q) for p in self.worker_prefs[q])

    def top_of_firm(self, p: str) -> Optional[str]:
        lst = self.firm_prefs[p]
        return lst[0] if lst else None

    def top_of_worker(self, q: str) -> Optional[str]:
        lst = self.worker_prefs[q]
        return lst[0] if lst else None

    def is_mutually_top(self, e: Pair) -> bool:
        p, q = e
        return self.top_of_firm(p) == q and self.top_of_worker(q) == p

    def is_empty(self) -> bool:
        return not self.pairs

    # -- calculus ----------------------------------------------------------

    def delete(self, e: Pair) -> "MatchingInstance":
        return delete_pair(self, e)

    def contract(self, e: Pair) -> "MatchingInstance":
        return contract_pair(self, e)

    def transpose(self) -> "MatchingInstance":
        """Swap the roles of firms and workers (used for firm-side mirrors)."""
        return MatchingInstance(
            firms=self.workers,
            workers=self.firms,
            firm_prefs=dict(self.worker_prefs),
            worker_prefs=dict(self.firm_prefs),
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "firms": list(self.firms),
            "workers": list(self.workers),
            "firm_prefs": {p: list(self.firm_prefs[p]) for p in self.firms},
            "worker_prefs": {q: list(self.worker_prefs[q]) for q in self.workers},
        }


def validate_instance(raw: Mapping[str, Any]) -> MatchingInstance:
    """Build a :class:`MatchingInstance` from a plain description.

    ``raw`` carries ``firms``, ``workers``, ``firm_prefs`` and ``worker_prefs``.
    Agents missing from a preference map get an empty list. All violations
    are collected and raised together as an :class:`InstanceError`.
    """
    problems: list[str] = []
    firms = [str(x) for x in raw.get("firms", [])]
    workers = [str(x) for x in raw.get("workers", [])]
    fprefs_raw = raw.get("firm_prefs", {}) or {}
    wprefs_raw = raw.get("worker_prefs", {}) or {}

    for side, names in (("firm", firms), ("worker", workers)):
        seen: set[str] = set()
        for name in names:
            if name in seen:
                problems.append(f"duplicate {side} identifier {name!r}")
            seen.add(name)
    fset, wset = set(firms), set(workers)

    for p in fprefs_raw:
        if p not in fset:
            problems.append(f"firm_prefs mentions unknown firm {p!r}")
    for q in wprefs_raw:
        if q not in wset:
            problems.append(f"worker_prefs mentions unknown worker {q!r}")

    firm_prefs: dict[str, tuple[str, ...]] = {}
    for p in firms:
        lst = [str(x) for x in fprefs_raw.get(p, [])]
        seen = set()
        for q in lst:
            if q in seen:
                problems.append(f"duplicate entry {q!r} in list of firm {p!r}")
            if q not in wset:
                problems.append(f"firm {p!r} lists unknown worker {q!r}")
            seen.add(q)
        firm_prefs[p] = tuple(lst)
    worker_prefs: dict[str, tuple[str, ...]] = {}
    for q in workers:
        lst = [str(x) for x in wprefs_raw.get(q, [])]
        seen = set()
        for p in lst:
            if p in seen:
                problems.append(f"duplicate entry {p!r} in list of worker {q!r}")
            if p not in fset:
                problems.append(f"worker {q!r} lists unknown firm {p!r}")
            seen.add(p)
        worker_prefs[q] = tuple(lst)

    from_firms = {(p, q) for p, lst in firm_prefs.items() for q in lst if q in wset}
    from_workers = {(p, q) for q, lst in worker_prefs.items() for p in lst if p in fset}
    for p, q in sorted(from_workers - from_firms):
        problems.append(f"worker {q!r} lists firm {p!r} but ({p}, {q}) is not acceptable to {p!r}")
    for p, q in sorted(from_firms - from_workers):
        problems.append(f"firm {p!r} lists worker {q!r} but ({p}, {q}) is not acceptable to {q!r}")

    if problems:
        raise InstanceError(problems)
    return MatchingInstance(tuple(firms), tuple(workers), firm_prefs, worker_prefs)


def make_instance(
    firm_prefs: Mapping[str, Iterable[str]],
    worker_prefs: Mapping[str, Iterable[str]],
    firms: Optional[Iterable[str]] = None,
    workers: Optional[Iterable[str]] = None,
) -> MatchingInstance:
    """Convenience constructor; agent order defaults to the order of the maps."""
    return validate_instance(
        {
            "firms": list(firms) if firms is not None else list(firm_prefs),
            "workers": list(workers) if workers is not None else list(worker_prefs),
            "firm_prefs": {p: list(v) for p, v in firm_prefs.items()},
            "worker_prefs": {q: list(v) for q, v in worker_prefs.items()},
        }
    )


def _require_pair(instance: MatchingInstance, e: Pair) -> None:
    if tuple(e) not in instance.pairs:
        raise InstanceError([f"pair {tuple(e)!r} is not an acceptable pair of the instance"])


def delete_pair(instance: MatchingInstance, e: Pair) -> MatchingInstance:
    """``I \\ e``: drop one acceptable pair, keep every agent."""
    _require_pair(instance, e)
    p, q = e
    fp = dict(instance.firm_prefs)
    wp = dict(instance.worker_prefs)
    fp[p] = tuple(x for x in fp[p] if x != q)
    wp[q] = tuple(x for x in wp[q] if x != p)
    return MatchingInstance(instance.firms, instance.workers, fp, wp)


def contract_pair(instance: MatchingInstance, e: Pair) -> MatchingInstance:
    """``I / e``: remove both agents of ``e`` and every pair touching either."""
    _require_pair(instance, e)
    p, q = e
    firms = tuple(x for x in instance.firms if x != p)
    workers = tuple(x for x in instance.workers if x != q)
    fp = {x: tuple(w for w in instance.firm_prefs[x] if w != q) for x in firms}
    wp = {y: tuple(f for f in instance.worker_prefs[y] if f != p) for y in workers}
    return MatchingInstance(firms, workers, fp, wp)


# -- matchings -----------------------------------------------------------


@dataclass(frozen=True)
class Matching:
    """A set of disjoint acceptable pairs; unmatched agents are implicit."""

    pairs: frozenset[Pair]

    def __init__(self, pairs: Iterable[Pair] = ()) -> None:
        fs = frozenset((str(p), str(q)) for p, q in pairs)
        firms = [p for p, _ in fs]
        workers = [q for _, q in fs]
        if len(set(firms)) != len(firms) or len(set(workers)) != len(workers):
            raise ValueError(f"not a matching: {sorted(fs)}")
        object.__setattr__(self, "pairs", fs)

    @cached_property
    def _by_firm(self) -> dict[str, str]:
        return {p: q for p, q in self.pairs}

    @cached_property
    def _by_worker(self) -> dict[str, str]:
        return {q: p for p, q in self.pairs}

    def worker_of(self, p: str) -> Optional[str]:
        return self._by_firm.get(p)

    def firm_of(self, q: str) -> Optional[str]:
        return self._by_worker.get(q)

    def __contains__(self, e: object) -> bool:
        return e in self.pairs

    def __iter__(self) -> Iterator[Pair]:
        return iter(sorted(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __or__(self, other: "Matching") -> "Matching":
        return Matching(self.pairs | other.pairs)

    def add(self, e: Pair) -> "Matching":
        return Matching(self.pairs | {tuple(e)})

    def remove(self, e: Pair) -> "Matching":
        return Matching(self.pairs - {tuple(e)})

    def sorted_pairs(self, instance: Optional[MatchingInstance] = None) -> list[Pair]:
        """Pairs sorted by firm input order (lexicographic without an instance)."""
        if instance is None:
            return sorted(self.pairs)
        idx = instance.firm_index
        return sorted(self.pairs, key=lambda e: (idx.get(e[0], len(idx)), e[0], e[1]))

    def __repr__(self) -> str:
        inner = ", ".join(f"({p},{q})" for p, q in sorted(self.pairs))
        return "{" + inner + "}"

    def is_valid_in(self, instance: MatchingInstance) -> bool:
        return self.pairs <= instance.pairs


def matched_agents(mu: Matching) -> tuple[frozenset[str], frozenset[str]]:
    """Return (matched firms, matched workers)."""
    return frozenset(p for p, _ in mu.pairs), frozenset(q for _, q in mu.pairs)


def blocking_pairs(instance: MatchingInstance, mu: Matching) -> frozenset[Pair]:
    """All acceptable pairs where both sides strictly prefer each other to ``mu``."""
    out = set()
    for p, q in instance.pairs:
        if (p, q) in mu.pairs:
            continue
        if instance.firm_prefers(p, q, mu.worker_of(p)) and instance.worker_prefers(q, p, mu.firm_of(q)):
            out.add((p, q))
    return frozenset(out)


def is_stable(instance: MatchingInstance, mu: Matching) -> bool:
    return not blocking_pairs(instance, mu)


# -- orders --------------------------------------------------------------


@dataclass(frozen=True)
class OfferingOrder:
    """A sequence of all acceptable pairs, consistent with every firm's list."""

    pairs: tuple[Pair, ...]

    def __init__(self, pairs: Iterable[Pair]) -> None:
        object.__setattr__(self, "pairs", tuple((str(p), str(q)) for p, q in pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[Pair]:
        return iter(self.pairs)

    def __getitem__(self, i: int) -> Pair:
        return self.pairs[i]

    @cached_property
    def position(self) -> dict[Pair, int]:
        """0-based index of each pair (the inverse permutation)."""
        return {e: i for i, e in enumerate(self.pairs)}

    def first(self) -> Pair:
        return self.pairs[0]

    def delete(self, e: Pair) -> "OfferingOrder":
        return delete_from_order(self, e)

    def contract(self, e: Pair) -> "OfferingOrder":
        return contract_order(self, e)

    def restrict(self, instance: MatchingInstance) -> "OfferingOrder":
        keep = instance.pairs
        return OfferingOrder(e for e in self.pairs if e in keep)


def validate_order(instance: MatchingInstance, order: OfferingOrder) -> None:
    """Raise :class:`OrderError` unless ``order`` is in Sigma_I."""
    seq = list(order.pairs)
    if len(seq) != len(set(seq)):
        raise OrderError("offering order repeats a pair")
    if set(seq) != instance.pairs:
        missing = sorted(instance.pairs - set(seq))
        extra = sorted(set(seq) - instance.pairs)
        raise OrderError(f"offering order is not a permutation of E (missing {missing}, extra {extra})")
    last_rank: dict[str, int] = {}
    for p, q in seq:
        r = instance.firm_rank(p, q)
        if last_rank.get(p, -1) > r:
            raise OrderError(f"order is inconsistent with the preference of firm {p!r} at ({p}, {q})")
        last_rank[p] = r


def is_consistent(instance: MatchingInstance, order: OfferingOrder) -> bool:
    try:
        validate_order(instance, order)
    except OrderError:
        return False
    return True


def delete_from_order(order: OfferingOrder, e: Pair) -> OfferingOrder:
    e = tuple(e)
    if e not in order.position:
        raise OrderError(f"pair {e!r} is not in the order")
    return OfferingOrder(x for x in order.pairs if x != e)


def contract_order(order: OfferingOrder, e: Pair) -> OfferingOrder:
    e = tuple(e)
    if e not in order.position:
        raise OrderError(f"pair {e!r} is not in the order")
    p, q = e
    return OfferingOrder(x for x in order.pairs if x[0] != p and x[1] != q)


def induced_order(instance: MatchingInstance, position_order: Iterable[str]) -> OfferingOrder:
    """Offering order in which each firm makes all its offers in one block."""
    pi = list(position_order)
    if len(pi) != len(set(pi)) or set(pi) != set(instance.firms):
        raise OrderError(f"position order {pi} is not a permutation of the firms")
    return OfferingOrder((p, q) for p in pi for q in instance.firm_prefs[p])


def is_position_based(instance: MatchingInstance, order: OfferingOrder) -> tuple[bool, Optional[tuple[str, ...]]]:
    """Return ``(True, pi)`` when every firm's offers are contiguous in ``order``.

    Firms without acceptable pairs are appended to ``pi`` in input order.
    """
    pi: list[str] = []
    closed: set[str] = set()
    current: Optional[str] = None
    for p, _ in order.pairs:
        if p != current:
            if p in closed:
                return False, None
            if current is not None:
                closed.add(current)
            current = p
            pi.append(p)
    seen = set(pi)
    pi.extend(p for p in instance.firms if p not in seen)
    return True, tuple(pi)


def count_consistent_orders(instance: MatchingInstance) -> int:
    """|Sigma_I| = |E|! / prod_p |delta(p)|!."""
    total = math.factorial(len(instance.pairs))
    for p in instance.firms:
        total //= math.factorial(len(instance.firm_prefs[p]))
    return total


def enumerate_consistent_orders(
    instance: MatchingInstance, cap: int = DEFAULT_ORDER_CAP
) -> Iterator[OfferingOrder]:
    """Yield every consistent offering order exactly once.

    Orders are interleavings of the per-firm chains, produced in lexicographic
    order of the firm sequence under input firm order.
    """
    count = count_consistent_orders(instance)
    if count > cap:
        raise ResourceLimitError(f"|Sigma_I| = {count} exceeds the order cap {cap}")
    firms = [p for p in instance.firms if instance.firm_prefs[p]]
    lists = [instance.firm_prefs[p] for p in firms]
    pos = [0] * len(firms)
    total = len(instance.pairs)
    seq: list[Pair] = []

    def rec() -> Iterator[OfferingOrder]:
        if len(seq) == total:
            yield OfferingOrder(seq)
            return
        for i, p in enumerate(firms):
            if pos[i] < len(lists[i]):
                seq.append((p, lists[i][pos[i]]))
                pos[i] += 1
                yield from rec()
                pos[i] -= 1
                seq.pop()

    yield from rec()


# -- small helpers -------------------------------------------------------


def union_matching(mu: Matching, e: Pair) -> Matching:
    """``mu + e``."""
    return mu.add(e)


def as_matching(pairs: Iterable[Pair]) -> Matching:
    return Matching(pairs)


def dict_of(instance: MatchingInstance) -> Dict[str, Any]:
    return instance.to_dict()
