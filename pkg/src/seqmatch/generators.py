"""Seeded random instance families for property tests and experiments.

Set ``SEQMATCH_SEED`` to fix the base seed; every helper also takes an
explicit ``random.Random`` so callers can derive independent streams.
"""

from __future__ import annotations

import os
import random
from typing import Optional

from .model import MatchingInstance, OfferingOrder, make_instance

DEFAULT_SEED = 20240607


def base_seed() -> int:
    raw = os.environ.get("SEQMATCH_SEED")
    return int(raw) if raw else DEFAULT_SEED


def rng(offset: int = 0) -> random.Random:
    return random.Random(base_seed() * 1_000_003 + offset)


def random_instance(
    r: random.Random,
    n_firms: int,
    n_workers: int,
    density: float = 0.6,
    max_pairs: Optional[int] = None,
    max_firm_list: Optional[int] = None,
    max_worker_list: Optional[int] = None,
) -> MatchingInstance:
    """Random bipartite graph with optional degree caps and size cap, then random lists."""
    firms = [f"p{i + 1}" for i in range(n_firms)]
    workers = [f"q{j + 1}" for j in range(n_workers)]
    cand = [(p, q) for p in firms for q in workers]
    r.shuffle(cand)
    fdeg = {p: 0 for p in firms}
    wdeg = {q: 0 for q in workers}
    edges = []
    for p, q in cand:
        if r.random() >= density:
            continue
        if max_pairs is not None and len(edges) >= max_pairs:
            break
        if max_firm_list is not None and fdeg[p] >= max_firm_list:
            continue
        if max_worker_list is not None and wdeg[q] >= max_worker_list:
            continue
        edges.append((p, q))
        fdeg[p] += 1
        wdeg[q] += 1
    fp: dict[str, list[str]] = {p: [] for p in firms}
    wp: dict[str, list[str]] = {q: [] for q in workers}
    for p, q in edges:
        fp[p].append(q)
        wp[q].append(p)
    for lst in list(fp.values()) + list(wp.values()):
        r.shuffle(lst)
    return make_instance(fp, wp, firms, workers)


def random_small_instance(r: random.Random, max_agents: int = 4, max_pairs: int = 12) -> MatchingInstance:
    return random_instance(
        r,
        r.randint(1, max_agents),
        r.randint(1, max_agents),
        density=r.choice([0.4, 0.6, 0.8, 1.0]),
        max_pairs=max_pairs,
    )


def random_st_instance(
    r: random.Random, s: Optional[int], t: Optional[int], max_pairs: int = 12, max_agents: int = 6
) -> MatchingInstance:
    """Instance with firm lists at most ``s`` and worker lists at most ``t`` (None = unbounded)."""
    return random_instance(
        r,
        r.randint(1, max_agents),
        r.randint(1, max_agents),
        density=r.choice([0.5, 0.7, 0.9]),
        max_pairs=max_pairs,
        max_firm_list=s,
        max_worker_list=t,
    )


def random_order(r: random.Random, instance: MatchingInstance) -> OfferingOrder:
    """Uniform random interleaving of the firms' preference chains."""
    slots = [p for p in instance.firms for _ in instance.firm_prefs[p]]
    r.shuffle(slots)
    pos = {p: 0 for p in instance.firms}
    out = []
    for p in slots:
        out.append((p, instance.firm_prefs[p][pos[p]]))
        pos[p] += 1
    return OfferingOrder(out)
