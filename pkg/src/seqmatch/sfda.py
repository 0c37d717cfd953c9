"""Sequentially fixing deferred acceptance and the (s, t) list-width classes."""

from __future__ import annotations

from dataclasses import dataclass

from .da import qopt
from .model import Matching, MatchingInstance, OfferingOrder, validate_order
from .spe import spe


@dataclass(frozen=True)
class ListWidth:
    max_firm_list: int
    max_worker_list: int

    def as_tuple(self) -> tuple[int, int]:
        return (self.max_firm_list, self.max_worker_list)

    @property
    def tractable(self) -> bool:
        return self.max_firm_list <= 2 or self.max_worker_list <= 2


def classify(instance: MatchingInstance) -> ListWidth:
    s = max((len(v) for v in instance.firm_prefs.values()), default=0)
    t = max((len(v) for v in instance.worker_prefs.values()), default=0)
    return ListWidth(s, t)


def run_sfda(instance: MatchingInstance, order: OfferingOrder, check: bool = True) -> Matching:
    """Fix the order-earliest pair of the current worker-optimal matching, contract, repeat."""
    if check:
        validate_order(instance, order)
    cur, sig = instance, order
    fixed = []
    while cur.pairs:
        mu = qopt(cur)
        # an acceptable pair alone would block the empty matching
        assert mu.pairs, "worker-optimal matching empty while pairs remain"
        e = min(mu.pairs, key=lambda x: sig.position[x])
        fixed.append(e)
        cur, sig = cur.contract(e), sig.contract(e)
    return Matching(fixed)


@dataclass(frozen=True)
class EquivalenceReport:
    equal: bool
    sfda: Matching
    spe: Matching
    width: ListWidth

    def describe(self) -> str:
        if self.equal:
            return f"equal: {self.spe}"
        return f"MISMATCH (width {self.width.as_tuple()}): sfda={self.sfda} spe={self.spe}"


def verify_tractable_equivalence(instance: MatchingInstance, order: OfferingOrder) -> EquivalenceReport:
    w = classify(instance)
    if not w.tractable:
        raise ValueError(f"instance has list widths {w.as_tuple()}; needs firm lists <= 2 or worker lists <= 2")
    a = run_sfda(instance, order)
    b = spe(instance, order)
    return EquivalenceReport(a == b, a, b, w)
