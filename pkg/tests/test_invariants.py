from __future__ import annotations

import pytest

from invariants import INVARIANTS, check_blocked_equilibrium, unstable_equilibria
from seqmatch.generators import rng

ROUNDS = 200


@pytest.mark.parametrize("name", list(INVARIANTS))
def test_invariant(name):
    check = INVARIANTS[name]
    r = rng(1000 + list(INVARIANTS).index(name))
    for _ in range(ROUNDS):
        check(r)


def test_blocked_equilibria_sample():
    cases = unstable_equilibria(rng(1500), 100)
    assert len(cases) == 100
    for I, sig, mu in cases:
        check_blocked_equilibrium(I, sig, mu)
