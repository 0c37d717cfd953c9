from __future__ import annotations

import itertools
import random

import pytest

from seqmatch.qsat.formula import (
    EXISTS,
    FORALL,
    FormulaError,
    evaluate_qbf,
    make_formula,
    normalize,
    parse_qdimacs,
    to_qdimacs,
)


def truth_by_expansion(f) -> bool:
    """Expand the prefix into an and/or tree over all assignments, innermost first."""
    vals = {bits: f.satisfied_by({i + 1: b for i, b in enumerate(bits)})
            for bits in itertools.product([False, True], repeat=f.n)}
    for i in range(f.n, 0, -1):
        combine = any if f.quantifier(i) == EXISTS else all
        vals = {k: combine([vals[k + (False,)], vals[k + (True,)]])
                for k in itertools.product([False, True], repeat=i - 1)}
    return vals[()]


def random_formula(r, n, m):
    qs = [r.choice([EXISTS, FORALL]) for _ in range(n)]
    cs = [[(r.randint(1, n), r.random() < 0.5) for _ in range(3)] for _ in range(m)]
    return make_formula(qs, cs)


def test_evaluator_matches_expansion():
    r = random.Random(71)
    for _ in range(300):
        f = random_formula(r, r.randint(1, 5), r.randint(0, 5))
        assert evaluate_qbf(f) == truth_by_expansion(f)


def test_normalize_preserves_truth_and_shape():
    r = random.Random(72)
    for _ in range(200):
        f = random_formula(r, r.randint(1, 4), r.randint(0, 3))
        g = normalize(f)
        assert g.is_normalized()
        assert evaluate_qbf(g) == evaluate_qbf(f)
        assert normalize(g) == g


def test_normalize_adds_dummy_only_when_needed():
    f = make_formula("ea", [[(2, True), (2, False), (2, True)]])
    assert normalize(f).n == 2
    g = make_formula("ae", [[(2, True), (2, False), (2, True)]])
    assert normalize(g).n == 3 and normalize(g).quantifier(1) == EXISTS


def test_qdimacs_round_trip():
    r = random.Random(73)
    for _ in range(100):
        f = normalize(random_formula(r, r.randint(1, 4), r.randint(0, 4)))
        assert parse_qdimacs(to_qdimacs(f)) == f


def test_parse_example():
    text = "c example\np cnf 3 2\ne 1 0\na 2 3 0\n1 -2 3 0\n-1 2 2 0\n"
    f = parse_qdimacs(text)
    # variable 1 appears in the matrix, so a dummy existential is prepended
    assert f.quantifiers == ("e", "e", "a", "a")
    assert f.clauses == (((2, True), (3, False), (4, True)), ((2, False), (3, True), (3, True)))


@pytest.mark.parametrize(
    "text",
    [
        "e 1 0\n1 1 1 0\n",
        "p cnf 2 1\ne 1 0\n1 2 1 0\n",
        "p cnf 1 1\ne 1 0\n1 1 0\n",
        "p cnf 1 2\ne 1 0\n1 1 1 0\n",
        "p cnf 1 1\ne 1 0\n1 1 1\n",
        "p cnf 1 1\ne 1\n1 1 1 0\n",
        "p cnf 1 1\ne 1 0\ne 1 0\n1 1 1 0\n",
        "p cnf x 1\n",
        "p cnf 1 1\ne 1 0\n1 1 1 0\ne 1 0\n",
    ],
)
def test_parse_errors(text):
    with pytest.raises(FormulaError):
        parse_qdimacs(text)


def test_make_formula_checks():
    with pytest.raises(FormulaError):
        make_formula("x", [])
    with pytest.raises(FormulaError):
        make_formula("e", [[(1, True), (1, True)]])
    with pytest.raises(FormulaError):
        make_formula("e", [[(2, True), (1, True), (1, True)]])
    with pytest.raises(FormulaError):
        evaluate_qbf(make_formula("e" * 21, []), bound=20)
