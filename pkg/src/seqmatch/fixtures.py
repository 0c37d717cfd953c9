"""Worked instances with their known results.

Each fixture carries the instance, the named orders, and the expected
outcomes as plain data so that tests, the CLI and the README can share
them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .model import Matching, MatchingInstance, OfferingOrder, induced_order, make_instance


@dataclass(frozen=True)
class Fixture:
    name: str
    description: str
    instance: MatchingInstance
    position_orders: dict[str, tuple[str, ...]] = field(default_factory=dict)
    expected: dict[str, Any] = field(default_factory=dict)

    def order(self, key: str) -> OfferingOrder:
        return induced_order(self.instance, self.position_orders[key])


def M(*pairs: str) -> Matching:
    """``M("p1q1", "p2q3")`` style shorthand for matchings over p#/q# names."""
    out = []
    for s in pairs:
        k = s.index("q")
        out.append((s[:k], s[k:]))
    return Matching(out)


def three_firm() -> MatchingInstance:
    """Three firms, three workers, six pairs; unique stable matching."""
    return make_instance(
        {"p1": ["q1"], "p2": ["q2", "q1", "q3"], "p3": ["q3", "q2"]},
        {"q1": ["p2", "p1"], "q2": ["p3", "p2"], "q3": ["p2", "p3"]},
    )


def rural_hospital_a() -> MatchingInstance:
    return make_instance(
        {"p1": ["q2", "q1", "q4"], "p2": ["q4", "q2"], "p3": ["q1", "q3"], "p4": ["q4"]},
        {"q1": ["p1", "p3"], "q2": ["p2", "p1"], "q3": ["p3"], "q4": ["p1", "p4", "p2"]},
    )


def rural_hospital_b() -> MatchingInstance:
    return make_instance(
        {"p1": ["q2", "q1", "q3"], "p2": ["q2", "q4"], "p3": ["q3", "q2"], "p4": ["q1"]},
        {"q1": ["p1", "p4"], "q2": ["p3", "p2", "p1"], "q3": ["p1", "p3"], "q4": ["p2"]},
    )


def weak_stability() -> MatchingInstance:
    return make_instance(
        {"p1": ["q1", "q2"], "p2": ["q1", "q2", "q3"], "p3": ["q3", "q1"]},
        {"q1": ["p3", "p1", "p2"], "q2": ["p2", "p1"], "q3": ["p2", "p3"]},
    )


def two_by_two() -> MatchingInstance:
    return make_instance(
        {"p1": ["q2", "q1"], "p2": ["q1", "q2"]},
        {"q1": ["p1", "p2"], "q2": ["p2", "p1"]},
    )


def two_by_three() -> MatchingInstance:
    return make_instance(
        {"p1": ["q1", "q3", "q2"], "p2": ["q2", "q3", "q1"]},
        {"q1": ["p2", "p1"], "q2": ["p1", "p2"], "q3": ["p1", "p2"]},
    )


def catalog() -> dict[str, Fixture]:
    fx = [
        Fixture(
            "three_firm",
            "3x3 game whose equilibrium depends on the order of firms",
            three_firm(),
            {"sigma": ("p1", "p2", "p3"), "sigma_prime": ("p2", "p3", "p1")},
            {
                "spe": {"sigma": M("p1q1", "p2q3", "p3q2"), "sigma_prime": M("p1q1", "p2q2", "p3q3")},
                "first_action": {"sigma": "ACCEPT", "sigma_prime": "ACCEPT"},
                "qopt": M("p1q1", "p2q2", "p3q3"),
                "width": (3, 2),
                "order_count": 60,
                "tree_leaves": {"sigma": 17},
            },
        ),
        Fixture(
            "rural_hospital_a",
            "the set of matched agents changes with the order (first variant)",
            rural_hospital_a(),
            {"sigma1": ("p1", "p2", "p3", "p4"), "sigma2": ("p4", "p3", "p2", "p1")},
            {"spe": {"sigma1": M("p1q1", "p2q2", "p3q3", "p4q4"), "sigma2": M("p1q4", "p2q2", "p3q1")}},
        ),
        Fixture(
            "rural_hospital_b",
            "the set of matched agents changes with the order (second variant)",
            rural_hospital_b(),
            {"sigma1": ("p1", "p2", "p3", "p4"), "sigma2": ("p2", "p4", "p1", "p3")},
            {"spe": {"sigma1": M("p1q1", "p2q2", "p3q3"), "sigma2": M("p1q3", "p2q4", "p3q2", "p4q1")}},
        ),
        Fixture(
            "weak_stability",
            "equilibrium outside the vNM-stable set and not essentially stable",
            weak_stability(),
            {"sigma": ("p1", "p2", "p3")},
            {
                "spe": {"sigma": M("p1q2", "p2q3", "p3q1")},
                "blocking": {"sigma": frozenset({("p2", "q2")})},
                "vnm": frozenset({M("p1q1", "p2q2", "p3q3")}),
                "essentially_stable_workers": {"sigma": False},
                "first_choice_stable_workers": {"sigma": False},
            },
        ),
        Fixture(
            "two_by_two",
            "no order reaches the firm-optimal matching",
            two_by_two(),
            {},
            {
                "qopt": M("p1q1", "p2q2"),
                "popt": M("p1q2", "p2q1"),
                "spe_set": frozenset({M("p1q1", "p2q2")}),
                "pareto_P": frozenset({M("p1q2", "p2q1")}),
                "fcm_P": frozenset({M("p1q2", "p2q1")}),
                "popt_in_spe": False,
                "spe_cap_pareto_P_empty": True,
                "spe_cap_fcm_P_empty": True,
            },
        ),
        Fixture(
            "two_by_three",
            "no order reaches a worker-side efficient matching",
            two_by_three(),
            {},
            {
                "spe_set": frozenset({M("p1q1", "p2q2")}),
                "pareto_Q": frozenset(
                    {M("p1q2", "p2q1"), M("p1q3", "p2q1"), M("p1q2", "p2q3"), M("p1q3", "p2q2")}
                ),
                "fcm_Q": frozenset({M("p1q2", "p2q1"), M("p1q3", "p2q1")}),
                "spe_cap_pareto_Q_empty": True,
                "spe_cap_fcm_Q_empty": True,
            },
        ),
    ]
    return {f.name: f for f in fx}


def get(name: str) -> Fixture:
    cat = catalog()
    if name not in cat:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(cat)}")
    return cat[name]


@dataclass(frozen=True)
class CheckResult:
    fixture: str
    check: str
    ok: bool
    detail: str = ""


def run_checks(names: list[str] | None = None) -> list[CheckResult]:
    """Recompute every expected value stored in the catalog and compare."""
    from .analysis import (
        blocking_pairs,
        enumerate_spe_set,
        first_choice_maximal_set,
        is_essentially_stable,
        is_first_choice_stable,
        pareto_set,
        vnm_stable_set,
    )
    from .da import popt, qopt
    from .model import count_consistent_orders
    from .sfda import classify
    from .spe import build_game_tree, count_leaves, solve_spe

    out: list[CheckResult] = []
    cat = catalog()
    for name in names or list(cat):
        fx = cat[name]
        I, exp = fx.instance, fx.expected
        spe_cache: dict[str, Any] = {}

        def res(key: str):
            if key not in spe_cache:
                spe_cache[key] = solve_spe(I, fx.order(key))
            return spe_cache[key]

        def add(check: str, got: Any, want: Any) -> None:
            ok = got == want
            out.append(CheckResult(name, check, ok, "" if ok else f"got {got!r}, expected {want!r}"))

        for key, want in exp.get("spe", {}).items():
            add(f"spe[{key}]", res(key).matching, want)
        for key, want in exp.get("first_action", {}).items():
            add(f"first_action[{key}]", res(key).first_action.value, want)
        for key, want in exp.get("blocking", {}).items():
            add(f"blocking[{key}]", blocking_pairs(I, res(key).matching), want)
        for key, want in exp.get("essentially_stable_workers", {}).items():
            add(f"essentially_stable_workers[{key}]", is_essentially_stable(I, res(key).matching, "Q"), want)
        for key, want in exp.get("first_choice_stable_workers", {}).items():
            add(f"first_choice_stable_workers[{key}]", is_first_choice_stable(I, res(key).matching, "Q"), want)
        for key, want in exp.get("tree_leaves", {}).items():
            add(f"tree_leaves[{key}]", count_leaves(build_game_tree(I, fx.order(key))), want)
        if "qopt" in exp:
            add("qopt", qopt(I), exp["qopt"])
        if "popt" in exp:
            add("popt", popt(I), exp["popt"])
        if "width" in exp:
            add("width", classify(I).as_tuple(), exp["width"])
        if "order_count" in exp:
            add("order_count", count_consistent_orders(I), exp["order_count"])
        if "vnm" in exp:
            add("vnm", vnm_stable_set(I), exp["vnm"])
        sets = {"pareto_P": lambda: pareto_set(I, "P"), "pareto_Q": lambda: pareto_set(I, "Q"),
                "fcm_P": lambda: first_choice_maximal_set(I, "P"), "fcm_Q": lambda: first_choice_maximal_set(I, "Q")}
        for key, fn in sets.items():
            if key in exp:
                add(key, fn(), exp[key])
        if "spe_set" in exp or "popt_in_spe" in exp or any(k.startswith("spe_cap_") for k in exp):
            S = enumerate_spe_set(I)
            if "spe_set" in exp:
                add("spe_set", S, exp["spe_set"])
            if "popt_in_spe" in exp:
                add("popt_in_spe", popt(I) in S, exp["popt_in_spe"])
            for key, fn in sets.items():
                flag = f"spe_cap_{key}_empty"
                if flag in exp:
                    add(flag, not (S & fn()), exp[flag])
    return out
