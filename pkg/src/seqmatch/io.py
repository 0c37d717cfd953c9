"""JSON file formats for instances, orders and matchings."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .model import (
    Matching,
    MatchingInstance,
    OfferingOrder,
    OrderError,
    induced_order,
    validate_instance,
    validate_order,
)

PathLike = Union[str, Path]


def instance_to_json(instance: MatchingInstance) -> str:
    return json.dumps(instance.to_dict(), indent=2) + "\n"


def instance_from_json(text: str) -> MatchingInstance:
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError("instance file must hold a JSON object")
    return validate_instance(data)


def load_instance(path: PathLike) -> MatchingInstance:
    return instance_from_json(Path(path).read_text(encoding="utf-8"))


def save_instance(instance: MatchingInstance, path: PathLike) -> None:
    Path(path).write_text(instance_to_json(instance), encoding="utf-8")


def order_from_data(instance: MatchingInstance, data: Any) -> OfferingOrder:
    """Accept ``{"pairs": [[f, w], ...]}`` or ``{"position_order": [f, ...]}``."""
    if not isinstance(data, dict):
        raise OrderError("order file must hold a JSON object")
    if "pairs" in data:
        order = OfferingOrder(tuple(e) for e in data["pairs"])
        validate_order(instance, order)
        return order
    if "position_order" in data:
        return induced_order(instance, data["position_order"])
    raise OrderError("order file needs a 'pairs' or a 'position_order' key")


def load_order(instance: MatchingInstance, path: PathLike) -> OfferingOrder:
    return order_from_data(instance, json.loads(Path(path).read_text(encoding="utf-8")))


def order_to_json(order: OfferingOrder, position_order: tuple[str, ...] | None = None) -> str:
    data: dict[str, Any] = {}
    if position_order is not None:
        data["position_order"] = list(position_order)
    else:
        data["pairs"] = [list(e) for e in order.pairs]
    return json.dumps(data, indent=2) + "\n"


def matching_to_list(mu: Matching, instance: MatchingInstance | None = None) -> list[list[str]]:
    return [list(e) for e in mu.sorted_pairs(instance)]


def format_matching(mu: Matching, instance: MatchingInstance | None = None) -> str:
    return "{" + ", ".join(f"({p},{q})" for p, q in mu.sorted_pairs(instance)) + "}"
