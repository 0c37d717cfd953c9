"""Sequential matching games: firms offer in a fixed order, workers accept or reject."""

from __future__ import annotations

from .da import p_oriented_da, popt, q_oriented_da, qopt
from .design import design_order, verify_design
from .model import (
    InstanceError,
    Matching,
    MatchingInstance,
    OfferingOrder,
    OrderError,
    ResourceLimitError,
    induced_order,
    make_instance,
    validate_instance,
)
from .sfda import run_sfda
from .spe import solve_spe, spe, spem_decide

__all__ = [
    "InstanceError",
    "Matching",
    "MatchingInstance",
    "OfferingOrder",
    "OrderError",
    "ResourceLimitError",
    "design_order",
    "induced_order",
    "make_instance",
    "p_oriented_da",
    "popt",
    "q_oriented_da",
    "qopt",
    "run_sfda",
    "solve_spe",
    "spe",
    "spem_decide",
    "validate_instance",
    "verify_design",
]
