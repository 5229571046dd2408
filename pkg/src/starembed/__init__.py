"""Online embedding of communication patterns into a star host."""
from __future__ import annotations

__version__ = "0.1.0"

from .core import CostLedger, Request, RequestSequence, StarState, replay, serve_cost
from .errors import BudgetExceeded, InputError, InvariantViolation, StarEmbedError, UsageError
from .offline import Label, OptSolution, block_decompose, label_requests, opt_cost, opt_star
from .oracle import OracleResult, brute_force_opt
from .policies import POLICIES, DetPivotTracking, RandPivotTracking, make_policy

__all__ = [
    "BudgetExceeded",
    "CostLedger",
    "DetPivotTracking",
    "InputError",
    "InvariantViolation",
    "Label",
    "OptSolution",
    "OracleResult",
    "POLICIES",
    "RandPivotTracking",
    "Request",
    "RequestSequence",
    "StarEmbedError",
    "StarState",
    "UsageError",
    "block_decompose",
    "brute_force_opt",
    "label_requests",
    "make_policy",
    "opt_cost",
    "opt_star",
    "replay",
    "serve_cost",
]
