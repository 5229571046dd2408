"""Online migration policies.

A policy is created with ``(n, initial_center)`` and then sees one request at
a time through :meth:`Policy.on_request`, which returns the node to migrate
to the center before serving (or ``None``).  The policy assumes its decision
is applied and the request is then served.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable, Optional

from .core import CostLedger, Request, StarState
from .errors import UsageError
from .rng import make_rng, uniform_index


class Behavior(str, enum.Enum):
    INTERSECTION = "I"
    UNION = "U"


class Policy:
    name = "policy"
    tracks_candidates = False

    def __init__(self, n: int, initial_center: int):
        StarState(n, initial_center)  # validates
        self.n = n
        self.initial_center = initial_center
        self.center = initial_center
        self.served = 0

    @property
    def state(self) -> StarState:
        return StarState(self.n, self.center)

    def on_request(self, req: Request, index: Optional[int] = None) -> Optional[int]:
        if index is not None and index != self.served:
            raise UsageError(f"expected request {self.served}, got request {index}")
        target = self._decide(req)
        if target == self.center:
            target = None
        if target is not None:
            self.center = target
        self.served += 1
        return target

    def _decide(self, req: Request) -> Optional[int]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(n={self.n}, center={self.center})"


class PivotTracking(Policy):
    """Candidate-set tracking shared by the deterministic and randomized variants."""

    tracks_candidates = True

    def __init__(self, n: int, initial_center: int):
        super().__init__(n, initial_center)
        self.candidates: frozenset[int] = frozenset((initial_center,))
        self.last_behavior: Optional[Behavior] = None

    def _decide(self, req: Request) -> Optional[int]:
        pair = frozenset(req)
        common = self.candidates & pair
        if common:
            self.candidates = common
            self.last_behavior = Behavior.INTERSECTION
            if self.center in common:
                return None
            return self._pick_candidate(sorted(common))
        self.candidates = self.candidates | pair
        self.last_behavior = Behavior.UNION
        return self._on_union(req)

    def _pick_candidate(self, members: list[int]) -> int:
        raise NotImplementedError

    def _on_union(self, req: Request) -> Optional[int]:
        raise NotImplementedError


class DetPivotTracking(PivotTracking):
    """Ties among candidates go to the smallest node id; union steps never migrate."""

    name = "det-pt"

    def _pick_candidate(self, members: list[int]) -> int:
        return members[0]

    def _on_union(self, req: Request) -> Optional[int]:
        return None


class RandPivotTracking(PivotTracking):
    """Uniform tie-breaks; a union step stays, or migrates either endpoint, each w.p. 1/3.

    Exactly one generator draw is consumed per random decision, in request
    order, so equal seeds give equal traces.
    """

    name = "rand-pt"

    def __init__(self, n: int, initial_center: int, seed: int = 0):
        super().__init__(n, initial_center)
        self.seed = seed
        self.rng = make_rng(seed)

    def _pick_candidate(self, members: list[int]) -> int:
        if len(members) == 1:
            return members[0]
        return members[uniform_index(self.rng, len(members))]

    def _on_union(self, req: Request) -> Optional[int]:
        choice = uniform_index(self.rng, 3)
        return (None, req.u, req.v)[choice]


class StaticPolicy(Policy):
    name = "static"

    def _decide(self, req: Request) -> Optional[int]:
        return None


class GreedyMoveFirst(Policy):
    """Moves the first endpoint of any request that misses the center."""

    name = "greedy-first"

    def _decide(self, req: Request) -> Optional[int]:
        if self.center in req:
            return None
        return req.u


class FollowLast(Policy):
    """Always centers the smaller-id endpoint of the latest request."""

    name = "follow-last"

    def _decide(self, req: Request) -> Optional[int]:
        return min(req.u, req.v)


def det_pivot_tracking(n: int, initial_center: int, seed: int = 0) -> DetPivotTracking:
    return DetPivotTracking(n, initial_center)


def rand_pivot_tracking(n: int, initial_center: int, seed: int = 0) -> RandPivotTracking:
    return RandPivotTracking(n, initial_center, seed)


def static(n: int, initial_center: int, seed: int = 0) -> StaticPolicy:
    return StaticPolicy(n, initial_center)


def greedy_move_first(n: int, initial_center: int, seed: int = 0) -> GreedyMoveFirst:
    return GreedyMoveFirst(n, initial_center)


def follow_last(n: int, initial_center: int, seed: int = 0) -> FollowLast:
    return FollowLast(n, initial_center)


PolicyFactory = Callable[[int, int, int], Policy]

# every factory takes (n, initial_center, seed); deterministic ones ignore the seed
POLICIES: dict[str, PolicyFactory] = {
    "det-pt": det_pivot_tracking,
    "rand-pt": rand_pivot_tracking,
    "static": static,
    "greedy-first": greedy_move_first,
    "follow-last": follow_last,
}
RANDOMIZED = frozenset({"rand-pt"})
DETERMINISTIC = tuple(k for k in POLICIES if k not in RANDOMIZED)


def make_policy(name: str, n: int, initial_center: int, seed: int = 0) -> Policy:
    try:
        factory = POLICIES[name]
    except KeyError:
        raise UsageError(f"unknown policy {name!r}; choose from {sorted(POLICIES)}") from None
    return factory(n, initial_center, seed)


@dataclass
class PolicyTrace:
    decisions: list[Optional[int]]
    ledger: CostLedger
    centers: list[int] = field(default_factory=list)  # center while serving request i
    candidate_history: list[frozenset[int]] = field(default_factory=list)
    behavior_history: list[Behavior] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.ledger.total
