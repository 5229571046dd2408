"""Star-topology cost model.

A configuration is fully described by ``(n, center)``: a request costs 1 when
one of its endpoints sits on the central host and 2 otherwise, and replacing
the center costs 1.  Where the non-central nodes sit never changes a cost, so
it is not modelled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import InputError, InvariantViolation

MIGRATION_COST = 1


class Request(NamedTuple):
    """An unordered pair of distinct guest nodes, stored in emission order."""

    u: int
    v: int

    def nodes(self) -> frozenset[int]:
        return frozenset((self.u, self.v))


def _check_node(node: int, n: int, what: str = "node") -> None:
    if not isinstance(node, int) or isinstance(node, bool) or not 0 <= node < n:
        raise InputError(f"{what} {node!r} is not a valid node id for n={n}")


def validate_request(req: Request, n: int) -> None:
    _check_node(req.u, n)
    _check_node(req.v, n)
    if req.u == req.v:
        raise InputError(f"request endpoints must differ, got {tuple(req)}")


@dataclass(frozen=True)
class StarState:
    n: int
    center: int

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise InputError(f"a star needs at least 2 hosts, got n={self.n!r}")
        _check_node(self.center, self.n, "center")


@dataclass(frozen=True)
class RequestSequence:
    n: int
    initial_center: int
    requests: tuple[Request, ...] = ()

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 2:
            raise InputError(f"a star needs at least 2 hosts, got n={self.n!r}")
        _check_node(self.initial_center, self.n, "initial_center")
        reqs = tuple(r if isinstance(r, Request) else Request(*r) for r in self.requests)
        for r in reqs:
            validate_request(r, self.n)
        object.__setattr__(self, "requests", reqs)

    @classmethod
    def of(cls, n: int, initial_center: int, pairs: Iterable[Sequence[int]]) -> "RequestSequence":
        return cls(n, initial_center, tuple(Request(int(a), int(b)) for a, b in pairs))

    def __len__(self) -> int:
        return len(self.requests)

    def __iter__(self):
        return iter(self.requests)

    def __getitem__(self, i):
        return self.requests[i]


@dataclass(frozen=True)
class CostLedger:
    """Per-request serve costs plus migration events ``(request index, new center)``."""

    serve_costs: tuple[int, ...] = ()
    migrations: tuple[tuple[int, int], ...] = ()
    total: int = field(default=-1)

    def __post_init__(self) -> None:
        expected = sum(self.serve_costs) + MIGRATION_COST * len(self.migrations)
        if self.total == -1:
            object.__setattr__(self, "total", expected)
        elif self.total != expected:
            raise InvariantViolation(f"ledger total {self.total} != recomputed {expected}")
        if any(c not in (1, 2) for c in self.serve_costs):
            raise InvariantViolation("serve costs must lie in {1, 2}")

    def per_request_costs(self) -> list[int]:
        """Serve cost of each request plus the migration taken just before it."""
        costs = list(self.serve_costs)
        for idx, _ in self.migrations:
            costs[idx] += MIGRATION_COST
        return costs


def serve_cost(state: StarState, req: Request) -> int:
    validate_request(req, state.n)
    return 1 if state.center == req.u or state.center == req.v else 2


def migrate(state: StarState, new_center: int) -> tuple[StarState, int]:
    """Move ``new_center`` to the central host. Staying put is free."""
    _check_node(new_center, state.n, "new_center")
    if new_center == state.center:
        return state, 0
    return StarState(state.n, new_center), MIGRATION_COST


def replay(seq: RequestSequence, decisions: Sequence[Optional[int]]) -> CostLedger:
    """Re-execute a decision trace; ``decisions[i]`` is the center chosen before request i."""
    if len(decisions) != len(seq.requests):
        raise InputError(
            f"{len(decisions)} decisions for {len(seq.requests)} requests"
        )
    state = StarState(seq.n, seq.initial_center)
    serve: list[int] = []
    moves: list[tuple[int, int]] = []
    for i, (req, target) in enumerate(zip(seq.requests, decisions)):
        if target is not None:
            state, cost = migrate(state, target)
            if cost:
                moves.append((i, target))
        serve.append(serve_cost(state, req))
    return CostLedger(tuple(serve), tuple(moves))


def trajectory_cost(seq: RequestSequence, trajectory: Sequence[int]) -> int:
    """Total cost of serving ``seq`` with ``trajectory[i]`` at the center for request i."""
    if len(trajectory) != len(seq.requests):
        raise InputError("trajectory length does not match the sequence")
    prev = seq.initial_center
    total = 0
    for c, (u, v) in zip(trajectory, seq.requests):
        total += (c != prev) + (1 if c == u or c == v else 2)
        prev = c
    return total
