"""Exhaustive reference solver for small instances.

Enumerates center trajectories depth first, center ids ascending at every
step, pruning any partial trajectory that can no longer tie the best complete
one.  It shares no code with the dynamic program in ``offline`` and exists
only to certify it.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import RequestSequence
from .errors import BudgetExceeded

DEFAULT_BUDGET = 6**12
DEFAULT_CAP = 10_000


@dataclass(frozen=True)
class OracleResult:
    min_cost: int
    optimal_trajectories: tuple[tuple[int, ...], ...]
    lexmin_reversed_phases: tuple[int, ...]
    overflow: bool = False  # True when more optima existed than ``cap``


def _reversed_runs(traj: list[int]) -> tuple[int, ...]:
    runs = []
    length = 0
    for i in range(len(traj) - 1, -1, -1):
        length += 1
        if i == 0 or traj[i - 1] != traj[i]:
            runs.append(length)
            length = 0
    return tuple(runs)


def brute_force_opt(
    seq: RequestSequence, cap: int = DEFAULT_CAP, budget: int = DEFAULT_BUDGET
) -> OracleResult:
    n = seq.n
    reqs = [(r.u, r.v) for r in seq.requests]
    L = len(reqs)
    if n**L > budget:
        raise BudgetExceeded(f"{n}^{L} trajectories exceed the budget of {budget}")
    if L == 0:
        return OracleResult(0, ((),), ())

    # staying on the initial center is feasible, so its cost is a valid incumbent
    c0 = seq.initial_center
    best = sum(1 if c0 in r else 2 for r in reqs)
    optima: list[tuple[int, ...]] = []
    lexmin: tuple[int, ...] | None = None
    overflow = False
    traj = [0] * L

    def visit(i: int, prev: int, cost: int) -> None:
        nonlocal best, optima, lexmin, overflow
        if i == L:
            if cost < best:
                best, optima, lexmin, overflow = cost, [], None, False
            runs = _reversed_runs(traj)
            if lexmin is None or runs < lexmin:
                lexmin = runs
            if len(optima) < cap:
                optima.append(tuple(traj))
            else:
                overflow = True
            return
        u, v = reqs[i]
        remaining = L - i - 1
        for c in range(n):
            step = (c != prev) + (1 if c == u or c == v else 2)
            total = cost + step
            if total + remaining > best:
                continue
            traj[i] = c
            visit(i + 1, c, total)

    visit(0, c0, 0)
    assert lexmin is not None
    return OracleResult(best, tuple(optima), lexmin, overflow)
