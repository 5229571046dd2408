"""Exact offline optimum and the canonical optimal schedule OPT*.

The dynamic program tracks, for every request index ``i`` and node ``c``, the
cheapest way to serve requests ``0..i`` with ``c`` at the center while serving
request ``i``.  At most one migration happens per request, right before it is
served; two back-to-back migrations are never cheaper than one.

OPT* is the optimal schedule whose phase lengths, read from last to first, are
lexicographically smallest.  It is recovered from the table of prefix optima
by a backward pass that fixes one phase at a time.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .core import RequestSequence
from .errors import InvariantViolation

_INF = float("inf")


class Label(str, enum.Enum):
    CHEAP = "Γ"
    EXPENSIVE = "E"

    def __str__(self) -> str:
        return self.value


class Phase(NamedTuple):
    start: int  # inclusive
    end: int  # inclusive
    pivot: int

    @property
    def length(self) -> int:
        return self.end - self.start + 1


class Block(NamedTuple):
    expensive: int
    cheap: int
    start: int

    @property
    def end(self) -> int:
        return self.start + self.expensive + self.cheap  # exclusive


@dataclass(frozen=True)
class BlockDecomposition:
    prefix_len: int
    blocks: tuple[Block, ...]
    suffix_len: int

    def expand(self) -> list[Label]:
        out = [Label.CHEAP] * self.prefix_len
        for b in self.blocks:
            out += [Label.EXPENSIVE] * b.expensive + [Label.CHEAP] * b.cheap
        return out + [Label.EXPENSIVE] * self.suffix_len


@dataclass(frozen=True)
class OptSolution:
    trajectory: tuple[int, ...]
    total_cost: int
    phases: tuple[Phase, ...]
    labels: tuple[Label, ...]

    @property
    def reversed_phase_lengths(self) -> tuple[int, ...]:
        return tuple(p.length for p in reversed(self.phases))


def prefix_table(seq: RequestSequence) -> list[list[float]]:
    """``table[i][c]``: min cost of requests ``0..i`` with ``c`` central at request ``i``."""
    n = seq.n
    prev: list[float] = [_INF] * n
    prev[seq.initial_center] = 0
    table = []
    for u, v in seq.requests:
        switch = min(prev) + 1
        row = [(p if p < switch else switch) + 2 for p in prev]
        row[u] -= 1
        row[v] -= 1
        table.append(row)
        prev = row
    return table


def opt_cost(seq: RequestSequence) -> tuple[int, list[int]]:
    """Minimum total cost and one trajectory achieving it."""
    if not seq.requests:
        return 0, []
    table = prefix_table(seq)
    last = table[-1]
    best = min(last)
    c = last.index(best)
    traj = [c]
    for i in range(len(table) - 1, 0, -1):
        u, v = seq.requests[i]
        serve = 1 if c == u or c == v else 2
        target = table[i][c] - serve
        row = table[i - 1]
        if row[c] != target:
            c = row.index(target - 1)
        traj.append(c)
    traj.reverse()
    return int(best), traj


def extract_phases(trajectory: Sequence[int]) -> list[Phase]:
    """Maximal runs of equal center."""
    phases: list[Phase] = []
    start = 0
    for i in range(1, len(trajectory) + 1):
        if i == len(trajectory) or trajectory[i] != trajectory[start]:
            phases.append(Phase(start, i - 1, trajectory[start]))
            start = i
    return phases


def reversed_phase_lengths(trajectory: Sequence[int]) -> tuple[int, ...]:
    return tuple(p.length for p in reversed(extract_phases(trajectory)))


class _Tightness:
    """Which DP transitions lie on some optimal prefix."""

    def __init__(self, seq: RequestSequence, table: list[list[float]]):
        self.seq = seq
        self.table = table

    def serve(self, i: int, c: int) -> int:
        u, v = self.seq.requests[i]
        return 1 if c == u or c == v else 2

    def stay(self, i: int, c: int) -> bool:
        return i > 0 and self.table[i - 1][c] + self.serve(i, c) == self.table[i][c]

    def switch(self, i: int, src: int, dst: int) -> bool:
        return (
            i > 0
            and src != dst
            and self.table[i - 1][src] + 1 + self.serve(i, dst) == self.table[i][dst]
        )

    def switch_predecessors(self, i: int, dst: int) -> list[int]:
        need = self.table[i][dst] - 1 - self.serve(i, dst)
        row = self.table[i - 1]
        return [e for e in range(self.seq.n) if e != dst and row[e] == need]

    def latest_starts(self) -> list[list[int]]:
        """``ls[j][c]``: latest phase start for a phase with pivot ``c`` ending at ``j``.

        -1 marks nodes that no optimal prefix reaches.
        """
        n = self.seq.n
        ls: list[list[int]] = []
        for j, row in enumerate(self.table):
            cur = [-1] * n
            if j == 0:
                for c in range(n):
                    if row[c] < _INF:
                        cur[c] = 0
            else:
                prev_row = self.table[j - 1]
                ordered = sorted(range(n), key=prev_row.__getitem__)
                m1 = prev_row[ordered[0]]
                m2 = prev_row[ordered[1]]
                for c in range(n):
                    serve = self.serve(j, c)
                    best_other = m2 if ordered[0] == c else m1
                    if best_other + 1 + serve == row[c]:
                        cur[c] = j
                    elif prev_row[c] + serve == row[c]:
                        cur[c] = ls[j - 1][c]
            ls.append(cur)
        return ls


def _canonical_trajectory(seq: RequestSequence, table: list[list[float]], best: float) -> list[int]:
    tight = _Tightness(seq, table)
    ls = tight.latest_starts()
    last = len(table) - 1

    # Backward pass: shortest last phase, then shortest penultimate, ...
    terminals = [c for c in range(seq.n) if table[last][c] == best]
    start = max(ls[last][c] for c in terminals)
    levels = [(start, sorted(c for c in terminals if ls[last][c] == start))]
    while start > 0:
        preds = set()
        for c in levels[-1][1]:
            preds.update(tight.switch_predecessors(start, c))
        if not preds:
            raise InvariantViolation(f"no optimal predecessor for phase starting at {start}")
        ends = ls[start - 1]
        start = max(ends[e] for e in preds)
        if start < 0:
            raise InvariantViolation("optimal predecessor unreachable")
        levels.append((start, sorted(e for e in preds if ends[e] == start)))
    levels.reverse()

    # Forward pass: smallest pivot id at each phase among compatible ones.
    bounds = [s for s, _ in levels] + [len(table)]
    traj: list[int] = []
    pivot = -1
    for k, (s, pivots) in enumerate(levels):
        if k == 0:
            pivot = pivots[0]
        else:
            pivot = min(c for c in pivots if tight.switch(s, pivot, c))
        traj.extend([pivot] * (bounds[k + 1] - s))
    return traj


def label_requests(seq: RequestSequence, trajectory: Sequence[int]) -> list[Label]:
    """Cheap iff the schedule pays exactly 1 for the request (no migration, endpoint central)."""
    labels = []
    prev = seq.initial_center
    for i, (c, (u, v)) in enumerate(zip(trajectory, seq.requests)):
        cost = (c != prev) + (1 if c == u or c == v else 2)
        if cost == 3:
            raise InvariantViolation(f"request {i}: migration followed by a cost-2 serve")
        labels.append(Label.CHEAP if cost == 1 else Label.EXPENSIVE)
        prev = c
    return labels


def opt_star(seq: RequestSequence) -> OptSolution:
    if not seq.requests:
        return OptSolution((), 0, (), ())
    table = prefix_table(seq)
    best = min(table[-1])
    traj = _canonical_trajectory(seq, table, best)
    return OptSolution(
        trajectory=tuple(traj),
        total_cost=int(best),
        phases=tuple(extract_phases(traj)),
        labels=tuple(label_requests(seq, traj)),
    )


def block_decompose(labels: Sequence[Label]) -> BlockDecomposition:
    """Split a label string as  cheap* (expensive+ cheap+)* expensive*."""
    n = len(labels)
    i = 0
    while i < n and labels[i] == Label.CHEAP:
        i += 1
    prefix = i
    blocks = []
    suffix = 0
    while i < n:
        start = i
        while i < n and labels[i] == Label.EXPENSIVE:
            i += 1
        eps = i - start
        if i == n:
            suffix = eps
            break
        mid = i
        while i < n and labels[i] == Label.CHEAP:
            i += 1
        blocks.append(Block(eps, i - mid, start))
    return BlockDecomposition(prefix, tuple(blocks), suffix)
