"""Request sources: the adaptive three-node adversary, the two-pattern
random distribution used for the randomized lower bound, and plain
stochastic workloads.

Generated requests always list the smaller node id first, so an endpoint's
position never tells a policy which role it plays in a pattern.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import CostLedger, Request, RequestSequence, replay
from .errors import InputError
from .policies import Policy
from .rng import make_rng, uniform_index

PATTERN_1 = "P1"
PATTERN_2 = "P2"


def _pair(a: int, b: int) -> Request:
    return Request(a, b) if a < b else Request(b, a)


def det_adversary_run(
    policy: Policy, length: int, nodes: Sequence[int] = (0, 1, 2)
) -> tuple[RequestSequence, CostLedger]:
    """Drive ``policy`` with requests that always avoid its current center.

    The adversary looks at the policy's center before each request and asks
    for the two of ``nodes`` that are not there.
    """
    if len(set(nodes)) != 3:
        raise InputError("the adversary needs exactly three distinct nodes")
    if length < 0:
        raise InputError("length must be non-negative")
    x = sorted(nodes)
    reqs: list[Request] = []
    decisions: list[Optional[int]] = []
    for i in range(length):
        rest = [v for v in x if v != policy.center][:2]
        req = Request(rest[0], rest[1])
        reqs.append(req)
        decisions.append(policy.on_request(req, i))
    seq = RequestSequence(policy.n, policy.initial_center, tuple(reqs))
    return seq, replay(seq, decisions)


def static_best_off(seq: RequestSequence) -> int:
    """Cost of centering the most requested node up front and never moving again."""
    if not seq.requests:
        return 0
    counts: Counter[int] = Counter()
    for u, v in seq.requests:
        counts[u] += 1
        counts[v] += 1
    top = max(counts.values())
    hub = min(c for c, k in counts.items() if k == top)
    migration = 0 if hub == seq.initial_center else 1
    return migration + sum(1 if hub in r else 2 for r in seq.requests)


@dataclass(frozen=True)
class RandLbParams:
    n: int = 10
    p: float | Fraction = Fraction(2, 3)
    pairs: int = 300
    seed: int = 0
    initial_center: int = 0
    # keep the initial center out of the first pair so OFF pays 3 there too
    exclude_initial_center: bool = True

    def __post_init__(self) -> None:
        if self.n < 7:
            raise InputError(f"the two-pattern distribution needs n >= 7, got {self.n}")
        if not 0 <= self.p <= 1:
            raise InputError(f"p must lie in [0, 1], got {self.p}")
        if self.pairs < 0:
            raise InputError("pairs must be non-negative")
        if not 0 <= self.initial_center < self.n:
            raise InputError("initial_center out of range")


@dataclass(frozen=True)
class GeneratedSequence:
    seq: RequestSequence
    pivots: tuple[int, ...]
    patterns: tuple[str, ...]
    off_cost: int
    off_decisions: tuple[Optional[int], ...] = field(default=(), repr=False)


def rand_lb_generate(params: RandLbParams) -> GeneratedSequence:
    """Sample a sequence of request pairs from the two-pattern distribution.

    Pattern 1 is ``{a, x1}, {a, x2}`` with pivot ``a``.  Pattern 2 is
    ``{x1, x2}, {a, x3}`` where ``a`` is the previous pair's pivot.  Fresh
    nodes are distinct and avoid every node of the previous pair.  The first
    pair is always pattern 1.
    """
    rng = make_rng(params.seed)
    n = params.n
    reqs: list[Request] = []
    pivots: list[int] = []
    patterns: list[str] = []
    previous: set[int] = set()
    if params.exclude_initial_center:
        previous = {params.initial_center}
    pivot = -1
    for k in range(params.pairs):
        pool = [v for v in range(n) if v not in previous]
        first = k == 0 or rng.random() < params.p
        picked = [int(v) for v in rng.choice(pool, size=3, replace=False)]
        if first:
            pivot, x1, x2 = picked
            pair = (_pair(pivot, x1), _pair(pivot, x2))
            patterns.append(PATTERN_1)
        else:
            x1, x2, x3 = picked
            pair = (_pair(x1, x2), _pair(pivot, x3))
            patterns.append(PATTERN_2)
        reqs.extend(pair)
        pivots.append(pivot)
        previous = set(pair[0]) | set(pair[1])

    seq = RequestSequence(n, params.initial_center, tuple(reqs))
    decisions: list[Optional[int]] = []
    for pv in pivots:
        decisions.extend((pv, None))
    off = replay(seq, decisions).total
    return GeneratedSequence(seq, tuple(pivots), tuple(patterns), off, tuple(decisions))


def uniform_generate(n: int, length: int, seed: int, initial_center: int = 0) -> RequestSequence:
    """Each request is an independent, uniformly random pair of distinct nodes."""
    if n < 2 or length < 0:
        raise InputError("uniform workload needs n >= 2 and length >= 0")
    rng = make_rng(seed)
    reqs = []
    for _ in range(length):
        a = uniform_index(rng, n)
        b = uniform_index(rng, n - 1)
        if b >= a:
            b += 1
        reqs.append(_pair(a, b))
    return RequestSequence(n, initial_center, tuple(reqs))


def hotspot_generate(
    n: int,
    length: int,
    hot_fraction: float,
    seed: int,
    hot_node: int = 0,
    initial_center: int = 0,
) -> RequestSequence:
    """Each request contains ``hot_node`` with probability ``hot_fraction``.

    Hot requests pair it with a uniform partner; the others are uniform
    pairs over the remaining nodes.
    """
    if n < 2 or length < 0 or not 0 <= hot_fraction <= 1:
        raise InputError("hotspot workload needs n >= 2, length >= 0, hot_fraction in [0, 1]")
    if not 0 <= hot_node < n:
        raise InputError("hot_node out of range")
    if hot_fraction < 1 and n < 3:
        raise InputError("cold requests need at least two nodes besides the hot one")
    rng = make_rng(seed)
    others = np.array([v for v in range(n) if v != hot_node])
    reqs = []
    for _ in range(length):
        if rng.random() < hot_fraction:
            partner = int(others[uniform_index(rng, n - 1)])
            reqs.append(_pair(hot_node, partner))
        else:
            i = uniform_index(rng, n - 1)
            j = uniform_index(rng, n - 2)
            if j >= i:
                j += 1
            reqs.append(_pair(int(others[i]), int(others[j])))
    return RequestSequence(n, initial_center, tuple(reqs))
