"""Independent reference implementations used only by the tests.

None of these import package internals beyond plain data types, so a bug in
the package cannot silently agree with them.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np

# small named-node instance used across the tests
A, B, C, W, X, Y, Z = range(7)
SAMPLE_N = 7
SAMPLE_CENTER = W
SAMPLE_PAIRS = [(A, Z), (B, W), (C, B), (C, X)]


def all_pairs(n):
    return [(a, b) for a in range(n) for b in range(a + 1, n)]


def dp_cost_by_enumeration(n, c0, pairs):
    """Minimum over every center trajectory; exponential, tiny inputs only."""
    best = None
    for traj in itertools.product(range(n), repeat=len(pairs)):
        prev, cost = c0, 0
        for c, (u, v) in zip(traj, pairs):
            cost += (c != prev) + (1 if c in (u, v) else 2)
            prev = c
        best = cost if best is None else min(best, cost)
    return 0 if best is None else best


def det_pt_reference(n, c0, pairs):
    """Straight transcription of the deterministic candidate-tracking rules.

    Returns (total cost, candidate sets after each request, 'I'/'U' string).
    """
    cand = {c0}
    center = c0
    total = 0
    history, behaviours = [], []
    for u, v in pairs:
        r = {u, v}
        if cand & r:
            cand = cand & r
            behaviours.append("I")
            if center not in cand:
                center = min(cand)
                total += 1
        else:
            cand = cand | r
            behaviours.append("U")
        total += 1 if center in r else 2
        history.append(frozenset(cand))
    return total, history, "".join(behaviours)


def rand_pt_exact_expectation(n, c0, pairs):
    """Exact expected cost of the randomized policy by walking its branch tree."""

    def walk(i, center, cand):
        if i == len(pairs):
            return Fraction(0)
        u, v = pairs[i]
        r = frozenset((u, v))
        common = cand & r
        branches = []
        if common:
            if center in common:
                branches.append((Fraction(1), center, common))
            else:
                for c in sorted(common):
                    branches.append((Fraction(1, len(common)), c, common))
        else:
            union = cand | r
            for c in (center, u, v):
                branches.append((Fraction(1, 3), c, union))
        out = Fraction(0)
        for prob, c, nxt in branches:
            step = (c != center) + (1 if c in r else 2)
            out += prob * (step + walk(i + 1, c, nxt))
        return out

    return walk(0, c0, frozenset((c0,)))


def static_rand_lb_stationary(n, p):
    """Long-run cost per pair of a never-moving center under the two-pattern source.

    Markov chain on (pattern of the last pair, role of the static center in
    it): role 0 = absent, 1 = pivot, 2 = other endpoint.  Fresh nodes avoid the
    last pair, which holds 3 nodes after pattern 1 and 4 after pattern 2.
    """
    p = float(p)
    states = [(pat, role) for pat in (1, 2) for role in (0, 1, 2)]
    index = {s: k for k, s in enumerate(states)}
    P = np.zeros((6, 6))
    cost = np.zeros(6)
    for (pat, role), k in index.items():
        m = n - 3 if pat == 1 else n - 4
        in_pool = role == 0
        outcomes = []  # (prob, next state, pair cost)
        # pattern 1: pivot, x1, x2 fresh
        if in_pool:
            outcomes += [
                (p / m, (1, 1), 2),
                (p * 2 / m, (1, 2), 3),
                (p * (m - 3) / m, (1, 0), 4),
            ]
        else:
            outcomes.append((p, (1, 0), 4))
        # pattern 2: x1, x2, x3 fresh, pivot carried over
        q = 1 - p
        if role == 1:
            outcomes.append((q, (2, 1), 3))
        elif in_pool:
            outcomes += [(q * 3 / m, (2, 2), 3), (q * (m - 3) / m, (2, 0), 4)]
        else:
            outcomes.append((q, (2, 0), 4))
        for prob, nxt, c in outcomes:
            P[k, index[nxt]] += prob
            cost[k] += prob * c
    # stationary distribution: pi P = pi, sum pi = 1
    M = np.vstack([P.T - np.eye(6), np.ones(6)])
    rhs = np.zeros(7)
    rhs[-1] = 1
    pi = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return float(pi @ cost)
