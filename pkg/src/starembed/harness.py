"""Drive policies over sequences and compare them with the offline optimum.

Costs are attributed per request: a migration decided before request ``i``
is charged to request ``i``.  The cheap/expensive labelling of OPT* uses the
same convention, so per-block comparisons line up.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence

from .adversary import RandLbParams, rand_lb_generate
from .core import CostLedger, RequestSequence
from .errors import InvariantViolation, UsageError
from .offline import Block, BlockDecomposition, Label, OptSolution, block_decompose, opt_cost, opt_star
from .policies import DETERMINISTIC, POLICIES, Behavior, Policy, PolicyTrace
from .rng import derive_seed, derive_seeds

PolicyFactory = Callable[[int, int, int], Policy]

# z used for one-sided Monte Carlo gates
GATE_Z = 3.0
DET_RATIO = Fraction(3, 2)
RAND_RATIO = Fraction(11, 9)


def simulate(policy: Policy, seq: RequestSequence) -> PolicyTrace:
    if policy.n != seq.n or policy.center != seq.initial_center:
        raise UsageError(
            f"policy built for n={policy.n}, center={policy.center}; "
            f"sequence has n={seq.n}, initial_center={seq.initial_center}"
        )
    if policy.served:
        raise UsageError("simulate needs a fresh policy instance")
    track = policy.tracks_candidates
    center = seq.initial_center
    decisions: list[Optional[int]] = []
    centers: list[int] = []
    serve: list[int] = []
    moves: list[tuple[int, int]] = []
    candidates: list[frozenset[int]] = []
    behaviors: list[Behavior] = []
    for i, req in enumerate(seq.requests):
        target = policy.on_request(req, i)
        if target is not None:
            if not 0 <= target < seq.n:
                raise UsageError(f"policy migrated unknown node {target}")
            moves.append((i, target))
            center = target
        decisions.append(target)
        centers.append(center)
        serve.append(1 if center == req.u or center == req.v else 2)
        if track:
            candidates.append(policy.candidates)  # type: ignore[attr-defined]
            behaviors.append(policy.last_behavior)  # type: ignore[attr-defined]
    return PolicyTrace(decisions, CostLedger(tuple(serve), tuple(moves)), centers, candidates, behaviors)


def run_total(policy: Policy, seq: RequestSequence) -> int:
    """Total cost only; same arithmetic as :func:`simulate` without the bookkeeping."""
    center = seq.initial_center
    total = 0
    for i, req in enumerate(seq.requests):
        target = policy.on_request(req, i)
        if target is not None:
            total += 1
            center = target
        total += 1 if center == req.u or center == req.v else 2
    return total


@dataclass(frozen=True)
class BlockCheck:
    expensive: int
    cheap: int
    start: int
    alg_cost: int
    bound: int

    @property
    def ok(self) -> bool:
        return self.alg_cost <= self.bound


class BlockKind(str, enum.Enum):
    SIMPLE = "simple"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class RatioReport:
    alg_cost: float
    opt_cost: int
    alg_stderr: Optional[float] = None
    off_cost: Optional[int] = None
    per_block: tuple[BlockCheck, ...] = ()
    tracking_mismatches: Optional[int] = None

    @property
    def ratio_vs_opt(self) -> Optional[float]:
        return None if self.opt_cost == 0 else self.alg_cost / self.opt_cost

    @property
    def ratio_vs_off(self) -> Optional[float]:
        if self.off_cost is None or self.off_cost == 0:
            return None
        return self.alg_cost / self.off_cost

    @property
    def block_violations(self) -> int:
        return sum(not b.ok for b in self.per_block)


def det_block_bound(block: Block) -> int:
    return 2 * block.expensive + block.cheap + min(2, block.cheap)


def block_costs(ledger: CostLedger, decomposition: BlockDecomposition) -> list[int]:
    per_request = ledger.per_request_costs()
    return [sum(per_request[b.start : b.end]) for b in decomposition.blocks]


def tracking_mismatches(trace: PolicyTrace, labels: Sequence[Label]) -> int:
    """Positions where intersection/union disagrees with cheap/expensive."""
    if len(trace.behavior_history) != len(labels):
        raise UsageError("trace has no behaviour history for this sequence")
    return sum(
        (b is Behavior.INTERSECTION) != (lab is Label.CHEAP)
        for b, lab in zip(trace.behavior_history, labels)
    )


def ratio_report(
    trace: PolicyTrace,
    seq: RequestSequence,
    off_cost: Optional[int] = None,
    solution: Optional[OptSolution] = None,
) -> RatioReport:
    sol = solution if solution is not None else opt_star(seq)
    decomposition = block_decompose(sol.labels)
    costs = block_costs(trace.ledger, decomposition)
    checks = tuple(
        BlockCheck(b.expensive, b.cheap, b.start, c, det_block_bound(b))
        for b, c in zip(decomposition.blocks, costs)
    )
    tracked = len(trace.behavior_history) == len(seq.requests)
    mismatches = tracking_mismatches(trace, sol.labels) if tracked else None
    return RatioReport(
        alg_cost=float(trace.total),
        opt_cost=sol.total_cost,
        off_cost=off_cost,
        per_block=checks,
        tracking_mismatches=mismatches,
    )


def classify_blocks(trace: PolicyTrace, decomposition: BlockDecomposition | Sequence[Label]) -> list[BlockKind]:
    """Simple if one candidate remains after the block's last request, ambiguous if two."""
    if not isinstance(decomposition, BlockDecomposition):
        decomposition = block_decompose(decomposition)
    kinds = []
    for b in decomposition.blocks:
        size = len(trace.candidate_history[b.end - 1])
        if size == 1:
            kinds.append(BlockKind.SIMPLE)
        elif size == 2:
            kinds.append(BlockKind.AMBIGUOUS)
        else:
            raise InvariantViolation(f"{size} candidates at the end of the block starting at {b.start}")
    return kinds


def _mean_stderr(totals: Iterable[int]) -> tuple[float, float]:
    # exact integer sums keep the result independent of run order
    values = list(totals)
    k = len(values)
    s1 = sum(values)
    mean = Fraction(s1, k)
    if k < 2:
        return float(mean), 0.0
    s2 = sum(v * v for v in values)
    var = (Fraction(s2) - Fraction(s1 * s1, k)) / (k - 1)
    return float(mean), math.sqrt(var / k)


def _run_chunk(args: tuple[PolicyFactory, RequestSequence, int, Sequence[int]]) -> list[int]:
    factory, seq, master_seed, indices = args
    seeds = derive_seeds(master_seed, max(indices, default=-1) + 1)
    return [run_total(factory(seq.n, seq.initial_center, seeds[r]), seq) for r in indices]


def run_totals(
    policy_factory: PolicyFactory,
    seq: RequestSequence,
    runs: int,
    master_seed: int,
    workers: int = 1,
) -> list[int]:
    """Per-run totals, indexed by run; run ``r`` is seeded from ``(master_seed, r)``."""
    if runs < 1:
        raise UsageError("runs must be >= 1")
    if workers <= 1 or runs < 2:
        return _run_chunk((policy_factory, seq, master_seed, range(runs)))
    chunks = [range(w, runs, workers) for w in range(workers)]
    totals = [0] * runs
    jobs = [(policy_factory, seq, master_seed, c) for c in chunks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for chunk, result in zip(chunks, pool.map(_run_chunk, jobs)):
            for r, t in zip(chunk, result):
                totals[r] = t
    return totals


def expected_cost(
    policy_factory: PolicyFactory,
    seq: RequestSequence,
    runs: int,
    master_seed: int,
    workers: int = 1,
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of the policy's total cost on ``seq``."""
    return _mean_stderr(run_totals(policy_factory, seq, runs, master_seed, workers))


@dataclass
class MonteCarloReport:
    policy: str
    trials: int
    seeds: list[int]
    costs: list[float]  # per-sequence cost (mean over runs for randomized policies)
    stderrs: list[float]
    opt_costs: list[int]
    off_costs: list[int]

    @property
    def mean_cost(self) -> float:
        return math.fsum(self.costs) / len(self.costs)

    @property
    def stderr(self) -> float:
        """Standard error of :attr:`mean_cost` across the sampled sequences."""
        k = len(self.costs)
        if k < 2:
            return math.sqrt(math.fsum(s * s for s in self.stderrs))
        mean = self.mean_cost
        var = math.fsum((c - mean) ** 2 for c in self.costs) / (k - 1)
        return math.sqrt(var / k)

    @property
    def ratio_vs_off(self) -> float:
        return math.fsum(self.costs) / sum(self.off_costs)

    @property
    def ratio_vs_off_stderr(self) -> float:
        return self.stderr * len(self.costs) / sum(self.off_costs)

    @property
    def ratio_vs_opt(self) -> float:
        return math.fsum(self.costs) / sum(self.opt_costs)


@dataclass
class YaoRow:
    seq_id: int
    policy: str
    seed: int
    cost_mean: float
    cost_stderr: float
    opt_cost: int
    off_cost: int


@dataclass
class YaoReport:
    params: RandLbParams
    reports: dict[str, MonteCarloReport]
    rows: list[YaoRow]
    sweep: list[dict[str, float]] = field(default_factory=list)

    def _best_deterministic(self) -> MonteCarloReport:
        det = [r for k, r in self.reports.items() if k in DETERMINISTIC]
        return min(det, key=lambda r: r.ratio_vs_off)

    @property
    def lower_bound_ratio(self) -> float:
        """Best aggregate ratio vs OFF among the deterministic policies evaluated."""
        return self._best_deterministic().ratio_vs_off

    @property
    def lower_bound_stderr(self) -> float:
        return self._best_deterministic().ratio_vs_off_stderr


def yao_experiment(
    params: RandLbParams,
    sequences: int,
    runs: int,
    policies: Sequence[str] = DETERMINISTIC,
    randomized: Sequence[str] = ("rand-pt",),
    p_values: Sequence[float | Fraction] = (),
    workers: int = 1,
) -> YaoReport:
    """Evaluate policies on sequences drawn from the two-pattern distribution.

    Sequence ``s`` is generated with seed ``derive_seed(params.seed, s)``;
    randomized policies are averaged over ``runs`` runs seeded from the same
    value.  Costs are compared against OFF (the pivot-following schedule) and
    against the exact optimum of each sequence.
    """
    report = _yao_once(params, sequences, runs, policies, randomized, workers)
    for p in p_values:
        swept = _yao_once(replace(params, p=p), sequences, runs, policies, randomized, workers)
        entry = {
            "p": float(p),
            "lower_bound_ratio": swept.lower_bound_ratio,
            "lower_bound_stderr": swept.lower_bound_stderr,
        }
        entry.update({name: r.ratio_vs_off for name, r in swept.reports.items()})
        report.sweep.append(entry)
    return report


def _yao_once(params, sequences, runs, policies, randomized, workers) -> YaoReport:
    names = list(policies) + list(randomized)
    reports = {k: MonteCarloReport(k, 0, [], [], [], [], []) for k in names}
    rows: list[YaoRow] = []
    for s, seed in enumerate(derive_seeds(params.seed, sequences)):
        gen = rand_lb_generate(replace(params, seed=seed))
        opt, _ = opt_cost(gen.seq)
        for name in names:
            factory = POLICIES[name]
            if name in randomized:
                mean, err = expected_cost(factory, gen.seq, runs, seed, workers)
                trials = runs
            else:
                mean, err = float(run_total(factory(params.n, params.initial_center, 0), gen.seq)), 0.0
                trials = 1
            rep = reports[name]
            rep.trials += trials
            rep.seeds.append(seed)
            rep.costs.append(mean)
            rep.stderrs.append(err)
            rep.opt_costs.append(opt)
            rep.off_costs.append(gen.off_cost)
            rows.append(YaoRow(s, name, seed, mean, err, opt, gen.off_cost))
    return YaoReport(params, reports, rows)
