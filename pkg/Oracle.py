"""
Brute-force reference solvers and instance generators. Everything here
enumerates subsets directly with numpy and never touches the piecewise
linear or MILP code, so it can serve as ground truth for those solvers.
"""
import logging
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

import Config
from Covering import CoverInstance
from Elections import ApprovalElection, ApprovalVoter, OrdinalElection, RankedVoter

logger = logging.getLogger(__name__)

CHUNK = 1 << 14
HARD_KINDS = ("partition-wmm", "subsetsum-mmc")


class CapExceeded(ValueError):
    pass


@dataclass
class OracleBudget:
    """Refuse enumerations over more than max_items objects; optional wall-clock limit in seconds."""
    max_items: int = Config.ORACLE_SUBSET_CAP
    timeout: Optional[float] = None

    def check(self, n, what="items"):
        if n > self.max_items:
            raise CapExceeded(f"Invalid oracle input: {n} {what} exceed the cap of {self.max_items} (2^{n} subsets)")

    def deadline(self):
        return None if self.timeout is None else time.monotonic() + self.timeout


def _subsets(n, budget):
    """Yield (masks, bits) chunks over all 2^n subsets in ascending mask order."""
    deadline = budget.deadline()
    total = 1 << n
    shifts = np.arange(n, dtype=np.int64)
    for start in range(0, total, CHUNK):
        if deadline is not None and time.monotonic() > deadline:
            raise CapExceeded(f"Invalid oracle input: enumeration exceeded {budget.timeout} s")
        masks = np.arange(start, min(total, start + CHUNK), dtype=np.int64)
        bits = (masks[:, None] >> shifts) & 1
        yield masks, bits


def _cheapest(n, budget, cost_of, feasible_of, limit):
    """Least cost subset with feasible_of true and cost <= limit; ties to the smallest mask."""
    best = None
    for masks, bits in _subsets(n, budget):
        costs = cost_of(bits)
        ok = feasible_of(bits) & (costs <= limit)
        if not ok.any():
            continue
        candidates = np.flatnonzero(ok)
        k = candidates[np.argmin(costs[candidates])]
        if best is None or costs[k] < best[0]:
            best = (int(costs[k]), int(masks[k]))
    if best is None:
        return None
    cost, mask = best
    return cost, tuple(j for j in range(n) if mask >> j & 1)


def brute_cover(instance, budget=None):
    """Minimum weight (at most the instance budget) of a subfamily meeting every requirement, with its sets."""
    budget = budget or OracleBudget()
    budget.check(instance.n, "sets")
    matrix = np.zeros((instance.n, instance.universe_size), dtype=np.int64)
    for j, s in enumerate(instance.sets):
        for x, t in s.items():
            matrix[j, x] = t
    weights = np.array(instance.weights, dtype=np.int64)
    requirements = np.array(instance.requirements, dtype=np.int64)
    return _cheapest(instance.n, budget,
                     lambda bits: bits @ weights,
                     lambda bits: np.all(bits @ matrix >= requirements, axis=1),
                     instance.budget)


def _approval_matrix(election, voters):
    m = len(election.candidates)
    matrix = np.zeros((len(voters), m), dtype=np.int64)
    for k, v in enumerate(voters):
        for c in v.approves:
            matrix[k, c] = v.weight
    return matrix


def _wins(scores, unique_winner):
    if scores.shape[1] == 1:
        return np.ones(scores.shape[0], dtype=bool)
    rivals = scores[:, 1:].max(axis=1)
    return scores[:, 0] > rivals if unique_winner else scores[:, 0] >= rivals


def brute_manipulate(election, kind, unique_winner=Config.UNIQUE_WINNER, budget=None):
    """
    Cheapest action making p win for kind in ccdv, ccav, bribery: every
    subset of voters (or addable voters) is tried, bribed voters approve
    only p afterwards. Returns (cost, action) or None.
    """
    budget = budget or OracleBudget()
    base = np.array([sum(v.weight for v in election.voters if c in v.approves)
                     for c in range(len(election.candidates))], dtype=np.int64)
    pool = election.addable if kind == "ccav" else election.voters
    budget.check(len(pool), "voters")
    matrix = _approval_matrix(election, pool)
    prices = np.array([v.price for v in pool], dtype=np.int64)
    if kind == "ccdv":
        change = -matrix
    elif kind == "ccav":
        change = matrix
    elif kind == "bribery":
        change = -matrix
        change[:, 0] += np.array([v.weight for v in pool], dtype=np.int64)
    else:
        raise ValueError(f"Invalid oracle kind {kind!r}")
    found = _cheapest(len(pool), budget,
                      lambda bits: bits @ prices,
                      lambda bits: _wins(base + bits @ change, unique_winner),
                      election.budget)
    logger.debug(f"oracle {kind}: {found}")
    return found


def brute_scoring_ccdv(election, unique_winner=Config.UNIQUE_WINNER, budget=None):
    """Cheapest deletion of voters making p win under the election's scoring rule."""
    budget = budget or OracleBudget()
    budget.check(len(election.voters), "voters")
    m = len(election.candidates)
    points = np.zeros((len(election.voters), m), dtype=np.int64)
    for k, v in enumerate(election.voters):
        for position, c in enumerate(v.ranking):
            points[k, c] = election.scoring[position]
    base = points.sum(axis=0)
    prices = np.array([v.price for v in election.voters], dtype=np.int64)
    return _cheapest(len(election.voters), budget,
                     lambda bits: bits @ prices,
                     lambda bits: _wins(base - bits @ points, unique_winner),
                     election.budget)


def gen_hard_instances(kind, seed=None, size=4, numbers=None, target=None):
    """
    Instances of the two hardness constructions.

    partition-wmm: one element, a set of multiplicity and weight k_i per
    number, requirement ceil(sum/2) and budget floor(sum/2); a yes-instance
    exactly when the numbers split into two halves of equal sum.

    subsetsum-mmc: 2n numbers k_i and a target T, sets (k_i, nKT - k_i)
    with K = max k_i, requirements (T, n^2 K T - T) and budget n; coverable
    exactly when n of the numbers sum to T.
    """
    rng = np.random.default_rng(seed)
    if kind == "partition-wmm":
        if numbers is None:
            numbers = rng.integers(1, 10, size=size).tolist()
        numbers = [int(k) for k in numbers]
        total = sum(numbers)
        return CoverInstance(1, [{0: k} for k in numbers], [(total + 1) // 2], total // 2, list(numbers))
    if kind == "subsetsum-mmc":
        if numbers is None:
            numbers = rng.integers(1, 10, size=2 * size).tolist()
        numbers = [int(k) for k in numbers]
        if len(numbers) % 2 or not numbers:
            raise ValueError(f"Invalid subset-sum numbers: need a positive even count, got {len(numbers)}")
        n = len(numbers) // 2
        if target is None:
            target = int(sum(rng.permutation(numbers)[:n]))
        big = max(numbers)
        sets = [{0: k, 1: n * big * target - k} for k in numbers]
        return CoverInstance(2, sets, [target, n * n * big * target - target], n)
    raise ValueError(f"Invalid hard instance kind {kind!r}: expected one of {', '.join(HARD_KINDS)}")


def random_cover_instance(rng, n, m, max_multiplicity=1, max_weight=1, uniform=False, max_requirement=None,
                          budget=None):
    """Random instance: set-variant when max_multiplicity is 1, one multiplicity per set when uniform."""
    sets = []
    for _ in range(n):
        support = [x for x in range(m) if rng.random() < 0.5]
        if uniform:
            t = int(rng.integers(1, max_multiplicity + 1))
            sets.append({x: t for x in support})
        else:
            sets.append({x: int(rng.integers(1, max_multiplicity + 1)) for x in support})
    weights = [int(w) for w in rng.integers(1, max_weight + 1, size=n)]
    if max_requirement is None:
        max_requirement = max(1, n * max_multiplicity // 3)
    requirements = [int(r) for r in rng.integers(0, max_requirement + 1, size=m)]
    if budget is None:
        budget = int(rng.integers(0, sum(weights) + 1)) if n else 0
    return CoverInstance(m, sets, requirements, budget, weights)


def random_approval_election(rng, n, m, max_weight=1, max_price=1, addable=0, budget=None):
    candidates = [f"c{k}" for k in range(m)]

    def voter():
        approves = frozenset(c for c in range(m) if rng.random() < 0.4)
        return ApprovalVoter(approves, int(rng.integers(1, max_weight + 1)), int(rng.integers(1, max_price + 1)))

    voters = [voter() for _ in range(n)]
    extra = [voter() for _ in range(addable)]
    if budget is None:
        budget = int(rng.integers(0, max(1, (n + addable) * max_price // 2) + 1))
    return ApprovalElection(candidates, voters, budget, extra)


def random_ordinal_election(rng, n, m, scoring, max_price=1, budget=None):
    candidates = [f"c{k}" for k in range(m)]
    voters = [RankedVoter(tuple(int(c) for c in rng.permutation(m)), int(rng.integers(1, max_price + 1)))
              for _ in range(n)]
    if budget is None:
        budget = int(rng.integers(0, max(1, n * max_price // 2) + 1))
    return OrdinalElection(candidates, voters, tuple(scoring), budget)
