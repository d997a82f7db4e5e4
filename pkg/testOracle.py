import numpy as np
import pytest

from Covering import CoverInstance
from Elections import ApprovalElection, ApprovalVoter
from Oracle import (CapExceeded, OracleBudget, brute_cover, brute_manipulate, gen_hard_instances,
                    random_approval_election, random_cover_instance, random_ordinal_election)


def test_cover_example():
    instance = CoverInstance(2, [{0: 1}, {0: 1, 1: 1}, {1: 1}], [1, 1], 3, [1, 3, 2])
    assert brute_cover(instance) == (3, (1,))
    instance.budget = 2
    assert brute_cover(instance) is None


def test_cover_trivial_cases():
    assert brute_cover(CoverInstance(2, [{0: 1}], [0, 0], 0)) == (0, ())
    assert brute_cover(CoverInstance(1, [{0: 2}], [3], 5)) is None
    assert brute_cover(CoverInstance(1, [], [0], 0)) == (0, ())


def test_cap():
    instance = CoverInstance(1, [{0: 1}] * 21, [1], 1)
    with pytest.raises(CapExceeded, match="21 sets"):
        brute_cover(instance)
    small = CoverInstance(1, [{0: 1}] * 6, [2], 6)
    with pytest.raises(CapExceeded):
        brute_cover(small, OracleBudget(max_items=5))
    assert brute_cover(small, OracleBudget(max_items=6, timeout=60)) == (2, (0, 1))


def test_manipulation_examples():
    election = ApprovalElection(["p", "c1"], [ApprovalVoter(frozenset({0})), ApprovalVoter(frozenset({1}), 1, 1),
                                              ApprovalVoter(frozenset({1}), 1, 2), ApprovalVoter(frozenset({1}), 1, 5)], 3)
    assert brute_manipulate(election, "ccdv") == (3, (1, 2))
    assert brute_manipulate(election, "bribery") == (1, (1,))
    with pytest.raises(ValueError):
        brute_manipulate(election, "swap")


def test_partition_instances():
    yes = gen_hard_instances("partition-wmm", numbers=[1, 1, 2])
    assert (yes.requirements, yes.budget, yes.weights) == ([2], 2, [1, 1, 2])
    assert brute_cover(yes) is not None
    no = gen_hard_instances("partition-wmm", numbers=[1, 1, 1])
    assert brute_cover(no) is None


def test_subsetsum_instances():
    instance = gen_hard_instances("subsetsum-mmc", numbers=[1, 2, 3, 4], target=5)
    assert instance.sets == [{0: k, 1: 2 * 4 * 5 - k} for k in (1, 2, 3, 4)]
    assert instance.requirements == [5, 4 * 4 * 5 - 5]
    assert instance.budget == 2
    assert brute_cover(instance) is not None
    assert brute_cover(gen_hard_instances("subsetsum-mmc", numbers=[1, 2, 3, 4], target=8)) is None


def test_generated_subsetsum_is_coverable():
    for seed in range(5):
        instance = gen_hard_instances("subsetsum-mmc", seed=seed, size=3)
        assert instance.n == 6
        assert brute_cover(instance) is not None


def test_hard_instance_errors():
    with pytest.raises(ValueError, match="even count"):
        gen_hard_instances("subsetsum-mmc", numbers=[1, 2, 3])
    with pytest.raises(ValueError, match="hard instance kind"):
        gen_hard_instances("knapsack")


def test_generators_are_seeded():
    first = random_cover_instance(np.random.default_rng(1), 6, 3, max_multiplicity=3, max_weight=4)
    second = random_cover_instance(np.random.default_rng(1), 6, 3, max_multiplicity=3, max_weight=4)
    assert first == second
    assert all(1 <= w <= 4 for w in first.weights)

    uniform = random_cover_instance(np.random.default_rng(2), 8, 3, max_multiplicity=4, uniform=True)
    assert uniform.is_uniform_variant()

    election = random_approval_election(np.random.default_rng(3), 5, 3, max_weight=2, addable=2)
    assert len(election.voters) == 5 and len(election.addable) == 2
    ranked = random_ordinal_election(np.random.default_rng(4), 4, 3, (2, 1, 0))
    assert all(sorted(v.ranking) == [0, 1, 2] for v in ranked.voters)
