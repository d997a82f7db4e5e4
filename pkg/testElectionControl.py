from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from Covering import VariantError
from ElectionControl import (preference_orders, solve_bribery_priced, solve_ccav_priced, solve_ccav_weighted,
                             solve_ccdv_priced, solve_ccdv_weighted, solve_control, solve_scoring_ccdv)
from Elections import (SCHEMA, ApprovalElection, ApprovalVoter, InvalidElection, OrdinalElection, RankedVoter, borda,
                       election_from_json, plurality, replay, is_winner)
from Oracle import (brute_manipulate, brute_scoring_ccdv, random_approval_election, random_ordinal_election)
from RationalIO import load_document

FIXTURES = Path(__file__).parent / "fixtures"


def voter(*approves, weight=1, price=1):
    return ApprovalVoter(frozenset(approves), weight, price)


def ccdv_example(budget):
    return ApprovalElection(["p", "c1"], [voter(0), voter(1, price=1), voter(1, price=2), voter(1, price=5)], budget)


def test_ccdv_priced_example():
    result = solve_ccdv_priced(ccdv_example(3))
    assert result.feasible
    assert result.action == (1, 2)
    assert result.cost == 3
    assert not solve_ccdv_priced(ccdv_example(2)).feasible


def test_ccdv_already_winning():
    election = ApprovalElection(["p", "c1"], [voter(0), voter(0), voter(1)], 0)
    result = solve_ccdv_priced(election)
    assert result.feasible and result.action == () and result.cost == 0


def test_ccdv_unique_winner_needs_one_more():
    election = ApprovalElection(["p", "c1"], [voter(0), voter(1), voter(1)], 1)
    assert solve_ccdv_priced(election).feasible
    assert not solve_ccdv_priced(election, unique_winner=True).feasible
    election.budget = 2
    assert solve_ccdv_priced(election, unique_winner=True).action == (1, 2)


def test_ccav_priced_examples():
    election = ApprovalElection(["p", "c1"], [voter(1)], 1, [voter(0)])
    assert solve_ccav_priced(election).action == (0,)

    assert not solve_ccav_priced(ApprovalElection(["p", "c1"], [voter(1)], 1)).feasible

    useless = ApprovalElection(["p", "c1"], [voter(1)], 1, [voter(0, 1)])
    assert not solve_ccav_priced(useless).feasible
    assert brute_manipulate(useless, "ccav") is None


def test_weighted_examples():
    election = ApprovalElection(["p", "c1"], [voter(0, weight=2), voter(1, weight=3), voter(1, weight=1)], 1)
    assert solve_ccdv_weighted(election).action == (1,)

    adding = ApprovalElection(["p", "c1"], [voter(1, weight=4)], 1, [voter(0, weight=5)])
    assert solve_ccav_weighted(adding).action == (0,)

    winning = ApprovalElection(["p", "c1"], [voter(0, weight=3), voter(1, weight=2)], 0)
    assert solve_ccdv_weighted(winning).action == ()


def test_variant_checks():
    with pytest.raises(VariantError, match="weights"):
        solve_ccdv_priced(ApprovalElection(["p", "c1"], [voter(1, weight=2)], 1))
    with pytest.raises(VariantError, match="prices"):
        solve_ccav_weighted(ApprovalElection(["p", "c1"], [voter(1, price=2)], 1))


def test_bribery_examples():
    two = ApprovalElection(["p", "c1"], [voter(1), voter(1)], 2)
    result = solve_bribery_priced(two)
    assert result.feasible
    assert is_winner(replay(two, result))

    cheapest = solve_bribery_priced(two, minimize_cost=True)
    assert cheapest.cost == 1
    assert cheapest.extra_approvals == 1

    tied = ApprovalElection(["p", "c1"], [voter(0), voter(1)], 0)
    result = solve_bribery_priced(tied)
    assert result.feasible and result.action == () and result.extra_approvals == 0

    expensive = ApprovalElection(["p", "c1"], [voter(1, price=4)] * 3, 4)
    assert not solve_bribery_priced(expensive).feasible
    assert brute_manipulate(expensive, "bribery") is None


def test_bribery_of_p_approver():
    # bribing the voter approving both drops c1 without raising p
    election = ApprovalElection(["p", "c1", "c2"], [voter(0, 1), voter(1, price=3), voter(2)], 1)
    result = solve_bribery_priced(election, minimize_cost=True)
    assert result.cost == 1
    assert result.action == (0,)


def test_scoring_ccdv_fixture():
    election = election_from_json(load_document(FIXTURES / "borda3.json", SCHEMA))
    result = solve_scoring_ccdv(election)
    assert result.feasible
    assert result.cost == 1
    assert result.action in ((0,), (1,))
    assert brute_scoring_ccdv(election) == (1, (0,))


def test_scoring_ccdv_large_budget():
    election = OrdinalElection(["p", "c1", "c2"], [RankedVoter((1, 2, 0)), RankedVoter((2, 1, 0))], borda(3), 2)
    assert solve_scoring_ccdv(election).feasible


def test_scoring_ccdv_candidate_cap():
    election = OrdinalElection([f"c{k}" for k in range(6)], [RankedVoter(tuple(range(6)))], borda(6), 0)
    with pytest.raises(InvalidElection, match="cap"):
        solve_scoring_ccdv(election)
    assert solve_scoring_ccdv(election, candidate_cap=6).feasible


def test_preference_orders():
    election = OrdinalElection(["p", "c1"], [RankedVoter((1, 0), 3), RankedVoter((0, 1)), RankedVoter((1, 0), 1)],
                               plurality(2))
    assert preference_orders(election) == {(1, 0): [2, 0], (0, 1): [1]}


def test_solve_control_dispatch():
    ranked = OrdinalElection(["p", "c1"], [RankedVoter((1, 0))], plurality(2), 1)
    assert solve_control(ranked, "ccdv").kind == "scoring-ccdv"
    with pytest.raises(VariantError):
        solve_control(ranked, "ccav")
    with pytest.raises(VariantError):
        solve_control(ccdv_example(3), "scoring-ccdv")
    mixed = ApprovalElection(["p", "c1"], [voter(1, weight=2, price=2)], 1)
    with pytest.raises(VariantError, match="unit weights or unit prices"):
        solve_control(mixed, "ccdv")
    with pytest.raises(ValueError):
        solve_control(ccdv_example(3), "swap")
    assert solve_control(ccdv_example(3), "ccdv").action == (1, 2)


def oracle_suite(kind, instances, seed, **generator):
    rng = np.random.default_rng(seed)
    for _ in range(instances):
        n = int(rng.integers(1, 7))
        m = int(rng.integers(2, 4))
        election = random_approval_election(rng, n, m, **generator)
        unique_winner = bool(rng.integers(0, 2))
        found = brute_manipulate(election, kind, unique_winner)
        result = solve_control(election, kind, minimize_cost=True, unique_winner=unique_winner)
        assert result.feasible == (found is not None)
        if found is not None:
            assert result.cost == found[0]


@pytest.mark.parametrize("kind,seed,generator", [
    ("ccdv", 1, {"max_price": 4}),
    ("ccav", 2, {"max_price": 4, "addable": 4}),
    ("bribery", 3, {"max_price": 4}),
    ("ccdv", 4, {"max_weight": 3}),
    ("ccav", 5, {"max_weight": 3, "addable": 4}),
])
def test_control_agrees_with_oracle(kind, seed, generator):
    oracle_suite(kind, 40, seed, **generator)


def test_scoring_ccdv_agrees_with_oracle():
    rng = np.random.default_rng(23)
    for _ in range(40):
        election = random_ordinal_election(rng, int(rng.integers(1, 7)), 3, borda(3), max_price=3)
        found = brute_scoring_ccdv(election)
        result = solve_scoring_ccdv(election, minimize_cost=True)
        assert result.feasible == (found is not None)
        if found is not None:
            assert result.cost == found[0]


def test_plurality_matches_approval_deletion():
    rng = np.random.default_rng(29)
    for _ in range(30):
        ranked = random_ordinal_election(rng, int(rng.integers(1, 7)), 3, plurality(3), max_price=3)
        approval = ApprovalElection(ranked.candidates, [voter(v.ranking[0], price=v.price) for v in ranked.voters],
                                    ranked.budget)
        by_rankings = solve_scoring_ccdv(ranked, minimize_cost=True)
        by_approvals = solve_ccdv_priced(approval, minimize_cost=True)
        assert by_rankings.feasible == by_approvals.feasible
        assert by_rankings.cost == by_approvals.cost


def test_bribery_budget_monotone():
    rng = np.random.default_rng(31)
    for _ in range(25):
        election = random_approval_election(rng, int(rng.integers(1, 6)), 3, max_price=3)
        if solve_bribery_priced(election).feasible:
            assert solve_bribery_priced(replace(election, budget=election.budget + 1)).feasible


def test_ccav_adds_only_p_approvers():
    rng = np.random.default_rng(37)
    for _ in range(25):
        election = random_approval_election(rng, 3, 3, max_price=2, addable=5)
        result = solve_ccav_priced(election, minimize_cost=True)
        assert all(0 in election.addable[k].approves for k in result.action)
