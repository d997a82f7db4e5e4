from pathlib import Path

import pytest

from Elections import (SCHEMA, ApprovalElection, ApprovalVoter, InvalidElection, ManipulationResult, OrdinalElection,
                       RankedVoter, approval_score, borda, check_result, election_from_json, is_winner, k_approval,
                       plurality, replay, scoring_scores)
from RationalIO import SchemaError, load_document

FIXTURES = Path(__file__).parent / "fixtures"


def voter(*approves, weight=1, price=1):
    return ApprovalVoter(frozenset(approves), weight, price)


def test_approval_scores():
    election = ApprovalElection(["p", "c1"], [voter(0), voter(0), voter(1, weight=5)])
    assert approval_score(election) == [2, 5]
    assert approval_score(ApprovalElection(["p", "c1", "c2"], [])) == [0, 0, 0]


def test_is_winner():
    assert is_winner([3, 3, 1])
    assert not is_winner([3, 3, 1], unique_winner=True)
    assert is_winner([0])
    assert not is_winner([1, 2])


def test_scoring_vectors():
    assert borda(4) == (3, 2, 1, 0)
    assert plurality(3) == (1, 0, 0)
    assert k_approval(4, 2) == (1, 1, 0, 0)


def test_scoring_scores():
    election = OrdinalElection(["p", "c1", "c2"],
                               [RankedVoter((1, 0, 2)), RankedVoter((1, 0, 2)), RankedVoter((0, 1, 2))], borda(3))
    assert scoring_scores(election) == [4, 5, 0]
    assert election.points((1, 0, 2), 0) == 1


def test_invalid_elections():
    with pytest.raises(InvalidElection, match="no candidates"):
        ApprovalElection([], [])
    with pytest.raises(InvalidElection, match="unknown candidate"):
        ApprovalElection(["p"], [voter(1)])
    with pytest.raises(InvalidElection, match="nonincreasing"):
        OrdinalElection(["p", "c1"], [], (0, 1))
    with pytest.raises(InvalidElection, match="entries"):
        OrdinalElection(["p", "c1"], [], (1,))
    with pytest.raises(InvalidElection, match="permutation"):
        OrdinalElection(["p", "c1"], [RankedVoter((0, 0))], (1, 0))


def test_replay():
    election = ApprovalElection(["p", "c1"], [voter(1), voter(1, 0), voter(1)], 2, [voter(0)])
    assert replay(election, ManipulationResult(True, "ccdv", (0,), 1)) == [1, 2]
    assert replay(election, ManipulationResult(True, "ccav", (0,), 1)) == [2, 3]
    assert replay(election, ManipulationResult(True, "bribery", (0, 2), 2)) == [3, 1]


def test_check_result():
    election = ApprovalElection(["p", "c1"], [voter(0), voter(1, price=2), voter(1, price=3)], 3)
    assert check_result(election, ManipulationResult(True, "ccdv", (1,), 2)).feasible
    with pytest.raises(InvalidElection, match="differs"):
        check_result(election, ManipulationResult(True, "ccdv", (1,), 1))
    with pytest.raises(InvalidElection, match="exceeds budget"):
        check_result(election, ManipulationResult(True, "ccdv", (1, 2), 5))
    with pytest.raises(InvalidElection, match="does not win"):
        check_result(election, ManipulationResult(True, "ccdv", (), 0), unique_winner=True)
    assert not check_result(election, ManipulationResult(False, "ccdv")).feasible


def test_from_json_moves_p_first():
    election = election_from_json({"schema": SCHEMA, "candidates": ["a", "b", "p"], "p": "p",
                                   "voters": [{"approves": ["p", "a"], "weight": 2}], "budget": 1})
    assert election.candidates == ["p", "a", "b"]
    assert election.voters == [voter(0, 1, weight=2)]
    assert election.to_json()["voters"] == [{"approves": ["p", "a"], "weight": 2, "price": 1}]


def test_from_json_fixtures():
    ccdv = election_from_json(load_document(FIXTURES / "ccdv3.json", SCHEMA))
    assert isinstance(ccdv, ApprovalElection)
    assert [v.price for v in ccdv.voters] == [1, 1, 2, 5]
    assert ccdv.budget == 3

    ranked = election_from_json(load_document(FIXTURES / "borda3.json", SCHEMA))
    assert isinstance(ranked, OrdinalElection)
    assert ranked.scoring == (2, 1, 0)
    assert ranked.voters[0].ranking == (1, 0, 2)
    assert election_from_json(ranked.to_json()) == ranked


def test_from_json_errors():
    with pytest.raises(SchemaError, match="unknown candidate 'x'"):
        election_from_json({"candidates": ["p"], "voters": [{"approves": ["x"]}]})
    with pytest.raises(SchemaError, match="Invalid rule"):
        election_from_json({"candidates": ["p"], "rule": "veto"})
    with pytest.raises(SchemaError, match="e.json"):
        election_from_json({"candidates": ["p", "q"], "rule": {"scoring": [0, 1]}}, source="e.json")
