"""
Elections with a distinguished candidate p, always candidate 0. Approval
elections carry weighted, priced voters and optional addable voters;
ordinal elections carry full rankings and a scoring vector.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import Config
from RationalIO import SchemaError, parse_integer

logger = logging.getLogger(__name__)

SCHEMA = "election-v1"


class InvalidElection(ValueError):
    pass


@dataclass(frozen=True)
class ApprovalVoter:
    approves: frozenset
    weight: int = 1
    price: int = 1


@dataclass(frozen=True)
class RankedVoter:
    """ranking lists candidate indices from most to least preferred."""
    ranking: tuple
    price: int = 1


@dataclass
class ApprovalElection:
    candidates: list
    voters: list
    budget: int = 0
    addable: list = field(default_factory=list)

    def __post_init__(self):
        m = len(self.candidates)
        if m == 0:
            raise InvalidElection("Invalid election: no candidates")
        if len(set(self.candidates)) != m:
            raise InvalidElection("Invalid election: duplicate candidate names")
        for group, voters in (("voter", self.voters), ("addable voter", self.addable)):
            for k, v in enumerate(voters):
                if any(not 0 <= c < m for c in v.approves):
                    raise InvalidElection(f"Invalid {group} {k}: approves an unknown candidate")
                if v.weight < 0 or v.price < 0:
                    raise InvalidElection(f"Invalid {group} {k}: weight and price must be nonnegative")
        if self.budget < 0:
            raise InvalidElection(f"Invalid budget {self.budget}")

    @property
    def p(self):
        return self.candidates[0]

    def has_unit_weights(self):
        return all(v.weight == 1 for v in self.voters + self.addable)

    def has_unit_prices(self):
        return all(v.price == 1 for v in self.voters + self.addable)

    def to_json(self):
        def voter(v):
            return {"approves": [self.candidates[c] for c in sorted(v.approves)], "weight": v.weight, "price": v.price}

        return {
            "schema": SCHEMA,
            "candidates": list(self.candidates),
            "p": self.p,
            "voters": [voter(v) for v in self.voters],
            "addable": [voter(v) for v in self.addable],
            "budget": self.budget,
            "rule": "approval",
        }


@dataclass
class OrdinalElection:
    candidates: list
    voters: list
    scoring: tuple
    budget: int = 0

    def __post_init__(self):
        m = len(self.candidates)
        if m == 0:
            raise InvalidElection("Invalid election: no candidates")
        self.scoring = tuple(int(a) for a in self.scoring)
        if len(self.scoring) != m:
            raise InvalidElection(f"Invalid scoring vector: {len(self.scoring)} entries for {m} candidates")
        if any(a < b for a, b in zip(self.scoring, self.scoring[1:])):
            raise InvalidElection(f"Invalid scoring vector {self.scoring}: must be nonincreasing")
        for k, v in enumerate(self.voters):
            if sorted(v.ranking) != list(range(m)):
                raise InvalidElection(f"Invalid voter {k}: ranking is not a permutation of the candidates")
            if v.price < 0:
                raise InvalidElection(f"Invalid voter {k}: price must be nonnegative")
        if self.budget < 0:
            raise InvalidElection(f"Invalid budget {self.budget}")

    @property
    def p(self):
        return self.candidates[0]

    def points(self, ranking, candidate):
        return self.scoring[ranking.index(candidate)]

    def to_json(self):
        return {
            "schema": SCHEMA,
            "candidates": list(self.candidates),
            "p": self.p,
            "voters": [{"ranking": [self.candidates[c] for c in v.ranking], "price": v.price} for v in self.voters],
            "budget": self.budget,
            "rule": {"scoring": list(self.scoring)},
        }


def borda(m):
    return tuple(range(m - 1, -1, -1))


def plurality(m):
    return (1,) + (0,) * (m - 1)


def k_approval(m, k):
    return (1,) * k + (0,) * (m - k)


@dataclass
class ManipulationResult:
    """
    action holds voter indices: deleted voters (ccdv, scoring-ccdv), indices
    into the addable voters (ccav) or bribed voters, who then approve only p
    (bribery). extra_approvals is the guessed increase of p's score.
    """
    feasible: bool
    kind: str
    action: tuple = ()
    cost: Optional[int] = None
    extra_approvals: Optional[int] = None

    def to_json(self):
        report = {"feasible": self.feasible, "kind": self.kind, "action": list(self.action), "cost": self.cost}
        if self.extra_approvals is not None:
            report["extra_approvals"] = self.extra_approvals
        return report


def approval_score(election, voters=None):
    scores = [0] * len(election.candidates)
    for v in election.voters if voters is None else voters:
        for c in v.approves:
            scores[c] += v.weight
    return scores


def scoring_scores(election, voters=None):
    scores = [0] * len(election.candidates)
    for v in election.voters if voters is None else voters:
        for position, c in enumerate(v.ranking):
            scores[c] += election.scoring[position]
    return scores


def is_winner(scores, unique_winner=Config.UNIQUE_WINNER):
    """Whether candidate 0 wins: no rival has more points (or, for a unique winner, as many)."""
    rivals = scores[1:]
    if not rivals:
        return True
    if unique_winner:
        return scores[0] > max(rivals)
    return scores[0] >= max(rivals)


def replay(election, result):
    """Scores after applying the result's action to the election."""
    action = set(result.action)
    if result.kind == "ccav":
        voters = election.voters + [election.addable[k] for k in sorted(action)]
        return approval_score(election, voters)
    if result.kind == "bribery":
        voters = [ApprovalVoter(frozenset({0}), v.weight, v.price) if k in action else v
                  for k, v in enumerate(election.voters)]
        return approval_score(election, voters)
    voters = [v for k, v in enumerate(election.voters) if k not in action]
    if isinstance(election, OrdinalElection):
        return scoring_scores(election, voters)
    return approval_score(election, voters)


def action_cost(election, result):
    # weighted elections have unit prices, so this is also the number of voters acted on
    pool = election.addable if result.kind == "ccav" else election.voters
    return sum(pool[k].price for k in result.action)


def check_result(election, result, unique_winner=Config.UNIQUE_WINNER):
    """Raise if a feasible result does not make p win within the budget."""
    if not result.feasible:
        return result
    problems = []
    cost = action_cost(election, result)
    if result.cost != cost:
        problems.append(f"reported cost {result.cost} differs from {cost}")
    if cost > election.budget:
        problems.append(f"cost {cost} exceeds budget {election.budget}")
    scores = replay(election, result)
    if not is_winner(scores, unique_winner):
        problems.append(f"p does not win after the action, scores {scores}")
    if problems:
        raise InvalidElection("Invalid manipulation result: " + "; ".join(problems))
    return result


def _candidate_index(names, name, where):
    if name not in names:
        raise SchemaError(f"Invalid {where}: unknown candidate {name!r}")
    return names.index(name)


def election_from_json(document, source="<election>"):
    """Build an ApprovalElection or OrdinalElection; p is moved to index 0."""
    try:
        names = document.get("candidates")
        if not isinstance(names, list) or not names:
            raise SchemaError("Invalid candidates: expected a nonempty list of names")
        names = [str(c) for c in names]
        p = str(document.get("p", names[0]))
        if p not in names:
            raise SchemaError(f"Invalid p: {p!r} is not a candidate")
        names = [p] + [c for c in names if c != p]
        budget = parse_integer(document.get("budget", 0), "budget", 0)
        rule = document.get("rule", "approval")

        if rule == "approval":
            def voter(entry, where):
                if not isinstance(entry, dict) or "approves" not in entry:
                    raise SchemaError(f"Invalid {where}: expected an object with approves")
                approves = frozenset(_candidate_index(names, str(c), where) for c in entry["approves"])
                return ApprovalVoter(approves,
                                     parse_integer(entry.get("weight", 1), f"{where}.weight", 0),
                                     parse_integer(entry.get("price", 1), f"{where}.price", 0))

            voters = [voter(e, f"voters[{k}]") for k, e in enumerate(document.get("voters", []))]
            addable = [voter(e, f"addable[{k}]") for k, e in enumerate(document.get("addable", []))]
            return ApprovalElection(names, voters, budget, addable)

        if isinstance(rule, dict) and "scoring" in rule:
            scoring = [parse_integer(a, f"rule.scoring[{k}]") for k, a in enumerate(rule["scoring"])]
            voters = []
            for k, entry in enumerate(document.get("voters", [])):
                where = f"voters[{k}]"
                if not isinstance(entry, dict) or "ranking" not in entry:
                    raise SchemaError(f"Invalid {where}: expected an object with ranking")
                ranking = tuple(_candidate_index(names, str(c), where) for c in entry["ranking"])
                voters.append(RankedVoter(ranking, parse_integer(entry.get("price", 1), f"{where}.price", 0)))
            return OrdinalElection(names, voters, tuple(scoring), budget)

        raise SchemaError(f"Invalid rule {rule!r}: expected \"approval\" or {{\"scoring\": [...]}}")
    except ValueError as e:
        if isinstance(e, SchemaError) and e.source is not None:
            raise
        raise SchemaError(str(e), source=source)
