"""
Control and bribery for a distinguished candidate p (index 0), each
reduced to a multicover instance (approval rules) or to a piecewise linear
program over preference orders (scoring rules).
"""
import logging

import Config
from Covering import CoverInstance, VariantError, solve_umm, solve_wsm
from EmipLowering import solve_emip
from EmipModel import EmipModel, VariableKind
from Elections import InvalidElection, ManipulationResult, OrdinalElection, approval_score, check_result
from PwlFunction import from_sorted_weights

logger = logging.getLogger(__name__)

KINDS = ("ccdv", "ccav", "bribery", "scoring-ccdv")


def _requirements(scores, target, unique_winner):
    margin = 1 if unique_winner else 0
    return [max(s - target + margin, 0) for s in scores[1:]]


def _require_unit_weights(voters, what):
    if any(v.weight != 1 for v in voters):
        raise VariantError(f"Invalid election for priced {what}: voter weights must all be 1")


def _require_unit_prices(voters, what):
    if any(v.price != 1 for v in voters):
        raise VariantError(f"Invalid election for weighted {what}: voter prices must all be 1")


def _infeasible(kind):
    return ManipulationResult(False, kind)


def _deletion_instance(election, unique_winner, weighted):
    scores = approval_score(election)
    pool = [k for k, v in enumerate(election.voters) if 0 not in v.approves]
    sets = [{c: election.voters[k].weight if weighted else 1 for c in election.voters[k].approves} for k in pool]
    weights = None if weighted else [election.voters[k].price for k in pool]
    requirements = [0] + _requirements(scores, scores[0], unique_winner)
    return pool, CoverInstance(len(election.candidates), sets, requirements, election.budget, weights)


def _addition_instance(election, unique_winner, weighted):
    scores = approval_score(election)
    # adding a voter who does not approve p never helps
    pool = [k for k, v in enumerate(election.addable) if 0 in v.approves]
    m = len(election.candidates)
    sets = [{c: election.addable[k].weight if weighted else 1 for c in range(1, m)
             if c not in election.addable[k].approves} for k in pool]
    weights = None if weighted else [election.addable[k].price for k in pool]
    requirements = [0] + _requirements(scores, scores[0], unique_winner)
    return pool, CoverInstance(m, sets, requirements, election.budget, weights)


def _result(election, kind, pool, cover, unique_winner, extra_approvals=None):
    if cover is None:
        return _infeasible(kind)
    action = tuple(sorted(pool[j] for j in cover.chosen))
    result = ManipulationResult(True, kind, action, cover.cost, extra_approvals)
    return check_result(election, result, unique_winner)


def solve_ccdv_priced(election, minimize_cost=False, unique_winner=Config.UNIQUE_WINNER, solver=None):
    """Delete voters of total price <= budget so that p wins."""
    _require_unit_weights(election.voters, "CCDV")
    pool, instance = _deletion_instance(election, unique_winner, weighted=False)
    logger.info(f"CCDV: {len(pool)} deletable voters, requirements {instance.requirements[1:]}")
    return _result(election, "ccdv", pool, solve_wsm(instance, minimize_cost, solver), unique_winner)


def solve_ccav_priced(election, minimize_cost=False, unique_winner=Config.UNIQUE_WINNER, solver=None):
    """Add voters of total price <= budget so that p wins."""
    _require_unit_weights(election.voters + election.addable, "CCAV")
    pool, instance = _addition_instance(election, unique_winner, weighted=False)
    logger.info(f"CCAV: {len(pool)} useful addable voters, requirements {instance.requirements[1:]}")
    return _result(election, "ccav", pool, solve_wsm(instance, minimize_cost, solver), unique_winner)


def solve_ccdv_weighted(election, minimize_cost=False, unique_winner=Config.UNIQUE_WINNER, solver=None):
    """Delete at most budget weighted voters so that p wins."""
    _require_unit_prices(election.voters, "CCDV")
    pool, instance = _deletion_instance(election, unique_winner, weighted=True)
    logger.info(f"weighted CCDV: {len(pool)} deletable voters, requirements {instance.requirements[1:]}")
    return _result(election, "ccdv", pool, solve_umm(instance, minimize_cost, solver), unique_winner)


def solve_ccav_weighted(election, minimize_cost=False, unique_winner=Config.UNIQUE_WINNER, solver=None):
    """Add at most budget weighted voters so that p wins."""
    _require_unit_prices(election.voters + election.addable, "CCAV")
    pool, instance = _addition_instance(election, unique_winner, weighted=True)
    logger.info(f"weighted CCAV: {len(pool)} useful addable voters, requirements {instance.requirements[1:]}")
    return _result(election, "ccav", pool, solve_umm(instance, minimize_cost, solver), unique_winner)


def solve_bribery_priced(election, minimize_cost=False, unique_winner=Config.UNIQUE_WINNER, solver=None):
    """
    Bribe voters of total price <= budget; a bribed voter approves only p.
    Every possible gain l of p is tried; with minimize_cost the cheapest
    action over all l is returned, ties to the smaller l.
    """
    _require_unit_weights(election.voters, "bribery")
    scores = approval_score(election)
    m = len(election.candidates)
    sets = []
    for v in election.voters:
        support = {c: 1 for c in v.approves if c != 0}
        if 0 not in v.approves:
            support[0] = 1
        sets.append(support)
    weights = [v.price for v in election.voters]
    pool = list(range(len(election.voters)))

    best = None
    for extra in range(len(election.voters) + 1):
        requirements = [extra] + _requirements(scores, scores[0] + extra, unique_winner)
        cover = solve_wsm(CoverInstance(m, sets, requirements, election.budget, weights), minimize_cost, solver)
        logger.debug(f"bribery with {extra} extra approvals: {'infeasible' if cover is None else cover.cost}")
        if cover is None:
            continue
        if best is None or cover.cost < best[1].cost:
            best = (extra, cover)
        if not minimize_cost or cover.cost == 0:
            break
    if best is None:
        return _infeasible("bribery")
    extra, cover = best
    logger.info(f"bribery: {len(cover.chosen)} voters bribed for {extra} extra approvals, cost {cover.cost}")
    return _result(election, "bribery", pool, cover, unique_winner, extra)


def preference_orders(election):
    """Distinct rankings in first-seen order, each with its voters sorted by (price, index)."""
    orders = {}
    for k, v in enumerate(election.voters):
        orders.setdefault(v.ranking, []).append(k)
    return {ranking: sorted(members, key=lambda k: (election.voters[k].price, k))
            for ranking, members in orders.items()}


def solve_scoring_ccdv(election, minimize_cost=False, unique_winner=Config.UNIQUE_WINNER, solver=None,
                       candidate_cap=Config.SCORING_CANDIDATE_CAP):
    """
    Delete voters of total price <= budget under a scoring rule. One
    integer variable per preference order present counts its deleted
    voters, cheapest first.
    """
    m = len(election.candidates)
    if m > candidate_cap:
        raise InvalidElection(f"Invalid election: {m} candidates exceed the cap of {candidate_cap}")
    orders = preference_orders(election)
    model = EmipModel()
    names = [model.add_variable(f"order{k}", VariableKind.INTEGER, 0, len(members)).name
             for k, members in enumerate(orders.values())]

    margin = 1 if unique_winner else 0
    for rival in range(1, m):
        advantage = {name: election.points(ranking, 0) - election.points(ranking, rival)
                     for name, ranking in zip(names, orders)}
        # p keeps at least the rival's points once c_sigma voters of each order are gone
        total = sum(len(members) * advantage[name] for name, members in zip(names, orders.values()))
        model.add_constraint(advantage, {}, total - margin, name=f"beat{rival}")
    costs = {name: from_sorted_weights(election.voters[k].price for k in members)
             for name, members in zip(names, orders.values())}
    model.add_constraint(costs, {}, election.budget, name="budget")
    logger.info(f"scoring CCDV: {len(election.voters)} voters in {len(orders)} preference orders")

    total_price = sum(v.price for v in election.voters)
    solution = solve_emip(model, solver, minimize_load_of="budget" if minimize_cost else None,
                          load_bracket=(0, min(election.budget, total_price)))
    if not solution.feasible:
        return _infeasible("scoring-ccdv")
    deleted = []
    for name, members in zip(names, orders.values()):
        deleted.extend(members[:int(solution.assignment[name])])
    action = tuple(sorted(deleted))
    result = ManipulationResult(True, "scoring-ccdv", action, sum(election.voters[k].price for k in action))
    return check_result(election, result, unique_winner)


def solve_control(election, kind, minimize_cost=False, unique_winner=Config.UNIQUE_WINNER, solver=None,
                  candidate_cap=Config.SCORING_CANDIDATE_CAP):
    """Dispatch to the priced or weighted solver the election's fields call for."""
    if kind not in KINDS:
        raise ValueError(f"Invalid control kind {kind!r}")
    if isinstance(election, OrdinalElection):
        if kind not in ("ccdv", "scoring-ccdv"):
            raise VariantError(f"Invalid election for {kind}: scoring rules support voter deletion only")
        return solve_scoring_ccdv(election, minimize_cost, unique_winner, solver, candidate_cap)
    if kind == "scoring-ccdv":
        raise VariantError("Invalid election for scoring-ccdv: expected a scoring rule")

    voters = election.voters + (election.addable if kind == "ccav" else [])
    priced = all(v.weight == 1 for v in voters)
    if kind == "bribery":
        return solve_bribery_priced(election, minimize_cost, unique_winner, solver)
    if priced:
        solver_for = solve_ccdv_priced if kind == "ccdv" else solve_ccav_priced
    elif all(v.price == 1 for v in voters):
        solver_for = solve_ccdv_weighted if kind == "ccdv" else solve_ccav_weighted
    else:
        raise VariantError(f"Invalid election for {kind}: needs unit weights or unit prices")
    logger.debug(f"{kind}: {'priced' if priced else 'weighted'} solver")
    return solver_for(election, minimize_cost, unique_winner, solver)
