import itertools
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given

from conftest import cover_instances
from Covering import SCHEMA, CoverInstance, CoverSolution, VariantError, solve_umm, solve_wsm, type_families
from EmipLowering import WitnessError
from MilpSolver import MilpSolver
from Oracle import brute_cover, random_cover_instance
from RationalIO import SchemaError, load_document

FIXTURES = Path(__file__).parent / "fixtures"


def three_sets(budget):
    return CoverInstance(2, [{0: 1}, {0: 1, 1: 1}, {1: 1}], [1, 1], budget, [1, 3, 2])


def test_wsm_example():
    cover = solve_wsm(three_sets(3))
    assert cover is not None
    assert cover.cost == 3
    assert cover.coverage[0] >= 1 and cover.coverage[1] >= 1


def test_wsm_over_budget():
    assert solve_wsm(three_sets(2)) is None


def test_wsm_nothing_required():
    instance = CoverInstance(2, [{0: 1}, {1: 1}], [0, 0], 0, [2, 2])
    cover = solve_wsm(instance)
    assert cover.chosen == []
    assert cover.cost == 0


def test_wsm_minimize_cost():
    instance = CoverInstance(2, [{0: 1}, {0: 1}, {0: 1, 1: 1}, {1: 1}], [2, 1], 20, [5, 1, 4, 1])
    cover = solve_wsm(instance, minimize_cost=True)
    assert cover.cost == 5
    assert cover.chosen == [1, 2]


def test_wsm_rejects_multisets():
    instance = CoverInstance(1, [{0: 2}], [1], 1)
    with pytest.raises(VariantError):
        solve_wsm(instance)


def test_umm_examples():
    instance = CoverInstance(2, [{0: 2, 1: 2}, {0: 1}], [3, 2], 2)
    cover = solve_umm(instance)
    assert cover.chosen == [0, 1]
    assert cover.coverage == [3, 2]

    instance.budget = 1
    assert solve_umm(instance) is None

    single = CoverInstance(1, [{0: 5}], [5], 1)
    assert solve_umm(single).chosen == [0]


def test_umm_picks_largest_multiplicities():
    instance = CoverInstance(1, [{0: 1}, {0: 3}, {0: 2}], [5], 2)
    cover = solve_umm(instance)
    assert cover.chosen == [1, 2]


def test_umm_variant_checks():
    with pytest.raises(VariantError, match="one multiplicity"):
        solve_umm(CoverInstance(2, [{0: 1, 1: 2}], [1, 1], 1))
    with pytest.raises(VariantError, match="weights"):
        solve_umm(CoverInstance(1, [{0: 1}], [1], 1, [2]))


def test_type_families():
    instance = CoverInstance(2, [{0: 1}, {0: 1}, {1: 1}], [1, 1], 3, [2, 1, 1])
    assert type_families(instance) == {(0,): [1, 0], (1,): [2]}
    assert type_families(CoverInstance(2, [], [0, 0], 0)) == {}

    uniform = CoverInstance(1, [{0: 1}, {0: 4}, {}], [1], 1)
    assert type_families(uniform, by="multiplicity") == {(0,): [1, 0]}


def test_type_families_partition():
    rng = np.random.default_rng(5)
    instance = random_cover_instance(rng, 10, 3)
    families = type_families(instance)
    members = sorted(j for group in families.values() for j in group)
    assert members == [j for j in range(instance.n) if instance.sets[j]]
    for elements, group in families.items():
        for j in group:
            assert tuple(sorted(instance.sets[j])) == elements


def test_instance_validation():
    with pytest.raises(ValueError, match="outside the universe"):
        CoverInstance(1, [{1: 1}], [0], 0)
    with pytest.raises(ValueError, match="requirements"):
        CoverInstance(2, [], [1], 0)
    with pytest.raises(ValueError, match="weights"):
        CoverInstance(1, [{0: 1}], [1], 0, [1, 1])
    assert CoverInstance(1, [{0: 0}], [0], 0).sets == [{}]


def test_solution_verify():
    instance = three_sets(3)
    CoverSolution([0, 2], 3, [1, 1]).verify(instance)
    with pytest.raises(WitnessError, match="covered 0 < 1"):
        CoverSolution([0], 1, [1, 0]).verify(instance)
    with pytest.raises(WitnessError, match="exceeds budget"):
        CoverSolution([0, 1, 2], 6, [2, 2]).verify(instance)


def test_from_json():
    instance = CoverInstance.from_json(load_document(FIXTURES / "wsm3.json", SCHEMA))
    assert instance.weights == [1, 3, 2]
    assert instance.sets == [{0: 1}, {0: 1, 1: 1}, {1: 1}]
    assert CoverInstance.from_json(instance.to_json()) == instance

    with pytest.raises(SchemaError, match="broken.json"):
        CoverInstance.from_json({"m": 1, "sets": [{"3": 1}], "requirements": [0]}, source="broken.json")


@given(instance=cover_instances())
def test_wsm_agrees_with_oracle(instance):
    found = brute_cover(instance)
    cover = solve_wsm(instance, minimize_cost=True)
    assert (cover is None) == (found is None)
    if cover is not None:
        assert cover.cost == found[0]


@given(instance=cover_instances(max_multiplicity=3, uniform=True, max_weight=1))
def test_umm_agrees_with_oracle(instance):
    found = brute_cover(instance)
    cover = solve_umm(instance, minimize_cost=True)
    assert (cover is None) == (found is None)
    if cover is not None:
        assert len(cover.chosen) == found[0]


def test_solver_statistics_accumulate():
    solver = MilpSolver()
    solve_wsm(three_sets(3), solver=solver)
    nodes = solver.nodes
    assert nodes >= 1
    solve_wsm(three_sets(3), solver=solver)
    assert solver.nodes == 2 * nodes


def chosen_per_family(families, chosen):
    return {elements: [j for j in members if j in chosen] for elements, members in families.items()}


@given(instance=cover_instances(max_n=7))
def test_wsm_takes_the_cheapest_of_each_family(instance):
    cover = solve_wsm(instance)
    if cover is None:
        return
    families = type_families(instance, by="weight")
    for elements, taken in chosen_per_family(families, cover.chosen).items():
        cheapest = min(sum(instance.weights[j] for j in subset)
                       for subset in itertools.combinations(families[elements], len(taken)))
        assert sum(instance.weights[j] for j in taken) == cheapest


@given(instance=cover_instances(max_n=7, max_multiplicity=4, uniform=True, max_weight=1))
def test_umm_takes_the_largest_of_each_family(instance):
    cover = solve_umm(instance)
    if cover is None:
        return
    families = type_families(instance, by="multiplicity")
    for elements, taken in chosen_per_family(families, cover.chosen).items():
        largest = max(sum(instance.multiplicity(j) for j in subset)
                      for subset in itertools.combinations(families[elements], len(taken)))
        assert sum(instance.multiplicity(j) for j in taken) == largest
